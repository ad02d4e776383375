use std::collections::{BTreeMap, BTreeSet};

use super::{parse_source_file, ClassDecl, ParseWarning, SourceFile};

pub const DEFAULT_EXTENSION: &str = ".java";

#[derive(Debug, Clone, PartialEq, Eq)]
struct ClassSite {
    path: String,
    index: usize,
}

/// Parsed source tree at one commit.
///
/// Each qualified class name resolves to exactly one declaration. When
/// several files declare the same name, the lexicographically smallest path
/// wins and the other sites are remembered in `shadowed`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Snapshot {
    files: BTreeMap<String, SourceFile>,
    index: BTreeMap<String, ClassSite>,
    shadowed: BTreeMap<String, Vec<String>>,
    warnings: Vec<ParseWarning>,
}

/// Parses every file whose path ends with `extension`; other files are
/// ignored.
pub fn build_snapshot<'a, I>(files: I, extension: &str) -> Snapshot
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    let sources: BTreeMap<&str, &str> = files
        .into_iter()
        .filter(|(path, _)| !path.is_empty() && path.ends_with(extension))
        .collect();

    let mut snapshot = Snapshot::default();
    for (path, text) in sources {
        let parsed = parse_source_file(path, text);
        snapshot.warnings.extend(parsed.warnings);
        let mut file = parsed.file;
        let mut kept = Vec::with_capacity(file.classes.len());
        for class in file.classes.drain(..) {
            if snapshot.index.contains_key(&class.qualified_name) {
                snapshot.warnings.push(ParseWarning {
                    path: path.to_string(),
                    message: format!(
                        "class {} already declared in {}; declaration ignored",
                        class.qualified_name, snapshot.index[&class.qualified_name].path
                    ),
                });
                snapshot
                    .shadowed
                    .entry(class.qualified_name.clone())
                    .or_default()
                    .push(path.to_string());
                continue;
            }
            snapshot.index.insert(
                class.qualified_name.clone(),
                ClassSite {
                    path: path.to_string(),
                    index: kept.len(),
                },
            );
            kept.push(class);
        }
        file.classes = kept;
        snapshot.files.insert(path.to_string(), file);
    }
    snapshot.warnings.sort();
    snapshot
}

impl Snapshot {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn files(&self) -> &BTreeMap<String, SourceFile> {
        &self.files
    }

    pub fn warnings(&self) -> &[ParseWarning] {
        &self.warnings
    }

    pub fn class_count(&self) -> usize {
        self.index.len()
    }

    /// Looks up a class by qualified name, returning its file path too.
    pub fn class(&self, qualified_name: &str) -> Option<(&str, &ClassDecl)> {
        let site = self.index.get(qualified_name)?;
        let class = &self.files[&site.path].classes[site.index];
        Some((site.path.as_str(), class))
    }

    /// All classes in qualified-name order, with their file paths.
    pub fn classes(&self) -> impl Iterator<Item = (&str, &ClassDecl)> {
        self.index
            .values()
            .map(|site| (site.path.as_str(), &self.files[&site.path].classes[site.index]))
    }

    /// Every file declaring `qualified_name`, including shadowed ones.
    pub fn declaration_sites(&self, qualified_name: &str) -> BTreeSet<&str> {
        let mut sites: BTreeSet<&str> = self
            .index
            .get(qualified_name)
            .map(|s| s.path.as_str())
            .into_iter()
            .collect();
        if let Some(extra) = self.shadowed.get(qualified_name) {
            sites.extend(extra.iter().map(String::as_str));
        }
        sites
    }

    /// Packages containing at least one class.
    pub fn packages(&self) -> BTreeSet<&str> {
        self.classes().map(|(_, c)| c.package()).collect()
    }

    /// First class (in qualified-name order) with the given simple name.
    pub fn class_by_simple_name(&self, name: &str) -> Option<(&str, &ClassDecl)> {
        self.classes().find(|(_, c)| c.name == name)
    }
}
