use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

macro_rules! refactoring_types {
    ($($variant:ident),+ $(,)?) => {
        /// Kind of a detected refactoring. `Other` carries type names from an
        /// external detector that are not part of the built-in catalog; they
        /// compare by exact string.
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub enum RefactoringType {
            $($variant,)+
            Other(String),
        }

        impl RefactoringType {
            pub const CATALOG: &'static [RefactoringType] = &[$(RefactoringType::$variant,)+];

            pub fn name(&self) -> &str {
                match self {
                    $(RefactoringType::$variant => stringify!($variant),)+
                    RefactoringType::Other(name) => name,
                }
            }

            /// Parses a type name. Whitespace is ignored when matching the
            /// catalog, so `Move Class` and `MoveClass` are the same type.
            pub fn from_name(name: &str) -> Self {
                let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
                match compact.as_str() {
                    $(stringify!($variant) => RefactoringType::$variant,)+
                    _ => RefactoringType::Other(name.to_string()),
                }
            }
        }
    };
}

refactoring_types!(
    MoveClass,
    RenameClass,
    MoveAndRenameClass,
    ChangeClassAccessModifier,
    MovePackage,
    SplitPackage,
    MergePackage,
    MoveMethod,
    RenameMethod,
    PushDownMethod,
    PullUpMethod,
    AddParameter,
    RemoveParameter,
    ChangeMethodAccessModifier,
    MoveAttribute,
    RenameAttribute,
    ChangeAttributeAccessModifier,
);

impl fmt::Display for RefactoringType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for RefactoringType {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for RefactoringType {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        Ok(RefactoringType::from_name(&name))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntityKind {
    Package,
    Class,
    Method,
    Attribute,
}

impl EntityKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EntityKind::Package => "package",
            EntityKind::Class => "class",
            EntityKind::Method => "method",
            EntityKind::Attribute => "attribute",
        }
    }
}

/// Where a refactoring applies. Methods are named `pkg.Class.name(T1,T2)`,
/// attributes `pkg.Class.name`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CodeLocation {
    #[serde(rename = "file")]
    pub file_path: String,
    #[serde(rename = "kind")]
    pub entity_kind: EntityKind,
    #[serde(rename = "name")]
    pub qualified_entity_name: String,
}

impl CodeLocation {
    pub fn new(file_path: &str, entity_kind: EntityKind, name: impl Into<String>) -> Self {
        Self {
            file_path: file_path.to_string(),
            entity_kind,
            qualified_entity_name: name.into(),
        }
    }
}

impl fmt::Display for CodeLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} ({})",
            self.entity_kind.as_str(),
            self.qualified_entity_name,
            self.file_path
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RefactoringInstance {
    #[serde(rename = "type")]
    pub refactoring_type: RefactoringType,
    pub description: String,
    #[serde(rename = "before")]
    pub before_locations: Vec<CodeLocation>,
    #[serde(rename = "after")]
    pub after_locations: Vec<CodeLocation>,
}

impl RefactoringInstance {
    /// All files touched on either side.
    pub fn files(&self) -> impl Iterator<Item = &str> {
        self.before_locations
            .iter()
            .chain(&self.after_locations)
            .map(|l| l.file_path.as_str())
    }

    /// One tab-separated line: type, description, before, after.
    pub fn to_listing_line(&self) -> String {
        let join = |locs: &[CodeLocation]| {
            locs.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ")
        };
        format!(
            "{}\t{}\t{}\t{}",
            self.refactoring_type,
            self.description,
            join(&self.before_locations),
            join(&self.after_locations)
        )
    }
}

/// Similarity cutoff for structural matching, in (0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Threshold(f64);

#[derive(Debug, Clone, PartialEq, Error)]
#[error("threshold must be in (0, 1], got {0}")]
pub struct InvalidThreshold(pub f64);

impl Threshold {
    pub const DEFAULT: Threshold = Threshold(0.5);

    pub fn new(value: f64) -> Result<Self, InvalidThreshold> {
        if value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(InvalidThreshold(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Self::DEFAULT
    }
}

impl TryFrom<f64> for Threshold {
    type Error = InvalidThreshold;

    fn try_from(value: f64) -> Result<Self, Self::Error> {
        Threshold::new(value)
    }
}

impl From<Threshold> for f64 {
    fn from(t: Threshold) -> f64 {
        t.0
    }
}
