//! Structural source model: files, top-level classes, methods and
//! attributes, produced by a lenient parser for a Java-like subset.

mod parse;
mod snapshot;
mod tokenize;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use parse::{parse_source_file, ParsedFile};
pub use snapshot::{build_snapshot, Snapshot, DEFAULT_EXTENSION};
pub use tokenize::{tokenize, TokenizeError};

/// Visibility as written in source. Top-level classes only use `Public`
/// and `PackagePrivate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum AccessModifier {
    Public,
    Protected,
    Private,
    PackagePrivate,
}

impl fmt::Display for AccessModifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AccessModifier::Public => "public",
            AccessModifier::Protected => "protected",
            AccessModifier::Private => "private",
            AccessModifier::PackagePrivate => "package-private",
        })
    }
}

/// Multiset of tokens, stored as token -> count.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TokenBag {
    counts: BTreeMap<String, u32>,
    len: usize,
}

impl TokenBag {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn insert(&mut self, token: impl Into<String>) {
        *self.counts.entry(token.into()).or_insert(0) += 1;
        self.len += 1;
    }

    pub fn count(&self, token: &str) -> u32 {
        self.counts.get(token).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u32)> {
        self.counts.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Size of the multiset intersection.
    pub fn intersection_len(&self, other: &TokenBag) -> usize {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .map(|(k, &n)| n.min(large.count(k)) as usize)
            .sum()
    }
}

impl<S: Into<String>> FromIterator<S> for TokenBag {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut bag = TokenBag::default();
        for token in iter {
            bag.insert(token);
        }
        bag
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    pub parameter_types: Vec<String>,
    pub return_type: String,
    pub access_modifier: AccessModifier,
    pub body_tokens: TokenBag,
}

impl MethodDecl {
    /// `name(T1,T2)`; the identity of a method within its class.
    pub fn signature(&self) -> String {
        format!("{}({})", self.name, self.parameter_types.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDecl {
    pub name: String,
    pub type_name: String,
    pub access_modifier: AccessModifier,
    pub initializer_tokens: TokenBag,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassDecl {
    pub name: String,
    pub qualified_name: String,
    pub access_modifier: AccessModifier,
    pub superclass_name: Option<String>,
    pub attributes: Vec<AttributeDecl>,
    pub methods: Vec<MethodDecl>,
}

impl ClassDecl {
    pub fn package(&self) -> &str {
        package_of(&self.qualified_name)
    }

    pub fn method(&self, signature: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.signature() == signature)
    }

    pub fn attribute(&self, name: &str) -> Option<&AttributeDecl> {
        self.attributes.iter().find(|a| a.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceFile {
    pub path: String,
    pub package_name: String,
    pub classes: Vec<ClassDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ParseWarning {
    pub path: String,
    pub message: String,
}

impl fmt::Display for ParseWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

pub fn qualify(package: &str, name: &str) -> String {
    if package.is_empty() {
        name.to_string()
    } else {
        format!("{package}.{name}")
    }
}

/// Package part of a qualified class name; empty for the default package.
pub fn package_of(qualified_name: &str) -> &str {
    qualified_name
        .rsplit_once('.')
        .map(|(pkg, _)| pkg)
        .unwrap_or("")
}

/// Last segment of a possibly qualified, possibly generic type name.
pub fn simple_type_name(type_name: &str) -> &str {
    let raw = type_name.split('<').next().unwrap_or(type_name);
    raw.rsplit('.').next().unwrap_or(raw).trim()
}
