//! Detections produced by an external tool, supplied as a JSON array of
//! records `{type, description, before: [{file, kind, name}], after: [...]}`.

use serde_json::Value;
use thiserror::Error;

use super::types::{CodeLocation, EntityKind, RefactoringInstance, RefactoringType};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("malformed document at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

fn field_error(field: impl Into<String>, message: &str) -> SchemaError {
    SchemaError::Field {
        field: field.into(),
        message: message.to_string(),
    }
}

fn string_field(record: &Value, path: &str, key: &str) -> Result<String, SchemaError> {
    match record.get(key) {
        Some(Value::String(s)) => Ok(s.clone()),
        Some(_) => Err(field_error(format!("{path}.{key}"), "expected a string")),
        None => Err(field_error(format!("{path}.{key}"), "missing field")),
    }
}

fn locations(record: &Value, path: &str, key: &str) -> Result<Vec<CodeLocation>, SchemaError> {
    let field = format!("{path}.{key}");
    let items = match record.get(key) {
        Some(Value::Array(items)) => items,
        Some(_) => return Err(field_error(field, "expected an array")),
        None => return Err(field_error(field, "missing field")),
    };
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        let at = format!("{field}[{i}]");
        if !item.is_object() {
            return Err(field_error(at, "expected an object"));
        }
        let kind = match string_field(item, &at, "kind")?.as_str() {
            "package" => EntityKind::Package,
            "class" => EntityKind::Class,
            "method" => EntityKind::Method,
            "attribute" => EntityKind::Attribute,
            _ => {
                return Err(field_error(
                    format!("{at}.kind"),
                    "expected one of package, class, method, attribute",
                ))
            }
        };
        let name = string_field(item, &at, "name")?;
        if name.is_empty() {
            return Err(field_error(format!("{at}.name"), "must not be empty"));
        }
        out.push(CodeLocation::new(&string_field(item, &at, "file")?, kind, name));
    }
    Ok(out)
}

/// Parses an external detections document. Type names outside the built-in
/// catalog are kept verbatim as [`RefactoringType::Other`].
pub fn ingest_external_detections(document: &str) -> Result<Vec<RefactoringInstance>, SchemaError> {
    let value: Value = serde_json::from_str(document).map_err(|e| SchemaError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let Value::Array(records) = value else {
        return Err(field_error("$", "expected an array of records"));
    };
    let mut out = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let path = format!("[{i}]");
        if !record.is_object() {
            return Err(field_error(path, "expected an object"));
        }
        out.push(RefactoringInstance {
            refactoring_type: RefactoringType::from_name(&string_field(record, &path, "type")?),
            description: string_field(record, &path, "description")?,
            before_locations: locations(record, &path, "before")?,
            after_locations: locations(record, &path, "after")?,
        });
    }
    out.sort();
    out.dedup();
    Ok(out)
}
