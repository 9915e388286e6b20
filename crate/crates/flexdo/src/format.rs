//! DAG document and hardware profile serialization. Both formats are plain
//! JSON; a parsed DAG must also pass [`validate`] before it is returned.

use crate::dag::{validate, DagApp, ValidationReport};
use crate::env::Environment;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("malformed document: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("document violates DAG invariants: {0}")]
    Invalid(ValidationReport),
}

/// Parses a DAG document, surfacing schema problems with their location and
/// invariant violations via the validation report.
pub fn parse_dag_file(bytes: &[u8]) -> Result<DagApp, FormatError> {
    let dag: DagApp = serde_json::from_slice(bytes)?;
    let report = validate(&dag);
    if !report.is_valid() {
        return Err(FormatError::Invalid(report));
    }
    Ok(dag)
}

/// Serializes a DAG so that `parse_dag_file(write_dag_file(dag))` returns
/// the identical value field for field.
pub fn write_dag_file(dag: &DagApp) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(dag).expect("DAG serialization cannot fail");
    bytes.push(b'\n');
    bytes
}

/// Parses a hardware profile (mobile spec, edge spec, channel rate).
pub fn parse_profile(bytes: &[u8]) -> Result<Environment, FormatError> {
    Ok(serde_json::from_slice(bytes)?)
}

pub fn write_profile(env: &Environment) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(env).expect("profile serialization cannot fail");
    bytes.push(b'\n');
    bytes
}
