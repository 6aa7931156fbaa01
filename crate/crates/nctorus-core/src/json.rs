//! JSON encoding of torus elements as arrays of `{"r", "re", "im"}` records.

use std::sync::Arc;

use crate::{TermRecord, TorusElement, TorusError, ThetaMatrix};

#[derive(Debug, thiserror::Error)]
pub enum JsonError {
    #[error(transparent)]
    Syntax(#[from] serde_json::Error),
    #[error(transparent)]
    Torus(#[from] TorusError),
}

pub fn element_to_value(a: &TorusElement) -> serde_json::Value {
    serde_json::to_value(a.to_records()).expect("term records always serialize")
}

pub fn element_to_string(a: &TorusElement) -> String {
    serde_json::to_string(&a.to_records()).expect("term records always serialize")
}

pub fn element_from_value(theta: &Arc<ThetaMatrix>, value: &serde_json::Value) -> Result<TorusElement, JsonError> {
    let records: Vec<TermRecord> = serde_json::from_value(value.clone())?;
    Ok(TorusElement::from_records(theta, &records)?)
}

pub fn element_from_str(theta: &Arc<ThetaMatrix>, text: &str) -> Result<TorusElement, JsonError> {
    let records: Vec<TermRecord> = serde_json::from_str(text)?;
    Ok(TorusElement::from_records(theta, &records)?)
}
