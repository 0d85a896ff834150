//! JSON field files.
//!
//! ```json
//! {"degree": 2, "P": [[0,0],[-2,0],[0,0],[1,0],[0,0],[0,0]], "Q": [...], "label": "v0"}
//! ```
//!
//! Coefficients follow the monomial order `1, x, y, x^2, xy, y^2, x^3, ...`, each as `[re, im]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::VectorField;
use crate::numkernel::{monomial_count, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldFile {
    pub degree: usize,
    #[serde(rename = "P")]
    pub p: Vec<C64>,
    #[serde(rename = "Q")]
    pub q: Vec<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl FieldFile {
    pub fn from_field(v: &VectorField, label: Option<String>, seed: Option<u64>) -> FieldFile {
        FieldFile {
            degree: v.degree(),
            p: v.p().coeffs().to_vec(),
            q: v.q().coeffs().to_vec(),
            label,
            seed,
        }
    }

    pub fn to_field(&self) -> Result<VectorField> {
        let want = monomial_count(self.degree);
        for (name, c) in [("P", &self.p), ("Q", &self.q)] {
            if c.len() != want {
                return Err(Error::DimensionMismatch(format!(
                    "{name} has {} coefficients, degree {} needs {want}",
                    c.len(),
                    self.degree
                )));
            }
            if c.iter().any(|z| !z.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} has a non-finite coefficient")));
            }
        }
        VectorField::from_coeffs(self.degree, self.p.clone(), self.q.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("field files always serialize")
    }
}

pub fn parse_field_str(text: &str) -> Result<FieldFile> {
    serde_json::from_str(text).map_err(|e| Error::ParseError {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn read_field_file(path: &Path) -> Result<FieldFile> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    parse_field_str(&text)
}

/// Read and validate a field file.
pub fn parse_field_file(path: &Path) -> Result<VectorField> {
    read_field_file(path)?.to_field()
}

pub fn write_field_file(path: &Path, file: &FieldFile) -> Result<()> {
    std::fs::write(path, file.to_json() + "\n")
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}
