//! The JSON matrix-file format: subsystem dimensions plus a flat row-major
//! list of [re, im] pairs of length (prod dims)^2.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use entglkit::qstate::ComplexMatrix;
use entglkit::QuantumState;

use crate::report::fmt_f64;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dims: Vec<usize>,
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug)]
pub enum FileError {
    Io(String),
    Json(String),
}

impl std::fmt::Display for FileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FileError::Io(m) | FileError::Json(m) => write!(f, "{m}"),
        }
    }
}

impl MatrixFile {
    pub fn read(path: &Path) -> Result<Self, FileError> {
        let raw = std::fs::read_to_string(path)
            .map_err(|e| FileError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&raw).map_err(|e| {
            FileError::Json(format!(
                "{}: line {}, column {}: {e}",
                path.display(),
                e.line(),
                e.column()
            ))
        })
    }

    pub fn from_matrix(matrix: &ComplexMatrix, dims: &[usize]) -> Self {
        Self {
            dims: dims.to_vec(),
            data: matrix.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_state(&self) -> entglkit::Result<QuantumState> {
        let total: usize = self.dims.iter().product();
        let entries: Vec<Complex64> = self
            .data
            .iter()
            .map(|[re, im]| Complex64::new(*re, *im))
            .collect();
        let matrix = ComplexMatrix::new(total, total, entries)?;
        QuantumState::new(matrix, self.dims.clone())
    }

    /// Deterministic rendering with 17-significant-digit floats.
    pub fn render(&self) -> String {
        let mut out = String::from("{\"dims\":[");
        for (i, d) in self.dims.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&d.to_string());
        }
        out.push_str("],\"data\":[");
        for (i, [re, im]) in self.data.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("[{},{}]", fmt_f64(*re), fmt_f64(*im)));
        }
        out.push_str("]}\n");
        out
    }

    pub fn write(&self, path: &Path) -> Result<(), FileError> {
        std::fs::write(path, self.render()).map_err(|e| FileError::Io(e.to_string()))
    }
}
