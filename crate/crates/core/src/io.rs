//! JSON density-matrix files: `{"dim": n, "re": [[..]], "im": [[..]]}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{c, ComplexMatrix};
use crate::states::{DensityMatrix, StateError};

#[derive(Debug, Error)]
pub enum ReadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed density matrix file: {0}")]
    Parse(String),
    #[error(transparent)]
    Invalid(#[from] StateError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let n = m.rows();
        let row = |r: usize, f: fn(crate::linalg::C64) -> f64| (0..n).map(|col| f(m[(r, col)])).collect();
        MatrixFile {
            dim: n,
            re: (0..n).map(|r| row(r, |z| z.re)).collect(),
            im: (0..n).map(|r| row(r, |z| z.im)).collect(),
        }
    }

    /// Checks the shape only; physical invariants are left to [`DensityMatrix::new`].
    pub fn to_matrix(&self) -> Result<ComplexMatrix, ReadError> {
        let n = self.dim;
        let shape_ok = |rows: &Vec<Vec<f64>>| rows.len() == n && rows.iter().all(|r| r.len() == n);
        if !shape_ok(&self.re) || !shape_ok(&self.im) {
            return Err(ReadError::Parse(format!("\"re\" and \"im\" must both be {n}x{n}")));
        }
        Ok(ComplexMatrix::from_fn(n, n, |r, col| c(self.re[r][col], self.im[r][col])))
    }
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix, ReadError> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| ReadError::Parse(e.to_string()))?;
    file.to_matrix()
}

pub fn parse_density(text: &str) -> Result<DensityMatrix, ReadError> {
    Ok(DensityMatrix::new(parse_matrix(text)?)?)
}

pub fn read_density(path: &Path) -> Result<DensityMatrix, ReadError> {
    let text = fs::read_to_string(path).map_err(|source| ReadError::Io { path: path.display().to_string(), source })?;
    parse_density(&text)
}

pub fn to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&MatrixFile::from_matrix(m)).expect("plain numbers serialize")
}

pub fn write_density(path: &Path, rho: &DensityMatrix) -> std::io::Result<()> {
    fs::write(path, to_json(rho.matrix()) + "\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{random_density, werner};

    #[test]
    fn round_trip() {
        let rho = random_density(1, 2);
        let back = parse_density(&to_json(rho.matrix())).unwrap();
        assert_eq!(back.matrix(), rho.matrix());
    }

    #[test]
    fn parse_errors_are_distinct_from_invariant_errors() {
        assert!(matches!(parse_density("{not json"), Err(ReadError::Parse(_))));
        assert!(matches!(parse_density(r#"{"dim":2,"re":[[1]],"im":[[0]]}"#), Err(ReadError::Parse(_))));
        let mut f = MatrixFile::from_matrix(werner(0.3).unwrap().matrix());
        f.re[0][0] += 0.5;
        let text = serde_json::to_string(&f).unwrap();
        match parse_density(&text) {
            Err(ReadError::Invalid(e)) => assert_eq!(e.invariant(), Some("unit_trace")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn non_hermitian_is_named() {
        let text = r#"{"dim":4,"re":[[0.25,0.1,0,0],[0,0.25,0,0],[0,0,0.25,0],[0,0,0,0.25]],"im":[[0,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#;
        match parse_density(text) {
            Err(ReadError::Invalid(e)) => assert_eq!(e.invariant(), Some("hermitian")),
            other => panic!("{other:?}"),
        }
    }
}
