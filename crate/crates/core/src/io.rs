//! JSON file formats: coefficient files and substitution matrices.
//!
//! A coefficient file looks like
//!
//! ```json
//! {"n": 2, "d": 2, "coeffs": {"2,0": [-1, 0], "0,2": [-1, 0]}}
//! ```
//!
//! Keys are comma-joined exponent vectors of degree `d`; missing keys are 0.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::monomial::{CoefficientVector, ExponentVector, MonomialBasis};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub n: usize,
    pub d: u32,
    pub coeffs: BTreeMap<String, [f64; 2]>,
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: line {}, column {}: {e}", e.line(), e.column()))
}

impl CoefficientFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| json_error("malformed coefficient file", e))
    }

    /// Builds the basis and the dense coefficient vector, rejecting keys that
    /// do not name a monomial of degree `d` in `n` variables.
    pub fn resolve(&self) -> Result<(MonomialBasis, CoefficientVector)> {
        let basis = MonomialBasis::new(self.n, self.d)?;
        let mut values = vec![Complex64::new(0.0, 0.0); basis.len()];
        for (key, [re, im]) in &self.coeffs {
            let k = ExponentVector::parse(key)?;
            if k.len() != self.n {
                return Err(Error::Parse(format!("key {key:?}: expected {} exponents, found {}", self.n, k.len())));
            }
            if k.degree() != self.d {
                return Err(Error::Parse(format!("key {key:?}: degree {} differs from d = {}", k.degree(), self.d)));
            }
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Parse(format!("key {key:?}: coefficient is not finite")));
            }
            let idx = basis.index_of(k.entries()).expect("degree-d monomial is in the basis");
            values[idx] = Complex64::new(*re, *im);
        }
        let a = CoefficientVector::new(&basis, values)?;
        Ok((basis, a))
    }

    /// Every monomial of the basis, zeros included, in a sorted map.
    pub fn from_vector(basis: &MonomialBasis, a: &CoefficientVector) -> Self {
        let coeffs = basis.monomials().iter().zip(a.values()).map(|(k, z)| (k.key(), [z.re, z.im])).collect();
        Self { schema: Some(crate::SCHEMA.to_string()), n: basis.n(), d: basis.d(), coeffs }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum MatrixFile {
    Bare(Vec<Vec<f64>>),
    Wrapped { g: Vec<Vec<f64>> },
}

/// A real square matrix given as `[[..], ..]` or `{"g": [[..], ..]}`.
pub fn parse_matrix(text: &str, n: usize) -> Result<DenseMatrix<f64>> {
    let rows = match serde_json::from_str::<MatrixFile>(text).map_err(|e| json_error("malformed matrix file", e))? {
        MatrixFile::Bare(r) | MatrixFile::Wrapped { g: r } => r,
    };
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("matrix must be {n} × {n}")));
    }
    Ok(DenseMatrix::from_rows(rows))
}
