//! Deterministic point sets on the real unit sphere and the decay predicate.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::{CoefficientVector, MonomialBasis};

/// Low-discrepancy points on `S^{n−1}`: `{±1}` for n = 1, equally spaced
/// angles for n = 2 and a Fibonacci lattice for n = 3.
pub fn sphere_points(n: usize, count: usize) -> Result<Vec<Vec<f64>>> {
    let count = count.max(2);
    match n {
        1 => Ok(vec![vec![1.0], vec![-1.0]]),
        2 => Ok((0..count)
            .map(|j| {
                let th = std::f64::consts::TAU * (j as f64 + 0.5) / count as f64;
                vec![th.cos(), th.sin()]
            })
            .collect()),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            Ok((0..count)
                .map(|j| {
                    let z = 1.0 - (2.0 * j as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * j as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect())
        }
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// Outcome of sampling `Re P` on the unit sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub valid: bool,
    pub worst_direction: Vec<f64>,
    pub worst_value: f64,
}

pub(crate) fn re_p(basis: &MonomialBasis, a: &[Complex64], x: &[f64]) -> f64 {
    basis
        .monomials()
        .iter()
        .zip(a)
        .map(|(k, ak)| ak.re * k.entries().iter().zip(x).map(|(&e, xi)| xi.powi(e as i32)).product::<f64>())
        .sum()
}

/// Rejects odd degrees (`P(−x) = −P(x)`, so `Re P` cannot be negative in every
/// direction) and reports the largest sampled `Re P(a; σ)`.
pub fn decay_check(
    basis: &MonomialBasis,
    a: &CoefficientVector,
    sphere_samples: usize,
    margin: f64,
) -> Result<DecayReport> {
    if !basis.d().is_multiple_of(2) {
        return Err(Error::UnsupportedContour { degree: basis.d() });
    }
    let points = sphere_points(basis.n(), sphere_samples)?;
    let mut worst_value = f64::NEG_INFINITY;
    let mut worst_direction = points[0].clone();
    for p in &points {
        let v = re_p(basis, a.values(), p);
        if v > worst_value {
            worst_value = v;
            worst_direction = p.clone();
        }
    }
    Ok(DecayReport { valid: worst_value <= -margin, worst_direction, worst_value })
}
