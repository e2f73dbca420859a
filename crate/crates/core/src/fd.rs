//! Mixed partial derivatives in coefficient space by nested central
//! differences with one Richardson step.
//!
//! For a multi-index `m` of total order `p`, coordinate `k` gets the step
//! `h_k = ε^{1/(p+2)} · max(1, |a_k|)`. The per-coordinate stencil for a
//! derivative of multiplicity `q` is `Σ_j (−1)^j C(q,j) f(a + (q/2 − j) h e_k) / h^q`
//! and the multi-dimensional stencil is the tensor product. With `D(h)` the
//! O(h²) estimate, the returned value is `(4 D(h/2) − D(h)) / 3` and the error
//! estimate is `|that − D(h/2)|`.

use std::collections::HashMap;
use std::sync::Mutex;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::CoefficientVector;

pub const MAX_FD_ORDER: u32 = 4;

/// A function on coefficient space that a stencil can sample.
pub trait CoefficientFunction: Sync {
    fn eval(&self, a: &CoefficientVector) -> Result<Complex64>;
}

impl<F> CoefficientFunction for F
where
    F: Fn(&CoefficientVector) -> Result<Complex64> + Sync,
{
    fn eval(&self, a: &CoefficientVector) -> Result<Complex64> {
        self(a)
    }
}

/// A value with an a-posteriori error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    #[serde(with = "crate::scalar::complex_pair")]
    pub value: Complex64,
    pub error: f64,
}

impl Estimate {
    pub fn exact(value: Complex64) -> Self {
        Self { value, error: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub richardson: bool,
    /// Replaces `1/(p+2)` in the step rule when set.
    pub step_exponent: Option<f64>,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { richardson: true, step_exponent: None }
    }
}

impl FdConfig {
    pub fn base_step(&self, order: u32, a_k: Complex64) -> f64 {
        let expo = self.step_exponent.unwrap_or(1.0 / (order as f64 + 2.0));
        f64::EPSILON.powf(expo) * a_k.norm().max(1.0)
    }
}

fn binomial(q: u32, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, i| acc * (q - i) as f64 / (i + 1) as f64)
}

fn central_stencil<F: CoefficientFunction + ?Sized>(
    f: &F,
    a: &CoefficientVector,
    coords: &[(usize, u32, f64)],
) -> Result<Complex64> {
    // coords: (index, multiplicity, step)
    let mut sum = Complex64::new(0.0, 0.0);
    let mut counters = vec![0u32; coords.len()];
    loop {
        let mut point = a.clone();
        let mut weight = 1.0;
        for (&(k, q, h), &j) in coords.iter().zip(&counters) {
            let offset = (q as f64 / 2.0 - j as f64) * h;
            point.values_mut()[k] += Complex64::new(offset, 0.0);
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            weight *= sign * binomial(q, j) / h.powi(q as i32);
        }
        sum += f.eval(&point)? * weight;

        let mut i = 0;
        loop {
            if i == coords.len() {
                return Ok(sum);
            }
            counters[i] += 1;
            if counters[i] > coords[i].1 {
                counters[i] = 0;
                i += 1;
            } else {
                break;
            }
        }
    }
}

/// `∂^m f (a)` for a dense multi-index `m` over the basis.
pub fn partial_derivative<F: CoefficientFunction + ?Sized>(
    f: &F,
    a: &CoefficientVector,
    m: &[u32],
    cfg: &FdConfig,
) -> Result<Estimate> {
    let order: u32 = m.iter().sum();
    if order == 0 {
        return Ok(Estimate::exact(f.eval(a)?));
    }
    if order > MAX_FD_ORDER {
        return Err(Error::UnsupportedOrder(order));
    }
    let coords = |scale: f64| -> Vec<(usize, u32, f64)> {
        m.iter()
            .enumerate()
            .filter(|(_, &q)| q > 0)
            .map(|(k, &q)| (k, q, cfg.base_step(order, a.values()[k]) * scale))
            .collect()
    };
    let coarse = central_stencil(f, a, &coords(1.0))?;
    if !cfg.richardson {
        return Ok(Estimate { value: coarse, error: f64::NAN });
    }
    let fine = central_stencil(f, a, &coords(0.5))?;
    let value = (fine * 4.0 - coarse) / 3.0;
    Ok(Estimate { value, error: (value - fine).norm() })
}

/// Anything that can produce `∂^m φ(a)` for a batch of multi-indices.
pub trait DerivativeSource: Sync {
    fn derivatives(&self, a: &CoefficientVector, multi: &[Vec<u32>]) -> Result<Vec<Estimate>>;
}

/// Derivatives of `f` by [`partial_derivative`].
pub struct FiniteDifference<'f, F: ?Sized> {
    pub function: &'f F,
    pub config: FdConfig,
}

impl<'f, F: CoefficientFunction + ?Sized> FiniteDifference<'f, F> {
    pub fn new(function: &'f F, config: FdConfig) -> Self {
        Self { function, config }
    }
}

impl<F: CoefficientFunction + ?Sized> DerivativeSource for FiniteDifference<'_, F> {
    fn derivatives(&self, a: &CoefficientVector, multi: &[Vec<u32>]) -> Result<Vec<Estimate>> {
        multi.iter().map(|m| partial_derivative(self.function, a, m, &self.config)).collect()
    }
}

type CacheKey = (Vec<u64>, Vec<u32>);

/// Memoizes another source by `(a, m)`, so that several operators sharing
/// derivatives at the same point pay for them once.
pub struct Cached<S> {
    inner: S,
    cache: Mutex<HashMap<CacheKey, Estimate>>,
}

impl<S: DerivativeSource> Cached<S> {
    pub fn new(inner: S) -> Self {
        Self { inner, cache: Mutex::new(HashMap::new()) }
    }

    fn key(a: &CoefficientVector, m: &[u32]) -> CacheKey {
        let bits = a.values().iter().flat_map(|z| [z.re.to_bits(), z.im.to_bits()]).collect();
        (bits, m.to_vec())
    }
}

impl<S: DerivativeSource> DerivativeSource for Cached<S> {
    fn derivatives(&self, a: &CoefficientVector, multi: &[Vec<u32>]) -> Result<Vec<Estimate>> {
        let missing: Vec<Vec<u32>> = {
            let cache = self.cache.lock().expect("derivative cache poisoned");
            let mut seen = Vec::new();
            for m in multi {
                if !cache.contains_key(&Self::key(a, m)) && !seen.contains(m) {
                    seen.push(m.clone());
                }
            }
            seen
        };
        if !missing.is_empty() {
            let fresh = self.inner.derivatives(a, &missing)?;
            let mut cache = self.cache.lock().expect("derivative cache poisoned");
            for (m, e) in missing.iter().zip(fresh) {
                cache.insert(Self::key(a, m), e);
            }
        }
        let cache = self.cache.lock().expect("derivative cache poisoned");
        Ok(multi.iter().map(|m| cache[&Self::key(a, m)]).collect())
    }
}
