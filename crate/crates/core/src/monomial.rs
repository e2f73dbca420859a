//! Exponent vectors of a fixed total degree and the ordered monomial basis.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_BASIS_CAP: usize = 10_000;

/// A multi-index `k ∈ ℤ≥0ⁿ`, i.e. the monomial `x^k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(Vec<u32>);

impl ExponentVector {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `x^k` for any scalar type.
    pub fn eval<T: Scalar>(&self, x: &[T]) -> T {
        self.0.iter().zip(x).fold(T::one(), |acc, (&e, xi)| acc * xi.pow_u32(e))
    }

    /// Parses the comma-joined form used in coefficient files, e.g. `"2,0"`.
    pub fn parse(key: &str) -> Result<Self> {
        key.split(',')
            .map(|s| {
                s.trim().parse::<u32>().map_err(|e| Error::Parse(format!("bad exponent {s:?} in key {key:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }

    pub fn key(&self) -> String {
        self.0.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }

    /// Graded reverse-lexicographic comparison: among equal degrees, `self`
    /// is larger iff the last nonzero entry of `self − other` is negative.
    pub fn grevlex_cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            match a.cmp(b) {
                Ordering::Equal => continue,
                Ordering::Less => return Ordering::Greater,
                Ordering::Greater => return Ordering::Less,
            }
        }
        Ordering::Equal
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.key())
    }
}

/// The set `A` of all exponents of degree `d` in `n` variables, in descending
/// grevlex order. Every coefficient vector in the crate is indexed by this
/// order.
#[derive(Debug, Clone)]
pub struct MonomialBasis {
    n: usize,
    d: u32,
    monomials: Vec<ExponentVector>,
    index: HashMap<ExponentVector, usize>,
}

impl PartialEq for MonomialBasis {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.d == other.d && self.monomials == other.monomials
    }
}

/// `binomial(n + d − 1, d)`, or `None` on overflow.
pub fn basis_size(n: usize, d: u32) -> Option<u128> {
    let top = (n as u128).checked_add(d as u128)?.checked_sub(1)?;
    let k = (d as u128).min(top - d as u128);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul(top - i)? / (i + 1);
    }
    Some(acc)
}

impl MonomialBasis {
    pub fn new(n: usize, d: u32) -> Result<Self> {
        Self::with_cap(n, d, DEFAULT_BASIS_CAP)
    }

    pub fn with_cap(n: usize, d: u32, cap: usize) -> Result<Self> {
        if n < 1 || d < 1 {
            return Err(Error::Domain(format!("need n >= 1 and d >= 1, got n = {n}, d = {d}")));
        }
        match basis_size(n, d) {
            Some(size) if size <= cap as u128 => {}
            size => {
                return Err(Error::SizeLimit {
                    size: size.map_or_else(|| "overflow".to_string(), |s| s.to_string()),
                    cap,
                })
            }
        }
        let mut monomials = Vec::new();
        let mut current = vec![0u32; n];
        compositions(d, 0, &mut current, &mut monomials);
        monomials.sort_by(|a, b| b.grevlex_cmp(a));
        let index = monomials.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        Ok(Self { n, d, monomials, index })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[ExponentVector] {
        &self.monomials
    }

    pub fn monomial(&self, i: usize) -> &ExponentVector {
        &self.monomials[i]
    }

    pub fn index_of(&self, k: &[u32]) -> Option<usize> {
        self.index.get(&ExponentVector(k.to_vec())).copied()
    }

    /// Index of `d·e_i`.
    pub fn pure_power(&self, i: usize) -> usize {
        let mut k = vec![0; self.n];
        k[i] = self.d;
        self.index_of(&k).expect("pure power is always in the basis")
    }

    /// The `n × |A|` integer matrix whose columns are the exponent vectors.
    pub fn a_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.n).map(|i| self.monomials.iter().map(|k| k.entries()[i] as i64).collect()).collect()
    }

    /// `A·m` for an integer vector over the basis.
    pub fn weigh(&self, m: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.n];
        for (k, &c) in self.monomials.iter().zip(m) {
            for (o, &e) in out.iter_mut().zip(k.entries()) {
                *o += c * e as u64;
            }
        }
        out
    }

    /// `P(a; x)`.
    pub fn eval<T: Scalar>(&self, a: &[T], x: &[T]) -> T {
        self.monomials.iter().zip(a).fold(T::zero(), |acc, (k, ak)| acc + ak.clone() * k.eval(x))
    }

    /// `(x^k)_{k ∈ A}`, the Veronese image of `x`.
    pub fn veronese_point<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        self.monomials.iter().map(|k| k.eval(x)).collect()
    }

    /// Coefficients of `(Σ_i x_i²)^{d/2}` for even `d`.
    pub fn sum_of_squares_power(&self) -> Result<Vec<f64>> {
        if !self.d.is_multiple_of(2) {
            return Err(Error::UnsupportedContour { degree: self.d });
        }
        let half = self.d / 2;
        Ok(self
            .monomials
            .iter()
            .map(|k| {
                if k.entries().iter().any(|e| e % 2 != 0) {
                    return 0.0;
                }
                // multinomial(half; k/2)
                let mut c = 1.0;
                let mut used = 0u32;
                for &e in k.entries() {
                    for j in 1..=e / 2 {
                        used += 1;
                        c = c * used as f64 / j as f64;
                    }
                }
                debug_assert_eq!(used, half);
                c
            })
            .collect())
    }
}

fn compositions(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(ExponentVector(current.clone()));
        return;
    }
    for e in 0..=remaining {
        current[pos] = e;
        compositions(remaining - e, pos + 1, current, out);
    }
    current[pos] = 0;
}

/// Coefficients `a ∈ ℂ^A` in basis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CoefficientVector(#[serde(with = "crate::scalar::complex_pair::vec")] Vec<Complex64>);

impl CoefficientVector {
    pub fn new(basis: &MonomialBasis, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != basis.len() {
            return Err(Error::Domain(format!(
                "coefficient vector has length {}, basis has {}",
                values.len(),
                basis.len()
            )));
        }
        Ok(Self(values))
    }

    pub fn from_real(basis: &MonomialBasis, values: &[f64]) -> Result<Self> {
        Self::new(basis, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(basis: &MonomialBasis) -> Self {
        Self(vec![Complex64::new(0.0, 0.0); basis.len()])
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `self + t·dir`.
    pub fn shifted(&self, dir: &[Complex64], t: f64) -> Self {
        Self(self.0.iter().zip(dir).map(|(a, b)| a + b * t).collect())
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self(self.0.iter().map(|a| a * s).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn keys(b: &MonomialBasis) -> Vec<Vec<u32>> {
        b.monomials().iter().map(|k| k.entries().to_vec()).collect()
    }

    #[test]
    fn quadratic_binary_order() {
        let b = MonomialBasis::new(2, 2).unwrap();
        assert_eq!(keys(&b), vec![vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn single_variable() {
        let b = MonomialBasis::new(1, 4).unwrap();
        assert_eq!(keys(&b), vec![vec![4]]);
    }

    #[test]
    fn ternary_quadratic_grevlex() {
        let b = MonomialBasis::new(3, 2).unwrap();
        assert_eq!(
            keys(&b),
            vec![vec![2, 0, 0], vec![1, 1, 0], vec![0, 2, 0], vec![1, 0, 1], vec![0, 1, 1], vec![0, 0, 2]]
        );
    }

    #[test]
    fn ternary_cubic_matches_brute_force() {
        let b = MonomialBasis::new(3, 3).unwrap();
        let mut brute = Vec::new();
        for i in 0..=3u32 {
            for j in 0..=3u32 {
                for k in 0..=3u32 {
                    if i + j + k == 3 {
                        brute.push(vec![i, j, k]);
                    }
                }
            }
        }
        let mut got = keys(&b);
        got.sort();
        brute.sort();
        assert_eq!(got, brute);
        assert_eq!(b.len(), 10);
    }

    #[test]
    fn domain_and_cap_errors() {
        assert!(matches!(MonomialBasis::new(0, 2), Err(Error::Domain(_))));
        assert!(matches!(MonomialBasis::new(2, 0), Err(Error::Domain(_))));
        assert!(matches!(MonomialBasis::new(10, 10), Err(Error::SizeLimit { .. })));
        assert!(MonomialBasis::with_cap(10, 10, 100_000).is_ok());
        assert!(matches!(MonomialBasis::new(1000, 1000), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn veronese_examples() {
        let b = MonomialBasis::new(2, 2).unwrap();
        assert_eq!(b.veronese_point(&[1.0, 1.0]), vec![1.0, 1.0, 1.0]);
        assert_eq!(b.veronese_point(&[2.0, 0.0]), vec![4.0, 0.0, 0.0]);
    }

    #[test]
    fn sum_of_squares_expansion() {
        let b = MonomialBasis::new(2, 4).unwrap();
        assert_eq!(b.sum_of_squares_power().unwrap(), vec![1.0, 0.0, 2.0, 0.0, 1.0]);
        let b = MonomialBasis::new(3, 4).unwrap();
        let c = b.sum_of_squares_power().unwrap();
        let x = [0.3, -0.7, 1.1];
        let r2: f64 = x.iter().map(|v| v * v).sum();
        assert!((b.eval(&c, &x) - r2 * r2).abs() < 1e-12);
    }

    #[test]
    fn exponent_key_round_trip() {
        let k = ExponentVector::parse(" 2, 0,1").unwrap();
        assert_eq!(k.entries(), &[2, 0, 1]);
        assert_eq!(k.key(), "2,0,1");
        assert!(ExponentVector::parse("2,x").is_err());
        assert!(ExponentVector::parse("-1,3").is_err());
    }

    proptest! {
        #[test]
        fn basis_invariants(n in 1usize..5, d in 1u32..7) {
            let b = MonomialBasis::new(n, d).unwrap();
            prop_assert_eq!(b.len() as u128, basis_size(n, d).unwrap());
            for k in b.monomials() {
                prop_assert_eq!(k.degree(), d);
            }
            for col in 0..b.len() {
                let s: i64 = b.a_matrix().iter().map(|row| row[col]).sum();
                prop_assert_eq!(s, d as i64);
            }
            for w in b.monomials().windows(2) {
                prop_assert_eq!(w[0].grevlex_cmp(&w[1]), Ordering::Greater);
            }
            let again = MonomialBasis::new(n, d).unwrap();
            prop_assert_eq!(&b, &again);
            for (i, k) in b.monomials().iter().enumerate() {
                prop_assert_eq!(b.index_of(k.entries()), Some(i));
            }
        }
    }
}
