//! Classical SL(n)-invariants of the forms under test and singularity probes
//! along paths that approach the discriminant.
//!
//! Every function is generic over [`Scalar`], so the same code runs on
//! `BigRational` (exact identities) and `Complex64` (probes and covariance).
//! Weights are the power of `det g` picked up under `a ↦ σ_g a`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::monomial::{CoefficientVector, MonomialBasis};
use crate::scalar::Scalar;

/// `disc = QUARTIC_DISC_CONSTANT · (I³ − 27 J²)` for [`binary_quartic_ij`].
pub const QUARTIC_DISC_CONSTANT: i64 = 256;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantValue<T = Complex64> {
    pub name: String,
    pub value: T,
    pub weight: u32,
}

impl<T: Scalar> InvariantValue<T> {
    fn new(name: &str, value: T, weight: u32) -> Self {
        Self { name: name.to_string(), value, weight }
    }

    pub fn to_complex(&self) -> InvariantValue<Complex64> {
        InvariantValue { name: self.name.clone(), value: self.value.to_complex(), weight: self.weight }
    }
}

fn check_len<T>(basis: &MonomialBasis, a: &[T]) -> Result<()> {
    if a.len() != basis.len() {
        return Err(Error::Domain(format!("expected {} coefficients, got {}", basis.len(), a.len())));
    }
    Ok(())
}

/// The symmetric matrix `Q(a)` with `P(a; x) = xᵀ Q x` for a quadratic form.
pub fn quadratic_matrix<T: Scalar>(basis: &MonomialBasis, a: &[T]) -> Result<DenseMatrix<T>> {
    if basis.d() != 2 {
        return Err(Error::Domain(format!("quadratic invariant needs d = 2, got d = {}", basis.d())));
    }
    check_len(basis, a)?;
    let n = basis.n();
    let two = T::from_i64(2);
    let mut q = DenseMatrix::zeros(n, n);
    for (k, ak) in basis.monomials().iter().zip(a) {
        let idx: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, k.entries()[i] as usize)).collect();
        let (i, j) = (idx[0], idx[1]);
        if i == j {
            q[(i, i)] = ak.clone();
        } else {
            q[(i, j)] = ak.clone() / two.clone();
            q[(j, i)] = ak.clone() / two.clone();
        }
    }
    Ok(q)
}

/// `det Q(a)`, weight 2.
pub fn quadratic_det<T: Scalar>(basis: &MonomialBasis, a: &[T]) -> Result<InvariantValue<T>> {
    Ok(InvariantValue::new("quadratic_det", quadratic_matrix(basis, a)?.det(), 2))
}

fn binary_coefficients<T: Scalar>(basis: &MonomialBasis, a: &[T]) -> Result<Vec<T>> {
    if basis.n() != 2 {
        return Err(Error::Domain(format!("binary invariant needs n = 2, got n = {}", basis.n())));
    }
    check_len(basis, a)?;
    let d = basis.d();
    // p(t) = P(a; t, 1) = Σ_j c_j t^j
    Ok((0..=d).map(|j| a[basis.index_of(&[j, d - j]).expect("binary monomial")].clone()).collect())
}

/// Sylvester determinant of `p` and `q`, given by ascending coefficients with
/// formal degrees `p.len() − 1` and `q.len() − 1`.
pub fn sylvester_resultant<T: Scalar>(p: &[T], q: &[T]) -> T {
    let (m, k) = (p.len() - 1, q.len() - 1);
    let size = m + k;
    if size == 0 {
        return T::one();
    }
    let mut s = DenseMatrix::zeros(size, size);
    for r in 0..k {
        for (j, c) in p.iter().rev().enumerate() {
            s[(r, r + j)] = c.clone();
        }
    }
    for r in 0..m {
        for (j, c) in q.iter().rev().enumerate() {
            s[(k + r, r + j)] = c.clone();
        }
    }
    s.det()
}

/// `Res(p, p′)` for `p(t) = P(a; t, 1)` taken with formal degree `d`.
pub fn binary_resultant<T: Scalar>(basis: &MonomialBasis, a: &[T]) -> Result<T> {
    let c = binary_coefficients(basis, a)?;
    let dp: Vec<T> = c.iter().enumerate().skip(1).map(|(j, cj)| T::from_i64(j as i64) * cj.clone()).collect();
    Ok(sylvester_resultant(&c, &dp))
}

/// `(−1)^{d(d−1)/2} Res(p, p′) / a_{(d,0)}`, weight `d(d − 1)`.
pub fn binary_discriminant<T: Scalar>(basis: &MonomialBasis, a: &[T]) -> Result<InvariantValue<T>> {
    let d = basis.d();
    if d < 2 {
        return Err(Error::Domain("binary discriminant needs d >= 2".into()));
    }
    let res = binary_resultant(basis, a)?;
    let lead = binary_coefficients(basis, a)?.pop().expect("d + 1 coefficients");
    if lead.is_zero() {
        return Err(Error::ZeroLeadingCoefficient);
    }
    let sign = if (d * (d - 1) / 2).is_multiple_of(2) { T::one() } else { -T::one() };
    Ok(InvariantValue::new("binary_discriminant", sign * res / lead, d * (d - 1)))
}

/// Basic invariants of `a x⁴ + 4b x³y + 6c x²y² + 4d xy³ + e y⁴`:
/// `I = ae − 4bd + 3c²` (weight 4) and `J = ace + 2bcd − ad² − eb² − c³`
/// (weight 6).
pub fn binary_quartic_ij<T: Scalar>(basis: &MonomialBasis, a: &[T]) -> Result<(InvariantValue<T>, InvariantValue<T>)> {
    if basis.n() != 2 || basis.d() != 4 {
        return Err(Error::Domain(format!(
            "quartic invariants need (n, d) = (2, 4), got ({}, {})",
            basis.n(),
            basis.d()
        )));
    }
    let c = binary_coefficients(basis, a)?;
    let (four, six) = (T::from_i64(4), T::from_i64(6));
    let (qa, qb, qc, qd, qe) =
        (c[4].clone(), c[3].clone() / four.clone(), c[2].clone() / six, c[1].clone() / four.clone(), c[0].clone());
    let i = qa.clone() * qe.clone() - four * qb.clone() * qd.clone() + T::from_i64(3) * qc.clone() * qc.clone();
    let j = qa.clone() * qc.clone() * qe.clone() + T::from_i64(2) * qb.clone() * qc.clone() * qd.clone()
        - qa * qd.clone() * qd
        - qe * qb.clone() * qb
        - qc.clone() * qc.clone() * qc;
    Ok((InvariantValue::new("quartic_I", i, 4), InvariantValue::new("quartic_J", j, 6)))
}

/// Every invariant defined for `(n, d)`. The discriminant is omitted when the
/// leading coefficient vanishes and the raw resultant is reported instead.
pub fn all_invariants(basis: &MonomialBasis, a: &CoefficientVector) -> Result<Vec<InvariantValue>> {
    let v = a.values();
    let mut out = Vec::new();
    if basis.d() == 2 {
        out.push(quadratic_det(basis, v)?);
    }
    if basis.n() == 2 && basis.d() >= 2 {
        match binary_discriminant(basis, v) {
            Ok(disc) => out.push(disc),
            Err(Error::ZeroLeadingCoefficient) => {
                let d = basis.d();
                out.push(InvariantValue::new("binary_resultant", binary_resultant(basis, v)?, d * (d - 1)));
            }
            Err(e) => return Err(e),
        }
    }
    if basis.n() == 2 && basis.d() == 4 {
        let (i, j) = binary_quartic_ij(basis, v)?;
        out.push(i);
        out.push(j);
    }
    Ok(out)
}

/// `π^{n/2} det(−Q(a))^{−1/2}` with the principal square root, which is
/// positive for real negative-definite forms and continuous near them.
pub fn gaussian_closed_form(basis: &MonomialBasis, a: &CoefficientVector) -> Result<Complex64> {
    let q = quadratic_matrix(basis, a.values())?;
    let det = q.scale(&Complex64::new(-1.0, 0.0)).det();
    Ok(std::f64::consts::PI.powf(basis.n() as f64 / 2.0) / det.sqrt())
}

/// Result of fitting `log |J(a★ + t δ)| ≈ c + s log t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub exponent: f64,
    pub t: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Schedule points dropped after the first evaluation failure.
    pub truncated: usize,
}

impl ProbeResult {
    /// Whether `|J|` strictly increases over the last `count` points (in the
    /// order of decreasing `t`).
    pub fn increasing_tail(&self, count: usize) -> bool {
        let m = &self.magnitudes;
        m.len() >= count && m[m.len() - count..].windows(2).all(|w| w[1] > w[0])
    }
}

pub const PROBE_POINTS: usize = 7;
pub const PROBE_MIN_POINTS: usize = 4;

/// Evaluates `J` along `t = t₀ 2^{−j}`, `j = 0..7`, stopping at the first
/// decay failure, and returns the least-squares slope of `log |J|` against
/// `log t`.
pub fn singularity_probe<F>(
    a_star: &CoefficientVector,
    delta: &[Complex64],
    t0: f64,
    evaluate: F,
) -> Result<ProbeResult>
where
    F: Fn(&CoefficientVector) -> Result<Complex64>,
{
    let mut ts = Vec::new();
    let mut mags = Vec::new();
    for j in 0..PROBE_POINTS {
        let t = t0 * 0.5f64.powi(j as i32);
        match evaluate(&a_star.shifted(delta, t)) {
            Ok(v) => {
                ts.push(t);
                mags.push(v.norm());
            }
            Err(Error::DecayFailure { .. }) => break,
            Err(e) => return Err(e),
        }
    }
    if ts.len() < PROBE_MIN_POINTS {
        return Err(Error::Domain(format!(
            "singularity probe kept {} points, needs at least {PROBE_MIN_POINTS}",
            ts.len()
        )));
    }
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ys: Vec<f64> = mags.iter().map(|m| m.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(ProbeResult { exponent: sxy / sxx, truncated: PROBE_POINTS - ts.len(), t: ts, magnitudes: mags })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gl_action::substitute;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::Zero;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn qs(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn quadratic_det_examples() {
        let b = MonomialBasis::new(2, 2).unwrap();
        assert_eq!(quadratic_det(&b, &qs(&[-1, 0, -1])).unwrap().value, q(1));
        assert!(quadratic_det(&b, &qs(&[-1, -2, -1])).unwrap().value.is_zero());
        let b3 = MonomialBasis::new(2, 3).unwrap();
        assert!(quadratic_det(&b3, &qs(&[1, 0, 0, 1])).is_err());
    }

    #[test]
    fn binary_quadratic_discriminant() {
        let b = MonomialBasis::new(2, 2).unwrap();
        for (bb, cc) in [(3, 5), (-2, 1), (0, -7)] {
            let disc = binary_discriminant(&b, &qs(&[1, bb, cc])).unwrap();
            assert_eq!(disc.value, q(bb * bb - 4 * cc));
            assert_eq!(disc.weight, 2);
        }
    }

    #[test]
    fn binary_cubic_discriminant() {
        let b = MonomialBasis::new(2, 3).unwrap();
        assert_eq!(binary_discriminant(&b, &qs(&[1, 0, 0, 1])).unwrap().value, q(-27));
        // x³ − 3xy² + 2y³ = (x − y)²(x + 2y)
        assert!(binary_discriminant(&b, &qs(&[1, 0, -3, 2])).unwrap().value.is_zero());
    }

    #[test]
    fn zero_leading_coefficient() {
        let b = MonomialBasis::new(2, 4).unwrap();
        // x³y: no x⁴ term after dehomogenizing at y = 1 gives p(t) = t³
        let a = qs(&[0, 1, 0, 0, 0]);
        assert!(matches!(binary_discriminant(&b, &a), Err(Error::ZeroLeadingCoefficient)));
        assert!(binary_resultant(&b, &a).unwrap().is_zero());
    }

    #[test]
    fn quartic_ij_of_x4_plus_y4() {
        let b = MonomialBasis::new(2, 4).unwrap();
        let (i, j) = binary_quartic_ij(&b, &qs(&[1, 0, 0, 0, 1])).unwrap();
        assert_eq!(i.value, q(1));
        assert_eq!(j.value, q(0));
        let disc = binary_discriminant(&b, &qs(&[1, 0, 0, 0, 1])).unwrap().value;
        assert_eq!(disc, q(256));
    }

    #[test]
    fn triple_root_quartic_degenerates() {
        let b = MonomialBasis::new(2, 4).unwrap();
        // (x − y)³(x + y)
        let a = qs(&[1, -2, 0, 2, -1]);
        assert!(binary_discriminant(&b, &a).unwrap().value.is_zero());
        let (i, j) = binary_quartic_ij(&b, &a).unwrap();
        let rel = i.value.pow_u32(3) - q(27) * j.value.pow_u32(2);
        assert!(rel.is_zero());
        assert!(i.value.is_zero() && j.value.is_zero());
    }

    #[test]
    fn x3y_invariants_vanish() {
        let b = MonomialBasis::new(2, 4).unwrap();
        let (i, j) = binary_quartic_ij(&b, &qs(&[0, 1, 0, 0, 0])).unwrap();
        assert!(i.value.is_zero() && j.value.is_zero());
    }

    #[test]
    fn quartic_homogeneity() {
        let b = MonomialBasis::new(2, 4).unwrap();
        let a = qs(&[3, -1, 4, 1, -5]);
        let la: Vec<BigRational> = a.iter().map(|x| x.clone() * q(7)).collect();
        let (i, j) = binary_quartic_ij(&b, &a).unwrap();
        let (li, lj) = binary_quartic_ij(&b, &la).unwrap();
        assert_eq!(li.value, i.value * q(49));
        assert_eq!(lj.value, j.value * q(343));
    }

    #[test]
    fn unimodular_shear_invariance() {
        let b = MonomialBasis::new(2, 4).unwrap();
        let g = DenseMatrix::from_rows(vec![qs(&[2, 1]), qs(&[1, 1])]);
        let a = qs(&[3, -1, 4, 1, -5]);
        let ga = substitute(&g, &b, &a);
        assert_eq!(binary_discriminant(&b, &ga).unwrap().value, binary_discriminant(&b, &a).unwrap().value);
        let (i, j) = binary_quartic_ij(&b, &a).unwrap();
        let (gi, gj) = binary_quartic_ij(&b, &ga).unwrap();
        assert_eq!((gi.value, gj.value), (i.value, j.value));
    }

    #[test]
    fn gaussian_closed_form_values() {
        let b = MonomialBasis::new(2, 2).unwrap();
        let a = CoefficientVector::from_real(&b, &[-1.0, -1.0, -1.0]).unwrap();
        let v = gaussian_closed_form(&b, &a).unwrap();
        assert!((v.re - 3.627_598_728_468_436).abs() < 1e-12);
        let b3 = MonomialBasis::new(3, 2).unwrap();
        let a3 = CoefficientVector::from_real(&b3, &[-1.0, 0.0, -1.0, 0.0, 0.0, -1.0]).unwrap();
        let v3 = gaussian_closed_form(&b3, &a3).unwrap();
        assert!((v3.re - std::f64::consts::PI.powf(1.5)).abs() < 1e-12);
    }

    #[test]
    fn probe_on_closed_form() {
        let b = MonomialBasis::new(2, 2).unwrap();
        let star = CoefficientVector::from_real(&b, &[-1.0, -2.0, -1.0]).unwrap();
        let delta = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let r = singularity_probe(&star, &delta, 0.5, |a| gaussian_closed_form(&b, a)).unwrap();
        assert!((r.exponent + 0.5).abs() < 0.05, "{}", r.exponent);
        assert_eq!(r.truncated, 0);
        assert!(r.increasing_tail(4));
    }

    #[test]
    fn probe_truncates_on_decay_failure() {
        let b = MonomialBasis::new(2, 2).unwrap();
        let star = CoefficientVector::from_real(&b, &[-1.0, 0.0, -1.0]).unwrap();
        let delta = [Complex64::new(0.0, 0.0); 3];
        let calls = std::cell::Cell::new(0);
        let r = singularity_probe(&star, &delta, 1.0, |_| {
            calls.set(calls.get() + 1);
            if calls.get() > 5 {
                Err(Error::DecayFailure { worst_value: 0.0, margin: 1e-3 })
            } else {
                Ok(Complex64::new(1.0, 0.0))
            }
        })
        .unwrap();
        assert_eq!(r.truncated, 2);
        assert!(r.exponent.abs() < 1e-12);
        let short =
            singularity_probe(&star, &delta, 1.0, |_| Err(Error::DecayFailure { worst_value: 0.0, margin: 1e-3 }));
        assert!(short.is_err());
    }
}
