//! Tensor-product quadrature for `J(a) = ∫_{ℝⁿ} exp(P(a; x)) dx` and the
//! moments `∫ x^e exp(P(a; x)) dx`.
//!
//! Each evaluation
//!
//! 1. checks the decay predicate on the unit sphere,
//! 2. whitens the form by `x = L z`, with `L Lᵀ` a sphere-sampled estimate of
//!    the covariance of `exp(Re P)`, so that near-degenerate forms look round,
//! 3. truncates at the radius where the integrand has dropped by `e^{-40}`,
//! 4. sums a midpoint rule in `t` through the axis map, doubling the nodes per
//!    axis until two successive levels agree.
//!
//! The node sum is chunked and combined in a fixed tree order, see
//! [`crate::reduce`].

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod decay;
mod map;

pub use decay::{decay_check, sphere_points, DecayReport};
pub use map::{AxisMap, AxisRule};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{CoefficientFunction, DerivativeSource, Estimate};
use crate::gl_action::substitute_real;
use crate::linalg::{cholesky, DenseMatrix};
use crate::monomial::{CoefficientVector, MonomialBasis};
use crate::reduce::{chunked_reduce, Execution};

/// `ln` of the integrand drop at the truncation radius.
const TAIL_LOG: f64 = 40.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub nodes_per_axis: usize,
    pub refinement_levels: u32,
    pub map: AxisMap,
    pub sphere_samples: usize,
    pub decay_margin: f64,
    pub relative_tolerance: f64,
    /// Largest moment degree accepted; `None` means `4d`.
    pub moment_degree_cap: Option<u32>,
    /// Refinement stops before a level with more nodes than this.
    pub max_total_nodes: usize,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            nodes_per_axis: 16,
            refinement_levels: 6,
            map: AxisMap::DoubleExponential,
            sphere_samples: 4096,
            decay_margin: 1e-3,
            relative_tolerance: 1e-10,
            moment_degree_cap: None,
            max_total_nodes: 1 << 24,
            execution: Execution::default(),
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_per_axis < 8 {
            return Err(Error::Domain(format!("nodes_per_axis must be at least 8, got {}", self.nodes_per_axis)));
        }
        if self.refinement_levels == 0 {
            return Err(Error::Domain("refinement_levels must be at least 1".into()));
        }
        if !(self.decay_margin > 0.0) || !(self.relative_tolerance > 0.0) {
            return Err(Error::Domain("decay_margin and relative_tolerance must be positive".into()));
        }
        Ok(())
    }

    pub fn moment_cap(&self, d: u32) -> u32 {
        self.moment_degree_cap.unwrap_or(4 * d)
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// A quadrature result with the difference of the last two levels as its
/// error estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralValue {
    #[serde(with = "crate::scalar::complex_pair")]
    pub value: Complex64,
    pub error_estimate: f64,
    /// `∫ |x^e| |exp P| dx` at the final level.
    pub abs_scale: f64,
    pub converged: bool,
    pub nodes_per_axis: usize,
    pub config_used: QuadratureConfig,
}

/// A fixed set of tensor nodes in whitened coordinates.
#[derive(Debug, Clone)]
pub struct TensorRule {
    n: usize,
    whitening: DenseMatrix<f64>,
    jacobian: f64,
    axis: AxisRule,
}

impl TensorRule {
    pub fn nodes_per_axis(&self) -> usize {
        self.axis.len()
    }

    pub fn total_nodes(&self) -> usize {
        self.axis.len().pow(self.n as u32)
    }

    pub fn whitening(&self) -> &DenseMatrix<f64> {
        &self.whitening
    }

    /// `(Σ w x^e e^P, Σ w |x^e| |e^P|)` for each exponent, where `a_white` are
    /// the coefficients of `P(a; L z)`.
    ///
    /// Axis 0 varies fastest. Along one row of the grid `P` is a polynomial
    /// in `z_0` whose coefficients are computed once per row.
    fn sum(
        &self,
        basis: &MonomialBasis,
        a_white: &[Complex64],
        exponents: &[Vec<u32>],
        exec: Execution,
    ) -> (Vec<Complex64>, Vec<f64>) {
        let n = self.n;
        let m = self.axis.len();
        let d = basis.d() as usize;
        let max_e = exponents.iter().flat_map(|e| e.iter().copied()).max().unwrap_or(0) as usize;
        // zpow[j][p] = z_j^p
        let zpow: Vec<Vec<f64>> = self
            .axis
            .nodes
            .iter()
            .map(|&z| {
                (0..=d)
                    .scan(1.0, |s, _| {
                        let v = *s;
                        *s *= z;
                        Some(v)
                    })
                    .collect()
            })
            .collect();
        let monomials: Vec<&[u32]> = basis.monomials().iter().map(|k| k.entries()).collect();
        let l = &self.whitening;
        let ne = exponents.len();
        let nodes = &self.axis.nodes;
        let weights = &self.axis.weights;

        let fold = |range: std::ops::Range<usize>| {
            let mut acc = vec![Compensated::default(); ne];
            let mut abs = vec![0.0; ne];
            let mut row_coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
            let mut offset = [0.0f64; 3];
            let mut xpow = vec![[1.0f64; 3]; max_e + 1];
            let mut flat = range.start;
            while flat < range.end {
                let row = flat / m;
                let row_end = ((row + 1) * m).min(range.end);
                let mut rest = row;
                let mut idx = [0usize; 3];
                let mut row_weight = 1.0;
                for slot in idx.iter_mut().take(n).skip(1) {
                    *slot = rest % m;
                    rest /= m;
                    row_weight *= weights[*slot];
                }
                row_coeffs.iter_mut().for_each(|c| *c = Complex64::new(0.0, 0.0));
                for (k, ak) in monomials.iter().zip(a_white) {
                    let mut v = 1.0;
                    for i in 1..n {
                        v *= zpow[idx[i]][k[i] as usize];
                    }
                    row_coeffs[k[0] as usize] += ak * v;
                }
                for (i, o) in offset.iter_mut().enumerate().take(n) {
                    *o = (1..n).map(|j| l[(i, j)] * nodes[idx[j]]).sum();
                }
                for j0 in flat % m..flat % m + (row_end - flat) {
                    let z0 = nodes[j0];
                    let p = row_coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z0 + c);
                    let f = p.exp() * (weights[j0] * row_weight);
                    let fabs = f.norm();
                    if fabs == 0.0 {
                        continue;
                    }
                    if max_e == 0 {
                        for c in 0..ne {
                            acc[c].add(f);
                            abs[c] += fabs;
                        }
                        continue;
                    }
                    let mut xs = [0.0f64; 3];
                    for i in 0..n {
                        xs[i] = l[(i, 0)] * z0 + offset[i];
                    }
                    for q in 1..=max_e {
                        for i in 0..n {
                            xpow[q][i] = xpow[q - 1][i] * xs[i];
                        }
                    }
                    for (c, e) in exponents.iter().enumerate() {
                        let mono: f64 = e.iter().enumerate().map(|(i, &q)| xpow[q as usize][i]).product();
                        acc[c].add(f * mono);
                        abs[c] += fabs * mono.abs();
                    }
                }
                flat = row_end;
            }
            (acc.into_iter().map(Compensated::value).collect::<Vec<_>>(), abs)
        };
        let combine = |(mut a1, mut b1): (Vec<Complex64>, Vec<f64>), (a2, b2): (Vec<Complex64>, Vec<f64>)| {
            for (x, y) in a1.iter_mut().zip(a2) {
                *x += y;
            }
            for (x, y) in b1.iter_mut().zip(b2) {
                *x += y;
            }
            (a1, b1)
        };
        let (acc, abs) = chunked_reduce(self.total_nodes(), exec, fold, combine)
            .unwrap_or_else(|| (vec![Complex64::new(0.0, 0.0); ne], vec![0.0; ne]));
        (acc.into_iter().map(|v| v * self.jacobian).collect(), abs.into_iter().map(|v| v * self.jacobian).collect())
    }
}

/// Neumaier summation on both components.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: Complex64,
    carry: Complex64,
}

impl Compensated {
    fn add(&mut self, v: Complex64) {
        let part = |s: &mut f64, c: &mut f64, x: f64| {
            let t = *s + x;
            *c += if s.abs() >= x.abs() { (*s - t) + x } else { (x - t) + *s };
            *s = t;
        };
        part(&mut self.sum.re, &mut self.carry.re, v.re);
        part(&mut self.sum.im, &mut self.carry.im, v.im);
    }

    fn value(self) -> Complex64 {
        self.sum + self.carry
    }
}

/// Geometry of one coefficient vector: whitening, whitened coefficients and
/// the truncation radius.
struct Prepared {
    whitening: DenseMatrix<f64>,
    jacobian: f64,
    a_white: Vec<Complex64>,
    worst_white: f64,
}

impl Prepared {
    fn new(basis: &MonomialBasis, a: &CoefficientVector, cfg: &QuadratureConfig) -> Result<Self> {
        let report = decay_check(basis, a, cfg.sphere_samples, cfg.decay_margin)?;
        if !report.valid {
            return Err(Error::DecayFailure { worst_value: report.worst_value, margin: cfg.decay_margin });
        }
        let n = basis.n();
        let d = basis.d() as f64;
        let points = sphere_points(n, cfg.sphere_samples)?;
        let whitening = whitening_matrix(basis, a.values(), &points, d);
        let jacobian = whitening.det();
        let a_white = substitute_real(&whitening, basis, a).into_values();
        let worst_white = points.iter().map(|s| decay::re_p(basis, &a_white, s)).fold(f64::NEG_INFINITY, f64::max);
        if !(worst_white < 0.0) {
            return Err(Error::DecayFailure { worst_value: worst_white, margin: cfg.decay_margin });
        }
        Ok(Self { whitening, jacobian, a_white, worst_white })
    }

    /// Largest `R` with `|w| R^d − (m + n) ln max(R, 1) = 40`.
    fn radius(&self, basis: &MonomialBasis, moment_degree: u32) -> f64 {
        let w = self.worst_white.abs();
        let d = basis.d() as i32;
        let growth = (moment_degree as usize + basis.n()) as f64;
        let f = |r: f64| w * r.powi(d) - growth * r.max(1.0).ln() - TAIL_LOG;
        let mut hi = 1.0;
        while f(hi) <= 0.0 {
            hi *= 2.0;
        }
        let mut lo = hi / 2.0;
        if f(lo) > 0.0 {
            lo = 0.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    fn rule(&self, basis: &MonomialBasis, map: AxisMap, radius: f64, nodes: usize) -> TensorRule {
        TensorRule {
            n: basis.n(),
            whitening: self.whitening.clone(),
            jacobian: self.jacobian,
            axis: AxisRule::new(map, radius, nodes),
        }
    }
}

/// Cholesky factor of `S = n·E[r^{n+2} σσᵀ] / E[r^n]`, `r(σ) = (−Re P(σ))^{−1/d}`.
/// For a Gaussian this is proportional to the covariance. Falls back to the
/// identity when `S` is not positive definite.
fn whitening_matrix(basis: &MonomialBasis, a: &[Complex64], points: &[Vec<f64>], d: f64) -> DenseMatrix<f64> {
    let n = basis.n();
    let mut s = DenseMatrix::<f64>::zeros(n, n);
    let mut norm = 0.0;
    for p in points {
        let v = -decay::re_p(basis, a, p);
        if !(v > 0.0) {
            return DenseMatrix::identity(n);
        }
        let r = v.powf(-1.0 / d);
        let rn = r.powi(n as i32);
        norm += rn;
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] += rn * r * r * p[i] * p[j];
            }
        }
    }
    let s = s.scale(&(n as f64 / norm));
    cholesky(&s).unwrap_or_else(|| DenseMatrix::identity(n))
}

fn check_exponents(basis: &MonomialBasis, exponents: &[Vec<u32>], cfg: &QuadratureConfig) -> Result<u32> {
    let cap = cfg.moment_cap(basis.d());
    let mut max = 0;
    for e in exponents {
        if e.len() != basis.n() {
            return Err(Error::Domain(format!("moment exponent {e:?} has length {} but n = {}", e.len(), basis.n())));
        }
        let degree: u32 = e.iter().sum();
        if degree > cap {
            return Err(Error::MomentDegree { degree, cap });
        }
        max = max.max(degree);
    }
    Ok(max)
}

struct Adaptive {
    rule: TensorRule,
    values: Vec<Complex64>,
    errors: Vec<f64>,
    scales: Vec<f64>,
    converged: Vec<bool>,
}

fn adaptive(
    basis: &MonomialBasis,
    prepared: &Prepared,
    exponents: &[Vec<u32>],
    radius_degree: u32,
    cfg: &QuadratureConfig,
) -> Adaptive {
    let radius = prepared.radius(basis, radius_degree);
    let mut previous: Option<Vec<Complex64>> = None;
    let mut last = None;
    for level in 0..cfg.refinement_levels {
        let nodes = cfg.nodes_per_axis << level;
        let total = (nodes as u128).pow(basis.n() as u32);
        if level > 0 && total > cfg.max_total_nodes as u128 {
            break;
        }
        let rule = prepared.rule(basis, cfg.map, radius, nodes);
        let (values, scales) = rule.sum(basis, &prepared.a_white, exponents, cfg.execution);
        let errors: Vec<f64> = match &previous {
            Some(p) => values.iter().zip(p).map(|(v, q)| (v - q).norm()).collect(),
            None => vec![f64::INFINITY; values.len()],
        };
        let converged: Vec<bool> =
            errors.iter().zip(&scales).map(|(e, s)| *e <= cfg.relative_tolerance * s.max(f64::MIN_POSITIVE)).collect();
        let done = converged.iter().all(|&c| c);
        previous = Some(values.clone());
        last = Some(Adaptive { rule, values, errors, scales, converged });
        if done {
            break;
        }
    }
    last.expect("at least one level runs")
}

/// `∫ x^e exp(P(a; x)) dx` for every `e` in `exponents`, on one shared grid.
pub fn integrate_moments(
    basis: &MonomialBasis,
    a: &CoefficientVector,
    exponents: &[Vec<u32>],
    cfg: &QuadratureConfig,
) -> Result<Vec<IntegralValue>> {
    cfg.validate()?;
    if a.len() != basis.len() {
        return Err(Error::Domain(format!("expected {} coefficients, got {}", basis.len(), a.len())));
    }
    let degree = check_exponents(basis, exponents, cfg)?;
    let prepared = Prepared::new(basis, a, cfg)?;
    let run = adaptive(basis, &prepared, exponents, degree, cfg);
    let nodes = run.rule.nodes_per_axis();
    Ok((0..exponents.len())
        .map(|c| IntegralValue {
            value: run.values[c],
            error_estimate: run.errors[c],
            abs_scale: run.scales[c],
            converged: run.converged[c],
            nodes_per_axis: nodes,
            config_used: cfg.clone(),
        })
        .collect())
}

/// `J(a)`.
pub fn integrate(basis: &MonomialBasis, a: &CoefficientVector, cfg: &QuadratureConfig) -> Result<IntegralValue> {
    let zero = vec![0; basis.n()];
    Ok(integrate_moments(basis, a, &[zero], cfg)?.remove(0))
}

/// `∫ x^e exp(P(a; x)) dx`.
pub fn moment(
    basis: &MonomialBasis,
    a: &CoefficientVector,
    e: &[u32],
    cfg: &QuadratureConfig,
) -> Result<IntegralValue> {
    Ok(integrate_moments(basis, a, &[e.to_vec()], cfg)?.remove(0))
}

/// `J` on a grid frozen at a base point, so that finite differences see a
/// smooth function of `a` rather than a sequence of adaptive choices. The grid
/// is refined at the base point until `J` and all first moments converge with
/// the truncation radius sized for moments of degree `4d`.
pub struct FrozenIntegral<'b> {
    basis: &'b MonomialBasis,
    rule: TensorRule,
    config: QuadratureConfig,
    converged: bool,
}

impl<'b> FrozenIntegral<'b> {
    pub fn new(basis: &'b MonomialBasis, center: &CoefficientVector, cfg: &QuadratureConfig) -> Result<Self> {
        Self::with_tolerance(basis, center, cfg, cfg.relative_tolerance)
    }

    /// As [`FrozenIntegral::new`] but refining the grid only until the level
    /// difference is below `tolerance`. Finite differences of the frozen sum
    /// are exact derivatives of a fixed rule, so the rule needs to be only as
    /// accurate as the derivatives are checked.
    pub fn with_tolerance(
        basis: &'b MonomialBasis,
        center: &CoefficientVector,
        cfg: &QuadratureConfig,
        tolerance: f64,
    ) -> Result<Self> {
        cfg.validate()?;
        let grid_cfg = QuadratureConfig { relative_tolerance: tolerance, ..cfg.clone() };
        let prepared = Prepared::new(basis, center, cfg)?;
        let mut exponents = vec![vec![0; basis.n()]];
        exponents.extend(basis.monomials().iter().map(|k| k.entries().to_vec()));
        let run = adaptive(basis, &prepared, &exponents, 4 * basis.d(), &grid_cfg);
        let converged = run.converged.iter().all(|&c| c);
        Ok(Self { basis, rule: run.rule, config: cfg.clone(), converged })
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.rule.nodes_per_axis()
    }

    /// Frozen-grid moments at `a`.
    pub fn moments(&self, a: &CoefficientVector, exponents: &[Vec<u32>]) -> Result<Vec<Complex64>> {
        let report = decay_check(self.basis, a, self.config.sphere_samples, self.config.decay_margin)?;
        if !report.valid {
            return Err(Error::DecayFailure { worst_value: report.worst_value, margin: self.config.decay_margin });
        }
        let a_white = substitute_real(&self.rule.whitening, self.basis, a).into_values();
        Ok(self.rule.sum(self.basis, &a_white, exponents, self.config.execution).0)
    }
}

impl CoefficientFunction for FrozenIntegral<'_> {
    fn eval(&self, a: &CoefficientVector) -> Result<Complex64> {
        Ok(self.moments(a, &[vec![0; self.basis.n()]])?[0])
    }
}

/// `∂^m J = ∫ x^{A·m} exp(P) dx`: derivatives of `J` as moment integrals.
pub struct MomentDerivatives<'b> {
    pub basis: &'b MonomialBasis,
    pub config: QuadratureConfig,
}

impl<'b> MomentDerivatives<'b> {
    pub fn new(basis: &'b MonomialBasis, config: QuadratureConfig) -> Self {
        Self { basis, config }
    }
}

/// The moment exponent `A·m` realizing `∂^m`.
pub fn moment_exponent(basis: &MonomialBasis, m: &[u32]) -> Vec<u32> {
    let mut e = vec![0u32; basis.n()];
    for (k, &mk) in basis.monomials().iter().zip(m) {
        for (ei, &ki) in e.iter_mut().zip(k.entries()) {
            *ei += mk * ki;
        }
    }
    e
}

impl DerivativeSource for MomentDerivatives<'_> {
    fn derivatives(&self, a: &CoefficientVector, multi: &[Vec<u32>]) -> Result<Vec<Estimate>> {
        let exponents: Vec<Vec<u32>> = multi.iter().map(|m| moment_exponent(self.basis, m)).collect();
        let values = integrate_moments(self.basis, a, &exponents, &self.config)?;
        Ok(values.into_iter().map(|v| Estimate { value: v.value, error: v.error_estimate }).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn setup(n: usize, d: u32, coeffs: &[f64]) -> (MonomialBasis, CoefficientVector) {
        let b = MonomialBasis::new(n, d).unwrap();
        let a = CoefficientVector::from_real(&b, coeffs).unwrap();
        (b, a)
    }

    #[test]
    fn gaussian_2d() {
        let (b, a) = setup(2, 2, &[-1.0, 0.0, -1.0]);
        let j = integrate(&b, &a, &QuadratureConfig::default()).unwrap();
        assert!(j.converged);
        assert!((j.value.re - PI).abs() < 1e-12 * PI, "{:?}", j.value);
        assert!(j.value.im.abs() < 1e-14);
    }

    #[test]
    fn correlated_gaussian() {
        let (b, a) = setup(2, 2, &[-1.0, -1.0, -1.0]);
        let j = integrate(&b, &a, &QuadratureConfig::default()).unwrap();
        let exact = PI / 0.75f64.sqrt();
        assert!((j.value.re - exact).abs() < 1e-10 * exact);
    }

    #[test]
    fn quartic_1d() {
        let (b, a) = setup(1, 4, &[-1.0]);
        let j = integrate(&b, &a, &QuadratureConfig::default()).unwrap();
        assert!((j.value.re - 1.812_804_954_110_954).abs() < 1e-12);
    }

    #[test]
    fn near_degenerate_gaussian_converges() {
        let t = 1.0 / 128.0;
        let (b, a) = setup(2, 2, &[-1.0, -2.0 + t, -1.0]);
        let j = integrate(&b, &a, &QuadratureConfig::default()).unwrap();
        let det = 1.0 - (2.0 - t) * (2.0 - t) / 4.0;
        let exact = PI / det.sqrt();
        assert!(j.converged);
        assert!((j.value.re - exact).abs() < 1e-9 * exact);
    }

    #[test]
    fn moments_of_gaussian() {
        let (b, a) = setup(2, 2, &[-1.0, 0.0, -1.0]);
        let cfg = QuadratureConfig::default();
        let m = integrate_moments(&b, &a, &[vec![1, 0], vec![2, 0], vec![0, 0]], &cfg).unwrap();
        assert!(m[0].value.norm() < 1e-14);
        assert!((m[1].value.re - PI / 2.0).abs() < 1e-12);
        // the grid is sized for the largest requested degree, so `e = 0` agrees to rounding
        assert!((m[2].value - integrate(&b, &a, &cfg).unwrap().value).norm() < 1e-14 * PI);
    }

    #[test]
    fn moment_cap_enforced() {
        let (b, a) = setup(2, 2, &[-1.0, 0.0, -1.0]);
        let err = moment(&b, &a, &[9, 0], &QuadratureConfig::default()).unwrap_err();
        assert!(matches!(err, Error::MomentDegree { degree: 9, cap: 8 }));
    }

    #[test]
    fn decay_failure_is_an_error() {
        let (b, a) = setup(2, 2, &[-1.0, -2.5, -1.0]);
        assert!(matches!(integrate(&b, &a, &QuadratureConfig::default()), Err(Error::DecayFailure { .. })));
    }

    #[test]
    fn odd_degree_is_rejected() {
        let (b, a) = setup(1, 3, &[-1.0]);
        assert!(matches!(integrate(&b, &a, &QuadratureConfig::default()), Err(Error::UnsupportedContour { .. })));
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let b = MonomialBasis::new(3, 2).unwrap();
        let a = CoefficientVector::new(
            &b,
            vec![
                Complex64::new(-1.0, 0.1),
                Complex64::new(0.2, 0.0),
                Complex64::new(-1.2, -0.05),
                Complex64::new(0.1, 0.0),
                Complex64::new(-0.1, 0.02),
                Complex64::new(-0.9, 0.0),
            ],
        )
        .unwrap();
        let cfg = QuadratureConfig::default();
        let par = integrate(&b, &a, &cfg.clone().with_execution(Execution::Parallel)).unwrap();
        let seq = integrate(&b, &a, &cfg.with_execution(Execution::Sequential)).unwrap();
        assert_eq!(par.value.re.to_bits(), seq.value.re.to_bits());
        assert_eq!(par.value.im.to_bits(), seq.value.im.to_bits());
    }

    #[test]
    fn frozen_matches_adaptive_at_center() {
        let (b, a) = setup(2, 4, &[-1.0, 0.1, -2.0, 0.0, -1.0]);
        let cfg = QuadratureConfig::default();
        let frozen = FrozenIntegral::new(&b, &a, &cfg).unwrap();
        let j = integrate(&b, &a, &cfg).unwrap();
        assert!((frozen.eval(&a).unwrap() - j.value).norm() < 1e-11 * j.value.norm());
    }

    #[test]
    fn rational_stretch_map() {
        let (b, a) = setup(2, 2, &[-1.0, 0.0, -1.0]);
        let cfg = QuadratureConfig { map: AxisMap::RationalStretch, ..QuadratureConfig::default() };
        let j = integrate(&b, &a, &cfg).unwrap();
        assert!((j.value.re - PI).abs() < 1e-8 * PI);
    }
}
