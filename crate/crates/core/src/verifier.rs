//! Verification suites. Each suite turns one family of identities into a list
//! of checks, every check carrying its residual, the scale it is measured
//! against and the tolerance it is judged by.
//!
//! * `thm1`: the GKZ system. Finite-difference derivatives of `J` against
//!   moment integrals, Euler residuals, box residuals, exact relation checks
//!   and the moment chain `∂_k M_e = M_{e+k}` along every relation.
//! * `thm4`: the GL(n) structure. Binomial identities on Veronese points,
//!   Lie residuals for the basis `E_ij` of gl(n), and `det g · J(σ_g a) = J(a)`
//!   for random real `g` near the identity, with and without `det g = 1`.
//! * `thm2`: singularity probes along paths that reach the discriminant, and
//!   the check that convergence of the quadrature implies distance from it.
//!
//! Reports depend only on the seed, the configuration and the floating-point
//! model.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fd::{partial_derivative, Cached, DerivativeSource, FdConfig, FiniteDifference};
use crate::gkz::{unit_multi_index, GkzSystem, Residual};
use crate::gl_action::{beta, chi0, lie_residual, substitute_real};
use crate::invariants::{binary_discriminant, gaussian_closed_form, quadratic_det, singularity_probe, ProbeResult};
use crate::lattice::ToricRelation;
use crate::linalg::DenseMatrix;
use crate::monomial::{CoefficientVector, MonomialBasis};
use crate::quadrature::{decay_check, integrate, moment_exponent, FrozenIntegral, MomentDerivatives, QuadratureConfig};
use crate::reduce::map_indexed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    /// Box and Euler operators, derivatives against moments.
    Thm1,
    /// Singularity probes along paths into the discriminant.
    Thm2,
    /// Binomial vanishing, Lie residuals, GL(n) covariance.
    Thm4,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Thm1, Suite::Thm2, Suite::Thm4];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Thm1 => "thm1",
            Suite::Thm2 => "thm2",
            Suite::Thm4 => "thm4",
        }
    }
}

/// The frozen grid used for finite differences is refined to this fraction
/// of the finite-difference tolerance.
pub const FROZEN_GRID_FACTOR: f64 = 1e-3;

/// Frozen pass thresholds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Checks that go through finite differences.
    pub fd: f64,
    /// Identities between moment integrals.
    pub moment: f64,
    /// Euler residuals, through either derivative source.
    pub euler: f64,
    /// Identities that hold exactly up to rounding.
    pub exact: f64,
    pub closed_form: f64,
    pub covariance: f64,
    pub invariant: f64,
    /// Half-width of the window around the expected probe exponent.
    pub exponent_window: f64,
    /// `|disc|` of the unit-normalized form above which the quadrature must
    /// converge.
    pub discriminant_threshold: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            fd: 1e-4,
            moment: 1e-5,
            euler: 1e-5,
            exact: 1e-12,
            closed_form: 1e-5,
            covariance: 1e-5,
            invariant: 1e-10,
            exponent_window: 0.05,
            discriminant_threshold: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifierConfig {
    pub quadrature: QuadratureConfig,
    pub fd: FdConfig,
    pub tolerances: Tolerances,
    pub shapes: Vec<(usize, u32)>,
    pub cases_per_shape: usize,
    pub perturbation_norm: f64,
    pub max_rejections: usize,
    pub veronese_points: usize,
    pub group_trials: usize,
    /// Entries of `g − I` are drawn from `(−spread, spread)`.
    pub group_spread: f64,
    pub max_halvings: u32,
    pub probe_t0_quadratic: f64,
    pub probe_t0_quartic: f64,
}

impl Default for VerifierConfig {
    fn default() -> Self {
        Self {
            quadrature: QuadratureConfig::default(),
            fd: FdConfig::default(),
            tolerances: Tolerances::default(),
            shapes: vec![(1, 4), (1, 6), (2, 2), (2, 4), (3, 2)],
            cases_per_shape: 5,
            perturbation_norm: 0.2,
            max_rejections: 100,
            veronese_points: 100,
            group_trials: 20,
            group_spread: 0.1,
            max_halvings: 8,
            probe_t0_quadratic: 0.25,
            probe_t0_quartic: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseId {
    pub label: String,
    pub n: usize,
    pub d: u32,
    pub index: usize,
    pub seed: u64,
    pub a: CoefficientVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub identity: String,
    pub residual: Option<f64>,
    pub scale: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub skipped: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// Passes iff `residual ≤ tolerance · scale`.
    pub fn judge(identity: impl Into<String>, residual: f64, scale: f64, tolerance: f64) -> Self {
        let pass = residual.is_finite() && scale.is_finite() && residual <= tolerance * scale;
        Self {
            identity: identity.into(),
            residual: Some(residual),
            scale: Some(scale),
            tolerance,
            pass,
            skipped: false,
            note: None,
        }
    }

    pub fn of_residual(identity: impl Into<String>, r: &Residual, tolerance: f64) -> Self {
        Self::judge(identity, r.value.norm(), r.scale, tolerance)
    }

    pub fn failed(identity: impl Into<String>, tolerance: f64, why: String) -> Self {
        Self {
            identity: identity.into(),
            residual: None,
            scale: None,
            tolerance,
            pass: false,
            skipped: false,
            note: Some(why),
        }
    }

    pub fn skipped(identity: impl Into<String>, tolerance: f64, why: String) -> Self {
        Self { skipped: true, ..Self::failed(identity, tolerance, why) }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn ok(&self) -> bool {
        self.pass || self.skipped
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub crate_version: String,
    pub config_sha256: String,
    pub quadrature_sha256: String,
    pub tolerances_sha256: String,
}

fn sha256_json<T: Serialize>(value: &T) -> String {
    let text = serde_json::to_string(value).expect("configuration serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

impl Environment {
    pub fn of(cfg: &VerifierConfig) -> Self {
        Self {
            crate_version: env!("CARGO_PKG_VERSION").to_string(),
            config_sha256: sha256_json(cfg),
            quadrature_sha256: sha256_json(&cfg.quadrature),
            tolerances_sha256: sha256_json(&cfg.tolerances),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub suite: Suite,
    pub case: CaseId,
    pub checks: Vec<CheckRecord>,
    pub environment: Environment,
}

impl VerificationReport {
    fn new(suite: Suite, case: CaseId, checks: Vec<CheckRecord>, cfg: &VerifierConfig) -> Self {
        Self { schema: crate::SCHEMA.to_string(), suite, case, checks, environment: Environment::of(cfg) }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.ok())
    }
}

/// A ChaCha stream determined by the seed and a tag.
fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng
}

fn tag(kind: u64, n: usize, d: u32, index: usize) -> u64 {
    (kind << 48) | ((n as u64) << 32) | ((d as u64) << 16) | index as u64
}

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `−(Σ x_i²)^{d/2}` expanded in the basis.
pub fn anchor(basis: &MonomialBasis) -> Result<CoefficientVector> {
    let coeffs: Vec<f64> = basis.sum_of_squares_power()?.iter().map(|v| -v).collect();
    CoefficientVector::from_real(basis, &coeffs)
}

fn random_perturbation(rng: &mut ChaCha8Rng, len: usize, norm: f64) -> Vec<Complex64> {
    let raw: Vec<Complex64> =
        (0..len).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
    let size = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    let target = norm * rng.gen_range(0.0..1.0);
    raw.into_iter().map(|z| z * (target / size)).collect()
}

/// Anchor plus a random complex perturbation of norm at most
/// `perturbation_norm`, rejection-sampled on the decay predicate.
pub fn sample_case(basis: &MonomialBasis, seed: u64, index: usize, cfg: &VerifierConfig) -> Result<CaseId> {
    let base = anchor(basis)?;
    let mut rng = stream(seed, tag(1, basis.n(), basis.d(), index));
    let q = &cfg.quadrature;
    for _ in 0..cfg.max_rejections {
        let delta = random_perturbation(&mut rng, basis.len(), cfg.perturbation_norm);
        let a = base.shifted(&delta, 1.0);
        if decay_check(basis, &a, q.sphere_samples, q.decay_margin)?.valid {
            return Ok(CaseId {
                label: format!("random-{}-{}", basis.n(), basis.d()),
                n: basis.n(),
                d: basis.d(),
                index,
                seed,
                a,
            });
        }
    }
    Err(Error::Domain(format!("no decay-valid sample after {} tries", cfg.max_rejections)))
}

fn monomial_label(basis: &MonomialBasis, k: usize) -> String {
    format!("a_({})", basis.monomial(k).key())
}

fn record<T>(identity: String, tolerance: f64, r: Result<T>, judge: impl FnOnce(T) -> CheckRecord) -> CheckRecord {
    match r {
        Ok(v) => judge(v),
        Err(e) => CheckRecord::failed(identity, tolerance, e.to_string()),
    }
}

/// Exact closed forms: the Gaussian for `d = 2` and `2Γ(1 + 1/d)(−a)^{−1/d}`
/// for `n = 1`.
pub fn closed_form(basis: &MonomialBasis, a: &CoefficientVector) -> Option<Complex64> {
    if basis.d() == 2 {
        return gaussian_closed_form(basis, a).ok();
    }
    if basis.n() == 1 && basis.d().is_multiple_of(2) {
        let d = basis.d() as f64;
        let g = 2.0 * libm::tgamma(1.0 + 1.0 / d);
        return Some((-a.values()[0]).powf(-1.0 / d) * g);
    }
    None
}

/// `max_t |coeff_t(a)| ∫ |x^{A·m_t}| |e^P| dx`, the size of the largest term
/// measured without the cancellation inside each moment integral.
fn absolute_term_scale(
    basis: &MonomialBasis,
    op: &crate::gkz::LinearDifferentialOperator,
    a: &CoefficientVector,
    q: &QuadratureConfig,
) -> Result<f64> {
    let exponents: Vec<Vec<u32>> = op.terms.iter().map(|t| moment_exponent(basis, &t.derivative)).collect();
    let values = crate::quadrature::integrate_moments(basis, a, &exponents, q)?;
    Ok(op.terms.iter().zip(values).map(|(t, v)| t.coefficient_at(a).norm() * v.abs_scale).fold(0.0, f64::max))
}

fn unit_steps(counts: &[u64]) -> Vec<usize> {
    counts.iter().enumerate().flat_map(|(k, &m)| std::iter::repeat_n(k, m as usize)).collect()
}

/// `∂_k M_{A·m} = M_{A·(m + e_k)}` along a path of unit steps through `counts`,
/// with frozen-grid finite differences on the left and moments on the right.
/// Returns the worst `(residual, scale)`.
fn moment_chain<S: DerivativeSource>(
    frozen: &FrozenIntegral,
    moments: &S,
    system: &GkzSystem,
    a: &CoefficientVector,
    counts: &[u64],
    j_abs: f64,
    fd: &FdConfig,
) -> Result<(f64, f64)> {
    let len = system.basis.len();
    let mut m = vec![0u32; len];
    let mut worst = (0.0, 1.0);
    let mut worst_ratio = -1.0;
    for k in unit_steps(counts) {
        let e = moment_exponent(&system.basis, &m);
        let f = |b: &CoefficientVector| frozen.moments(b, std::slice::from_ref(&e)).map(|v| v[0]);
        let lhs = partial_derivative(&f, a, &unit_multi_index(len, k), fd)?.value;
        m[k] += 1;
        let rhs = moments.derivatives(a, std::slice::from_ref(&m))?[0].value;
        let residual = (lhs - rhs).norm();
        let scale = rhs.norm().max(j_abs);
        if residual / scale > worst_ratio {
            worst_ratio = residual / scale;
            worst = (residual, scale);
        }
    }
    Ok(worst)
}

pub fn verify_gkz(system: &GkzSystem, case: &CaseId, cfg: &VerifierConfig) -> Result<VerificationReport> {
    let basis = &system.basis;
    let a = &case.a;
    let q = &cfg.quadrature;
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();

    let j = integrate(basis, a, q)?;
    checks.push(
        CheckRecord::judge("quadrature_converged", j.error_estimate, j.abs_scale, q.relative_tolerance)
            .with_note(format!("{} nodes per axis", j.nodes_per_axis)),
    );
    if let Some(exact) = closed_form(basis, a) {
        checks.push(CheckRecord::judge("closed_form", (j.value - exact).norm(), exact.norm(), tol.closed_form));
    }
    let j_abs = j.value.norm();

    let frozen = FrozenIntegral::with_tolerance(basis, a, q, FROZEN_GRID_FACTOR * tol.fd)?;
    let fd_source = Cached::new(FiniteDifference::new(&frozen, cfg.fd));
    let moments = Cached::new(MomentDerivatives::new(basis, q.clone()));

    for k in 0..basis.len() {
        let id = format!("fd_vs_moment[{}]", monomial_label(basis, k));
        let m = vec![unit_multi_index(basis.len(), k)];
        let r = fd_source.derivatives(a, &m).and_then(|f| Ok((f[0].value, moments.derivatives(a, &m)?[0].value)));
        checks.push(record(id.clone(), tol.fd, r, |(f, mo)| {
            CheckRecord::judge(id, (f - mo).norm(), mo.norm().max(j_abs), tol.fd)
        }));
    }

    for (i, op) in system.euler_operators.iter().enumerate() {
        let id = format!("euler_moment[x{}]", i + 1);
        checks.push(record(id.clone(), tol.euler, op.apply(&moments, a), |r| {
            CheckRecord::of_residual(id, &r, tol.euler)
        }));
        let id = format!("euler_fd[x{}]", i + 1);
        checks.push(record(id.clone(), tol.euler, op.apply(&fd_source, a), |r| {
            CheckRecord::of_residual(id, &r, tol.euler)
        }));
    }

    for (idx, (rel, op)) in system.relations.iter().zip(&system.box_operators).enumerate() {
        let exact = rel.is_balanced(basis) && rel.supports_disjoint() && rel.is_primitive();
        let defect: u64 = basis.weigh(&rel.u).iter().zip(basis.weigh(&rel.v)).map(|(x, y)| x.abs_diff(y)).sum();
        let mut structural = CheckRecord::judge(format!("relation_exact[{idx}]"), defect as f64, 1.0, 0.0);
        structural.pass = exact && defect == 0;
        checks.push(structural.with_note(format!("order {}", rel.order())));

        let id = format!("box_fd[{idx}]");
        if op.order <= crate::fd::MAX_FD_ORDER {
            let r = op.apply(&fd_source, a).and_then(|r| Ok((r, absolute_term_scale(basis, op, a, q)?)));
            checks.push(record(id.clone(), tol.fd, r, |(r, abs)| {
                CheckRecord::judge(id, r.value.norm(), r.scale.max(abs), tol.fd)
            }));
        } else {
            checks.push(CheckRecord::skipped(
                id,
                tol.fd,
                format!("order {} above the finite-difference cap", op.order),
            ));
        }

        for (side, counts) in [("u", &rel.u), ("v", &rel.v)] {
            let id = format!("moment_chain[{idx}].{side}");
            let r = moment_chain(&frozen, &moments, system, a, counts, j_abs, &cfg.fd);
            checks.push(match r {
                Ok((res, scale)) => CheckRecord::judge(id, res, scale, tol.fd),
                Err(e @ Error::MomentDegree { .. }) => CheckRecord::skipped(id, tol.fd, e.to_string()),
                Err(e) => CheckRecord::failed(id, tol.fd, e.to_string()),
            });
        }
    }

    Ok(VerificationReport::new(Suite::Thm1, case.clone(), checks, cfg))
}

fn binomial_check(rel: &ToricRelation, points: &[Vec<Complex64>], idx: usize, tol: f64) -> CheckRecord {
    let power = |y: &[Complex64], e: &[u64]| y.iter().zip(e).fold(c(1.0), |acc, (yk, &p)| acc * yk.powu(p as u32));
    let mut worst = (0.0, 1.0);
    let mut ratio = -1.0;
    for y in points {
        let (pu, pv) = (power(y, &rel.u), power(y, &rel.v));
        let residual = (pu - pv).norm();
        let scale = pu.norm().max(pv.norm());
        if residual / scale > ratio {
            ratio = residual / scale;
            worst = (residual, scale);
        }
    }
    CheckRecord::judge(format!("binomial[{idx}]"), worst.0, worst.1, tol)
        .with_note(format!("{} Veronese points", points.len()))
}

/// Worst `|det(g)^w J(σ_g a) − J(a)|` over random near-identity real `g`.
fn covariance_check(
    basis: &MonomialBasis,
    a: &CoefficientVector,
    j: Complex64,
    rng: &mut ChaCha8Rng,
    unimodular: bool,
    cfg: &VerifierConfig,
) -> Result<CheckRecord> {
    let n = basis.n();
    let q = &cfg.quadrature;
    let tol = cfg.tolerances.covariance;
    let id = if unimodular { "sl_invariance" } else { "det_covariance" };
    let mut worst = 0.0f64;
    let (mut resampled, mut skipped, mut used) = (0usize, 0usize, 0usize);
    for _ in 0..cfg.group_trials {
        let r: Vec<Vec<f64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let mut spread = cfg.group_spread;
        let mut accepted = None;
        for halving in 0..=cfg.max_halvings {
            let mut g = DenseMatrix::from_rows(
                (0..n).map(|i| (0..n).map(|k| f64::from(u8::from(i == k)) + spread * r[i][k]).collect()).collect(),
            );
            let det = g.det();
            if det > 0.0 {
                if unimodular {
                    g = g.scale(&det.powf(-1.0 / n as f64));
                }
                let ga = substitute_real(&g, basis, a);
                if decay_check(basis, &ga, q.sphere_samples, q.decay_margin)?.valid {
                    accepted = Some((g, ga));
                    resampled += usize::from(halving > 0);
                    break;
                }
            }
            spread /= 2.0;
        }
        let Some((g, ga)) = accepted else {
            skipped += 1;
            continue;
        };
        let jg = integrate(basis, &ga, q)?.value;
        let det = if unimodular { 1.0 } else { g.det() };
        worst = worst.max((jg * det - j).norm());
        used += 1;
    }
    let note = format!("{used} trials, {resampled} resampled closer to the identity, {skipped} skipped");
    Ok(if used == 0 {
        CheckRecord::skipped(id, tol, note)
    } else {
        CheckRecord::judge(id, worst, j.norm(), tol).with_note(note)
    })
}

pub fn verify_group(system: &GkzSystem, case: &CaseId, cfg: &VerifierConfig) -> Result<VerificationReport> {
    let basis = &system.basis;
    let (n, d) = (basis.n(), basis.d());
    let a = &case.a;
    let q = &cfg.quadrature;
    let tol = &cfg.tolerances;
    let mut checks = Vec::new();

    let mut rng = stream(case.seed, tag(2, n, d, case.index));
    let points: Vec<Vec<Complex64>> = (0..cfg.veronese_points)
        .map(|_| {
            let x: Vec<Complex64> =
                (0..n).map(|_| Complex64::from_polar(rng.gen_range(0.5..2.0), rng.gen_range(0.0..TAU))).collect();
            basis.veronese_point(&x)
        })
        .collect();
    for (idx, rel) in system.relations.iter().enumerate() {
        checks.push(binomial_check(rel, &points, idx, tol.exact));
    }

    let j = integrate(basis, a, q)?.value;
    let frozen = FrozenIntegral::with_tolerance(basis, a, q, FROZEN_GRID_FACTOR * tol.fd)?;
    let fd_source = Cached::new(FiniteDifference::new(&frozen, cfg.fd));
    let moments = Cached::new(MomentDerivatives::new(basis, q.clone()));
    for i in 0..n {
        for k in 0..n {
            let x = DenseMatrix::<Complex64>::unit(n, i, k);
            let name = format!("E_{}{}", i + 1, k + 1);
            let info = format!("chi0 = {}, beta = {}", chi0(&x, basis).re, beta(&x, basis).re);
            let id = format!("lie_moment[{name}]");
            checks.push(record(id.clone(), tol.moment, lie_residual(&x, basis, a, &moments), |r| {
                CheckRecord::judge(id, r.value.norm(), j.norm(), tol.moment).with_note(info.clone())
            }));
            let id = format!("lie_fd[{name}]");
            checks.push(record(id.clone(), tol.fd, lie_residual(&x, basis, a, &fd_source), |r| {
                CheckRecord::judge(id, r.value.norm(), j.norm(), tol.fd)
            }));
        }
    }

    let mut rng = stream(case.seed, tag(3, n, d, case.index));
    checks.push(covariance_check(basis, a, j, &mut rng, false, cfg)?);
    checks.push(covariance_check(basis, a, j, &mut rng, true, cfg)?);

    Ok(VerificationReport::new(Suite::Thm4, case.clone(), checks, cfg))
}

/// Families of forms probed for singularities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Quadratic { n: usize },
    BinaryQuartic,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Quadratic { n: 2 }, Family::Quadratic { n: 3 }, Family::BinaryQuartic];

    pub fn shape(self) -> (usize, u32) {
        match self {
            Family::Quadratic { n } => (n, 2),
            Family::BinaryQuartic => (2, 4),
        }
    }

    pub fn label(self) -> String {
        match self {
            Family::Quadratic { n } => format!("quadratic-{n}"),
            Family::BinaryQuartic => "binary-quartic".to_string(),
        }
    }

    /// `(a★, δ)` with `a★` on the discriminant and `a★ + tδ` decay-valid for
    /// `t > 0`.
    pub fn path(self, basis: &MonomialBasis) -> Result<(CoefficientVector, Vec<Complex64>)> {
        let mut delta = vec![c(0.0); basis.len()];
        match self {
            Family::Quadratic { n } => {
                // −(x₁ + x₂)² − Σ_{i>2} x_i², moving along the x₁x₂ coefficient
                let mut star = anchor(basis)?.into_values();
                let mixed = basis.index_of(&[&[1, 1][..], &vec![0; n - 2]].concat()).expect("x1 x2");
                star[mixed] = c(-2.0);
                delta[mixed] = c(1.0);
                Ok((CoefficientVector::new(basis, star)?, delta))
            }
            Family::BinaryQuartic => {
                // −(x² − y²)², moving along −(x² + y²)²
                let star = CoefficientVector::from_real(basis, &[-1.0, 0.0, 2.0, 0.0, -1.0])?;
                let delta = [-1.0, 0.0, -2.0, 0.0, -1.0].map(c).to_vec();
                Ok((star, delta))
            }
        }
    }

    /// A discriminant that vanishes exactly on `Δ(A)` for this family.
    pub fn discriminant(self, basis: &MonomialBasis, a: &[Complex64]) -> Result<Complex64> {
        match self {
            Family::Quadratic { .. } => Ok(quadratic_det(basis, a)?.value),
            Family::BinaryQuartic => Ok(binary_discriminant(basis, a)?.value),
        }
    }

    fn exact_discriminant(self, basis: &MonomialBasis, a: &CoefficientVector) -> Result<BigRational> {
        let rational: Vec<BigRational> = a
            .values()
            .iter()
            .map(|z| BigRational::from_float(z.re).unwrap_or_else(|| BigRational::from_integer(BigInt::zero())))
            .collect();
        match self {
            Family::Quadratic { .. } => Ok(quadratic_det(basis, &rational)?.value),
            Family::BinaryQuartic => Ok(binary_discriminant(basis, &rational)?.value),
        }
    }
}

struct Evaluated {
    t: f64,
    converged: bool,
    disc: f64,
}

fn probe(
    basis: &MonomialBasis,
    star: &CoefficientVector,
    delta: &[Complex64],
    t0: f64,
    family: Family,
    cfg: &VerifierConfig,
    log: &std::sync::Mutex<Vec<Evaluated>>,
) -> Result<ProbeResult> {
    singularity_probe(star, delta, t0, |a| {
        let j = integrate(basis, a, &cfg.quadrature)?;
        let unit = a.scaled(c(1.0 / a.norm()));
        let disc = family.discriminant(basis, unit.values())?.norm();
        let t = (a.values().iter().zip(star.values()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>()).sqrt();
        log.lock().expect("probe log").push(Evaluated { t, converged: j.converged, disc });
        Ok(j.value)
    })
}

pub fn verify_singularities(family: Family, seed: u64, cfg: &VerifierConfig) -> Result<VerificationReport> {
    let (n, d) = family.shape();
    let basis = MonomialBasis::new(n, d)?;
    let tol = &cfg.tolerances;
    let (star, delta) = family.path(&basis)?;
    let mut checks = Vec::new();
    let log = std::sync::Mutex::new(Vec::new());

    let disc = family.exact_discriminant(&basis, &star)?;
    let mut on = CheckRecord::judge("discriminant_at_base", if disc.is_zero() { 0.0 } else { 1.0 }, 1.0, 0.0);
    on.pass = disc.is_zero();
    checks.push(on);

    let describe = |p: &ProbeResult| {
        let mags: Vec<String> = p.magnitudes.iter().map(|m| format!("{m:.6}")).collect();
        format!("exponent {:.4} over {} points, |J| = [{}]", p.exponent, p.t.len(), mags.join(", "))
    };
    match family {
        Family::Quadratic { .. } => {
            let t0 = cfg.probe_t0_quadratic;
            let r = probe(&basis, &star, &delta, t0, family, cfg, &log);
            checks.push(record("probe_exponent".into(), tol.exponent_window, r, |p| {
                CheckRecord::judge("probe_exponent", (p.exponent + 0.5).abs(), 1.0, tol.exponent_window)
                    .with_note(describe(&p))
            }));
            let smooth = anchor(&basis)?;
            let r = probe(&basis, &smooth, &delta, t0, family, cfg, &log);
            checks.push(record("off_discriminant_exponent".into(), tol.exponent_window, r, |p| {
                CheckRecord::judge("off_discriminant_exponent", p.exponent.abs(), 1.0, tol.exponent_window)
                    .with_note(describe(&p))
            }));
        }
        Family::BinaryQuartic => {
            let r = probe(&basis, &star, &delta, cfg.probe_t0_quartic, family, cfg, &log);
            checks.push(record("quartic_growth".into(), 0.0, r, |p| {
                let m = &p.magnitudes;
                let tail = &m[m.len().saturating_sub(4)..];
                let drops = tail.windows(2).filter(|w| w[1] <= w[0]).count();
                let mut rec = CheckRecord::judge("quartic_growth", drops as f64, 1.0, 0.0).with_note(describe(&p));
                rec.pass = p.increasing_tail(4);
                rec
            }));
        }
    }

    // random decay-valid forms of the family also enter the convergence log
    for index in 0..cfg.cases_per_shape {
        let case = sample_case(&basis, seed, index, cfg)?;
        let j = integrate(&basis, &case.a, &cfg.quadrature)?;
        let unit = case.a.scaled(c(1.0 / case.a.norm()));
        let disc = family.discriminant(&basis, unit.values())?.norm();
        log.lock().expect("probe log").push(Evaluated { t: f64::NAN, converged: j.converged, disc });
    }
    let log = log.into_inner().expect("probe log");
    let threshold = tol.discriminant_threshold;
    let violations = log.iter().filter(|e| !e.converged && e.disc >= threshold).count();
    let unconverged: Vec<String> = log
        .iter()
        .filter(|e| !e.converged)
        .map(|e| {
            if e.t.is_nan() {
                format!("|disc| {:.3e}", e.disc)
            } else {
                format!("t {:.3e}: |disc| {:.3e}", e.t, e.disc)
            }
        })
        .collect();
    let mut rec =
        CheckRecord::judge("convergent_implies_off_discriminant", violations as f64, 1.0, 0.0).with_note(format!(
            "{} evaluations, {} unconverged{}{}",
            log.len(),
            unconverged.len(),
            if unconverged.is_empty() { "" } else { ": " },
            unconverged.join("; ")
        ));
    rec.pass = violations == 0;
    checks.push(rec);

    let case = CaseId { label: family.label(), n, d, index: 0, seed, a: star };
    Ok(VerificationReport::new(Suite::Thm2, case, checks, cfg))
}

#[derive(Clone, Copy)]
enum Job {
    Case(Suite, usize, usize),
    Family(Family),
}

/// Runs `suites` over `cfg.shapes` (`thm1`, `thm4`) and over the probe
/// families whose shape is listed (`thm2`). Systems may be supplied, for
/// example from a file; otherwise they are built. Reports are sorted by
/// suite, then by case.
pub fn run_suites(
    seed: u64,
    suites: &[Suite],
    systems: Option<Vec<GkzSystem>>,
    cfg: &VerifierConfig,
) -> Result<Vec<VerificationReport>> {
    let systems = match systems {
        Some(s) => s,
        None => cfg.shapes.iter().map(|&(n, d)| GkzSystem::new(MonomialBasis::new(n, d)?)).collect::<Result<_>>()?,
    };
    let mut jobs = Vec::new();
    for &suite in suites {
        match suite {
            Suite::Thm1 | Suite::Thm4 => {
                for s in 0..systems.len() {
                    for index in 0..cfg.cases_per_shape {
                        jobs.push(Job::Case(suite, s, index));
                    }
                }
            }
            Suite::Thm2 => {
                for f in Family::ALL {
                    let (n, d) = f.shape();
                    if systems.iter().any(|s| s.basis.n() == n && s.basis.d() == d) {
                        jobs.push(Job::Family(f));
                    }
                }
            }
        }
    }
    let results = map_indexed(jobs.len(), cfg.quadrature.execution, |i| match jobs[i] {
        Job::Case(suite, s, index) => {
            let system = &systems[s];
            let case = sample_case(&system.basis, seed, index, cfg)?;
            match suite {
                Suite::Thm1 => verify_gkz(system, &case, cfg),
                _ => verify_group(system, &case, cfg),
            }
        }
        Job::Family(f) => verify_singularities(f, seed, cfg),
    });
    let mut reports = results.into_iter().collect::<Result<Vec<_>>>()?;
    reports.sort_by(|x, y| {
        (x.suite, x.case.n, x.case.d, &x.case.label, x.case.index).cmp(&(
            y.suite,
            y.case.n,
            y.case.d,
            &y.case.label,
            y.case.index,
        ))
    });
    Ok(reports)
}

pub fn run_all(seed: u64, cfg: &VerifierConfig) -> Result<Vec<VerificationReport>> {
    run_suites(seed, &Suite::ALL, None, cfg)
}

/// The JSON document written by `verify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub seed: u64,
    pub passed: bool,
    pub reports: Vec<VerificationReport>,
}

impl ReportDocument {
    pub fn new(seed: u64, reports: Vec<VerificationReport>) -> Self {
        let passed = reports.iter().all(VerificationReport::passed);
        Self { schema: crate::SCHEMA.to_string(), seed, passed, reports }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(n: usize, d: u32) -> GkzSystem {
        GkzSystem::new(MonomialBasis::new(n, d).unwrap()).unwrap()
    }

    fn fixed_case(sys: &GkzSystem, coeffs: &[f64]) -> CaseId {
        CaseId {
            label: "fixed".into(),
            n: sys.basis.n(),
            d: sys.basis.d(),
            index: 0,
            seed: 0,
            a: CoefficientVector::from_real(&sys.basis, coeffs).unwrap(),
        }
    }

    fn assert_passes(r: &VerificationReport) {
        let bad: Vec<_> = r.failures().collect();
        assert!(bad.is_empty(), "{bad:#?}");
    }

    #[test]
    fn gkz_suite_on_gaussian() {
        let sys = system(2, 2);
        let r = verify_gkz(&sys, &fixed_case(&sys, &[-1.0, 0.0, -1.0]), &VerifierConfig::default()).unwrap();
        assert_passes(&r);
        assert!(r.checks.iter().any(|c| c.identity == "box_fd[0]"));
        assert!(r.checks.iter().any(|c| c.identity == "closed_form"));
    }

    #[test]
    fn gkz_suite_on_quartic_line() {
        let sys = system(1, 4);
        let r = verify_gkz(&sys, &fixed_case(&sys, &[-1.0]), &VerifierConfig::default()).unwrap();
        assert_passes(&r);
        let euler = r.checks.iter().find(|c| c.identity == "euler_moment[x1]").unwrap();
        assert!(euler.residual.unwrap() <= 1e-5 * euler.scale.unwrap());
    }

    #[test]
    fn group_suite_rotation_and_lie() {
        let sys = system(2, 2);
        let case = fixed_case(&sys, &[-1.0, 0.0, -1.0]);
        let cfg = VerifierConfig::default();
        let r = verify_group(&sys, &case, &cfg).unwrap();
        assert_passes(&r);
        let (s, co) = (0.3f64.sin(), 0.3f64.cos());
        let g = DenseMatrix::from_rows(vec![vec![co, -s], vec![s, co]]);
        let ga = substitute_real(&g, &sys.basis, &case.a);
        let j = integrate(&sys.basis, &case.a, &cfg.quadrature).unwrap().value;
        let jg = integrate(&sys.basis, &ga, &cfg.quadrature).unwrap().value;
        assert!((jg - j).norm() <= 1e-6 * j.norm());
    }

    #[test]
    fn sampled_cases_are_reproducible() {
        let basis = MonomialBasis::new(2, 4).unwrap();
        let cfg = VerifierConfig::default();
        let x = sample_case(&basis, 7, 3, &cfg).unwrap();
        let y = sample_case(&basis, 7, 3, &cfg).unwrap();
        assert_eq!(x, y);
        let z = sample_case(&basis, 7, 4, &cfg).unwrap();
        assert_ne!(x.a, z.a);
        let base = anchor(&basis).unwrap();
        let dist: f64 = x.a.values().iter().zip(base.values()).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        assert!(dist <= 0.2);
    }

    #[test]
    fn families_start_on_the_discriminant() {
        for f in Family::ALL {
            let (n, d) = f.shape();
            let basis = MonomialBasis::new(n, d).unwrap();
            let (star, _) = f.path(&basis).unwrap();
            assert!(f.exact_discriminant(&basis, &star).unwrap().is_zero(), "{f:?}");
        }
    }

    #[test]
    fn check_record_judging() {
        assert!(CheckRecord::judge("x", 1e-6, 1.0, 1e-5).pass);
        assert!(!CheckRecord::judge("x", 1e-4, 1.0, 1e-5).pass);
        assert!(!CheckRecord::judge("x", f64::NAN, 1.0, 1e-5).pass);
        assert!(CheckRecord::skipped("x", 1e-5, "why".into()).ok());
    }
}
