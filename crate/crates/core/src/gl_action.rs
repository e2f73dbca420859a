//! GL(n) acting on coefficient space by substitution, `σ_g a = coeffs of
//! x ↦ P(a; g·x)`, and its infinitesimal version.
//!
//! This is a right action, `σ_{gh} = σ_h ∘ σ_g`, and diagonal `g` reproduces the
//! torus action `a_k ↦ a_k g^k`. On ℝⁿ the change of variables `x → g x` gives
//! `J(σ_g a) = |det g|^{−1} J(a)`. Differentiating along `exp(tX)`:
//!
//! ```text
//! Σ_k (M_X a)_k ∂J/∂a_k + tr(X)·J = 0,
//! ```
//!
//! which is what [`lie_operator`] encodes. Reported separately, `χ₀(X)` is the
//! trace of `M_X` on ℂ^A and `β(X) := χ₀(X) − tr(X)`, i.e. the character that
//! makes `(L_X + β(X) − χ₀(X)) J = 0` hold with `L_X = −Σ_k (M_X a)_k ∂_k`, the
//! derivative of the induced left action on functions.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fd::DerivativeSource;
use crate::gkz::{unit_multi_index, LinearDifferentialOperator, LinearEntry, OperatorTerm, Residual};
use crate::linalg::DenseMatrix;
use crate::monomial::{CoefficientVector, MonomialBasis};
use crate::scalar::Scalar;

/// An element `X ∈ gl(n)`.
pub type LieAlgebraElement<T = Complex64> = DenseMatrix<T>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionConvention {
    /// `M_X = d/dt σ_{exp(tX)}|_{t=0}`
    Infinitesimal,
    /// `S_g` with `σ_g a = S_g a`
    Group,
}

/// Matrix of the induced action on ℂ^A, columns indexed by the input basis
/// element.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedAction<T> {
    pub matrix: DenseMatrix<T>,
    pub convention: ActionConvention,
}

type Poly<T> = BTreeMap<Vec<u32>, T>;

fn poly_mul<T: Scalar>(p: &Poly<T>, q: &Poly<T>) -> Poly<T> {
    let mut out: Poly<T> = BTreeMap::new();
    for (ep, cp) in p {
        for (eq, cq) in q {
            let e: Vec<u32> = ep.iter().zip(eq).map(|(a, b)| a + b).collect();
            let v = cp.clone() * cq.clone();
            match out.get_mut(&e) {
                Some(x) => *x = x.clone() + v,
                None => {
                    out.insert(e, v);
                }
            }
        }
    }
    out
}

/// `(Σ_j row_j x_j)^p` by the multinomial theorem.
fn linear_form_power<T: Scalar>(row: &[T], p: u32) -> Poly<T> {
    let n = row.len();
    let mut out = BTreeMap::new();
    let mut beta = vec![0u32; n];
    fn rec<T: Scalar>(row: &[T], pos: usize, left: u32, p: u32, beta: &mut Vec<u32>, out: &mut Poly<T>) {
        if pos + 1 == row.len() {
            beta[pos] = left;
            // multinomial p! / ∏ β_j!
            let mut coeff = 1i128;
            let mut used = 0i128;
            for &b in beta.iter() {
                for j in 1..=b as i128 {
                    used += 1;
                    coeff = coeff * used / j;
                }
            }
            debug_assert_eq!(used, p as i128);
            let mut v = T::from_i64(coeff as i64);
            for (r, &b) in row.iter().zip(beta.iter()) {
                v = v * r.pow_u32(b);
            }
            if !v.is_zero() {
                out.insert(beta.clone(), v);
            }
            return;
        }
        for b in 0..=left {
            beta[pos] = b;
            rec(row, pos + 1, left - b, p, beta, out);
        }
    }
    rec(row, 0, p, p, &mut beta, &mut out);
    out
}

/// `σ_g a`: coefficients of the polynomial `x ↦ P(a; g x)`, by exact
/// multinomial expansion.
pub fn substitute<T: Scalar>(g: &DenseMatrix<T>, basis: &MonomialBasis, a: &[T]) -> Vec<T> {
    let n = basis.n();
    assert!(g.rows() == n && g.cols() == n, "substitution matrix must be n × n");
    let d = basis.d();
    // powers[i][p] = (g_i · x)^p
    let powers: Vec<Vec<Poly<T>>> = (0..n).map(|i| (0..=d).map(|p| linear_form_power(g.row(i), p)).collect()).collect();
    let mut out = vec![T::zero(); basis.len()];
    for (k, ak) in basis.monomials().iter().zip(a) {
        if ak.is_zero() {
            continue;
        }
        let mut prod: Poly<T> = BTreeMap::from([(vec![0; n], T::one())]);
        for (i, &e) in k.entries().iter().enumerate() {
            if e > 0 {
                prod = poly_mul(&prod, &powers[i][e as usize]);
            }
        }
        for (e, v) in prod {
            let idx = basis.index_of(&e).expect("substitution preserves degree");
            out[idx] = out[idx].clone() + ak.clone() * v;
        }
    }
    out
}

/// [`substitute`] on a [`CoefficientVector`] with a real matrix.
pub fn substitute_real(g: &DenseMatrix<f64>, basis: &MonomialBasis, a: &CoefficientVector) -> CoefficientVector {
    let gc = g.map(|&x| Complex64::new(x, 0.0));
    CoefficientVector::new(basis, substitute(&gc, basis, a.values())).expect("length preserved")
}

/// `S_g`, whose columns are `σ_g(e_k)`.
pub fn group_action<T: Scalar>(g: &DenseMatrix<T>, basis: &MonomialBasis) -> InducedAction<T> {
    let len = basis.len();
    let mut m = DenseMatrix::zeros(len, len);
    for k in 0..len {
        let mut e = vec![T::zero(); len];
        e[k] = T::one();
        for (r, v) in substitute(g, basis, &e).into_iter().enumerate() {
            m[(r, k)] = v;
        }
    }
    InducedAction { matrix: m, convention: ActionConvention::Group }
}

/// `M_X`: the coefficient matrix of `a ↦ coeffs of x ↦ ∇_x P(a; x) · (X x)`.
pub fn infinitesimal_action<T: Scalar>(x: &LieAlgebraElement<T>, basis: &MonomialBasis) -> InducedAction<T> {
    let n = basis.n();
    assert!(x.rows() == n && x.cols() == n, "Lie algebra element must be n × n");
    let len = basis.len();
    let mut m = DenseMatrix::<T>::zeros(len, len);
    for (col, k) in basis.monomials().iter().enumerate() {
        for i in 0..n {
            let ki = k.entries()[i];
            if ki == 0 {
                continue;
            }
            for j in 0..n {
                let xij = &x[(i, j)];
                if xij.is_zero() {
                    continue;
                }
                let mut target = k.entries().to_vec();
                target[i] -= 1;
                target[j] += 1;
                let row = basis.index_of(&target).expect("degree preserved");
                m[(row, col)] = m[(row, col)].clone() + xij.clone() * T::from_i64(ki as i64);
            }
        }
    }
    InducedAction { matrix: m, convention: ActionConvention::Infinitesimal }
}

/// `χ₀(X) = tr M_X`, the trace on the coefficient space ℂ^A.
pub fn chi0<T: Scalar>(x: &LieAlgebraElement<T>, basis: &MonomialBasis) -> T {
    infinitesimal_action(x, basis).matrix.trace()
}

/// `β(X) = χ₀(X) − tr X` under the convention described in the module docs.
pub fn beta<T: Scalar>(x: &LieAlgebraElement<T>, basis: &MonomialBasis) -> T {
    chi0(x, basis) - x.trace()
}

/// `Σ_k (M_X a)_k ∂/∂a_k + tr X`, which annihilates `J`.
pub fn lie_operator(x: &LieAlgebraElement<Complex64>, basis: &MonomialBasis) -> LinearDifferentialOperator {
    let m = infinitesimal_action(x, basis).matrix;
    let len = basis.len();
    let mut terms: Vec<OperatorTerm> = (0..len)
        .map(|k| OperatorTerm {
            coeff_const: Complex64::new(0.0, 0.0),
            coeff_linear: (0..len)
                .filter(|&j| m[(k, j)] != Complex64::new(0.0, 0.0))
                .map(|j| LinearEntry { index: j, coeff: m[(k, j)] })
                .collect(),
            derivative: unit_multi_index(len, k),
        })
        .collect();
    terms.push(OperatorTerm::constant(x.trace(), vec![0; len]));
    LinearDifferentialOperator::new(terms)
}

/// `Σ_k (M_X a)_k ∂_k J(a) + tr(X) J(a)`, with derivatives from `source`
/// (finite differences of an evaluator or moment integrals).
pub fn lie_residual<S: DerivativeSource + ?Sized>(
    x: &LieAlgebraElement<Complex64>,
    basis: &MonomialBasis,
    a: &CoefficientVector,
    source: &S,
) -> Result<Residual> {
    lie_operator(x, basis).apply(source, a)
}
