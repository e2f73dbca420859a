//! Box and Euler operators of the A-hypergeometric system satisfied by `J`.
//!
//! For every toric relation `(u, v)` the box operator is `∂^u − ∂^v`. For every
//! axis `i` the Euler operator is `Σ_k k_i a_k ∂/∂a_k − c_i` with `c_i = −1`:
//! substituting `x_i → t x_i` in the integral gives `J(a_k t^{k_i}) = t^{−1} J(a)`,
//! and differentiating at `t = 1` yields `Σ_k k_i a_k ∂_k J = −J`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fd::{CoefficientFunction, DerivativeSource, Estimate, FdConfig, FiniteDifference};
use crate::lattice::{toric_relations, ToricRelation};
use crate::monomial::{CoefficientVector, MonomialBasis};
use crate::scalar::complex_pair;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearEntry {
    pub index: usize,
    #[serde(with = "complex_pair")]
    pub coeff: Complex64,
}

/// One term `(c₀ + Σ_k c_k a_k) · ∂^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorTerm {
    #[serde(with = "complex_pair")]
    pub coeff_const: Complex64,
    pub coeff_linear: Vec<LinearEntry>,
    pub derivative: Vec<u32>,
}

impl OperatorTerm {
    pub fn constant(coeff: Complex64, derivative: Vec<u32>) -> Self {
        Self { coeff_const: coeff, coeff_linear: Vec::new(), derivative }
    }

    pub fn order(&self) -> u32 {
        self.derivative.iter().sum()
    }

    pub fn coefficient_at(&self, a: &CoefficientVector) -> Complex64 {
        self.coeff_linear.iter().fold(self.coeff_const, |acc, e| acc + e.coeff * a.values()[e.index])
    }

    fn is_zero(&self) -> bool {
        self.coeff_const == c(0.0) && self.coeff_linear.iter().all(|e| e.coeff == c(0.0))
    }
}

/// A differential operator in `a`-space with coefficients of degree ≤ 1.
/// Terms carry pairwise distinct multi-indices and are kept in descending
/// lexicographic order of the multi-index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearDifferentialOperator {
    pub order: u32,
    pub terms: Vec<OperatorTerm>,
}

/// Value of `op φ` at a point, with the largest term magnitude as a scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    #[serde(with = "complex_pair")]
    pub value: Complex64,
    pub error_estimate: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.scale > 0.0 {
            self.value.norm() / self.scale
        } else {
            self.value.norm()
        }
    }
}

impl LinearDifferentialOperator {
    /// Merges terms with equal multi-index and drops vanishing ones.
    pub fn new(terms: Vec<OperatorTerm>) -> Self {
        let mut merged: Vec<OperatorTerm> = Vec::new();
        for t in terms {
            match merged.iter_mut().find(|m| m.derivative == t.derivative) {
                Some(m) => {
                    m.coeff_const += t.coeff_const;
                    for e in t.coeff_linear {
                        match m.coeff_linear.iter_mut().find(|x| x.index == e.index) {
                            Some(x) => x.coeff += e.coeff,
                            None => m.coeff_linear.push(e),
                        }
                    }
                }
                None => merged.push(t),
            }
        }
        for t in merged.iter_mut() {
            t.coeff_linear.retain(|e| e.coeff != c(0.0));
            t.coeff_linear.sort_by_key(|e| e.index);
        }
        merged.retain(|t| !t.is_zero());
        merged.sort_by(|x, y| y.derivative.cmp(&x.derivative));
        let order = merged.iter().map(OperatorTerm::order).max().unwrap_or(0);
        Self { order, terms: merged }
    }

    pub fn zero() -> Self {
        Self { order: 0, terms: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sum(&self, other: &Self) -> Self {
        Self::new(self.terms.iter().chain(&other.terms).cloned().collect())
    }

    /// `Σ_terms coefficient(a) · ∂^m φ(a)` using derivatives from `source`.
    pub fn apply<S: DerivativeSource + ?Sized>(&self, source: &S, a: &CoefficientVector) -> Result<Residual> {
        if self.terms.is_empty() {
            return Ok(Residual { value: c(0.0), error_estimate: 0.0, scale: 0.0 });
        }
        let multi: Vec<Vec<u32>> = self.terms.iter().map(|t| t.derivative.clone()).collect();
        let derivs = source.derivatives(a, &multi)?;
        let mut value = c(0.0);
        let mut error = 0.0;
        let mut scale: f64 = 0.0;
        for (t, Estimate { value: dv, error: de }) in self.terms.iter().zip(derivs) {
            let coeff = t.coefficient_at(a);
            let term = coeff * dv;
            value += term;
            error += coeff.norm() * de;
            scale = scale.max(term.norm());
        }
        Ok(Residual { value, error_estimate: error, scale })
    }
}

/// Residual of `op` applied to `φ` at `a`, derivatives by finite differences.
pub fn apply_operator<F: CoefficientFunction + ?Sized>(
    op: &LinearDifferentialOperator,
    phi: &F,
    a: &CoefficientVector,
    fd: &FdConfig,
) -> Result<Residual> {
    op.apply(&FiniteDifference::new(phi, *fd), a)
}

/// `∂^u − ∂^v`.
pub fn box_operator(rel: &ToricRelation) -> LinearDifferentialOperator {
    let to_u32 = |v: &[u64]| v.iter().map(|&x| x as u32).collect::<Vec<_>>();
    LinearDifferentialOperator::new(vec![
        OperatorTerm::constant(c(1.0), to_u32(&rel.u)),
        OperatorTerm::constant(c(-1.0), to_u32(&rel.v)),
    ])
}

/// The relation `(u, v)` of a box operator `∂^u − ∂^v`, if `op` has that shape.
pub fn relation_of(op: &LinearDifferentialOperator) -> Option<ToricRelation> {
    let [first, second] = op.terms.as_slice() else { return None };
    if !first.coeff_linear.is_empty() || !second.coeff_linear.is_empty() {
        return None;
    }
    let (plus, minus) = match (first.coeff_const, second.coeff_const) {
        (p, m) if p == c(1.0) && m == c(-1.0) => (first, second),
        (m, p) if p == c(1.0) && m == c(-1.0) => (second, first),
        _ => return None,
    };
    let widen = |m: &[u32]| m.iter().map(|&x| x as u64).collect();
    Some(ToricRelation { u: widen(&plus.derivative), v: widen(&minus.derivative) })
}

pub fn unit_multi_index(len: usize, k: usize) -> Vec<u32> {
    let mut m = vec![0; len];
    m[k] = 1;
    m
}

/// `Σ_k k_i a_k ∂/∂a_k − c_i` with the homogeneity `c_i = −1`.
pub fn euler_operator(axis: usize, basis: &MonomialBasis) -> Result<LinearDifferentialOperator> {
    if axis >= basis.n() {
        return Err(Error::Domain(format!("axis {axis} out of range for n = {}", basis.n())));
    }
    let len = basis.len();
    let mut terms: Vec<OperatorTerm> = basis
        .monomials()
        .iter()
        .enumerate()
        .filter(|(_, k)| k.entries()[axis] > 0)
        .map(|(idx, k)| OperatorTerm {
            coeff_const: c(0.0),
            coeff_linear: vec![LinearEntry { index: idx, coeff: c(k.entries()[axis] as f64) }],
            derivative: unit_multi_index(len, idx),
        })
        .collect();
    terms.push(OperatorTerm::constant(-HOMOGENEITY, vec![0; len]));
    Ok(LinearDifferentialOperator::new(terms))
}

/// `c_i`, identical for every axis.
pub const HOMOGENEITY: Complex64 = Complex64::new(-1.0, 0.0);

#[derive(Debug, Clone)]
pub struct GkzSystem {
    pub basis: MonomialBasis,
    pub relations: Vec<ToricRelation>,
    pub box_operators: Vec<LinearDifferentialOperator>,
    pub euler_operators: Vec<LinearDifferentialOperator>,
    pub homogeneity: Vec<Complex64>,
}

impl GkzSystem {
    pub fn new(basis: MonomialBasis) -> Result<Self> {
        let relations = toric_relations(&basis)?;
        let box_operators = relations.iter().map(box_operator).collect();
        let euler_operators = (0..basis.n()).map(|i| euler_operator(i, &basis)).collect::<Result<_>>()?;
        let homogeneity = vec![HOMOGENEITY; basis.n()];
        Ok(Self { basis, relations, box_operators, euler_operators, homogeneity })
    }

    pub fn document(&self) -> SystemDocument {
        SystemDocument {
            schema: crate::SCHEMA.to_string(),
            n: self.basis.n(),
            d: self.basis.d(),
            monomials: self.basis.monomials().iter().map(|k| k.entries().to_vec()).collect(),
            homogeneity: self.homogeneity.clone(),
            box_operators: self.box_operators.clone(),
            euler_operators: self.euler_operators.clone(),
        }
    }
}

/// JSON export of a [`GkzSystem`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemDocument {
    pub schema: String,
    pub n: usize,
    pub d: u32,
    pub monomials: Vec<Vec<u32>>,
    #[serde(with = "complex_pair::vec")]
    pub homogeneity: Vec<Complex64>,
    pub box_operators: Vec<LinearDifferentialOperator>,
    pub euler_operators: Vec<LinearDifferentialOperator>,
}

impl SystemDocument {
    /// Checks the document against a freshly built system for the same `(n, d)`.
    pub fn matches_rebuilt(&self) -> Result<bool> {
        let rebuilt = GkzSystem::new(MonomialBasis::new(self.n, self.d)?)?.document();
        Ok(&rebuilt == self)
    }

    /// Rebuilds a [`GkzSystem`] from the exported operators as given.
    pub fn to_system(&self) -> Result<GkzSystem> {
        let basis = MonomialBasis::new(self.n, self.d)?;
        let listed: Vec<&[u32]> = basis.monomials().iter().map(|k| k.entries()).collect();
        if listed.iter().map(|k| k.to_vec()).collect::<Vec<_>>() != self.monomials {
            return Err(Error::Parse("monomials are not the graded reverse lexicographic basis".into()));
        }
        if self.euler_operators.len() != self.n || self.homogeneity.len() != self.n {
            return Err(Error::Parse(format!("expected {} Euler operators", self.n)));
        }
        let mut relations = Vec::with_capacity(self.box_operators.len());
        for (j, op) in self.box_operators.iter().enumerate() {
            let rel = relation_of(op)
                .ok_or_else(|| Error::Parse(format!("box operator {j} is not of the form ∂^u − ∂^v")))?;
            if rel.u.len() != basis.len() || rel.v.len() != basis.len() {
                return Err(Error::Parse(format!("box operator {j} has the wrong length")));
            }
            for axis in 0..self.n {
                let weight = |m: &[u64]| -> u64 { m.iter().zip(&listed).map(|(&q, k)| q * k[axis] as u64).sum() };
                if weight(&rel.u) != weight(&rel.v) || rel.u.iter().sum::<u64>() != rel.v.iter().sum::<u64>() {
                    return Err(Error::Parse(format!("box operator {j} is not balanced")));
                }
            }
            relations.push(rel);
        }
        Ok(GkzSystem {
            basis,
            relations,
            box_operators: self.box_operators.clone(),
            euler_operators: self.euler_operators.clone(),
            homogeneity: self.homogeneity.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_quadratic_box_operator() {
        let b = MonomialBasis::new(2, 2).unwrap();
        let sys = GkzSystem::new(b).unwrap();
        assert_eq!(sys.box_operators.len(), 1);
        let op = &sys.box_operators[0];
        assert_eq!(op.order, 2);
        assert_eq!(op.terms.len(), 2);
        // ∂_{a20}∂_{a02} − ∂²_{a11}
        assert_eq!(op.terms[0].derivative, vec![1, 0, 1]);
        assert_eq!(op.terms[0].coeff_const, c(1.0));
        assert_eq!(op.terms[1].derivative, vec![0, 2, 0]);
        assert_eq!(op.terms[1].coeff_const, c(-1.0));
    }

    #[test]
    fn univariate_has_no_box_operators() {
        let sys = GkzSystem::new(MonomialBasis::new(1, 4).unwrap()).unwrap();
        assert!(sys.box_operators.is_empty());
        assert_eq!(sys.euler_operators.len(), 1);
        let e = &sys.euler_operators[0];
        // 4 a ∂_a + 1
        assert_eq!(e.terms.len(), 2);
        assert_eq!(e.terms[0].coeff_linear, vec![LinearEntry { index: 0, coeff: c(4.0) }]);
        assert_eq!(e.terms[1].coeff_const, c(1.0));
    }

    #[test]
    fn euler_operator_structure() {
        let b = MonomialBasis::new(2, 2).unwrap();
        let e = euler_operator(0, &b).unwrap();
        // 2 a20 ∂_{a20} + a11 ∂_{a11} + 1
        let lin: Vec<(usize, f64)> =
            e.terms.iter().flat_map(|t| t.coeff_linear.iter().map(|l| (l.index, l.coeff.re))).collect();
        assert_eq!(lin, vec![(0, 2.0), (1, 1.0)]);
        assert!(euler_operator(2, &b).is_err());
    }

    #[test]
    fn zero_operator_gives_zero() {
        let b = MonomialBasis::new(2, 2).unwrap();
        let a = CoefficientVector::from_real(&b, &[-1.0, 0.0, -1.0]).unwrap();
        let phi = |_: &CoefficientVector| -> Result<Complex64> { Ok(c(7.0)) };
        let r = apply_operator(&LinearDifferentialOperator::zero(), &phi, &a, &FdConfig::default()).unwrap();
        assert_eq!(r.value, c(0.0));
    }

    #[test]
    fn constructor_merges_duplicate_terms() {
        let op = LinearDifferentialOperator::new(vec![
            OperatorTerm::constant(c(1.0), vec![1, 0]),
            OperatorTerm::constant(c(2.0), vec![1, 0]),
            OperatorTerm::constant(c(1.0), vec![0, 1]),
            OperatorTerm::constant(c(-1.0), vec![0, 1]),
        ]);
        assert_eq!(op.terms.len(), 1);
        assert_eq!(op.terms[0].coeff_const, c(3.0));
    }

    #[test]
    fn euler_on_univariate_closed_form() {
        // J(a) = 2Γ(5/4)(−a)^{−1/4}; the constant cancels in the residual
        let b = MonomialBasis::new(1, 4).unwrap();
        let phi = |a: &CoefficientVector| -> Result<Complex64> { Ok((-a.values()[0]).powf(-0.25)) };
        let e = euler_operator(0, &b).unwrap();
        for &x in &[-1.0, -0.3, -2.5] {
            let a = CoefficientVector::from_real(&b, &[x]).unwrap();
            let r = apply_operator(&e, &phi, &a, &FdConfig::default()).unwrap();
            assert!(r.relative() < 1e-9, "a = {x}: {r:?}");
        }
    }

    #[test]
    fn document_round_trip() {
        let sys = GkzSystem::new(MonomialBasis::new(2, 3).unwrap()).unwrap();
        let doc = sys.document();
        let text = serde_json::to_string(&doc).unwrap();
        let back: SystemDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        assert!(back.matches_rebuilt().unwrap());
        let rebuilt = back.to_system().unwrap();
        assert_eq!(rebuilt.relations, sys.relations);
    }
}
