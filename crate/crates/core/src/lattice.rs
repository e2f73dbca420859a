//! Integer kernel of the A-matrix and the toric relations it induces.
//!
//! The kernel is computed exactly: `[Aᵀ | I]` is brought to Hermite normal
//! form by unimodular integer row operations, and the rows whose left block
//! vanishes form a ℤ-basis of `{m ∈ ℤ^A : A·m = 0}`. That basis is then
//! shortened by pairwise size reduction, which keeps it a ℤ-basis while
//! bringing the orders of the resulting box operators down.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monomial::MonomialBasis;

pub type IntVector = Vec<BigInt>;

/// Result of the row-style Hermite reduction of `[Aᵀ | I]`.
#[derive(Debug, Clone)]
pub struct HermiteDecomposition {
    /// Hermite normal form of `Aᵀ` (|A| × n), with positive pivots.
    pub hermite: Vec<IntVector>,
    /// Unimodular transform `U` with `U·Aᵀ = H`.
    pub transform: Vec<IntVector>,
    pub rank: usize,
}

/// Row-style Hermite normal form of an integer matrix `m` (rows × cols),
/// together with the unimodular transform.
pub fn hermite_normal_form(m: &[Vec<i64>]) -> HermiteDecomposition {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut h: Vec<IntVector> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let mut u: Vec<IntVector> =
        (0..rows).map(|i| (0..rows).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();

    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        loop {
            // smallest nonzero |entry| at or below the pivot row
            let best = (pivot_row..rows)
                .filter(|&r| !h[r][col].is_zero())
                .min_by(|&r, &s| h[r][col].abs().cmp(&h[s][col].abs()).then(r.cmp(&s)));
            let Some(best) = best else { break };
            h.swap(pivot_row, best);
            u.swap(pivot_row, best);
            let mut done = true;
            for r in pivot_row + 1..rows {
                if h[r][col].is_zero() {
                    continue;
                }
                let q = h[r][col].div_floor(&h[pivot_row][col]);
                row_axpy(&mut h, r, pivot_row, &q);
                row_axpy(&mut u, r, pivot_row, &q);
                if !h[r][col].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[pivot_row][col].is_zero() {
            continue;
        }
        if h[pivot_row][col].is_negative() {
            negate_row(&mut h[pivot_row]);
            negate_row(&mut u[pivot_row]);
        }
        // reduce entries above the pivot into [0, pivot)
        for r in 0..pivot_row {
            let q = h[r][col].div_floor(&h[pivot_row][col]);
            if !q.is_zero() {
                row_axpy(&mut h, r, pivot_row, &q);
                row_axpy(&mut u, r, pivot_row, &q);
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    HermiteDecomposition { hermite: h, transform: u, rank: pivot_row }
}

/// `rows[target] -= q · rows[source]`
fn row_axpy(rows: &mut [IntVector], target: usize, source: usize, q: &BigInt) {
    let src = rows[source].clone();
    for (t, s) in rows[target].iter_mut().zip(&src) {
        *t -= q * s;
    }
}

fn negate_row(row: &mut IntVector) {
    for v in row.iter_mut() {
        *v = -std::mem::take(v);
    }
}

fn dot(a: &IntVector, b: &IntVector) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn content(v: &IntVector) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

/// Pairwise (Gauss/Lagrange) size reduction. Replaces `b_i` by
/// `b_i − q·b_j` whenever that strictly shortens it, until no pair improves.
fn size_reduce(basis: &mut [IntVector]) {
    let mut improved = true;
    while improved {
        improved = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let bj2 = dot(&basis[j], &basis[j]);
                let ip = dot(&basis[i], &basis[j]);
                // nearest integer to ip / bj2
                let two = BigInt::from(2);
                let q = (&ip * &two + &bj2).div_floor(&(&bj2 * &two));
                if q.is_zero() {
                    continue;
                }
                let candidate: IntVector = basis[i].iter().zip(&basis[j]).map(|(x, y)| x - &q * y).collect();
                if dot(&candidate, &candidate) < dot(&basis[i], &basis[i]) {
                    basis[i] = candidate;
                    improved = true;
                }
            }
        }
    }
}

fn l1(v: &IntVector) -> BigInt {
    v.iter().map(|x| x.abs()).sum()
}

/// A ℤ-basis of the integer kernel of the A-matrix. Vectors are primitive,
/// size-reduced, sign-normalized (first nonzero entry positive) and sorted by
/// (L1 norm, entries) so the output is deterministic.
pub fn kernel_basis(basis: &MonomialBasis) -> Vec<IntVector> {
    let a = basis.a_matrix();
    let at: Vec<Vec<i64>> = (0..basis.len()).map(|j| a.iter().map(|row| row[j]).collect()).collect();
    let hnf = hermite_normal_form(&at);
    let mut kernel: Vec<IntVector> = hnf.transform[hnf.rank..].to_vec();
    size_reduce(&mut kernel);
    for v in kernel.iter_mut() {
        debug_assert!(content(v).is_one(), "kernel basis vector is not primitive");
        if v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
            negate_row(v);
        }
    }
    kernel.sort_by(|x, y| l1(x).cmp(&l1(y)).then_with(|| y.cmp(x)));
    kernel
}

/// Rank of the A-matrix.
pub fn a_rank(basis: &MonomialBasis) -> usize {
    let a = basis.a_matrix();
    let at: Vec<Vec<i64>> = (0..basis.len()).map(|j| a.iter().map(|row| row[j]).collect()).collect();
    hermite_normal_form(&at).rank
}

/// A binomial relation `x^{A·u} = x^{A·v}`, i.e. the box operator `∂^u − ∂^v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricRelation {
    pub u: Vec<u64>,
    pub v: Vec<u64>,
}

impl ToricRelation {
    /// Splits a kernel vector into positive and negative parts.
    pub fn from_kernel_vector(m: &IntVector) -> Result<Self> {
        let part = |sign: bool| -> Result<Vec<u64>> {
            m.iter()
                .map(|x| {
                    let x = if sign { x.clone() } else { -x.clone() };
                    if x.is_positive() {
                        x.to_u64().ok_or_else(|| Error::Overflow(x.to_string()))
                    } else {
                        Ok(0)
                    }
                })
                .collect()
        };
        Ok(Self { u: part(true)?, v: part(false)? })
    }

    /// `|u|`, which equals `|v|` because every column of A sums to d.
    pub fn order(&self) -> u64 {
        self.u.iter().sum::<u64>().max(self.v.iter().sum())
    }

    /// `u − v` as signed integers.
    pub fn difference(&self) -> Vec<i128> {
        self.u.iter().zip(&self.v).map(|(&a, &b)| a as i128 - b as i128).collect()
    }

    /// `A·u == A·v`, checked in exact integer arithmetic.
    pub fn is_balanced(&self, basis: &MonomialBasis) -> bool {
        basis.weigh(&self.u) == basis.weigh(&self.v)
    }

    pub fn supports_disjoint(&self) -> bool {
        self.u.iter().zip(&self.v).all(|(&a, &b)| a == 0 || b == 0)
    }

    pub fn is_primitive(&self) -> bool {
        self.difference().iter().fold(0i128, |g, &x| g.gcd(&x)) == 1
    }
}

pub fn toric_relations(basis: &MonomialBasis) -> Result<Vec<ToricRelation>> {
    kernel_basis(basis).iter().map(ToricRelation::from_kernel_vector).collect()
}

/// JSON form of a basis together with its relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisDocument {
    pub schema: String,
    pub n: usize,
    pub d: u32,
    pub monomials: Vec<Vec<u32>>,
    pub relations: Vec<ToricRelation>,
}

impl BasisDocument {
    pub fn build(basis: &MonomialBasis) -> Result<Self> {
        Ok(Self {
            schema: crate::SCHEMA.to_string(),
            n: basis.n(),
            d: basis.d(),
            monomials: basis.monomials().iter().map(|k| k.entries().to_vec()).collect(),
            relations: toric_relations(basis)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ints(v: &[i64]) -> IntVector {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// All integer vectors with entries in `-bound..=bound`.
    fn brute_kernel_rank(basis: &MonomialBasis, bound: i64) -> usize {
        let a = basis.a_matrix();
        let len = basis.len();
        let mut sols: Vec<Vec<f64>> = Vec::new();
        let mut cur = vec![-bound; len];
        loop {
            let in_kernel = a.iter().all(|row| row.iter().zip(&cur).map(|(x, y)| x * y).sum::<i64>() == 0);
            if in_kernel && cur.iter().any(|&x| x != 0) {
                sols.push(cur.iter().map(|&x| x as f64).collect());
            }
            let mut i = 0;
            loop {
                if i == len {
                    return float_rank(&sols);
                }
                cur[i] += 1;
                if cur[i] > bound {
                    cur[i] = -bound;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    fn float_rank(rows: &[Vec<f64>]) -> usize {
        let mut m = rows.to_vec();
        let mut rank = 0;
        let cols = m.first().map_or(0, Vec::len);
        for c in 0..cols {
            let Some(p) = (rank..m.len()).find(|&r| m[r][c].abs() > 1e-9) else { continue };
            m.swap(rank, p);
            for r in 0..m.len() {
                if r != rank {
                    let f = m[r][c] / m[rank][c];
                    let src = m[rank].clone();
                    for (x, y) in m[r].iter_mut().zip(&src) {
                        *x -= f * y;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// A rank-r family of vectors spans the saturated lattice it generates
    /// iff the gcd of its maximal minors is 1.
    fn maximal_minor_gcd_is_one(vectors: &[IntVector]) -> bool {
        use crate::linalg::DenseMatrix;
        use num_rational::BigRational;
        let r = vectors.len();
        if r == 0 {
            return true;
        }
        let len = vectors[0].len();
        let mut g = BigInt::zero();
        let mut cols: Vec<usize> = (0..r).collect();
        loop {
            let m = DenseMatrix::from_rows(
                vectors
                    .iter()
                    .map(|v| cols.iter().map(|&c| BigRational::from_integer(v[c].clone())).collect())
                    .collect(),
            );
            let det = m.det();
            assert!(det.is_integer());
            g = g.gcd(&det.to_integer());
            if g.is_one() {
                return true;
            }
            // next combination
            let mut i = r;
            loop {
                if i == 0 {
                    return g.is_one();
                }
                i -= 1;
                if cols[i] < len - r + i {
                    cols[i] += 1;
                    for j in i + 1..r {
                        cols[j] = cols[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn binary_quadratic_kernel() {
        let b = MonomialBasis::new(2, 2).unwrap();
        assert_eq!(kernel_basis(&b), vec![ints(&[1, -2, 1])]);
        let rel = toric_relations(&b).unwrap();
        assert_eq!(rel, vec![ToricRelation { u: vec![1, 0, 1], v: vec![0, 2, 0] }]);
    }

    #[test]
    fn univariate_kernel_is_empty() {
        let b = MonomialBasis::new(1, 4).unwrap();
        assert!(kernel_basis(&b).is_empty());
        assert!(toric_relations(&b).unwrap().is_empty());
    }

    #[test]
    fn binary_cubic_kernel_rank_matches_brute_force() {
        let b = MonomialBasis::new(2, 3).unwrap();
        assert_eq!(kernel_basis(&b).len(), 2);
        assert_eq!(brute_kernel_rank(&b, 2), 2);
    }

    #[test]
    fn binary_quartic_relations_balanced() {
        let b = MonomialBasis::new(2, 4).unwrap();
        let rels = toric_relations(&b).unwrap();
        assert_eq!(rels.len(), 3);
        for r in &rels {
            assert!(r.is_balanced(&b));
            assert!(r.supports_disjoint());
            assert!(r.is_primitive());
            assert_eq!(r.order(), 2);
        }
    }

    #[test]
    fn hermite_form_of_small_matrix() {
        let m = vec![vec![4, 0], vec![3, 1], vec![2, 2]];
        let hnf = hermite_normal_form(&m);
        assert_eq!(hnf.rank, 2);
        // U·M = H
        for (urow, hrow) in hnf.transform.iter().zip(&hnf.hermite) {
            for c in 0..2 {
                let s: BigInt = urow.iter().zip(&m).map(|(u, mr)| u * BigInt::from(mr[c])).sum();
                assert_eq!(&s, &hrow[c]);
            }
        }
        assert!(hnf.hermite[0][0].is_positive());
        assert!(hnf.hermite[1][0].is_zero());
    }

    #[test]
    fn json_document_shape() {
        let b = MonomialBasis::new(2, 2).unwrap();
        let doc = BasisDocument::build(&b).unwrap();
        let v = serde_json::to_value(&doc).unwrap();
        assert_eq!(v["monomials"], serde_json::json!([[2, 0], [1, 1], [0, 2]]));
        assert_eq!(v["relations"][0]["u"], serde_json::json!([1, 0, 1]));
        assert_eq!(v["relations"][0]["v"], serde_json::json!([0, 2, 0]));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn kernel_is_a_primitive_basis(n in 1usize..4, d in 1u32..6) {
            let b = MonomialBasis::new(n, d).unwrap();
            let ker = kernel_basis(&b);
            prop_assert_eq!(a_rank(&b), n);
            prop_assert_eq!(ker.len(), b.len() - n);
            let a = b.a_matrix();
            for v in &ker {
                prop_assert!(content(v).is_one());
                for row in &a {
                    let s: BigInt = row.iter().zip(v).map(|(x, y)| BigInt::from(*x) * y).sum();
                    prop_assert!(s.is_zero());
                }
            }
            prop_assert!(maximal_minor_gcd_is_one(&ker));
            for r in toric_relations(&b).unwrap() {
                prop_assert!(r.is_balanced(&b));
                prop_assert!(r.supports_disjoint());
                prop_assert!(r.is_primitive());
            }
        }
    }
}
