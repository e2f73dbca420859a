//! Hypergeometric systems attached to the integral of the exponential of a
//! homogeneous form,
//!
//! ```text
//! J(a) = ∫_{ℝⁿ} exp(P(a; x)) dx,    P(a; x) = Σ_{k ∈ A} a_k x^k,
//! ```
//!
//! where `A` is the set of all exponent vectors of total degree `d` in `n`
//! variables. The crate builds
//!
//! * the monomial basis `A`, its integer matrix and the toric relations coming
//!   from the integer kernel ([`monomial`], [`lattice`]);
//! * the A-hypergeometric (GKZ) system of box and Euler operators ([`gkz`]);
//! * the GL(n) action on coefficients and its Lie derivatives ([`gl_action`]);
//! * a deterministic tensor-product quadrature for `J` and its moments on
//!   decay-verified coefficient sets ([`quadrature`]);
//! * classical SL(n)-invariants used to locate singularities ([`invariants`]);
//! * verification suites that check all of the above as numerical identities
//!   ([`verifier`]).
//!
//! Inner loops run on rayon when the `parallel` feature is enabled. Partial
//! sums are always combined in a fixed tree order, so results are bit-identical
//! between the parallel and sequential paths.

pub mod error;
pub mod fd;
pub mod gkz;
pub mod gl_action;
pub mod invariants;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod monomial;
pub mod quadrature;
pub mod reduce;
pub mod scalar;
pub mod verifier;

pub use error::{Error, Result};
pub use gkz::{GkzSystem, LinearDifferentialOperator};
pub use lattice::ToricRelation;
pub use monomial::{CoefficientVector, ExponentVector, MonomialBasis};
pub use quadrature::{IntegralValue, QuadratureConfig};
pub use reduce::Execution;

pub use num_complex::Complex64;

/// Schema tag written into every JSON document produced by this crate.
pub const SCHEMA: &str = "ghyper/1";
