//! Nonlocality of pure permutation-symmetric three-qubit states.
//!
//! The crate builds states from Majorana spinors or the canonical one- and
//! three-parameter families, reduces them to two-qubit correlation data,
//! evaluates CHSH and Charlie-conditioned CHSH optima, computes the
//! three-tangle and pairwise concurrence, and evaluates three-party,
//! two-setting Bell expressions against deterministic and quantum values.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`); the
//! `*F64` aliases below fix the usual double-precision instantiation.

// NaN must fail range checks, hence `!(x <= tol)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod bell322;
pub mod conditional;
pub mod correlations;
pub mod error;
pub mod invariants;
pub mod linalg;
pub mod qsym;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub use num_complex::Complex;

pub type SpinorF64 = qsym::Spinor<f64>;
pub type PureState3F64 = qsym::PureState3<f64>;
pub type LocalUnitaryTripleF64 = qsym::LocalUnitaryTriple<f64>;
pub type TwoQubitDensityF64 = correlations::TwoQubitDensity<f64>;
pub type CorrelationDecompositionF64 = correlations::CorrelationDecomposition<f64>;
pub type ConditionalReportF64 = conditional::ConditionalReport<f64>;
pub type InvariantSetF64 = invariants::InvariantSet<f64>;
pub type BellExpressionF64 = bell322::BellExpression322<f64>;
pub type BellExpressionExact = bell322::BellExpression322<num_rational::Rational64>;
pub type PartyObservablesF64 = bell322::PartyObservables<f64>;
