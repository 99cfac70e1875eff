//! Certified spectral computations for operators of the form
//! `alpha I + B + diag(d_n)` on l2, where `B` is a finite dense block and
//! `d_n -> 0` is given by an exact rule with a decay envelope.
//!
//! The numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix `f64`, which is what the CLI and the acceptance suite use.

pub mod analysis;
pub mod commutator;
pub mod dense;
pub mod error;
pub mod io;
pub mod perturbation;
pub mod scalar;
pub mod spectral;
pub mod structured;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};
pub use structured::{DecayEnvelope, EnvelopeTerm, FinVector, SignTag, StructuredOperator, TailExpr, TailRule, Term};

/// Default comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

pub type Operator = StructuredOperator<f64>;
pub type Operator32 = StructuredOperator<f32>;
pub type Vector = FinVector<f64>;
pub type Matrix = dense::DenseMatrix<f64>;
pub type Complex = Cx<f64>;
