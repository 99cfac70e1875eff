//! Certified spectral computations on structured operators.
//!
//! Everything reduces to extremes of self-adjoint values: the block is
//! diagonalised by Jacobi (error radius = final off-diagonal norm) and the
//! tail is scanned exactly until the envelope proves that nothing further
//! out can beat the current candidate.

mod calculus;
mod extremal;
mod spectrum;

pub use calculus::{modulus, polar, pos_neg_parts, sqrt_positive, invert, PolarPair};
pub use extremal::{essential_min_modulus, min_modulus, operator_norm, MinModulus, NormResult, SCAN_LIMIT};
pub(crate) use extremal::{extremal, Side};
pub use spectrum::{spectrum_sa, SpectralPoint, SpectrumApprox, DEFAULT_WINDOW};

use crate::scalar::{Cx, Real};
use crate::structured::FinVector;

/// Finitely supported unit vector achieving a claimed value.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness<R: Real> {
    pub vector: FinVector<R>,
    pub value: Cx<R>,
}

impl<R: Real> Witness<R> {
    pub fn new(vector: FinVector<R>, value: Cx<R>) -> Self {
        Self { vector, value }
    }

    pub fn is_unit(&self, tol: R) -> bool {
        self.vector.is_unit(tol)
    }
}

/// Outcome of an attainment decision.
#[derive(Debug, Clone, PartialEq)]
pub enum Attainment<R: Real> {
    Yes(Witness<R>),
    No,
    Undecided,
}

impl<R: Real> Attainment<R> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Attainment::Yes(_))
    }

    pub fn witness(&self) -> Option<&Witness<R>> {
        match self {
            Attainment::Yes(w) => Some(w),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Attainment::Yes(_) => "yes",
            Attainment::No => "no",
            Attainment::Undecided => "undecided",
        }
    }
}
