//! Classification, norm attainment, AN triples and kernels.

mod an;
mod kernel;

pub use an::{an_check, an_reassemble, ANTriple, ANVerdict, NotANReason, OFFENDING_LISTED};
pub use kernel::null_space;

use crate::dense::hermitian_eigen;
use crate::error::Result;
use crate::scalar::Real;
use crate::spectral::{extremal, operator_norm, Attainment, Side};
use crate::structured::StructuredOperator;

/// Structural and spectral flags of an operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize)]
pub struct Classification {
    pub self_adjoint: bool,
    pub normal: bool,
    pub hyponormal: bool,
    pub positive: bool,
    pub compact: bool,
}

/// Self-commutator `T*T - TT*`. The tails commute, so it lives on the block.
pub fn self_commutator<R: Real>(t: &StructuredOperator<R>) -> Result<StructuredOperator<R>> {
    t.adjoint()?.commutator(t)
}

pub fn classify<R: Real>(t: &StructuredOperator<R>, tol: R) -> Result<Classification> {
    let self_adjoint = t.is_self_adjoint(tol);
    let c = self_commutator(t)?;
    let (normal, hyponormal) = if c.block_size() == 0 {
        (true, true)
    } else {
        let e = hermitian_eigen(&c.block().hermitian_part())?;
        let lo = e.values[0];
        let hi = e.values[e.dim() - 1];
        (lo.abs().max(hi.abs()) <= tol + e.radius(), lo >= -tol - e.radius())
    };
    let positive = self_adjoint && {
        let m = extremal(t, Side::Min)?;
        m.value >= -tol
    };
    Ok(Classification { self_adjoint, normal, hyponormal, positive, compact: t.scalar().norm() <= tol })
}

/// Whether `||Tx|| = ||T||` for some unit `x`.
///
/// For a diagonal self-adjoint operator `a I + diag(l_n)` this is exactly the
/// test `|l_n + a| > |a|` for some `n`: the top of `sigma(T*T)` either sits
/// on a listed entry above the essential value `|a|^2` or is the essential
/// value itself, approached but never reached when the entries stay below.
pub fn is_norm_attaining<R: Real>(t: &StructuredOperator<R>, tol: R) -> Result<Attainment<R>> {
    Ok(operator_norm(t, tol)?.attainment)
}
