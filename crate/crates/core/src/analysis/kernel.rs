use num_traits::Zero;

use crate::dense::dense_kernel;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::SCAN_LIMIT;
use crate::structured::{FinVector, SignTag, StructuredOperator};

/// Orthonormal basis of `N(T)`: dense block kernel plus the tail indices
/// whose diagonal entry vanishes (within `tol`).
///
/// With `alpha != 0` the envelope bounds the candidate indices; with
/// `alpha = 0` the tail must be strictly signed (or vanish nowhere past a
/// known index), otherwise the kernel cannot be certified finite.
pub fn null_space<R: Real>(t: &StructuredOperator<R>, tol: R) -> Result<Vec<FinVector<R>>> {
    let n = t.block_size();
    let mut basis: Vec<FinVector<R>> =
        dense_kernel(&t.shifted_block(), tol)?.iter().map(|v| FinVector::from_dense(v)).collect();
    if t.tail().is_zero() {
        if t.scalar().norm() <= tol {
            return Err(Error::UncertifiableKernel("tail is identically zero".into()));
        }
        return Ok(basis);
    }
    let a = t.scalar().norm();
    let first = n + 1;
    let end = if a > tol {
        let env = t.tail().envelope();
        env.first_below(a - tol, first.max(env.valid_from))
            .ok_or_else(|| Error::UncertifiableKernel("envelope never drops below |alpha|".into()))?
    } else if t.scalar().is_zero() {
        match t.tail().sign() {
            SignTag::EventuallyNonneg { from, strict: true } | SignTag::EventuallyNonpos { from, strict: true } => {
                from.max(first)
            }
            SignTag::IdenticallyZero { .. } => {
                return Err(Error::UncertifiableKernel("tail vanishes from some index on".into()))
            }
            _ => return Err(Error::UncertifiableKernel("tail sign is not strict".into())),
        }
    } else {
        return Err(Error::UncertifiableKernel("scalar part is within tolerance of zero".into()));
    };
    if end - first > SCAN_LIMIT {
        return Err(Error::UncertifiableKernel(format!("candidate range extends to index {end}")));
    }
    let exact = t.scalar().is_zero();
    for k in first..end {
        let v = t.tail_value(k).norm();
        if (exact && v.is_zero()) || (!exact && v <= tol) {
            basis.push(FinVector::basis(k));
        }
    }
    Ok(basis)
}
