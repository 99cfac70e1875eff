//! Singular values, norms, kernels and polar factors built on the Jacobi
//! eigensolver (via `M* M`).

use num_traits::Zero;

use super::jacobi::{hermitian_eigen, HermitianEigen};
use super::matrix::{vec_inner, vec_norm, DenseMatrix};
use crate::error::Result;
use crate::scalar::{cx, Cx, Real};

/// One eigenpair with its certified radius.
#[derive(Debug, Clone)]
pub struct EigenPair<R: Real> {
    pub value: R,
    pub vector: Vec<Cx<R>>,
    pub error_radius: R,
}

/// One singular triplet `M v = sigma u`.
#[derive(Debug, Clone)]
pub struct SingularTriplet<R: Real> {
    pub sigma: R,
    pub u: Vec<Cx<R>>,
    pub v: Vec<Cx<R>>,
}

/// Eigenpairs of a Hermitian matrix, ascending.
pub fn dense_sym_eig<R: Real>(m: &DenseMatrix<R>) -> Result<Vec<EigenPair<R>>> {
    let e = hermitian_eigen(m)?;
    Ok((0..e.dim())
        .map(|k| EigenPair { value: e.values[k], vector: e.vector(k), error_radius: e.radius() })
        .collect())
}

/// Spectral norm: largest singular value.
pub fn dense_norm<R: Real>(m: &DenseMatrix<R>) -> Result<R> {
    if m.dim() == 0 {
        return Ok(R::zero());
    }
    let g = m.adjoint().matmul(m);
    let e = hermitian_eigen(&g)?;
    Ok(e.values.last().copied().unwrap_or(R::zero()).max(R::zero()).sqrt())
}

/// Gram-Schmidt of `x` against an orthonormal set; `None` if nothing is left.
pub(crate) fn orthogonalize<R: Real>(x: &[Cx<R>], basis: &[Vec<Cx<R>>], floor: R) -> Option<Vec<Cx<R>>> {
    let mut w = x.to_vec();
    // twice is enough
    for _ in 0..2 {
        for b in basis {
            let c = vec_inner(&w, b);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi = *wi - c * *bi;
            }
        }
    }
    let nrm = vec_norm(&w);
    if nrm <= floor {
        return None;
    }
    Some(w.into_iter().map(|z| z / nrm).collect())
}

/// Full SVD, singular values descending. Left vectors for `sigma <= tol` are
/// completed to an orthonormal basis.
pub fn dense_svd<R: Real>(m: &DenseMatrix<R>, tol: R) -> Result<Vec<SingularTriplet<R>>> {
    let n = m.dim();
    let g = m.adjoint().matmul(m);
    let e = hermitian_eigen(&g)?;
    let mut lefts: Vec<Vec<Cx<R>>> = Vec::with_capacity(n);
    let mut out = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let sigma = e.values[k].max(R::zero()).sqrt();
        let v = e.vector(k);
        let u = if sigma > tol {
            let mv: Vec<Cx<R>> = m.mul_vec(&v).into_iter().map(|z| z / sigma).collect();
            orthogonalize(&mv, &lefts, R::epsilon())
        } else {
            None
        };
        let u = match u {
            Some(u) => u,
            None => complete(&lefts, n),
        };
        lefts.push(u.clone());
        out.push(SingularTriplet { sigma, u, v });
    }
    Ok(out)
}

fn complete<R: Real>(basis: &[Vec<Cx<R>>], n: usize) -> Vec<Cx<R>> {
    for i in 0..n {
        let mut e = vec![Cx::zero(); n];
        e[i] = cx(R::one(), R::zero());
        if let Some(u) = orthogonalize(&e, basis, R::lit(0.5)) {
            return u;
        }
    }
    vec![Cx::zero(); n]
}

/// Orthonormal kernel basis: vectors with `|M v| <= tol`.
///
/// Hermitian input is diagonalized directly (no squaring of the condition
/// number); anything else goes through `M* M`.
pub fn dense_kernel<R: Real>(m: &DenseMatrix<R>, tol: R) -> Result<Vec<Vec<Cx<R>>>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if m.hermitian_defect() <= R::epsilon() * R::lit(64.0) * R::one().max(m.max_abs()) {
        let e = hermitian_eigen(m)?;
        return Ok((0..n).filter(|&k| e.values[k].abs() <= tol).map(|k| e.vector(k)).collect());
    }
    let g = m.adjoint().matmul(m);
    let e = hermitian_eigen(&g)?;
    Ok((0..n)
        .filter(|&k| e.values[k].max(R::zero()).sqrt() <= tol)
        .map(|k| e.vector(k))
        .collect())
}

/// `sqrt` of a positive semidefinite matrix; eigenvalues above `-tol` are
/// clamped at zero.
pub fn psd_sqrt<R: Real>(m: &DenseMatrix<R>) -> Result<(DenseMatrix<R>, HermitianEigen<R>)> {
    let e = hermitian_eigen(m)?;
    Ok((e.map(|l| l.max(R::zero()).sqrt()), e))
}

/// Unitary factor of the polar decomposition restricted off the kernel:
/// `V = sum_{sigma > tol} u v*`, zero on the kernel.
pub fn polar_isometry<R: Real>(m: &DenseMatrix<R>, tol: R) -> Result<DenseMatrix<R>> {
    let n = m.dim();
    let g = m.adjoint().matmul(m);
    let e = hermitian_eigen(&g)?;
    let mut v = DenseMatrix::zeros(n);
    for k in 0..n {
        let sigma = e.values[k].max(R::zero()).sqrt();
        if sigma <= tol {
            continue;
        }
        let right = e.vector(k);
        let left: Vec<Cx<R>> = m.mul_vec(&right).into_iter().map(|z| z / sigma).collect();
        v = v.add(&DenseMatrix::outer(&left, &right));
    }
    Ok(v)
}
