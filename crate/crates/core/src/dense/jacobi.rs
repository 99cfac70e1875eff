//! Cyclic Jacobi eigensolver for complex Hermitian matrices.
//!
//! Each rotation first removes the phase of the pivot `a_pq` with a
//! diagonal unitary and then applies the classical real plane rotation,
//! so that `U = diag(1, e^{-i phi}) R` annihilates `a_pq` exactly. The
//! off-diagonal Frobenius norm decays monotonically; its final value bounds
//! the distance of every diagonal entry to the true spectrum (Weyl), which
//! is what we report as the error radius.

use num_traits::Zero;

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cx, Cx, Real};

/// Sweep cap.
pub const MAX_SWEEPS: usize = 60;
/// Convergence threshold on the off-diagonal Frobenius norm (f64 scale).
pub const OFF_THRESHOLD: f64 = 1e-12;

/// Eigendecomposition `A = V diag(values) V*` with ascending eigenvalues.
#[derive(Debug, Clone)]
pub struct HermitianEigen<R: Real> {
    pub values: Vec<R>,
    /// Eigenvectors stored as columns.
    pub vectors: DenseMatrix<R>,
    /// Off-diagonal Frobenius norm left after the last sweep.
    pub off_norm: R,
    pub sweeps: usize,
}

impl<R: Real> HermitianEigen<R> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<Cx<R>> {
        self.vectors.column(k)
    }

    /// Certified radius shared by every eigenvalue.
    pub fn radius(&self) -> R {
        self.off_norm
    }

    /// `V diag(f(values)) V*`.
    pub fn map(&self, f: impl Fn(R) -> R) -> DenseMatrix<R> {
        let n = self.dim();
        let fv: Vec<R> = self.values.iter().map(|&l| f(l)).collect();
        DenseMatrix::from_fn(n, |i, j| {
            let mut acc = Cx::zero();
            for k in 0..n {
                if fv[k] != R::zero() {
                    acc = acc + self.vectors[(i, k)] * self.vectors[(j, k)].conj() * fv[k];
                }
            }
            acc
        })
    }

    pub fn min(&self) -> Option<(R, usize)> {
        self.values.first().map(|&v| (v, 0))
    }

    pub fn max(&self) -> Option<(R, usize)> {
        self.values.last().map(|&v| (v, self.values.len() - 1))
    }
}

fn off_diagonal<R: Real>(a: &DenseMatrix<R>) -> R {
    let n = a.dim();
    let mut s = R::zero();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s = s + a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Hermitian check tolerance used by the solver.
fn hermitian_tolerance<R: Real>(a: &DenseMatrix<R>) -> R {
    let scale = R::one().max(a.max_abs());
    R::lit(1e-12).max(R::epsilon() * R::lit(64.0)) * scale
}

/// Diagonalizes a Hermitian matrix by cyclic Jacobi rotations.
pub fn hermitian_eigen<R: Real>(m: &DenseMatrix<R>) -> Result<HermitianEigen<R>> {
    let defect = m.hermitian_defect();
    if defect > hermitian_tolerance(m) {
        return Err(Error::NotHermitian { asymmetry: defect.as_f64() });
    }
    let n = m.dim();
    let mut a = m.hermitian_part();
    let mut v = DenseMatrix::identity(n);
    let frob = a.frobenius();
    // Iterate to full working precision; only the looser threshold is
    // required for success.
    let target = R::epsilon() * frob * R::lit(4.0);
    let required = R::lit(OFF_THRESHOLD).max(R::epsilon() * frob * R::lit(64.0));

    let mut sweeps = 0;
    let mut off = off_diagonal(&a);
    while off > target && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let b = a[(p, q)];
                let mag = b.norm();
                if mag == R::zero() {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                // skip pivots that are negligible against both diagonal entries
                let tiny = R::epsilon() * R::lit(0.25);
                if mag <= tiny * app.abs() && mag <= tiny * aqq.abs() {
                    a[(p, q)] = Cx::zero();
                    a[(q, p)] = Cx::zero();
                    continue;
                }
                rotated = true;
                rotate(&mut a, &mut v, p, q, b / mag, mag, app, aqq);
            }
        }
        off = off_diagonal(&a);
        if !rotated {
            break;
        }
    }
    if off > required {
        return Err(Error::NoConvergence { sweeps, off: off.as_f64() });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).unwrap_or(std::cmp::Ordering::Equal));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DenseMatrix::from_fn(n, |i, k| v[(i, order[k])]);
    Ok(HermitianEigen { values, vectors, off_norm: off, sweeps })
}

#[allow(clippy::too_many_arguments)]
fn rotate<R: Real>(
    a: &mut DenseMatrix<R>,
    v: &mut DenseMatrix<R>,
    p: usize,
    q: usize,
    unit: Cx<R>,
    mag: R,
    app: R,
    aqq: R,
) {
    let n = a.dim();
    let tau = (aqq - app) / (R::lit(2.0) * mag);
    let t = if tau == R::zero() {
        R::one()
    } else {
        tau.signum() / (tau.abs() + (R::one() + tau * tau).sqrt())
    };
    let c = R::one() / (R::one() + t * t).sqrt();
    let s = t * c;
    let e_minus = unit.conj(); // e^{-i phi}
    let e_plus = unit;
    let cc = cx(c, R::zero());
    let ss = cx(s, R::zero());

    // A <- A U
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = cc * akp - ss * e_minus * akq;
        a[(k, q)] = ss * akp + cc * e_minus * akq;
    }
    // A <- U* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = cc * apk - ss * e_plus * aqk;
        a[(q, k)] = ss * apk + cc * e_plus * aqk;
    }
    // V <- V U
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = cc * vkp - ss * e_minus * vkq;
        v[(k, q)] = ss * vkp + cc * e_minus * vkq;
    }
    a[(p, q)] = Cx::zero();
    a[(q, p)] = Cx::zero();
    a[(p, p)] = cx(a[(p, p)].re, R::zero());
    a[(q, q)] = cx(a[(q, q)].re, R::zero());
}
