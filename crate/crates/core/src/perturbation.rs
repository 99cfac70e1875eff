//! Norm-attaining perturbations of contractions.
//!
//! For a positive contraction `L` the spectrum is cut at `1 - alpha/2`:
//! the top slice `rho` is flattened to the identity, the rest is left
//! alone. For a normalized `S` whose essential part is a unimodular scalar
//! `s`, a single diagonal entry far out in the tail is moved onto `beta = s`,
//! giving `Z` with `||Z|| = ||S||`, `||S - Z|| < alpha` and an exact
//! maximizing vector `e_n*` with `<Z e_n*, e_n*> = beta`.

use num_traits::Zero;

use crate::analysis::classify;
use crate::dense::{hermitian_eigen, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};
use crate::spectral::{operator_norm, Witness};
use crate::structured::{FinVector, SignTag, StructuredOperator, TailRule, MAX_BLOCK};

/// Candidate tail indices tried by [`attainify`].
pub const CANDIDATES: usize = 16;

/// Spectral projections of `L` for `gamma = [0, 1 - alpha/2]` and
/// `rho = (1 - alpha/2, 1]`.
#[derive(Debug, Clone)]
pub struct SliceProjections<R: Real> {
    pub p_gamma: StructuredOperator<R>,
    pub p_rho: StructuredOperator<R>,
}

/// `J = L P_gamma + P_rho`.
#[derive(Debug, Clone)]
pub struct Flattened<R: Real> {
    pub j: StructuredOperator<R>,
    /// `P_rho = 0`, so `||J|| < 1`.
    pub top_slice_empty: bool,
    /// `||J - L||`.
    pub distance: R,
    pub norm: R,
}

#[derive(Debug, Clone)]
pub struct PerturbationCertificate<R: Real> {
    pub z: StructuredOperator<R>,
    pub eta: Witness<R>,
    pub norm_preserved: R,
    pub distance: R,
    pub beta_achieved: Cx<R>,
    /// Tail index that was moved; `None` on the trivial path.
    pub n_star: Option<usize>,
    /// `||S||` before normalization.
    pub input_norm: R,
}

fn check_alpha<R: Real>(alpha: R) -> Result<()> {
    if !(alpha > R::zero() && alpha < R::lit(2.0)) {
        return Err(Error::PreconditionFailed(format!("alpha must lie in (0, 2), got {}", alpha)));
    }
    Ok(())
}

fn check_contraction<R: Real>(l: &StructuredOperator<R>, tol: R) -> Result<()> {
    if !classify(l, tol)?.positive {
        return Err(Error::NotPositive("operator is not positive".into()));
    }
    let n = operator_norm(l, tol)?.value;
    if n > R::one() + tol {
        return Err(Error::NotPositive(format!("norm {:e} exceeds 1", n.as_f64())));
    }
    Ok(())
}

pub fn slice_projections<R: Real>(l: &StructuredOperator<R>, alpha: R, tol: R) -> Result<SliceProjections<R>> {
    check_alpha(alpha)?;
    check_contraction(l, tol)?;
    let level = R::one() - alpha * R::lit(0.5) + tol;
    let s = l.scalar().re;
    let env = l.tail().envelope();
    let start = (l.block_size() + 1).max(env.valid_from);
    let undecided = || Error::PreconditionFailed("tail does not settle on one side of the cut".into());
    // (index from which the tail stays on one side, tail in rho)
    let (from, tail_rho) = if l.tail().is_zero() {
        (start, s > level)
    } else if s != level {
        let gap = (s - level).abs();
        (env.first_below(gap, start).ok_or_else(undecided)?, s > level)
    } else {
        match l.tail().sign() {
            SignTag::EventuallyNonneg { from, strict: true } => (from, true),
            SignTag::EventuallyNonpos { from, .. } | SignTag::IdenticallyZero { from } => (from, false),
            _ => return Err(undecided()),
        }
    };
    if from.saturating_sub(1) > MAX_BLOCK {
        return Err(undecided());
    }
    let lp = l.promote(from.saturating_sub(1).max(l.block_size()))?;
    let n = lp.block_size();
    let mut rho = DenseMatrix::zeros(n);
    if n > 0 {
        let eig = hermitian_eigen(&lp.shifted_block().hermitian_part())?;
        for k in 0..n {
            if eig.values[k] > level {
                let v = eig.vector(k);
                rho = rho.add(&DenseMatrix::outer(&v, &v));
            }
        }
    }
    let gamma = DenseMatrix::identity(n).sub(&rho);
    let (sr, sg) = if tail_rho { (R::one(), R::zero()) } else { (R::zero(), R::one()) };
    let p_rho = StructuredOperator::new(re(sr), rho.shift(re(-sr)), TailRule::zero())?;
    let p_gamma = StructuredOperator::new(re(sg), gamma.shift(re(-sg)), TailRule::zero())?;
    Ok(SliceProjections { p_gamma, p_rho })
}

pub fn flatten_top<R: Real>(l: &StructuredOperator<R>, alpha: R, tol: R) -> Result<Flattened<R>> {
    let sp = slice_projections(l, alpha, tol)?;
    let j = l.multiply(&sp.p_gamma)?.add(&sp.p_rho)?;
    let distance = operator_norm(&j.sub(l)?, tol)?.value;
    let norm = operator_norm(&j, tol)?.value;
    let top_slice_empty = sp.p_rho.scalar().is_zero() && sp.p_rho.block().max_abs() == R::zero();
    if distance > alpha * R::lit(0.5) + tol {
        return Err(Error::PostconditionFailed { achieved: distance.as_f64(), target: (alpha * R::lit(0.5)).as_f64() });
    }
    if !top_slice_empty && (norm - R::one()).abs() > tol {
        return Err(Error::PostconditionFailed { achieved: norm.as_f64(), target: 1.0 });
    }
    Ok(Flattened { j, top_slice_empty, distance, norm })
}

struct Normalized<R: Real> {
    s: StructuredOperator<R>,
    input_norm: R,
    beta: Cx<R>,
}

fn normalize<R: Real>(s: &StructuredOperator<R>, alpha: R, beta: Option<Cx<R>>, tol: R) -> Result<Normalized<R>> {
    check_alpha(alpha)?;
    let input_norm = operator_norm(s, tol)?.value;
    if input_norm <= tol {
        return Err(Error::PreconditionFailed("operator norm is zero".into()));
    }
    let s1 = s.scale(re(R::one() / input_norm))?;
    let ess = s1.scalar();
    let beta = beta.unwrap_or(ess);
    if (beta - ess).norm() > tol {
        return Err(Error::BetaOutsideEssentialRange { s_re: ess.re.as_f64(), s_im: ess.im.as_f64() });
    }
    Ok(Normalized { s: s1, input_norm, beta })
}

fn certify<R: Real>(nz: &Normalized<R>, n_star: usize, alpha: R, tol: R) -> Result<PerturbationCertificate<R>> {
    let fail = |what: String| Error::NoWitnessFound(format!("index {n_star}: {what}"));
    if n_star <= nz.s.block_size() {
        return Err(fail("index lies inside the block".into()));
    }
    let z = nz.s.with_diagonal(n_star, nz.beta)?;
    let norm_preserved = operator_norm(&z, tol)?.value;
    let distance = operator_norm(&nz.s.sub(&z)?, tol)?.value;
    let eta = FinVector::basis(n_star);
    let image = z.apply(&eta);
    let beta_achieved = image.inner(&eta);
    if (norm_preserved - R::one()).abs() > tol {
        return Err(fail(format!("norm {:e}", norm_preserved.as_f64())));
    }
    if !(distance < alpha) {
        return Err(fail(format!("distance {:e}", distance.as_f64())));
    }
    if image.norm() < norm_preserved - tol || (beta_achieved - nz.beta).norm() > tol {
        return Err(fail("witness does not attain".into()));
    }
    Ok(PerturbationCertificate {
        z,
        eta: Witness::new(eta, beta_achieved),
        norm_preserved,
        distance,
        beta_achieved,
        n_star: Some(n_star),
        input_norm: nz.input_norm,
    })
}

/// Norm-attaining `Z` close to `S / ||S||` with `<Z eta, eta> = beta`.
pub fn attainify<R: Real>(
    s: &StructuredOperator<R>,
    alpha: R,
    beta: Option<Cx<R>>,
    tol: R,
) -> Result<PerturbationCertificate<R>> {
    let nz = normalize(s, alpha, beta, tol)?;
    let nr = operator_norm(&nz.s, tol)?;
    if let Some(w) = nr.attainment.witness() {
        let val = nz.s.apply(&w.vector).inner(&w.vector);
        if (val - nz.beta).norm() <= tol {
            return Ok(PerturbationCertificate {
                z: nz.s.clone(),
                eta: Witness::new(w.vector.clone(), val),
                norm_preserved: nr.value,
                distance: R::zero(),
                beta_achieved: val,
                n_star: None,
                input_norm: nz.input_norm,
            });
        }
    }
    let ess = nz.s.scalar().norm();
    if (ess - R::one()).abs() > tol {
        return Err(Error::PreconditionFailed(format!(
            "essential part of the normalized operator has modulus {:e}, not 1",
            ess.as_f64()
        )));
    }
    let first = nz.s.tail_cutoff(alpha * R::lit(0.5)) + 1;
    let mut last = None;
    for n in first..first + CANDIDATES {
        match certify(&nz, n, alpha, tol) {
            Ok(c) => return Ok(c),
            Err(e) => last = Some(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::NoWitnessFound("no admissible index".into())))
}

/// [`attainify`] forced to move the entry at `n_star`.
pub fn attainify_at<R: Real>(
    s: &StructuredOperator<R>,
    alpha: R,
    beta: Option<Cx<R>>,
    n_star: usize,
    tol: R,
) -> Result<PerturbationCertificate<R>> {
    let nz = normalize(s, alpha, beta, tol)?;
    certify(&nz, n_star, alpha, tol)
}
