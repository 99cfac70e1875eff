use num_traits::Zero;

use crate::dense::{hermitian_eigen, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::{re, Real};
use crate::spectral::{modulus, pos_neg_parts, SCAN_LIMIT};
use crate::structured::{SignTag, StructuredOperator, MAX_BLOCK};

/// Number of offending eigenvalues reported with a `NotAN` verdict.
pub const OFFENDING_LISTED: usize = 8;

/// `(K, F, alpha)` with `K >= 0` compact, `F >= 0` finite rank, `KF = 0`,
/// `F <= alpha I`, representing `K - F + alpha I`.
#[derive(Debug, Clone)]
pub struct ANTriple<R: Real> {
    pub k: StructuredOperator<R>,
    pub f: StructuredOperator<R>,
    pub alpha: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NotANReason {
    InfinitelyManyBelowEssential,
    /// Kept for completeness; the structured class never needs it because
    /// every failure shows up as eigenvalues accumulating below `alpha`.
    NormNotAttainedOnSubspace,
}

#[derive(Debug, Clone)]
pub enum ANVerdict<R: Real> {
    InAN(ANTriple<R>),
    NotAN { reason: NotANReason, offending: Vec<R> },
    Undecided(String),
}

impl<R: Real> ANVerdict<R> {
    pub fn kind(&self) -> &'static str {
        match self {
            ANVerdict::InAN(_) => "in_an",
            ANVerdict::NotAN { .. } => "not_an",
            ANVerdict::Undecided(_) => "undecided",
        }
    }

    pub fn triple(&self) -> Option<&ANTriple<R>> {
        match self {
            ANVerdict::InAN(t) => Some(t),
            _ => None,
        }
    }
}

/// Decides membership in AN and extracts the triple of the positive part.
///
/// Positive input is analysed directly; anything else through `|T|`, since
/// `T` is AN exactly when `|T|` is. With `P` positive and scalar `s`, the
/// compact remainder `A = P - s I` splits as `A+ - A-`; `P` is AN iff `A-`
/// has finite rank, i.e. iff only finitely many entries sit below `s`.
pub fn an_check<R: Real>(t: &StructuredOperator<R>, tol: R) -> Result<ANVerdict<R>> {
    let positive = t.is_self_adjoint(tol) && super::classify(t, tol)?.positive;
    let p = if positive { t.clone() } else { modulus(t)? };
    let s = p.scalar().re;
    let a = StructuredOperator::new(re(R::zero()), p.block().clone(), p.tail().clone())?;
    let sign = a.tail().sign();
    match sign {
        SignTag::EventuallyNonneg { from, .. } | SignTag::IdenticallyZero { from } => {
            if from.saturating_sub(1) > MAX_BLOCK {
                return Ok(ANVerdict::Undecided(format!("sign settles only at index {from}")));
            }
            let (k, f) = pos_neg_parts(&a, tol)?;
            if !f.tail().is_zero() || !f.scalar().is_zero() {
                return Ok(ANVerdict::Undecided("negative part did not reduce to a block".into()));
            }
            let f_top = top_eigenvalue(f.block())?;
            if f_top > s + tol {
                return Err(Error::InvalidTriple(format!("F exceeds alpha: {:e} > {:e}", f_top.as_f64(), s.as_f64())));
            }
            Ok(ANVerdict::InAN(ANTriple { k, f, alpha: s }))
        }
        SignTag::EventuallyNonpos { strict: true, from } => {
            let mut offending = Vec::new();
            if p.block_size() > 0 {
                let e = hermitian_eigen(&p.shifted_block().hermitian_part())?;
                offending.extend(e.values.iter().copied().filter(|&v| v < s - tol));
            }
            // entries from `from` on are certified negative even once `s + d_n`
            // rounds to `s`; earlier ones are scanned only up to SCAN_LIMIT
            // before jumping straight to `from`
            let first = p.block_size() + 1;
            let mut n = first;
            while offending.len() < OFFENDING_LISTED {
                if n < from && n - first >= SCAN_LIMIT {
                    n = from;
                }
                let d = p.tail().eval(n).re;
                if n >= from || d < R::zero() {
                    offending.push(s + d);
                }
                n += 1;
            }
            offending.truncate(OFFENDING_LISTED);
            Ok(ANVerdict::NotAN { reason: NotANReason::InfinitelyManyBelowEssential, offending })
        }
        SignTag::EventuallyNonpos { strict: false, .. } => {
            Ok(ANVerdict::Undecided("tail is eventually nonpositive but may vanish".into()))
        }
        SignTag::Complex => Ok(ANVerdict::Undecided("eventual sign of the tail is not decidable".into())),
    }
}

/// Largest eigenvalue of the Hermitian part of a dense leading block
/// followed by a diagonal, as promoted sections are. Only the coupled leading
/// part goes through the eigensolver.
fn top_eigenvalue<R: Real>(m: &DenseMatrix<R>) -> Result<R> {
    let n = m.dim();
    let coupled = (0..n)
        .rev()
        .find(|&j| (0..j).any(|i| !m[(i, j)].is_zero() || !m[(j, i)].is_zero()))
        .map_or(0, |j| j + 1);
    let mut top = R::zero();
    if coupled > 0 {
        top = hermitian_eigen(&m.leading(coupled).hermitian_part())?.values[coupled - 1];
    }
    Ok((coupled..n).map(|k| m[(k, k)].re).fold(top, R::max))
}

/// `K - F + alpha I`.
pub fn an_reassemble<R: Real>(triple: &ANTriple<R>) -> Result<StructuredOperator<R>> {
    if !triple.f.tail().is_zero() || !triple.f.scalar().is_zero() {
        return Err(Error::InvalidTriple("F must be a finite block (zero tail and scalar)".into()));
    }
    if !triple.k.scalar().is_zero() {
        return Err(Error::InvalidTriple("K must be compact (zero scalar)".into()));
    }
    if !(triple.alpha >= R::zero()) {
        return Err(Error::InvalidTriple(format!("alpha must be nonnegative, got {:e}", triple.alpha.as_f64())));
    }
    triple.k.sub(&triple.f)?.add(&StructuredOperator::scalar_multiple(re(triple.alpha)))
}
