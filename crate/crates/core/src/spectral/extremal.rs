
use super::{Attainment, Witness};
use crate::dense::hermitian_eigen;
use crate::error::Result;
use crate::scalar::{re, Real};
use crate::structured::{FinVector, SignTag, StructuredOperator};

/// Largest number of tail entries evaluated by a single scan.
pub const SCAN_LIMIT: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Side {
    Max,
    Min,
}

/// Extreme point of the spectrum of a self-adjoint operator.
///
/// `value` is within `error` of the true supremum (infimum); `decision`
/// says whether it is attained, with an eigenvector witness.
#[derive(Debug, Clone)]
pub(crate) struct Extremum<R: Real> {
    pub value: R,
    pub error: R,
    pub decision: Attainment<R>,
}

enum Rest<R> {
    /// Every further entry is exactly `s`, first at this index.
    Attained(usize),
    /// Every further entry is `<= s`; strictly if the flag is set.
    Below(bool),
    /// Every further entry is `<= bound`.
    Bounded(R),
}

/// Supremum or infimum of the spectrum of a self-adjoint `p`.
pub(crate) fn extremal<R: Real>(p: &StructuredOperator<R>, side: Side) -> Result<Extremum<R>> {
    if side == Side::Min {
        let neg = p.scale(re(-R::one()))?;
        let mut e = extremal(&neg, Side::Max)?;
        e.value = -e.value;
        if let Attainment::Yes(w) = &mut e.decision {
            w.value = -w.value;
        }
        return Ok(e);
    }
    let n = p.block_size();
    let s = p.scalar().re;

    // (value, error, witness)
    let mut cand: Option<(R, R, FinVector<R>)> = None;
    if n > 0 {
        let eig = hermitian_eigen(&p.shifted_block())?;
        if let Some((v, k)) = eig.max() {
            cand = Some((v, eig.radius(), FinVector::from_dense(&eig.vector(k))));
        }
    }
    let block_best = cand.as_ref().map(|c| c.0);

    let env = p.tail().envelope();
    let first = n + 1;
    let favorable = match p.tail().sign() {
        SignTag::IdenticallyZero { from } => Some((from.max(first), Rest::Attained(from.max(first)))),
        SignTag::EventuallyNonpos { from, strict } => Some((from.max(first), Rest::Below(strict))),
        _ => None,
    }
    .filter(|(from, _)| *from - first <= SCAN_LIMIT);

    let mut tail_best: Option<(R, usize)> = None;
    let consider = |k: usize, tail_best: &mut Option<(R, usize)>| {
        let v = s + p.tail().eval(k).re;
        if tail_best.map_or(true, |(b, _)| v > b) {
            *tail_best = Some((v, k));
        }
    };
    let rest = match favorable {
        Some((from, rest)) => {
            for k in first..from {
                consider(k, &mut tail_best);
            }
            rest
        }
        None => {
            let mut k = first;
            loop {
                let best = match (block_best, tail_best) {
                    (Some(a), Some((b, _))) => Some(a.max(b)),
                    (a, b) => a.or(b.map(|x| x.0)),
                };
                let bound = s + env.eval(k);
                if best.is_some_and(|b| bound <= b) || k - first >= SCAN_LIMIT {
                    break Rest::Bounded(bound);
                }
                consider(k, &mut tail_best);
                k += 1;
            }
        }
    };

    if let Some((v, k)) = tail_best {
        if cand.as_ref().map_or(true, |c| v > c.0) {
            cand = Some((v, R::zero(), FinVector::basis(k)));
        }
    }

    let yes = |value: R, error: R, vector: FinVector<R>| Extremum {
        value,
        error,
        decision: Attainment::Yes(Witness::new(vector, re(value))),
    };
    Ok(match (rest, cand) {
        (Rest::Attained(m), Some((v, e, w))) => {
            if v >= s {
                yes(v, e, w)
            } else if v + e >= s {
                // either way the maximum of an attained set
                Extremum { value: s, error: e, decision: Attainment::Yes(Witness::new(FinVector::basis(m), re(s))) }
            } else {
                yes(s, R::zero(), FinVector::basis(m))
            }
        }
        (Rest::Attained(m), None) => yes(s, R::zero(), FinVector::basis(m)),
        (Rest::Below(strict), Some((v, e, w))) => {
            if v - e >= s {
                yes(v, e, w)
            } else if v + e < s {
                let decision = if strict { Attainment::No } else { Attainment::Undecided };
                Extremum { value: s, error: R::zero(), decision }
            } else {
                Extremum { value: v.max(s), error: e, decision: Attainment::Undecided }
            }
        }
        (Rest::Below(strict), None) => {
            let decision = if strict { Attainment::No } else { Attainment::Undecided };
            Extremum { value: s, error: R::zero(), decision }
        }
        (Rest::Bounded(u), Some((v, e, w))) => {
            if v - e >= u {
                yes(v, e, w)
            } else {
                let value = v.max(s);
                Extremum { value, error: (u - value).max(e), decision: Attainment::Undecided }
            }
        }
        (Rest::Bounded(u), None) => Extremum { value: s, error: u - s, decision: Attainment::Undecided },
    })
}

/// `|sqrt(a') - sqrt(a)|` for `|a' - a| <= e`.
fn sqrt_error<R: Real>(a: R, e: R) -> R {
    if e == R::zero() {
        return R::zero();
    }
    let r = a.max(R::zero()).sqrt();
    if r > R::zero() {
        e.sqrt().min(e / r)
    } else {
        e.sqrt()
    }
}

/// Operator norm with an attainment decision.
#[derive(Debug, Clone)]
pub struct NormResult<R: Real> {
    pub value: R,
    pub error_bound: R,
    pub attainment: Attainment<R>,
}

/// Minimum modulus `inf ||Tx||` over unit `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinModulus<R: Real> {
    pub value: R,
    pub error_bound: R,
}

fn gram<R: Real>(t: &StructuredOperator<R>) -> Result<StructuredOperator<R>> {
    t.adjoint()?.multiply(t)
}

/// `||T||` from the top of `sigma(T*T)`.
pub fn operator_norm<R: Real>(t: &StructuredOperator<R>, _tol: R) -> Result<NormResult<R>> {
    let p = gram(t)?;
    let e = extremal(&p, Side::Max)?;
    let value = e.value.max(R::zero()).sqrt();
    let error_bound = sqrt_error(e.value, e.error);
    let attainment = match e.decision {
        Attainment::Yes(w) => {
            let achieved = t.apply(&w.vector).norm();
            Attainment::Yes(Witness::new(w.vector, re(achieved)))
        }
        other => other,
    };
    Ok(NormResult { value, error_bound, attainment })
}

/// `m(T)` from the bottom of `sigma(T*T)`.
pub fn min_modulus<R: Real>(t: &StructuredOperator<R>, _tol: R) -> Result<MinModulus<R>> {
    let p = gram(t)?;
    let e = extremal(&p, Side::Min)?;
    Ok(MinModulus { value: e.value.max(R::zero()).sqrt(), error_bound: sqrt_error(e.value, e.error) })
}

/// `m_e(T) = |alpha|`: the essential spectrum of `|T|` is `{|alpha|}`.
pub fn essential_min_modulus<R: Real>(t: &StructuredOperator<R>) -> R {
    t.scalar().norm()
}
