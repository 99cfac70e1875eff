//! Certified decay bounds for tail diagonal entries.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest index any doubling search will visit.
pub const SEARCH_CAP: usize = 1 << 48;

/// One bound term `c * r^n * n^(-p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeTerm<R: Real> {
    pub c: R,
    pub r: R,
    pub p: R,
}

impl<R: Real> EnvelopeTerm<R> {
    pub fn new(c: R, r: R, p: R) -> Result<Self> {
        let t = Self { c, r, p };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.c.is_finite()
            && self.r.is_finite()
            && self.p.is_finite()
            && self.c >= R::zero()
            && self.r > R::zero()
            && self.r <= R::one()
            && self.p >= R::zero();
        if !ok {
            return Err(Error::MalformedEnvelope { c: self.c.as_f64(), r: self.r.as_f64(), p: self.p.as_f64() });
        }
        if self.r == R::one() && self.p == R::zero() && self.c > R::zero() {
            return Err(Error::NonvanishingTail { c: self.c.as_f64() });
        }
        Ok(())
    }

    #[inline]
    pub fn eval(&self, n: usize) -> R {
        if self.c == R::zero() {
            return R::zero();
        }
        let x = R::index(n);
        let geo = if self.r == R::one() { R::one() } else { self.r.powf(x) };
        let alg = if self.p == R::zero() { R::one() } else { x.powf(-self.p) };
        self.c * geo * alg
    }
}

/// `env(n) = sum of terms`, a valid bound for `n >= valid_from`.
///
/// Every term is nonincreasing in `n`, so `env` is monotone and any
/// threshold crossing can be located by doubling plus bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayEnvelope<R: Real> {
    pub terms: Vec<EnvelopeTerm<R>>,
    pub valid_from: usize,
}

impl<R: Real> DecayEnvelope<R> {
    pub fn zero() -> Self {
        Self { terms: Vec::new(), valid_from: 1 }
    }

    pub fn new(terms: Vec<EnvelopeTerm<R>>, valid_from: usize) -> Result<Self> {
        for t in &terms {
            t.validate()?;
        }
        Ok(Self { terms, valid_from: valid_from.max(1) }.normalized())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.c == R::zero())
    }

    pub fn eval(&self, n: usize) -> R {
        self.terms.iter().map(|t| t.eval(n)).sum()
    }

    /// Merges terms sharing `(r, p)` and drops zero coefficients.
    pub(crate) fn normalized(mut self) -> Self {
        self.terms.retain(|t| t.c > R::zero());
        self.terms.sort_by(|a, b| {
            b.r.partial_cmp(&a.r)
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.p.partial_cmp(&b.p).unwrap_or(std::cmp::Ordering::Equal))
        });
        let mut merged: Vec<EnvelopeTerm<R>> = Vec::with_capacity(self.terms.len());
        for t in self.terms {
            match merged.last_mut() {
                Some(last) if last.r == t.r && last.p == t.p => last.c = last.c + t.c,
                _ => merged.push(t),
            }
        }
        self.terms = merged;
        self
    }

    pub(crate) fn scaled(&self, k: R) -> Self {
        let k = k.abs();
        Self {
            terms: self.terms.iter().map(|t| EnvelopeTerm { c: t.c * k, ..*t }).collect(),
            valid_from: self.valid_from,
        }
        .normalized()
    }

    pub(crate) fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms, valid_from: self.valid_from.max(other.valid_from) }.normalized()
    }

    pub(crate) fn times(&self, other: &Self) -> Self {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(EnvelopeTerm { c: a.c * b.c, r: a.r * b.r, p: a.p + b.p });
            }
        }
        Self { terms, valid_from: self.valid_from.max(other.valid_from) }.normalized()
    }

    /// `sqrt(sum a_i) <= sum sqrt(a_i)`.
    pub(crate) fn sqrt_termwise(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| EnvelopeTerm { c: t.c.sqrt(), r: t.r.sqrt(), p: t.p * R::lit(0.5) })
                .collect(),
            valid_from: self.valid_from,
        }
        .normalized()
    }

    pub(crate) fn starting_at(mut self, n: usize) -> Self {
        self.valid_from = self.valid_from.max(n);
        self
    }

    /// Smallest `n >= start` with `env(n) < eps` (hence for all larger `n`).
    /// `None` past [`SEARCH_CAP`].
    pub fn first_below(&self, eps: R, start: usize) -> Option<usize> {
        let start = start.max(1);
        if self.eval(start) < eps {
            return Some(start);
        }
        let mut lo = start;
        let mut hi = start.max(2);
        loop {
            if self.eval(hi) < eps {
                break;
            }
            lo = hi;
            hi = hi.checked_mul(2)?;
            if hi > SEARCH_CAP {
                return None;
            }
        }
        // env(lo) >= eps > env(hi)
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if self.eval(mid) < eps {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_terms() {
        assert!(matches!(EnvelopeTerm::new(1.0, 1.5, 0.0), Err(Error::MalformedEnvelope { .. })));
        assert!(matches!(EnvelopeTerm::new(-1.0, 0.5, 0.0), Err(Error::MalformedEnvelope { .. })));
        assert!(matches!(EnvelopeTerm::new(1.0, 0.0, 1.0), Err(Error::MalformedEnvelope { .. })));
        assert!(matches!(EnvelopeTerm::new(1.0, 1.0, 0.0), Err(Error::NonvanishingTail { .. })));
        assert!(EnvelopeTerm::new(0.0, 1.0, 0.0).is_ok());
    }

    #[test]
    fn geometric_crossing() {
        let env = DecayEnvelope::new(vec![EnvelopeTerm::new(1.0, 0.5, 0.0).unwrap()], 1).unwrap();
        // 0.5^10 < 1e-3 <= 0.5^9
        assert_eq!(env.first_below(1e-3, 1), Some(10));
    }

    #[test]
    fn harmonic_crossing() {
        let env = DecayEnvelope::new(vec![EnvelopeTerm::new(1.0, 1.0, 1.0).unwrap()], 1).unwrap();
        assert_eq!(env.first_below(0.01, 1), Some(101));
        assert_eq!(env.first_below(0.01, 500), Some(500));
    }

    #[test]
    fn merge_and_product() {
        let a = DecayEnvelope::new(
            vec![EnvelopeTerm::new(1.0, 1.0, 1.0).unwrap(), EnvelopeTerm::new(2.0, 1.0, 1.0).unwrap()],
            1,
        )
        .unwrap();
        assert_eq!(a.terms.len(), 1);
        assert_eq!(a.terms[0].c, 3.0);
        let sq = a.times(&a);
        assert_eq!(sq.terms, vec![EnvelopeTerm { c: 9.0, r: 1.0, p: 2.0 }]);
    }
}
