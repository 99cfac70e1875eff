//! Exact closed-form rules for tail diagonal entries.
//!
//! User input is restricted to finite signed sums `sum c_i r_i^n n^(-p_i)`
//! ([`TermSum`]). That family is closed under sums, scalar multiples,
//! products and conjugation, so most of the operator algebra stays inside
//! it. Spectral functions (modulus, square root, inverse, positive and
//! negative parts, polar phase) wrap an inner rule in a shifted node whose
//! envelope and eventual sign are propagated by the rules documented on
//! each variant of [`TailExpr`].

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};

use super::envelope::{DecayEnvelope, EnvelopeTerm, SEARCH_CAP};
use crate::error::{Error, Result};
use crate::scalar::{nearly_real, phase, re, Cx, Real};

/// One closed-form term `c * r^n * n^(-p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term<R: Real> {
    pub c: Cx<R>,
    pub r: R,
    pub p: R,
}

impl<R: Real> Term<R> {
    pub fn real(c: R, r: R, p: R) -> Self {
        Self { c: re(c), r, p }
    }

    #[inline]
    pub fn eval(&self, n: usize) -> Cx<R> {
        let x = R::index(n);
        let geo = if self.r == R::one() { R::one() } else { self.r.powf(x) };
        let alg = if self.p == R::zero() { R::one() } else { x.powf(-self.p) };
        self.c * (geo * alg)
    }

    /// `log |value| - log |c|` at `n`.
    fn log_shape(&self, n: R) -> R {
        n * self.r.ln() - self.p * n.ln()
    }
}

fn dominance<R: Real>(a: &Term<R>, b: &Term<R>) -> Ordering {
    // larger r first, then smaller p
    b.r.partial_cmp(&a.r)
        .unwrap_or(Ordering::Equal)
        .then(a.p.partial_cmp(&b.p).unwrap_or(Ordering::Equal))
}

/// Finite sum of terms, kept merged by `(r, p)` and sorted by dominance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TermSum<R: Real> {
    terms: Vec<Term<R>>,
}

impl<R: Real> TermSum<R> {
    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn new(terms: Vec<Term<R>>) -> Self {
        let mut terms = terms;
        terms.sort_by(dominance);
        let mut merged: Vec<(Term<R>, R)> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some((last, scale)) if last.r == t.r && last.p == t.p => {
                    last.c = last.c + t.c;
                    *scale = scale.max(t.c.norm());
                }
                _ => {
                    let m = t.c.norm();
                    merged.push((t, m));
                }
            }
        }
        let cancel = R::epsilon() * R::lit(16.0);
        let terms = merged
            .into_iter()
            .filter(|(t, scale)| t.c.norm() > cancel * *scale)
            .map(|(t, _)| t)
            .collect();
        Self { terms }
    }

    pub fn terms(&self) -> &[Term<R>] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, n: usize) -> Cx<R> {
        self.terms.iter().fold(Cx::zero(), |acc, t| acc + t.eval(n))
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut v = self.terms.clone();
        v.extend_from_slice(&other.terms);
        Self::new(v)
    }

    pub fn scaled(&self, k: Cx<R>) -> Self {
        Self::new(self.terms.iter().map(|t| Term { c: t.c * k, ..*t }).collect())
    }

    pub fn times(&self, other: &Self) -> Self {
        let mut v = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                v.push(Term { c: a.c * b.c, r: a.r * b.r, p: a.p + b.p });
            }
        }
        Self::new(v)
    }

    pub fn conj(&self) -> Self {
        Self { terms: self.terms.iter().map(|t| Term { c: t.c.conj(), ..*t }).collect() }
    }

    pub fn is_real(&self) -> bool {
        let tol = R::epsilon() * R::lit(64.0);
        self.terms.iter().all(|t| nearly_real(t.c, tol))
    }

    pub fn envelope(&self) -> DecayEnvelope<R> {
        DecayEnvelope {
            terms: self.terms.iter().map(|t| EnvelopeTerm { c: t.c.norm(), r: t.r, p: t.p }).collect(),
            valid_from: 1,
        }
        .normalized()
    }

    /// Dominant-term sign analysis.
    ///
    /// The dominant term has the largest `r`, ties broken by the smallest
    /// `p`. Its sign holds strictly from the first index where the summed
    /// subdominant-to-dominant ratio drops below one inside the region where
    /// every ratio is already decreasing. Sums whose coefficients all share
    /// the dominant sign are strictly signed from the first index.
    pub fn sign(&self) -> SignTag {
        let Some(dom) = self.terms.first() else {
            return SignTag::IdenticallyZero { from: 1 };
        };
        if !self.is_real() {
            return SignTag::Complex;
        }
        let positive = dom.c.re > R::zero();
        let same_sign = self.terms.iter().all(|t| (t.c.re > R::zero()) == positive);
        let from = match if same_sign { Some(1) } else { self.dominance_index() } {
            Some(n) => n,
            None => return SignTag::Complex,
        };
        if positive {
            SignTag::EventuallyNonneg { from, strict: true }
        } else {
            SignTag::EventuallyNonpos { from, strict: true }
        }
    }

    fn dominance_index(&self) -> Option<usize> {
        let dom = self.terms[0];
        let rest = &self.terms[1..];
        if rest.is_empty() {
            return Some(1);
        }
        let cd = dom.c.norm();
        // ratio_i(n) = k_i * rho_i^n * n^q_i, decreasing once n >= q_i / ln(1/rho_i)
        let mut mono = R::one();
        for t in rest {
            let q = dom.p - t.p;
            if t.r < dom.r && q > R::zero() {
                let rate = (dom.r / t.r).ln();
                mono = mono.max((q / rate).ceil());
            }
        }
        let mono = mono.to_usize().filter(|&m| m <= SEARCH_CAP)?;
        let ratio = |n: usize| -> R {
            let x = R::index(n);
            let base = dom.log_shape(x);
            rest.iter()
                .map(|t| (t.c.norm() / cd) * (t.log_shape(x) - base).exp())
                .sum::<R>()
        };
        if ratio(mono) < R::one() {
            return Some(mono);
        }
        let mut lo = mono;
        let mut hi = mono.max(2);
        while ratio(hi) >= R::one() {
            lo = hi;
            hi = hi.checked_mul(2)?;
            if hi > SEARCH_CAP {
                return None;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ratio(mid) < R::one() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }
}

/// Eventual sign of a tail rule, valid from the carried index on.
///
/// `strict` means the entries are nonzero (strictly signed) from `from` on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignTag {
    EventuallyNonneg { from: usize, strict: bool },
    EventuallyNonpos { from: usize, strict: bool },
    IdenticallyZero { from: usize },
    /// Not real, or sign not decidable.
    Complex,
}

impl SignTag {
    pub fn from_index(&self) -> Option<usize> {
        match *self {
            SignTag::EventuallyNonneg { from, .. }
            | SignTag::EventuallyNonpos { from, .. }
            | SignTag::IdenticallyZero { from } => Some(from),
            SignTag::Complex => None,
        }
    }

    pub fn negate(self) -> Self {
        match self {
            SignTag::EventuallyNonneg { from, strict } => SignTag::EventuallyNonpos { from, strict },
            SignTag::EventuallyNonpos { from, strict } => SignTag::EventuallyNonneg { from, strict },
            other => other,
        }
    }

    pub fn later(self, n: usize) -> Self {
        match self {
            SignTag::EventuallyNonneg { from, strict } => SignTag::EventuallyNonneg { from: from.max(n), strict },
            SignTag::EventuallyNonpos { from, strict } => SignTag::EventuallyNonpos { from: from.max(n), strict },
            SignTag::IdenticallyZero { from } => SignTag::IdenticallyZero { from: from.max(n) },
            SignTag::Complex => SignTag::Complex,
        }
    }

    /// Sign of `a + b`.
    pub fn sum(self, other: Self) -> Self {
        use SignTag::*;
        match (self, other) {
            (IdenticallyZero { from }, t) | (t, IdenticallyZero { from }) => t.later(from),
            (EventuallyNonneg { from: a, strict: s }, EventuallyNonneg { from: b, strict: t }) => {
                EventuallyNonneg { from: a.max(b), strict: s || t }
            }
            (EventuallyNonpos { from: a, strict: s }, EventuallyNonpos { from: b, strict: t }) => {
                EventuallyNonpos { from: a.max(b), strict: s || t }
            }
            _ => Complex,
        }
    }

    /// Sign of `a * b`.
    pub fn product(self, other: Self) -> Self {
        use SignTag::*;
        match (self, other) {
            (IdenticallyZero { from }, _) | (_, IdenticallyZero { from }) => IdenticallyZero { from },
            (Complex, _) | (_, Complex) => Complex,
            (EventuallyNonneg { from: a, strict: s }, EventuallyNonneg { from: b, strict: t })
            | (EventuallyNonpos { from: a, strict: s }, EventuallyNonpos { from: b, strict: t }) => {
                EventuallyNonneg { from: a.max(b), strict: s && t }
            }
            (EventuallyNonneg { from: a, strict: s }, EventuallyNonpos { from: b, strict: t })
            | (EventuallyNonpos { from: a, strict: s }, EventuallyNonneg { from: b, strict: t }) => {
                EventuallyNonpos { from: a.max(b), strict: s && t }
            }
        }
    }

    fn scaled<R: Real>(self, k: Cx<R>) -> Self {
        if k.is_zero() {
            return SignTag::IdenticallyZero { from: 1 };
        }
        if let SignTag::IdenticallyZero { .. } = self {
            return self;
        }
        if k.im != R::zero() {
            return SignTag::Complex;
        }
        if k.re > R::zero() {
            self
        } else {
            self.negate()
        }
    }
}

/// Closed-form rule `n -> d_n` for tail diagonal entries.
#[derive(Debug, Clone, PartialEq)]
pub enum TailExpr<R: Real> {
    Terms(TermSum<R>),
    Sum(Vec<TailExpr<R>>),
    Product(Box<TailExpr<R>>, Box<TailExpr<R>>),
    Scale(Cx<R>, Box<TailExpr<R>>),
    Conj(Box<TailExpr<R>>),
    /// `|s + x| - |s|`; envelope of `x` (1-Lipschitz).
    AbsShift { shift: Cx<R>, inner: Box<TailExpr<R>> },
    /// `sqrt(max(s + x, 0)) - sqrt(s)` for `s >= 0`; envelope `env/sqrt(s)`,
    /// or the term-wise square root when `s = 0`.
    SqrtShift { shift: R, inner: Box<TailExpr<R>> },
    /// `1/(s + x) - 1/s`; envelope `2 env / |s|^2` once `env <= |s|/2`.
    RecipShift { shift: Cx<R>, inner: Box<TailExpr<R>> },
    /// `max(s + x, 0) - max(s, 0)`; envelope of `x`.
    PosPart { shift: R, inner: Box<TailExpr<R>> },
    /// `max(-(s + x), 0) - max(-s, 0)`; envelope of `x`.
    NegPart { shift: R, inner: Box<TailExpr<R>> },
    /// `phase(s + x) - phase(s)` for `s != 0`; envelope `2 env / |s|`.
    PhaseShift { shift: Cx<R>, inner: Box<TailExpr<R>> },
}

impl<R: Real> Default for TailExpr<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Real> TailExpr<R> {
    pub fn zero() -> Self {
        TailExpr::Terms(TermSum::zero())
    }

    pub fn terms(terms: Vec<Term<R>>) -> Self {
        TailExpr::Terms(TermSum::new(terms))
    }

    /// Structural zero (after simplification).
    pub fn is_zero(&self) -> bool {
        matches!(self, TailExpr::Terms(t) if t.is_zero())
    }

    pub fn as_terms(&self) -> Option<&TermSum<R>> {
        match self {
            TailExpr::Terms(t) => Some(t),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (TailExpr::Terms(a), TailExpr::Terms(b)) => TailExpr::Terms(a.plus(b)),
            (a, b) if b.is_zero() => a.clone(),
            (a, b) if a.is_zero() => b.clone(),
            (a, b) => {
                let mut parts = Vec::new();
                for x in [a, b] {
                    match x {
                        TailExpr::Sum(v) => parts.extend(v.iter().cloned()),
                        other => parts.push(other.clone()),
                    }
                }
                // fold every closed-form piece into one
                let mut closed = TermSum::zero();
                let mut rest = Vec::new();
                for p in parts {
                    match p {
                        TailExpr::Terms(t) => closed = closed.plus(&t),
                        other => rest.push(other),
                    }
                }
                if !closed.is_zero() {
                    rest.insert(0, TailExpr::Terms(closed));
                }
                match rest.len() {
                    0 => Self::zero(),
                    1 => rest.pop().unwrap_or_default(),
                    _ => TailExpr::Sum(rest),
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(re(-R::one())))
    }

    pub fn scale(&self, k: Cx<R>) -> Self {
        if k.is_zero() || self.is_zero() {
            return Self::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        match self {
            TailExpr::Terms(t) => TailExpr::Terms(t.scaled(k)),
            TailExpr::Scale(k2, x) => x.scale(k * *k2),
            TailExpr::Sum(v) => v.iter().fold(Self::zero(), |acc, x| acc.add(&x.scale(k))),
            other => TailExpr::Scale(k, Box::new(other.clone())),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        match (self, other) {
            (TailExpr::Terms(a), TailExpr::Terms(b)) => TailExpr::Terms(a.times(b)),
            (a, b) => TailExpr::Product(Box::new(a.clone()), Box::new(b.clone())),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            TailExpr::Terms(t) => TailExpr::Terms(t.conj()),
            TailExpr::Conj(x) => (**x).clone(),
            TailExpr::Sum(v) => TailExpr::Sum(v.iter().map(|x| x.conj()).collect()),
            TailExpr::Product(a, b) => a.conj().mul(&b.conj()),
            TailExpr::Scale(k, x) => x.conj().scale(k.conj()),
            TailExpr::AbsShift { .. }
            | TailExpr::SqrtShift { .. }
            | TailExpr::PosPart { .. }
            | TailExpr::NegPart { .. } => self.clone(),
            TailExpr::RecipShift { shift, inner } => {
                TailExpr::RecipShift { shift: shift.conj(), inner: Box::new(inner.conj()) }
            }
            TailExpr::PhaseShift { shift, inner } => {
                TailExpr::PhaseShift { shift: shift.conj(), inner: Box::new(inner.conj()) }
            }
        }
    }

    /// Entry value at index `n` (1-based).
    pub fn eval(&self, n: usize) -> Cx<R> {
        match self {
            TailExpr::Terms(t) => t.eval(n),
            TailExpr::Sum(v) => v.iter().fold(Cx::zero(), |acc, x| acc + x.eval(n)),
            TailExpr::Product(a, b) => a.eval(n) * b.eval(n),
            TailExpr::Scale(k, x) => *k * x.eval(n),
            TailExpr::Conj(x) => x.eval(n).conj(),
            TailExpr::AbsShift { shift, inner } => re(abs_shift(*shift, inner.eval(n))),
            TailExpr::SqrtShift { shift, inner } => {
                let x = inner.eval(n).re;
                let v = *shift + x;
                if v <= R::zero() {
                    re(-shift.sqrt())
                } else {
                    re(x / (v.sqrt() + shift.sqrt()))
                }
            }
            TailExpr::RecipShift { shift, inner } => {
                let x = inner.eval(n);
                -x / (*shift * (*shift + x))
            }
            TailExpr::PosPart { shift, inner } => {
                let (s, x) = (*shift, inner.eval(n).re);
                re(match (s > R::zero(), s + x > R::zero()) {
                    (true, true) => x,
                    (true, false) => -s,
                    (false, true) => s + x,
                    (false, false) => R::zero(),
                })
            }
            TailExpr::NegPart { shift, inner } => {
                let (s, x) = (*shift, inner.eval(n).re);
                re(match (s < R::zero(), s + x < R::zero()) {
                    (true, true) => -x,
                    (true, false) => s,
                    (false, true) => -(s + x),
                    (false, false) => R::zero(),
                })
            }
            TailExpr::PhaseShift { shift, inner } => {
                let x = inner.eval(n);
                let (a, w) = (shift.norm(), (*shift + x).norm());
                if a == R::zero() || w == R::zero() {
                    return phase(*shift + x) - phase(*shift);
                }
                // (s + x)/|s + x| - s/|s| = (x |s| - s (|s + x| - |s|)) / (|s + x| |s|)
                (x * a - *shift * abs_shift(*shift, x)) / (w * a)
            }
        }
    }

    /// Structural realness (terms real within a few ulps).
    pub fn is_real(&self) -> bool {
        match self {
            TailExpr::Terms(t) => t.is_real(),
            TailExpr::Sum(v) => v.iter().all(|x| x.is_real()),
            TailExpr::Product(a, b) => a.is_real() && b.is_real(),
            TailExpr::Scale(k, x) => nearly_real(*k, R::epsilon() * R::lit(64.0)) && x.is_real(),
            TailExpr::Conj(x) => x.is_real(),
            TailExpr::AbsShift { .. }
            | TailExpr::SqrtShift { .. }
            | TailExpr::PosPart { .. }
            | TailExpr::NegPart { .. } => true,
            TailExpr::RecipShift { shift, inner } | TailExpr::PhaseShift { shift, inner } => {
                nearly_real(*shift, R::epsilon() * R::lit(64.0)) && inner.is_real()
            }
        }
    }

    /// Certified decay envelope; `None` when a shifted node cannot reach its
    /// validity region within the search cap.
    pub fn envelope(&self) -> Option<DecayEnvelope<R>> {
        Some(match self {
            TailExpr::Terms(t) => t.envelope(),
            TailExpr::Sum(v) => {
                let mut acc = DecayEnvelope::zero();
                for x in v {
                    acc = acc.plus(&x.envelope()?);
                }
                acc
            }
            TailExpr::Product(a, b) => a.envelope()?.times(&b.envelope()?),
            TailExpr::Scale(k, x) => x.envelope()?.scaled(k.norm()),
            TailExpr::Conj(x) => x.envelope()?,
            TailExpr::AbsShift { inner, .. }
            | TailExpr::PosPart { inner, .. }
            | TailExpr::NegPart { inner, .. } => inner.envelope()?,
            TailExpr::SqrtShift { shift, inner } => {
                let e = inner.envelope()?;
                if *shift > R::zero() {
                    e.scaled(R::one() / shift.sqrt())
                } else {
                    e.sqrt_termwise()
                }
            }
            TailExpr::RecipShift { shift, inner } => {
                let e = inner.envelope()?;
                let s = shift.norm();
                if s == R::zero() {
                    return None;
                }
                let half = s * R::lit(0.5);
                let nv = if e.is_zero() { 1 } else { e.first_below(half, e.valid_from)? };
                e.scaled(R::lit(2.0) / (s * s)).starting_at(nv)
            }
            TailExpr::PhaseShift { shift, inner } => {
                let s = shift.norm();
                if s == R::zero() {
                    return None;
                }
                inner.envelope()?.scaled(R::lit(2.0) / s)
            }
        })
    }

    /// Index from which `env(n) < level` (used where a shift dominates).
    fn settles_below(&self, level: R) -> Option<usize> {
        let e = self.envelope()?;
        if e.is_zero() {
            return Some(e.valid_from);
        }
        e.first_below(level, e.valid_from)
    }

    /// Eventual sign of the entries.
    pub fn sign(&self) -> SignTag {
        use SignTag::*;
        match self {
            TailExpr::Terms(t) => t.sign(),
            TailExpr::Sum(v) => v.iter().fold(IdenticallyZero { from: 1 }, |acc, x| acc.sum(x.sign())),
            TailExpr::Product(a, b) => a.sign().product(b.sign()),
            TailExpr::Scale(k, x) => x.sign().scaled(*k),
            TailExpr::Conj(x) => x.sign(),
            TailExpr::AbsShift { shift, inner } => {
                if shift.is_zero() {
                    return match inner.sign() {
                        IdenticallyZero { from } => IdenticallyZero { from },
                        EventuallyNonneg { from, strict: true } | EventuallyNonpos { from, strict: true } => {
                            EventuallyNonneg { from, strict: true }
                        }
                        _ => EventuallyNonneg { from: 1, strict: false },
                    };
                }
                // sign(|s+x| - |s|) = sign(2 Re(conj(s) x) + |x|^2)
                match inner.as_terms() {
                    Some(x) => {
                        let cross = x.scaled(shift.conj()).plus(&x.conj().scaled(*shift));
                        cross.plus(&x.conj().times(x)).sign()
                    }
                    None => Complex,
                }
            }
            TailExpr::SqrtShift { shift, inner } => {
                let t = inner.sign();
                if *shift > R::zero() {
                    t
                } else {
                    clamp_nonneg(t)
                }
            }
            TailExpr::RecipShift { shift, inner } => {
                if !nearly_real(*shift, R::epsilon() * R::lit(64.0)) {
                    return Complex;
                }
                let Some(nv) = inner.settles_below(shift.re.abs() * R::lit(0.5)) else {
                    return Complex;
                };
                // -x / (s (s + x)) with s (s + x) > 0 past nv
                inner.sign().later(nv).negate()
            }
            TailExpr::PosPart { shift, inner } => {
                let s = *shift;
                if s == R::zero() {
                    return clamp_nonneg(inner.sign());
                }
                let Some(nv) = inner.settles_below(s.abs()) else {
                    return Complex;
                };
                if s > R::zero() {
                    inner.sign().later(nv)
                } else {
                    IdenticallyZero { from: nv }
                }
            }
            TailExpr::NegPart { shift, inner } => {
                let s = *shift;
                if s == R::zero() {
                    return clamp_nonneg(inner.sign().negate());
                }
                let Some(nv) = inner.settles_below(s.abs()) else {
                    return Complex;
                };
                if s < R::zero() {
                    inner.sign().negate().later(nv)
                } else {
                    IdenticallyZero { from: nv }
                }
            }
            TailExpr::PhaseShift { shift, inner } => {
                if !self.is_real() || shift.is_zero() {
                    return Complex;
                }
                match inner.settles_below(shift.norm()) {
                    Some(nv) => IdenticallyZero { from: nv },
                    None => Complex,
                }
            }
        }
    }

    /// Nodes other than closed-form sums present in the tree.
    pub fn depth(&self) -> usize {
        match self {
            TailExpr::Terms(_) => 0,
            TailExpr::Sum(v) => 1 + v.iter().map(|x| x.depth()).max().unwrap_or(0),
            TailExpr::Product(a, b) => 1 + a.depth().max(b.depth()),
            TailExpr::Scale(_, x) | TailExpr::Conj(x) => 1 + x.depth(),
            TailExpr::AbsShift { inner, .. }
            | TailExpr::SqrtShift { inner, .. }
            | TailExpr::RecipShift { inner, .. }
            | TailExpr::PosPart { inner, .. }
            | TailExpr::NegPart { inner, .. }
            | TailExpr::PhaseShift { inner, .. } => 1 + inner.depth(),
        }
    }
}

/// `|s + x| - |s|` without cancellation.
fn abs_shift<R: Real>(s: Cx<R>, x: Cx<R>) -> R {
    let den = (s + x).norm() + s.norm();
    if den == R::zero() {
        return R::zero();
    }
    (R::lit(2.0) * (s.conj() * x).re + x.norm_sqr()) / den
}

/// Sign of `max(x, 0)` given the sign of `x`.
fn clamp_nonneg(t: SignTag) -> SignTag {
    use SignTag::*;
    match t {
        EventuallyNonneg { from, strict } => EventuallyNonneg { from, strict },
        EventuallyNonpos { from, .. } | IdenticallyZero { from } => IdenticallyZero { from },
        Complex => EventuallyNonneg { from: 1, strict: false },
    }
}

fn fmt_cx<R: Real>(f: &mut fmt::Formatter<'_>, z: Cx<R>) -> fmt::Result {
    if z.im == R::zero() {
        write!(f, "{}", z.re)
    } else {
        write!(f, "({}{:+}i)", z.re, z.im)
    }
}

impl<R: Real> fmt::Display for TailExpr<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailExpr::Terms(t) => {
                if t.is_zero() {
                    return write!(f, "0");
                }
                for (i, term) in t.terms().iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    fmt_cx(f, term.c)?;
                    if term.r != R::one() {
                        write!(f, "*{}^n", term.r)?;
                    }
                    if term.p != R::zero() {
                        write!(f, "*n^-{}", term.p)?;
                    }
                }
                Ok(())
            }
            TailExpr::Sum(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            TailExpr::Product(a, b) => write!(f, "({a})*({b})"),
            TailExpr::Scale(k, x) => {
                fmt_cx(f, *k)?;
                write!(f, "*({x})")
            }
            TailExpr::Conj(x) => write!(f, "conj({x})"),
            TailExpr::AbsShift { shift, inner } => {
                write!(f, "abs_shift[")?;
                fmt_cx(f, *shift)?;
                write!(f, "]({inner})")
            }
            TailExpr::SqrtShift { shift, inner } => write!(f, "sqrt_shift[{shift}]({inner})"),
            TailExpr::RecipShift { shift, inner } => {
                write!(f, "recip_shift[")?;
                fmt_cx(f, *shift)?;
                write!(f, "]({inner})")
            }
            TailExpr::PosPart { shift, inner } => write!(f, "pos_part[{shift}]({inner})"),
            TailExpr::NegPart { shift, inner } => write!(f, "neg_part[{shift}]({inner})"),
            TailExpr::PhaseShift { shift, inner } => {
                write!(f, "phase_shift[")?;
                fmt_cx(f, *shift)?;
                write!(f, "]({inner})")
            }
        }
    }
}

/// Tail entry rule with its certified envelope and eventual sign.
#[derive(Debug, Clone, PartialEq)]
pub struct TailRule<R: Real> {
    entry: TailExpr<R>,
    envelope: DecayEnvelope<R>,
    sign: SignTag,
}

impl<R: Real> Default for TailRule<R> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<R: Real> TailRule<R> {
    pub fn zero() -> Self {
        Self { entry: TailExpr::zero(), envelope: DecayEnvelope::zero(), sign: SignTag::IdenticallyZero { from: 1 } }
    }

    /// Compiles an expression, deriving its envelope and sign tag.
    pub fn new(entry: TailExpr<R>) -> Result<Self> {
        let envelope = entry.envelope().ok_or(Error::BlockTooLarge { requested: SEARCH_CAP, limit: SEARCH_CAP })?;
        for t in &envelope.terms {
            t.validate()?;
        }
        let sign = entry.sign();
        Ok(Self { entry, envelope, sign })
    }

    /// User-facing closed form `sum c_i r_i^n n^(-p_i)` with real signed `c_i`.
    pub fn from_terms(terms: &[(R, R, R)]) -> Result<Self> {
        for &(c, r, p) in terms {
            EnvelopeTerm::new(c.abs(), r, p)?;
        }
        Self::new(TailExpr::terms(terms.iter().map(|&(c, r, p)| Term::real(c, r, p)).collect()))
    }

    pub fn entry(&self) -> &TailExpr<R> {
        &self.entry
    }

    pub fn envelope(&self) -> &DecayEnvelope<R> {
        &self.envelope
    }

    pub fn sign(&self) -> SignTag {
        self.sign
    }

    #[inline]
    pub fn eval(&self, n: usize) -> Cx<R> {
        self.entry.eval(n)
    }

    pub fn is_zero(&self) -> bool {
        self.entry.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.entry.is_real()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cx;

    fn harmonic() -> TailExpr<f64> {
        TailExpr::terms(vec![Term::real(1.0, 1.0, 1.0)])
    }

    #[test]
    fn cancellation_is_identically_zero() {
        let a = harmonic();
        let b = harmonic().scale(re(-1.0));
        let s = a.add(&b);
        assert!(s.is_zero());
        assert_eq!(s.sign(), SignTag::IdenticallyZero { from: 1 });
        for n in 1..=100 {
            assert_eq!(s.eval(n), Cx::zero());
        }
    }

    #[test]
    fn dominant_term_sign() {
        // -2/n + 1/n^2 < 0 for every n >= 1
        let x = TailExpr::terms(vec![Term::real(-2.0, 1.0, 1.0), Term::real(1.0, 1.0, 2.0)]);
        assert_eq!(x.sign(), SignTag::EventuallyNonpos { from: 1, strict: true });
        // 1/n - 5/n^2: positive once n > 5
        let y = TailExpr::terms(vec![Term::real(1.0, 1.0, 1.0), Term::real(-5.0, 1.0, 2.0)]);
        assert_eq!(y.sign(), SignTag::EventuallyNonneg { from: 6, strict: true });
        for n in 6..200 {
            assert!(y.eval(n).re > 0.0);
        }
    }

    #[test]
    fn same_sign_terms_are_signed_from_the_start() {
        // 0.1/n^3 + 5/n^3.5: the second term dominates until n ~ 2500
        let x = TailExpr::terms(vec![Term::real(0.1, 1.0, 3.0), Term::real(5.0, 1.0, 3.5)]);
        assert_eq!(x.sign(), SignTag::EventuallyNonneg { from: 1, strict: true });
    }

    #[test]
    fn shifted_nodes_evaluate_without_cancellation() {
        let x = TailExpr::terms(vec![Term::real(1e-12, 1.0, 1.0)]);
        let s = 1e6;
        let abs = TailExpr::AbsShift { shift: re(s), inner: Box::new(x.clone()) };
        let sqrt = TailExpr::SqrtShift { shift: s, inner: Box::new(x.clone()) };
        let ph = TailExpr::PhaseShift { shift: Cx::new(0.0, s), inner: Box::new(x.clone()) };
        for n in [1usize, 7, 1000] {
            let d = 1e-12 / n as f64;
            assert!((abs.eval(n).re - d).abs() <= 1e-15 * d);
            assert!((sqrt.eval(n).re - d / (2.0 * s.sqrt())).abs() <= 1e-12 * d);
            // phase of i s + d moves by d / s to first order
            assert!((ph.eval(n).re - d / s).abs() <= 1e-12 * d / s);
        }
    }

    #[test]
    fn geometric_beats_algebraic_eventually() {
        // -0.5^n + 10 * 0.25^n * n^-0: negative from where 10 * 0.5^n < 1
        let x = TailExpr::terms(vec![Term::real(-1.0, 0.5, 0.0), Term::real(10.0, 0.25, 0.0)]);
        let SignTag::EventuallyNonpos { from, strict: true } = x.sign() else { panic!() };
        assert_eq!(from, 4);
        for n in from..60 {
            assert!(x.eval(n).re < 0.0);
        }
        assert!(x.eval(from - 1).re >= 0.0);
    }

    #[test]
    fn mixed_ratio_needs_monotone_region() {
        // n^3 * 0.9^n vs 1/n: ratio increases before it decays
        let x = TailExpr::terms(vec![Term::real(-1.0, 1.0, 1.0), Term::real(50.0, 0.9, 0.0)]);
        let SignTag::EventuallyNonpos { from, .. } = x.sign() else { panic!() };
        for n in from..from + 500 {
            assert!(x.eval(n).re < 0.0, "n={n}");
        }
    }

    #[test]
    fn complex_coefficients_are_unsigned() {
        let x = TailExpr::terms(vec![Term { c: cx(0.0, 1.0), r: 1.0, p: 1.0 }]);
        assert_eq!(x.sign(), SignTag::Complex);
        assert!(!x.is_real());
    }

    #[test]
    fn abs_shift_sign_via_square_difference() {
        // |1 - 1/n| - 1 < 0
        let x = harmonic().scale(re(-1.0));
        let a = TailExpr::AbsShift { shift: re(1.0), inner: Box::new(x) };
        assert_eq!(a.sign(), SignTag::EventuallyNonpos { from: 1, strict: true });
    }

    #[test]
    fn recip_shift_envelope_and_sign() {
        // 1/(2 - 1/n) - 1/2 > 0
        let x = harmonic().scale(re(-1.0));
        let r = TailExpr::RecipShift { shift: re(2.0), inner: Box::new(x) };
        let env = r.envelope().unwrap();
        for n in env.valid_from..env.valid_from + 300 {
            assert!(r.eval(n).norm() <= env.eval(n) * (1.0 + 1e-12));
        }
        assert!(matches!(r.sign(), SignTag::EventuallyNonneg { strict: true, .. }));
    }

    #[test]
    fn pos_neg_parts_of_shifted_harmonic() {
        // 0.5 - 1/n: negative at n=1, zero at n=2, positive after
        let x = harmonic().scale(re(-1.0));
        let pos = TailExpr::PosPart { shift: 0.5, inner: Box::new(x.clone()) };
        let neg = TailExpr::NegPart { shift: 0.5, inner: Box::new(x) };
        assert_eq!(neg.eval(1), re(0.5));
        assert_eq!(neg.eval(3), re(0.0));
        assert_eq!(pos.eval(1), re(-0.5));
        assert!(matches!(neg.sign(), SignTag::IdenticallyZero { from: 3 }));
    }

    #[test]
    fn envelope_soundness_sampled() {
        let x = TailExpr::terms(vec![Term::real(0.7, 0.95, 0.5), Term::real(-0.3, 1.0, 1.5)]);
        let exprs = vec![
            x.clone(),
            x.mul(&x.conj()),
            TailExpr::AbsShift { shift: cx(0.3, -0.4), inner: Box::new(x.clone()) },
            TailExpr::SqrtShift { shift: 0.0, inner: Box::new(x.mul(&x)) },
            TailExpr::SqrtShift { shift: 2.0, inner: Box::new(x.clone()) },
            TailExpr::PhaseShift { shift: cx(1.0, 1.0), inner: Box::new(x.clone()) },
            TailExpr::RecipShift { shift: cx(-0.2, 0.0), inner: Box::new(x.clone()) },
        ];
        for e in exprs {
            let env = e.envelope().unwrap();
            for n in env.valid_from..env.valid_from + 200 {
                assert!(e.eval(n).norm() <= env.eval(n) * (1.0 + 1e-10) + 1e-15, "{e} at {n}");
            }
        }
    }
}
