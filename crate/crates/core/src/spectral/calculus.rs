//! Functions of structured operators: `|T|`, `sqrt(P)`, `T+ / T-`, the
//! polar factor and the inverse. Each one splits into a dense step on the
//! block and a shifted tail node around the scalar part.

use num_traits::Zero;

use super::extremal::{extremal, min_modulus, Side};
use crate::dense::{polar_isometry, psd_sqrt, hermitian_eigen};
use crate::error::{Error, Result};
use crate::scalar::{phase, re, Real};
use crate::structured::{SignTag, StructuredOperator, TailExpr, TailRule, MAX_BLOCK};

/// `T = V |T|` with `V` a partial isometry and `N(V) = N(T)`.
#[derive(Debug, Clone)]
pub struct PolarPair<R: Real> {
    pub v: StructuredOperator<R>,
    pub modulus: StructuredOperator<R>,
}

/// `|T| = (T*T)^(1/2)`; tail entries `|alpha + d_n| - |alpha|`.
pub fn modulus<R: Real>(t: &StructuredOperator<R>) -> Result<StructuredOperator<R>> {
    let p = t.adjoint()?.multiply(t)?;
    let a = t.scalar().norm();
    let (root, _) = psd_sqrt(&p.shifted_block().hermitian_part())?;
    let entry = TailExpr::AbsShift { shift: t.scalar(), inner: Box::new(t.tail().entry().clone()) };
    StructuredOperator::from_parts(re(a), root.shift(re(-a)), entry)
}

/// Positive square root of a positive operator.
pub fn sqrt_positive<R: Real>(p: &StructuredOperator<R>, tol: R) -> Result<StructuredOperator<R>> {
    if !p.is_self_adjoint(tol) {
        return Err(Error::NotSelfAdjoint);
    }
    let low = extremal(p, Side::Min)?;
    if low.value + low.error < -tol {
        return Err(Error::NotPositive(format!("spectrum reaches {:e}", low.value.as_f64())));
    }
    let s = p.scalar().re.max(R::zero());
    let (root, _) = psd_sqrt(&p.shifted_block().hermitian_part())?;
    let entry = TailExpr::SqrtShift { shift: s, inner: Box::new(p.tail().entry().clone()) };
    StructuredOperator::from_parts(re(s.sqrt()), root.shift(re(-s.sqrt())), entry)
}

enum Settled {
    Positive(usize),
    Negative(usize),
    Zero(usize),
}

/// Index from which `alpha + d_n` keeps one sign, if it fits in a block.
fn settled_sign<R: Real>(t: &StructuredOperator<R>) -> Option<Settled> {
    let s = t.scalar().re;
    let env = t.tail().envelope();
    let start = (t.block_size() + 1).max(env.valid_from);
    let settled = if t.tail().is_zero() {
        Some(Settled::Zero(start))
    } else if s != R::zero() {
        let k = env.first_below(s.abs(), start)?;
        Some(if s > R::zero() { Settled::Positive(k) } else { Settled::Negative(k) })
    } else {
        match t.tail().sign() {
            SignTag::EventuallyNonneg { from, .. } => Some(Settled::Positive(from)),
            SignTag::EventuallyNonpos { from, .. } => Some(Settled::Negative(from)),
            SignTag::IdenticallyZero { from } => Some(Settled::Zero(from)),
            SignTag::Complex => None,
        }
    }?;
    let k = match settled {
        Settled::Positive(k) | Settled::Negative(k) | Settled::Zero(k) => k,
    };
    (k.saturating_sub(1) <= MAX_BLOCK).then_some(settled)
}

/// `T = T+ - T-` with `T+ T- = 0`, both positive.
///
/// Once the sign of `alpha + d_n` settles the tail of each part is either
/// `d_n`, `-d_n` or zero; otherwise exact positive/negative-part nodes are
/// used.
pub fn pos_neg_parts<R: Real>(
    t: &StructuredOperator<R>,
    tol: R,
) -> Result<(StructuredOperator<R>, StructuredOperator<R>)> {
    if !t.is_self_adjoint(tol) {
        return Err(Error::NotSelfAdjoint);
    }
    let s = t.scalar().re;
    let d = t.tail().entry().clone();
    let pos = TailExpr::PosPart { shift: s, inner: Box::new(d.clone()) };
    let neg = TailExpr::NegPart { shift: s, inner: Box::new(d.clone()) };
    let n = t.block_size();
    let (size, plus_tail, minus_tail) = match settled_sign(t) {
        Some(Settled::Positive(k)) => (k - 1, d, TailExpr::zero()),
        Some(Settled::Negative(k)) => (k - 1, TailExpr::zero(), d.scale(re(-R::one()))),
        Some(Settled::Zero(k)) => (k - 1, TailExpr::zero(), TailExpr::zero()),
        None => (n, pos.clone(), neg.clone()),
    };
    // the promoted section is the block plus a diagonal, so only the block
    // needs an eigendecomposition
    let eig = hermitian_eigen(&t.shifted_block().hermitian_part())?;
    let sp = s.max(R::zero());
    let sm = (-s).max(R::zero());
    let mut plus_block = eig.map(|l| l.max(R::zero())).shift(re(-sp)).padded(size.max(n));
    let mut minus_block = eig.map(|l| (-l).max(R::zero())).shift(re(-sm)).padded(size.max(n));
    for k in n + 1..=size {
        plus_block[(k - 1, k - 1)] = pos.eval(k);
        minus_block[(k - 1, k - 1)] = neg.eval(k);
    }
    let plus = StructuredOperator::from_parts(re(sp), plus_block, plus_tail)?;
    let minus = StructuredOperator::from_parts(re(sm), minus_block, minus_tail)?;
    Ok((plus, minus))
}

/// Polar decomposition.
///
/// With `alpha != 0` the phase of `alpha + d_n` converges to that of
/// `alpha`. With `alpha = 0` the tail must be identically zero or strictly
/// signed; otherwise the phase sequence does not converge.
pub fn polar<R: Real>(t: &StructuredOperator<R>, tol: R) -> Result<PolarPair<R>> {
    let modulus = modulus(t)?;
    let a = t.scalar();
    if !a.is_zero() {
        let ph = phase(a);
        let block = polar_isometry(&t.shifted_block(), tol)?.shift(-ph);
        let entry = TailExpr::PhaseShift { shift: a, inner: Box::new(t.tail().entry().clone()) };
        let v = StructuredOperator::from_parts(ph, block, entry)?;
        return Ok(PolarPair { v, modulus });
    }
    let (from, unit) = match t.tail().sign() {
        SignTag::IdenticallyZero { from } => (from, R::zero()),
        SignTag::EventuallyNonneg { from, strict: true } => (from, R::one()),
        SignTag::EventuallyNonpos { from, strict: true } => (from, -R::one()),
        _ => return Err(Error::UnsupportedPolar),
    };
    let tp = t.promote(from.saturating_sub(1).max(t.block_size()))?;
    let block = polar_isometry(&tp.shifted_block(), tol)?.shift(re(-unit));
    let v = StructuredOperator::new(re(unit), block, TailRule::zero())?;
    Ok(PolarPair { v, modulus })
}

/// Inverse of an operator whose minimum modulus clears `tol` with margin.
pub fn invert<R: Real>(t: &StructuredOperator<R>, tol: R) -> Result<StructuredOperator<R>> {
    let m = min_modulus(t, tol)?;
    let margin = m.value - m.error_bound;
    let not_invertible = || Error::NotInvertible { min_modulus: m.value.as_f64(), margin: margin.as_f64() };
    if margin <= tol {
        return Err(not_invertible());
    }
    let a = t.scalar();
    let rule = TailRule::new(TailExpr::RecipShift { shift: a, inner: Box::new(t.tail().entry().clone()) })?;
    let need = rule.envelope().valid_from.saturating_sub(1);
    let tp = t.promote(need.max(t.block_size()))?;
    let inv = tp.shifted_block().inverse(tol).ok_or_else(not_invertible)?;
    let ai = a.inv();
    StructuredOperator::new(ai, inv.shift(-ai), rule)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::scalar::cx;

    fn diag(scalar: f64, terms: &[(f64, f64, f64)]) -> StructuredOperator<f64> {
        StructuredOperator::new(re(scalar), DenseMatrix::zeros(0), TailRule::from_terms(terms).unwrap()).unwrap()
    }

    fn close(a: &StructuredOperator<f64>, b: &StructuredOperator<f64>, m: usize, tol: f64) {
        let d = a.section_distance(b, m);
        assert!(d <= tol, "sections differ by {d:e}");
    }

    #[test]
    fn modulus_examples() {
        let neg = StructuredOperator::<f64>::scalar_multiple(re(-1.0));
        close(&modulus(&neg).unwrap(), &StructuredOperator::identity(), 10, 0.0);
        let m = modulus(&diag(0.0, &[(-1.0, 1.0, 1.0)])).unwrap();
        close(&m, &diag(0.0, &[(1.0, 1.0, 1.0)]), 50, 1e-15);
        let nil = DenseMatrix::from_fn(2, |i, j| if i == 0 && j == 1 { cx(1.0, 0.0) } else { cx(0.0, 0.0) });
        let m = modulus(&StructuredOperator::from_block(nil)).unwrap();
        assert!(m.truncate(2).sub(&DenseMatrix::from_real_diagonal(&[0.0, 1.0])).max_abs() < 1e-12);
    }

    #[test]
    fn parts_examples() {
        let b = DenseMatrix::from_real_diagonal(&[1.0, -2.0]);
        let (p, n) = pos_neg_parts(&StructuredOperator::from_block(b), 1e-9).unwrap();
        assert!(p.truncate(3).sub(&DenseMatrix::from_real_diagonal(&[1.0, 0.0, 0.0])).max_abs() < 1e-12);
        assert!(n.truncate(3).sub(&DenseMatrix::from_real_diagonal(&[0.0, 2.0, 0.0])).max_abs() < 1e-12);

        let (p, n) = pos_neg_parts(&StructuredOperator::<f64>::scalar_multiple(re(-1.0)), 1e-9).unwrap();
        close(&p, &StructuredOperator::zero(), 5, 0.0);
        close(&n, &StructuredOperator::identity(), 5, 0.0);

        let t = diag(0.5, &[(-1.0, 1.0, 1.0)]);
        let (p, n) = pos_neg_parts(&t, 1e-9).unwrap();
        let mut expect = DenseMatrix::zeros(40);
        expect[(0, 0)] = re(0.5);
        assert!(n.truncate(40).sub(&expect).max_abs() < 1e-15);
        assert!(n.tail().is_zero() && n.scalar() == re(0.0));
        assert!(p.truncate(40).sub(&n.truncate(40)).sub(&t.truncate(40)).max_abs() < 1e-15);
    }

    #[test]
    fn polar_examples() {
        let id = StructuredOperator::<f64>::identity();
        let pp = polar(&id, 1e-9).unwrap();
        close(&pp.v, &id, 5, 0.0);
        let pp = polar(&StructuredOperator::scalar_multiple(re(-1.0)), 1e-9).unwrap();
        assert_eq!(pp.v.scalar(), re(-1.0));

        let t = StructuredOperator::new(re(1.0), DenseMatrix::from_real_diagonal(&[-2.0, 1.0]), TailRule::zero()).unwrap();
        let pp = polar(&t, 1e-9).unwrap();
        let mut v = DenseMatrix::identity(6);
        v[(0, 0)] = re(-1.0);
        assert!(pp.v.truncate(6).sub(&v).max_abs() < 1e-12);
        assert!(pp.modulus.truncate(6).sub(&DenseMatrix::from_real_diagonal(&[1.0, 2.0, 1.0, 1.0, 1.0, 1.0])).max_abs() < 1e-12);
    }

    #[test]
    fn polar_refuses_mixed_sign() {
        let t = diag(0.0, &[(1.0, 1.0, 1.0), (-1.0, 1.0, 1.0)]);
        assert!(polar(&t, 1e-9).is_ok());
        let t = StructuredOperator::new(
            re(0.0),
            DenseMatrix::zeros(0),
            TailRule::new(TailExpr::PosPart { shift: 0.0, inner: Box::new(TailExpr::terms(vec![])) }).unwrap(),
        )
        .unwrap();
        assert!(polar(&t, 1e-9).is_ok());
    }

    #[test]
    fn inverse_examples() {
        let id = StructuredOperator::<f64>::identity();
        close(&invert(&id, 1e-9).unwrap(), &id, 5, 0.0);
        let two = StructuredOperator::<f64>::scalar_multiple(re(2.0));
        assert_eq!(invert(&two, 1e-9).unwrap().scalar(), re(0.5));
        let t = diag(2.0, &[(-1.0, 1.0, 1.0)]);
        let inv = invert(&t, 1e-9).unwrap();
        for n in 1..200 {
            let want = 1.0 / (2.0 - 1.0 / n as f64);
            assert!((inv.entry(n, n).re - want).abs() < 1e-12);
        }
        assert!(matches!(invert(&diag(0.0, &[(1.0, 1.0, 1.0)]), 1e-9), Err(Error::NotInvertible { .. })));
    }

    #[test]
    fn sqrt_of_positive() {
        let t = diag(4.0, &[(1.0, 0.5, 0.0)]);
        let r = sqrt_positive(&t, 1e-9).unwrap();
        let sq = r.multiply(&r).unwrap();
        assert!(sq.section_distance(&t, 60) < 1e-12);
        assert!(matches!(sqrt_positive(&diag(-1.0, &[]), 1e-9), Err(Error::NotPositive(_))));
    }
}
