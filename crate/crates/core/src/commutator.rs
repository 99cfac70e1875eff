//! Explicit maximizers for generalized derivations.
//!
//! * single: `||EX - XE|| = 2||E||` with `X = zz* - ww*`, `w = Ez/||Ez||`,
//!   for a maximizing `z` of `E` with `<Ez, z> = 0`;
//! * pair: `||SX - XT|| = ||S|| + ||T||` for phase-matched maximizers;
//! * sandwich: `||SXT|| = ||S|| ||T||` with `X = <., T eta> z / ||T eta||`.

use num_traits::{One, Zero};

use crate::analysis::classify;
use crate::dense::{hermitian_eigen, DenseMatrix};
use crate::error::{Error, Result};
use crate::scalar::{re, Cx, Real};
use crate::spectral::{operator_norm, Witness, SCAN_LIMIT};
use crate::structured::{FinVector, StructuredOperator};

/// Tail basis vectors collected from an infinite top eigenspace.
const TOP_TAIL_CAP: usize = 8;
/// Angles sampled on the boundary of a numerical range.
const BOUNDARY_SAMPLES: usize = 64;

/// Result of a maximizer construction.
#[derive(Debug, Clone)]
pub struct MaximizerReport<R: Real> {
    pub x: StructuredOperator<R>,
    pub achieved: R,
    pub target: R,
    pub witnesses: Vec<Witness<R>>,
}

fn postcondition<R: Real>(achieved: R, target: R, tol: R) -> Result<()> {
    if (achieved - target).abs() > tol * R::one().max(target) {
        return Err(Error::PostconditionFailed { achieved: achieved.as_f64(), target: target.as_f64() });
    }
    Ok(())
}

/// Finite-rank operator `sum u_k v_k*` on finitely supported vectors.
pub fn finite_rank<R: Real>(pairs: &[(&FinVector<R>, &FinVector<R>)]) -> StructuredOperator<R> {
    let m = pairs.iter().map(|(u, v)| u.max_index().max(v.max_index())).max().unwrap_or(0);
    let mut b = DenseMatrix::zeros(m);
    for (u, v) in pairs {
        b = b.add(&DenseMatrix::outer(&u.to_dense(m), &v.to_dense(m)));
    }
    StructuredOperator::from_block(b)
}

/// Orthonormal vectors spanning the top eigenspace of `E*E` (a finite
/// sample of it when the space is infinite-dimensional).
pub fn top_space<R: Real>(e: &StructuredOperator<R>, norm: R, tol: R) -> Result<Vec<FinVector<R>>> {
    let p = e.adjoint()?.multiply(e)?;
    let top = norm * norm;
    let slack = tol.max(R::epsilon() * R::lit(64.0)) * R::one().max(top);
    let mut out = Vec::new();
    if p.block_size() > 0 {
        let eig = hermitian_eigen(&p.shifted_block().hermitian_part())?;
        for k in (0..eig.dim()).rev() {
            if eig.values[k] >= top - slack {
                out.push(FinVector::from_dense(&eig.vector(k)));
            }
        }
    }
    let s = p.scalar().re;
    let first = p.block_size() + 1;
    let mut count = 0;
    let mut n = first;
    while count < TOP_TAIL_CAP && n - first < SCAN_LIMIT {
        if s + p.envelope_at(n) < top - slack {
            break;
        }
        if s + p.tail().eval(n).re >= top - slack {
            out.push(FinVector::basis(n));
            count += 1;
        }
        n += 1;
    }
    Ok(out)
}

fn quad<R: Real>(c: &DenseMatrix<R>, x: &[Cx<R>], y: &[Cx<R>]) -> Cx<R> {
    // x* C y
    let cy = c.mul_vec(y);
    x.iter().zip(&cy).fold(Cx::zero(), |acc, (a, b)| acc + a.conj() * *b)
}

fn normalize<R: Real>(x: Vec<Cx<R>>) -> Vec<Cx<R>> {
    let n = x.iter().map(|z| z.norm_sqr()).sum::<R>().sqrt();
    x.into_iter().map(|z| z / n).collect()
}

fn cross<R: Real>(a: Cx<R>, b: Cx<R>) -> R {
    a.re * b.im - a.im * b.re
}

/// Unit `y` in `span{x1, x2}` with `y*Cy` on the segment from `z1 = x1*Cx1`
/// to `z2 = x2*Cx2` at fraction `sigma` (up to a positive radial factor
/// when `x1, x2` are not orthogonal).
fn two_point<R: Real>(c: &DenseMatrix<R>, x1: &[Cx<R>], x2: &[Cx<R>], sigma: R) -> Vec<Cx<R>> {
    let z1 = quad(c, x1, x1);
    let z2 = quad(c, x2, x2);
    let d = z2 - z1;
    let u = d.conj() * quad(c, x1, x2);
    let v = d.conj() * quad(c, x2, x1);
    // Im(conj(d) (e^{i th} u' + e^{-i th} v')) = 0
    let theta = (-(u.im + v.im)).atan2(u.re - v.re);
    let rot = Cx::from_polar(R::one(), theta);
    let y = |t: R| -> Vec<Cx<R>> { x1.iter().zip(x2).map(|(a, b)| *a * t.cos() + rot * *b * t.sin()).collect() };
    let frac = |t: R| -> R {
        let yt = y(t);
        let f = quad(c, &yt, &yt);
        (d.conj() * (f - z1)).re / d.norm_sqr()
    };
    let mut lo = R::zero();
    let mut hi = R::FRAC_PI_2();
    for _ in 0..200 {
        let mid = (lo + hi) * R::lit(0.5);
        if frac(mid) < sigma {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= R::epsilon() {
            break;
        }
    }
    normalize(y((lo + hi) * R::lit(0.5)))
}

/// Unit `y` with `y*Cy = 0` (within `tol`), if `0` lies in the numerical
/// range of `C`.
pub fn numerical_range_zero<R: Real>(c: &DenseMatrix<R>, tol: R) -> Result<Option<Vec<Cx<R>>>> {
    let k = c.dim();
    let scale = R::one().max(c.max_abs());
    let eps = tol * scale;
    let unit = |i: usize| -> Vec<Cx<R>> { (0..k).map(|j| if i == j { Cx::one() } else { Cx::zero() }).collect() };
    if let Some(i) = (0..k).find(|&i| c[(i, i)].norm() <= eps) {
        return Ok(Some(unit(i)));
    }
    let mut pts: Vec<(Cx<R>, Vec<Cx<R>>)> = Vec::with_capacity(BOUNDARY_SAMPLES);
    for j in 0..BOUNDARY_SAMPLES {
        let phi = R::TAU() * R::index(j) / R::index(BOUNDARY_SAMPLES);
        let rot = Cx::from_polar(R::one(), -phi);
        let h = c.scale(rot).hermitian_part();
        let eig = hermitian_eigen(&h)?;
        let (top, idx) = eig.max().unwrap_or((R::zero(), 0));
        if top < -eps {
            return Ok(None);
        }
        let x = eig.vector(idx);
        let z = quad(c, &x, &x);
        if z.norm() <= eps {
            return Ok(Some(x));
        }
        pts.push((z, x));
    }
    let check = |y: Vec<Cx<R>>| -> Option<Vec<Cx<R>>> { (quad(c, &y, &y).norm() <= eps).then_some(y) };
    // 0 on a segment between two boundary points
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let (a, b) = (pts[i].0, pts[j].0);
            if cross(a, b).abs() <= eps * (a.norm() + b.norm()) && (a.conj() * b).re < R::zero() {
                let sigma = a.norm() / (a.norm() + b.norm());
                if let Some(y) = check(two_point(c, &pts[i].1, &pts[j].1, sigma)) {
                    return Ok(Some(y));
                }
            }
        }
    }
    // 0 inside a fan triangle (z0, zj, zj+1) of the sampled boundary
    let (c0, x0) = (pts[0].0, &pts[0].1);
    for j in 1..pts.len() - 1 {
        let (a, xa) = (pts[j].0, &pts[j].1);
        let (b, xb) = (pts[j + 1].0, &pts[j + 1].1);
        let s1 = cross(a - c0, -c0);
        let s2 = cross(b - a, -a);
        let s3 = cross(c0 - b, -b);
        let inside = (s1 >= -eps && s2 >= -eps && s3 >= -eps) || (s1 <= eps && s2 <= eps && s3 <= eps);
        if !inside {
            continue;
        }
        // ray from c0 through 0 meets [a, b] at a + s (b - a)
        let den = cross(b - a, c0);
        if den.abs() <= R::epsilon() {
            continue;
        }
        let s = (-cross(a, c0) / den).max(R::zero()).min(R::one());
        let yab = two_point(c, xa, xb, s);
        let p = quad(c, &yab, &yab);
        let sigma = c0.norm() / (c0.norm() + p.norm());
        if let Some(y) = check(two_point(c, x0, &yab, sigma)) {
            return Ok(Some(y));
        }
    }
    Ok(None)
}

fn combine<R: Real>(basis: &[FinVector<R>], y: &[Cx<R>]) -> FinVector<R> {
    basis.iter().zip(y).fold(FinVector::zero(), |acc, (q, c)| acc.add(&q.scale(*c)))
}

/// Maximizer of `X -> ||EX - XE||` over contractions for hyponormal,
/// norm-attaining `E` with a maximizing vector orthogonal to its image.
pub fn maximizer_single<R: Real>(e: &StructuredOperator<R>, tol: R) -> Result<MaximizerReport<R>> {
    if !classify(e, tol)?.hyponormal {
        return Err(Error::PreconditionFailed("operator is not hyponormal".into()));
    }
    let nr = operator_norm(e, tol)?;
    let Some(first) = nr.attainment.witness().cloned() else {
        return Err(Error::NormNotAttained);
    };
    let norm = nr.value;
    let target = norm * R::lit(2.0);
    let zeta = if norm <= tol {
        first.vector
    } else {
        let basis = top_space(e, norm, tol)?;
        let m = basis.len();
        let images: Vec<FinVector<R>> = basis.iter().map(|q| e.apply(q)).collect();
        let comp = DenseMatrix::from_fn(m, |i, j| images[j].inner(&basis[i]));
        let y = numerical_range_zero(&comp, tol)?.ok_or_else(|| {
            Error::PreconditionFailed("no maximizing vector is orthogonal to its image".into())
        })?;
        combine(&basis, &y).normalized().ok_or(Error::NormNotAttained)?
    };
    let ez = e.apply(&zeta);
    let inner = ez.inner(&zeta);
    if inner.norm() > tol * R::one().max(norm) {
        return Err(Error::PreconditionFailed(format!("<Ez, z> = {:e} is not zero", inner.norm().as_f64())));
    }
    let x = match ez.normalized() {
        Some(w) => {
            let neg = w.scale(re(-R::one()));
            finite_rank(&[(&zeta, &zeta), (&neg, &w)])
        }
        None => finite_rank(&[(&zeta, &zeta)]),
    };
    let achieved = operator_norm(&e.multiply(&x)?.sub(&x.multiply(e)?)?, tol)?.value;
    postcondition(achieved, target, tol)?;
    let w = Witness::new(zeta, re(ez.norm()));
    Ok(MaximizerReport { x, achieved, target, witnesses: vec![w] })
}

struct Maximizer<R: Real> {
    norm: R,
    vector: FinVector<R>,
    /// `<A v, v> / ||A||`
    phase: Cx<R>,
}

fn maximizers<R: Real>(a: &StructuredOperator<R>, tol: R) -> Result<Vec<Maximizer<R>>> {
    if !classify(a, tol)?.hyponormal {
        return Err(Error::PreconditionFailed("operator is not hyponormal".into()));
    }
    let nr = operator_norm(a, tol)?;
    let Some(w) = nr.attainment.witness().cloned() else {
        return Err(Error::NormNotAttained);
    };
    if nr.value <= tol {
        return Err(Error::PreconditionFailed("operator norm is zero".into()));
    }
    let mut vs = vec![w.vector];
    vs.extend(top_space(a, nr.value, tol)?);
    Ok(vs
        .into_iter()
        .map(|v| {
            let phase = a.apply(&v).inner(&v) / nr.value;
            Maximizer { norm: nr.value, vector: v, phase }
        })
        .collect())
}

/// Maximizer of `X -> ||SX - XT||` for hyponormal, norm-attaining `S, T`
/// with maximizing vectors satisfying `<Sz,z>/||S|| = -<Te,e>/||T||`.
pub fn maximizer_pair<R: Real>(
    s: &StructuredOperator<R>,
    t: &StructuredOperator<R>,
    tol: R,
) -> Result<MaximizerReport<R>> {
    let ms = maximizers(s, tol)?;
    let mt = maximizers(t, tol)?;
    let pick = ms
        .iter()
        .flat_map(|a| mt.iter().map(move |b| (a, b)))
        .find(|(a, b)| (a.phase + b.phase).norm() <= tol);
    let Some((zs, et)) = pick else {
        let (a, b) = (&ms[0], &mt[0]);
        return Err(Error::PhaseConditionFailed {
            lhs_re: a.phase.re.as_f64(),
            lhs_im: a.phase.im.as_f64(),
            rhs_re: -b.phase.re.as_f64(),
            rhs_im: -b.phase.im.as_f64(),
        });
    };
    let (ns, nt) = (zs.norm, et.norm);
    let zeta = &zs.vector;
    let eta = &et.vector;
    let t_eta = t.apply(eta);
    let a = t_eta.inner(eta);
    let resid = t_eta.sub(&eta.scale(a));
    let tau = resid.norm();
    let x = if tau <= tol * nt {
        finite_rank(&[(zeta, eta)])
    } else {
        let h = resid.scale(re(R::one() / tau));
        let s_zeta = s.apply(zeta);
        let xh = s_zeta.scale(re(-nt / ns)).sub(&zeta.scale(a)).scale(re(R::one() / tau));
        finite_rank(&[(zeta, eta), (&xh, &h)])
    };
    let achieved = operator_norm(&s.multiply(&x)?.sub(&x.multiply(t)?)?, tol)?.value;
    let target = ns + nt;
    postcondition(achieved, target, tol)?;
    let witnesses = vec![Witness::new(zeta.clone(), zs.phase * ns), Witness::new(eta.clone(), et.phase * nt)];
    Ok(MaximizerReport { x, achieved, target, witnesses })
}

/// `X = <., T eta> z / ||T eta||` for maximizers `z` of `S` and `eta` of
/// `T`, so that `||SXT|| = ||S|| ||T||` with `||X|| = 1`.
pub fn maximizer_sandwich<R: Real>(
    s: &StructuredOperator<R>,
    t: &StructuredOperator<R>,
    tol: R,
) -> Result<MaximizerReport<R>> {
    let ns = operator_norm(s, tol)?;
    let nt = operator_norm(t, tol)?;
    let (Some(zs), Some(et)) = (ns.attainment.witness().cloned(), nt.attainment.witness().cloned()) else {
        return Err(Error::NormNotAttained);
    };
    let t_eta = t.apply(&et.vector);
    let x = match t_eta.normalized() {
        Some(u) => finite_rank(&[(&zs.vector, &u)]),
        None => finite_rank(&[(&zs.vector, &et.vector)]),
    };
    let achieved = operator_norm(&s.multiply(&x)?.multiply(t)?, tol)?.value;
    let target = ns.value * nt.value;
    postcondition(achieved, target, tol)?;
    Ok(MaximizerReport { x, achieved, target, witnesses: vec![zs, et] })
}
