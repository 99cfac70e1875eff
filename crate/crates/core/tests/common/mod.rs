//! Random operator families and an independent dense oracle (nalgebra)
//! shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use spectrakit::dense::DenseMatrix;
use spectrakit::{Complex, Matrix, Operator, TailExpr, TailRule, Term};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn unimodular(rng: &mut impl Rng) -> Complex {
    Complex::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
}

pub fn gaussian_like(rng: &mut impl Rng) -> Complex {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random unitary from Gram-Schmidt on random columns.
pub fn unitary(n: usize, rng: &mut impl Rng) -> Matrix {
    let mut cols: Vec<Vec<Complex>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<Complex> = (0..n).map(|_| gaussian_like(rng)).collect();
        for q in &cols {
            let d: Complex = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (x, y) in v.iter_mut().zip(q) {
                *x -= d * y;
            }
        }
        let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 1e-3 {
            cols.push(v.into_iter().map(|z| z / nrm).collect());
        }
    }
    DenseMatrix::from_fn(n, |i, j| cols[j][i])
}

/// `U diag(eigs) U*` for a random unitary `U`.
pub fn normal_block(eigs: &[Complex], rng: &mut impl Rng) -> Matrix {
    let n = eigs.len();
    let u = unitary(n, rng);
    let d = DenseMatrix::from_fn(n, |i, j| if i == j { eigs[i] } else { c(0.0, 0.0) });
    u.matmul(&d).matmul(&u.adjoint())
}

pub fn hermitian_block(eigs: &[f64], rng: &mut impl Rng) -> Matrix {
    normal_block(&eigs.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>(), rng)
}

pub fn random_block(n: usize, scale: f64, rng: &mut impl Rng) -> Matrix {
    DenseMatrix::from_fn(n, |_, _| gaussian_like(rng) * scale)
}

/// Block embedded at rows/cols `offset..offset + b.dim()` of an `n x n` zero matrix.
pub fn embed(b: &Matrix, offset: usize, n: usize) -> Matrix {
    DenseMatrix::from_fn(n, |i, j| {
        if i >= offset && j >= offset && i - offset < b.dim() && j - offset < b.dim() {
            b[(i - offset, j - offset)]
        } else {
            c(0.0, 0.0)
        }
    })
}

/// Closed-form tail with `N(1e-6)` below roughly a hundred: geometric
/// terms with `r <= 0.8` or algebraic terms with `p >= 3`.
pub fn fast_tail(rng: &mut impl Rng, cmax: f64, sign: Option<f64>) -> TailRule<f64> {
    let k = rng.gen_range(1..=2);
    let mut terms = Vec::new();
    for _ in 0..k {
        let mag = rng.gen_range(0.05..cmax);
        let cc = match sign {
            Some(s) => s * mag,
            None => if rng.gen_bool(0.5) { mag } else { -mag },
        };
        if rng.gen_bool(0.5) {
            terms.push((cc, rng.gen_range(0.3..0.8), rng.gen_range(0.0..2.0)));
        } else {
            terms.push((cc, 1.0, rng.gen_range(3.0..4.0)));
        }
    }
    TailRule::from_terms(&terms).unwrap()
}

/// Tail with complex coefficients (for non-self-adjoint operators).
pub fn complex_tail(rng: &mut impl Rng, cmax: f64) -> TailRule<f64> {
    let terms = (0..rng.gen_range(1..=2))
        .map(|_| Term { c: gaussian_like(rng) * cmax, r: rng.gen_range(0.3..0.8), p: rng.gen_range(0.0..2.0) })
        .collect();
    TailRule::new(TailExpr::terms(terms)).unwrap()
}

/// Operator whose full block (scalar included) is `b`.
pub fn with_block(alpha: Complex, b: Matrix, tail: TailRule<f64>) -> Operator {
    Operator::new(alpha, b.shift(-alpha), tail).unwrap()
}

/// General operator: random complex scalar, block and tail.
pub fn random_operator(rng: &mut impl Rng) -> Operator {
    let n = rng.gen_range(1..=6);
    let alpha = gaussian_like(rng) * rng.gen_range(0.0..1.5);
    let b = random_block(n, rng.gen_range(0.2..2.0), rng);
    let tail = if rng.gen_bool(0.5) { fast_tail(rng, 1.0, None) } else { complex_tail(rng, 0.7) };
    with_block(alpha, b, tail)
}

pub fn to_na(m: &Matrix) -> DMatrix<Complex> {
    DMatrix::from_fn(m.dim(), m.dim(), |i, j| m[(i, j)])
}

/// Largest singular value by nalgebra's SVD.
pub fn na_norm(m: &Matrix) -> f64 {
    if m.dim() == 0 {
        return 0.0;
    }
    to_na(m).singular_values().iter().fold(0.0, |a: f64, &b| a.max(b))
}

pub fn na_min_singular(m: &Matrix) -> f64 {
    to_na(m).singular_values().iter().fold(f64::INFINITY, |a: f64, &b| a.min(b))
}

/// Eigenvalues of a Hermitian matrix by nalgebra, ascending.
pub fn na_hermitian_eigs(m: &Matrix) -> Vec<f64> {
    let mut v: Vec<f64> = to_na(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// `Some(true)` when every tail entry is `u * x_n` with `x_n > 0` and
/// `u = alpha / |alpha|`, `Some(false)` when every `x_n < 0`.
fn tail_side(t: &Operator) -> Option<bool> {
    let a = t.scalar().norm();
    let TailExpr::Terms(sum) = t.tail().entry() else { return None };
    if a == 0.0 || sum.terms().is_empty() {
        return None;
    }
    let u = t.scalar() / a;
    let x: Vec<Complex> = sum.terms().iter().map(|term| term.c * u.conj()).collect();
    if x.iter().any(|z| z.im.abs() > 1e-14 * z.norm()) {
        return None;
    }
    let positive = x[0].re > 0.0;
    x.iter().all(|z| (z.re > 0.0) == positive).then_some(positive)
}

/// Supremum and infimum of `|alpha + d_n|` over `n > from`, found by
/// scanning until the envelope cannot change them by more than `1e-15`;
/// the essential value `|alpha|` is always included. Entries on a known
/// side of `|alpha|` settle the opposite extreme without a scan.
pub fn tail_extremes(t: &Operator, from: usize) -> (f64, f64) {
    let a = t.scalar().norm();
    let side = tail_side(t);
    let (mut hi, mut lo) = (a, a);
    let mut n = from + 1;
    while n < from + 2_000_000 {
        let env = t.envelope_at(n);
        // |a + x| <= a once -2a <= x <= 0
        let hi_done = a + env <= hi || (side == Some(false) && env <= 2.0 * a);
        let lo_done = a - env >= lo || side == Some(true);
        if (hi_done && lo_done) || env <= 1e-15 {
            break;
        }
        let v = t.entry(n, n).norm();
        hi = hi.max(v);
        lo = lo.min(v);
        n += 1;
    }
    (hi, lo)
}

/// `||T||` from the exact split `T = T_N (+) diag(alpha + d_n)`: SVD of the
/// block section plus a scan of the tail.
pub fn oracle_norm(t: &Operator) -> f64 {
    let n = t.block_size();
    let (hi, _) = tail_extremes(t, n);
    if n == 0 {
        hi
    } else {
        na_norm(&t.truncate(n)).max(hi)
    }
}

/// `m(T)` from the same split.
pub fn oracle_min_modulus(t: &Operator) -> f64 {
    let n = t.block_size();
    let (_, lo) = tail_extremes(t, n);
    if n == 0 {
        lo
    } else {
        na_min_singular(&t.truncate(n)).min(lo)
    }
}

/// Dense section large enough to hold the block part of all arguments.
pub fn common_dim(ops: &[&Operator]) -> usize {
    ops.iter().map(|t| t.block_size()).max().unwrap_or(0).max(1)
}

/// Self-adjoint operator: real scalar, Hermitian block, real tail.
pub fn self_adjoint_operator(rng: &mut impl Rng) -> Operator {
    let n = rng.gen_range(1..=6);
    let b = random_block(n, rng.gen_range(0.2..1.5), rng);
    let h = b.add(&b.adjoint()).scale(c(0.5, 0.0));
    let alpha = c(rng.gen_range(-1.5..1.5), 0.0);
    with_block(alpha, h, fast_tail(rng, 1.0, None))
}

/// Normal operator whose tail entries are `u * x_n` with `u` the phase of
/// the scalar and `x_n` of fixed sign `side`.
pub fn normal_operator(rng: &mut impl Rng, side: f64) -> Operator {
    let n = rng.gen_range(1..=5);
    let alpha = unimodular(rng) * rng.gen_range(0.3..2.0);
    let eigs: Vec<Complex> = (0..n).map(|_| gaussian_like(rng) * 2.0).collect();
    let u = alpha / alpha.norm();
    let tail = fast_tail(rng, 0.9 * alpha.norm(), Some(side));
    let tail = TailRule::new(tail.entry().scale(u)).unwrap();
    with_block(alpha, normal_block(&eigs, rng), tail)
}
