use num_traits::{One, Zero};

use super::envelope::SEARCH_CAP;
use super::tail::{TailExpr, TailRule};
use super::vector::FinVector;
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::scalar::{cx, re, Cx, Real};

/// Largest dense block any operation is allowed to create.
pub const MAX_BLOCK: usize = 4096;

/// `T = scalar * I + B + D_tail` on l2.
///
/// `B` acts on coordinates `1..=N`; for `n > N`, `T e_n = (scalar + d_n) e_n`
/// with `d_n` given by the tail rule. The block and the tail are exactly
/// orthogonal-reducing, and the tail envelope is valid from `N + 1` on.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuredOperator<R: Real> {
    scalar: Cx<R>,
    block: DenseMatrix<R>,
    tail: TailRule<R>,
}

impl<R: Real> StructuredOperator<R> {
    /// Validated constructor. If the tail envelope only becomes valid past
    /// `N + 1`, the block is extended by [`promote`](Self::promote).
    pub fn new(scalar: Cx<R>, block: DenseMatrix<R>, tail: TailRule<R>) -> Result<Self> {
        for z in block.entries() {
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::PreconditionFailed("non-finite block entry".into()));
            }
        }
        if !(scalar.re.is_finite() && scalar.im.is_finite()) {
            return Err(Error::PreconditionFailed("non-finite scalar".into()));
        }
        let op = Self { scalar, block, tail };
        let need = op.tail.envelope().valid_from.saturating_sub(1);
        if need > op.block_size() {
            op.promote(need)
        } else {
            Ok(op)
        }
    }

    pub fn zero() -> Self {
        Self::scalar_multiple(Cx::zero())
    }

    pub fn identity() -> Self {
        Self::scalar_multiple(Cx::one())
    }

    pub fn scalar_multiple(alpha: Cx<R>) -> Self {
        Self { scalar: alpha, block: DenseMatrix::zeros(0), tail: TailRule::zero() }
    }

    /// Finite-rank operator supported on the first `n` coordinates.
    pub fn from_block(block: DenseMatrix<R>) -> Self {
        Self { scalar: Cx::zero(), block, tail: TailRule::zero() }
    }

    /// Compact diagonal `diag(d_1, d_2, ...)`.
    pub fn diagonal(tail: TailRule<R>) -> Result<Self> {
        Self::new(Cx::zero(), DenseMatrix::zeros(0), tail)
    }

    pub fn scalar(&self) -> Cx<R> {
        self.scalar
    }

    pub fn block(&self) -> &DenseMatrix<R> {
        &self.block
    }

    pub fn block_size(&self) -> usize {
        self.block.dim()
    }

    pub fn tail(&self) -> &TailRule<R> {
        &self.tail
    }

    /// `(scalar I + B)` restricted to the block coordinates.
    pub fn shifted_block(&self) -> DenseMatrix<R> {
        self.block.shift(self.scalar)
    }

    /// Diagonal entry `scalar + d_n` for a tail index `n > N`.
    pub fn tail_value(&self, n: usize) -> Cx<R> {
        debug_assert!(n > self.block_size());
        self.scalar + self.tail.eval(n)
    }

    /// Matrix element `<T e_j, e_i>` (1-based).
    pub fn entry(&self, i: usize, j: usize) -> Cx<R> {
        let n = self.block_size();
        if i <= n && j <= n {
            let b = self.block[(i - 1, j - 1)];
            if i == j {
                b + self.scalar
            } else {
                b
            }
        } else if i == j {
            self.tail_value(i)
        } else {
            Cx::zero()
        }
    }

    /// Absorbs tail indices `N+1..=size` into the block.
    pub fn promote(&self, size: usize) -> Result<Self> {
        let n = self.block_size();
        if size <= n {
            return Ok(self.clone());
        }
        if size > MAX_BLOCK {
            return Err(Error::BlockTooLarge { requested: size, limit: MAX_BLOCK });
        }
        let mut block = self.block.padded(size);
        for k in (n + 1)..=size {
            block[(k - 1, k - 1)] = self.tail.eval(k);
        }
        Ok(Self { scalar: self.scalar, block, tail: self.tail.clone() })
    }

    /// Promotes both operands to the larger block size.
    pub fn align(&self, other: &Self) -> Result<(Self, Self)> {
        let n = self.block_size().max(other.block_size());
        Ok((self.promote(n)?, other.promote(n)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let tail = TailRule::new(a.tail.entry().add(b.tail.entry()))?;
        Self::new(a.scalar + b.scalar, a.block.add(&b.block), tail)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(re(-R::one()))?)
    }

    pub fn scale(&self, c: Cx<R>) -> Result<Self> {
        let tail = TailRule::new(self.tail.entry().scale(c))?;
        Self::new(self.scalar * c, self.block.scale(c), tail)
    }

    /// Composition `self * other` (apply `other` first).
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let block = b
            .block
            .scale(a.scalar)
            .add(&a.block.scale(b.scalar))
            .add(&a.block.matmul(&b.block));
        let da = a.tail.entry();
        let db = b.tail.entry();
        let entry = db.scale(a.scalar).add(&da.scale(b.scalar)).add(&da.mul(db));
        Self::new(a.scalar * b.scalar, block, TailRule::new(entry)?)
    }

    pub fn adjoint(&self) -> Result<Self> {
        let tail = TailRule::new(self.tail.entry().conj())?;
        Self::new(self.scalar.conj(), self.block.adjoint(), tail)
    }

    /// `AB - BA`. Scalars and diagonal tails commute, so only the block survives.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.align(other)?;
        let ma = a.shifted_block();
        let mb = b.shifted_block();
        Ok(Self::from_block(ma.matmul(&mb).sub(&mb.matmul(&ma))))
    }

    /// Exact image of a finitely supported vector.
    pub fn apply(&self, x: &FinVector<R>) -> FinVector<R> {
        let n = self.block_size();
        let mut out = FinVector::zero();
        for (j, v) in x.iter() {
            if j <= n {
                for i in 0..n {
                    let mut a = self.block[(i, j - 1)];
                    if i + 1 == j {
                        a = a + self.scalar;
                    }
                    out.add_at(i + 1, a * v);
                }
            } else {
                out.add_at(j, self.tail_value(j) * v);
            }
        }
        out
    }

    /// Finite section `[<T e_j, e_i>]_{i,j <= m}`.
    pub fn truncate(&self, m: usize) -> DenseMatrix<R> {
        let n = self.block_size();
        let mut out = DenseMatrix::zeros(m);
        let k = n.min(m);
        for i in 0..k {
            for j in 0..k {
                out[(i, j)] = self.block[(i, j)];
            }
            out[(i, i)] = out[(i, i)] + self.scalar;
        }
        for idx in (n + 1)..=m {
            out[(idx - 1, idx - 1)] = self.tail_value(idx);
        }
        out
    }

    /// Smallest `N* >= N` with `env(n) < eps` for every `n > N*`; saturates at
    /// the search cap when the envelope decays too slowly.
    pub fn tail_cutoff(&self, eps: R) -> usize {
        let n = self.block_size();
        let env = self.tail.envelope();
        if env.is_zero() {
            return n;
        }
        let start = (n + 1).max(env.valid_from);
        match env.first_below(eps, start) {
            Some(m) => (m - 1).max(n),
            None => SEARCH_CAP,
        }
    }

    /// Envelope bound `env(n)` of the tail at `n`.
    pub fn envelope_at(&self, n: usize) -> R {
        self.tail.envelope().eval(n)
    }

    pub fn is_self_adjoint(&self, tol: R) -> bool {
        self.scalar.im.abs() <= tol && self.block.is_hermitian(tol) && self.tail.is_real()
    }

    /// Copy with the diagonal entry at `n` replaced by `value` (promoting if needed).
    pub fn with_diagonal(&self, n: usize, value: Cx<R>) -> Result<Self> {
        let mut t = self.promote(n.max(self.block_size()))?;
        t.block[(n - 1, n - 1)] = value - t.scalar;
        Ok(t)
    }

    pub(crate) fn from_parts(scalar: Cx<R>, block: DenseMatrix<R>, entry: TailExpr<R>) -> Result<Self> {
        Self::new(scalar, block, TailRule::new(entry)?)
    }

    /// Largest absolute difference against `other` over the first `m` coordinates.
    pub fn section_distance(&self, other: &Self, m: usize) -> R {
        self.truncate(m).sub(&other.truncate(m)).max_abs()
    }

    /// Real diagonal operator with the given block diagonal and tail.
    pub fn real_diagonal(scalar: R, diag: &[R], tail: TailRule<R>) -> Result<Self> {
        Self::new(cx(scalar, R::zero()), DenseMatrix::from_real_diagonal(diag), tail)
    }
}
