use std::collections::BTreeMap;

use num_traits::Zero;

use crate::scalar::{cx, Cx, Real};

/// Finitely supported vector in l2, indexed from 1.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FinVector<R: Real> {
    coords: BTreeMap<usize, Cx<R>>,
}

impl<R: Real> FinVector<R> {
    pub fn zero() -> Self {
        Self { coords: BTreeMap::new() }
    }

    /// Standard basis vector `e_n`.
    pub fn basis(n: usize) -> Self {
        assert!(n >= 1, "basis indices start at 1");
        let mut coords = BTreeMap::new();
        coords.insert(n, cx(R::one(), R::zero()));
        Self { coords }
    }

    /// Coordinates `1..=dense.len()`.
    pub fn from_dense(dense: &[Cx<R>]) -> Self {
        let coords = dense
            .iter()
            .enumerate()
            .filter(|(_, z)| !z.is_zero())
            .map(|(i, &z)| (i + 1, z))
            .collect();
        Self { coords }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Cx<R>)>) -> Self {
        let mut v = Self::zero();
        for (i, z) in pairs {
            v.add_at(i, z);
        }
        v
    }

    pub fn get(&self, n: usize) -> Cx<R> {
        self.coords.get(&n).copied().unwrap_or_else(Cx::zero)
    }

    pub fn add_at(&mut self, n: usize, z: Cx<R>) {
        assert!(n >= 1, "basis indices start at 1");
        if z.is_zero() {
            return;
        }
        let e = self.coords.entry(n).or_insert_with(Cx::zero);
        *e = *e + z;
        if e.is_zero() {
            self.coords.remove(&n);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Cx<R>)> + '_ {
        self.coords.iter().map(|(&i, &z)| (i, z))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.keys().copied()
    }

    pub fn max_index(&self) -> usize {
        self.coords.keys().next_back().copied().unwrap_or(0)
    }

    pub fn nnz(&self) -> usize {
        self.coords.len()
    }

    /// Dense copy of coordinates `1..=m`.
    pub fn to_dense(&self, m: usize) -> Vec<Cx<R>> {
        let mut out = vec![Cx::zero(); m];
        for (i, z) in self.iter() {
            if i <= m {
                out[i - 1] = z;
            }
        }
        out
    }

    pub fn norm(&self) -> R {
        self.coords.values().map(|z| z.norm_sqr()).sum::<R>().sqrt()
    }

    /// `<self, other> = sum x_i conj(y_i)`.
    pub fn inner(&self, other: &Self) -> Cx<R> {
        self.iter().fold(Cx::zero(), |acc, (i, z)| acc + z * other.get(i).conj())
    }

    pub fn scale(&self, c: Cx<R>) -> Self {
        Self::from_pairs(self.iter().map(|(i, z)| (i, z * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut v = self.clone();
        for (i, z) in other.iter() {
            v.add_at(i, z);
        }
        v
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(cx(-R::one(), R::zero())))
    }

    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        (n > R::zero()).then(|| self.scale(cx(R::one() / n, R::zero())))
    }

    /// Unit-sphere membership `| |x| - 1 | <= tol`.
    pub fn is_unit(&self, tol: R) -> bool {
        (self.norm() - R::one()).abs() <= tol
    }
}
