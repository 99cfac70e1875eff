use crate::dense::hermitian_eigen;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::structured::{FinVector, StructuredOperator};

/// Default number of tail entries listed individually.
pub const DEFAULT_WINDOW: usize = 32;

/// One listed eigenvalue with its certified radius and a witness vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralPoint<R: Real> {
    pub value: R,
    pub error_radius: R,
    pub multiplicity: usize,
    pub witness: FinVector<R>,
}

/// Finite eigenvalue list plus essential points and a cluster radius.
///
/// The spectrum lies in the union of the balls around the listed values
/// and the `cluster_radius` ball around each essential point.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumApprox<R: Real> {
    pub eigenvalues: Vec<SpectralPoint<R>>,
    pub essential_points: Vec<R>,
    pub cluster_radius: R,
}

impl<R: Real> SpectrumApprox<R> {
    /// Smallest certified spectral value (essential points included).
    pub fn min(&self) -> R {
        self.eigenvalues
            .iter()
            .map(|e| e.value)
            .chain(self.essential_points.iter().copied())
            .fold(R::infinity(), R::min)
    }

    pub fn max(&self) -> R {
        self.eigenvalues
            .iter()
            .map(|e| e.value)
            .chain(self.essential_points.iter().copied())
            .fold(R::neg_infinity(), R::max)
    }

    /// Whether `x` lies in the certified cover (inflated by `slack`).
    pub fn covers(&self, x: R, slack: R) -> bool {
        self.eigenvalues.iter().any(|e| (x - e.value).abs() <= e.error_radius + slack)
            || self.essential_points.iter().any(|&a| (x - a).abs() <= self.cluster_radius + slack)
    }
}

/// Spectrum of a self-adjoint operator: block eigenvalues, tail entries
/// `N+1 ..= min(N*, N + window)` listed exactly, essential point `alpha`.
pub fn spectrum_sa<R: Real>(t: &StructuredOperator<R>, tol: R, window: usize) -> Result<SpectrumApprox<R>> {
    if !t.is_self_adjoint(tol) {
        return Err(Error::NotSelfAdjoint);
    }
    let n = t.block_size();
    let s = t.scalar().re;
    let mut eigenvalues = Vec::new();
    if n > 0 {
        let eig = hermitian_eigen(&t.shifted_block())?;
        let radius = eig.radius();
        let mut k = 0;
        while k < eig.dim() {
            let mut j = k + 1;
            while j < eig.dim() && eig.values[j] - eig.values[j - 1] <= tol {
                j += 1;
            }
            let mean = eig.values[k..j].iter().copied().sum::<R>() / R::index(j - k);
            eigenvalues.push(SpectralPoint {
                value: mean,
                error_radius: radius + (eig.values[j - 1] - eig.values[k]),
                multiplicity: j - k,
                witness: FinVector::from_dense(&eig.vector(k)),
            });
            k = j;
        }
    }
    let cutoff = t.tail_cutoff(tol);
    let last = cutoff.min(n + window);
    for k in (n + 1)..=last {
        eigenvalues.push(SpectralPoint {
            value: s + t.tail().eval(k).re,
            error_radius: R::zero(),
            multiplicity: 1,
            witness: FinVector::basis(k),
        });
    }
    eigenvalues.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal));
    let cluster_radius = if t.tail().is_zero() { R::zero() } else { t.envelope_at(last + 1) };
    Ok(SpectrumApprox { eigenvalues, essential_points: vec![s], cluster_radius })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseMatrix;
    use crate::scalar::{cx, re};
    use crate::structured::TailRule;

    #[test]
    fn scalar_has_empty_list() {
        let t = StructuredOperator::<f64>::scalar_multiple(re(2.0));
        let sp = spectrum_sa(&t, 1e-9, DEFAULT_WINDOW).unwrap();
        assert!(sp.eigenvalues.is_empty());
        assert_eq!(sp.essential_points, vec![2.0]);
        assert_eq!(sp.cluster_radius, 0.0);
    }

    #[test]
    fn harmonic_lists_entries() {
        let t = StructuredOperator::diagonal(TailRule::from_terms(&[(1.0, 1.0, 1.0)]).unwrap()).unwrap();
        let sp = spectrum_sa(&t, 1e-9, 4).unwrap();
        let vals: Vec<f64> = sp.eigenvalues.iter().map(|e| e.value).collect();
        assert_eq!(vals, vec![1.0, 0.5, 1.0 / 3.0, 0.25]);
        assert_eq!(sp.eigenvalues[2].witness, FinVector::basis(3));
        assert!((sp.cluster_radius - 0.2).abs() < 1e-15);
        assert_eq!(sp.essential_points, vec![0.0]);
    }

    #[test]
    fn swap_block_shifted() {
        let b = DenseMatrix::from_fn(2, |i, j| if i != j { cx(1.0, 0.0) } else { cx(0.0, 0.0) });
        let t = StructuredOperator::new(re(2.0), b, TailRule::zero()).unwrap();
        let sp = spectrum_sa(&t, 1e-9, DEFAULT_WINDOW).unwrap();
        let vals: Vec<f64> = sp.eigenvalues.iter().map(|e| e.value).collect();
        assert!((vals[0] - 3.0).abs() < 1e-12 && (vals[1] - 1.0).abs() < 1e-12);
        assert_eq!(sp.essential_points, vec![2.0]);
    }

    #[test]
    fn rejects_non_self_adjoint() {
        let t = StructuredOperator::<f64>::scalar_multiple(cx(0.0, 1.0));
        assert!(matches!(spectrum_sa(&t, 1e-9, 4), Err(Error::NotSelfAdjoint)));
    }
}
