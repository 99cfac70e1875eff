use thiserror::Error;

/// Errors raised by the structured operator library.
///
/// Numeric payloads are carried as `f64` regardless of the scalar type in use.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed envelope term (c={c}, r={r}, p={p}): need c >= 0, 0 < r <= 1, p >= 0")]
    MalformedEnvelope { c: f64, r: f64, p: f64 },
    #[error("tail term with r=1, p=0 and c={c} does not vanish")]
    NonvanishingTail { c: f64 },
    #[error("block must be square with {expected} entries, got {got}")]
    BadBlock { expected: usize, got: usize },
    #[error("promotion to block size {requested} exceeds the dense limit {limit}")]
    BlockTooLarge { requested: usize, limit: usize },
    #[error("operator is not self-adjoint")]
    NotSelfAdjoint,
    #[error("matrix is not Hermitian (asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },
    #[error("Jacobi iteration did not converge after {sweeps} sweeps (off-diagonal {off:e})")]
    NoConvergence { sweeps: usize, off: f64 },
    #[error("eventual sign of the tail cannot be decided")]
    SignUndecidable,
    #[error("polar phase does not converge on the tail; partial isometry leaves the class")]
    UnsupportedPolar,
    #[error("operator is not certified invertible (minimum modulus {min_modulus:e}, margin {margin:e})")]
    NotInvertible { min_modulus: f64, margin: f64 },
    #[error("invalid AN triple: {0}")]
    InvalidTriple(String),
    #[error("kernel cannot be certified finite: {0}")]
    UncertifiableKernel(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("norm is not attained (or attainment is undecided)")]
    NormNotAttained,
    #[error("phase condition fails: {lhs_re}+{lhs_im}i vs {rhs_re}+{rhs_im}i")]
    PhaseConditionFailed { lhs_re: f64, lhs_im: f64, rhs_re: f64, rhs_im: f64 },
    #[error("construction check failed: achieved {achieved:e}, target {target:e}")]
    PostconditionFailed { achieved: f64, target: f64 },
    #[error("operator is not a positive contraction: {0}")]
    NotPositive(String),
    #[error("beta is outside the essential numerical range {{{s_re}+{s_im}i}}")]
    BetaOutsideEssentialRange { s_re: f64, s_im: f64 },
    #[error("no norm-attaining perturbation certificate found: {0}")]
    NoWitnessFound(String),
    #[error("parse error at {position}: {message}")]
    Parse { position: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
