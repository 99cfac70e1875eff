//! Dense finite-section numerics.
//!
//! Independent of the structured representation: these routines only ever
//! see finite complex matrices, which makes them usable as a brute-force
//! oracle against the block/tail engine.

mod decomp;
mod jacobi;
mod matrix;

pub use decomp::{dense_kernel, dense_norm, dense_svd, dense_sym_eig, polar_isometry, psd_sqrt, EigenPair, SingularTriplet};
pub use jacobi::{hermitian_eigen, HermitianEigen, MAX_SWEEPS, OFF_THRESHOLD};
pub use matrix::DenseMatrix;
