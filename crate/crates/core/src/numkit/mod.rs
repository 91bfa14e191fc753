//! Self-contained dense complex linear algebra.

pub mod calculus;
pub mod eig;
pub mod expm;
pub mod matrix;

pub use calculus::{
    apply_scalar_function, contraction_factor, is_negligible, is_nsd, is_partial_isometry, is_psd,
    partial_isometry_residual, polar_part, Interval, PartialIsometryVerdict, PolarFactors, PsdVerdict,
    DEFAULT_RANK_TOL, DEFAULT_TOL,
};
pub use eig::{herm_eig, SpectralDecomposition};
pub use expm::mat_exp;
pub use matrix::{inner, vec_norm, ComplexMatrix, C64, ONE, ZERO};
