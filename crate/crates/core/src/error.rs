use thiserror::Error;

/// Failures raised by the numerical kernels and the generator transforms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("matrix is not Hermitian (asymmetry {asymmetry:e} exceeds {allowed:e})")]
    NotHermitian { asymmetry: f64, allowed: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("value {value} lies outside the domain [{lo}, {hi}]")]
    DomainError { value: f64, lo: f64, hi: f64 },

    #[error("domination S*S <= T*T fails (minimum eigenvalue of T*T - S*S is {min_eigenvalue:e})")]
    DominationFailed { min_eigenvalue: f64 },

    #[error("generator is not a positive-cocycle generator: {0}")]
    NotPositiveGenerator(String),

    #[error("generator is not a positive-contraction-cocycle generator: {0}")]
    NotPositiveContractionGenerator(String),

    #[error("spectrum of D [{min}, {max}] is not contained in [0, 1]")]
    SpectrumOutOfRange { min: f64, max: f64 },

    #[error("generator is not a contraction-cocycle generator (largest eigenvalue of chi(F) is {max_eigenvalue:e})")]
    NotContraction { max_eigenvalue: f64 },

    #[error("component family does not commute ({0})")]
    NotCommutative(String),

    #[error("step functions have different horizons ({f} vs {g})")]
    HorizonMismatch { f: f64, g: f64 },

    #[error("semigroup-generator table has no entry for ({alpha}, {beta})")]
    MissingEntry { alpha: usize, beta: usize },

    #[error("lifted dimension {dim} exceeds the budget {budget}")]
    BudgetExceeded { dim: usize, budget: usize },

    #[error("power partial isometry scan needs dim k = 1, got {dim_k}")]
    WrongNoiseDim { dim_k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
