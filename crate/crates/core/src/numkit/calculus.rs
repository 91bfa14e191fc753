//! Spectral functional calculus and the tests built on it: semidefiniteness,
//! partial isometries, contraction factorisation and polar parts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::eig::{check_hermitian, herm_eig, SpectralDecomposition};
use super::matrix::{vec_norm, ComplexMatrix, C64};

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// A singular or eigen value counts as zero iff `sigma <= rank_tol·max(1, sigma_max)`.
pub fn is_negligible(sigma: f64, sigma_max: f64, rank_tol: f64) -> bool {
    sigma <= rank_tol * sigma_max.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdVerdict {
    pub holds: bool,
    pub min_eigenvalue: f64,
}

/// `M ≥ 0` up to `tol·(1+‖M‖)`; the smallest eigenvalue is always reported.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<PsdVerdict> {
    let eig = herm_eig(m, tol)?;
    let min_eigenvalue = eig.min_eigenvalue();
    Ok(PsdVerdict { holds: min_eigenvalue >= -tol * (1.0 + m.norm()), min_eigenvalue })
}

/// `M ≤ 0`, reported through the largest eigenvalue.
pub fn is_nsd(m: &ComplexMatrix, tol: f64) -> Result<(bool, f64)> {
    let eig = herm_eig(m, tol)?;
    let max = eig.max_eigenvalue();
    Ok((max <= tol * (1.0 + m.norm()), max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialIsometryVerdict {
    pub holds: bool,
    pub residual: f64,
}

/// `‖V V* V − V‖`.
pub fn partial_isometry_residual(v: &ComplexMatrix) -> f64 {
    v.matmul(&v.adjoint()).matmul(v).distance(v)
}

pub fn is_partial_isometry(v: &ComplexMatrix, tol: f64) -> PartialIsometryVerdict {
    let residual = partial_isometry_residual(v);
    PartialIsometryVerdict { holds: residual <= tol * (1.0 + v.norm()), residual }
}

/// Closed interval a scalar function is defined on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
    pub const NONNEGATIVE: Interval = Interval { lo: 0.0, hi: f64::INFINITY };
    pub const UNIT: Interval = Interval { lo: 0.0, hi: 1.0 };

    /// Clamps values within `slack` of the interval onto it; anything farther out is an error.
    pub fn clamp(&self, value: f64, slack: f64) -> Result<f64> {
        if value < self.lo - slack || value > self.hi + slack {
            return Err(Error::DomainError { value, lo: self.lo, hi: self.hi });
        }
        Ok(value.clamp(self.lo, self.hi))
    }
}

/// Applies `f` to the eigenvalues of `eig`, clamping them into `domain` first.
pub fn map_spectrum(
    eig: &SpectralDecomposition,
    f: impl Fn(f64) -> f64,
    domain: Interval,
    slack: f64,
) -> Result<ComplexMatrix> {
    let values = eig
        .eigenvalues
        .iter()
        .map(|&x| domain.clamp(x, slack).map(&f))
        .collect::<Result<Vec<f64>>>()?;
    Ok(eig.synthesize(&values))
}

/// `U · diag(f(λ_i)) · U*` for Hermitian `M = U · diag(λ) · U*`.
pub fn apply_scalar_function(
    m: &ComplexMatrix,
    f: impl Fn(f64) -> f64,
    domain: Interval,
    tol: f64,
) -> Result<ComplexMatrix> {
    let eig = herm_eig(m, tol)?;
    map_spectrum(&eig, f, domain, tol * (1.0 + m.norm()))
}

/// Finds a contraction `W` with `S = W·T`, vanishing on `Ran(T)^⊥`.
///
/// Requires `S*S ≤ T*T` (checked to `rank_tol`). Built as `W = S·T⁺` with the
/// spectral pseudo-inverse of `T` taken through the eigenvectors of `T*T`.
pub fn contraction_factor(s: &ComplexMatrix, t: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    if s.cols() != t.cols() {
        return Err(Error::DimMismatch(format!(
            "S is {}x{} but T is {}x{}",
            s.rows(),
            s.cols(),
            t.rows(),
            t.cols()
        )));
    }
    let gram_t = t.adjoint_mul(t).hermitian_part();
    let gram_s = s.adjoint_mul(s).hermitian_part();
    let domination = is_psd(&(&gram_t - &gram_s), rank_tol)?;
    if !domination.holds {
        return Err(Error::DominationFailed { min_eigenvalue: domination.min_eigenvalue });
    }

    let eig = herm_eig(&gram_t, rank_tol)?;
    let q = t.cols();
    let columns: Vec<(Vec<C64>, Vec<C64>)> = (0..q)
        .map(|i| {
            let u = ComplexMatrix::column_vector(&eig.basis.column(i));
            (s.matmul(&u).column(0), t.matmul(&u).column(0))
        })
        .collect();
    let sigma: Vec<f64> = columns.iter().map(|(_, tu)| vec_norm(tu)).collect();
    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);

    let mut w = ComplexMatrix::zeros(s.rows(), t.rows());
    for ((su, tu), &sg) in columns.iter().zip(&sigma) {
        if is_negligible(sg, sigma_max, rank_tol) {
            continue;
        }
        let inv = 1.0 / (sg * sg);
        for i in 0..s.rows() {
            for j in 0..t.rows() {
                w[(i, j)] += su[i] * tu[j].conj() * inv;
            }
        }
    }
    Ok(w)
}

/// Polar data of `D`: one spectral decomposition of `D*D` feeds `|D|`, every
/// function of `|D|²`, and the canonical partial isometry `N` with `N|D| = D`.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    gram: SpectralDecomposition,
    singular_values: Vec<f64>,
    partial_isometry: ComplexMatrix,
    modulus: ComplexMatrix,
}

impl PolarFactors {
    pub fn new(d: &ComplexMatrix, rank_tol: f64) -> Result<Self> {
        let gram = herm_eig(&d.adjoint_mul(d).hermitian_part(), DEFAULT_TOL)?;
        let q = d.cols();

        // Singular values as ‖D v_i‖ rather than sqrt(λ_i): the former keeps
        // relative accuracy for small values.
        let images: Vec<Vec<C64>> = (0..q)
            .map(|i| d.matmul(&ComplexMatrix::column_vector(&gram.basis.column(i))).column(0))
            .collect();
        let singular_values: Vec<f64> = images.iter().map(|u| vec_norm(u)).collect();
        let sigma_max = singular_values.iter().cloned().fold(0.0, f64::max);

        let mut kept: Vec<usize> = (0..q)
            .filter(|&i| !is_negligible(singular_values[i], sigma_max, rank_tol))
            .collect();
        kept.sort_by(|&a, &b| singular_values[b].total_cmp(&singular_values[a]));

        // Orthonormalise the left singular vectors so N is a partial isometry to rounding.
        let mut left: Vec<Vec<C64>> = Vec::with_capacity(kept.len());
        for &i in &kept {
            let mut u: Vec<C64> = images[i].iter().map(|z| z / singular_values[i]).collect();
            for prev in &left {
                let proj: C64 = prev.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
                for (x, p) in u.iter_mut().zip(prev) {
                    *x -= proj * p;
                }
            }
            let norm = vec_norm(&u);
            left.push(u.into_iter().map(|z| z / norm).collect());
        }

        let mut partial_isometry = ComplexMatrix::zeros(d.rows(), q);
        for (u, &i) in left.iter().zip(&kept) {
            let v = gram.basis.column(i);
            for r in 0..d.rows() {
                for c in 0..q {
                    partial_isometry[(r, c)] += u[r] * v[c].conj();
                }
            }
        }
        let modulus = gram.synthesize(&singular_values);
        Ok(Self { gram, singular_values, partial_isometry, modulus })
    }

    /// `N` with `N|D| = D`, initial space the numerical range of `|D|`.
    pub fn partial_isometry(&self) -> &ComplexMatrix {
        &self.partial_isometry
    }

    /// `|D| = (D*D)^{1/2}`.
    pub fn modulus(&self) -> &ComplexMatrix {
        &self.modulus
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.singular_values
    }

    /// `f(|D|²)`, evaluated on the squared singular values.
    pub fn map_modulus_squared(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let values: Vec<f64> = self.singular_values.iter().map(|&s| f(s * s)).collect();
        self.gram.synthesize(&values)
    }
}

/// Returns `(N, |D|)`.
pub fn polar_part(d: &ComplexMatrix, rank_tol: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let factors = PolarFactors::new(d, rank_tol)?;
    Ok((factors.partial_isometry, factors.modulus))
}

/// Convenience: is `M` Hermitian within `tol`?
pub fn is_hermitian(m: &ComplexMatrix, tol: f64) -> bool {
    check_hermitian(m, tol).is_ok()
}
