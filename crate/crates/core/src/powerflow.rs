//! The scalar triple `(f_α, g_α, h_α)` and the power transform `F ↦ F_α` of a
//! positive contraction cocycle generator.
//!
//! With `s = 1 − t`:
//! `f_α(t) = (α − 1 − αt + t^α)/s²`, `g_α(t) = (1 − t^α)/s`, `h_α(t) = t^α`,
//! extended continuously by `f_α(1) = α(α−1)/2`, `g_α(1) = α`.

use crate::error::{Error, Result};
use crate::generator::{classify, Generator};
use crate::numkit::{herm_eig, Interval};

/// Slack for arguments just outside `[0, 1]`.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// The binomial series is used while `s·max(α, 1)` stays below this.
const SERIES_RADIUS: f64 = 0.25;
const SERIES_MAX_TERMS: usize = 200;

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::DomainError { value: alpha, lo: 0.0, hi: f64::INFINITY });
    }
    Ok(())
}

fn prepare(t: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Interval::UNIT.clamp(t, DOMAIN_SLACK)
}

fn use_series(s: f64, alpha: f64) -> bool {
    s * alpha.max(1.0) < SERIES_RADIUS
}

/// `Σ_{j≥2} (−1)^j C(α, j) s^{j−2}`.
fn f_series(s: f64, alpha: f64) -> f64 {
    // C(α, 2)
    let mut coeff = alpha * (alpha - 1.0) / 2.0;
    let mut power = 1.0;
    let mut sum = coeff;
    for j in 2..SERIES_MAX_TERMS {
        // (−1)^{j+1} C(α, j+1) / ((−1)^j C(α, j)) = −(α − j)/(j + 1)
        coeff *= -(alpha - j as f64) / (j as f64 + 1.0);
        power *= s;
        let term = coeff * power;
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `t^α − 1` computed without cancellation. Works from `t`, not `1 − t`, which
/// rounds to 1 for tiny `t`.
fn power_minus_one(t: f64, alpha: f64) -> f64 {
    (alpha * t.ln()).exp_m1()
}

pub fn f_alpha(t: f64, alpha: f64) -> Result<f64> {
    let t = prepare(t, alpha)?;
    let s = 1.0 - t;
    Ok(if use_series(s, alpha) { f_series(s, alpha) } else { (alpha * s + power_minus_one(t, alpha)) / (s * s) })
}

pub fn g_alpha(t: f64, alpha: f64) -> Result<f64> {
    let t = prepare(t, alpha)?;
    let s = 1.0 - t;
    Ok(if use_series(s, alpha) { alpha - s * f_series(s, alpha) } else { -power_minus_one(t, alpha) / s })
}

pub fn h_alpha(t: f64, alpha: f64) -> Result<f64> {
    let t = prepare(t, alpha)?;
    Ok(t.powf(alpha))
}

/// Generator `F_α` of `X^α` for a positive contraction cocycle `X = X^F`:
/// `[[αA + B f_α(D) B*, B g_α(D)], [g_α(D) B*, h_α(D) − I]]`.
pub fn power_generator(f: &Generator, alpha: f64, tol: f64) -> Result<Generator> {
    check_alpha(alpha)?;
    let report = classify(f, tol)?;
    if !report.positive.verdict {
        return Err(Error::NotPositiveContractionGenerator(format!(
            "not a positive cocycle generator (self-adjoint: {}, bottom of D: {:e})",
            report.self_adjoint.verdict, report.positive.witness
        )));
    }
    let eig = herm_eig(&f.d().hermitian_part(), tol)?;
    let (min, max) = (eig.min_eigenvalue(), eig.max_eigenvalue());
    if min < -tol || max > 1.0 + tol {
        return Err(Error::SpectrumOutOfRange { min, max });
    }
    if !report.positive_contraction.verdict {
        return Err(Error::NotPositiveContractionGenerator(format!(
            "F is not negative semidefinite (top eigenvalue {:e})",
            report.positive_contraction.witness
        )));
    }

    let spectrum: Vec<f64> = eig.eigenvalues.iter().map(|&x| x.clamp(0.0, 1.0)).collect();
    let apply = |func: fn(f64, f64) -> Result<f64>| -> Result<_> {
        let values = spectrum.iter().map(|&x| func(x, alpha)).collect::<Result<Vec<_>>>()?;
        Ok(eig.synthesize(&values))
    };
    let f_d = apply(f_alpha)?;
    let g_d = apply(g_alpha)?;
    let h_d = apply(h_alpha)?;

    // B = C* for positive generators; B is used throughout.
    let b = f.b();
    let b_adj = b.adjoint();
    let a = &f.a().scale_real(alpha) + &b.matmul(&f_d).matmul(&b_adj);
    let b_alpha = b.matmul(&g_d);
    let c_alpha = g_d.matmul(&b_adj);
    Generator::new(f.dim_h(), f.dim_k(), a, b_alpha, c_alpha, h_d)
}
