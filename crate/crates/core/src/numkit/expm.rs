//! Matrix exponential by scaling and squaring around a Taylor kernel.

use crate::error::{Error, Result};

use super::matrix::ComplexMatrix;

/// Taylor degree; at scaled norm 0.5 the truncation error is below 1e-22.
const TAYLOR_ORDER: usize = 18;
const SCALED_NORM: f64 = 0.5;

pub fn mat_exp(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::DimMismatch(format!("exp of a {}x{} matrix", m.rows(), m.cols())));
    }
    let norm = m.norm_one();
    let squarings = if norm > SCALED_NORM { (norm / SCALED_NORM).log2().ceil() as u32 } else { 0 };
    let scaled = m.scale_real(0.5f64.powi(squarings as i32));

    // Horner: I + X(I + X/2(I + X/3(...)))
    let n = m.rows();
    let id = ComplexMatrix::identity(n);
    let mut acc = id.clone();
    for k in (1..=TAYLOR_ORDER).rev() {
        acc = &id + &scaled.matmul(&acc).scale_real(1.0 / k as f64);
    }
    for _ in 0..squarings {
        acc = acc.matmul(&acc);
    }
    Ok(acc)
}
