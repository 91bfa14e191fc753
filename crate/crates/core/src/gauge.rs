//! Pure-gauge cocycles `F = [[0, 0], [0, D − I]]`: the lifted operators
//! `D^{(n)} = D^{(n)}_1 ⋯ D^{(n)}_n` on `h ⊗ k^{⊗n}` and levelwise
//! partial-isometry scans.
//!
//! `h ⊗ k^{⊗n}` is indexed `(x, k_1, …, k_n)` row-major, so leg `j` has
//! stride `m^{n−j}` and `h` has stride `m^n`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::Generator;
use crate::numkit::{partial_isometry_residual, ComplexMatrix, C64};

pub const DEFAULT_BUDGET: usize = 4096;
pub const DEFAULT_N_MAX: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PureGauge {
    d: ComplexMatrix,
    dim_h: usize,
    dim_k: usize,
    budget: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: usize,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelScanReport {
    pub n_max: usize,
    pub levels: Vec<LevelRecord>,
    pub first_failure: Option<usize>,
    pub verdict: String,
}

impl LevelScanReport {
    fn from_residuals(residuals: Vec<(f64, f64)>, tol: f64) -> Self {
        let n_max = residuals.len();
        let levels: Vec<LevelRecord> = residuals
            .into_iter()
            .enumerate()
            .map(|(i, (residual, size))| LevelRecord { level: i + 1, residual, pass: residual <= tol * (1.0 + size) })
            .collect();
        let first_failure = levels.iter().find(|r| !r.pass).map(|r| r.level);
        let verdict = match first_failure {
            Some(level) => format!("fails at level {level}"),
            None => format!("passes up to n_max={n_max}"),
        };
        Self { n_max, levels, first_failure, verdict }
    }
}

impl PureGauge {
    pub fn new(d: ComplexMatrix, dim_h: usize, dim_k: usize) -> Result<Self> {
        if dim_h == 0 || dim_k == 0 || d.shape() != (dim_h * dim_k, dim_h * dim_k) {
            return Err(Error::DimMismatch(format!(
                "D is {}x{}, expected {n}x{n} for dims ({dim_h}, {dim_k})",
                d.rows(),
                d.cols(),
                n = dim_h * dim_k
            )));
        }
        Ok(Self { d, dim_h, dim_k, budget: DEFAULT_BUDGET })
    }

    /// The gauge block `D` of a generator (the other blocks are ignored).
    pub fn from_generator(f: &Generator) -> Self {
        Self { d: f.d().clone(), dim_h: f.dim_h(), dim_k: f.dim_k(), budget: DEFAULT_BUDGET }
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    pub fn d(&self) -> &ComplexMatrix {
        &self.d
    }

    /// `dim(h ⊗ k^{⊗n})`, refused beyond the budget.
    pub fn level_dim(&self, n: usize) -> Result<usize> {
        let dim = u32::try_from(n)
            .ok()
            .and_then(|n| self.dim_k.checked_pow(n))
            .and_then(|p| p.checked_mul(self.dim_h))
            .unwrap_or(usize::MAX);
        if dim > self.budget {
            return Err(Error::BudgetExceeded { dim, budget: self.budget });
        }
        Ok(dim)
    }

    fn check_level(&self, j: usize, n: usize) -> Result<usize> {
        if j == 0 || j > n {
            return Err(Error::DimMismatch(format!("leg {j} is outside 1..={n}")));
        }
        self.level_dim(n)
    }

    /// `D^{(n)}_j · m` for a matrix `m` on `h ⊗ k^{⊗n}`.
    pub fn apply_lift(&self, j: usize, n: usize, m: &ComplexMatrix) -> Result<ComplexMatrix> {
        let size = self.check_level(j, n)?;
        if m.rows() != size {
            return Err(Error::DimMismatch(format!("matrix has {} rows, level {n} has dimension {size}", m.rows())));
        }
        let k = self.dim_k;
        let stride_h = size / self.dim_h;
        let stride_j = k.pow((n - j) as u32);
        let legs: Vec<usize> =
            (0..self.dim_h).flat_map(|x| (0..k).map(move |i| x * stride_h + i * stride_j)).collect();

        let mut out = ComplexMatrix::zeros(size, m.cols());
        let mut gathered = vec![C64::new(0.0, 0.0); legs.len()];
        for base in 0..stride_h {
            if !(base / stride_j).is_multiple_of(k) {
                continue;
            }
            for col in 0..m.cols() {
                for (g, &off) in gathered.iter_mut().zip(&legs) {
                    *g = m[(base + off, col)];
                }
                for (a, &row_off) in legs.iter().enumerate() {
                    let mut acc = C64::new(0.0, 0.0);
                    for (b, g) in gathered.iter().enumerate() {
                        acc += self.d[(a, b)] * g;
                    }
                    out[(base + row_off, col)] = acc;
                }
            }
        }
        Ok(out)
    }

    /// `D^{(n)}_j` as a dense matrix.
    pub fn lift_level(&self, j: usize, n: usize) -> Result<ComplexMatrix> {
        let size = self.check_level(j, n)?;
        self.apply_lift(j, n, &ComplexMatrix::identity(size))
    }

    /// `D^{(n)}_{order[0]} ⋯ D^{(n)}_{order[n−1]}`.
    pub fn lifted_product_in_order(&self, order: &[usize]) -> Result<ComplexMatrix> {
        let n = order.len();
        let mut acc = ComplexMatrix::identity(self.level_dim(n)?);
        for &j in order.iter().rev() {
            acc = self.apply_lift(j, n, &acc)?;
        }
        Ok(acc)
    }

    /// `D^{(n)} = D^{(n)}_1 ⋯ D^{(n)}_n`.
    pub fn lifted_product(&self, n: usize) -> Result<ComplexMatrix> {
        let order: Vec<usize> = (1..=n).collect();
        self.lifted_product_in_order(&order)
    }

    /// `P_σ M P_σ*` where `P_σ` moves `k`-leg `j` to position `σ(j)` (1-based).
    pub fn permute_k_legs(&self, m: &ComplexMatrix, sigma: &[usize]) -> Result<ComplexMatrix> {
        let n = sigma.len();
        let size = self.level_dim(n)?;
        let mut seen = vec![false; n];
        for &s in sigma {
            if s == 0 || s > n || std::mem::replace(&mut seen[s - 1], true) {
                return Err(Error::DimMismatch(format!("{sigma:?} is not a permutation of 1..={n}")));
            }
        }
        if m.shape() != (size, size) {
            return Err(Error::DimMismatch(format!("matrix is {}x{}, level {n} has dimension {size}", m.rows(), m.cols())));
        }
        let k = self.dim_k;
        let stride_h = size / self.dim_h;
        let stride = |pos: usize| k.pow((n - pos) as u32);
        // image of an index under P_σ
        let perm: Vec<usize> = (0..size)
            .map(|idx| {
                let x = idx / stride_h;
                let mut out = x * stride_h;
                for j in 1..=n {
                    let leg = (idx / stride(j)) % k;
                    out += leg * stride(sigma[j - 1]);
                }
                out
            })
            .collect();
        let mut out = ComplexMatrix::zeros(size, size);
        for r in 0..size {
            for c in 0..size {
                out[(perm[r], perm[c])] = m[(r, c)];
            }
        }
        Ok(out)
    }

    /// Residual of `V V* V = V` for `V = D^{(n)}`, levels `1 … n_max`.
    pub fn scan_partial_isometries(&self, n_max: usize, tol: f64) -> Result<LevelScanReport> {
        self.level_dim(n_max)?;
        let residuals = (1..=n_max)
            .map(|n| {
                let v = self.lifted_product(n)?;
                Ok((partial_isometry_residual(&v), v.norm()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LevelScanReport::from_residuals(residuals, tol))
    }

    /// The `k = C` scan: residuals of the ordinary powers `Dⁿ`.
    pub fn is_power_partial_isometry(&self, n_max: usize, tol: f64) -> Result<LevelScanReport> {
        if self.dim_k != 1 {
            return Err(Error::WrongNoiseDim { dim_k: self.dim_k });
        }
        let mut residuals = Vec::with_capacity(n_max);
        let mut power = ComplexMatrix::identity(self.dim_h);
        for _ in 0..n_max {
            power = self.d.matmul(&power);
            residuals.push((partial_isometry_residual(&power), power.norm()));
        }
        Ok(LevelScanReport::from_residuals(residuals, tol))
    }
}

/// `[[cos θ, 0], [sin θ, 0]]` on `h = C²`, `k = C`.
pub fn tilted_projection(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_real(&[&[c, 0.0], &[s, 0.0]])
}

/// Nilpotent truncation of the coisometric left shift, `e_j ↦ e_{j−1}`, `e_0 ↦ 0`.
/// On the truncated space it is a partial isometry but not a coisometry.
pub fn truncated_left_shift(m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
}
