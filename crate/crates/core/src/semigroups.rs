//! Associated semigroups `Q^{c,d}_t = exp(t Z^c_d)` and cocycle matrix
//! elements between exponential vectors of step functions.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{Components, Generator};
use crate::numkit::{inner, mat_exp, vec_norm, ComplexMatrix, C64};

/// Right-continuous step function on `[0, t)`: segment `i` holds on
/// `[t_i, t_i + dt_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepFunctionRepr")]
pub struct StepFunction {
    segments: Vec<Segment>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub dt: f64,
    #[serde(with = "complex_vec")]
    pub value: Vec<C64>,
}

#[derive(Deserialize)]
struct StepFunctionRepr {
    segments: Vec<Segment>,
}

impl TryFrom<StepFunctionRepr> for StepFunction {
    type Error = Error;
    fn try_from(r: StepFunctionRepr) -> Result<Self> {
        StepFunction::new(r.segments)
    }
}

mod complex_vec {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::numkit::C64;

    pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl StepFunction {
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let Some(first) = segments.first() else {
            return Err(Error::InvalidMatrix("step function has no segments".into()));
        };
        let m = first.value.len();
        for seg in &segments {
            if !(seg.dt.is_finite() && seg.dt > 0.0) {
                return Err(Error::InvalidMatrix(format!("segment duration {} is not positive", seg.dt)));
            }
            if seg.value.len() != m {
                return Err(Error::DimMismatch(format!("segment values of lengths {m} and {}", seg.value.len())));
            }
            if seg.value.iter().any(|z| !z.is_finite()) {
                return Err(Error::InvalidMatrix("non-finite step function value".into()));
            }
        }
        Ok(Self { segments })
    }

    pub fn constant(t: f64, value: Vec<C64>) -> Result<Self> {
        Self::new(vec![Segment { dt: t, value }])
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn dim(&self) -> usize {
        self.segments[0].value.len()
    }

    pub fn horizon(&self) -> f64 {
        self.segments.iter().map(|s| s.dt).sum()
    }

    /// Breakpoints `0 = t_0 < t_1 < … < t_N = horizon`.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut acc = 0.0;
        std::iter::once(0.0)
            .chain(self.segments.iter().map(|s| {
                acc += s.dt;
                acc
            }))
            .collect()
    }

    /// `sup |f − g|` over a shared partition (both functions must have the same horizon).
    pub fn sup_distance(&self, other: &StepFunction) -> Result<f64> {
        Ok(refine(self, other)?
            .iter()
            .map(|(_, a, b)| {
                let diff: Vec<C64> = a.iter().zip(b.iter()).map(|(x, y)| x - y).collect();
                vec_norm(&diff)
            })
            .fold(0.0, f64::max))
    }
}

fn horizon_slack(t: f64) -> f64 {
    1e-12 * t.max(1.0)
}

/// A common interval of two step functions: duration and both values.
pub type Piece<'a> = (f64, &'a [C64], &'a [C64]);

/// Common refinement of two step functions: `(dt, f-value, g-value)` per piece,
/// zero-length pieces dropped.
pub fn refine<'a>(f: &'a StepFunction, g: &'a StepFunction) -> Result<Vec<Piece<'a>>> {
    let (tf, tg) = (f.horizon(), g.horizon());
    if (tf - tg).abs() > horizon_slack(tf.max(tg)) {
        return Err(Error::HorizonMismatch { f: tf, g: tg });
    }
    let bf = f.breakpoints();
    let bg = g.breakpoints();
    let slack = horizon_slack(tf.max(tg));

    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    let mut now = 0.0;
    while i < f.segments.len() && j < g.segments.len() {
        let (ef, eg) = (bf[i + 1], bg[j + 1]);
        let end = ef.min(eg);
        if end - now > slack {
            out.push((end - now, f.segments[i].value.as_slice(), g.segments[j].value.as_slice()));
        }
        now = end;
        if ef - end <= slack {
            i += 1;
        }
        if eg - end <= slack {
            j += 1;
        }
    }
    Ok(out)
}

/// `I ⊗ v : h → h⊗k`.
fn ampliate(v: &[C64], dim_h: usize) -> ComplexMatrix {
    let m = v.len();
    ComplexMatrix::from_fn(dim_h * m, dim_h, |row, col| if row / m == col { v[row % m] } else { C64::new(0.0, 0.0) })
}

fn check_vector(f: &Generator, v: &[C64], name: &str) -> Result<()> {
    if v.len() != f.dim_k() {
        return Err(Error::DimMismatch(format!("{name} has length {}, expected {}", v.len(), f.dim_k())));
    }
    Ok(())
}

/// `Z^c_d = A + B(I⊗d) + (I⊗c)*C + (I⊗c)*D(I⊗d)`.
pub fn z_generator(f: &Generator, c: &[C64], d: &[C64]) -> Result<ComplexMatrix> {
    check_vector(f, c, "c")?;
    check_vector(f, d, "d")?;
    let n = f.dim_h();
    let ic = ampliate(c, n);
    let id = ampliate(d, n);
    let mut z = f.a().clone();
    z += &f.b().matmul(&id);
    z += &ic.adjoint_mul(f.c());
    z += &ic.adjoint_mul(&f.d().matmul(&id));
    Ok(z)
}

pub fn semigroup_at(f: &Generator, c: &[C64], d: &[C64], t: f64) -> Result<ComplexMatrix> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::DomainError { value: t, lo: 0.0, hi: f64::INFINITY });
    }
    mat_exp(&z_generator(f, c, d)?.scale_real(t))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    /// Earliest factor leftmost.
    #[default]
    Left,
    /// Earliest factor rightmost.
    Right,
}

/// `⟨u ⊗ ε(f), X^F_t v ⊗ ε(g)⟩` as an operator on `h`, via the product of
/// associated semigroups over the common refinement of `f` and `g`.
pub fn matrix_element(f: &Generator, fs: &StepFunction, gs: &StepFunction, order: Order) -> Result<ComplexMatrix> {
    check_vector(f, &fs.segments[0].value, "f")?;
    check_vector(f, &gs.segments[0].value, "g")?;
    let mut acc = ComplexMatrix::identity(f.dim_h());
    for (dt, c, d) in refine(fs, gs)? {
        let q = semigroup_at(f, c, d, dt)?;
        acc = match order {
            Order::Left => acc.matmul(&q),
            Order::Right => q.matmul(&acc),
        };
    }
    Ok(acc)
}

/// `Z^{e_α}_{e_β}` for all `α, β ∈ {0 … m}`, `e_0` standing for the zero vector.
pub fn z_table(f: &Generator) -> Result<BTreeMap<(usize, usize), ComplexMatrix>> {
    let m = f.dim_k();
    let basis = |alpha: usize| -> Vec<C64> {
        (0..m).map(|i| if alpha == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }).collect()
    };
    let mut table = BTreeMap::new();
    for alpha in 0..=m {
        for beta in 0..=m {
            table.insert((alpha, beta), z_generator(f, &basis(alpha), &basis(beta))?);
        }
    }
    Ok(table)
}

/// Inverts [`z_table`]: rebuilds the components of `F` from the semigroup generators.
pub fn recover_generator(
    table: &BTreeMap<(usize, usize), ComplexMatrix>,
    dim_h: usize,
    dim_k: usize,
) -> Result<Generator> {
    let get = |alpha: usize, beta: usize| -> Result<&ComplexMatrix> {
        let z = table.get(&(alpha, beta)).ok_or(Error::MissingEntry { alpha, beta })?;
        if z.shape() != (dim_h, dim_h) {
            return Err(Error::DimMismatch(format!("Z entry ({alpha}, {beta}) is {}x{}", z.rows(), z.cols())));
        }
        Ok(z)
    };
    let z00 = get(0, 0)?;
    let id = ComplexMatrix::identity(dim_h);
    let mut blocks = Vec::with_capacity(dim_k + 1);
    for alpha in 0..=dim_k {
        let mut row = Vec::with_capacity(dim_k + 1);
        for beta in 0..=dim_k {
            let block = match (alpha, beta) {
                (0, 0) => z00.clone(),
                (_, 0) => get(alpha, 0)? - z00,
                (0, _) => get(0, beta)? - z00,
                _ => {
                    let mut b = &(get(alpha, beta)? - get(alpha, 0)?) - get(0, beta)?;
                    b += z00;
                    if alpha == beta {
                        b = &b - &id;
                    }
                    b
                }
            };
            row.push(block);
        }
        blocks.push(row);
    }
    Generator::from_components(&Components { dim_h, dim_k, blocks })
}

/// Lipschitz constant for `f ↦ matrix_element(F, f, g)` in the sup norm on `g`'s partition,
/// valid for `f` ranging over step functions with `‖f‖∞ ≤ radius`.
pub fn lipschitz_bound(f: &Generator, gs: &StepFunction, radius: f64) -> f64 {
    let c_norm = f.c().norm();
    let d_norm = f.d().norm();
    let b_norm = f.b().norm();
    let a_norm = f.a().norm();
    let mut growth = 0.0;
    let mut slope: f64 = 0.0;
    for seg in gs.segments() {
        let gd = vec_norm(&seg.value);
        // ‖Z^c_d‖ ≤ ‖A‖ + ‖B‖‖d‖ + ‖c‖‖C‖ + ‖c‖‖D‖‖d‖, and ‖I⊗v‖ = ‖v‖
        let z_bound = a_norm + b_norm * gd + radius * (c_norm + d_norm * gd);
        growth += seg.dt * z_bound;
        slope = slope.max(c_norm + d_norm * gd);
    }
    gs.horizon() * slope * growth.exp()
}

/// Weyl-operator matrix element `exp(t(−½ − d + c̄ + c̄d))` for constant scalar `c, d`.
pub fn weyl_matrix_element(c: C64, d: C64, t: f64) -> C64 {
    ((-0.5 - d + c.conj() + c.conj() * d) * t).exp()
}

/// `⟨c, d⟩`, conjugate-linear in `c`.
pub fn pairing(c: &[C64], d: &[C64]) -> C64 {
    inner(c, d)
}
