//! Seeded random inputs for the property suites.
//!
//! The stream is SplitMix64 (Vigna's reference constants): the state advances by
//! `0x9E3779B97F4A7C15` and each output is the usual two-multiply finaliser.
//! Uniform reals take the top 53 bits of an output, `(x >> 11) · 2⁻⁵³`, and
//! complex entries draw `re` then `im` from `[-1, 1)`. Nothing else is consumed
//! from the generator, so the sample streams are reproducible from any language.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

use crate::generator::Generator;
use crate::numkit::{ComplexMatrix, C64};

const SUITE_MIX: u64 = 0x9E37_79B9_7F4A_7C15;
const TRIAL_MIX: u64 = 0xD1B5_4A32_D192_ED03;

pub struct Sampler {
    rng: SplitMix64,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self { rng: SplitMix64::seed_from_u64(seed) }
    }

    /// Independent stream for one trial of one suite.
    pub fn stream(seed: u64, suite: u64, trial: u64) -> Self {
        let mixed = seed ^ suite.wrapping_mul(SUITE_MIX) ^ trial.wrapping_mul(TRIAL_MIX);
        let state = SplitMix64::seed_from_u64(mixed).next_u64();
        Self::new(state)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `lo..=hi`.
    pub fn int_in(&mut self, lo: usize, hi: usize) -> usize {
        lo + ((self.uniform() * (hi - lo + 1) as f64) as usize).min(hi - lo)
    }

    pub fn complex(&mut self) -> C64 {
        let re = self.uniform_in(-1.0, 1.0);
        let im = self.uniform_in(-1.0, 1.0);
        C64::new(re, im)
    }

    pub fn vector(&mut self, len: usize) -> Vec<C64> {
        (0..len).map(|_| self.complex()).collect()
    }

    pub fn matrix(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex())
    }

    pub fn hermitian(&mut self, n: usize) -> ComplexMatrix {
        self.matrix(n, n).hermitian_part()
    }

    /// Gram–Schmidt on the columns of a random matrix.
    pub fn unitary(&mut self, n: usize) -> ComplexMatrix {
        let m = self.matrix(n, n);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = m.column(j);
            for prev in &cols {
                let proj: C64 = prev.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, p) in v.iter_mut().zip(prev) {
                    *x -= proj * p;
                }
            }
            let norm = crate::numkit::vec_norm(&v);
            cols.push(v.into_iter().map(|z| z / norm).collect());
        }
        ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
    }

    /// Random matrix with operator norm at most `bound` (scaled through the Frobenius norm).
    pub fn contraction(&mut self, rows: usize, cols: usize, bound: f64) -> ComplexMatrix {
        let m = self.matrix(rows, cols);
        let target = bound * self.uniform_in(0.05, 1.0);
        m.scale_real(target / m.norm())
    }

    /// Random matrix of exact operator norm `1` with singular values drawn from `{0, 1, (0,1)}`.
    pub fn structured_contraction(&mut self, n: usize) -> ComplexMatrix {
        let u = self.unitary(n);
        let v = self.unitary(n);
        let sigma: Vec<f64> = (0..n)
            .map(|_| match self.int_in(0, 3) {
                0 => 0.0,
                1 => 1.0,
                _ => self.uniform_in(0.1, 1.0),
            })
            .collect();
        u.matmul(&ComplexMatrix::from_real_diagonal(&sigma)).matmul(&v.adjoint())
    }

    /// Hermitian matrix with spectrum drawn from `[lo, hi]`.
    pub fn hermitian_with_spectrum(&mut self, n: usize, lo: f64, hi: f64) -> ComplexMatrix {
        let u = self.unitary(n);
        let values: Vec<f64> = (0..n).map(|_| self.uniform_in(lo, hi)).collect();
        u.matmul(&ComplexMatrix::from_real_diagonal(&values)).matmul(&u.adjoint())
    }

    /// Generic generator with no structure.
    pub fn generator(&mut self, n: usize, m: usize) -> Generator {
        let full = self.matrix(n * (1 + m), n * (1 + m));
        Generator::from_full(n, m, &full).expect("shape is consistent")
    }

    /// Generator of a positive contraction cocycle with commuting components.
    ///
    /// Each joint eigenvector `x` of the component algebra carries a scalar-`h`
    /// fibre `[[a, b], [b*, d − I]]` with `a ≤ 0`, `0 ≤ d ≤ I` and
    /// `b = (−a)^{1/2} v (I − d)^{1/2}` for a contraction row `v`.
    pub fn positive_contraction_generator(&mut self, n: usize, m: usize) -> Generator {
        let basis = self.unitary(n);
        let fibres: Vec<Generator> = (0..n)
            .map(|_| {
                let a = -self.uniform_in(0.0, 2.0);
                let d = self.hermitian_with_spectrum(m, 0.0, 1.0);
                let v = self.contraction(1, m, 1.0);
                let root = crate::numkit::apply_scalar_function(
                    &(&ComplexMatrix::identity(m) - &d),
                    f64::sqrt,
                    crate::numkit::Interval::NONNEGATIVE,
                    1e-9,
                )
                .expect("I - d is positive");
                let b = v.matmul(&root).scale_real((-a).sqrt());
                let a = ComplexMatrix::from_real(&[&[a]]);
                Generator::new(1, m, a, b.clone(), b.adjoint(), d).expect("fibre shapes")
            })
            .collect();
        Generator::from_fibres(&basis, &fibres).expect("fibre shapes")
    }

    /// Contraction-cocycle generator with commuting (normal) components.
    ///
    /// Fibres follow the general scalar-`h` contraction form
    /// `[[iμ − (ν² + ‖v‖²)/2, ⟨ν(I − D*D)^{1/2} w − D*v|], [|v⟩, D − I]]`.
    pub fn commutative_contraction_generator(&mut self, n: usize, m: usize) -> Generator {
        let basis = self.unitary(n);
        let fibres: Vec<Generator> = (0..n)
            .map(|_| {
                let d = if self.uniform() < 0.5 {
                    self.structured_contraction(m)
                } else {
                    self.contraction(m, m, 1.0)
                };
                let mu = self.uniform_in(-1.0, 1.0);
                let nu = self.uniform_in(0.0, 1.5);
                let v = self.vector(m);
                let w = self.contraction(m, 1, 1.0);
                scalar_contraction_fibre(mu, nu, &v, &w, &d)
            })
            .collect();
        Generator::from_fibres(&basis, &fibres).expect("fibre shapes")
    }

    /// Contraction generator without any commutativity, built from
    /// `B + C*D = (−A−A*−C*C)^{1/2} V (I − D*D)^{1/2}`.
    pub fn contraction_generator(&mut self, n: usize, m: usize, strict: bool) -> Generator {
        let nm = n * m;
        let shrink = if strict { 0.95 } else { 1.0 };
        let c = self.matrix(nm, n);
        let d = self.contraction(nm, nm, shrink);
        let h = self.hermitian_with_spectrum(n, if strict { 0.1 } else { 0.0 }, 2.0);
        let skew = self.hermitian(n).scale(C64::new(0.0, 1.0));
        let a = &(&h.scale_real(-0.5) - &c.adjoint_mul(&c).scale_real(0.5)) + &skew;
        let v = self.contraction(n, nm, shrink);
        let root_h = crate::numkit::apply_scalar_function(&h, f64::sqrt, crate::numkit::Interval::NONNEGATIVE, 1e-9)
            .expect("h is positive");
        let root_d = crate::numkit::apply_scalar_function(
            &(&ComplexMatrix::identity(nm) - &d.adjoint_mul(&d)),
            f64::sqrt,
            crate::numkit::Interval::NONNEGATIVE,
            1e-9,
        )
        .expect("d is a contraction");
        let b = &root_h.matmul(&v).matmul(&root_d) - &c.adjoint_mul(&d);
        Generator::new(n, m, a, b, c, d).expect("shapes")
    }

    /// Unitary-cocycle generator whose components are diagonal in `basis`:
    /// scalar fibres `[[iμ − ‖v‖²/2, −⟨D*v|], [|v⟩, D − I]]`, `D` unitary.
    pub fn commutative_unitary_generator(&mut self, basis: &ComplexMatrix, m: usize) -> Generator {
        let fibres: Vec<Generator> = (0..basis.rows())
            .map(|_| {
                let v = ComplexMatrix::column_vector(&self.vector(m));
                let d = self.unitary(m);
                let a = C64::new(-0.5 * v.norm().powi(2), self.uniform_in(-1.0, 1.0));
                let a = ComplexMatrix::new(1, 1, vec![a]).expect("1x1");
                let b = -&v.adjoint().matmul(&d);
                Generator::new(1, m, a, b, v, d).expect("fibre shapes")
            })
            .collect();
        Generator::from_fibres(basis, &fibres).expect("fibre shapes")
    }

    /// Even mixture of strict contraction, generic, unitary and partial-isometry
    /// generators, so that quadratic-map verdicts come out both ways.
    pub fn quadratic_mixture(&mut self, n: usize, m: usize) -> Generator {
        match self.int_in(0, 3) {
            0 => self.contraction_generator(n, m, true),
            1 => self.generator(n, m),
            2 => self.unitary_generator(n, m),
            _ => {
                let f = self.commutative_contraction_generator(n, m);
                crate::polar::partial_isometry_part_generator(&f, None, 1e-9, 1e-9).expect("commutative contraction")
            }
        }
    }

    /// Unitary-cocycle generator `[[iS − C*C/2, −C*W], [C, W − I]]`, `W` unitary.
    pub fn unitary_generator(&mut self, n: usize, m: usize) -> Generator {
        let nm = n * m;
        let c = self.matrix(nm, n);
        let w = self.unitary(nm);
        let s = self.hermitian(n);
        let a = &s.scale(C64::new(0.0, 1.0)) - &c.adjoint_mul(&c).scale_real(0.5);
        let b = -&c.adjoint_mul(&w);
        Generator::new(n, m, a, b, c, w).expect("shapes")
    }
}

/// Scalar-`h` contraction generator in the `(μ, ν, v, w, D)` parametrisation.
pub fn scalar_contraction_fibre(mu: f64, nu: f64, v: &[C64], w: &ComplexMatrix, d: &ComplexMatrix) -> Generator {
    let m = v.len();
    let v_col = ComplexMatrix::column_vector(v);
    let defect = crate::numkit::apply_scalar_function(
        &(&ComplexMatrix::identity(m) - &d.adjoint_mul(d)),
        f64::sqrt,
        crate::numkit::Interval::NONNEGATIVE,
        1e-9,
    )
    .expect("d is a contraction");
    let ket = &defect.matmul(w).scale_real(nu) - &d.adjoint_mul(&v_col);
    let norm_v_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    let a = C64::new(-0.5 * (nu * nu + norm_v_sq), mu);
    Generator::new(1, m, ComplexMatrix::new(1, 1, vec![a]).expect("1x1"), ket.adjoint(), v_col, d.clone())
        .expect("fibre shapes")
}
