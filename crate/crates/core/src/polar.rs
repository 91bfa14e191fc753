//! Polar decomposition `X = U|X|` of a contraction cocycle with commutative
//! component algebra, at the level of generators: `F = E + G + EΔG`.
//!
//! With `X = B + C*D` and functions of `|D|²` written `f = f_½(|D|²)`, `g = g_½(|D|²)`:
//!
//! ```text
//! G = [[½(A + A* + C*C) + X f X*, X g], [g X*, |D| − I]]
//! E = [[K, L], [M, N − I]]
//!   N|D| = D,  L = −C*N + X g,  M = C − N g X*,
//!   K = ½(A − A* − C*C) − X f X* − L g X*
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generator::{chi, classify, commutes_componentwise, compose, pi_map, Generator};
use crate::numkit::{is_nsd, partial_isometry_residual, ComplexMatrix, PolarFactors};
use crate::powerflow::{f_alpha, g_alpha};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarResiduals {
    /// `‖E + G + EΔG − F‖`
    pub reconstruction: f64,
    /// `‖π(E)‖`
    pub pi_of_e: f64,
    /// `‖N − NN*N‖`
    pub n_partial_isometry: f64,
    /// `‖M*N + LN*N‖`
    pub cross_term: f64,
    /// `‖K + K* + M*M + L(I − N*N)L*‖`
    pub quadratic_term: f64,
}

impl PolarResiduals {
    pub fn max(&self) -> f64 {
        [self.reconstruction, self.pi_of_e, self.n_partial_isometry, self.cross_term, self.quadratic_term]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarPair {
    #[serde(rename = "E")]
    pub e: Generator,
    #[serde(rename = "G")]
    pub g: Generator,
    #[serde(rename = "N")]
    pub n: ComplexMatrix,
    pub residuals: PolarResiduals,
}

fn check_preconditions(f: &Generator, tol: f64) -> Result<()> {
    let (contraction, top) = is_nsd(&chi(f).hermitian_part(), tol)?;
    if !contraction {
        return Err(Error::NotContraction { max_eigenvalue: top });
    }
    let comm = commutes_componentwise(f, true, tol);
    if let Some(pair) = comm.failing_pair {
        return Err(Error::NotCommutative(format!(
            "components F^{}_{}{} and F^{}_{}{} have commutator norm {:e}",
            pair.first.alpha,
            pair.first.beta,
            if pair.first.adjoint { "*" } else { "" },
            pair.second.alpha,
            pair.second.beta,
            if pair.second.adjoint { "*" } else { "" },
            pair.commutator_norm
        )));
    }
    Ok(())
}

/// Everything both parts are built from, sharing one spectral decomposition of `D*D`.
struct Ingredients {
    x: ComplexMatrix,
    f_half: ComplexMatrix,
    g_half: ComplexMatrix,
    modulus: ComplexMatrix,
    n: ComplexMatrix,
}

fn ingredients(f: &Generator, custom_n: Option<&ComplexMatrix>, tol: f64, rank_tol: f64) -> Result<Ingredients> {
    let factors = PolarFactors::new(f.d(), rank_tol)?;
    let unit = |func: fn(f64, f64) -> Result<f64>| move |t: f64| func(t.clamp(0.0, 1.0), 0.5).expect("clamped to [0, 1]");
    let f_half = factors.map_modulus_squared(unit(f_alpha));
    let g_half = factors.map_modulus_squared(unit(g_alpha));
    let modulus = factors.modulus().clone();
    let n = match custom_n {
        None => factors.partial_isometry().clone(),
        Some(n) => {
            check_custom_n(f, n, &modulus, tol)?;
            n.clone()
        }
    };
    let x = f.b() + &f.c().adjoint_mul(f.d());
    Ok(Ingredients { x, f_half, g_half, modulus, n })
}

fn check_custom_n(f: &Generator, n: &ComplexMatrix, modulus: &ComplexMatrix, tol: f64) -> Result<()> {
    if n.shape() != f.d().shape() {
        return Err(Error::DimMismatch(format!("N is {}x{}, D is {}x{}", n.rows(), n.cols(), f.d().rows(), f.d().cols())));
    }
    let pi = partial_isometry_residual(n);
    if pi > tol * (1.0 + n.norm()) {
        return Err(Error::InvalidMatrix(format!("N is not a partial isometry (residual {pi:e})")));
    }
    let fit = n.matmul(modulus).distance(f.d());
    if fit > tol * f.scale() {
        return Err(Error::InvalidMatrix(format!("N|D| differs from D by {fit:e}")));
    }
    Ok(())
}

fn positive_part(f: &Generator, ing: &Ingredients) -> Result<Generator> {
    let x_adj = ing.x.adjoint();
    let mut a = (&(f.a() + &f.a().adjoint()) + &f.c().adjoint_mul(f.c())).scale_real(0.5);
    a += &ing.x.matmul(&ing.f_half).matmul(&x_adj);
    let b = ing.x.matmul(&ing.g_half);
    let c = ing.g_half.matmul(&x_adj);
    Generator::new(f.dim_h(), f.dim_k(), a, b, c, ing.modulus.clone())
}

/// `(K, L, M)` for a given choice of `L` off the range of `|D|`.
fn isometry_blocks(
    f: &Generator,
    ing: &Ingredients,
    l: ComplexMatrix,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let x_adj = ing.x.adjoint();
    let g_x_adj = ing.g_half.matmul(&x_adj);
    let mut k = (&(f.a() - &f.a().adjoint()) - &f.c().adjoint_mul(f.c())).scale_real(0.5);
    k = &k - &ing.x.matmul(&ing.f_half).matmul(&x_adj);
    k = &k - &l.matmul(&g_x_adj);
    let m = f.c() - &ing.n.matmul(&g_x_adj);
    (k, l, m)
}

fn canonical_l(f: &Generator, ing: &Ingredients) -> ComplexMatrix {
    &ing.x.matmul(&ing.g_half) - &f.c().adjoint_mul(&ing.n)
}

fn partial_isometry_part(f: &Generator, ing: &Ingredients) -> Result<Generator> {
    let (k, l, m) = isometry_blocks(f, ing, canonical_l(f, ing));
    Generator::new(f.dim_h(), f.dim_k(), k, l, m, ing.n.clone())
}

/// `K + K* + M*M + L(I − N*N)L*`.
fn quadratic_term(k: &ComplexMatrix, l: &ComplexMatrix, m: &ComplexMatrix, n: &ComplexMatrix) -> ComplexMatrix {
    let defect = &ComplexMatrix::identity(n.rows()) - &n.adjoint_mul(n);
    let mut q = k + &k.adjoint();
    q += &m.adjoint_mul(m);
    q += &l.matmul(&defect).matmul(&l.adjoint());
    q
}

/// Generator `G = χ(F)_½` of the positive part `|X|`.
pub fn positive_part_generator(f: &Generator, tol: f64, rank_tol: f64) -> Result<Generator> {
    check_preconditions(f, tol)?;
    positive_part(f, &ingredients(f, None, tol, rank_tol)?)
}

/// Generator `E` of the partial-isometry part, with the canonical `N` unless one is supplied.
pub fn partial_isometry_part_generator(
    f: &Generator,
    n: Option<&ComplexMatrix>,
    tol: f64,
    rank_tol: f64,
) -> Result<Generator> {
    check_preconditions(f, tol)?;
    partial_isometry_part(f, &ingredients(f, n, tol, rank_tol)?)
}

/// Both parts and their certificates.
pub fn polar_decompose(f: &Generator, n: Option<&ComplexMatrix>, tol: f64, rank_tol: f64) -> Result<PolarPair> {
    check_preconditions(f, tol)?;
    let ing = ingredients(f, n, tol, rank_tol)?;
    let g = positive_part(f, &ing)?;
    let e = partial_isometry_part(f, &ing)?;

    let n = ing.n.clone();
    let nn = n.adjoint_mul(&n);
    let residuals = PolarResiduals {
        reconstruction: compose(&e, &g)?.distance(f),
        pi_of_e: pi_map(&e).norm(),
        n_partial_isometry: partial_isometry_residual(&n),
        cross_term: (&e.c().adjoint_mul(&n) + &e.b().matmul(&nn)).norm(),
        quadratic_term: quadratic_term(e.a(), e.b(), e.c(), &n).norm(),
    };
    Ok(PolarPair { e, g, n, residuals })
}

/// `K′ + K′* + M*M + L′(I − N*N)L′*` for the truncated choice `L′ = L N*N`,
/// which leaves the other two partial-isometry conditions intact.
pub fn truncated_l_quadratic_term(f: &Generator, tol: f64, rank_tol: f64) -> Result<ComplexMatrix> {
    check_preconditions(f, tol)?;
    let ing = ingredients(f, None, tol, rank_tol)?;
    let l = canonical_l(f, &ing).matmul(&ing.n.adjoint_mul(&ing.n));
    let (k, l, m) = isometry_blocks(f, &ing, l);
    Ok(quadratic_term(&k, &l, &m, &ing.n))
}

/// Whether `G` passes as a positive contraction generator and `E` as a
/// partial-isometry generator under `tol`.
pub fn certify(pair: &PolarPair, f: &Generator, tol: f64) -> Result<bool> {
    let threshold = tol * f.scale();
    Ok(pair.residuals.max() <= threshold && classify(&pair.g, tol)?.positive_contraction.verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::C64;
    use crate::sampling::{scalar_contraction_fibre, Sampler};

    const TOL: f64 = 1e-9;

    fn left_shift(m: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(m, m, |i, j| if j == i + 1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    #[test]
    fn zero_generator_splits_trivially() {
        let z = Generator::zero(2, 1);
        let pair = polar_decompose(&z, None, TOL, TOL).unwrap();
        assert!(pair.e.full().norm() < 1e-15);
        assert!(pair.g.full().norm() < 1e-15);
    }

    #[test]
    fn projection_is_its_own_positive_part() {
        let f = Generator::from_full_real(1, 1, &[&[-1.0, 1.0], &[1.0, -1.0]]).unwrap();
        let g = positive_part_generator(&f, TOL, TOL).unwrap();
        assert!(g.distance(&f) < 1e-12);
    }

    #[test]
    fn weyl_is_its_own_partial_isometry_part() {
        let f = Generator::from_full_real(1, 1, &[&[-0.5, -1.0], &[1.0, 0.0]]).unwrap();
        let pair = polar_decompose(&f, None, TOL, TOL).unwrap();
        assert!(pair.e.distance(&f) < 1e-12);
        assert!(pair.g.full().norm() < 1e-12);
    }

    #[test]
    fn pure_gauge_shift() {
        let d = left_shift(4);
        let f = Generator::new(1, 4, ComplexMatrix::zeros(1, 1), ComplexMatrix::zeros(1, 4), ComplexMatrix::zeros(4, 1), d.clone())
            .unwrap();
        let pair = polar_decompose(&f, None, TOL, TOL).unwrap();
        assert!(pair.e.distance(&f) < 1e-14);
        let p = d.adjoint_mul(&d);
        assert!(pair.g.d().distance(&p) < 1e-14);
        assert!(pair.g.a().norm() + pair.g.b().norm() < 1e-14);
    }

    #[test]
    fn shift_example_with_noise_and_negative_control() {
        let d = left_shift(4);
        let (mu, nu) = (0.3, 0.8);
        let v = [C64::new(0.2, 0.1), C64::new(-0.4, 0.0), C64::new(0.0, 0.3), C64::new(0.1, -0.1)];
        let w_vals = [C64::new(0.5, 0.0), C64::new(0.1, 0.2), C64::new(0.0, -0.3), C64::new(0.2, 0.0)];
        let w = ComplexMatrix::column_vector(&w_vals);
        let f = scalar_contraction_fibre(mu, nu, &v, &w, &d);
        let pair = polar_decompose(&f, None, TOL, TOL).unwrap();
        assert!(pair.residuals.max() < 1e-12, "{:?}", pair.residuals);

        // P⊥ projects onto e_1 (index 0)
        let perp_w_sq = w_vals[0].norm_sqr();
        let v_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        let k = pair.e.a()[(0, 0)];
        assert!((k - C64::new(-0.5 * v_sq - 0.5 * nu * nu * perp_w_sq, mu)).norm() < 1e-14);
        assert!((pair.g.a()[(0, 0)].re + 0.5 * nu * nu * (1.0 + perp_w_sq)).abs() < 1e-14);

        let q = truncated_l_quadratic_term(&f, TOL, TOL).unwrap();
        assert!((q[(0, 0)].re - nu * nu * perp_w_sq).abs() < 1e-14);
    }

    #[test]
    fn isometric_d() {
        let mut s = Sampler::new(4);
        let u = s.unitary(3);
        let c = ComplexMatrix::column_vector(&s.vector(3));
        let a = &ComplexMatrix::new(1, 1, vec![C64::new(-0.4, 0.2)]).unwrap() - &c.adjoint_mul(&c).scale_real(0.5);
        let f = Generator::new(1, 3, a, -&c.adjoint_mul(&u), c, u).unwrap();
        let pair = polar_decompose(&f, None, TOL, TOL).unwrap();
        let a = f.a();
        let c = f.c();
        let k = (&(a - &a.adjoint()) - &c.adjoint_mul(c)).scale_real(0.5);
        assert!(pair.e.a().distance(&k) < 1e-13);
        assert!(pair.e.b().distance(&(-&c.adjoint_mul(f.d()))) < 1e-13);
        assert!(pair.e.c().distance(c) < 1e-13);
        assert!(pair.e.d().distance(f.d()) < 1e-13);
        assert!(chi(&pair.e).norm() < 1e-12);
        let g_a = (&(a + &a.adjoint()) + &c.adjoint_mul(c)).scale_real(0.5);
        assert!(pair.g.a().distance(&g_a) < 1e-13);
        assert!(pair.g.b().norm() < 1e-13 && pair.g.d_minus_identity().norm() < 1e-13);
    }

    #[test]
    fn random_commutative_contractions() {
        let mut s = Sampler::new(12);
        for _ in 0..20 {
            let f = s.commutative_contraction_generator(2, 2);
            let pair = polar_decompose(&f, None, TOL, TOL).unwrap();
            assert!(pair.residuals.max() < 1e-9, "{:?}", pair.residuals);
            assert!(certify(&pair, &f, TOL).unwrap());
        }
    }

    #[test]
    fn preconditions() {
        let expanding = Generator::from_full_real(1, 1, &[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
        assert!(matches!(polar_decompose(&expanding, None, TOL, TOL), Err(Error::NotContraction { .. })));
        let c = ComplexMatrix::from_real(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        let d = ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let a = c.adjoint_mul(&c).scale_real(-0.5);
        let f = Generator::new(2, 1, a, c.adjoint(), c, d).unwrap();
        assert!(matches!(polar_decompose(&f, None, TOL, TOL), Err(Error::NotCommutative(_))));
    }

    #[test]
    fn custom_n_must_fit_d() {
        let f = Generator::from_full_real(1, 1, &[&[-1.0, 1.0], &[1.0, -1.0]]).unwrap();
        // D = 0, so any partial isometry works; a unitary extension is admissible.
        let n = ComplexMatrix::from_real(&[&[1.0]]);
        let pair = polar_decompose(&f, Some(&n), TOL, TOL).unwrap();
        assert!(pair.residuals.max() < 1e-12);
        let bad = ComplexMatrix::from_real(&[&[0.5]]);
        assert!(polar_decompose(&f, Some(&bad), TOL, TOL).is_err());
    }
}
