//! Seeded invariant suites behind the `verify` command.
//!
//! Trial `i` of suite `s` draws from `Sampler::stream(seed, s, i)`, so results
//! depend only on `(seed, trials, tol)` and are merged in trial order.

use serde::{Deserialize, Serialize};

use crate::gauge::PureGauge;
use crate::generator::{chi, classify, compose, phi_map, pi_map, Generator};
use crate::numkit::{
    apply_scalar_function, contraction_factor, herm_eig, is_nsd, is_partial_isometry, mat_exp, polar_part,
    ComplexMatrix, Interval, C64,
};
use crate::polar::{polar_decompose, positive_part_generator};
use crate::powerflow::{f_alpha, g_alpha, h_alpha, power_generator};
use crate::sampling::Sampler;
use crate::semigroups::{
    lipschitz_bound, matrix_element, recover_generator, semigroup_at, z_table, Order, Segment, StepFunction,
};

/// Outcome of one trial: `Ok(true)` checked, `Ok(false)` skipped by a margin filter.
type Trial = std::result::Result<bool, String>;

struct Suite {
    name: &'static str,
    run: fn(&mut Sampler, f64) -> Trial,
}

const SUITES: [Suite; 7] = [
    Suite { name: "numkit", run: numkit_trial },
    Suite { name: "generator", run: generator_trial },
    Suite { name: "semigroups", run: semigroups_trial },
    Suite { name: "powerflow", run: powerflow_trial },
    Suite { name: "polar", run: polar_trial },
    Suite { name: "gauge", run: gauge_trial },
    Suite { name: "serialization", run: serialization_trial },
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub trials: u64,
    pub passed: u64,
    pub skipped: u64,
    pub failed: u64,
    pub first_failure: Option<TrialFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub trials: u64,
    pub tol: f64,
    pub suites: Vec<SuiteReport>,
    pub all_passed: bool,
}

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

pub fn verify(seed: u64, trials: u64, tol: f64) -> VerifyReport {
    let suites: Vec<SuiteReport> = SUITES
        .iter()
        .enumerate()
        .map(|(index, suite)| {
            let mut report = SuiteReport {
                name: suite.name.to_string(),
                trials,
                passed: 0,
                skipped: 0,
                failed: 0,
                first_failure: None,
            };
            for trial in 0..trials {
                let mut sampler = Sampler::stream(seed, index as u64, trial);
                match (suite.run)(&mut sampler, tol) {
                    Ok(true) => report.passed += 1,
                    Ok(false) => report.skipped += 1,
                    Err(message) => {
                        report.failed += 1;
                        report.first_failure.get_or_insert(TrialFailure { trial, message });
                    }
                }
            }
            report
        })
        .collect();
    let all_passed = suites.iter().all(|s| s.failed == 0);
    VerifyReport { seed, trials, tol, suites, all_passed }
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn dims(s: &mut Sampler) -> (usize, usize) {
    (s.int_in(1, 3), s.int_in(1, 2))
}

/// Operator norm through the top eigenvalue of `M*M`.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    herm_eig(&m.adjoint_mul(m).hermitian_part(), 1e-6).map(|e| e.max_eigenvalue().max(0.0).sqrt()).unwrap_or(f64::NAN)
}

fn numkit_trial(s: &mut Sampler, tol: f64) -> Trial {
    let n = s.int_in(1, 5);

    let h = s.hermitian(n);
    let rec = herm_eig(&h, tol).map_err(err)?.reconstruct().distance(&h);
    ensure(rec <= 1e-10 * (1.0 + h.norm()), || format!("eigen reconstruction residual {rec:e}"))?;

    // commuting pair: polynomials in one Hermitian matrix
    let a = s.hermitian(n);
    let b = &a.matmul(&a).scale_real(s.uniform_in(-1.0, 1.0)) + &a.scale_real(s.uniform_in(-1.0, 1.0));
    if a.commutator(&b).norm() <= 1e-13 {
        let lhs = mat_exp(&(&a + &b)).map_err(err)?;
        let rhs = mat_exp(&a).map_err(err)?.matmul(&mat_exp(&b).map_err(err)?);
        let gap = lhs.distance(&rhs);
        ensure(gap <= 1e-9 * (1.0 + lhs.norm()), || format!("exp(A+B) vs exp(A)exp(B): {gap:e}"))?;
    }

    let p = s.hermitian_with_spectrum(n, 0.0, 1.0);
    let (alpha, beta) = (s.uniform_in(0.1, 3.0), s.uniform_in(0.1, 3.0));
    let power = |m: &ComplexMatrix, e: f64| apply_scalar_function(m, |x| x.powf(e), Interval::NONNEGATIVE, tol);
    let twice = power(&power(&p, beta).map_err(err)?, alpha).map_err(err)?;
    let once = power(&p, alpha * beta).map_err(err)?;
    ensure(twice.distance(&once) <= 1e-9, || format!("h_α∘h_β vs h_αβ: {:e}", twice.distance(&once)))?;

    let d = s.matrix(n, n);
    let (v, _) = polar_part(&d, tol).map_err(err)?;
    ensure(is_partial_isometry(&v, 1e-9).holds, || "polar part is not a partial isometry".into())?;

    let rows = s.int_in(1, 4);
    let inner_dim = s.int_in(1, 4);
    let t = s.matrix(inner_dim, n);
    let w0 = s.contraction(rows, t.rows(), 1.0);
    let sm = w0.matmul(&t);
    let w = contraction_factor(&sm, &t, tol).map_err(err)?;
    let w_norm = operator_norm(&w);
    let fit = sm.distance(&w.matmul(&t));
    ensure(w_norm <= 1.0 + 10.0 * tol, || format!("contraction factor has norm {w_norm}"))?;
    ensure(fit <= 10.0 * tol * (1.0 + sm.norm()), || format!("S − WT residual {fit:e}"))?;
    Ok(true)
}

fn generator_trial(s: &mut Sampler, tol: f64) -> Trial {
    let (n, m) = dims(s);
    let f = s.quadratic_mixture(n, m);
    let scale = f.scale();

    // φ(F) = (I + F*Δ) χ(F*) (I + ΔF)
    let full = f.full();
    let delta = crate::generator::delta(n, m);
    let id = ComplexMatrix::identity(f.size());
    let factored = (&id + &full.adjoint().matmul(&delta))
        .matmul(&chi(&f.adjoint()))
        .matmul(&(&id + &delta.matmul(&full)));
    let phi = phi_map(&f);
    ensure(phi.distance(&factored) <= 1e-12 * scale, || format!("phi identity residual {:e}", phi.distance(&factored)))?;

    let report = classify(&f, tol).map_err(err)?;
    ensure(report.implications_hold(), || format!("classification implications broken: {report:?}"))?;

    // compose: unit and associativity
    let g = s.generator(n, m);
    let h = s.generator(n, m);
    let zero = Generator::zero(n, m);
    let unit = compose(&f, &zero).map_err(err)?.distance(&f).max(compose(&zero, &f).map_err(err)?.distance(&f));
    ensure(unit <= 1e-12 * scale, || format!("0 is not a unit: {unit:e}"))?;
    let left = compose(&compose(&f, &g).map_err(err)?, &h).map_err(err)?;
    let right = compose(&f, &compose(&g, &h).map_err(err)?).map_err(err)?;
    let assoc = left.distance(&right);
    ensure(assoc <= 1e-12 * f.scale() * g.scale() * h.scale(), || format!("associativity residual {assoc:e}"))?;

    // unitary × unitary with commuting blocks (diagonal in a shared basis)
    let basis = s.unitary(n);
    let u1 = s.commutative_unitary_generator(&basis, m);
    let u2 = s.commutative_unitary_generator(&basis, m);
    let chi_prod = chi(&compose(&u1, &u2).map_err(err)?).norm();
    ensure(chi_prod <= 1e-9, || format!("χ of a product of unitary generators: {chi_prod:e}"))?;

    // semidefinite and nullity verdicts of χ, φ agree across F and F* (margin-filtered)
    let margin = 10.0 * tol;
    let tops = [chi(&f), chi(&f.adjoint()), phi_map(&f), phi_map(&f.adjoint())]
        .iter()
        .map(|x| is_nsd(&x.hermitian_part(), tol).map(|(_, top)| top))
        .collect::<crate::Result<Vec<f64>>>()
        .map_err(err)?;
    if tops.iter().all(|t| t.abs() >= margin) {
        let signs: Vec<bool> = tops.iter().map(|&t| t < 0.0).collect();
        ensure(signs.iter().all(|&b| b == signs[0]), || format!("semidefinite verdicts disagree: {tops:?}"))?;
    }
    let norms = [pi_map(&f).norm(), pi_map(&f.adjoint()).norm(), phi_map(&f).norm(), phi_map(&f.adjoint()).norm()];
    let (lo, hi) = (tol * scale, margin * scale);
    if norms.iter().all(|&x| x <= lo || x >= hi) {
        let zero: Vec<bool> = norms.iter().map(|&x| x <= lo).collect();
        ensure(zero.iter().all(|&b| b == zero[0]), || format!("nullity verdicts disagree: {norms:?}"))?;
    }
    Ok(true)
}

fn random_step(s: &mut Sampler, breakpoints: &[f64], m: usize) -> StepFunction {
    let segments = breakpoints.windows(2).map(|w| Segment { dt: w[1] - w[0], value: s.vector(m) }).collect();
    StepFunction::new(segments).expect("positive durations")
}

fn random_partition(s: &mut Sampler, pieces: usize, horizon: f64) -> Vec<f64> {
    let mut cuts: Vec<f64> = (1..pieces).map(|_| s.uniform_in(0.05, 0.95) * horizon).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
    std::iter::once(0.0).chain(cuts).chain(std::iter::once(horizon)).collect()
}

/// Splits every segment in two equal halves.
fn halve(f: &StepFunction) -> StepFunction {
    let segments = f
        .segments()
        .iter()
        .flat_map(|seg| {
            let half = Segment { dt: seg.dt / 2.0, value: seg.value.clone() };
            [half.clone(), half]
        })
        .collect();
    StepFunction::new(segments).expect("halves are positive")
}

fn semigroups_trial(s: &mut Sampler, _tol: f64) -> Trial {
    let (n, m) = dims(s);
    let horizon = s.uniform_in(0.2, 1.5);
    let f = s.contraction_generator(n, m, true);
    let grid = random_partition(s, 3, horizon);
    let fs = random_step(s, &grid, m);
    let grid = random_partition(s, 3, horizon);
    let gs = random_step(s, &grid, m);

    let me = matrix_element(&f, &fs, &gs, Order::Left).map_err(err)?;
    let refined = matrix_element(&f, &halve(&fs), &gs, Order::Left).map_err(err)?;
    ensure(me.distance(&refined) <= 1e-10 * (1.0 + me.norm()), || format!("refinement changed the matrix element by {:e}", me.distance(&refined)))?;

    // adjoint cocycle
    let adj = matrix_element(&f.adjoint(), &fs, &gs, Order::Right).map_err(err)?;
    let swapped = matrix_element(&f, &gs, &fs, Order::Left).map_err(err)?.adjoint();
    ensure(adj.distance(&swapped) <= 1e-10 * (1.0 + adj.norm()), || format!("adjoint cocycle residual {:e}", adj.distance(&swapped)))?;

    // (Q^{c,d})* = Q^{d,c} exactly when F = F*
    let (c, d, t) = (s.vector(m), s.vector(m), s.uniform_in(0.1, 2.0));
    let herm = Generator::from_full(n, m, &f.full().hermitian_part()).map_err(err)?;
    let symmetric = |g: &Generator| -> std::result::Result<f64, String> {
        let q = semigroup_at(g, &c, &d, t).map_err(err)?;
        let r = semigroup_at(g, &d, &c, t).map_err(err)?;
        Ok(q.adjoint().distance(&r) / (1.0 + q.norm()))
    };
    ensure(symmetric(&herm)? <= 1e-10, || "self-adjoint F breaks (Q^{c,d})* = Q^{d,c}".into())?;
    if f.full().hermitian_defect() > 1e-3 {
        let mut broken = symmetric(&f)? > 1e-10;
        for _ in 0..3 {
            let e = s.vector(m);
            let q = semigroup_at(&f, &e, &e, t).map_err(err)?;
            broken |= q.adjoint().distance(&q) > 1e-10;
            let zero = vec![C64::new(0.0, 0.0); m];
            let q = semigroup_at(&f, &zero, &e, t).map_err(err)?;
            let r = semigroup_at(&f, &e, &zero, t).map_err(err)?;
            broken |= q.adjoint().distance(&r) > 1e-10;
        }
        ensure(broken, || "non-self-adjoint F passed the adjoint symmetry test".into())?;
    }

    // commutative family: left and right products agree
    let comm = s.commutative_contraction_generator(n, m);
    let l = matrix_element(&comm, &fs, &gs, Order::Left).map_err(err)?;
    let r = matrix_element(&comm, &fs, &gs, Order::Right).map_err(err)?;
    ensure(l.distance(&r) <= 1e-10 * (1.0 + l.norm()), || format!("left/right disagree by {:e}", l.distance(&r)))?;

    // Lipschitz smoke test: perturb f on its own partition
    let radius = fs.segments().iter().map(|x| crate::numkit::vec_norm(&x.value)).fold(0.0, f64::max) + 0.1;
    let bumped = StepFunction::new(
        fs.segments()
            .iter()
            .map(|seg| Segment {
                dt: seg.dt,
                value: seg.value.iter().map(|z| z + s.complex().scale(0.05 / (m as f64).sqrt())).collect(),
            })
            .collect(),
    )
    .map_err(err)?;
    let shift = fs.sup_distance(&bumped).map_err(err)?;
    let moved = matrix_element(&f, &bumped, &gs, Order::Left).map_err(err)?.distance(&me);
    let bound = lipschitz_bound(&f, &gs, radius) * shift;
    ensure(moved <= bound * (1.0 + 1e-12), || format!("Lipschitz bound {bound:e} violated by {moved:e}"))?;

    let back = recover_generator(&z_table(&f).map_err(err)?, n, m).map_err(err)?;
    ensure(back.distance(&f) <= 1e-12 * f.scale(), || format!("Z-table round trip residual {:e}", back.distance(&f)))?;
    Ok(true)
}

fn powerflow_trial(s: &mut Sampler, tol: f64) -> Trial {
    let t = if s.uniform() < 0.3 { 1.0 - s.uniform() * 1e-6 } else { s.uniform() };
    let alpha = s.uniform_in(0.1, 4.0);
    let beta = s.uniform_in(0.1, 4.0);
    let fa = |x: f64, a: f64| f_alpha(x, a).expect("in domain");
    let ga = |x: f64, a: f64| g_alpha(x, a).expect("in domain");
    let ha = |x: f64, a: f64| h_alpha(x, a).expect("in domain");
    let close = |lhs: f64, rhs: f64, what: &str| {
        ensure((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())), || format!("{what} at t={t}, α={alpha}, β={beta}: {lhs} vs {rhs}"))
    };
    close(ga(t, alpha), alpha - (1.0 - t) * fa(t, alpha), "g = α − (1−t) f")?;
    close(fa(t, alpha) + fa(t, beta) + ga(t, alpha) * ga(t, beta), fa(t, alpha + beta), "additive f")?;
    close(ga(t, beta) + ga(t, alpha) * ha(t, beta), ga(t, alpha + beta), "additive g")?;
    close(ha(t, alpha) * ha(t, beta), ha(t, alpha + beta), "additive h")?;
    let hat = ha(t, alpha);
    close(beta * fa(t, alpha) + ga(t, alpha).powi(2) * fa(hat, beta), fa(t, alpha * beta), "composite f")?;
    close(ga(t, alpha) * ga(hat, beta), ga(t, alpha * beta), "composite g")?;
    close(2.0 * fa(t, 0.5) + ga(t, 0.5).powi(2), 0.0, "2f_½ + g_½² = 0")?;
    close(t.sqrt() * ga(t, 0.5), 1.0 - ga(t, 0.5), "√t g_½ = 1 − g_½")?;

    let (n, m) = dims(s);
    let f = s.positive_contraction_generator(n, m);
    let (a, b) = (s.uniform_in(0.2, 3.0), s.uniform_in(0.2, 3.0));
    let pa = power_generator(&f, a, tol).map_err(err)?;
    let pb = power_generator(&f, b, tol).map_err(err)?;
    let sum = compose(&pa, &pb).map_err(err)?.distance(&power_generator(&f, a + b, tol).map_err(err)?);
    ensure(sum <= 1e-9, || format!("F_α ∘ F_β vs F_(α+β): {sum:e}"))?;
    let nested = power_generator(&pa, b, tol).map_err(err)?.distance(&power_generator(&f, a * b, tol).map_err(err)?);
    ensure(nested <= 1e-9, || format!("(F_α)_β vs F_αβ: {nested:e}"))?;
    ensure(classify(&pa, tol).map_err(err)?.positive_contraction.verdict, || "F_α is not a positive contraction generator".into())?;
    Ok(true)
}

fn polar_trial(s: &mut Sampler, tol: f64) -> Trial {
    let (n, m) = dims(s);
    let f = s.commutative_contraction_generator(n, m);
    let pair = polar_decompose(&f, None, tol, tol).map_err(err)?;
    let threshold = tol * f.scale();
    ensure(pair.residuals.max() <= threshold, || format!("polar residuals {:?}", pair.residuals))?;
    ensure(classify(&pair.g, tol).map_err(err)?.positive_contraction.verdict, || "G is not a positive contraction generator".into())?;

    let chi_gen = Generator::from_full(n, m, &chi(&f)).map_err(err)?;
    let via_power = power_generator(&chi_gen, 0.5, tol).map_err(err)?;
    let g = positive_part_generator(&f, tol, tol).map_err(err)?;
    // χ(F) only carries D*D, so its square root sees kernel directions at √ε.
    let slack = f64::EPSILON.sqrt() * f.scale().powi(2);
    ensure(g.distance(&via_power) <= slack, || format!("G vs χ(F)_½: {:e}", g.distance(&via_power)))?;
    Ok(true)
}

fn gauge_trial(s: &mut Sampler, tol: f64) -> Trial {
    let n = s.int_in(1, 3);
    let d = if s.uniform() < 0.5 { s.structured_contraction(n) } else { s.contraction(n, n, 1.0) };
    let scalar = PureGauge::new(d, n, 1).map_err(err)?;
    let tensor = scalar.scan_partial_isometries(4, tol).map_err(err)?;
    let fast = scalar.is_power_partial_isometry(4, tol).map_err(err)?;
    for (x, y) in tensor.levels.iter().zip(&fast.levels) {
        ensure((x.residual - y.residual).abs() <= 1e-12, || format!("level {} residuals differ", x.level))?;
    }

    let (h, k) = (s.int_in(1, 2), 2);
    let g = PureGauge::new(s.matrix(h * k, h * k), h, k).map_err(err)?;
    let order = [3, 1, 2];
    let product = g.lifted_product(3).map_err(err)?;
    let conj = g.permute_k_legs(&product, &order).map_err(err)?;
    let reordered = g.lifted_product_in_order(&order).map_err(err)?;
    ensure(conj.distance(&reordered) <= 1e-12 * (1.0 + conj.norm()), || "leg permutation does not reorder the product".into())?;

    let u = PureGauge::new(s.unitary(h * k), h, k).map_err(err)?;
    ensure(u.scan_partial_isometries(3, tol).map_err(err)?.first_failure.is_none(), || "unitary D fails a level".into())?;
    Ok(true)
}

fn serialization_trial(s: &mut Sampler, tol: f64) -> Trial {
    let (n, m) = dims(s);
    let f = s.generator(n, m);
    let text = serde_json::to_string(&f).map_err(err)?;
    let back: Generator = serde_json::from_str(&text).map_err(err)?;
    ensure(back == f, || "generator JSON round trip is lossy".into())?;

    let c = s.commutative_contraction_generator(n, m);
    let pair = polar_decompose(&c, None, tol, tol).map_err(err)?;
    let text = serde_json::to_string(&pair).map_err(err)?;
    let back: crate::polar::PolarPair = serde_json::from_str(&text).map_err(err)?;
    ensure(back == pair, || "polar pair JSON round trip is lossy".into())?;
    Ok(true)
}
