//! Acceptance criteria. Run with `cargo test --test acceptance`; prints one line per criterion
//! and exits nonzero if any criterion fails.

use std::f64::consts::{E, FRAC_PI_4, PI};
use std::time::Instant;

use cocycle_core::gauge::{tilted_projection, PureGauge};
use cocycle_core::generator::{chi, classify, compose, delta, phi_map, pi_map, Generator};
use cocycle_core::numkit::{is_nsd, ComplexMatrix, C64};
use cocycle_core::polar::{polar_decompose, truncated_l_quadratic_term, PolarPair};
use cocycle_core::powerflow::{f_alpha, g_alpha, h_alpha, power_generator};
use cocycle_core::sampling::{scalar_contraction_fibre, Sampler};
use cocycle_core::semigroups::{matrix_element, recover_generator, z_table, Order, Segment, StepFunction};
use cocycle_core::verify::verify;

const TOL: f64 = 1e-9;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn weyl() -> Generator {
    Generator::from_full_real(1, 1, &[&[-0.5, -1.0], &[1.0, 0.0]]).unwrap()
}

fn projection() -> Generator {
    Generator::from_full_real(1, 1, &[&[-1.0, 1.0], &[1.0, -1.0]]).unwrap()
}

/// Unitary generator with F = F* whose components C, D do not commute.
fn flip_gauge() -> Generator {
    let cm = ComplexMatrix::from_real(&[&[1.0, 0.0], &[-1.0, 0.0]]);
    let d = ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let a = cm.adjoint_mul(&cm).scale_real(-0.5);
    Generator::new(2, 1, a, cm.adjoint(), cm, d).unwrap()
}

fn left_shift(m: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(m, m, |i, j| if j == i + 1 { c(1.0, 0.0) } else { c(0.0, 0.0) })
}

fn weyl_example() -> Check {
    let f = weyl();
    let chi_f = chi(&f).norm();
    let chi_adj = chi(&f.adjoint()).norm();
    ensure(chi_f <= 1e-12 && chi_adj <= 1e-12, || format!("‖χ(F)‖ = {chi_f:e}, ‖χ(F*)‖ = {chi_adj:e}"))?;
    let r = classify(&f, TOL).map_err(e)?;
    ensure(r.unitary.verdict, || "not classified unitary".into())?;
    ensure(f.full() != f.full().adjoint() && !r.self_adjoint.verdict, || "F = F* not detected as false".into())?;

    let (cv, dv) = (c(0.3, -0.7), c(-0.4, 0.5));
    let mut worst = 0.0f64;
    for t in [0.1, 1.0, 5.0] {
        let fs = StepFunction::constant(t, vec![cv]).map_err(e)?;
        let gs = StepFunction::constant(t, vec![dv]).map_err(e)?;
        let got = matrix_element(&f, &fs, &gs, Order::Left).map_err(e)?[(0, 0)];
        let oracle = (t * (c(-0.5, 0.0) - dv + cv.conj() + cv.conj() * dv)).exp();
        worst = worst.max((got - oracle).norm() / oracle.norm().max(1.0));
    }
    ensure(worst <= 1e-10, || format!("Weyl matrix element off by {worst:e}"))?;
    Ok(format!("χ residuals {chi_f:.1e}/{chi_adj:.1e}, matrix element error {worst:.1e}"))
}

fn flip_gauge_check() -> Check {
    let f = flip_gauge();
    ensure(f.full() == f.full().adjoint(), || "F ≠ F*".into())?;
    let chi_f = chi(&f).norm();
    ensure(chi_f <= 1e-12, || format!("‖χ(F)‖ = {chi_f:e}"))?;
    let comm = f.c().matmul(f.d()).distance(&f.d().matmul(f.c()));
    ensure(comm >= 1.0, || format!("‖CD − DC‖ = {comm}"))?;
    let r = classify(&f, TOL).map_err(e)?;
    ensure(r.unitary.verdict, || "not unitary".into())?;
    ensure(r.adjoint_equals_time_reversed.verdict, || "not adjoint-equals-time-reversed".into())?;
    ensure(!r.self_adjoint.verdict, || "classified self-adjoint".into())?;
    Ok(format!("‖χ(F)‖ = {chi_f:.1e}, ‖CD − DC‖ = {comm:.3}"))
}

fn quadratic_form_verdicts() -> Check {
    let mut s = Sampler::new(2024);
    let (mut a_seen, mut b_seen) = (0usize, 0usize);
    let (mut a_kinds, mut b_kinds) = ([false; 2], [false; 2]);
    let mut worst_phi = 0.0f64;
    let mut draws = 0usize;
    while a_seen < 200 || b_seen < 200 {
        draws += 1;
        ensure(draws <= 20_000, || format!("only {a_seen}/{b_seen} samples cleared the margin filter"))?;
        let (n, m) = (s.int_in(1, 3), s.int_in(1, 2));
        let f = s.quadratic_mixture(n, m);
        let scale = f.scale();

        let full = f.full();
        let id = ComplexMatrix::identity(f.size());
        let dl = delta(n, m);
        let factored = (&id + &full.adjoint().matmul(&dl)).matmul(&chi(&f.adjoint())).matmul(&(&id + &dl.matmul(&full)));
        worst_phi = worst_phi.max(phi_map(&f).distance(&factored) / scale);

        let quads = [chi(&f), chi(&f.adjoint()), phi_map(&f), phi_map(&f.adjoint())];
        let tops: Vec<f64> = quads.iter().map(|q| is_nsd(&q.hermitian_part(), TOL).map(|v| v.1)).collect::<Result<_, _>>().map_err(e)?;
        if a_seen < 200 && tops.iter().all(|t| t.abs() >= 1e-8) {
            let nsd: Vec<bool> = tops.iter().map(|&t| t < 0.0).collect();
            ensure(nsd.iter().all(|&b| b == nsd[0]), || format!("part (a) verdicts disagree: {tops:?}"))?;
            a_kinds[nsd[0] as usize] = true;
            a_seen += 1;
        }
        let norms = [pi_map(&f).norm(), pi_map(&f.adjoint()).norm(), quads[2].norm(), quads[3].norm()];
        let (lo, hi) = (TOL * scale, 10.0 * TOL * scale);
        if b_seen < 200 && norms.iter().all(|&x| x <= lo || x >= hi) {
            let null: Vec<bool> = norms.iter().map(|&x| x <= lo).collect();
            ensure(null.iter().all(|&b| b == null[0]), || format!("part (b) verdicts disagree: {norms:?}"))?;
            b_kinds[null[0] as usize] = true;
            b_seen += 1;
        }
    }
    ensure(a_kinds == [true; 2] && b_kinds == [true; 2], || format!("one-sided sample: {a_kinds:?} {b_kinds:?}"))?;
    ensure(worst_phi <= 1e-12, || format!("φ identity residual {worst_phi:e}·scale"))?;
    Ok(format!("200 + 200 filtered samples from {draws} draws, φ identity ≤ {worst_phi:.1e}·scale"))
}

fn scalar_functions() -> Check {
    let alphas = [0.5, 1.0, 1.5, 2.0, E, 10.0];
    let mut grid: Vec<f64> = (0..=1000).map(|k| k as f64 / 1000.0).collect();
    grid.extend([1.0 - 1e-6, 1.0 - 3e-7, 1.0 - 1e-7, 1.0 - 1e-9, 1.0 - 1e-12]);
    let f = |t: f64, a: f64| f_alpha(t, a).unwrap();
    let g = |t: f64, a: f64| g_alpha(t, a).unwrap();
    let h = |t: f64, a: f64| h_alpha(t, a).unwrap();
    let mut worst = 0.0f64;
    let mut check = |lhs: f64, rhs: f64, what: &str, t: f64, a: f64, b: f64| -> Result<(), String> {
        let r = (lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0);
        worst = worst.max(r);
        ensure(r <= 1e-12, || format!("{what} at t={t}, α={a}, β={b}: {lhs} vs {rhs}"))
    };
    for &t in &grid {
        check(2.0 * f(t, 0.5) + g(t, 0.5).powi(2), 0.0, "2f½ + g½²", t, 0.5, 0.0)?;
        check(t.sqrt() * g(t, 0.5), 1.0 - g(t, 0.5), "√t g½", t, 0.5, 0.0)?;
        for &a in &alphas {
            check(g(t, a), a - (1.0 - t) * f(t, a), "g = α − (1−t)f", t, a, 0.0)?;
            for &b in &alphas {
                check(f(t, a) + f(t, b) + g(t, a) * g(t, b), f(t, a + b), "additive f", t, a, b)?;
                check(g(t, b) + g(t, a) * h(t, b), g(t, a + b), "additive g", t, a, b)?;
                check(h(t, a) * h(t, b), h(t, a + b), "additive h", t, a, b)?;
                let ht = h(t, a);
                check(b * f(t, a) + g(t, a).powi(2) * f(ht, b), f(t, a * b), "composite f", t, a, b)?;
                check(g(t, a) * g(ht, b), g(t, a * b), "composite g", t, a, b)?;
                if 1.0 <= a && a < b {
                    let slack = 1e-12;
                    ensure(f(t, a) <= f(t, b) + slack * f(t, b).abs().max(1.0), || format!("f not monotone at t={t}, {a} < {b}"))?;
                    ensure(g(t, a) <= g(t, b) + slack * g(t, b).abs().max(1.0), || format!("g not monotone at t={t}, {a} < {b}"))?;
                    ensure(h(t, a) >= h(t, b) - slack, || format!("h not antitone at t={t}, {a} < {b}"))?;
                }
            }
        }
    }
    // limit values at t = 1
    for &a in &alphas {
        check(f(1.0, a), 0.5 * a * (a - 1.0), "f(1)", 1.0, a, 0.0)?;
        check(g(1.0, a), a, "g(1)", 1.0, a, 0.0)?;
    }
    Ok(format!("{} grid points, worst relative residual {worst:.1e}", grid.len()))
}

fn power_suite() -> Check {
    let mut s = Sampler::new(77);
    let pairs = [(0.5, 0.5), (0.5, 2.0), (1.5, E)];
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let (n, m) = (s.int_in(1, 3), s.int_in(1, 2));
        let f = s.positive_contraction_generator(n, m);
        let p = |x: &Generator, a: f64| power_generator(x, a, TOL).map_err(e);
        for &(a, b) in &pairs {
            let (fa, fb) = (p(&f, a)?, p(&f, b)?);
            let sum = compose(&fa, &fb).map_err(e)?.distance(&p(&f, a + b)?);
            let nested = p(&fa, b)?.distance(&p(&f, a * b)?);
            worst = worst.max(sum).max(nested);
            ensure(sum <= 1e-9 && nested <= 1e-9, || format!("trial {trial}, (α, β) = ({a}, {b}): sum {sum:e}, nested {nested:e}"))?;
            for g in [&fa, &fb] {
                ensure(classify(g, TOL).map_err(e)?.positive_contraction.verdict, || format!("trial {trial}: F_α not a positive contraction generator"))?;
            }
        }
    }
    Ok(format!("100 generators × 3 pairs, worst residual {worst:.1e}"))
}

fn projection_fixed_point() -> Check {
    let f = projection();
    let full = f.full();
    let residual = (&full + &full.adjoint().matmul(&delta(1, 1)).matmul(&full)).norm();
    ensure(residual <= 1e-12, || format!("‖F + F*ΔF‖ = {residual:e}"))?;
    let r = classify(&f, TOL).map_err(e)?;
    ensure(r.projection.verdict && r.positive_contraction.verdict, || "not classified projection".into())?;
    let mut worst = 0.0f64;
    for a in [0.5, 2.0, PI] {
        let d = power_generator(&f, a, TOL).map_err(e)?.distance(&f);
        worst = worst.max(d);
        ensure(d <= 1e-12, || format!("F_{a} differs from F by {d:e}"))?;
    }
    Ok(format!("‖F + F*ΔF‖ = {residual:.1e}, max ‖F_α − F‖ = {worst:.1e}"))
}

fn pi_conditions(pair: &PolarPair) -> [f64; 3] {
    let r = &pair.residuals;
    [r.n_partial_isometry, r.cross_term, r.quadratic_term]
}

fn polar() -> Check {
    let mut s = Sampler::new(5150);
    let mut worst = 0.0f64;
    for trial in 0..50 {
        let (n, m) = (s.int_in(1, 3), s.int_in(1, 2));
        let f = s.commutative_contraction_generator(n, m);
        let pair = polar_decompose(&f, None, TOL, TOL).map_err(e)?;
        let recon = compose(&pair.e, &pair.g).map_err(e)?.distance(&f);
        let pi_e = pi_map(&pair.e).norm();
        let conds = pi_conditions(&pair);
        let top = conds.iter().copied().fold(recon.max(pi_e), f64::max);
        worst = worst.max(top);
        ensure(top <= 1e-9, || format!("trial {trial}: reconstruction {recon:e}, π(E) {pi_e:e}, conditions {conds:?}"))?;
    }

    // D isometric: G and E have closed forms
    let u = s.unitary(3);
    let cm = ComplexMatrix::column_vector(&s.vector(3));
    let a = &ComplexMatrix::new(1, 1, vec![c(-0.4, 0.2)]).unwrap() - &cm.adjoint_mul(&cm).scale_real(0.5);
    let f = Generator::new(1, 3, a.clone(), -&cm.adjoint_mul(&u), cm.clone(), u.clone()).map_err(e)?;
    let pair = polar_decompose(&f, None, TOL, TOL).map_err(e)?;
    let ccs = cm.adjoint_mul(&cm);
    let g_oracle = Generator::new(
        1,
        3,
        (&(&a + &a.adjoint()) + &ccs).scale_real(0.5),
        ComplexMatrix::zeros(1, 3),
        ComplexMatrix::zeros(3, 1),
        ComplexMatrix::identity(3),
    )
    .map_err(e)?;
    let e_oracle = Generator::new(1, 3, (&(&a - &a.adjoint()) - &ccs).scale_real(0.5), -&cm.adjoint_mul(&u), cm, u).map_err(e)?;
    let (dg, de, chi_e) = (pair.g.distance(&g_oracle), pair.e.distance(&e_oracle), chi(&pair.e).norm());
    ensure(dg <= 1e-12 && de <= 1e-12 && chi_e <= 1e-12, || format!("isometric case: ‖ΔG‖ {dg:e}, ‖ΔE‖ {de:e}, ‖χ(E)‖ {chi_e:e}"))?;

    // negative control: shift data with ν > 0 and w off the initial space
    let (mu, nu) = (0.25, 0.9);
    let v = [c(0.1, 0.0), c(0.0, -0.2), c(0.3, 0.1), c(-0.1, 0.0)];
    let w_vals = [c(0.4, -0.3), c(0.2, 0.0), c(0.0, 0.1), c(-0.2, 0.1)];
    let f = scalar_contraction_fibre(mu, nu, &v, &ComplexMatrix::column_vector(&w_vals), &left_shift(4));
    let q = truncated_l_quadratic_term(&f, TOL, TOL).map_err(e)?[(0, 0)];
    let oracle = nu * nu * w_vals[0].norm_sqr();
    ensure((q - c(oracle, 0.0)).norm() <= 1e-9, || format!("negative control {q} vs ν²‖P⊥w‖² = {oracle}"))?;
    let canonical = polar_decompose(&f, None, TOL, TOL).map_err(e)?;
    ensure(canonical.residuals.max() <= 1e-9, || format!("canonical L fails on the control data: {:?}", canonical.residuals))?;
    Ok(format!("50 samples worst {worst:.1e}; isometric case {:.1e}; control residual {:.6} = ν²‖P⊥w‖²", dg.max(de), q.re))
}

fn gauge() -> Check {
    let g = PureGauge::new(tilted_projection(FRAC_PI_4), 2, 1).map_err(e)?;
    let tensor = g.scan_partial_isometries(4, TOL).map_err(e)?;
    ensure(tensor.levels[0].pass, || "level 1 fails".into())?;
    ensure(tensor.first_failure == Some(2), || format!("first failure {:?}", tensor.first_failure))?;
    let fast = g.is_power_partial_isometry(4, TOL).map_err(e)?;
    let gap = tensor.levels.iter().zip(&fast.levels).map(|(x, y)| (x.residual - y.residual).abs()).fold(0.0, f64::max);
    ensure(gap <= 1e-12 && fast.first_failure == tensor.first_failure, || format!("fast and tensor paths differ by {gap:e}"))?;

    let mut s = Sampler::new(8);
    for (h, k) in [(1, 2), (2, 2), (1, 3), (3, 1)] {
        let u = PureGauge::new(s.unitary(h * k), h, k).map_err(e)?;
        let r = u.scan_partial_isometries(4, TOL).map_err(e)?;
        ensure(r.first_failure.is_none() && r.levels.len() == 4, || format!("unitary D (h={h}, k={k}): {}", r.verdict))?;
    }
    Ok(format!("θ = π/4 level-2 residual {:.6}; fast/tensor gap {gap:.1e}", tensor.levels[1].residual))
}

fn roundtrips() -> Check {
    let mut s = Sampler::new(99);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let (n, m) = (s.int_in(1, 3), s.int_in(1, 2));
        let f = s.generator(n, m);
        let back = recover_generator(&z_table(&f).map_err(e)?, n, m).map_err(e)?;
        let r = back.distance(&f) / f.scale();
        worst = worst.max(r);
        ensure(r <= 1e-12, || format!("trial {trial}: Z round trip {r:e}·scale"))?;

        let text = serde_json::to_string(&f).map_err(e)?;
        ensure(serde_json::from_str::<Generator>(&text).map_err(e)? == f, || format!("trial {trial}: generator JSON lossy"))?;
        if trial % 10 == 0 {
            let cf = s.commutative_contraction_generator(n, m);
            let pair = polar_decompose(&cf, None, TOL, TOL).map_err(e)?;
            let text = serde_json::to_string(&pair).map_err(e)?;
            ensure(serde_json::from_str::<PolarPair>(&text).map_err(e)? == pair, || format!("trial {trial}: polar JSON lossy"))?;
        }
    }
    let a = serde_json::to_string(&verify(17, 4, TOL)).map_err(e)?;
    let b = serde_json::to_string(&verify(17, 4, TOL)).map_err(e)?;
    ensure(a == b, || "verify is not deterministic".into())?;
    Ok(format!("Z round trip ≤ {worst:.1e}·scale; JSON bit-exact; verify reproducible"))
}

fn step(s: &mut Sampler, cuts: &[f64], m: usize) -> StepFunction {
    StepFunction::new(cuts.windows(2).map(|w| Segment { dt: w[1] - w[0], value: s.vector(m) }).collect()).unwrap()
}

fn split(f: &StepFunction, parts: usize) -> StepFunction {
    let segments = f
        .segments()
        .iter()
        .flat_map(|seg| (0..parts).map(move |_| Segment { dt: seg.dt / parts as f64, value: seg.value.clone() }))
        .collect();
    StepFunction::new(segments).unwrap()
}

fn semigroup_decomposition() -> Check {
    let mut s = Sampler::new(31337);
    let (mut worst_refine, mut worst_lr) = (0.0f64, 0.0f64);
    for trial in 0..50 {
        let (n, m) = (s.int_in(1, 3), s.int_in(1, 2));
        let f = s.contraction_generator(n, m, true);
        let fs = step(&mut s, &[0.0, 0.3, 0.7, 1.2], m);
        let gs = step(&mut s, &[0.0, 0.5, 1.2], m);
        let me = matrix_element(&f, &fs, &gs, Order::Left).map_err(e)?;
        for parts in [2, 3] {
            let r = matrix_element(&f, &split(&fs, parts), &split(&gs, parts), Order::Left).map_err(e)?.distance(&me);
            worst_refine = worst_refine.max(r);
            ensure(r <= 1e-10, || format!("trial {trial}: refinement into {parts} changed the element by {r:e}"))?;
        }
        let comm = s.commutative_contraction_generator(n, m);
        let l = matrix_element(&comm, &fs, &gs, Order::Left).map_err(e)?;
        let r = matrix_element(&comm, &fs, &gs, Order::Right).map_err(e)?;
        let gap = l.distance(&r);
        worst_lr = worst_lr.max(gap);
        ensure(gap <= 1e-12 * (1.0 + l.norm()), || format!("trial {trial}: commutative left/right gap {gap:e}"))?;
    }
    let f = flip_gauge();
    let fs = StepFunction::new(vec![Segment { dt: 0.5, value: vec![c(1.0, 0.0)] }, Segment { dt: 0.5, value: vec![c(0.0, 1.0)] }]).map_err(e)?;
    let gs = StepFunction::new(vec![Segment { dt: 0.5, value: vec![c(-0.5, 0.0)] }, Segment { dt: 0.5, value: vec![c(1.0, 0.5)] }]).map_err(e)?;
    let split_gap = matrix_element(&f, &fs, &gs, Order::Left).map_err(e)?.distance(&matrix_element(&f, &fs, &gs, Order::Right).map_err(e)?);
    ensure(split_gap >= 1e-3, || format!("left and right agree on the noncommutative example ({split_gap:e})"))?;
    Ok(format!("refinement ≤ {worst_refine:.1e}, commutative left/right ≤ {worst_lr:.1e}, noncommutative gap {split_gap:.3}"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("weyl example", weyl_example),
        ("non-self-adjoint unitary example", flip_gauge_check),
        ("quadratic form verdicts", quadratic_form_verdicts),
        ("scalar function identities", scalar_functions),
        ("power generator laws", power_suite),
        ("projection fixed point", projection_fixed_point),
        ("polar decomposition", polar),
        ("gauge level scan", gauge),
        ("round trips", roundtrips),
        ("semigroup decomposition", semigroup_decomposition),
    ];
    let start = Instant::now();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass ({:.2}s)", criteria.len() - failures, criteria.len(), start.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
