//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so the summary is always printed.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use bell_core::cglmp::{
    cglmp3_report, effective_ops_analytic, gd_game, input_unitary, optimal_state,
    psi_gamma_coefficient, shift_unitary, zohren_gill, TABLE1_EXPECTATION, TABLE1_LAMBDA,
};
use bell_core::families::{
    boundary_residual, boundary_sample, canonical_chsh_realization, cglmp2_zg, chsh_xor,
    counterexample_bound_lines, counterexample_gamma_family, tilted_bound_lines, tilted_chsh,
    tilted_chsh_prime, tilted_gamma0_x1, tilted_lambdas, tilted_realization, weighted_xor_game,
    CounterExample, TiltedPoint,
};
use bell_core::mermin::{ghz_realization, mermin_expression, tripartite_ow_report, SteeringType};
use bell_core::ns::{
    apply_delta, constant_basis, delta_certificate, difference_table, lift, ns_constant_value,
    ns_equivalent, DeltaParams,
};
use bell_core::ow::{check_bound_lines, ow_report, solve_gamma, DEFAULT_TOL};
use bell_core::quantum::{effective_operator, random_realization, Context, Steering};
use bell_core::scenario::{evaluate, local_bound};
use bell_core::seesaw::{seesaw_maximize, SeesawConfig};
use bell_core::BellExpression;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Collected sub-checks of one criterion.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(&mut self, name: &str, got: f64, want: f64, tol: f64) {
        self.check((got - want).abs() <= tol, || {
            format!("{name}: got {got:.10}, want {want:.10} ± {tol:e}")
        });
    }
}

fn chsh() -> Checks {
    let mut c = Checks::default();
    let q = 2.0 + SQRT_2;
    let res = seesaw_maximize(&chsh_xor(), [2, 2], &SeesawConfig::default()).unwrap();
    c.close("see-saw value", res.value, q, 1e-9);
    let r = canonical_chsh_realization();
    c.close(
        "fixture value",
        evaluate(&chsh_xor(), &r.behavior().unwrap()).unwrap(),
        q,
        1e-9,
    );
    let rep = ow_report(&chsh_xor(), &r, &Steering::a_to_b(), 1e-10).unwrap();
    c.check(rep.verdict && rep.max_gap() <= 1e-10, || {
        format!("CHSH max gap {:e}", rep.max_gap())
    });
    c
}

fn cglmp2_not_ow() -> Checks {
    let mut c = Checks::default();
    let rep = ow_report(
        &cglmp2_zg(),
        &canonical_chsh_realization(),
        &Steering::a_to_b(),
        DEFAULT_TOL,
    )
    .unwrap();
    c.check(!rep.verdict, || "CGLMP2 reported OW".into());
    for a in 0..2 {
        let ctx = rep.context(&Context::single(0, a)).unwrap();
        c.close(
            "⟨B(0,a)⟩",
            ctx.expectation.unwrap(),
            1.5 + 1.0 / (2.0 * SQRT_2),
            1e-7,
        );
        c.close("λ(0,a)", ctx.lambda_max, 2.0, 1e-7);
        c.close("gap(0,a)", ctx.gap.unwrap(), 0.1464466, 1e-7);
    }
    c
}

fn ns_identities() -> Checks {
    let mut c = Checks::default();
    let cert = ns_equivalent(&chsh_xor(), &cglmp2_zg().scaled(2.0)).unwrap();
    c.check(cert.as_ref().map(|k| k.k) == Some(-3.0), || {
        format!("CHSH vs 2·I₂: {cert:?}")
    });
    for d in 2..=6 {
        let cert = ns_equivalent(
            &gd_game(d).unwrap(),
            &zohren_gill(d).unwrap().scaled(d as f64),
        )
        .unwrap();
        c.check(cert.as_ref().map(|k| k.k) == Some(-3.0), || {
            format!("d = {d}: {cert:?}")
        });
    }
    c
}

fn counterexamples() -> Checks {
    let mut c = Checks::default();
    let cfg = SeesawConfig {
        restarts: 50,
        ..SeesawConfig::default()
    };
    for which in [CounterExample::C1, CounterExample::C2] {
        let fam = counterexample_gamma_family(which);
        let res = seesaw_maximize(&fam.at(0.0), [2, 2], &cfg).unwrap();
        let r = res.realization;
        let sol = solve_gamma(&fam, &r, &Steering::a_to_b(), DEFAULT_TOL).unwrap();
        let Some(g) = sol.gamma else {
            c.check(false, || {
                format!(
                    "{which:?}: no Γ ({:?}, spread {:e})",
                    sol.diagnostic, sol.spread
                )
            });
            continue;
        };
        c.close(&format!("{which:?} Γ"), g, which.reported_gamma(), 1e-5);
        c.check(sol.report.as_ref().is_some_and(|r| r.verdict), || {
            format!("{which:?}: not OW at Γ")
        });
        let lines = counterexample_bound_lines(which, g);
        let checks = check_bound_lines(&fam.at(g), &r, &Steering::a_to_b(), &lines).unwrap();
        for (line, lam) in checks.iter().zip(which.reported_lambdas()) {
            let ctx = (line.context.inputs[0], line.context.outputs[0]);
            c.check(line.is_faithful(1e-8), || {
                format!("{which:?} line {ctx:?}: residual {:e}", line.residual)
            });
            c.close(&format!("{which:?} λ{ctx:?}"), line.lambda, lam, 1e-4);
        }
        let rep0 = ow_report(&fam.at(0.0), &r, &Steering::a_to_b(), DEFAULT_TOL).unwrap();
        c.check(!rep0.verdict, || format!("{which:?}: OW already at Γ = 0"));
    }
    c
}

fn three_param() -> Checks {
    let mut c = Checks::default();
    let mut worst_gap: f64 = 0.0;
    let mut worst_res: f64 = 0.0;
    for seed in 0..1000 {
        let p = boundary_sample(seed);
        let r = p.realization();
        let res = boundary_residual(&r.behavior().unwrap()).unwrap();
        let rep = ow_report(
            &weighted_xor_game(&p).unwrap(),
            &r,
            &Steering::a_to_b(),
            DEFAULT_TOL,
        )
        .unwrap();
        worst_gap = worst_gap.max(rep.max_gap());
        worst_res = worst_res.max(res.abs());
        c.check(rep.verdict && rep.max_gap() <= 1e-7, || {
            format!("seed {seed}: gap {:e}", rep.max_gap())
        });
        c.check(res.abs() <= 1e-9, || {
            format!("seed {seed}: residual {res:e}")
        });
    }
    println!("    worst gap {worst_gap:.2e}, worst boundary residual {worst_res:.2e}");
    c
}

fn tilted() -> Checks {
    let mut c = Checks::default();
    for p in TiltedPoint::grid() {
        let t = p.theta;
        let r = tilted_realization(&p);
        let e1 = tilted_chsh(&p, 1.0);
        let rep1 = ow_report(&e1, &r, &Steering::a_to_b(), DEFAULT_TOL).unwrap();
        c.check(rep1.verdict, || format!("θ = {t}: I_α(1) not OW"));
        let lines =
            check_bound_lines(&e1, &r, &Steering::a_to_b(), &tilted_bound_lines(&p)).unwrap();
        for (line, lam) in lines.iter().zip(tilted_lambdas(&p)) {
            c.check(line.is_faithful(1e-12), || {
                format!(
                    "θ = {t}: line {:?} residual {:e}",
                    line.context, line.residual
                )
            });
            let ctx = (line.context.inputs[0], line.context.outputs[0]);
            c.close(&format!("θ = {t} λ{ctx:?}"), line.lambda, lam, 1e-9);
        }
        let rep0 = ow_report(&tilted_chsh(&p, 0.0), &r, &Steering::a_to_b(), DEFAULT_TOL).unwrap();
        // At θ = π/4 the expression is CHSH itself, so only θ < π/4 is non-OW.
        if p.alpha > 1e-12 {
            c.check(!rep0.verdict, || format!("θ = {t}: I_α(0) reported OW"));
        }
        let (e, lam) = tilted_gamma0_x1(&p);
        for b in 0..2 {
            let ctx = rep0.context(&Context::single(1, b)).unwrap();
            c.close(
                &format!("θ = {t} gap(1,{b})"),
                ctx.gap.unwrap(),
                lam - e,
                1e-9,
            );
        }
        let prime = tilted_chsh_prime(&p, 1.0).unwrap();
        let rep_p = ow_report(&prime, &r, &Steering::b_to_a(), DEFAULT_TOL).unwrap();
        c.check(rep_p.verdict, || {
            format!(
                "θ = {t}: I'_α(1) not OW for B→A (max gap {:e})",
                rep_p.max_gap()
            )
        });
        for g in [0.0, 0.5, 1.0] {
            let lb = local_bound(&tilted_chsh(&p, g)).unwrap().value;
            let want = 2.0 + p.alpha - 2.0 * g * t.sin().powi(2);
            c.close(&format!("θ = {t} local bound at Γ = {g}"), lb, want, 1e-9);
        }
    }
    c
}

fn table1() -> Checks {
    let mut c = Checks::default();
    let rep = cglmp3_report().unwrap();
    for (i, ctx) in rep.contexts.iter().enumerate() {
        c.close(&format!("λ[{i}]"), ctx.lambda_max, TABLE1_LAMBDA[i], 1e-3);
        c.close(
            &format!("⟨B⟩[{i}]"),
            ctx.expectation.unwrap(),
            TABLE1_EXPECTATION[i],
            1e-3,
        );
    }
    let s = optimal_state(3)
        .unwrap()
        .realization
        .schmidt_coefficients()
        .unwrap();
    let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
    c.close("Schmidt ratio", lo / hi, psi_gamma_coefficient(), 1e-9);
    c
}

fn cglmp_d() -> Checks {
    let mut c = Checks::default();
    for d in 2..=8 {
        let opt = optimal_state(d).unwrap();
        let g = gd_game(d).unwrap();
        let rep = ow_report(&g, &opt.realization, &Steering::a_to_b(), 1e-8).unwrap();
        c.check(rep.verdict && rep.max_gap() <= 1e-8, || {
            format!("d = {d}: max gap {:e}", rep.max_gap())
        });
        let v = input_unitary(d).unwrap();
        for x in 0..2 {
            for a in 0..d {
                let ctx = Context::single(x, a);
                let op =
                    effective_operator(&g, &opt.realization, &Steering::a_to_b(), &ctx).unwrap();
                let an = effective_ops_analytic(d, x, a).unwrap();
                let diff = op.matrix.max_abs_diff(&an).unwrap();
                c.check(diff <= 1e-9, || {
                    format!("d = {d} ({x},{a}): kernel mismatch {diff:e}")
                });
                if x == 0 {
                    let b1 = effective_ops_analytic(d, 1, a).unwrap();
                    let dv = an.conjugate_by(&v).unwrap().max_abs_diff(&b1).unwrap();
                    c.check(dv <= 1e-10, || format!("d = {d}: V relation {dv:e}"));
                }
                for ap in 0..d {
                    let u = shift_unitary(d, ap, a).unwrap();
                    let target = effective_ops_analytic(d, x, ap).unwrap();
                    let du = an.conjugate_by(&u).unwrap().max_abs_diff(&target).unwrap();
                    c.check(du <= 1e-10, || format!("d = {d}: U relation {du:e}"));
                }
            }
        }
    }
    c
}

fn mermin() -> Checks {
    let mut c = Checks::default();
    let m = mermin_expression();
    c.close("local bound", local_bound(&m).unwrap().value, 3.0, 0.0);
    let r = ghz_realization();
    c.close(
        "GHZ value",
        evaluate(&m, &r.behavior().unwrap()).unwrap(),
        4.0,
        1e-12,
    );
    for (ty, lam) in [(SteeringType::I, 2.0), (SteeringType::II, 1.0)] {
        let rep = tripartite_ow_report(&m, &r, ty, 1e-10).unwrap();
        c.check(rep.verdict, || format!("{ty:?}: not OW"));
        for ctx in &rep.contexts {
            c.close(&format!("{ty:?} λ"), ctx.lambda_max, lam, 1e-10);
            c.close(&format!("{ty:?} gap"), ctx.gap.unwrap(), 0.0, 1e-10);
        }
    }
    c
}

fn properties() -> Checks {
    let mut c = Checks::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let gauss = |rng: &mut ChaCha8Rng| rng.gen_range(-1.0..1.0);

    for i in 0..100 {
        let dims = [rng.gen_range(2..4), rng.gen_range(2..4)];
        let r = random_realization(&mut rng, &dims, &[2, 2]).unwrap();
        let s = r.scenario().unwrap();
        let expr = BellExpression::from_fn(s, |_, _| gauss(&mut rng)).unwrap();
        let p = r.behavior().unwrap();
        let value = evaluate(&expr, &p).unwrap();
        let rep = ow_report(&expr, &r, &Steering::a_to_b(), DEFAULT_TOL).unwrap();
        let total: f64 = rep
            .contexts
            .iter()
            .map(|k| k.weight * k.expectation.unwrap_or(0.0))
            .sum();
        c.check((total - value).abs() <= 1e-9, || {
            format!("decomposition {i}: {total} vs {value}")
        });

        // evaluate is linear in the expression.
        let other =
            BellExpression::from_fn(expr.scenario().clone(), |_, _| gauss(&mut rng)).unwrap();
        let k = gauss(&mut rng);
        let lhs = evaluate(&expr.add_scaled(&other, k).unwrap(), &p).unwrap();
        let rhs = value + k * evaluate(&other, &p).unwrap();
        c.check((lhs - rhs).abs() <= 1e-9, || {
            format!("linearity {i}: {lhs} vs {rhs}")
        });
    }

    let random_params =
        |rng: &mut ChaCha8Rng| DeltaParams::new(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
    for i in 0..100 {
        let e =
            BellExpression::from_fn(bell_core::Scenario::chsh(), |_, _| gauss(&mut rng)).unwrap();
        let d = difference_table(&e).unwrap();
        let (p, q) = (random_params(&mut rng), random_params(&mut rng));
        let seq = apply_delta(&apply_delta(&d, p), q);
        let once = apply_delta(&d, p.add(q));
        c.check(seq.max_abs_diff(&once) <= 1e-12, || {
            format!("Δ composition {i}")
        });
        let back = apply_delta(&apply_delta(&d, p), p.neg());
        c.check(back.max_abs_diff(&d) <= 1e-12, || format!("Δ inverse {i}"));
        let zero = apply_delta(&d, DeltaParams::new(0.0, 0.0, 0.0, 0.0));
        c.check(zero.max_abs_diff(&d) == 0.0, || format!("Δ identity {i}"));
    }

    for i in 0..200 {
        let k = gauss(&mut rng) * 3.0;
        let basis = constant_basis(1.0);
        let mut t = BellExpression::zeros(bell_core::Scenario::chsh());
        let mut want = 0.0;
        for b in &basis {
            let w = gauss(&mut rng);
            t = t.add_scaled(b, w).unwrap();
            want += w;
        }
        // Shift by a Δ-generated table of known constant to leave the basis span.
        let p = random_params(&mut rng);
        let d = apply_delta(&difference_table(&t).unwrap(), p);
        let sums = bell_core::ns::block_sums(&t).unwrap();
        let t = lift(&d, sums)
            .unwrap()
            .add_scaled(&constant_basis(1.0)[0], k)
            .unwrap();
        let want = want + k;
        let enumerated = ns_constant_value(&t).unwrap();
        let via_delta = delta_certificate(&t).unwrap().map(|c| c.k);
        let agree = matches!((enumerated, via_delta), (Some(a), Some(b)) if (a - b).abs() <= 1e-9 && (a - want).abs() <= 1e-9);
        c.check(agree, || {
            format!("constant {i}: enumeration {enumerated:?}, Δ route {via_delta:?}, built {want}")
        });
    }
    c
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Checks, Duration); 10] = [
        ("CHSH value and OW verdict", chsh, Duration::from_secs(1)),
        ("CGLMP2 is not OW", cglmp2_not_ow, Duration::from_secs(1)),
        ("NS identities", ns_identities, Duration::from_secs(10)),
        (
            "counterexamples c1, c2",
            counterexamples,
            Duration::from_secs(60),
        ),
        (
            "three-parameter boundary family",
            three_param,
            Duration::from_secs(60),
        ),
        ("tilted CHSH families", tilted, Duration::from_secs(10)),
        ("CGLMP3 Table I", table1, Duration::from_secs(5)),
        ("CGLMP_d OW, d = 2..8", cglmp_d, Duration::from_secs(30)),
        ("Mermin / GHZ", mermin, Duration::from_secs(2)),
        ("property suites", properties, Duration::from_secs(60)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut checks = run();
        let elapsed = start.elapsed();
        if elapsed > *budget {
            checks
                .failures
                .push(format!("runtime {elapsed:.2?} over budget {budget:?}"));
        }
        let ok = checks.failures.is_empty();
        println!(
            "criterion {:>2} {:<34} {}  ({} checks, {:.2?})",
            i + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            checks.count,
            elapsed
        );
        for f in checks.failures.iter().take(12) {
            println!("    {f}");
        }
        if checks.failures.len() > 12 {
            println!("    ... {} more", checks.failures.len() - 12);
        }
        failed += usize::from(!ok);
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
