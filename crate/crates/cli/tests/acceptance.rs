//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbounds::oracle::{certificate_check, theta_min};
use symbounds::{
    binary_entropy, estimate_tail, exact_freedman_deterministic_q, exact_max_tail, exponent_cs,
    exponent_kl, freedman_b, freedman_bound, freedman_c, rate_convergence, refined_bennett_check,
    tail_bound_t1, tail_bound_t3, BarrierMode, ExponentInput, FreedmanInput, FreedmanVariant,
    IncrementLaw, LatticeLaw, MartingaleSpec, McConfig, MomentProfile, OptimalityLaw, TailSide,
    WeightRule,
};
use symbounds_cli::{run, Cli};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn inp(g: f64, d: f64) -> ExponentInput {
    ExponentInput::new(g, d).unwrap()
}

fn cs(g: f64, d: f64) -> f64 {
    exponent_cs(inp(g, d)).value
}

fn kl(g: f64, d: f64) -> f64 {
    exponent_kl(inp(g, d)).unwrap().value
}

fn gamma_one_agreement() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..=100 {
        let d = i as f64 / 100.0;
        let f = std::f64::consts::LN_2 * (1.0 - binary_entropy((1.0 - d) / 2.0));
        let (a, b) = (cs(1.0, d), kl(1.0, d));
        worst = worst
            .max((a - b).abs())
            .max((a - f).abs())
            .max((b - f).abs());
    }
    check(worst <= 1e-12, || {
        format!("max deviation {worst:e} > 1e-12")
    })?;
    Ok(format!("max deviation {worst:.1e} over 101 points"))
}

fn tightening() -> Outcome {
    let mut min_gap = f64::INFINITY;
    for gi in 1..=9 {
        for di in 1..=9 {
            let (g, d) = (gi as f64 / 10.0, di as f64 / 10.0);
            let gap = cs(g, d) - kl(g, d);
            check(gap > 0.0, || {
                format!("no tightening at ({g}, {d}): {gap:e}")
            })?;
            min_gap = min_gap.min(gap);
        }
    }
    let (a, b) = (cs(0.5, 0.5), kl(0.5, 0.5));
    // high-precision oracle values
    check((a - 0.261_624_071_882_273_9).abs() < 1e-12, || {
        format!("cs(0.5, 0.5) = {a}")
    })?;
    check((b - 0.231_049_060_186_648_4).abs() < 1e-12, || {
        format!("kl(0.5, 0.5) = {b}")
    })?;
    Ok(format!(
        "min gap {min_gap:.3e}; (0.5, 0.5): {a:.7} vs {b:.7}"
    ))
}

fn delta_one_limits() -> Outcome {
    let d = 1.0 - 1e-6;
    let mut worst: f64 = 0.0;
    for g in [0.25, 0.5, 0.75, 1.0] {
        let e1 = (cs(g, d) - (2.0 / g).ln()).abs();
        let e2 = (kl(g, d) - (1.0 / g).ln_1p()).abs();
        check(e1 <= 1e-4 && e2 <= 1e-4, || {
            format!("gamma {g}: {e1:e}, {e2:e}")
        })?;
        worst = worst.max(e1).max(e2);
    }
    Ok(format!("max deviation {worst:.2e}"))
}

fn t3_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_604);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let g: f64 = rng.random_range(0.05..1.0);
        let d: f64 = rng.random_range(0.01..0.99);
        let n: u64 = rng.random_range(1..=50);
        let t1 = tail_bound_t1(n, inp(g, d)).raw;
        let two = tail_bound_t3(n, d, &MomentProfile::flat(1.0, g, 2).unwrap()).unwrap();
        let rel = ((two.bound.raw - t1) / t1).abs();
        check(rel <= 1e-8, || format!("({g}, {d}, {n}): rel {rel:e}"))?;
        worst = worst.max(rel);
        let g4 = g * rng.random_range(0.1..0.9);
        let four = tail_bound_t3(n, d, &MomentProfile::new(1.0, vec![g, g4]).unwrap()).unwrap();
        check(four.bound.raw <= t1 * (1.0 + 1e-12), || {
            format!("({g}, {g4}, {d}, {n}): {} > {t1}", four.bound.raw)
        })?;
    }
    Ok(format!("20 points, max relative deviation {worst:.1e}"))
}

fn freedman_tightening() -> Outcome {
    for i in 0..1000 {
        let u = 10f64.powf(-6.0 + 12.0 * i as f64 / 999.0);
        let (c, b) = (freedman_c(u).unwrap(), freedman_b(u).unwrap());
        check(c >= b, || format!("C < B at u = {u}"))?;
        let fi = FreedmanInput::new(2.0, 4.0, 2.0 * u).unwrap();
        let (t, cl) = (
            freedman_bound(fi, FreedmanVariant::Tightened),
            freedman_bound(fi, FreedmanVariant::Classical),
        );
        check(t <= cl, || {
            format!("tightened {t} > classical {cl} at u = {u}")
        })?;
    }
    let (c1, b1) = (freedman_c(1.0).unwrap(), freedman_b(1.0).unwrap());
    check(
        (c1 - 0.934_320_1).abs() <= 1e-7 && (b1 - 0.772_588_7).abs() <= 1e-7,
        || format!("C(1) = {c1}, B(1) = {b1}"),
    )?;
    Ok(format!("1000-point grid; C(1) = {c1:.7}, B(1) = {b1:.7}"))
}

fn exact_domination() -> Outcome {
    let mut cases = 0;
    let mut tightest = f64::INFINITY;
    for gi in 1..=10 {
        let g = gi as f64 / 10.0;
        let law = LatticeLaw::three_point(g, 1.0).unwrap();
        for di in 1..=10 {
            let d = di as f64 / 10.0;
            for n in 1..=25usize {
                let p = exact_max_tail(&law, n, d * n as f64, BarrierMode::TwoSided).unwrap();
                let b = tail_bound_t1(n as u64, inp(g, d)).raw;
                check(p <= b + 1e-12, || {
                    format!("violation at ({g}, {d}, {n}): {p} > {b}")
                })?;
                if p > 0.0 {
                    tightest = tightest.min(b / p);
                }
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} cases, 0 violations, smallest bound/exact ratio {tightest:.3}"
    ))
}

fn optimality() -> Outcome {
    let mut lines = Vec::new();
    for (law, name) in [
        (OptimalityLaw::Symmetric, "symmetric"),
        (OptimalityLaw::Mcdiarmid, "two-point"),
    ] {
        let r =
            rate_convergence(law, 0.5, 0.4, &[250, 500, 1000, 2000]).map_err(|e| e.to_string())?;
        check(r.gaps_positive() && r.gaps_strictly_decreasing(), || {
            format!("{name}: gaps {:?}", r.gaps)
        })?;
        let last = *r.gaps.last().unwrap();
        check(last <= 0.01, || format!("{name}: final gap {last}"))?;
        lines.push(format!("{name} final gap {last:.5}"));
    }
    Ok(lines.join(", "))
}

fn freedman_exact() -> Outcome {
    let law = LatticeLaw::three_point(0.5, 1.0).unwrap();
    let p = exact_freedman_deterministic_q(&law, 0.5, 3.0, 5.0).map_err(|e| e.to_string())?;
    let fi = FreedmanInput::new(3.0, 5.0, 1.0).unwrap();
    let t = freedman_bound(fi, FreedmanVariant::Tightened);
    let c = freedman_bound(fi, FreedmanVariant::Classical);
    // 24805 / 131072 from a rational-arithmetic recursion
    check(p == 0.189_247_131_347_656_25, || {
        format!("exact {p} differs from the frozen value")
    })?;
    check(p <= t && t <= c, || format!("{p} <= {t} <= {c} fails"))?;
    Ok(format!("{p:.6} <= {t:.6} <= {c:.6}"))
}

fn monte_carlo_soundness() -> Outcome {
    let spec = MartingaleSpec::new(
        IncrementLaw::three_point_symmetric(1.0, 0.5).unwrap(),
        WeightRule::ConstantOne,
        10,
    )
    .unwrap();
    let lattice = LatticeLaw::three_point(0.5, 1.0).unwrap();
    let exact = exact_max_tail(&lattice, 10, 3.0, BarrierMode::TwoSided).unwrap();
    // 99209 / 262144
    check((exact - 0.378_452_301_025_390_6).abs() < 1e-15, || {
        format!("exact {exact}")
    })?;
    let bound = tail_bound_t1(10, inp(0.5, 0.3)).raw;
    let mut covered = 0;
    for seed in 1..=100u64 {
        let est = estimate_tail(
            &spec,
            0.3,
            TailSide::TwoSidedMax,
            McConfig::new(100_000, seed),
        )
        .map_err(|e| e.to_string())?;
        if est.covers(exact) {
            covered += 1;
        }
        check(est.p_hat <= bound + 3.0 * est.half_width(), || {
            format!("seed {seed}: p_hat {} above bound {bound}", est.p_hat)
        })?;
    }
    check(covered >= 90, || format!("coverage {covered}/100"))?;
    Ok(format!(
        "coverage {covered}/100, exact {exact:.6}, bound {bound:.6}"
    ))
}

fn supermartingale() -> Outcome {
    let spec = MartingaleSpec::new(
        IncrementLaw::shifted_three_point(1.0, 0.5, -0.05).unwrap(),
        WeightRule::ConstantOne,
        20,
    )
    .unwrap();
    let est = estimate_tail(
        &spec,
        0.4,
        TailSide::OneSidedMax,
        McConfig::new(1_000_000, 10),
    )
    .map_err(|e| e.to_string())?;
    let bound = (-20.0 * cs(0.5, 0.4)).exp();
    check((bound - 0.037_204_887_564_086_75).abs() < 1e-15, || {
        format!("bound {bound}")
    })?;
    check(est.ci_low <= bound, || {
        format!("ci_low {} > bound {bound}", est.ci_low)
    })?;
    Ok(format!(
        "ci [{:.5}, {:.5}] vs bound {bound:.5}",
        est.ci_low, est.ci_high
    ))
}

fn refined_bennett() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..50 {
        let g: f64 = rng.random_range(0.01..=1.0);
        let d: f64 = rng.random_range(0.1..5.0);
        let l: f64 = rng.random_range(-3.0..3.0);
        let c = refined_bennett_check(g, d, l).map_err(|e| e.to_string())?;
        check(c.equal, || {
            format!("({g}, {d}, {l}): {} vs {}", c.lhs, c.rhs)
        })?;
    }
    let grid: Vec<f64> = (1..=100_000).map(|i| i as f64 * 1e-4).collect();
    for l in [0.5, 1.0, 2.0] {
        let t = theta_min(l);
        check(certificate_check(l, t, &grid), || {
            format!("lambda {l}: fails at theta_min")
        })?;
        check(!certificate_check(l, t - 1e-3, &grid), || {
            format!("lambda {l}: passes below theta_min")
        })?;
    }
    Ok("50 equalities; certificate sharp at cosh(lambda) - 1".into())
}

fn simulate_text(extra: &[&str]) -> Result<String, String> {
    let mut argv = vec![
        "symbounds",
        "simulate",
        "--construction",
        "sign-weights",
        "--gamma",
        "0.5",
        "--d",
        "1",
        "--n",
        "30",
        "--alpha",
        "0.25",
        "--side",
        "two",
        "--trials",
        "200000",
        "--seed",
        "12345",
    ];
    argv.extend_from_slice(extra);
    let cli = Cli::try_parse_from(argv).map_err(|e| e.to_string())?;
    run(&cli).map(|o| o.text).map_err(|e| e.to_string())
}

fn determinism() -> Outcome {
    let first = simulate_text(&[])?;
    check(first == simulate_text(&[])?, || "two runs differ".into())?;
    for w in ["1", "4", "8"] {
        check(first == simulate_text(&["--workers", w])?, || {
            format!("{w} workers differ")
        })?;
    }
    Ok(format!(
        "{} identical bytes across runs and workers 1, 4, 8",
        first.len()
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

fn main() {
    let secs = Duration::from_secs;
    let criteria = [
        Criterion {
            id: 1,
            name: "closed forms agree at gamma = 1",
            budget: secs(1),
            run: gamma_one_agreement,
        },
        Criterion {
            id: 2,
            name: "symmetric exponent beats divergence",
            budget: secs(1),
            run: tightening,
        },
        Criterion {
            id: 3,
            name: "limits at delta -> 1",
            budget: secs(1),
            run: delta_one_limits,
        },
        Criterion {
            id: 4,
            name: "higher-moment bound reduction",
            budget: secs(5),
            run: t3_reduction,
        },
        Criterion {
            id: 5,
            name: "Freedman factor tightening",
            budget: secs(1),
            run: freedman_tightening,
        },
        Criterion {
            id: 6,
            name: "exact running-max domination",
            budget: secs(30),
            run: exact_domination,
        },
        Criterion {
            id: 7,
            name: "asymptotic optimality",
            budget: secs(60),
            run: optimality,
        },
        Criterion {
            id: 8,
            name: "exact Freedman check",
            budget: secs(1),
            run: freedman_exact,
        },
        Criterion {
            id: 9,
            name: "Monte Carlo soundness",
            budget: secs(120),
            run: monte_carlo_soundness,
        },
        Criterion {
            id: 10,
            name: "supermartingale corollary",
            budget: secs(30),
            run: supermartingale,
        },
        Criterion {
            id: 11,
            name: "refined Bennett equality",
            budget: secs(1),
            run: refined_bennett,
        },
        Criterion {
            id: 12,
            name: "simulate determinism",
            budget: secs(60),
            run: determinism,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result = (c.run)();
        let elapsed = start.elapsed();
        let result = match result {
            Ok(detail) if elapsed > c.budget => Err(format!(
                "{detail}; took {elapsed:.2?}, budget {:?}",
                c.budget
            )),
            other => other,
        };
        match result {
            Ok(detail) => println!("PASS [{:>2}] {} ({elapsed:.2?}): {detail}", c.id, c.name),
            Err(why) => {
                failed += 1;
                println!("FAIL [{:>2}] {} ({elapsed:.2?}): {why}", c.id, c.name);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
