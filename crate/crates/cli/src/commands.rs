use std::collections::BTreeMap;
use std::path::PathBuf;

use symbounds::exponent::TailBound;
use symbounds::oracle::{exact_freedman_deterministic_q, exact_max_tail, LatticeLaw};
use symbounds::simulator::{estimate_freedman_event, estimate_tail};
use symbounds::{
    exponent_cs, exponent_kl, freedman_b, freedman_bound, freedman_c, freedman_exponent,
    rate_convergence, tail_bound_t1, tail_bound_t2, tail_bound_t3, BarrierMode, BoundReport,
    ExponentInput, FreedmanInput, FreedmanVariant, IncrementLaw, MartingaleSpec, McConfig,
    MomentProfile, OptimalityLaw, TailSide, Theorem, WeightRule,
};

use crate::args::{
    CompareArgs, ComputeArgs, Construction, Event, Format, LawArg, Side, SimulateArgs, VerifyArgs,
};
use crate::error::{CliError, EXIT_OK, EXIT_TRUNCATION};
use crate::table::{num, parse_grid, parse_list, render};

/// Share of truncated Freedman paths above which `simulate` exits with code 4.
pub const TRUNCATION_LIMIT: f64 = 1e-3;

/// What a command produced: the text, where it goes, and the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub text: String,
    /// File destination; standard output when `None`.
    pub out: Option<PathBuf>,
    pub exit_code: i32,
    /// Diagnostics for standard error.
    pub warnings: Vec<String>,
}

impl Output {
    fn stdout(text: String) -> Self {
        Self {
            text,
            out: None,
            exit_code: EXIT_OK,
            warnings: Vec::new(),
        }
    }
}

fn require<T: Copy>(value: Option<T>, flag: &str, context: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::missing(flag, context))
}

fn reject_unused(theorem: u8, used: &[(&str, bool)]) -> Result<(), CliError> {
    match used.iter().find(|(_, present)| *present) {
        Some((flag, _)) => Err(CliError::validation(
            flag,
            format!("not used by theorem {theorem}"),
        )),
        None => Ok(()),
    }
}

fn parse_moments(spec: &str) -> Result<Vec<f64>, CliError> {
    let mu: Vec<f64> = parse_list("--moments", spec)?;
    if mu.iter().any(|m| !m.is_finite()) {
        return Err(CliError::validation("--moments", "entries must be finite"));
    }
    Ok(mu)
}

fn delta_meta(report: BoundReport, delta: f64, limit: &str) -> BoundReport {
    if delta == 1.0 {
        report.meta("delta_one_extension", limit)
    } else if delta > 1.0 {
        report.meta("jump_bound", "alpha > d: the event is impossible")
    } else {
        report
    }
}

pub fn cmd_compute(args: &ComputeArgs) -> Result<Output, CliError> {
    let t = args.theorem;
    let context = format!("for theorem {t}");
    let report = match t {
        1 | 2 => {
            reject_unused(
                t,
                &[
                    ("--moments", args.moments.is_some()),
                    ("--d", args.d.is_some()),
                    ("--alpha", args.alpha.is_some()),
                    ("--z", args.z.is_some()),
                    ("--r", args.r.is_some()),
                ],
            )?;
            let gamma = require(args.gamma, "--gamma", &context)?;
            let delta = require(args.delta, "--delta", &context)?;
            let n = require(args.n, "--n", &context)?;
            let inp = ExponentInput::new(gamma, delta)?;
            let (theorem, value, bound, limit) = if t == 1 {
                let e = exponent_cs(inp);
                (
                    Theorem::T1,
                    e,
                    tail_bound_t1(n, inp),
                    "exponent = ln(2/gamma)",
                )
            } else {
                let e = exponent_kl(inp)?;
                (
                    Theorem::T2,
                    e,
                    tail_bound_t2(n, inp)?,
                    "exponent = ln(1 + 1/gamma)",
                )
            };
            let mut r = BoundReport::new(theorem, bound.raw)
                .input("gamma", gamma)
                .input("delta", delta)
                .input("n", n as f64)
                .exponent(value.value);
            if let Some(x) = value.optimizer_x {
                r = r.meta("optimizer_x", num(x));
            }
            delta_meta(r, delta, limit)
        }
        3 => {
            reject_unused(
                t,
                &[
                    ("--gamma", args.gamma.is_some()),
                    ("--delta", args.delta.is_some()),
                    ("--z", args.z.is_some()),
                    ("--r", args.r.is_some()),
                ],
            )?;
            let moments = args
                .moments
                .as_deref()
                .ok_or_else(|| CliError::missing("--moments", &context))?;
            let mu = parse_moments(moments)?;
            let d = require(args.d, "--d", &context)?;
            let alpha = require(args.alpha, "--alpha", &context)?;
            let n = require(args.n, "--n", &context)?;
            let profile = MomentProfile::new(d, mu.clone())?;
            let b = tail_bound_t3(n, alpha, &profile)?;
            let mut r = BoundReport::new(Theorem::T3, b.bound.raw)
                .input("d", d)
                .input("alpha", alpha)
                .input("n", n as f64)
                .exponent(b.exponent())
                .meta("method", format!("{:?}", b.method).to_lowercase());
            for (i, m) in mu.iter().enumerate() {
                r = r.input(&format!("mu{}", 2 * (i + 1)), *m);
            }
            if let Some(x) = b.x_star {
                r = r.meta("optimizer_x", num(x));
            }
            r
        }
        _ => {
            reject_unused(
                t,
                &[
                    ("--gamma", args.gamma.is_some()),
                    ("--delta", args.delta.is_some()),
                    ("--n", args.n.is_some()),
                    ("--moments", args.moments.is_some()),
                    ("--alpha", args.alpha.is_some()),
                ],
            )?;
            let z = require(args.z, "--z", &context)?;
            let r = require(args.r, "--r", &context)?;
            let d = require(args.d, "--d", &context)?;
            let inp = FreedmanInput::new(z, r, d)?;
            let (theorem, variant) = if t == 4 {
                (Theorem::T4, FreedmanVariant::Tightened)
            } else {
                (Theorem::T5, FreedmanVariant::Classical)
            };
            BoundReport::new(theorem, freedman_bound(inp, variant))
                .input("z", z)
                .input("r", r)
                .input("d", d)
                .input("u", inp.u())
                .exponent(freedman_exponent(inp, variant))
        }
    };
    let text = match args.format {
        Format::Json => report.to_json() + "\n",
        Format::Csv => report_csv(&report)?,
    };
    Ok(Output::stdout(text))
}

/// One-row CSV: `theorem`, the inputs in key order, then the bound columns.
fn report_csv(r: &BoundReport) -> Result<String, CliError> {
    let mut header: Vec<&str> = vec!["theorem"];
    header.extend(r.inputs.keys().map(String::as_str));
    header.extend(["exponent", "bound_raw", "bound_clamped"]);
    let mut row = vec![r.theorem.to_string()];
    row.extend(r.inputs.values().map(|&v| num(v)));
    row.push(r.exponent.map_or(String::new(), |e| num(e.0)));
    row.push(num(r.bound_raw));
    row.push(num(r.bound_clamped));
    render(&header, &[row])
}

fn ratio(num_: f64, den: f64) -> String {
    let q = num_ / den;
    if den == 0.0 || !q.is_finite() {
        String::new()
    } else {
        num(q)
    }
}

pub fn cmd_compare(args: &CompareArgs) -> Result<Output, CliError> {
    let text = match (&args.delta_grid, &args.u_grid) {
        (Some(spec), None) => {
            let gamma = require(args.gamma, "--gamma", "with --delta-grid")?;
            let grid = parse_grid("--delta-grid", spec)?;
            if grid[0] < 0.0 {
                return Err(CliError::validation("--delta-grid", "delta must be >= 0"));
            }
            let mut rows = Vec::with_capacity(grid.len());
            for delta in grid {
                let inp = ExponentInput::new(gamma, delta)?;
                let cs = exponent_cs(inp).value;
                let kl = exponent_kl(inp)?.value;
                rows.push(vec![num(delta), num(cs), num(kl), ratio(cs, kl)]);
            }
            render(&["delta", "exponent_cs", "exponent_kl", "ratio"], &rows)?
        }
        (None, Some(spec)) => {
            if args.gamma.is_some() {
                return Err(CliError::validation("--gamma", "not used with --u-grid"));
            }
            let grid = parse_grid("--u-grid", spec)?;
            if grid[0] <= 0.0 {
                return Err(CliError::validation("--u-grid", "u must be > 0"));
            }
            let mut rows = Vec::with_capacity(grid.len());
            for u in grid {
                let c = freedman_c(u)?;
                let b = freedman_b(u)?;
                rows.push(vec![num(u), num(c), num(b), ratio(c, b)]);
            }
            render(&["u", "C", "B", "ratio"], &rows)?
        }
        _ => {
            return Err(CliError::validation(
                "--delta-grid",
                "exactly one of --delta-grid or --u-grid is required",
            ))
        }
    };
    let mut out = Output::stdout(text);
    out.out = args.out.clone();
    Ok(out)
}

fn negate(law: &LatticeLaw) -> symbounds::Result<LatticeLaw> {
    let atoms: BTreeMap<i64, f64> = law.atoms().iter().map(|(&k, &p)| (-k, p)).collect();
    LatticeLaw::new(law.step(), atoms)
}

fn on_lattice(x: f64, step: f64) -> bool {
    let q = x / step;
    (q - q.round()).abs() <= 1e-9 * q.abs().max(1.0)
}

struct Built {
    spec_law: IncrementLaw,
    weights: WeightRule,
    lattice: Option<LatticeLaw>,
}

fn build(args: &SimulateArgs) -> Result<Built, CliError> {
    let (law, weights) = match args.construction {
        Construction::Extremal => (
            IncrementLaw::three_point_symmetric(args.d, args.gamma)?,
            WeightRule::ConstantOne,
        ),
        Construction::Mcdiarmid => (
            IncrementLaw::two_point_mcdiarmid(args.d, args.gamma)?,
            WeightRule::ConstantOne,
        ),
        Construction::Shifted => (
            IncrementLaw::shifted_three_point(args.d, args.gamma, args.shift)?,
            WeightRule::ConstantOne,
        ),
        Construction::SignWeights => (
            IncrementLaw::three_point_symmetric(args.d, args.gamma)?,
            WeightRule::previous_sign(),
        ),
    };
    let lattice = match args.construction {
        Construction::SignWeights => None,
        _ => LatticeLaw::from_law(&law).ok(),
    };
    Ok(Built {
        spec_law: law,
        weights,
        lattice,
    })
}

fn mc_config(args: &SimulateArgs) -> Result<McConfig, CliError> {
    let cfg = McConfig::new(args.trials, args.seed);
    match args.workers {
        Some(0) => Err(CliError::validation("--workers", "must be >= 1")),
        Some(w) => Ok(cfg.with_workers(w)),
        None => Ok(cfg),
    }
}

fn construction_name(c: Construction) -> &'static str {
    match c {
        Construction::Extremal => "extremal",
        Construction::Mcdiarmid => "mcdiarmid",
        Construction::Shifted => "shifted",
        Construction::SignWeights => "sign-weights",
    }
}

/// Records the exact value, or why it is missing, on the report.
fn attach_exact(
    report: &mut BoundReport,
    exact: Option<Result<f64, symbounds::Error>>,
    unavailable: &str,
) {
    match exact {
        Some(Ok(p)) => {
            report.exact = Some(p);
            report.metadata.insert(
                "exact_within_bound".into(),
                report.exact_within_bound().to_string(),
            );
        }
        Some(Err(e)) => {
            report
                .metadata
                .insert("exact".into(), format!("skipped: {e}"));
        }
        None => {
            report.metadata.insert("exact".into(), unavailable.into());
        }
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<Output, CliError> {
    let cfg = mc_config(args)?;
    let built = build(args)?;
    match args.event {
        Event::Tail => simulate_tail(args, built, cfg),
        Event::Freedman => simulate_freedman(args, built, cfg),
    }
}

fn simulate_tail(args: &SimulateArgs, built: Built, cfg: McConfig) -> Result<Output, CliError> {
    for (flag, present) in [
        ("--z", args.z.is_some()),
        ("--r", args.r.is_some()),
        ("--max-horizon", args.max_horizon.is_some()),
    ] {
        if present {
            return Err(CliError::validation(
                flag,
                "only used with --event freedman",
            ));
        }
    }
    let n = require(args.n, "--n", "for a tail simulation")?;
    let alpha = require(args.alpha, "--alpha", "for a tail simulation")?;
    if args.construction == Construction::Shifted && args.side != Side::Upper {
        return Err(CliError::validation(
            "--side",
            "the shifted (supermartingale) construction only has an upper-tail bound; use --side upper",
        ));
    }
    let spec = MartingaleSpec::new(built.spec_law, built.weights, n)?;
    let side = match args.side {
        Side::Two => TailSide::TwoSidedMax,
        Side::Upper => TailSide::OneSidedMax,
        Side::Lower => TailSide::OneSidedMin,
    };
    let est = estimate_tail(&spec, alpha, side, cfg)?;

    let inp = ExponentInput::new(args.gamma, alpha / args.d)?;
    let (theorem, exponent) = match args.construction {
        Construction::Mcdiarmid => (Theorem::T2, exponent_kl(inp)?.value),
        _ => (Theorem::T1, exponent_cs(inp).value),
    };
    let prefactor = if args.side == Side::Two { 2.0 } else { 1.0 };
    let bound = TailBound::from_exponent(prefactor, n as u64, exponent);

    let mut report = BoundReport::new(theorem, bound.raw)
        .input("gamma", args.gamma)
        .input("d", args.d)
        .input("n", n as f64)
        .input("alpha", alpha)
        .exponent(exponent)
        .meta("construction", construction_name(args.construction))
        .meta("event", "tail")
        .meta("side", format!("{:?}", args.side).to_lowercase())
        .meta("seed", args.seed)
        .meta("trials", args.trials)
        .meta("bound_prefactor", prefactor);
    if args.construction == Construction::Shifted {
        report = report.input("shift", args.shift);
    }
    let barrier = alpha * n as f64;
    let exact = built.lattice.as_ref().map(|lattice| {
        report.metadata.insert(
            "lattice_rounded".into(),
            (!on_lattice(barrier, lattice.step())).to_string(),
        );
        match args.side {
            Side::Two => exact_max_tail(lattice, n, barrier, BarrierMode::TwoSided),
            Side::Upper => exact_max_tail(lattice, n, barrier, BarrierMode::OneSided),
            Side::Lower => negate(lattice)
                .and_then(|neg| exact_max_tail(&neg, n, barrier, BarrierMode::OneSided)),
        }
    });
    attach_exact(&mut report, exact, "unavailable for path-dependent weights");
    report = report.meta("ci_low_within_bound", est.ci_low <= bound.raw);
    report.mc_estimate = Some(est);
    Ok(Output::stdout(report.to_json() + "\n"))
}

fn simulate_freedman(args: &SimulateArgs, built: Built, cfg: McConfig) -> Result<Output, CliError> {
    for (flag, present) in [("--n", args.n.is_some()), ("--alpha", args.alpha.is_some())] {
        if present {
            return Err(CliError::validation(flag, "not used with --event freedman"));
        }
    }
    if args.side != Side::Upper && args.side != Side::Two {
        return Err(CliError::validation(
            "--side",
            "the Freedman event is an upper-tail event",
        ));
    }
    let z = require(args.z, "--z", "with --event freedman")?;
    let r = require(args.r, "--r", "with --event freedman")?;
    let max_horizon = require(args.max_horizon, "--max-horizon", "with --event freedman")?;
    let spec = MartingaleSpec::new(built.spec_law, built.weights, max_horizon)?;
    let est = estimate_freedman_event(&spec, z, r, max_horizon, cfg)?;

    let d_eff = spec.jump_bound();
    let inp = FreedmanInput::new(z, r, d_eff)?;
    let (theorem, variant) = if spec.is_conditionally_symmetric() {
        (Theorem::T4, FreedmanVariant::Tightened)
    } else {
        (Theorem::T5, FreedmanVariant::Classical)
    };
    let bound = freedman_bound(inp, variant);
    let mut report = BoundReport::new(theorem, bound)
        .input("gamma", args.gamma)
        .input("d", d_eff)
        .input("z", z)
        .input("r", r)
        .input("u", inp.u())
        .input("max_horizon", max_horizon as f64)
        .exponent(freedman_exponent(inp, variant))
        .meta("construction", construction_name(args.construction))
        .meta("event", "freedman")
        .meta("seed", args.seed)
        .meta("trials", args.trials)
        .meta("truncated", est.truncated)
        .meta("truncated_fraction", num(est.truncated_fraction()));
    if args.construction == Construction::Shifted {
        report = report.input("shift", args.shift);
    }

    let constant_martingale = matches!(
        args.construction,
        Construction::Extremal | Construction::Mcdiarmid
    );
    let exact = match (&built.lattice, constant_martingale) {
        (Some(lattice), true) => {
            let q = lattice.second_moment();
            let needed = (r / q + 1e-9).floor() as usize;
            if needed <= max_horizon {
                Some(exact_freedman_deterministic_q(lattice, q, z, r))
            } else {
                report = report.meta(
                    "exact",
                    format!(
                        "unavailable: the event needs {needed} steps, max horizon is {max_horizon}"
                    ),
                );
                None
            }
        }
        _ => None,
    };
    if !report.metadata.contains_key("exact") {
        attach_exact(&mut report, exact, "unavailable for this construction");
    }
    report = report.meta("ci_low_within_bound", est.estimate.ci_low <= bound);

    let mut warnings = Vec::new();
    let mut exit_code = EXIT_OK;
    if est.truncated_fraction() > TRUNCATION_LIMIT {
        exit_code = EXIT_TRUNCATION;
        warnings.push(format!(
            "{} of {} paths reached --max-horizon {max_horizon} with Q <= r; raise --max-horizon",
            est.truncated, est.estimate.trials
        ));
    }
    report.mc_estimate = Some(est.estimate);
    Ok(Output {
        text: report.to_json() + "\n",
        out: None,
        exit_code,
        warnings,
    })
}

pub fn cmd_verify_optimality(args: &VerifyArgs) -> Result<Output, CliError> {
    let ns: Vec<usize> = parse_list("--n-list", &args.n_list)?;
    if ns.contains(&0) {
        return Err(CliError::validation("--n-list", "horizons must be >= 1"));
    }
    if !(args.gamma > 0.0 && args.gamma <= 1.0) {
        return Err(CliError::validation(
            "--gamma",
            format!("{} is not in (0, 1]", args.gamma),
        ));
    }
    if !(args.delta > 0.0 && args.delta < 1.0) {
        return Err(CliError::validation(
            "--delta",
            format!("{} is not in (0, 1)", args.delta),
        ));
    }
    let law = match args.law {
        LawArg::Symmetric => OptimalityLaw::Symmetric,
        LawArg::Mcdiarmid => OptimalityLaw::Mcdiarmid,
    };
    let est = rate_convergence(law, args.gamma, args.delta, &ns)?;
    let rows: Vec<Vec<String>> = (0..ns.len())
        .map(|i| {
            vec![
                ns[i].to_string(),
                num(est.exact_tails[i]),
                num(est.empirical_rates[i]),
                num(est.target),
                num(est.gaps[i]),
            ]
        })
        .collect();
    let text = render(
        &[
            "n",
            "exact_tail",
            "empirical_rate",
            "target_exponent",
            "gap",
        ],
        &rows,
    )?;
    let mut warnings = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        if est.rounded[i] {
            warnings.push(format!(
                "n = {n}: threshold {} rounded up to the lattice point {}",
                args.delta * n as f64,
                est.effective_thresholds[i]
            ));
        }
    }
    Ok(Output {
        text,
        out: args.out.clone(),
        exit_code: EXIT_OK,
        warnings,
    })
}
