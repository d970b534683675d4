//! Monte Carlo simulation of conditionally symmetric (super)martingales of the
//! form `X_n = sum_k A_k U_k` with i.i.d. increments `U_k` and predictable
//! weights `A_k`.
//!
//! Every path draws from its own ChaCha stream selected by the path index, so
//! an estimate depends only on `(spec, event, trials, seed)` and never on how
//! many worker threads share the work.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Relative slack used when comparing partial sums against thresholds.
pub(crate) const THRESHOLD_SLACK: f64 = 1e-9;

/// Tolerance on the total weight of a discrete law.
const WEIGHT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawKind {
    ThreePointSymmetric,
    TwoPointMcdiarmid,
    ShiftedThreePoint,
    CustomDiscrete,
}

/// Distribution of the i.i.d. increments `U_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementLaw {
    kind: LawKind,
    d: f64,
    /// `(value, probability)` pairs.
    atoms: Vec<(f64, f64)>,
    shift: f64,
}

fn check_d_gamma(d: f64, gamma: f64) -> Result<()> {
    if !d.is_finite() || d <= 0.0 {
        return Err(invalid("d", format!("{d} is not a finite value > 0")));
    }
    if !gamma.is_finite() || gamma <= 0.0 || gamma > 1.0 {
        return Err(invalid("gamma", format!("{gamma} is not in (0, 1]")));
    }
    Ok(())
}

impl IncrementLaw {
    /// `P(+d) = P(-d) = gamma/2`, `P(0) = 1 - gamma`.
    pub fn three_point_symmetric(d: f64, gamma: f64) -> Result<Self> {
        check_d_gamma(d, gamma)?;
        Ok(Self {
            kind: LawKind::ThreePointSymmetric,
            d,
            atoms: three_point_atoms(d, gamma, 0.0),
            shift: 0.0,
        })
    }

    /// `P(+d) = gamma/(1+gamma)`, `P(-gamma d) = 1/(1+gamma)`; mean zero,
    /// variance `gamma d^2`, symmetric only at `gamma = 1`.
    pub fn two_point_mcdiarmid(d: f64, gamma: f64) -> Result<Self> {
        check_d_gamma(d, gamma)?;
        Ok(Self {
            kind: LawKind::TwoPointMcdiarmid,
            d,
            atoms: vec![
                (d, gamma / (1.0 + gamma)),
                (-gamma * d, 1.0 / (1.0 + gamma)),
            ],
            shift: 0.0,
        })
    }

    /// Three-point symmetric law moved by `shift <= 0`: a supermartingale increment.
    pub fn shifted_three_point(d: f64, gamma: f64, shift: f64) -> Result<Self> {
        check_d_gamma(d, gamma)?;
        if !shift.is_finite() || shift > 0.0 {
            return Err(invalid(
                "shift",
                format!("{shift} is not a finite value <= 0"),
            ));
        }
        Ok(Self {
            kind: LawKind::ShiftedThreePoint,
            d,
            atoms: three_point_atoms(d, gamma, shift),
            shift,
        })
    }

    /// Finite law on `[-d, d]`, or on `(-inf, d]` when `one_sided`.
    pub fn custom(d: f64, atoms: Vec<(f64, f64)>, one_sided: bool) -> Result<Self> {
        if !d.is_finite() || d <= 0.0 {
            return Err(invalid("d", format!("{d} is not a finite value > 0")));
        }
        if atoms.is_empty() {
            return Err(invalid("atoms", "empty support"));
        }
        let mut total = 0.0;
        for &(v, p) in &atoms {
            if !v.is_finite() || !p.is_finite() || p < 0.0 {
                return Err(invalid("atoms", format!("bad atom ({v}, {p})")));
            }
            let outside = if one_sided { v > d } else { v.abs() > d };
            if outside {
                return Err(invalid(
                    "atoms",
                    format!("atom {v} violates the jump bound {d}"),
                ));
            }
            total += p;
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(invalid("atoms", format!("weights sum to {total}, not 1")));
        }
        Ok(Self {
            kind: LawKind::CustomDiscrete,
            d,
            atoms,
            shift: 0.0,
        })
    }

    pub fn kind(&self) -> LawKind {
        self.kind
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().map(|&(v, p)| v * p).sum()
    }

    /// Central second moment.
    pub fn variance(&self) -> f64 {
        let mu = self.mean();
        self.atoms
            .iter()
            .map(|&(v, p)| p * (v - mu) * (v - mu))
            .sum()
    }

    /// Normalized variance `Var(U) / d^2`.
    pub fn gamma(&self) -> f64 {
        self.variance() / (self.d * self.d)
    }

    /// Whether the law is symmetric around its mean.
    pub fn is_symmetric(&self) -> bool {
        let mu = self.mean();
        let scale = self.d.max(1.0) * 1e-12;
        self.atoms.iter().all(|&(v, p)| {
            let mirror = 2.0 * mu - v;
            let mass: f64 = self
                .atoms
                .iter()
                .filter(|&&(w, _)| (w - mirror).abs() <= scale)
                .map(|&(_, q)| q)
                .sum();
            let own: f64 = self
                .atoms
                .iter()
                .filter(|&&(w, _)| (w - v).abs() <= scale)
                .map(|&(_, q)| q)
                .sum();
            (mass - own).abs() <= WEIGHT_TOL || p == 0.0
        })
    }

    /// Inverse-CDF draw from a uniform `u` in `[0, 1)`.
    fn draw(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for &(v, p) in &self.atoms {
            acc += p;
            if u < acc {
                return v;
            }
        }
        self.atoms[self.atoms.len() - 1].0
    }
}

fn three_point_atoms(d: f64, gamma: f64, shift: f64) -> Vec<(f64, f64)> {
    vec![
        (shift - d, 0.5 * gamma),
        (shift, 1.0 - gamma),
        (shift + d, 0.5 * gamma),
    ]
}

/// Predictable weights `A_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeightRule {
    ConstantOne,
    /// `A_k = seq[(k - 1) mod len]`.
    DeterministicSequence(Vec<f64>),
    /// `A_1 = positive`; afterwards `positive` if the previous jump was
    /// strictly positive and `otherwise` if not.
    PreviousSignDependent {
        positive: f64,
        otherwise: f64,
    },
}

impl WeightRule {
    pub fn previous_sign() -> Self {
        WeightRule::PreviousSignDependent {
            positive: 1.0,
            otherwise: 0.5,
        }
    }

    /// Weight of step `k` (1-based) given the jump of step `k - 1`.
    #[inline]
    pub fn weight(&self, k: usize, previous_jump: Option<f64>) -> f64 {
        match self {
            WeightRule::ConstantOne => 1.0,
            WeightRule::DeterministicSequence(seq) => seq[(k - 1) % seq.len()],
            WeightRule::PreviousSignDependent {
                positive,
                otherwise,
            } => match previous_jump {
                None => *positive,
                Some(j) if j > 0.0 => *positive,
                Some(_) => *otherwise,
            },
        }
    }

    /// Declared bound on `|A_k|`.
    pub fn bound(&self) -> f64 {
        match self {
            WeightRule::ConstantOne => 1.0,
            WeightRule::DeterministicSequence(seq) => seq.iter().fold(0.0, |m, a| m.max(a.abs())),
            WeightRule::PreviousSignDependent {
                positive,
                otherwise,
            } => positive.abs().max(otherwise.abs()),
        }
    }

    fn values(&self) -> Vec<f64> {
        match self {
            WeightRule::ConstantOne => vec![1.0],
            WeightRule::DeterministicSequence(seq) => seq.clone(),
            WeightRule::PreviousSignDependent {
                positive,
                otherwise,
            } => vec![*positive, *otherwise],
        }
    }
}

/// One of the martingale constructions: increments, weights and horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartingaleSpec {
    law: IncrementLaw,
    weights: WeightRule,
    horizon: usize,
}

impl MartingaleSpec {
    pub fn new(law: IncrementLaw, weights: WeightRule, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon", "must be >= 1"));
        }
        let values = weights.values();
        if values.is_empty() {
            return Err(invalid("weights", "empty weight sequence"));
        }
        if values.iter().any(|a| !a.is_finite()) {
            return Err(invalid("weights", "weights must be finite"));
        }
        if law.shift < 0.0 && values.iter().any(|&a| a < 0.0) {
            return Err(invalid(
                "weights",
                "a supermartingale construction needs non-negative weights",
            ));
        }
        Ok(Self {
            law,
            weights,
            horizon,
        })
    }

    pub fn law(&self) -> &IncrementLaw {
        &self.law
    }

    pub fn weights(&self) -> &WeightRule {
        &self.weights
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_horizon(&self, horizon: usize) -> Result<Self> {
        Self::new(self.law.clone(), self.weights.clone(), horizon)
    }

    /// Bound on the centered jumps `|A_k (U_k - E U_k)|`.
    pub fn jump_bound(&self) -> f64 {
        let mu = self.law.mean();
        let spread = self
            .law
            .atoms
            .iter()
            .fold(0.0f64, |m, &(v, _)| m.max((v - mu).abs()));
        spread * self.weights.bound()
    }

    /// Bound on the conditional variance of a jump.
    pub fn variance_bound(&self) -> f64 {
        self.law.variance() * self.weights.bound().powi(2)
    }

    /// Whether the centered increments are conditionally symmetric.
    pub fn is_conditionally_symmetric(&self) -> bool {
        self.law.is_symmetric()
    }
}

/// Statistics of one simulated path `S_k = X_k - X_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathStats {
    pub final_sum: f64,
    pub running_max: f64,
    pub running_max_abs: f64,
    pub running_min: f64,
    /// Predictable quadratic variation `Q_k`, `k = 1..n`.
    pub qvar_trace: Vec<f64>,
}

/// Walks a path step by step, tracking the predictable quadratic variation.
struct Walker<'a> {
    spec: &'a MartingaleSpec,
    variance: f64,
    k: usize,
    sum: f64,
    qvar: f64,
    prev_jump: Option<f64>,
}

impl<'a> Walker<'a> {
    fn new(spec: &'a MartingaleSpec) -> Self {
        Self {
            spec,
            variance: spec.law.variance(),
            k: 0,
            sum: 0.0,
            qvar: 0.0,
            prev_jump: None,
        }
    }

    /// `Q_{k+1}`, known before the next increment is drawn.
    fn next_qvar(&self) -> f64 {
        let a = self.spec.weights.weight(self.k + 1, self.prev_jump);
        self.qvar + a * a * self.variance
    }

    fn step<R: Rng>(&mut self, rng: &mut R) {
        self.k += 1;
        let a = self.spec.weights.weight(self.k, self.prev_jump);
        let jump = a * self.spec.law.draw(rng.random::<f64>());
        self.qvar += a * a * self.variance;
        self.sum += jump;
        self.prev_jump = Some(jump);
    }
}

/// Stream of path `index` under master `seed`.
pub fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates one path over the spec's horizon.
pub fn sample_path<R: Rng>(spec: &MartingaleSpec, rng: &mut R) -> PathStats {
    let mut w = Walker::new(spec);
    let mut qvar_trace = Vec::with_capacity(spec.horizon);
    let (mut hi, mut lo, mut abs) = (f64::NEG_INFINITY, f64::INFINITY, 0.0f64);
    for _ in 0..spec.horizon {
        w.step(rng);
        hi = hi.max(w.sum);
        lo = lo.min(w.sum);
        abs = abs.max(w.sum.abs());
        qvar_trace.push(w.qvar);
    }
    PathStats {
        final_sum: w.sum,
        running_max: hi,
        running_max_abs: abs,
        running_min: lo,
        qvar_trace,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailSide {
    /// `max_k |S_k| >= alpha n`.
    TwoSidedMax,
    /// `max_k S_k >= alpha n`.
    OneSidedMax,
    /// `min_k S_k <= -alpha n`.
    OneSidedMin,
}

impl TailSide {
    fn describe(self) -> &'static str {
        match self {
            TailSide::TwoSidedMax => "max_k |S_k| >= ",
            TailSide::OneSidedMax => "max_k S_k >= ",
            TailSide::OneSidedMin => "min_k S_k <= -",
        }
    }
}

/// Monte Carlo run parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            workers: None,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub hits: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub event_descriptor: String,
}

impl TailEstimate {
    fn from_counts(hits: u64, trials: u64, seed: u64, event_descriptor: String) -> Self {
        let (ci_low, ci_high) = wilson_interval(hits, trials, Z_95);
        Self {
            hits,
            trials,
            p_hat: hits as f64 / trials as f64,
            ci_low,
            ci_high,
            seed,
            event_descriptor,
        }
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.ci_high - self.ci_low)
    }

    pub fn covers(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Wilson score interval for `hits` successes in `trials`.
pub fn wilson_interval(hits: u64, trials: u64, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let mut lo = ((center - half) / denom).clamp(0.0, p);
    let mut hi = ((center + half) / denom).clamp(p, 1.0);
    if hits == 0 {
        lo = 0.0;
    }
    if hits == trials {
        hi = 1.0;
    }
    (lo, hi)
}

fn reaches(value: f64, threshold: f64) -> bool {
    value >= threshold - THRESHOLD_SLACK * threshold.abs().max(1.0)
}

/// Runs `outcome` on every path and tallies the returned class (0, 1 or 2).
fn tally<F>(cfg: McConfig, outcome: F) -> [u64; 3]
where
    F: Fn(&mut ChaCha8Rng) -> u8 + Sync,
{
    let run = || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| {
                let mut t = [0u64; 3];
                t[outcome(&mut path_rng(cfg.seed, i)) as usize] += 1;
                t
            })
            .reduce(|| [0; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]])
    };
    match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(run),
        None => run(),
    }
}

fn check_trials(cfg: &McConfig) -> Result<()> {
    if cfg.trials == 0 {
        return Err(invalid("trials", "must be >= 1"));
    }
    Ok(())
}

/// Estimates the probability of a running-extremum event at level `alpha * n`.
pub fn estimate_tail(
    spec: &MartingaleSpec,
    alpha: f64,
    side: TailSide,
    cfg: McConfig,
) -> Result<TailEstimate> {
    check_trials(&cfg)?;
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(invalid(
            "alpha",
            format!("{alpha} is not a finite value >= 0"),
        ));
    }
    let threshold = alpha * spec.horizon as f64;
    let counts = tally(cfg, |rng| {
        let mut w = Walker::new(spec);
        for _ in 0..spec.horizon {
            w.step(rng);
            let hit = match side {
                TailSide::TwoSidedMax => reaches(w.sum.abs(), threshold),
                TailSide::OneSidedMax => reaches(w.sum, threshold),
                TailSide::OneSidedMin => reaches(-w.sum, threshold),
            };
            if hit {
                return 1;
            }
        }
        0
    });
    let hits = counts[1];
    let descriptor = format!("{}{} over n = {}", side.describe(), threshold, spec.horizon);
    Ok(TailEstimate::from_counts(
        hits, cfg.trials, cfg.seed, descriptor,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreedmanEstimate {
    pub estimate: TailEstimate,
    /// Paths that reached `max_horizon` with `Q <= r` and no hit.
    pub truncated: u64,
}

impl FreedmanEstimate {
    pub fn truncated_fraction(&self) -> f64 {
        self.truncated as f64 / self.estimate.trials as f64
    }
}

/// Estimates `P(exists n: max_{k <= n} S_k >= z and Q_n <= r)`.
///
/// A path hits as soon as it reaches `z` while its quadratic variation is
/// still at most `r`, and is abandoned once `Q` would exceed `r`.
pub fn estimate_freedman_event(
    spec: &MartingaleSpec,
    z: f64,
    r: f64,
    max_horizon: usize,
    cfg: McConfig,
) -> Result<FreedmanEstimate> {
    check_trials(&cfg)?;
    for (field, v) in [("z", z), ("r", r)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(invalid(field, format!("{v} is not a finite value > 0")));
        }
    }
    if max_horizon == 0 {
        return Err(invalid("max_horizon", "must be >= 1"));
    }
    let r_cut = r + THRESHOLD_SLACK * r.max(1.0);
    // 0 = miss, 1 = hit, 2 = truncated
    let outcome = |rng: &mut ChaCha8Rng| -> u8 {
        let mut w = Walker::new(spec);
        for _ in 0..max_horizon {
            if w.next_qvar() > r_cut {
                return 0;
            }
            w.step(rng);
            if reaches(w.sum, z) {
                return 1;
            }
        }
        if w.next_qvar() > r_cut {
            0
        } else {
            2
        }
    };
    let [_, hits, truncated] = tally(cfg, outcome);
    let descriptor = format!("max_k S_k >= {z} with Q_k <= {r}, horizon {max_horizon}");
    Ok(FreedmanEstimate {
        estimate: TailEstimate::from_counts(hits, cfg.trials, cfg.seed, descriptor),
        truncated,
    })
}

/// Sample mean of centered increments in one conditioning bucket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryBucket {
    pub step: usize,
    /// Sign of the previous jump (`0` for the first step or a zero jump).
    pub previous_sign: i8,
    pub count: u64,
    pub mean: f64,
    pub std_err: f64,
}

/// Conditional means of the centered increments `A_k (U_k - E U_k)`, bucketed
/// by step and the sign of the previous jump.
pub fn increment_symmetry(spec: &MartingaleSpec, trials: u64, seed: u64) -> Vec<SymmetryBucket> {
    let mut acc: BTreeMap<(usize, i8), (u64, f64, f64)> = BTreeMap::new();
    let mean = spec.law.mean();
    for i in 0..trials {
        let mut rng = path_rng(seed, i);
        let mut prev: Option<f64> = None;
        for k in 1..=spec.horizon {
            let a = spec.weights.weight(k, prev);
            let u = spec.law.draw(rng.random::<f64>());
            let eta = a * (u - mean);
            let sign = prev.map_or(0, |p| {
                if p > 0.0 {
                    1
                } else if p < 0.0 {
                    -1
                } else {
                    0
                }
            });
            let e = acc.entry((k, sign)).or_insert((0, 0.0, 0.0));
            e.0 += 1;
            e.1 += eta;
            e.2 += eta * eta;
            prev = Some(a * u);
        }
    }
    acc.into_iter()
        .map(|((step, previous_sign), (count, s, s2))| {
            let c = count as f64;
            let mean = s / c;
            let var = (s2 / c - mean * mean).max(0.0);
            SymmetryBucket {
                step,
                previous_sign,
                count,
                mean,
                std_err: (var / c).sqrt(),
            }
        })
        .collect()
}
