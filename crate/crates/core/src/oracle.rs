//! Exact tail probabilities for i.i.d. lattice increments by dynamic
//! programming, plus exact checks of the moment generating function identities
//! behind the bounds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::exponent::{cosh_m1, exponent_cs, exponent_kl, ExponentInput};
use crate::simulator::{IncrementLaw, THRESHOLD_SLACK};

/// Budget of `n * |support of S_n|` state-steps per dynamic program.
pub const STATE_STEP_LIMIT: u128 = 10_000_000;

/// Largest lattice denominator tried when placing a real law on a lattice.
const MAX_DENOMINATOR: i64 = 10_000;

const MASS_TOL: f64 = 1e-14;

/// Below this a linear-scale tail is recomputed in log space.
const LOG_SCALE_SWITCH: f64 = 1e-280;

/// A law supported on `step * Z`, stored as integer offsets with probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeLaw {
    step: f64,
    atoms: BTreeMap<i64, f64>,
}

impl LatticeLaw {
    pub fn new(step: f64, atoms: BTreeMap<i64, f64>) -> Result<Self> {
        if !step.is_finite() || step <= 0.0 {
            return Err(invalid("step", format!("{step} is not a finite value > 0")));
        }
        if atoms.is_empty() {
            return Err(invalid("atoms", "empty support"));
        }
        if atoms.values().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(invalid("atoms", "probabilities must be finite and >= 0"));
        }
        let total: f64 = atoms.values().sum();
        if (total - 1.0).abs() > MASS_TOL {
            return Err(invalid(
                "atoms",
                format!("probabilities sum to {total}, not 1"),
            ));
        }
        let atoms = atoms.into_iter().filter(|&(_, p)| p > 0.0).collect();
        Ok(Self { step, atoms })
    }

    /// `P(+d) = P(-d) = gamma/2`, `P(0) = 1 - gamma`.
    pub fn three_point(gamma: f64, d: f64) -> Result<Self> {
        Self::from_law(&IncrementLaw::three_point_symmetric(d, gamma)?)
    }

    /// `P(+d) = gamma/(1+gamma)`, `P(-gamma d) = 1/(1+gamma)`.
    pub fn two_point_mcdiarmid(gamma: f64, d: f64) -> Result<Self> {
        Self::from_law(&IncrementLaw::two_point_mcdiarmid(d, gamma)?)
    }

    /// Places a discrete law on the coarsest lattice `(d / q) Z` with
    /// `q <= 10_000` that carries every atom.
    pub fn from_law(law: &IncrementLaw) -> Result<Self> {
        let d = law.d();
        let ratios: Vec<f64> = law.atoms().iter().map(|&(v, _)| v / d).collect();
        let q = (1..=MAX_DENOMINATOR)
            .find(|&q| {
                ratios
                    .iter()
                    .all(|r| (r * q as f64 - (r * q as f64).round()).abs() <= 1e-9)
            })
            .ok_or_else(|| {
                invalid(
                    "atoms",
                    "atoms do not share a lattice with denominator <= 10000",
                )
            })?;
        let step = d / q as f64;
        let mut atoms = BTreeMap::new();
        for &(v, p) in law.atoms() {
            *atoms.entry((v / step).round() as i64).or_insert(0.0) += p;
        }
        Self::new(step, atoms)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn atoms(&self) -> &BTreeMap<i64, f64> {
        &self.atoms
    }

    pub fn mean(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(&k, &p)| p * k as f64 * self.step)
            .sum()
    }

    /// Raw second moment `E[X^2]`.
    pub fn second_moment(&self) -> f64 {
        self.atoms
            .iter()
            .map(|(&k, &p)| p * (k as f64 * self.step).powi(2))
            .sum()
    }

    fn reduced(&self) -> Reduced {
        let min = *self.atoms.keys().next().expect("non-empty");
        let g = self.atoms.keys().fold(0i64, |g, &k| gcd(g, k - min)).max(1);
        let atoms: Vec<(usize, f64)> = self
            .atoms
            .iter()
            .map(|(&k, &p)| (((k - min) / g) as usize, p))
            .collect();
        let span = atoms.iter().map(|a| a.0).max().unwrap_or(0);
        Reduced {
            min,
            g,
            span,
            atoms,
        }
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `S_k / step = k * min + g * j` for a dense index `j` in `0..=k * span`.
struct Reduced {
    min: i64,
    g: i64,
    span: usize,
    atoms: Vec<(usize, f64)>,
}

impl Reduced {
    fn guard(&self, n: usize) -> Result<()> {
        let needed = n as u128 * (n as u128 * self.span as u128 + 1);
        if needed > STATE_STEP_LIMIT {
            return Err(Error::ResourceGuard {
                needed,
                limit: STATE_STEP_LIMIT,
            });
        }
        Ok(())
    }

    /// Lattice value (in steps) of index `j` after `k` steps.
    fn value(&self, k: usize, j: usize) -> i64 {
        k as i64 * self.min + self.g * j as i64
    }

    /// Smallest `j` with `value(k, j) >= target`, possibly out of range.
    fn first_index_at_least(&self, k: usize, target: i64) -> i64 {
        let rel = target - k as i64 * self.min;
        rel.div_euclid(self.g) + i64::from(rel.rem_euclid(self.g) != 0)
    }

    fn convolve(&self, dist: &[f64]) -> Vec<f64> {
        let mut next = vec![0.0; dist.len() + self.span];
        for (j, &p) in dist.iter().enumerate() {
            if p == 0.0 {
                continue;
            }
            for &(r, q) in &self.atoms {
                next[j + r] += p * q;
            }
        }
        next
    }

    fn convolve_log(&self, dist: &[f64]) -> Vec<f64> {
        let mut next = vec![f64::NEG_INFINITY; dist.len() + self.span];
        for (j, &lp) in dist.iter().enumerate() {
            if lp == f64::NEG_INFINITY {
                continue;
            }
            for &(r, q) in &self.atoms {
                next[j + r] = log_add_exp(next[j + r], lp + q.ln());
            }
        }
        next
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Neumaier-compensated sum.
fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// Threshold in lattice units, rounded up to the lattice.
fn lattice_ceil(threshold: f64, step: f64) -> i64 {
    let units = threshold / step;
    let slack = THRESHOLD_SLACK * units.abs().max(1.0);
    (units - slack).ceil() as i64
}

/// An exact tail probability together with the threshold actually used.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeTail {
    pub probability: f64,
    pub requested_threshold: f64,
    pub effective_threshold: f64,
    /// Whether the threshold was moved up to the next lattice point.
    pub rounded: bool,
}

fn tail_detail(
    law: &LatticeLaw,
    n: usize,
    threshold: f64,
) -> Result<(LatticeTail, Reduced, Vec<f64>)> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    let red = law.reduced();
    red.guard(n)?;
    let mut dist = vec![1.0];
    for _ in 0..n {
        dist = red.convolve(&dist);
    }
    let target = lattice_ceil(threshold, law.step);
    let j0 = red.first_index_at_least(n, target).max(0) as usize;
    let probability = if j0 >= dist.len() {
        0.0
    } else {
        compensated_sum(dist[j0..].iter().rev().copied()).min(1.0)
    };
    let effective = target as f64 * law.step;
    let tail = LatticeTail {
        probability,
        requested_threshold: threshold,
        effective_threshold: effective,
        rounded: (effective - threshold).abs() > THRESHOLD_SLACK * threshold.abs().max(1.0),
    };
    Ok((tail, red, dist))
}

/// `P(S_n >= threshold)` by iterated convolution.
pub fn exact_tail(law: &LatticeLaw, n: usize, threshold: f64) -> Result<f64> {
    Ok(tail_detail(law, n, threshold)?.0.probability)
}

/// Like [`exact_tail`], reporting how the threshold met the lattice.
pub fn exact_tail_detailed(law: &LatticeLaw, n: usize, threshold: f64) -> Result<LatticeTail> {
    Ok(tail_detail(law, n, threshold)?.0)
}

/// Full distribution of `S_n` as `(value, probability)` pairs.
pub fn exact_distribution(law: &LatticeLaw, n: usize) -> Result<Vec<(f64, f64)>> {
    let (_, red, dist) = tail_detail(law, n, 0.0)?;
    Ok(dist
        .iter()
        .enumerate()
        .map(|(j, &p)| (red.value(n, j) as f64 * law.step, p))
        .collect())
}

/// `ln P(S_n >= threshold)` computed entirely in log space.
pub fn exact_log_tail(law: &LatticeLaw, n: usize, threshold: f64) -> Result<f64> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    let red = law.reduced();
    red.guard(n)?;
    let mut dist = vec![0.0];
    for _ in 0..n {
        dist = red.convolve_log(&dist);
    }
    let j0 = red
        .first_index_at_least(n, lattice_ceil(threshold, law.step))
        .max(0) as usize;
    Ok(dist
        .iter()
        .skip(j0)
        .fold(f64::NEG_INFINITY, |acc, &lp| log_add_exp(acc, lp)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BarrierMode {
    /// Absorb once `S_k >= barrier`.
    OneSided,
    /// Absorb once `|S_k| >= barrier`.
    TwoSided,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaxTail {
    pub probability: f64,
    /// Live plus absorbed mass after each step.
    pub mass_history: Vec<f64>,
}

/// Running-maximum tail `P(max_{1<=k<=n} S_k >= barrier)` (or of `|S_k|`)
/// by an absorbing-barrier dynamic program.
pub fn exact_max_tail(law: &LatticeLaw, n: usize, barrier: f64, mode: BarrierMode) -> Result<f64> {
    Ok(exact_max_tail_traced(law, n, barrier, mode)?.probability)
}

pub fn exact_max_tail_traced(
    law: &LatticeLaw,
    n: usize,
    barrier: f64,
    mode: BarrierMode,
) -> Result<MaxTail> {
    if barrier.is_nan() {
        return Err(invalid("barrier", "NaN"));
    }
    let red = law.reduced();
    red.guard(n)?;
    let b = lattice_ceil(barrier, law.step);
    let mut dist = vec![1.0];
    let mut absorbed = 0.0;
    let mut mass_history = Vec::with_capacity(n);
    for k in 1..=n {
        dist = red.convolve(&dist);
        let mut moved = Vec::new();
        let hi = red.first_index_at_least(k, b).max(0) as usize;
        if hi < dist.len() {
            moved.extend(dist[hi..].iter().copied());
            dist[hi..].iter_mut().for_each(|p| *p = 0.0);
        }
        if mode == BarrierMode::TwoSided {
            // value <= -b
            let lo = red.first_index_at_least(k, -b + 1);
            let end = lo.clamp(0, dist.len() as i64) as usize;
            moved.extend(dist[..end].iter().copied());
            dist[..end].iter_mut().for_each(|p| *p = 0.0);
        }
        absorbed += compensated_sum(moved);
        let live = compensated_sum(dist.iter().copied());
        mass_history.push(live + absorbed);
    }
    Ok(MaxTail {
        probability: absorbed.min(1.0),
        mass_history,
    })
}

/// Freedman event under a deterministic quadratic variation `Q_k = k * qstep`:
/// the running maximum over `floor(r / qstep)` steps reaching `z`.
pub fn exact_freedman_deterministic_q(law: &LatticeLaw, qstep: f64, z: f64, r: f64) -> Result<f64> {
    for (field, v) in [("qstep", qstep), ("z", z), ("r", r)] {
        if !v.is_finite() || v <= 0.0 {
            return Err(invalid(field, format!("{v} is not a finite value > 0")));
        }
    }
    let m2 = law.second_moment();
    if (qstep - m2).abs() > 1e-12 * m2.max(1.0) {
        return Err(invalid(
            "qstep",
            format!("{qstep} differs from the law's second moment {m2}"),
        ));
    }
    let horizon = (r / qstep + THRESHOLD_SLACK).floor() as usize;
    exact_max_tail(law, horizon, z, BarrierMode::OneSided)
}

/// Extremal law whose rate function is compared against a closed-form exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimalityLaw {
    /// Three-point symmetric law; its rate is the symmetric exponent.
    Symmetric,
    /// Two-point law `P(d) = gamma/(1+gamma)`; its rate is the divergence exponent.
    Mcdiarmid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub n_values: Vec<usize>,
    pub exact_tails: Vec<f64>,
    /// `-(1/n) ln P(S_n >= alpha n)`.
    pub empirical_rates: Vec<f64>,
    pub target: f64,
    /// `empirical_rate - target`; positive because the bound holds at every `n`.
    pub gaps: Vec<f64>,
    pub effective_thresholds: Vec<f64>,
    pub rounded: Vec<bool>,
}

impl RateEstimate {
    pub fn gaps_positive(&self) -> bool {
        self.gaps.iter().all(|&g| g > 0.0)
    }

    pub fn gaps_non_increasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn gaps_strictly_decreasing(&self) -> bool {
        self.gaps.windows(2).all(|w| w[1] < w[0])
    }

    pub fn any_rounded(&self) -> bool {
        self.rounded.iter().any(|&r| r)
    }
}

/// Exact Cramér rates `-(1/n) ln P(S_n >= delta n)` for the extremal law with
/// `d = 1`, against the matching closed-form exponent.
pub fn rate_convergence(
    law: OptimalityLaw,
    gamma: f64,
    delta: f64,
    n_values: &[usize],
) -> Result<RateEstimate> {
    let inp = ExponentInput::new(gamma, delta)?;
    if gamma == 0.0 {
        return Err(domain("rate_convergence", "gamma must be > 0"));
    }
    let (lattice, target) = match law {
        OptimalityLaw::Symmetric => (LatticeLaw::three_point(gamma, 1.0)?, exponent_cs(inp).value),
        OptimalityLaw::Mcdiarmid => (
            LatticeLaw::two_point_mcdiarmid(gamma, 1.0)?,
            exponent_kl(inp)?.value,
        ),
    };
    let mut est = RateEstimate {
        n_values: n_values.to_vec(),
        exact_tails: Vec::new(),
        empirical_rates: Vec::new(),
        target,
        gaps: Vec::new(),
        effective_thresholds: Vec::new(),
        rounded: Vec::new(),
    };
    for &n in n_values {
        let tail = exact_tail_detailed(&lattice, n, delta * n as f64)?;
        let log_p = if tail.probability < LOG_SCALE_SWITCH {
            exact_log_tail(&lattice, n, delta * n as f64)?
        } else {
            tail.probability.ln()
        };
        let rate = -log_p / n as f64;
        est.exact_tails.push(tail.probability);
        est.empirical_rates.push(rate);
        est.gaps.push(rate - target);
        est.effective_thresholds.push(tail.effective_threshold);
        est.rounded.push(tail.rounded);
    }
    Ok(est)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BennettCheck {
    /// `E[exp(lambda X)]`, enumerated over the atoms.
    pub lhs: f64,
    /// `1 + gamma (cosh(lambda d) - 1)`.
    pub rhs: f64,
    /// `|lhs - rhs| <= 1e-14 * max(1, rhs)`.
    pub equal: bool,
    /// `lhs <= rhs` up to the same tolerance.
    pub holds: bool,
}

fn bennett(atoms: &[(f64, f64)], gamma: f64, d: f64, lambda: f64) -> BennettCheck {
    let lhs = compensated_sum(atoms.iter().map(|&(v, p)| p * (lambda * v).exp()));
    let rhs = 1.0 + gamma * cosh_m1(lambda * d);
    let tol = 1e-14 * rhs.max(1.0);
    BennettCheck {
        lhs,
        rhs,
        equal: (lhs - rhs).abs() <= tol,
        holds: lhs <= rhs + tol,
    }
}

/// Moment generating function of the three-point law against the refined
/// Bennett bound; the two coincide for every `lambda`.
pub fn refined_bennett_check(gamma: f64, d: f64, lambda: f64) -> Result<BennettCheck> {
    let law = IncrementLaw::three_point_symmetric(d, gamma)?;
    if !lambda.is_finite() {
        return Err(invalid("lambda", "must be finite"));
    }
    Ok(bennett(law.atoms(), gamma, d, lambda))
}

/// The refined Bennett comparison for an arbitrary law on `[-d, d]`, with
/// `gamma = E[X^2] / d^2`.
pub fn bennett_comparison(law: &IncrementLaw, lambda: f64) -> BennettCheck {
    let d = law.d();
    let m2: f64 = law.atoms().iter().map(|&(v, p)| p * v * v).sum();
    bennett(law.atoms(), m2 / (d * d), d, lambda)
}

/// `theta_min(lambda) = cosh(lambda) - 1`.
pub fn theta_min(lambda: f64) -> f64 {
    cosh_m1(lambda)
}

/// First grid point where `(1 + a (cosh(lambda) - 1)) / exp(theta a) > 1`.
pub fn certificate_witness(lambda: f64, theta: f64, a_grid: &[f64]) -> Option<f64> {
    let c = cosh_m1(lambda);
    a_grid
        .iter()
        .copied()
        .find(|&a| (a * c).ln_1p() > theta * a)
}

/// Whether the supermartingale condition holds at every grid point.
pub fn certificate_check(lambda: f64, theta: f64, a_grid: &[f64]) -> bool {
    certificate_witness(lambda, theta, a_grid).is_none()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::{freedman_bound, FreedmanInput, FreedmanVariant};

    fn three(g: f64) -> LatticeLaw {
        LatticeLaw::three_point(g, 1.0).unwrap()
    }

    /// Brute-force enumeration over all atom sequences of length `n`.
    fn enumerate<F: Fn(&[f64]) -> bool>(atoms: &[(f64, f64)], n: usize, event: F) -> f64 {
        let mut total = 0.0;
        let count = atoms.len().pow(n as u32);
        for mut code in 0..count {
            let mut p = 1.0;
            let mut path = Vec::with_capacity(n);
            let mut s = 0.0;
            for _ in 0..n {
                let (v, q) = atoms[code % atoms.len()];
                code /= atoms.len();
                p *= q;
                s += v;
                path.push(s);
            }
            if event(&path) {
                total += p;
            }
        }
        total
    }

    #[test]
    fn lattice_construction() {
        let l = LatticeLaw::two_point_mcdiarmid(0.5, 1.0).unwrap();
        assert_eq!(l.step(), 0.5);
        assert_eq!(l.atoms().keys().copied().collect::<Vec<_>>(), vec![-1, 2]);
        assert!(l.mean().abs() < 1e-15);
        assert!((l.second_moment() - 0.5).abs() < 1e-15);

        let s = LatticeLaw::from_law(&IncrementLaw::shifted_three_point(1.0, 0.5, -0.05).unwrap())
            .unwrap();
        assert!((s.step() - 0.05).abs() < 1e-15);
        assert!(LatticeLaw::new(1.0, BTreeMap::from([(0, 0.5)])).is_err());
        assert!(LatticeLaw::new(0.0, BTreeMap::from([(0, 1.0)])).is_err());
    }

    #[test]
    fn exact_tail_examples() {
        assert!((exact_tail(&three(0.5), 2, 2.0).unwrap() - 0.0625).abs() < 1e-16);
        assert_eq!(exact_tail(&three(0.5), 4, -4.0).unwrap(), 1.0);
        let l = LatticeLaw::two_point_mcdiarmid(0.5, 1.0).unwrap();
        assert!((exact_tail(&l, 1, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(exact_tail(&l, 0, 1.0).is_err());
    }

    #[test]
    fn exact_tail_matches_enumeration() {
        let law = IncrementLaw::two_point_mcdiarmid(1.0, 0.3).unwrap();
        let lat = LatticeLaw::from_law(&law).unwrap();
        for n in 1..=6 {
            for &t in &[-1.0, 0.0, 0.35, 1.2, 2.0] {
                let brute = enumerate(law.atoms(), n, |p| p[n - 1] >= t - 1e-9);
                let dp = exact_tail(&lat, n, t).unwrap();
                assert!((brute - dp).abs() < 1e-13, "n={n} t={t}: {brute} vs {dp}");
            }
        }
    }

    #[test]
    fn threshold_rounding_is_reported() {
        let t = exact_tail_detailed(&three(0.5), 3, 1.5).unwrap();
        assert!(t.rounded);
        assert_eq!(t.effective_threshold, 2.0);
        let t = exact_tail_detailed(&three(0.5), 10, 0.3 * 10.0).unwrap();
        assert!(!t.rounded);
    }

    #[test]
    fn max_tail_examples() {
        let l = three(0.5);
        let one = exact_max_tail(&l, 2, 1.0, BarrierMode::OneSided).unwrap();
        assert!((one - 0.375).abs() < 1e-16);
        let two = exact_max_tail(&l, 2, 1.0, BarrierMode::TwoSided).unwrap();
        assert!((two - 0.75).abs() < 1e-16);
        assert_eq!(
            exact_max_tail(&l, 3, 3.5, BarrierMode::TwoSided).unwrap(),
            0.0
        );
        assert_eq!(
            exact_max_tail(&l, 0, 1.0, BarrierMode::OneSided).unwrap(),
            0.0
        );
        assert_eq!(
            exact_max_tail(&l, 2, 0.0, BarrierMode::TwoSided).unwrap(),
            1.0
        );
    }

    #[test]
    fn max_tail_matches_enumeration() {
        for law in [
            IncrementLaw::three_point_symmetric(1.0, 0.4).unwrap(),
            IncrementLaw::two_point_mcdiarmid(1.0, 0.5).unwrap(),
            IncrementLaw::custom(
                2.0,
                vec![(-2.0, 0.1), (-0.5, 0.4), (1.0, 0.3), (2.0, 0.2)],
                false,
            )
            .unwrap(),
        ] {
            let lat = LatticeLaw::from_law(&law).unwrap();
            for n in 1..=6 {
                for &b in &[0.5, 1.0, 2.0, 3.0] {
                    let one = enumerate(law.atoms(), n, |p| p.iter().any(|&s| s >= b - 1e-9));
                    let two = enumerate(law.atoms(), n, |p| p.iter().any(|&s| s.abs() >= b - 1e-9));
                    let dp1 = exact_max_tail(&lat, n, b, BarrierMode::OneSided).unwrap();
                    let dp2 = exact_max_tail(&lat, n, b, BarrierMode::TwoSided).unwrap();
                    assert!((one - dp1).abs() < 1e-13, "{law:?} n={n} b={b}");
                    assert!((two - dp2).abs() < 1e-13, "{law:?} n={n} b={b}");
                }
            }
        }
    }

    #[test]
    fn mass_is_conserved() {
        let t = exact_max_tail_traced(&three(0.3), 200, 7.0, BarrierMode::TwoSided).unwrap();
        assert!(t.mass_history.iter().all(|m| (m - 1.0).abs() < 1e-10));
    }

    #[test]
    fn resource_guard_trips() {
        let err = exact_tail(&three(0.5), 5_000, 10.0).unwrap_err();
        assert!(matches!(err, Error::ResourceGuard { .. }));
    }

    #[test]
    fn log_tail_agrees_with_linear() {
        let l = three(0.5);
        let lin = exact_tail(&l, 300, 120.0).unwrap();
        let log = exact_log_tail(&l, 300, 120.0).unwrap();
        assert!((lin.ln() - log).abs() < 1e-9);
    }

    #[test]
    fn freedman_examples() {
        let l = three(0.5);
        let direct = exact_max_tail(&l, 10, 3.0, BarrierMode::OneSided).unwrap();
        let f = exact_freedman_deterministic_q(&l, 0.5, 3.0, 5.0).unwrap();
        assert_eq!(f, direct);
        let bound = freedman_bound(
            FreedmanInput::new(3.0, 5.0, 1.0).unwrap(),
            FreedmanVariant::Tightened,
        );
        assert!(f <= bound);
        assert_eq!(
            exact_freedman_deterministic_q(&l, 0.5, 3.0, 0.4).unwrap(),
            0.0
        );
        assert!(exact_freedman_deterministic_q(&l, 0.6, 3.0, 5.0).is_err());
    }

    #[test]
    fn rate_examples() {
        let r = rate_convergence(OptimalityLaw::Symmetric, 1.0, 0.5, &[1000]).unwrap();
        assert!((r.empirical_rates[0] - 0.130_812_035_941_137).abs() < 0.01);
        let a = rate_convergence(OptimalityLaw::Symmetric, 0.5, 0.4, &[50, 100]).unwrap();
        let b = rate_convergence(OptimalityLaw::Symmetric, 0.5, 0.4, &[50, 100]).unwrap();
        assert_eq!(a, b);
        assert!(a.gaps_positive() && a.gaps_strictly_decreasing(), "{a:?}");
        assert!(!a.any_rounded());
    }

    #[test]
    fn bennett_examples() {
        let c = refined_bennett_check(0.5, 1.0, 2.0).unwrap();
        assert!(c.equal);
        assert!((c.rhs - 2.381_097_845_541_815_7).abs() < 1e-14);
        let c = refined_bennett_check(1.0, 1.0, 0.0).unwrap();
        assert_eq!((c.lhs, c.rhs), (1.0, 1.0));

        // Five-atom symmetric law with E[X^2] = 0.3.
        let law = IncrementLaw::custom(
            1.0,
            vec![(-1.0, 0.1), (-0.5, 0.2), (0.0, 0.4), (0.5, 0.2), (1.0, 0.1)],
            false,
        )
        .unwrap();
        for &lambda in &[-3.0, -0.5, 0.1, 1.0, 4.0] {
            let c = bennett_comparison(&law, lambda);
            assert!(c.holds && !c.equal, "{lambda}: {c:?}");
        }
    }

    #[test]
    fn certificate_examples() {
        let coarse: Vec<f64> = (0..=100).map(|i| i as f64 * 0.1).collect();
        let fine: Vec<f64> = (0..=100_000).map(|i| i as f64 * 1e-4).collect();
        let c = theta_min(1.0);
        assert!(certificate_check(1.0, c, &coarse));
        assert!(certificate_check(1.0, c, &fine));
        // Below theta_min the violation sits at small a (about 0.0068 here),
        // which the 0.1-spaced grid cannot see.
        assert!(certificate_check(1.0, c - 1e-3, &coarse));
        assert!(!certificate_check(1.0, c - 1e-3, &fine));
        let w = certificate_witness(1.0, c - 1e-3, &fine).unwrap();
        assert!(w > 0.0 && w < 0.0068);
        assert!(certificate_check(0.0, 0.0, &coarse));
        assert!(certificate_check(0.0, 2.0, &coarse));
    }
}
