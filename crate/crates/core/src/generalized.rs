//! Higher-moment bound: the Chernoff objective built from even conditional
//! moment ceilings, minimized numerically over `x >= 0`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::exponent::{cosh_m1, tail_bound_t1, ExponentInput, TailBound};

/// Largest `x` the bracket may reach; `cosh` overflows near 710.
pub const X_CAP: f64 = 700.0;
pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;

/// Slack allowed in the monotone chain `1 >= gamma_2 >= gamma_4 >= ...`.
const CHAIN_SLACK: f64 = 1e-12;

/// Jump bound plus ceilings on the even conditional moments `mu_2, mu_4, ..., mu_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile {
    d: f64,
    mu: Vec<f64>,
    gamma: Vec<f64>,
}

impl MomentProfile {
    /// `mu[l - 1]` bounds `E[xi^(2l) | past]`; the order is `m = 2 * mu.len()`.
    pub fn new(d: f64, mu: Vec<f64>) -> Result<Self> {
        if !d.is_finite() || d <= 0.0 {
            return Err(invalid("d", format!("{d} is not a finite value > 0")));
        }
        if mu.is_empty() {
            return Err(invalid("moments", "at least mu_2 is required"));
        }
        let mut gamma = Vec::with_capacity(mu.len());
        let mut prev = 1.0;
        for (i, &m) in mu.iter().enumerate() {
            let order = 2 * (i + 1);
            if !m.is_finite() || m < 0.0 {
                return Err(invalid(
                    "moments",
                    format!("mu_{order} = {m} must be finite and >= 0"),
                ));
            }
            let g = m / d.powi(order as i32);
            if g > prev + CHAIN_SLACK {
                let what = if i == 0 {
                    format!("gamma_2 = {g} exceeds 1")
                } else {
                    format!("gamma_{order} = {g} exceeds gamma_{} = {prev}", order - 2)
                };
                return Err(invalid(
                    "moments",
                    format!("{what}; no variable with |xi| <= d has these moments"),
                ));
            }
            gamma.push(g.min(prev));
            prev = g.min(prev);
        }
        Ok(Self { d, mu, gamma })
    }

    /// Profile with every normalized moment equal to `gamma`.
    pub fn flat(d: f64, gamma: f64, m: usize) -> Result<Self> {
        if m < 2 || !m.is_multiple_of(2) {
            return Err(invalid("m", format!("{m} is not an even integer >= 2")));
        }
        let mu = (1..=m / 2).map(|l| gamma * d.powi(2 * l as i32)).collect();
        Self::new(d, mu)
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Highest moment order `m`.
    pub fn m(&self) -> usize {
        2 * self.mu.len()
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    /// Normalized ceilings `gamma_{2l} = mu_{2l} / d^(2l)`.
    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn gamma_m(&self) -> f64 {
        *self.gamma.last().expect("non-empty by construction")
    }
}

/// `e^{-delta x} [1 + sum_{l < m/2} (gamma_2l - gamma_m) x^{2l}/(2l)! + gamma_m (cosh x - 1)]`.
pub fn t3_objective(x: f64, delta: f64, profile: &MomentProfile) -> f64 {
    let gm = profile.gamma_m();
    let mut bracket = 1.0 + gm * cosh_m1(x);
    let x2 = x * x;
    let mut term = 1.0;
    for (l, &g) in profile.gamma[..profile.gamma.len() - 1].iter().enumerate() {
        let k = 2 * (l + 1);
        term *= x2 / ((k - 1) * k) as f64;
        bracket += (g - gm) * term;
    }
    (-delta * x).exp() * bracket
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub x_star: f64,
    pub objective_value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes a unimodal function on `[0, X_CAP]`.
///
/// The bracket grows by doubling from `[0, 1]` until `f` stops decreasing;
/// golden-section search then narrows it to width `tol`. If `f` is still
/// decreasing at the cap the result is flagged as not converged.
pub fn minimize_convex_univariate<F>(f: F, tol: f64) -> MinimizeResult
where
    F: Fn(f64) -> f64,
{
    let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
    let (mut lo, mut mid, mut hi) = (0.0, 0.0, 1.0);
    let mut f_mid = f(0.0);
    let mut f_hi = f(hi);
    while f_hi < f_mid {
        if hi >= X_CAP {
            return MinimizeResult {
                x_star: hi,
                objective_value: f_hi,
                iterations: 0,
                converged: false,
            };
        }
        lo = mid;
        mid = hi;
        f_mid = f_hi;
        hi = (2.0 * hi).min(X_CAP);
        f_hi = f(hi);
    }

    let (a, b, iterations) = golden(&f, lo, hi, tol);
    let converged = b - a <= tol;

    // The endpoints of the final bracket and the doubling probes compete too,
    // which keeps a minimum sitting at x = 0 exact.
    let center = 0.5 * (a + b);
    let mut best = (mid, f_mid);
    for (x, v) in [(a, f(a)), (b, f(b)), (center, f(center))] {
        if v < best.1 {
            best = (x, v);
        }
    }
    MinimizeResult {
        x_star: best.0,
        objective_value: best.1,
        iterations,
        converged,
    }
}

fn golden<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> (f64, f64, usize) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    let mut iterations = 0;
    while b - a > tol && iterations < MAX_ITERATIONS {
        iterations += 1;
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    (a, b, iterations)
}

const SCAN_STEP: f64 = 0.05;
const SCAN_LINEAR_END: f64 = 50.0;

/// Global minimum of the higher-moment objective on `[0, X_CAP]`.
///
/// The polynomial part can make the objective bimodal when the moment profile
/// is not that of an actual distribution, so a coarse scan picks the basin
/// before golden-section refinement.
fn minimize_scanned<F: Fn(f64) -> f64>(f: F, tol: f64) -> MinimizeResult {
    let mut grid: Vec<f64> = (0..=(SCAN_LINEAR_END / SCAN_STEP) as usize)
        .map(|i| i as f64 * SCAN_STEP)
        .collect();
    let mut x = SCAN_LINEAR_END;
    while x < X_CAP {
        x = (x * 1.25).min(X_CAP);
        grid.push(x);
    }
    let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let mut i = 0;
    for (j, &v) in values.iter().enumerate() {
        if v < values[i] {
            i = j;
        }
    }
    if i == grid.len() - 1 {
        return MinimizeResult {
            x_star: grid[i],
            objective_value: values[i],
            iterations: 0,
            converged: false,
        };
    }
    let lo = if i == 0 { 0.0 } else { grid[i - 1] };
    let (a, b, iterations) = golden(&f, lo, grid[i + 1], tol);
    let center = 0.5 * (a + b);
    let mut best = (grid[i], values[i]);
    for (x, v) in [(a, f(a)), (b, f(b)), (center, f(center))] {
        if v < best.1 {
            best = (x, v);
        }
    }
    MinimizeResult {
        x_star: best.0,
        objective_value: best.1,
        iterations,
        converged: b - a <= tol,
    }
}

/// How a higher-moment bound value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T3Method {
    /// Numerical minimum of the objective.
    Minimized,
    /// `delta > 1`: the event is impossible under the jump bound.
    JumpBound,
    /// `delta = 1`: infimum of the objective as `x -> infinity`, `gamma_m / 2`.
    DeltaOneLimit,
    /// The minimizer ran into the cap; fell back to the variance-only bound.
    VarianceFallback,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct T3Bound {
    pub bound: TailBound,
    /// Per-step factor whose `n`-th power (times 2) is the bound.
    pub per_step: f64,
    pub x_star: Option<f64>,
    pub method: T3Method,
}

impl T3Bound {
    /// `-ln(per_step)`, comparable to the variance-only exponent.
    pub fn exponent(&self) -> f64 {
        -self.per_step.ln()
    }
}

/// `2 * (min_{x >= 0} objective)^n` with `delta = alpha / d`.
pub fn tail_bound_t3(n: u64, alpha: f64, profile: &MomentProfile) -> Result<T3Bound> {
    if n == 0 {
        return Err(invalid("n", "must be >= 1"));
    }
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(invalid(
            "alpha",
            format!("{alpha} is not a finite value >= 0"),
        ));
    }
    let delta = alpha / profile.d;
    let from_step = |per_step: f64, x_star, method| {
        let raw = if per_step == 0.0 {
            0.0
        } else {
            2.0 * (n as f64 * per_step.ln()).exp()
        };
        T3Bound {
            bound: TailBound::from_raw(raw),
            per_step,
            x_star,
            method,
        }
    };
    if delta > 1.0 {
        return Ok(from_step(0.0, None, T3Method::JumpBound));
    }
    if delta == 1.0 {
        // e^{-x}[1 - gamma_m + poly(x)] + gamma_m (1 + e^{-2x}) / 2 decreases to
        // gamma_m / 2 and never reaches it, so the infimum is the limit.
        return Ok(from_step(
            0.5 * profile.gamma_m(),
            None,
            T3Method::DeltaOneLimit,
        ));
    }
    let res = minimize_scanned(|x| t3_objective(x, delta, profile), DEFAULT_TOL);
    if !res.converged {
        let gamma2 = profile.gamma[0];
        let fallback = tail_bound_t1(n, ExponentInput::new(gamma2, delta)?);
        return Ok(T3Bound {
            bound: fallback,
            per_step: (0.5 * fallback.raw).powf(1.0 / n as f64),
            x_star: None,
            method: T3Method::VarianceFallback,
        });
    }
    Ok(from_step(
        res.objective_value.min(1.0),
        Some(res.x_star),
        T3Method::Minimized,
    ))
}
