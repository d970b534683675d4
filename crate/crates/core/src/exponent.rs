//! Closed-form exponents and bound factors.
//!
//! All exponents are in nats. The normalized inputs are `gamma = sigma^2 / d^2`
//! (conditional variance over squared jump bound) and `delta = alpha / d`
//! (per-step deviation over jump bound).

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Result};

/// Below this argument the Freedman factors switch to their Taylor series.
const SERIES_CUTOFF: f64 = 1e-4;

/// Normalized `(gamma, delta)` pair driving the martingale exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentInput {
    gamma: f64,
    delta: f64,
}

impl ExponentInput {
    pub fn new(gamma: f64, delta: f64) -> Result<Self> {
        if !gamma.is_finite() || !(0.0..=1.0).contains(&gamma) {
            return Err(invalid("gamma", format!("{gamma} is not in [0, 1]")));
        }
        if !delta.is_finite() || delta < 0.0 {
            return Err(invalid(
                "delta",
                format!("{delta} is not a finite value >= 0"),
            ));
        }
        Ok(Self { gamma, delta })
    }

    /// Builds the input from raw parameters: variance bound `sigma2`, jump
    /// bound `d` and deviation `alpha`.
    pub fn from_raw(sigma2: f64, d: f64, alpha: f64) -> Result<Self> {
        if !d.is_finite() || d <= 0.0 {
            return Err(invalid("d", format!("{d} is not a finite value > 0")));
        }
        Self::new(sigma2 / (d * d), alpha / d)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// An exponent value; `+inf` marks an event of probability zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentValue {
    pub value: f64,
    /// Optimizing Chernoff parameter `x = t d`, when one exists.
    pub optimizer_x: Option<f64>,
}

impl ExponentValue {
    fn infinite() -> Self {
        Self {
            value: f64::INFINITY,
            optimizer_x: None,
        }
    }

    fn plain(value: f64) -> Self {
        Self {
            value,
            optimizer_x: None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value == f64::INFINITY
    }
}

/// A tail bound as given by its formula and clamped to a usable probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBound {
    pub raw: f64,
    pub clamped: f64,
}

impl TailBound {
    pub fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            clamped: raw.min(1.0),
        }
    }

    /// `prefactor * exp(-n * exponent)`, exactly zero for an infinite exponent.
    pub fn from_exponent(prefactor: f64, n: u64, exponent: f64) -> Self {
        if exponent == f64::INFINITY {
            return Self::from_raw(0.0);
        }
        Self::from_raw(prefactor * (-(n as f64) * exponent).exp())
    }
}

/// `cosh(x) - 1` without cancellation near zero.
#[inline]
pub(crate) fn cosh_m1(x: f64) -> f64 {
    let s = (0.5 * x).sinh();
    2.0 * s * s
}

/// `ln(1 + gamma (cosh x - 1))`, the log of the extremal moment generating function.
#[inline]
pub(crate) fn log_mgf_extremal(gamma: f64, x: f64) -> f64 {
    (gamma * cosh_m1(x)).ln_1p()
}

/// Optimal Chernoff parameter `x` for the symmetric exponent.
///
/// Requires `0 < gamma <= 1` and `0 <= delta < 1`; the remaining cases have no
/// finite optimizer and are handled by [`exponent_cs`].
pub fn optimal_x(inp: ExponentInput) -> Result<f64> {
    let (g, d) = (inp.gamma, inp.delta);
    if g == 0.0 {
        return Err(domain("optimal_x", "gamma = 0 has no finite optimizer"));
    }
    if d >= 1.0 {
        return Err(domain(
            "optimal_x",
            format!("delta = {d} >= 1 has no finite optimizer"),
        ));
    }
    let one_m_g = 1.0 - g;
    let disc = (d * one_m_g).powi(2) + g * g * (1.0 - d) * (1.0 + d);
    let num = d * one_m_g + disc.sqrt();
    let den = g * (1.0 - d);
    Ok((num / den).ln())
}

/// Exponent of the tightened bound for conditionally symmetric martingales.
pub fn exponent_cs(inp: ExponentInput) -> ExponentValue {
    let (g, d) = (inp.gamma, inp.delta);
    if d == 0.0 {
        return ExponentValue {
            value: 0.0,
            optimizer_x: Some(0.0),
        };
    }
    // Zero conditional variance: the martingale is a.s. constant.
    if g == 0.0 || d > 1.0 {
        return ExponentValue::infinite();
    }
    if d == 1.0 {
        return ExponentValue::plain((2.0 / g).ln());
    }
    let x = optimal_x(inp).expect("0 < gamma and delta < 1 checked above");
    let value = (d * x - log_mgf_extremal(g, x)).max(0.0);
    ExponentValue {
        value,
        optimizer_x: Some(x),
    }
}

/// Binary relative entropy `D(p || q)` in nats, with `0 ln 0 = 0`.
pub fn kl_divergence(p: f64, q: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(domain("kl_divergence", format!("p = {p} is not in [0, 1]")));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(domain("kl_divergence", format!("q = {q} is not in [0, 1]")));
    }
    if p == q {
        return Ok(0.0);
    }
    if q == 0.0 || q == 1.0 {
        return Err(domain(
            "kl_divergence",
            format!("q = {q} is degenerate while p = {p} differs"),
        ));
    }
    let mut acc = 0.0;
    if p > 0.0 {
        acc += p * (p / q).ln();
    }
    if p < 1.0 {
        acc += (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln();
    }
    Ok(acc.max(0.0))
}

/// Exponent of the classical bound, `D((delta + gamma)/(1 + gamma) || gamma/(1 + gamma))`.
pub fn exponent_kl(inp: ExponentInput) -> Result<ExponentValue> {
    let (g, d) = (inp.gamma, inp.delta);
    if g == 0.0 {
        return Err(domain("exponent_kl", "gamma must be > 0"));
    }
    if d > 1.0 {
        return Ok(ExponentValue::infinite());
    }
    if d == 1.0 {
        // Left limit; equals D(1 || q) = ln(1/q).
        return Ok(ExponentValue::plain((1.0 / g).ln_1p()));
    }
    let p = (d + g) / (1.0 + g);
    let q = g / (1.0 + g);
    kl_divergence(p, q).map(ExponentValue::plain)
}

/// Binary entropy in bits, zero at both endpoints.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Common value of both exponents at `gamma = 1`: `ln 2 * (1 - h2((1 - delta)/2))`.
pub fn common_exponent_gamma1(delta: f64) -> f64 {
    if delta > 1.0 {
        return f64::INFINITY;
    }
    LN_2 * (1.0 - binary_entropy(0.5 * (1.0 - delta)))
}

/// Classical Freedman factor `B(u) = 2[(1+u) ln(1+u) - u] / u^2`.
pub fn freedman_b(u: f64) -> Result<f64> {
    if !u.is_finite() || u <= 0.0 {
        return Err(domain(
            "freedman_b",
            format!("u = {u} must be finite and > 0"),
        ));
    }
    if u < SERIES_CUTOFF {
        return Ok(1.0 - u / 3.0 + u * u / 6.0 - u * u * u / 10.0);
    }
    Ok(2.0 * ((1.0 + u) * u.ln_1p() - u) / (u * u))
}

/// Tightened Freedman factor `C(u) = 2[u asinh(u) - sqrt(1+u^2) + 1] / u^2`.
pub fn freedman_c(u: f64) -> Result<f64> {
    if !u.is_finite() || u <= 0.0 {
        return Err(domain(
            "freedman_c",
            format!("u = {u} must be finite and > 0"),
        ));
    }
    let u2 = u * u;
    if u < SERIES_CUTOFF {
        return Ok(1.0 - u2 / 12.0 + u2 * u2 / 40.0 - 5.0 * u2 * u2 * u2 / 448.0);
    }
    // sqrt(1+u^2) - 1 rewritten to avoid cancellation.
    let root_m1 = u2 / (1.0 + (1.0 + u2).sqrt());
    Ok(2.0 * (u * u.asinh() - root_m1) / u2)
}

/// `2 exp(-n E(gamma, delta))` for the two-sided running-maximum event.
pub fn tail_bound_t1(n: u64, inp: ExponentInput) -> TailBound {
    TailBound::from_exponent(2.0, n, exponent_cs(inp).value)
}

/// `2 exp(-n D(...))`, the classical counterpart of [`tail_bound_t1`].
pub fn tail_bound_t2(n: u64, inp: ExponentInput) -> Result<TailBound> {
    Ok(TailBound::from_exponent(2.0, n, exponent_kl(inp)?.value))
}

/// Inputs of the Freedman-type bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreedmanInput {
    z: f64,
    r: f64,
    d: f64,
}

impl FreedmanInput {
    pub fn new(z: f64, r: f64, d: f64) -> Result<Self> {
        for (field, v) in [("z", z), ("r", r), ("d", d)] {
            if !v.is_finite() || v <= 0.0 {
                return Err(invalid(field, format!("{v} is not a finite value > 0")));
            }
        }
        Ok(Self { z, r, d })
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// `u = z d / r`.
    pub fn u(&self) -> f64 {
        self.z * self.d / self.r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreedmanVariant {
    /// Uses `C(u)`; requires conditional symmetry.
    Tightened,
    /// Uses `B(u)`.
    Classical,
}

/// Exponent `z^2/(2r) * factor(zd/r)` of the Freedman-type bounds.
pub fn freedman_exponent(inp: FreedmanInput, variant: FreedmanVariant) -> f64 {
    let u = inp.u();
    let factor = match variant {
        FreedmanVariant::Tightened => freedman_c(u),
        FreedmanVariant::Classical => freedman_b(u),
    }
    .expect("u > 0 by construction");
    inp.z * inp.z / (2.0 * inp.r) * factor
}

pub fn freedman_bound(inp: FreedmanInput, variant: FreedmanVariant) -> f64 {
    (-freedman_exponent(inp, variant)).exp()
}
