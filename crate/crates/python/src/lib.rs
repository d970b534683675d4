//! Python bindings: closed-form exponents and bounds, exact lattice tails,
//! rate checks and Monte Carlo estimates.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use symbounds::exponent::TailBound;
use symbounds::oracle;
use symbounds::simulator;
use symbounds::{
    BarrierMode, ExponentInput, FreedmanInput, FreedmanVariant, IncrementLaw, LatticeLaw,
    MartingaleSpec, McConfig, MomentProfile, OptimalityLaw, TailSide, WeightRule,
};

fn to_py(e: symbounds::Error) -> PyErr {
    match e {
        symbounds::Error::ResourceGuard { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn input(gamma: f64, delta: f64) -> PyResult<ExponentInput> {
    ExponentInput::new(gamma, delta).map_err(to_py)
}

/// Raw and clamped values of a bound.
#[pyclass(name = "TailBound", frozen, get_all, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyTailBound {
    pub raw: f64,
    pub clamped: f64,
}

impl From<TailBound> for PyTailBound {
    fn from(b: TailBound) -> Self {
        Self {
            raw: b.raw,
            clamped: b.clamped,
        }
    }
}

#[pymethods]
impl PyTailBound {
    fn __repr__(&self) -> String {
        format!("TailBound(raw={}, clamped={})", self.raw, self.clamped)
    }
}

#[pyclass(name = "T3Bound", frozen, get_all)]
pub struct PyT3Bound {
    pub raw: f64,
    pub clamped: f64,
    pub per_step: f64,
    pub x_star: Option<f64>,
    /// One of `minimized`, `jump_bound`, `delta_one_limit`, `variance_fallback`.
    pub method: String,
}

#[pymethods]
impl PyT3Bound {
    fn __repr__(&self) -> String {
        format!(
            "T3Bound(raw={}, per_step={}, method={:?})",
            self.raw, self.per_step, self.method
        )
    }
}

#[pyclass(name = "TailEstimate", frozen, get_all)]
pub struct PyTailEstimate {
    pub hits: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub event_descriptor: String,
}

impl From<simulator::TailEstimate> for PyTailEstimate {
    fn from(e: simulator::TailEstimate) -> Self {
        Self {
            hits: e.hits,
            trials: e.trials,
            p_hat: e.p_hat,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            seed: e.seed,
            event_descriptor: e.event_descriptor,
        }
    }
}

#[pymethods]
impl PyTailEstimate {
    fn covers(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }

    fn __repr__(&self) -> String {
        format!(
            "TailEstimate(p_hat={}, ci=({}, {}), trials={})",
            self.p_hat, self.ci_low, self.ci_high, self.trials
        )
    }
}

#[pyclass(name = "RateEstimate", frozen, get_all)]
pub struct PyRateEstimate {
    pub n_values: Vec<usize>,
    pub exact_tails: Vec<f64>,
    pub empirical_rates: Vec<f64>,
    pub target: f64,
    /// `empirical_rate - target` for each `n`.
    pub gaps: Vec<f64>,
}

#[pymethods]
impl PyRateEstimate {
    fn __repr__(&self) -> String {
        format!("RateEstimate(target={}, gaps={:?})", self.target, self.gaps)
    }
}

#[pyfunction]
fn exponent_cs(gamma: f64, delta: f64) -> PyResult<f64> {
    Ok(symbounds::exponent_cs(input(gamma, delta)?).value)
}

#[pyfunction]
fn exponent_kl(gamma: f64, delta: f64) -> PyResult<f64> {
    Ok(symbounds::exponent_kl(input(gamma, delta)?)
        .map_err(to_py)?
        .value)
}

#[pyfunction]
fn kl_divergence(p: f64, q: f64) -> PyResult<f64> {
    symbounds::kl_divergence(p, q).map_err(to_py)
}

#[pyfunction]
fn binary_entropy(x: f64) -> f64 {
    symbounds::binary_entropy(x)
}

#[pyfunction]
fn freedman_b(u: f64) -> PyResult<f64> {
    symbounds::freedman_b(u).map_err(to_py)
}

#[pyfunction]
fn freedman_c(u: f64) -> PyResult<f64> {
    symbounds::freedman_c(u).map_err(to_py)
}

#[pyfunction]
fn tail_bound_t1(n: u64, gamma: f64, delta: f64) -> PyResult<PyTailBound> {
    Ok(symbounds::tail_bound_t1(n, input(gamma, delta)?).into())
}

#[pyfunction]
fn tail_bound_t2(n: u64, gamma: f64, delta: f64) -> PyResult<PyTailBound> {
    Ok(symbounds::tail_bound_t2(n, input(gamma, delta)?)
        .map_err(to_py)?
        .into())
}

/// `moments` lists `mu2, mu4, ...`.
#[pyfunction]
fn tail_bound_t3(n: u64, alpha: f64, d: f64, moments: Vec<f64>) -> PyResult<PyT3Bound> {
    let profile = MomentProfile::new(d, moments).map_err(to_py)?;
    let b = symbounds::tail_bound_t3(n, alpha, &profile).map_err(to_py)?;
    let method = match b.method {
        symbounds::T3Method::Minimized => "minimized",
        symbounds::T3Method::JumpBound => "jump_bound",
        symbounds::T3Method::DeltaOneLimit => "delta_one_limit",
        symbounds::T3Method::VarianceFallback => "variance_fallback",
    };
    Ok(PyT3Bound {
        raw: b.bound.raw,
        clamped: b.bound.clamped,
        per_step: b.per_step,
        x_star: b.x_star,
        method: method.to_string(),
    })
}

/// `variant` is `"tightened"` (the symmetric factor) or `"classical"`.
#[pyfunction]
#[pyo3(signature = (z, r, d, variant = "tightened"))]
fn freedman_bound(z: f64, r: f64, d: f64, variant: &str) -> PyResult<f64> {
    let variant = match variant {
        "tightened" => FreedmanVariant::Tightened,
        "classical" => FreedmanVariant::Classical,
        other => return Err(PyValueError::new_err(format!("unknown variant {other:?}"))),
    };
    let inp = FreedmanInput::new(z, r, d).map_err(to_py)?;
    Ok(symbounds::freedman_bound(inp, variant))
}

fn lattice(law: &str, gamma: f64, d: f64) -> PyResult<LatticeLaw> {
    match law {
        "symmetric" => LatticeLaw::three_point(gamma, d),
        "mcdiarmid" => LatticeLaw::two_point_mcdiarmid(gamma, d),
        other => return Err(PyValueError::new_err(format!("unknown law {other:?}"))),
    }
    .map_err(to_py)
}

/// `P(S_n >= threshold)` for i.i.d. steps of `law` (`"symmetric"` or `"mcdiarmid"`).
#[pyfunction]
#[pyo3(signature = (law, gamma, n, threshold, d = 1.0))]
fn exact_tail(law: &str, gamma: f64, n: usize, threshold: f64, d: f64) -> PyResult<f64> {
    symbounds::exact_tail(&lattice(law, gamma, d)?, n, threshold).map_err(to_py)
}

/// Probability that the running maximum (or `|S_k|` when `two_sided`)
/// reaches `barrier` within `n` steps.
#[pyfunction]
#[pyo3(signature = (law, gamma, n, barrier, two_sided = true, d = 1.0))]
fn exact_max_tail(
    law: &str,
    gamma: f64,
    n: usize,
    barrier: f64,
    two_sided: bool,
    d: f64,
) -> PyResult<f64> {
    let mode = if two_sided {
        BarrierMode::TwoSided
    } else {
        BarrierMode::OneSided
    };
    symbounds::exact_max_tail(&lattice(law, gamma, d)?, n, barrier, mode).map_err(to_py)
}

#[pyfunction]
fn rate_convergence(
    law: &str,
    gamma: f64,
    delta: f64,
    n_values: Vec<usize>,
) -> PyResult<PyRateEstimate> {
    let law = match law {
        "symmetric" => OptimalityLaw::Symmetric,
        "mcdiarmid" => OptimalityLaw::Mcdiarmid,
        other => return Err(PyValueError::new_err(format!("unknown law {other:?}"))),
    };
    let r = symbounds::rate_convergence(law, gamma, delta, &n_values).map_err(to_py)?;
    Ok(PyRateEstimate {
        n_values: r.n_values,
        exact_tails: r.exact_tails,
        empirical_rates: r.empirical_rates,
        target: r.target,
        gaps: r.gaps,
    })
}

/// Returns `(lhs, rhs, equal)` for the three-point law's moment generating
/// function against `1 + gamma (cosh(lambda d) - 1)`.
#[pyfunction]
fn refined_bennett_check(gamma: f64, d: f64, lam: f64) -> PyResult<(f64, f64, bool)> {
    let c = symbounds::refined_bennett_check(gamma, d, lam).map_err(to_py)?;
    Ok((c.lhs, c.rhs, c.equal))
}

#[pyfunction]
fn certificate_check(lam: f64, theta: f64, a_grid: Vec<f64>) -> bool {
    oracle::certificate_check(lam, theta, &a_grid)
}

/// Monte Carlo estimate of a running-extremum event at level `alpha * n`.
///
/// `construction`: `extremal`, `mcdiarmid`, `shifted` or `sign-weights`;
/// `side`: `two`, `upper` or `lower`.
#[pyfunction]
#[pyo3(signature = (construction, gamma, n, alpha, side = "two", trials = 100_000, seed = 0, d = 1.0, shift = -0.05))]
#[allow(clippy::too_many_arguments)]
fn estimate_tail(
    py: Python<'_>,
    construction: &str,
    gamma: f64,
    n: usize,
    alpha: f64,
    side: &str,
    trials: u64,
    seed: u64,
    d: f64,
    shift: f64,
) -> PyResult<PyTailEstimate> {
    let (law, weights) = match construction {
        "extremal" => (
            IncrementLaw::three_point_symmetric(d, gamma),
            WeightRule::ConstantOne,
        ),
        "mcdiarmid" => (
            IncrementLaw::two_point_mcdiarmid(d, gamma),
            WeightRule::ConstantOne,
        ),
        "shifted" => (
            IncrementLaw::shifted_three_point(d, gamma, shift),
            WeightRule::ConstantOne,
        ),
        "sign-weights" => (
            IncrementLaw::three_point_symmetric(d, gamma),
            WeightRule::previous_sign(),
        ),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown construction {other:?}"
            )))
        }
    };
    let side = match side {
        "two" => TailSide::TwoSidedMax,
        "upper" => TailSide::OneSidedMax,
        "lower" => TailSide::OneSidedMin,
        other => return Err(PyValueError::new_err(format!("unknown side {other:?}"))),
    };
    let spec = MartingaleSpec::new(law.map_err(to_py)?, weights, n).map_err(to_py)?;
    let est = py
        .detach(|| symbounds::estimate_tail(&spec, alpha, side, McConfig::new(trials, seed)))
        .map_err(to_py)?;
    Ok(est.into())
}

#[pymodule]
fn symbounds_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTailBound>()?;
    m.add_class::<PyT3Bound>()?;
    m.add_class::<PyTailEstimate>()?;
    m.add_class::<PyRateEstimate>()?;
    m.add_function(wrap_pyfunction!(exponent_cs, m)?)?;
    m.add_function(wrap_pyfunction!(exponent_kl, m)?)?;
    m.add_function(wrap_pyfunction!(kl_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(binary_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(freedman_b, m)?)?;
    m.add_function(wrap_pyfunction!(freedman_c, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound_t1, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound_t2, m)?)?;
    m.add_function(wrap_pyfunction!(tail_bound_t3, m)?)?;
    m.add_function(wrap_pyfunction!(freedman_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exact_tail, m)?)?;
    m.add_function(wrap_pyfunction!(exact_max_tail, m)?)?;
    m.add_function(wrap_pyfunction!(rate_convergence, m)?)?;
    m.add_function(wrap_pyfunction!(refined_bennett_check, m)?)?;
    m.add_function(wrap_pyfunction!(certificate_check, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_tail, m)?)?;
    Ok(())
}
