//! Exponential tail bounds for discrete-time, conditionally symmetric
//! martingales with bounded jumps, the classical bounds they tighten, and the
//! exact and Monte Carlo machinery used to check them.
//!
//! - [`exponent`]: closed-form exponents and the Freedman-type factors.
//! - [`generalized`]: the higher-moment bound and its univariate minimizer.
//! - [`simulator`]: martingale constructions and Monte Carlo tail estimates.
//! - [`oracle`]: exact lattice dynamic programs and identity checks.
//! - [`report`]: the serialized comparison record.

pub mod error;
pub mod exponent;
pub mod generalized;
pub mod oracle;
pub mod report;
pub mod simulator;

pub use error::{Error, Result};
pub use exponent::{
    binary_entropy, common_exponent_gamma1, exponent_cs, exponent_kl, freedman_b, freedman_bound,
    freedman_c, freedman_exponent, kl_divergence, optimal_x, tail_bound_t1, tail_bound_t2,
    ExponentInput, ExponentValue, FreedmanInput, FreedmanVariant, TailBound,
};
pub use generalized::{
    minimize_convex_univariate, t3_objective, tail_bound_t3, MinimizeResult, MomentProfile,
    T3Bound, T3Method,
};
pub use oracle::{
    certificate_check, exact_freedman_deterministic_q, exact_max_tail, exact_tail,
    rate_convergence, refined_bennett_check, BarrierMode, LatticeLaw, OptimalityLaw, RateEstimate,
};
pub use report::{BoundReport, ExtendedReal, Theorem};
pub use simulator::{
    estimate_freedman_event, estimate_tail, sample_path, IncrementLaw, MartingaleSpec, McConfig,
    PathStats, TailEstimate, TailSide, WeightRule,
};
