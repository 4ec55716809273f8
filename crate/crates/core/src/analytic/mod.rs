//! Analytic coverage probability and ergodic rate.
//!
//! The SINR event `SINR >= T` is rewritten as `c_d gamma >= Y` with
//! `Y = T (Q_I + sigma^2) - Q_SR` and `gamma ~ Exp(1)` the direct serving
//! fading, so coverage equals `E[exp(-Y+ / c_d)]`. That expectation is
//! recovered from the bilateral transform of `Y` by a principal-value integral.

mod field;
mod network;
mod params;
mod rate;
mod theorem;

pub use field::{polar_rule, ClusterFading, FieldNodes, InterferenceTable, Placement, SignalField};
pub use network::{
    cluster_interference_laplace, convergence_bound, coverage_curve, coverage_probability,
    coverage_probability_direct, ergodic_rate, laplace_upsilon_plus, mean_power_decomposition,
    prob_upsilon_negative, reflected_signal_laplace, total_interference_laplace, upsilon_bilateral,
    ConvergenceBound, MeanPowers, NetworkModel, Upsilon,
};
pub use params::SystemParams;
pub use rate::{integrate_rate, RATE_TOLERANCE};
pub use theorem::{
    laplace_positive_part, positive_part_transform, principal_value_term, prob_negative, BilateralTransform, Scaled,
    FnTransform,
};
pub(crate) use network::{direct_interference_beyond, reflected_interference_between};
pub(crate) use network::rate_quadrature;
