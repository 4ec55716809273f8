//! Monte Carlo estimates of the same quantities as [`crate::analytic`], from
//! explicitly sampled layouts and fades. The generators are caller supplied;
//! samples only depend on the generator state, so a seeded stream reproduces
//! the same realisations bit for bit.

mod estimate;
mod ofdm;
mod sim;

pub use estimate::{Accumulator, EstimateWithCI};
pub use ofdm::{build_channel_taps, ofdm_parseval_check, ChannelTaps, ParsevalCheck, ServingFades, SAMPLING_INTERVAL};
pub use sim::{
    estimate_coverage, estimate_coverage_curve, estimate_ergodic_rate, estimate_laplace, simulate_sinr_once,
    GammaSrMode, Simulator, SinrSample, DEFAULT_TAIL_BUDGET,
};

#[cfg(test)]
mod tests;
