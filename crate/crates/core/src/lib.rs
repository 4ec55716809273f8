//! Coverage probability and ergodic rate of RIS-assisted OFDM cellular
//! networks, evaluated both through Laplace-transform inversion and by
//! Monte Carlo simulation.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration,
//! parallel drivers and the command line live in the `risnet` crate.
//!
//! Layout:
//!
//! * [`geometry`]: points, supports, path loss and point-process sampling.
//! * [`fading`]: Rician cascades, beamforming gain statistics and their transforms.
//! * [`numerics`]: adaptive Gauss–Kronrod quadrature, principal values, Gil–Pelaez.
//! * [`analytic`]: interference and signal transforms, coverage, rate.
//! * [`montecarlo`]: SINR sampling, estimators with standard errors, OFDM taps.
//! * [`variants`]: blockage-aware coverage with RIS deployed around a coverage hole.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytic;
pub mod error;
pub mod fading;
pub mod geometry;
pub mod montecarlo;
pub mod numerics;
pub mod variants;

pub use error::{Error, Result};
pub use num_complex::Complex64;
