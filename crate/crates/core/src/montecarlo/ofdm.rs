use alloc::collections::BTreeSet;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::analytic::SystemParams;
use crate::error::{Error, Result};
use crate::geometry::{unit_gain, NetworkSample, SPEED_OF_LIGHT};

/// Sampling interval of the baseband receiver, in s.
pub const SAMPLING_INTERVAL: f64 = 0.509e-9;

/// Small-scale coefficients of the serving cell: the direct link and one
/// beamformed coefficient per serving RIS, in layout order.
#[derive(Debug, Clone, PartialEq)]
pub struct ServingFades {
    pub direct: Complex64,
    pub reflected: Vec<Complex64>,
}

/// Tapped delay line of one link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTaps {
    /// `(delay index, complex gain)`, one per path, indices distinct.
    pub taps: Vec<(usize, Complex64)>,
    /// Delay spread in samples: one past the largest delay index.
    pub n_c: usize,
    /// OFDM block length.
    pub n_s: usize,
    pub t_s: f64,
}

impl ChannelTaps {
    /// Checks the tap invariants and fills in `n_c`.
    pub fn new(taps: Vec<(usize, Complex64)>, n_s: usize, t_s: f64) -> Result<Self> {
        let n_c = taps.iter().map(|&(d, _)| d + 1).max().unwrap_or(0);
        if n_c > n_s {
            return Err(Error::domain(
                "channel taps",
                alloc::format!("largest delay index {} does not fit a block of {n_s}", n_c - 1),
            ));
        }
        let distinct: BTreeSet<usize> = taps.iter().map(|&(d, _)| d).collect();
        if distinct.len() != taps.len() {
            return Err(Error::domain("channel taps", "delay indices collide"));
        }
        Ok(ChannelTaps { taps, n_c, n_s, t_s })
    }

    pub fn power(&self) -> f64 {
        self.taps.iter().map(|(_, g)| g.norm_sqr()).sum()
    }
}

/// Builds the serving-cell channel at a UE at the origin.
///
/// Delays are `floor(path length / (c t_s))`. When two paths land on the same
/// index, the one listed later moves up by one index until it is free; the
/// direct path is listed first, then the RISs in layout order.
pub fn build_channel_taps(
    layout: &NetworkSample,
    fades: &ServingFades,
    params: &SystemParams,
    t_s: f64,
    n_s: usize,
) -> Result<ChannelTaps> {
    if fades.reflected.len() != layout.serving_cluster.len() {
        return Err(Error::domain("serving fades", "one coefficient per serving RIS is required"));
    }
    if !(t_s > 0.0) {
        return Err(Error::domain("sampling interval", alloc::format!("{t_s}")));
    }
    let pl = &params.pathloss;
    let ue = layout.ue();
    let bs = layout.serving_bs;
    let step = SPEED_OF_LIGHT * t_s;
    let mut used = BTreeSet::new();
    let mut place = |length: f64| {
        let mut d = (length / step).floor() as usize;
        while !used.insert(d) {
            d += 1;
        }
        d
    };
    let mut taps = Vec::with_capacity(1 + fades.reflected.len());
    let x = bs.distance(ue);
    let direct_amp = (params.p0 * pl.beta * unit_gain(x, pl.alpha_nlos)).sqrt();
    taps.push((place(x), fades.direct * direct_amp));
    for (&ris, &eta) in layout.serving_cluster.iter().zip(&fades.reflected) {
        let (y, d) = (ris.distance(bs), ris.distance(ue));
        let amp = (params.p0 * pl.beta * pl.beta * unit_gain(y, pl.alpha_los) * unit_gain(d, pl.alpha_los)).sqrt();
        taps.push((place(y + d), eta * amp));
    }
    ChannelTaps::new(taps, n_s, t_s)
}

/// Both sides of the Parseval identity for the zero-padded tap sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalCheck {
    /// `(1 / N_s) sum_k |H[k]|^2`.
    pub lhs: f64,
    /// `sum_n |h[n]|^2`.
    pub rhs: f64,
    pub rel_err: f64,
}

/// Evaluates the DFT of the taps directly on all `N_s` subcarriers. The taps
/// are sparse, so this costs `N_s` times the number of paths.
pub fn ofdm_parseval_check(taps: &ChannelTaps) -> ParsevalCheck {
    let n = taps.n_s;
    let twiddle: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
        .collect();
    let mut lhs = 0.0;
    for k in 0..n {
        let mut h = Complex64::new(0.0, 0.0);
        for &(d, g) in &taps.taps {
            h += g * twiddle[(k * d) % n];
        }
        lhs += h.norm_sqr();
    }
    lhs /= n as f64;
    let rhs = taps.power();
    let rel_err = if rhs > 0.0 { (lhs - rhs).abs() / rhs } else { lhs.abs() };
    ParsevalCheck { lhs, rhs, rel_err }
}
