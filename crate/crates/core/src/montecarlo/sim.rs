use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::estimate::{check_samples, Accumulator, EstimateWithCI};
use super::ofdm::{build_channel_taps, ChannelTaps, ServingFades};
use crate::analytic::{direct_interference_beyond, reflected_interference_between, SystemParams};
use crate::error::{Error, Result};
use crate::fading::{sample_eta_exact, sample_gamma_ir};
use crate::geometry::{sample_poisson, unit_gain, NetworkSample, Point2D, Support};

/// Powers of one SINR realisation, in W.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinrSample {
    /// Direct serving link.
    pub q_sd: f64,
    /// Reflections of the serving BS by its own cluster.
    pub q_sr: f64,
    /// Total interference, direct and reflected.
    pub q_i: f64,
    /// RIS-reflected part of `q_i`.
    pub q_i_reflected: f64,
    pub noise: f64,
    pub sinr: f64,
}

impl SinrSample {
    pub fn new(q_sd: f64, q_sr: f64, q_i: f64, q_i_reflected: f64, noise: f64) -> Self {
        let num = q_sd + q_sr;
        let den = q_i + noise;
        let sinr = if den > 0.0 {
            num / den
        } else if num > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        SinrSample {
            q_sd,
            q_sr,
            q_i,
            q_i_reflected,
            noise,
            sinr,
        }
    }

    pub fn covered(&self, threshold: f64) -> bool {
        self.sinr >= threshold
    }

    /// Shannon rate in nats/s/Hz.
    pub fn rate(&self) -> f64 {
        self.sinr.ln_1p()
    }
}

/// How the beamformed coefficient of a serving RIS is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GammaSrMode {
    /// Complex Gaussian with the moments used by the analysis.
    #[default]
    Gaussian,
    /// Sum over all `M` elements, `M_o` of them phase aligned.
    Exact,
}

/// Default share of the mean interference left outside the simulation window.
/// The mean of what lies outside is added back as a constant.
pub const DEFAULT_TAIL_BUDGET: f64 = 1e-3;

/// Sampler of SINR realisations for a UE at the origin served from `(r, 0)`.
///
/// Interfering BSs are drawn on the annulus `r..direct_window`, and their RIS
/// clusters only for BSs closer than `reflected_window`. The mean power of
/// everything beyond the windows is added deterministically, so the windows
/// affect only the spread of the far field, not its mean.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: SystemParams,
    mode: GammaSrMode,
    direct_window: f64,
    reflected_window: f64,
    direct_tail: f64,
    reflected_tail: f64,
}

impl Simulator {
    pub fn new(params: &SystemParams) -> Result<Self> {
        Self::with_tail_budget(params, DEFAULT_TAIL_BUDGET)
    }

    pub fn with_tail_budget(params: &SystemParams, budget: f64) -> Result<Self> {
        params.validate()?;
        if !(budget > 0.0 && budget < 1.0) {
            return Err(Error::domain("tail budget", alloc::format!("{budget}")));
        }
        let r = params.serving_distance;
        let total_direct = direct_interference_beyond(params, r);
        let total_reflected = reflected_interference_between(params, r, f64::INFINITY)?;
        let total = total_direct + total_reflected;
        let allowed = budget * total;

        let direct_window = smallest_window(r, |w| Ok(direct_interference_beyond(params, w) <= allowed * 0.5))?;
        let reflected_window = if total_reflected > 0.0 {
            smallest_window(r, |w| {
                Ok(reflected_interference_between(params, w, f64::INFINITY)? <= allowed * 0.5)
            })?
            .min(direct_window)
        } else {
            r
        };
        Ok(Simulator {
            params: *params,
            mode: GammaSrMode::default(),
            direct_window,
            reflected_window,
            direct_tail: direct_interference_beyond(params, direct_window),
            reflected_tail: reflected_interference_between(params, reflected_window, f64::INFINITY)?,
        })
    }

    pub fn with_mode(mut self, mode: GammaSrMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    /// Outer radii of the direct and reflected interference windows, in m.
    pub fn windows(&self) -> (f64, f64) {
        (self.direct_window, self.reflected_window)
    }

    /// Mean powers added for the fields beyond the windows, in W.
    pub fn tail_means(&self) -> (f64, f64) {
        (self.direct_tail, self.reflected_tail)
    }

    fn eta<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let p = &self.params;
        match self.mode {
            GammaSrMode::Gaussian => {
                let n1: f64 = StandardNormal.sample(rng);
                let n2: f64 = StandardNormal.sample(rng);
                Complex64::new(
                    p.stats.mu + p.stats.sigma_re_sq.sqrt() * n1,
                    p.stats.sigma_im_sq.sqrt() * n2,
                )
            }
            GammaSrMode::Exact => sample_eta_exact(&p.rician, p.m_total, p.m_batch, rng),
        }
    }

    fn serving_support(&self) -> Result<Support> {
        let p = &self.params;
        Support::annulus(Point2D::new(p.serving_distance, 0.0), p.r_in, p.r_out)
    }

    /// Reflected signal power of the serving cluster alone, in W.
    pub fn sample_q_sr<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let p = &self.params;
        let pl = &p.pathloss;
        let support = self.serving_support().expect("validated radii");
        let scale = p.p0 * pl.beta * pl.beta;
        let n = sample_poisson(p.lambda_ris * support.area(), rng);
        let mut q = 0.0;
        for _ in 0..n {
            let ris = support.sample_point(rng);
            let g = unit_gain(ris.distance(support.center), pl.alpha_los) * unit_gain(ris.norm(), pl.alpha_los);
            q += scale * g * self.eta(rng).norm_sqr();
        }
        q
    }

    /// Total interference power (direct and reflected, tails included) and its
    /// reflected part, in W.
    pub fn sample_q_i<R: Rng + ?Sized>(&self, rng: &mut R) -> (f64, f64) {
        let p = &self.params;
        let pl = &p.pathloss;
        let r = p.serving_distance;
        let (lo2, hi2) = (r * r, self.direct_window * self.direct_window);
        let n = sample_poisson(p.lambda_bs * PI * (hi2 - lo2), rng);
        let direct_scale = p.p0 * pl.beta;
        let refl_scale = p.p0 * pl.beta * pl.beta;
        let with_clusters = p.reflected_interference && p.lambda_ris > 0.0;
        let cluster_mean = p.lambda_ris * PI * (p.r_out * p.r_out - p.r_in * p.r_in);
        let mut direct = self.direct_tail;
        let mut reflected = self.reflected_tail;
        for _ in 0..n {
            let x = (lo2 + rng.random::<f64>() * (hi2 - lo2)).sqrt();
            let h: f64 = Exp1.sample(rng);
            direct += direct_scale * unit_gain(x, pl.alpha_nlos) * h;
            if with_clusters && x < self.reflected_window {
                let theta = 2.0 * PI * rng.random::<f64>();
                let bs = Point2D::from_polar(Point2D::ORIGIN, x, theta);
                let k = sample_poisson(cluster_mean, rng);
                for _ in 0..k {
                    let ris = annulus_point(bs, p.r_in, p.r_out, rng);
                    let g = unit_gain(ris.distance(bs), pl.alpha_los) * unit_gain(ris.norm(), pl.alpha_ir);
                    reflected += refl_scale * g * sample_gamma_ir(&p.stats, &p.beam, rng);
                }
            }
        }
        (direct + reflected, reflected)
    }

    /// One SINR realisation.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SinrSample {
        let p = &self.params;
        let h: f64 = Exp1.sample(rng);
        let q_sd = p.reference_power() * h;
        let q_sr = self.sample_q_sr(rng);
        let (q_i, q_i_reflected) = self.sample_q_i(rng);
        SinrSample::new(q_sd, q_sr, q_i, q_i_reflected, p.noise_power)
    }

    /// Layout and fades of the serving cell: the serving BS and its RIS cluster
    /// with complex channel coefficients.
    pub fn sample_serving_cell<R: Rng + ?Sized>(&self, rng: &mut R) -> (NetworkSample, ServingFades) {
        let p = &self.params;
        let support = self.serving_support().expect("validated radii");
        let n = sample_poisson(p.lambda_ris * support.area(), rng);
        let cluster: Vec<Point2D> = (0..n).map(|_| support.sample_point(rng)).collect();
        let n1: f64 = StandardNormal.sample(rng);
        let n2: f64 = StandardNormal.sample(rng);
        let direct = Complex64::new(n1, n2) * FRAC_1_SQRT_2;
        let reflected = cluster.iter().map(|_| self.eta(rng)).collect();
        let layout = NetworkSample {
            serving_bs: support.center,
            serving_cluster: cluster,
            interferers: Vec::new(),
            clusters: Vec::new(),
        };
        (layout, ServingFades { direct, reflected })
    }

    /// Tapped-delay-line channel of a freshly drawn serving cell.
    pub fn sample_channel<R: Rng + ?Sized>(&self, t_s: f64, n_s: usize, rng: &mut R) -> Result<ChannelTaps> {
        let (layout, fades) = self.sample_serving_cell(rng);
        build_channel_taps(&layout, &fades, &self.params, t_s, n_s)
    }
}

fn annulus_point<R: Rng + ?Sized>(center: Point2D, r_in: f64, r_out: f64, rng: &mut R) -> Point2D {
    let (lo, hi) = (r_in * r_in, r_out * r_out);
    let rho = (lo + rng.random::<f64>() * (hi - lo)).sqrt();
    Point2D::from_polar(center, rho, 2.0 * PI * rng.random::<f64>())
}

/// Smallest radius (to 1 %) beyond `r` at which `small_enough` holds; the
/// predicate must be monotone in the radius.
fn smallest_window<F: FnMut(f64) -> Result<bool>>(r: f64, mut small_enough: F) -> Result<f64> {
    let mut lo = r;
    let mut hi = 2.0 * r;
    while !small_enough(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::Divergence {
                what: "simulation window",
                detail: "interference tail does not decay".into(),
            });
        }
    }
    while hi - lo > 0.01 * lo {
        let mid = 0.5 * (lo + hi);
        if small_enough(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// One SINR realisation.
pub fn simulate_sinr_once<R: Rng + ?Sized>(sim: &Simulator, rng: &mut R) -> SinrSample {
    sim.sample(rng)
}

/// `P[SINR >= T]` from `n` realisations.
pub fn estimate_coverage<R: Rng + ?Sized>(sim: &Simulator, t: f64, n: usize, rng: &mut R) -> Result<EstimateWithCI> {
    Ok(estimate_coverage_curve(sim, &[t], n, rng)?[0])
}

/// Coverage at several thresholds from one shared SINR stream.
pub fn estimate_coverage_curve<R: Rng + ?Sized>(
    sim: &Simulator,
    thresholds: &[f64],
    n: usize,
    rng: &mut R,
) -> Result<Vec<EstimateWithCI>> {
    check_samples(n)?;
    let mut hits = alloc::vec![0u64; thresholds.len()];
    for _ in 0..n {
        let s = sim.sample(rng);
        for (h, &t) in hits.iter_mut().zip(thresholds) {
            *h += s.covered(t) as u64;
        }
    }
    Ok(hits.iter().map(|&k| EstimateWithCI::binomial(k, n as u64)).collect())
}

/// `E[ln(1 + SINR)]` in nats/s/Hz.
pub fn estimate_ergodic_rate<R: Rng + ?Sized>(sim: &Simulator, n: usize, rng: &mut R) -> Result<EstimateWithCI> {
    check_samples(n)?;
    let mut acc = Accumulator::default();
    for _ in 0..n {
        acc.push(sim.sample(rng).rate());
    }
    Ok(acc.estimate())
}

/// `E[exp(-s Q)]` for a sampled non-negative quantity `Q`. Negative `s`
/// estimates the moment generating function instead.
pub fn estimate_laplace<R: Rng + ?Sized, F: FnMut(&mut R) -> f64>(
    mut sampler: F,
    s: f64,
    n: usize,
    rng: &mut R,
) -> Result<EstimateWithCI> {
    check_samples(n)?;
    let mut acc = Accumulator::default();
    for _ in 0..n {
        acc.push((-s * sampler(rng)).exp());
    }
    Ok(acc.estimate())
}
