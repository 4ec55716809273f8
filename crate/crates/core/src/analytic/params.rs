use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fading::{beamform_stats, zeta_moments, BeamOverlap, BeamformStats, RicianSpec, ZetaMoments};
use crate::geometry::{unit_gain, PathlossParams};

/// Parameters of the clustered RIS network seen by a typical UE at distance
/// `serving_distance` from its BS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// BS density in 1/m^2.
    pub lambda_bs: f64,
    /// RIS density inside each cluster annulus, in 1/m^2.
    pub lambda_ris: f64,
    pub r_in: f64,
    pub r_out: f64,
    /// Transmit power per UE in W.
    pub p0: f64,
    /// Noise power in W.
    pub noise_power: f64,
    pub m_total: u32,
    pub m_batch: u32,
    pub pathloss: PathlossParams,
    pub beam: BeamOverlap,
    pub serving_distance: f64,
    pub threshold: f64,
    pub rician: RicianSpec,
    pub zeta: ZetaMoments,
    pub stats: BeamformStats,
    /// Whether interference reflected by RISs of other cells is modelled.
    pub reflected_interference: bool,
}

impl SystemParams {
    /// The reference scenario: 10 BS/km^2, UE served at 100 m, clusters of
    /// mean 5 RISs on the 10..30 m annulus, 3000 elements per RIS of which 600
    /// serve the UE, 1 W transmit power and 1e-13 W noise at 2.4 GHz.
    pub fn baseline() -> Self {
        let rician = RicianSpec::default();
        let zeta = zeta_moments(&rician);
        let (r_in, r_out) = (10.0, 30.0);
        SystemParams {
            lambda_bs: 10e-6,
            lambda_ris: 5.0 / (PI * (r_out * r_out - r_in * r_in)),
            r_in,
            r_out,
            p0: 1.0,
            noise_power: 1e-13,
            m_total: 3000,
            m_batch: 600,
            pathloss: PathlossParams::default(),
            beam: BeamOverlap {
                beamwidth: 10.0,
                overlap_prob: 10.0 / 360.0,
            },
            serving_distance: 100.0,
            threshold: 1.0,
            rician,
            zeta,
            stats: beamform_stats(&zeta, 3000, 600).expect("baseline counts are valid"),
            reflected_interference: true,
        }
    }

    /// Replaces the element counts and refreshes the beamforming statistics.
    pub fn with_elements(mut self, m_total: u32, m_batch: u32) -> Result<Self> {
        self.stats = beamform_stats(&self.zeta, m_total, m_batch)?;
        self.m_total = m_total;
        self.m_batch = m_batch;
        Ok(self)
    }

    /// Replaces the Rician K factor of both legs and refreshes the derived moments.
    pub fn with_rician(mut self, rician: RicianSpec) -> Result<Self> {
        self.rician = rician;
        self.zeta = zeta_moments(&rician);
        self.stats = beamform_stats(&self.zeta, self.m_total, self.m_batch)?;
        Ok(self)
    }

    pub fn with_threshold(mut self, t: f64) -> Self {
        self.threshold = t;
        self
    }

    /// Sets `lambda_ris` from the mean number of RISs per cluster.
    pub fn with_mean_ris(mut self, mean: f64) -> Self {
        self.lambda_ris = mean / self.cluster_area();
        self
    }

    pub fn cluster_area(&self) -> f64 {
        PI * (self.r_out * self.r_out - self.r_in * self.r_in)
    }

    pub fn mean_ris_per_cluster(&self) -> f64 {
        self.lambda_ris * self.cluster_area()
    }

    /// `P0 g(r)`: mean received power of the direct serving link. All analytic
    /// computations are carried out in units of this power.
    pub fn reference_power(&self) -> f64 {
        self.p0 * self.pathloss.beta * unit_gain(self.serving_distance, self.pathloss.alpha_nlos)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda_bs", self.lambda_bs, true),
            ("lambda_ris", self.lambda_ris, true),
            ("r_in", self.r_in, true),
            ("p0", self.p0, false),
            ("noise_power", self.noise_power, true),
            ("serving_distance", self.serving_distance, false),
            ("threshold", self.threshold, false),
        ];
        for (name, v, zero_ok) in positive {
            let ok = if zero_ok { v >= 0.0 } else { v > 0.0 };
            if !ok || !v.is_finite() {
                return Err(Error::domain("system parameter", alloc::format!("{name} = {v}")));
            }
        }
        if !(self.r_out > self.r_in) {
            return Err(Error::domain(
                "cluster radii",
                alloc::format!("r_in = {} must be below r_out = {}", self.r_in, self.r_out),
            ));
        }
        self.pathloss.validate()?;
        let expected = beamform_stats(&self.zeta, self.m_total, self.m_batch)?;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300);
        if !(close(expected.mu, self.stats.mu)
            && close(expected.sigma_re_sq, self.stats.sigma_re_sq)
            && close(expected.sigma_im_sq, self.stats.sigma_im_sq))
        {
            return Err(Error::domain("beamforming statistics", "inconsistent with element counts"));
        }
        Ok(())
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::baseline()
    }
}
