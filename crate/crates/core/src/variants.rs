//! RISs deployed around a coverage hole instead of around the BSs.
//!
//! The UE sits in a disc (the hole) whose center is at distance `r` from the
//! serving BS. RISs occupy a ring around the hole center, or the part of that
//! ring facing the BS, as a Poisson field or as a fixed number of uniform
//! points. Blockage multiplies the direct power by `c_d` and the reflected
//! power by `c_r`. Interference reflected by RISs of other cells is not
//! modelled here.
//!
//! Analytic results place the UE at the hole center, where the reflected path
//! gain `g(|x - y|) g(|y - u|)` is the BS-centric cluster gain with the roles
//! of BS and UE exchanged. The simulator can also draw the UE uniformly in
//! the hole.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::analytic::{
    polar_rule, ConvergenceBound, FieldNodes, InterferenceTable, Placement, SignalField, SystemParams, Upsilon,
};
use crate::analytic::{integrate_rate, rate_quadrature};
use crate::error::{Error, Result};
use crate::fading::{sample_gamma_sr, BeamformStats};
use crate::geometry::{sample_poisson, unit_gain, PathlossParams, Point2D, Support};
use crate::montecarlo::{Simulator, SinrSample};
use crate::numerics::{QuadratureConfig, TransformValue};

/// Linear power factor of a penalty given in dB (a loss, so `3` gives about `0.5`).
pub fn db_penalty(db: f64) -> f64 {
    10f64.powf(-db / 10.0)
}

/// Geometry and blockage of the coverage hole. The hole center is the origin
/// and the serving BS sits at `(serving_distance, 0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageHoleConfig {
    pub serving_distance: f64,
    pub hole_radius: f64,
    pub r_in: f64,
    pub r_out: f64,
    /// Power factor of the direct link, in `(0, 1]`.
    pub c_d: f64,
    /// Power factor of the reflected links, in `(0, 1]`.
    pub c_r: f64,
}

impl CoverageHoleConfig {
    /// Hole 80 m from the BS, RIS ring 25..35 m, hole radius 10 m, no blockage.
    pub fn baseline() -> Self {
        CoverageHoleConfig {
            serving_distance: 80.0,
            hole_radius: 10.0,
            r_in: 25.0,
            r_out: 35.0,
            c_d: 1.0,
            c_r: 1.0,
        }
    }

    /// Penalties given as losses in dB.
    pub fn with_penalties_db(mut self, c_d_db: f64, c_r_db: f64) -> Self {
        self.c_d = db_penalty(c_d_db);
        self.c_r = db_penalty(c_r_db);
        self
    }

    pub fn hole_center(&self) -> Point2D {
        Point2D::ORIGIN
    }

    pub fn serving_bs(&self) -> Point2D {
        Point2D::new(self.serving_distance, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.hole_radius >= 0.0 && self.hole_radius < self.r_in && self.r_in < self.r_out && self.r_out.is_finite()) {
            return Err(Error::domain(
                "coverage hole radii",
                alloc::format!(
                    "need 0 <= hole_radius ({}) < r_in ({}) < r_out ({})",
                    self.hole_radius,
                    self.r_in,
                    self.r_out
                ),
            ));
        }
        if !(self.serving_distance > self.r_out) {
            return Err(Error::domain(
                "coverage hole distance",
                alloc::format!("serving_distance = {} must exceed r_out = {}", self.serving_distance, self.r_out),
            ));
        }
        for (name, c) in [("c_d", self.c_d), ("c_r", self.c_r)] {
            if !(c > 0.0 && c <= 1.0) {
                return Err(Error::domain("blockage penalty", alloc::format!("{name} = {c} must lie in (0, 1]")));
            }
        }
        Ok(())
    }
}

impl Default for CoverageHoleConfig {
    fn default() -> Self {
        Self::baseline()
    }
}

/// A fixed number of RISs on a wedge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeConfig {
    pub support: Support,
    pub n_ris: u32,
}

/// Where the RISs around the hole are and how many there are.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariantModel {
    /// Poisson field on the full ring with the given mean count.
    PppRing { mean: f64 },
    /// Poisson field on the wedge facing the BS with the given mean count.
    PppWedge { mean: f64 },
    /// Exactly `n` uniform RISs on the wedge facing the BS.
    BppWedge { n: u32 },
}

impl VariantModel {
    pub fn is_empty(&self) -> bool {
        match *self {
            VariantModel::PppRing { mean } | VariantModel::PppWedge { mean } => mean == 0.0,
            VariantModel::BppWedge { n } => n == 0,
        }
    }

    fn on_wedge(&self) -> bool {
        !matches!(self, VariantModel::PppRing { .. })
    }

    /// The same deployment with no RISs.
    pub fn without_ris(&self) -> Self {
        match *self {
            VariantModel::PppRing { .. } => VariantModel::PppRing { mean: 0.0 },
            VariantModel::PppWedge { .. } => VariantModel::PppWedge { mean: 0.0 },
            VariantModel::BppWedge { .. } => VariantModel::BppWedge { n: 0 },
        }
    }
}

/// Full description of a coverage-hole scenario.
///
/// Densities, powers, path loss, beamforming statistics and the threshold come
/// from `base`; its cluster and distance fields are overwritten by `hole`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VariantParams {
    pub base: SystemParams,
    pub hole: CoverageHoleConfig,
    pub model: VariantModel,
    /// Opening angle of the wedge in degrees.
    pub wedge_angle: f64,
}

impl VariantParams {
    pub fn new(base: SystemParams, hole: CoverageHoleConfig, model: VariantModel, wedge_angle: f64) -> Self {
        let base = SystemParams {
            serving_distance: hole.serving_distance,
            r_in: hole.r_in,
            r_out: hole.r_out,
            lambda_ris: 0.0,
            reflected_interference: false,
            ..base
        };
        VariantParams {
            base,
            hole,
            model,
            wedge_angle,
        }
    }

    /// 4 BS/km^2, the baseline hole, 4 RISs on a 90 degree wedge.
    pub fn baseline() -> Self {
        let base = SystemParams {
            lambda_bs: 4e-6,
            ..SystemParams::baseline()
        };
        Self::new(base, CoverageHoleConfig::baseline(), VariantModel::BppWedge { n: 4 }, 90.0)
    }

    pub fn with_model(mut self, model: VariantModel) -> Self {
        self.model = model;
        self
    }

    pub fn with_hole(self, hole: CoverageHoleConfig) -> Self {
        Self::new(self.base, hole, self.model, self.wedge_angle)
    }

    pub fn validate(&self) -> Result<()> {
        self.hole.validate()?;
        self.base.validate()?;
        if !(self.wedge_angle > 0.0 && self.wedge_angle <= 360.0) {
            return Err(Error::domain("wedge angle", alloc::format!("{} degrees", self.wedge_angle)));
        }
        match self.model {
            VariantModel::PppRing { mean } | VariantModel::PppWedge { mean } if !(mean >= 0.0 && mean.is_finite()) => {
                Err(Error::domain("mean RIS count", alloc::format!("{mean}")))
            }
            _ => Ok(()),
        }
    }

    /// Support of the RISs around the hole center.
    pub fn support(&self) -> Result<Support> {
        let h = &self.hole;
        if self.model.on_wedge() {
            // The wedge faces the serving BS.
            Support::wedge(h.hole_center(), h.r_in, h.r_out, 0.0, 0.5 * self.wedge_angle.to_radians())
        } else {
            Support::annulus(h.hole_center(), h.r_in, h.r_out)
        }
    }

    fn placement(&self, area: f64) -> Placement {
        match self.model {
            VariantModel::PppRing { mean } | VariantModel::PppWedge { mean } => Placement::Poisson { lambda: mean / area },
            VariantModel::BppWedge { n } => Placement::Binomial { n },
        }
    }
}

/// Reflected path gain `P0 beta^2 g(|bs - y|) g(|y - ue|)` with line-of-sight exponents.
fn ue_centric_power(bs: Point2D, ris: Point2D, ue: Point2D, pl: &PathlossParams, p0: f64) -> f64 {
    p0 * pl.beta * pl.beta * unit_gain(bs.distance(ris), pl.alpha_los) * unit_gain(ris.distance(ue), pl.alpha_los)
}

const RADIAL_POINTS: usize = 24;
const RING_ANGULAR_POINTS: usize = 64;
const WEDGE_ANGULAR_POINTS: usize = 32;
const PEAK_GRID: usize = 96;

/// Signal nodes on `support` with gains divided by `unit` (in W).
fn signal_nodes(support: &Support, bs: Point2D, ue: Point2D, pl: &PathlossParams, p0: f64, unit: f64) -> FieldNodes {
    let n_angle = if support.is_full_annulus() {
        RING_ANGULAR_POINTS
    } else {
        WEDGE_ANGULAR_POINTS
    };
    let gain = |p: Point2D| ue_centric_power(bs, p, ue, pl, p0) / unit;
    let nodes = FieldNodes::from_rule(&polar_rule(support, RADIAL_POINTS, n_angle), gain);
    let mut peak = 0.0f64;
    for i in 0..=PEAK_GRID {
        let rho = support.r_in + (support.r_out - support.r_in) * i as f64 / PEAK_GRID as f64;
        for j in 0..=PEAK_GRID {
            let theta = support.orientation + support.half_angle * (2.0 * j as f64 / PEAK_GRID as f64 - 1.0);
            peak = peak.max(gain(Point2D::from_polar(support.center, rho, theta)));
        }
    }
    nodes.with_peak_candidates([peak])
}

/// `E[exp(s Q_SR)]` for `n_ris` uniform RISs on a wedge, `s` in 1/W.
pub fn bpp_wedge_signal_laplace(
    s: Complex64,
    bs: Point2D,
    ue: Point2D,
    cfg: &WedgeConfig,
    stats: &BeamformStats,
    pathloss: &PathlossParams,
    p0: f64,
) -> TransformValue {
    if cfg.n_ris == 0 {
        return TransformValue::inside(Complex64::new(1.0, 0.0));
    }
    // Work in units of the strongest node so the argument stays of order one.
    let unit = ue_centric_power(bs, cfg.support.center, ue, pathloss, p0).max(f64::MIN_POSITIVE);
    let nodes = signal_nodes(&cfg.support, bs, ue, pathloss, p0, unit);
    SignalField::new(Placement::Binomial { n: cfg.n_ris }, nodes, *stats).negated_transform(s * unit)
}

/// Analytic coverage and rate of one coverage-hole scenario with the UE at
/// the hole center.
#[derive(Debug, Clone)]
pub struct VariantNetwork {
    params: VariantParams,
    reference_power: f64,
    interference: InterferenceTable,
    signal: SignalField,
    no_signal: SignalField,
    cfg: QuadratureConfig,
}

impl VariantNetwork {
    pub fn new(params: &VariantParams) -> Result<Self> {
        params.validate()?;
        let base = &params.base;
        let reference_power = base.reference_power();
        let interference = InterferenceTable::new(base.lambda_bs, base.serving_distance, base.pathloss.alpha_nlos, None)?;
        let support = params.support()?;
        let nodes = signal_nodes(
            &support,
            params.hole.serving_bs(),
            params.hole.hole_center(),
            &base.pathloss,
            base.p0,
            reference_power,
        );
        let signal = SignalField::new(params.placement(support.area()), nodes.clone(), base.stats);
        let no_signal = SignalField::new(params.without_ris_placement(), nodes, base.stats);
        Ok(VariantNetwork {
            params: *params,
            reference_power,
            interference,
            signal,
            no_signal,
            cfg: QuadratureConfig::default(),
        })
    }

    pub fn params(&self) -> &VariantParams {
        &self.params
    }

    pub fn signal(&self) -> &SignalField {
        &self.signal
    }

    pub fn interference(&self) -> &InterferenceTable {
        &self.interference
    }

    pub fn reference_power(&self) -> f64 {
        self.reference_power
    }

    fn upsilon(&self, t: f64, with_ris: bool) -> Upsilon<'_> {
        Upsilon {
            interference: &self.interference,
            signal: if with_ris { &self.signal } else { &self.no_signal },
            noise: self.params.base.noise_power / self.reference_power,
            threshold: t,
            reflected_scale: self.params.hole.c_r,
        }
    }

    /// Strip check at the evaluation point `1 / c_d`.
    pub fn convergence_bound(&self) -> ConvergenceBound {
        self.upsilon(self.params.base.threshold, true).bound(1.0 / self.params.hole.c_d)
    }

    /// `P[(c_d Q_SD + c_r Q_SR) / (Q_I + sigma^2) >= t]` via `L_{Y+} + P[Y < 0]`,
    /// or by inversion when that route is ill-conditioned.
    pub fn coverage(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        self.upsilon(t, true).coverage_robust(self.params.hole.c_d, &self.cfg)
    }

    /// The same probability from the direct positive-part transform.
    pub fn coverage_direct(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        self.upsilon(t, true).coverage_direct(self.params.hole.c_d, &self.cfg)
    }

    /// Coverage with the RISs removed and the direct penalty kept.
    pub fn coverage_without_ris(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        self.upsilon(t, false).coverage_robust(self.params.hole.c_d, &self.cfg)
    }

    fn rate(&self, with_ris: bool) -> Result<f64> {
        let cfg = rate_quadrature(&self.cfg);
        let c_d = self.params.hole.c_d;
        integrate_rate(|ts: &[f64]| {
            ts.iter()
                .map(|&t| self.upsilon(t, with_ris).coverage_inversion(c_d, &cfg))
                .collect()
        })
    }

    pub fn ergodic_rate(&self) -> Result<f64> {
        self.rate(true)
    }

    pub fn rate_without_ris(&self) -> Result<f64> {
        self.rate(false)
    }

    /// Rate with RISs over rate without them, both under the direct penalty.
    pub fn relative_gain(&self) -> Result<f64> {
        if self.params.model.is_empty() {
            return Ok(1.0);
        }
        Ok(self.ergodic_rate()? / self.rate_without_ris()?)
    }
}

impl VariantParams {
    fn without_ris_placement(&self) -> Placement {
        match self.model.without_ris() {
            VariantModel::BppWedge { n } => Placement::Binomial { n },
            _ => Placement::Poisson { lambda: 0.0 },
        }
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("SINR threshold", alloc::format!("{t}")))
    }
}

/// Coverage of a coverage-hole scenario at threshold `t`.
pub fn coverage_with_blockage(t: f64, params: &VariantParams) -> Result<f64> {
    VariantNetwork::new(params)?.coverage(t)
}

/// Ratio of ergodic rates with and without the RISs.
pub fn relative_gain(params: &VariantParams) -> Result<f64> {
    VariantNetwork::new(params)?.relative_gain()
}

/// Uniform UE position in the hole disc.
pub fn sample_ue_in_hole<R: Rng + ?Sized>(cfg: &CoverageHoleConfig, rng: &mut R) -> Point2D {
    let rho = cfg.hole_radius * rng.random::<f64>().sqrt();
    Point2D::from_polar(cfg.hole_center(), rho, 2.0 * PI * rng.random::<f64>())
}

/// Where the simulated UE is placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UePlacement {
    #[default]
    HoleCenter,
    UniformInHole,
}

/// Sampler of penalised SINR realisations in a coverage hole.
#[derive(Debug, Clone)]
pub struct VariantSimulator {
    params: VariantParams,
    support: Support,
    window: f64,
    tail: f64,
    ue: UePlacement,
}

impl VariantSimulator {
    pub fn new(params: &VariantParams) -> Result<Self> {
        params.validate()?;
        // Direct interference only: reuse the window of the clustered simulator.
        let sim = Simulator::new(&params.base)?;
        let (window, _) = sim.windows();
        let (tail, _) = sim.tail_means();
        Ok(VariantSimulator {
            params: *params,
            support: params.support()?,
            window,
            tail,
            ue: UePlacement::default(),
        })
    }

    pub fn with_ue_placement(mut self, ue: UePlacement) -> Self {
        self.ue = ue;
        self
    }

    /// Unpenalised reflected signal power at `ue`, in W.
    pub fn sample_q_sr<R: Rng + ?Sized>(&self, ue: Point2D, rng: &mut R) -> f64 {
        let base = &self.params.base;
        let n = match self.params.model {
            VariantModel::PppRing { mean } | VariantModel::PppWedge { mean } => sample_poisson(mean, rng),
            VariantModel::BppWedge { n } => n as usize,
        };
        let bs = self.params.hole.serving_bs();
        let mut q = 0.0;
        for _ in 0..n {
            let ris = self.support.sample_point(rng);
            q += ue_centric_power(bs, ris, ue, &base.pathloss, base.p0) * sample_gamma_sr(&base.stats, rng);
        }
        q
    }

    /// Direct interference at `ue` from BSs beyond the serving distance of the
    /// hole center, in W.
    pub fn sample_q_i<R: Rng + ?Sized>(&self, ue: Point2D, rng: &mut R) -> f64 {
        let base = &self.params.base;
        let r = base.serving_distance;
        let (lo2, hi2) = (r * r, self.window * self.window);
        let n = sample_poisson(base.lambda_bs * PI * (hi2 - lo2), rng);
        let scale = base.p0 * base.pathloss.beta;
        let mut q = self.tail;
        for _ in 0..n {
            let x = (lo2 + rng.random::<f64>() * (hi2 - lo2)).sqrt();
            let bs = Point2D::from_polar(Point2D::ORIGIN, x, 2.0 * PI * rng.random::<f64>());
            let h: f64 = Exp1.sample(rng);
            q += scale * unit_gain(bs.distance(ue), base.pathloss.alpha_nlos) * h;
        }
        q
    }

    /// One realisation; `q_sd` and `q_sr` include the blockage penalties.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SinrSample {
        let base = &self.params.base;
        let hole = &self.params.hole;
        let ue = match self.ue {
            UePlacement::HoleCenter => hole.hole_center(),
            UePlacement::UniformInHole => sample_ue_in_hole(hole, rng),
        };
        let h: f64 = Exp1.sample(rng);
        let q_sd = hole.c_d * base.p0 * base.pathloss.beta * unit_gain(hole.serving_bs().distance(ue), base.pathloss.alpha_nlos) * h;
        let q_sr = hole.c_r * self.sample_q_sr(ue, rng);
        let q_i = self.sample_q_i(ue, rng);
        SinrSample::new(q_sd, q_sr, q_i, 0.0, base.noise_power)
    }

    /// A realisation with the RISs removed, drawn from the same stream layout.
    pub fn sample_without_ris<R: Rng + ?Sized>(&self, rng: &mut R) -> SinrSample {
        let s = self.sample(rng);
        SinrSample::new(s.q_sd, 0.0, s.q_i, 0.0, s.noise)
    }
}

/// Simulated RIS counts or positions of a model, for tests and diagnostics.
pub fn sample_deployment<R: Rng + ?Sized>(params: &VariantParams, rng: &mut R) -> Result<Vec<Point2D>> {
    let support = params.support()?;
    let n = match params.model {
        VariantModel::PppRing { mean } | VariantModel::PppWedge { mean } => sample_poisson(mean, rng),
        VariantModel::BppWedge { n } => n as usize,
    };
    Ok((0..n).map(|_| support.sample_point(rng)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::NetworkModel;
    use crate::montecarlo::{estimate_laplace, Accumulator};
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    fn wedge(n: u32) -> WedgeConfig {
        WedgeConfig {
            support: Support::wedge(Point2D::ORIGIN, 25.0, 35.0, 0.0, PI / 4.0).unwrap(),
            n_ris: n,
        }
    }

    #[test]
    fn penalties_in_db() {
        assert!((db_penalty(3.0) - 0.501_187_233_627_272_2).abs() < 1e-15);
        assert_eq!(db_penalty(0.0), 1.0);
    }

    #[test]
    fn bpp_transform_edges() {
        let p = VariantParams::baseline();
        let b = &p.base;
        let bs = p.hole.serving_bs();
        for n in [0, 1, 4, 9] {
            let v = bpp_wedge_signal_laplace(Complex64::new(0.0, 0.0), bs, Point2D::ORIGIN, &wedge(n), &b.stats, &b.pathloss, b.p0);
            assert_eq!(v.value, Complex64::new(1.0, 0.0));
        }
        let s = Complex64::new(1.0 / b.reference_power(), 0.0);
        let mut last = 1.0;
        for n in 0..6 {
            let v = bpp_wedge_signal_laplace(s, bs, Point2D::ORIGIN, &wedge(n), &b.stats, &b.pathloss, b.p0);
            assert!(v.in_domain && v.value.re >= last);
            last = v.value.re;
        }
    }

    #[test]
    fn bpp_transform_matches_sampling() {
        let p = VariantParams::baseline();
        let b = &p.base;
        let sim = VariantSimulator::new(&p).unwrap();
        let s = 1.0 / b.reference_power();
        let mut rng = SmallRng::seed_from_u64(21);
        let e = estimate_laplace(|r: &mut SmallRng| sim.sample_q_sr(Point2D::ORIGIN, r), -s, 100_000, &mut rng).unwrap();
        let a = bpp_wedge_signal_laplace(
            Complex64::new(s, 0.0),
            p.hole.serving_bs(),
            Point2D::ORIGIN,
            &wedge(4),
            &b.stats,
            &b.pathloss,
            b.p0,
        );
        assert!(e.covers(a.value.re, 4.0), "{e:?} vs {:?}", a.value);
    }

    #[test]
    fn ring_mirrors_the_clustered_model() {
        let p = VariantParams::baseline().with_model(VariantModel::PppRing { mean: 5.0 });
        let v = VariantNetwork::new(&p).unwrap();
        let mirrored = SystemParams {
            lambda_ris: 5.0 / (PI * (35.0f64 * 35.0 - 25.0 * 25.0)),
            ..p.base
        };
        let m = NetworkModel::new(&mirrored).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let a = v.coverage_direct(t).unwrap();
            let b = m.coverage_probability_direct(t).unwrap();
            assert!((a - b).abs() < 1e-6, "{t}: {a} vs {b}");
        }
    }

    #[test]
    fn vanishing_reflection_leaves_the_penalised_direct_link() {
        let hole = CoverageHoleConfig {
            c_d: 0.5,
            c_r: 1e-12,
            ..CoverageHoleConfig::baseline()
        };
        let p = VariantParams::baseline().with_hole(hole);
        let v = VariantNetwork::new(&p).unwrap();
        let n = p.base.noise_power / v.reference_power();
        for t in [0.3, 3.0] {
            let z = t / hole.c_d;
            let exact = v.interference().transform(Complex64::new(z, 0.0)).value.re * (-z * n).exp();
            let c = v.coverage(t).unwrap();
            assert!((c - exact).abs() < 1e-6, "{t}: {c} vs {exact}");
            assert!((v.coverage_without_ris(t).unwrap() - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn coverage_grows_with_both_penalty_factors() {
        let t = 2.0;
        let mut prev_row: Option<Vec<f64>> = None;
        for c_d in [0.3, 0.6, 1.0] {
            let row: Vec<f64> = [0.3, 0.6, 1.0]
                .iter()
                .map(|&c_r| {
                    let hole = CoverageHoleConfig {
                        c_d,
                        c_r,
                        ..CoverageHoleConfig::baseline()
                    };
                    coverage_with_blockage(t, &VariantParams::baseline().with_hole(hole)).unwrap()
                })
                .collect();
            assert!(row.windows(2).all(|w| w[1] >= w[0] - 1e-4), "{row:?}");
            if let Some(prev) = &prev_row {
                assert!(prev.iter().zip(&row).all(|(a, b)| *b >= a - 1e-4));
            }
            prev_row = Some(row);
        }
    }

    #[test]
    fn penalised_coverage_matches_simulation() {
        let hole = CoverageHoleConfig::baseline().with_penalties_db(3.0, 0.0);
        let p = VariantParams::baseline().with_hole(hole);
        let v = VariantNetwork::new(&p).unwrap();
        let sim = VariantSimulator::new(&p).unwrap();
        let mut rng = SmallRng::seed_from_u64(22);
        let t = 1.0;
        let mut hits = Accumulator::default();
        for _ in 0..20_000 {
            hits.push(sim.sample(&mut rng).covered(t) as u8 as f64);
        }
        let e = hits.estimate();
        let a = v.coverage(t).unwrap();
        assert!((e.mean - a).abs() <= (4.0 * e.std_error).max(0.01), "{e:?} vs {a}");
    }

    #[test]
    fn ue_in_hole_is_area_uniform() {
        let hole = CoverageHoleConfig::baseline();
        let mut rng = SmallRng::seed_from_u64(23);
        let n = 100_000;
        let mut d: Vec<f64> = (0..n).map(|_| sample_ue_in_hole(&hole, &mut rng).norm() / hole.hole_radius).collect();
        assert!(d.iter().all(|&x| x <= 1.0));
        d.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let ks = d
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = x * x;
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "{ks}");
        let tiny = CoverageHoleConfig {
            hole_radius: 0.0,
            ..hole
        };
        assert_eq!(sample_ue_in_hole(&tiny, &mut rng).norm(), 0.0);
    }

    #[test]
    fn empty_deployment_has_unit_gain() {
        let p = VariantParams::baseline().with_model(VariantModel::PppRing { mean: 0.0 });
        assert_eq!(relative_gain(&p).unwrap(), 1.0);
    }

    #[test]
    fn invalid_holes_are_rejected() {
        let bad = CoverageHoleConfig {
            hole_radius: 30.0,
            ..CoverageHoleConfig::baseline()
        };
        assert!(VariantNetwork::new(&VariantParams::baseline().with_hole(bad)).is_err());
        let bad = CoverageHoleConfig {
            c_d: 1.5,
            ..CoverageHoleConfig::baseline()
        };
        assert!(bad.validate().is_err());
    }
}
