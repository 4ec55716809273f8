use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use super::field::{symmetric_annulus_rule, ClusterFading, FieldNodes, InterferenceTable, Placement, SignalField};
use super::params::SystemParams;
use super::rate::integrate_rate;
use super::theorem::{laplace_positive_part, positive_part_transform, prob_negative, BilateralTransform, Scaled};
use crate::error::{Error, Result};
use crate::geometry::{bs_centric_unit_gain, unit_gain};
use crate::numerics::{integrate_adaptive, Estimate, QuadratureConfig, TransformValue};

/// Result of the strip-of-convergence check at the coverage evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceBound {
    pub feasible: bool,
    /// `1/2` minus the worst value of the bound; positive when feasible.
    pub margin: f64,
}

/// `Y = T (Q_I + sigma^2) - c_r Q_SR` in reference-power units, assembled from
/// precomputed field tables.
#[derive(Debug, Clone, Copy)]
pub struct Upsilon<'a> {
    pub interference: &'a InterferenceTable,
    pub signal: &'a SignalField,
    /// Noise power over the reference power.
    pub noise: f64,
    pub threshold: f64,
    /// Penalty factor on the reflected signal.
    pub reflected_scale: f64,
}

impl BilateralTransform for Upsilon<'_> {
    fn bilateral(&self, z: Complex64) -> TransformValue {
        let t = self.threshold;
        let i = self.interference.transform(z * t);
        if !i.in_domain {
            return i;
        }
        let s = self.signal.negated_transform(z * self.reflected_scale);
        if !s.in_domain {
            return s;
        }
        TransformValue::inside(i.value * (-(z * (t * self.noise))).exp() * s.value)
    }
}

impl Upsilon<'_> {
    /// Strip check at real argument `s`: `s c_r sigma_re^2 a_peak < 1/2`.
    pub fn bound(&self, s: f64) -> ConvergenceBound {
        let worst = if self.signal.is_empty() {
            0.0
        } else {
            s * self.reflected_scale * self.signal.stats.sigma_re_sq * self.signal.nodes.peak_gain
        };
        ConvergenceBound {
            feasible: worst < 0.5,
            margin: 0.5 - worst,
        }
    }

    fn check(&self, s: f64) -> Result<()> {
        let b = self.bound(s);
        if b.feasible {
            Ok(())
        } else {
            Err(Error::Infeasible { margin: b.margin })
        }
    }

    /// `Y` grows linearly in the threshold; inversion works on `Y / max(T, 1)`.
    fn rescaled(&self) -> Scaled<&Self> {
        Scaled {
            inner: self,
            factor: self.threshold.max(1.0),
        }
    }

    /// `P[c_d gamma >= Y]` for `gamma ~ Exp(1)`, via `L_{Y+}(1/c_d) + P[Y < 0]`.
    pub fn coverage(&self, c_d: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let s = 1.0 / c_d;
        self.check(s)?;
        self.check_tilt(c_d)?;
        let y = self.rescaled();
        let l = laplace_positive_part(&y, s * y.factor, cfg)?;
        let p = prob_negative(&y, cfg)?.value;
        clamp_probability(l + p)
    }

    /// The same probability from the direct form `(1 + B(s))/2 + PV`.
    pub fn coverage_direct(&self, c_d: f64, cfg: &QuadratureConfig) -> Result<f64> {
        let s = 1.0 / c_d;
        self.check(s)?;
        self.check_tilt(c_d)?;
        let y = self.rescaled();
        clamp_probability(positive_part_transform(&y, s * y.factor, cfg)?)
    }

    /// The same probability as `P[Y - c_d gamma < 0]`, by Gil–Pelaez inversion
    /// of `B(-iu) / (1 + i c_d u)`. Only the characteristic function enters,
    /// so no value exceeds one in modulus.
    pub fn coverage_inversion(&self, c_d: f64, cfg: &QuadratureConfig) -> Result<f64> {
        if !(c_d > 0.0) {
            return Err(Error::domain("direct-link penalty", alloc::format!("{c_d}")));
        }
        let w = Scaled {
            inner: MinusFade { inner: self, c_d },
            factor: self.threshold.max(1.0),
        };
        clamp_probability(prob_negative(&w, cfg)?.value)
    }

    /// `|B(1 / c_d)|`, the size of the values the principal-value routes
    /// cancel down to a probability.
    pub fn tilt(&self, c_d: f64) -> f64 {
        let v = self.bilateral(Complex64::new(1.0 / c_d, 0.0));
        match v.value.norm() {
            t if v.in_domain && t.is_finite() => t,
            _ => f64::INFINITY,
        }
    }

    fn well_conditioned(&self, c_d: f64) -> bool {
        self.tilt(c_d) <= TILT_LIMIT
    }

    fn check_tilt(&self, c_d: f64) -> Result<()> {
        if self.well_conditioned(c_d) {
            Ok(())
        } else {
            Err(Error::IllConditioned { tilt: self.tilt(c_d) })
        }
    }

    /// Route A, or the inversion route when route A is ill-conditioned.
    pub fn coverage_robust(&self, c_d: f64, cfg: &QuadratureConfig) -> Result<f64> {
        self.check(1.0 / c_d)?;
        if self.well_conditioned(c_d) {
            self.coverage(c_d, cfg)
        } else {
            self.coverage_inversion(c_d, cfg)
        }
    }
}

/// Largest `|B(1 / c_d)|` accepted by the principal-value routes. Their
/// absolute error is roughly the quadrature tolerance times this value.
pub const TILT_LIMIT: f64 = 1e3;

/// `Y - c_d gamma` with `gamma ~ Exp(1)` independent of `Y`.
struct MinusFade<B> {
    inner: B,
    c_d: f64,
}

impl<B: BilateralTransform> BilateralTransform for MinusFade<B> {
    fn bilateral(&self, z: Complex64) -> TransformValue {
        let v = self.inner.bilateral(z);
        if !v.in_domain {
            return v;
        }
        TransformValue::inside(v.value / (Complex64::new(1.0, 0.0) - z * self.c_d))
    }
}

pub(crate) fn clamp_probability(p: f64) -> Result<f64> {
    if !(p > -1e-6 && p < 1.0 + 1e-6) {
        return Err(Error::NonConvergence {
            what: "coverage probability outside [0, 1]",
            estimate: p,
            abs_error: f64::NAN,
        });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Radial and angular resolution of the serving-cluster rule. The reflected
/// signal transform is evaluated far along the imaginary axis, where the
/// per-node phases spread over tens of radians before fading damps them.
const SIGNAL_RADIAL_POINTS: usize = 24;
const SIGNAL_ANGULAR_POINTS: usize = 64;

/// The clustered network of a parameter set with its tables built once.
#[derive(Debug, Clone)]
pub struct NetworkModel {
    params: SystemParams,
    reference_power: f64,
    interference: InterferenceTable,
    signal: SignalField,
    cfg: QuadratureConfig,
}

impl NetworkModel {
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        let reference_power = params.reference_power();
        let pl = &params.pathloss;
        let gain_scale = params.p0 * pl.beta * pl.beta / reference_power;
        let cluster = (params.reflected_interference && params.lambda_ris > 0.0).then(|| ClusterFading {
            lambda_ris: params.lambda_ris,
            overlap: params.beam.overlap_prob,
            stats: params.stats,
            alpha_los: pl.alpha_los,
            alpha_ir: pl.alpha_ir,
            r_in: params.r_in,
            r_out: params.r_out,
            gain_scale,
        });
        let interference = InterferenceTable::new(params.lambda_bs, params.serving_distance, pl.alpha_nlos, cluster)?;
        let r = params.serving_distance;
        let gain = |y: f64, c: f64| gain_scale * bs_centric_unit_gain(r, y, c, pl.alpha_los, pl.alpha_los);
        let mut nodes = FieldNodes::default();
        for (y, c, w) in symmetric_annulus_rule(params.r_in, params.r_out, SIGNAL_RADIAL_POINTS, SIGNAL_ANGULAR_POINTS) {
            nodes.weights.push(w);
            nodes.gains.push(gain(y, c));
        }
        let grid = 96;
        let mut peak = gain(params.r_in, 1.0);
        for i in 0..=grid {
            let y = params.r_in + (params.r_out - params.r_in) * i as f64 / grid as f64;
            for j in 0..=grid {
                peak = peak.max(gain(y, (PI * j as f64 / grid as f64).cos()));
            }
        }
        let node_peak = nodes.gains.iter().fold(0.0, |m: f64, &g| m.max(g));
        let nodes = nodes.with_peak_candidates([node_peak, peak]);
        let signal = SignalField::new(Placement::Poisson { lambda: params.lambda_ris }, nodes, params.stats);
        Ok(NetworkModel {
            params: *params,
            reference_power,
            interference,
            signal,
            cfg: QuadratureConfig::default(),
        })
    }

    pub fn with_quadrature(mut self, cfg: QuadratureConfig) -> Self {
        self.cfg = cfg;
        self
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn reference_power(&self) -> f64 {
        self.reference_power
    }

    pub fn interference(&self) -> &InterferenceTable {
        &self.interference
    }

    pub fn signal(&self) -> &SignalField {
        &self.signal
    }

    pub fn upsilon(&self, threshold: f64) -> Upsilon<'_> {
        Upsilon {
            interference: &self.interference,
            signal: &self.signal,
            noise: self.params.noise_power / self.reference_power,
            threshold,
            reflected_scale: 1.0,
        }
    }

    /// `E[exp(-s T Q_c(x))]` for the BS at distance `x` and its cluster, `s` in 1/W.
    pub fn cluster_interference_laplace(&self, s: Complex64, x: f64) -> TransformValue {
        self.interference
            .cluster_transform(s * (self.reference_power * self.params.threshold), x)
    }

    /// `E[exp(-s T Q_I)]`, `s` in 1/W.
    pub fn total_interference_laplace(&self, s: Complex64) -> TransformValue {
        if s.re < 0.0 {
            return TransformValue::outside();
        }
        self.interference
            .transform(s * (self.reference_power * self.params.threshold))
    }

    /// `E[exp(s Q_SR)]`, `s` in 1/W.
    pub fn reflected_signal_laplace(&self, s: Complex64) -> TransformValue {
        self.signal.negated_transform(s * self.reference_power)
    }

    /// `E[exp(-s Y)]` at the configured threshold, `s` in 1/W.
    pub fn upsilon_bilateral(&self, s: Complex64) -> TransformValue {
        self.upsilon(self.params.threshold).bilateral(s * self.reference_power)
    }

    pub fn convergence_bound(&self) -> ConvergenceBound {
        self.upsilon(self.params.threshold).bound(1.0)
    }

    pub fn prob_upsilon_negative(&self) -> Result<Estimate<f64>> {
        let up = self.upsilon(self.params.threshold);
        up.check(1.0)?;
        prob_negative(&up, &self.cfg)
    }

    /// `L_{Y+}(s)` with `s` in 1/W.
    pub fn laplace_upsilon_plus(&self, s: f64) -> Result<f64> {
        let up = self.upsilon(self.params.threshold);
        let z = s * self.reference_power;
        up.check(z)?;
        laplace_positive_part(&up, z, &self.cfg)
    }

    /// `P[SINR >= t]` by route A, falling back to the inversion route when
    /// the principal-value integrals are ill-conditioned.
    pub fn coverage_probability(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        self.upsilon(t).coverage_robust(1.0, &self.cfg)
    }

    pub fn coverage_probability_direct(&self, t: f64) -> Result<f64> {
        check_threshold(t)?;
        self.upsilon(t).coverage_direct(1.0, &self.cfg)
    }

    /// `int_0^inf P_c(t) / (1 + t) dt` in nats/s/Hz.
    pub fn ergodic_rate(&self) -> Result<f64> {
        let cfg = rate_quadrature(&self.cfg);
        integrate_rate(|ts: &[f64]| ts.iter().map(|&t| self.upsilon(t).coverage_inversion(1.0, &cfg)).collect())
    }

    /// Mean powers by Campbell's theorem, in W.
    pub fn mean_power_decomposition(&self) -> Result<MeanPowers> {
        mean_power_decomposition(&self.params)
    }
}

/// Tolerances for the coverage evaluations inside the rate integral, whose own
/// accuracy target is far looser than that of a single probability.
pub(crate) fn rate_quadrature(cfg: &QuadratureConfig) -> QuadratureConfig {
    QuadratureConfig {
        rel_tol: cfg.rel_tol.max(1e-7),
        abs_tol: cfg.abs_tol.max(1e-10),
        ..*cfg
    }
}

fn check_threshold(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("SINR threshold", alloc::format!("{t}")))
    }
}

/// Mean received powers of the four SINR components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanPowers {
    pub direct_interference: f64,
    pub reflected_interference: f64,
    pub reflected_signal: f64,
    pub direct_signal: f64,
}

impl MeanPowers {
    /// Share of the interference power that arrives through RISs.
    pub fn reflected_fraction(&self) -> f64 {
        let total = self.direct_interference + self.reflected_interference;
        if total > 0.0 {
            self.reflected_interference / total
        } else {
            0.0
        }
    }
}

/// `int int y G(x, y, psi) dpsi dy` over the cluster annulus, by nested adaptive quadrature.
fn cluster_gain_integral(x: f64, p: &SystemParams, alpha2: f64) -> Result<f64> {
    let cfg = QuadratureConfig {
        rel_tol: 1e-10,
        abs_tol: 1e-300,
        ..Default::default()
    };
    let a1 = p.pathloss.alpha_los;
    let beta_sq = p.pathloss.beta * p.pathloss.beta;
    let mut failure = None;
    let outer = integrate_adaptive(
        |y: f64| {
            match integrate_adaptive(|psi: f64| bs_centric_unit_gain(x, y, psi.cos(), a1, alpha2), 0.0, PI, &cfg) {
                Ok(e) => 2.0 * y * e.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        p.r_in,
        p.r_out,
        &cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(beta_sq * outer.value)
}

/// Mean direct interference in W from BSs beyond distance `x0 >= r`.
pub(crate) fn direct_interference_beyond(p: &SystemParams, x0: f64) -> f64 {
    let a = p.pathloss.alpha_nlos;
    let xp = x0 + 1.0;
    // int_x0^inf x (x+1)^-a dx
    let radial = xp.powf(2.0 - a) / (a - 2.0) - xp.powf(1.0 - a) / (a - 1.0);
    2.0 * PI * p.lambda_bs * p.p0 * p.pathloss.beta * radial
}

/// Mean RIS-reflected interference in W from clusters of BSs at distances in `[lo, hi)`.
pub(crate) fn reflected_interference_between(p: &SystemParams, lo: f64, hi: f64) -> Result<f64> {
    if !(p.reflected_interference && p.lambda_bs > 0.0 && p.lambda_ris > 0.0) || !(hi > lo) {
        return Ok(0.0);
    }
    let cfg = QuadratureConfig {
        rel_tol: 1e-8,
        abs_tol: 1e-300,
        ..Default::default()
    };
    let mut failure = None;
    let e = integrate_adaptive(
        |x: f64| match cluster_gain_integral(x, p, p.pathloss.alpha_ir) {
            Ok(v) => x * v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        &cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(2.0 * PI * p.lambda_bs * p.lambda_ris * p.stats.mean_gamma_ir(&p.beam) * p.p0 * e.value)
}

pub fn mean_power_decomposition(p: &SystemParams) -> Result<MeanPowers> {
    p.validate()?;
    let r = p.serving_distance;
    let reflected_signal = if p.lambda_ris > 0.0 {
        p.lambda_ris * p.stats.mean_gamma_sr() * p.p0 * cluster_gain_integral(r, p, p.pathloss.alpha_los)?
    } else {
        0.0
    };
    Ok(MeanPowers {
        direct_interference: direct_interference_beyond(p, r),
        reflected_interference: reflected_interference_between(p, r, f64::INFINITY)?,
        reflected_signal,
        direct_signal: p.p0 * p.pathloss.beta * unit_gain(r, p.pathloss.alpha_nlos),
    })
}

/// Convenience wrappers building the model for a single evaluation.
pub fn cluster_interference_laplace(s: Complex64, x: f64, params: &SystemParams) -> Result<TransformValue> {
    Ok(NetworkModel::new(params)?.cluster_interference_laplace(s, x))
}

pub fn total_interference_laplace(s: Complex64, params: &SystemParams) -> Result<TransformValue> {
    Ok(NetworkModel::new(params)?.total_interference_laplace(s))
}

pub fn reflected_signal_laplace(s: Complex64, params: &SystemParams) -> Result<TransformValue> {
    Ok(NetworkModel::new(params)?.reflected_signal_laplace(s))
}

pub fn upsilon_bilateral(s: Complex64, params: &SystemParams) -> Result<TransformValue> {
    Ok(NetworkModel::new(params)?.upsilon_bilateral(s))
}

pub fn convergence_bound(params: &SystemParams) -> Result<ConvergenceBound> {
    Ok(NetworkModel::new(params)?.convergence_bound())
}

pub fn prob_upsilon_negative(params: &SystemParams) -> Result<f64> {
    Ok(NetworkModel::new(params)?.prob_upsilon_negative()?.value)
}

pub fn laplace_upsilon_plus(s: f64, params: &SystemParams) -> Result<f64> {
    NetworkModel::new(params)?.laplace_upsilon_plus(s)
}

pub fn coverage_probability(t: f64, params: &SystemParams) -> Result<f64> {
    NetworkModel::new(params)?.coverage_probability(t)
}

pub fn coverage_probability_direct(t: f64, params: &SystemParams) -> Result<f64> {
    NetworkModel::new(params)?.coverage_probability_direct(t)
}

pub fn ergodic_rate(params: &SystemParams) -> Result<f64> {
    NetworkModel::new(params)?.ergodic_rate()
}

/// Coverage on a grid of thresholds, sharing one set of tables.
pub fn coverage_curve(thresholds: &[f64], params: &SystemParams) -> Result<Vec<f64>> {
    let m = NetworkModel::new(params)?;
    thresholds.iter().map(|&t| m.coverage_probability(t)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct_only() -> SystemParams {
        SystemParams {
            lambda_ris: 0.0,
            noise_power: 0.0,
            ..SystemParams::baseline()
        }
    }

    /// `exp(-2 pi lambda int_r^inf x (1 - 1/(1 + z d(x))) dx)` by plain adaptive quadrature.
    fn direct_reference(p: &SystemParams, z: Complex64) -> Complex64 {
        let r = p.serving_distance;
        let a = p.pathloss.alpha_nlos;
        let cfg = QuadratureConfig {
            rel_tol: 1e-11,
            abs_tol: 1e-300,
            max_subdivisions: 4000,
            ..Default::default()
        };
        let f = |x: f64| {
            let d = ((r + 1.0) / (x + 1.0)).powf(a);
            let q = z * d;
            q / (q + 1.0) * x
        };
        let re = integrate_adaptive(|x| f(x).re, r, f64::INFINITY, &cfg).unwrap().value;
        let im = integrate_adaptive(|x| f(x).im, r, f64::INFINITY, &cfg).unwrap().value;
        (-Complex64::new(re, im) * (2.0 * PI * p.lambda_bs)).exp()
    }

    #[test]
    fn direct_table_matches_reference() {
        let p = direct_only();
        let m = NetworkModel::new(&p).unwrap();
        for z in [
            Complex64::new(0.1, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(10.0, 0.0),
            Complex64::new(1.0, -3.0),
            Complex64::new(0.0, -40.0),
        ] {
            let table = m.interference().transform(z).value;
            let reference = direct_reference(&p, z);
            assert!((table - reference).norm() < 1e-7, "{z}: {table} vs {reference}");
        }
    }

    #[test]
    fn transform_slopes_match_mean_powers() {
        let p = SystemParams::baseline();
        let m = NetworkModel::new(&p).unwrap();
        let means = m.mean_power_decomposition().unwrap();
        let rp = m.reference_power();
        let h = 1e-6;
        let li = m.interference().transform(Complex64::new(h, 0.0)).value.re;
        let slope_i = -li.ln() / h;
        let expect_i = (means.direct_interference + means.reflected_interference) / rp;
        assert!((slope_i / expect_i - 1.0).abs() < 1e-3, "{slope_i} vs {expect_i}");
        let ls = m.signal().negated_transform(Complex64::new(h, 0.0)).value.re;
        let slope_s = ls.ln() / h;
        let expect_s = means.reflected_signal / rp;
        assert!((slope_s / expect_s - 1.0).abs() < 1e-3, "{slope_s} vs {expect_s}");
        assert!((means.direct_signal / rp - 1.0).abs() < 1e-12);
        assert!(means.reflected_fraction() > 0.0 && means.reflected_fraction() < 1.0);
    }

    #[test]
    fn baseline_is_feasible() {
        let b = convergence_bound(&SystemParams::baseline()).unwrap();
        assert!(b.feasible && b.margin > 0.45, "{b:?}");
    }

    #[test]
    fn direct_only_coverage_is_the_interference_transform() {
        let p = direct_only();
        let m = NetworkModel::new(&p).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let c = m.coverage_probability_direct(t).unwrap();
            let l = direct_reference(&p, Complex64::new(t, 0.0)).re;
            assert!((c - l).abs() < 1e-6, "{t}: {c} vs {l}");
        }
    }

    #[test]
    fn coverage_routes_agree_and_decrease() {
        let m = NetworkModel::new(&SystemParams::baseline()).unwrap();
        let mut last = 1.0;
        for t in [0.1, 1.0, 10.0] {
            let a = m.coverage_probability(t).unwrap();
            let b = m.coverage_probability_direct(t).unwrap();
            assert!((a - b).abs() < 1e-6, "{t}: {a} vs {b}");
            assert!(b < last);
            last = b;
        }
    }

    #[test]
    fn inversion_route_matches_principal_value_routes() {
        let m = NetworkModel::new(&SystemParams::baseline()).unwrap();
        for t in [0.1, 1.0, 10.0] {
            let u = m.upsilon(t);
            assert!(u.tilt(1.0) < TILT_LIMIT);
            let a = u.coverage(1.0, &m.cfg).unwrap();
            let c = u.coverage_inversion(1.0, &m.cfg).unwrap();
            assert!((a - c).abs() < 1e-6, "{t}: {a} vs {c}");
        }
    }

    #[test]
    fn single_ris_with_the_whole_budget_falls_back_to_inversion() {
        // One RIS per cluster carrying 10^4 elements: B(1) overflows.
        let p = SystemParams::baseline()
            .with_elements(10_000, 2_000)
            .unwrap()
            .with_mean_ris(1.0);
        let m = NetworkModel::new(&p).unwrap();
        let u = m.upsilon(1.0);
        assert!(u.tilt(1.0) > TILT_LIMIT);
        assert!(matches!(u.coverage_direct(1.0, &m.cfg), Err(Error::IllConditioned { .. })));
        let mut last = 1.0;
        for t in [0.1, 1.0, 10.0, 100.0] {
            let c = m.coverage_probability(t).unwrap();
            assert!(c > 0.0 && c < last, "{t}: {c}");
            last = c;
        }
    }

    #[test]
    fn nonpositive_threshold_is_rejected() {
        let m = NetworkModel::new(&direct_only()).unwrap();
        assert!(m.coverage_probability(0.0).is_err());
        assert!(m.coverage_probability_direct(f64::NAN).is_err());
    }
}
