//! Precomputed quadrature tables for the shot-noise fields.
//!
//! Every transform in this module is evaluated in units of the reference
//! power `P0 g(r)`, so the arguments are dimensionless and of order one near
//! the coverage evaluation point.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::Result;
use crate::fading::{gamma_sr_unchecked, BeamformStats};
use crate::geometry::{bs_centric_unit_gain, Point2D, Support};
use crate::numerics::{gauss_legendre_on, integrate_adaptive, QuadratureConfig, TransformValue};

/// Polar product rule on a support: Gauss–Legendre in the radius, periodic
/// trapezoid in the angle for a full annulus and Gauss–Legendre for a wedge.
/// Weights include the radial Jacobian, so they sum to the support area.
pub fn polar_rule(support: &Support, n_radius: usize, n_angle: usize) -> Vec<(Point2D, f64)> {
    let radial = gauss_legendre_on(n_radius, support.r_in, support.r_out);
    let angular: Vec<(f64, f64)> = if support.is_full_annulus() {
        let h = 2.0 * PI / n_angle as f64;
        (0..n_angle).map(|k| (support.orientation + k as f64 * h, h)).collect()
    } else {
        gauss_legendre_on(
            n_angle,
            support.orientation - support.half_angle,
            support.orientation + support.half_angle,
        )
    };
    let mut out = Vec::with_capacity(radial.len() * angular.len());
    for &(rho, wr) in &radial {
        for &(theta, wt) in &angular {
            out.push((Point2D::from_polar(support.center, rho, theta), wr * wt * rho));
        }
    }
    out
}

/// Rule for a full annulus around a BS at distance `x` from the UE, exploiting
/// the mirror symmetry in `psi`. Returns `(y, cos psi, weight)` triples.
pub(crate) fn symmetric_annulus_rule(r_in: f64, r_out: f64, n_radius: usize, n_angle: usize) -> Vec<(f64, f64, f64)> {
    let n_angle = n_angle.max(2) & !1;
    let h = 2.0 * PI / n_angle as f64;
    let half = n_angle / 2;
    let radial = gauss_legendre_on(n_radius, r_in, r_out);
    let mut out = Vec::with_capacity(radial.len() * (half + 1));
    for &(y, wy) in &radial {
        for k in 0..=half {
            let w = if k == 0 || k == half { h } else { 2.0 * h };
            out.push((y, (k as f64 * h).cos(), wy * w * y));
        }
    }
    out
}

/// Angular resolution for a cluster of outer radius `r_out` seen from distance
/// `x`: the periodic trapezoid error decays like `(r_out / x)^n`; `n` targets
/// about `1e-8` relative error.
pub(crate) fn angular_points(x: f64, r_out: f64) -> usize {
    let q = x / r_out;
    let n = if q > 1.05 {
        (18.5 / q.ln()).ceil() as usize
    } else {
        64
    };
    (n.clamp(4, 64) + 1) & !1
}

/// Gauss–Legendre points across the cluster annulus. Far clusters see an
/// almost constant RIS-UE distance, so the radial profile is nearly the
/// smooth `y (y + 1)^-alpha` and few points suffice.
pub(crate) fn radial_points(x: f64, r_out: f64) -> usize {
    let q = x / r_out;
    if q < 4.0 {
        8
    } else if q < 16.0 {
        6
    } else {
        4
    }
}

/// Support nodes of a field of reflecting RISs: area weights and the
/// normalised reflected path gain at each node.
#[derive(Debug, Clone, Default)]
pub struct FieldNodes {
    pub weights: Vec<f64>,
    pub gains: Vec<f64>,
    /// Upper bound of the gain over the continuous support (at least the node maximum).
    pub peak_gain: f64,
}

impl FieldNodes {
    /// Nodes from a rule of `(point, area weight)` pairs and a gain function.
    pub fn from_rule<G: Fn(Point2D) -> f64>(rule: &[(Point2D, f64)], gain: G) -> Self {
        let mut weights = Vec::with_capacity(rule.len());
        let mut gains = Vec::with_capacity(rule.len());
        for &(p, w) in rule {
            weights.push(w);
            gains.push(gain(p));
        }
        let peak_gain = gains.iter().fold(0.0, |m: f64, &g| m.max(g));
        FieldNodes {
            weights,
            gains,
            peak_gain,
        }
    }

    /// Raises the peak bound with extra candidate gains (e.g. a grid or a known maximiser).
    pub fn with_peak_candidates<I: IntoIterator<Item = f64>>(mut self, candidates: I) -> Self {
        for g in candidates {
            self.peak_gain = self.peak_gain.max(g);
        }
        self
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `sum w (1 - L_SR(-z a))`.
    fn deficit(&self, z: Complex64, stats: &BeamformStats) -> Complex64 {
        let mu_sq = stats.mu * stats.mu;
        let mut acc = Complex64::new(0.0, 0.0);
        for (&w, &a) in self.weights.iter().zip(&self.gains) {
            let l = gamma_sr_unchecked(-z * a, mu_sq, stats.sigma_re_sq, stats.sigma_im_sq);
            acc += (Complex64::new(1.0, 0.0) - l) * w;
        }
        acc
    }

    fn mean_sum(&self) -> f64 {
        self.weights.iter().zip(&self.gains).map(|(w, a)| w * a).sum()
    }
}

/// How the RISs serving the UE are distributed over their support.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Placement {
    /// Poisson with the given density (per square metre).
    Poisson { lambda: f64 },
    /// A fixed number of independent uniform points.
    Binomial { n: u32 },
}

/// The reflected-signal field `Q_SR` in reference-power units.
#[derive(Debug, Clone)]
pub struct SignalField {
    pub placement: Placement,
    pub nodes: FieldNodes,
    pub stats: BeamformStats,
}

impl SignalField {
    pub fn new(placement: Placement, nodes: FieldNodes, stats: BeamformStats) -> Self {
        SignalField { placement, nodes, stats }
    }

    pub fn is_empty(&self) -> bool {
        match self.placement {
            Placement::Poisson { lambda } => lambda == 0.0,
            Placement::Binomial { n } => n == 0,
        }
    }

    /// Right edge of the strip where `E[exp(z Q_SR)]` is finite.
    pub fn right_edge(&self) -> f64 {
        let a = self.nodes.peak_gain;
        if self.is_empty() || a == 0.0 || self.stats.sigma_re_sq == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (2.0 * self.stats.sigma_re_sq * a)
        }
    }

    /// `E[exp(z Q_SR)]`, the bilateral transform of `-Q_SR` at `z`.
    pub fn negated_transform(&self, z: Complex64) -> TransformValue {
        if self.is_empty() {
            return TransformValue::inside(Complex64::new(1.0, 0.0));
        }
        if !(z.re < self.right_edge()) {
            return TransformValue::outside();
        }
        match self.placement {
            Placement::Poisson { lambda } => TransformValue::inside((-self.nodes.deficit(z, &self.stats) * lambda).exp()),
            Placement::Binomial { n } => {
                let area = self.nodes.area();
                let mean_l = Complex64::new(1.0, 0.0) - self.nodes.deficit(z, &self.stats) / area;
                TransformValue::inside(mean_l.powu(n))
            }
        }
    }

    /// `E[Q_SR]` in reference-power units.
    pub fn mean(&self) -> f64 {
        let per_point = self.stats.mean_gamma_sr() * self.nodes.mean_sum();
        match self.placement {
            Placement::Poisson { lambda } => lambda * per_point,
            Placement::Binomial { n } => n as f64 * per_point / self.nodes.area(),
        }
    }
}

/// Reflected interference model of one foreign cluster.
#[derive(Debug, Clone, Copy)]
pub struct ClusterFading {
    pub lambda_ris: f64,
    pub overlap: f64,
    pub stats: BeamformStats,
    pub alpha_los: f64,
    pub alpha_ir: f64,
    pub r_in: f64,
    pub r_out: f64,
    /// `P0 beta^2 / (P0 g(r))`.
    pub gain_scale: f64,
}

impl ClusterFading {
    fn row(&self, x: f64, n_radius: usize, n_angle: usize) -> (Vec<f64>, Vec<f64>) {
        let rule = symmetric_annulus_rule(self.r_in, self.r_out, n_radius, n_angle);
        let mut w = Vec::with_capacity(rule.len());
        let mut a = Vec::with_capacity(rule.len());
        for (y, c, wt) in rule {
            w.push(wt * self.lambda_ris);
            a.push(self.gain_scale * bs_centric_unit_gain(x, y, c, self.alpha_los, self.alpha_ir));
        }
        (w, a)
    }

    /// `sum w [p (1 - L_SR(z a)) + (1 - p)(1 - 1 / (1 + z m a))]`.
    #[inline]
    fn exponent(&self, z: Complex64, w: &[f64], a: &[f64]) -> Complex64 {
        let p = self.overlap;
        let m = self.stats.scatter_mean();
        let mu_sq = self.stats.mu * self.stats.mu;
        let one = Complex64::new(1.0, 0.0);
        let mut beam = Complex64::new(0.0, 0.0);
        let mut scatter = Complex64::new(0.0, 0.0);
        for (&wk, &ak) in w.iter().zip(a) {
            let za = z * ak;
            if p > 0.0 {
                beam += (one - gamma_sr_unchecked(za, mu_sq, self.stats.sigma_re_sq, self.stats.sigma_im_sq)) * wk;
            }
            // 1 - 1/(1 + q) = q / (1 + q)
            let q = za * m;
            scatter += q / (q + 1.0) * wk;
        }
        beam * p + scatter * (1.0 - p)
    }

    fn mean_gamma(&self) -> f64 {
        self.stats.mean_gamma_ir(&crate::fading::BeamOverlap {
            beamwidth: self.overlap * 360.0,
            overlap_prob: self.overlap,
        })
    }

    /// `lambda_ris E[gamma_IR] int int y a dy dpsi` at BS distance `x`.
    fn mean_row(&self, x: f64) -> f64 {
        let (w, a) = self.row(x, 12, 64);
        w.iter().zip(&a).map(|(w, a)| w * a).sum::<f64>() * self.mean_gamma()
    }
}

/// Interference field `Q_I` in reference-power units, tabulated on a
/// logarithmic grid in the BS distance `x`.
#[derive(Debug, Clone)]
pub struct InterferenceTable {
    lambda_bs: f64,
    r: f64,
    alpha_nlos: f64,
    x_nodes: Vec<f64>,
    x_weights: Vec<f64>,
    direct: Vec<f64>,
    rows: Vec<(usize, usize)>,
    cw: Vec<f64>,
    ca: Vec<f64>,
    cluster: Option<ClusterFading>,
    /// `2 pi lambda_bs int_X^inf x E[Q_c(x)] dx` beyond the tabulated range.
    tail_mean: f64,
    max_direct: f64,
    max_reflected: f64,
}

/// Log-distance breakpoints of the composite Gauss–Legendre rule in
/// `w = ln((x + 1) / (r + 1))`.
const W_BREAKS: [f64; 13] = [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 5.0, 6.0, 7.0, 8.0];
const X_POINTS_PER_PANEL: usize = 6;

impl InterferenceTable {
    pub(crate) fn new(lambda_bs: f64, r: f64, alpha_nlos: f64, cluster: Option<ClusterFading>) -> Result<Self> {
        Self::build(lambda_bs, r, alpha_nlos, cluster, |x, r_out| {
            (radial_points(x, r_out), angular_points(x, r_out))
        })
    }

    fn build<P: Fn(f64, f64) -> (usize, usize)>(
        lambda_bs: f64,
        r: f64,
        alpha_nlos: f64,
        cluster: Option<ClusterFading>,
        resolution: P,
    ) -> Result<Self> {
        let mut t = InterferenceTable {
            lambda_bs,
            r,
            alpha_nlos,
            x_nodes: Vec::new(),
            x_weights: Vec::new(),
            direct: Vec::new(),
            rows: Vec::new(),
            cw: Vec::new(),
            ca: Vec::new(),
            cluster,
            tail_mean: 0.0,
            max_direct: 1.0,
            max_reflected: 0.0,
        };
        let rp1 = r + 1.0;
        for pair in W_BREAKS.windows(2) {
            for (w, ww) in gauss_legendre_on(X_POINTS_PER_PANEL, pair[0], pair[1]) {
                let xp1 = rp1 * w.exp();
                let x = xp1 - 1.0;
                t.x_nodes.push(x);
                // dx = (x + 1) dw
                t.x_weights.push(2.0 * PI * lambda_bs * x * xp1 * ww);
                t.direct.push(crate::geometry::unit_gain(x, alpha_nlos) / crate::geometry::unit_gain(r, alpha_nlos));
                let start = t.cw.len();
                if let Some(c) = &t.cluster {
                    let (n_radius, n_angle) = resolution(x, c.r_out);
                    let (w, a) = c.row(x, n_radius, n_angle);
                    t.cw.extend(w);
                    t.ca.extend(a);
                }
                t.rows.push((start, t.cw.len()));
            }
        }
        let x_end = rp1 * W_BREAKS[W_BREAKS.len() - 1].exp() - 1.0;
        let a = alpha_nlos;
        let xp = x_end + 1.0;
        let direct_tail =
            rp1.powf(a) * (xp.powf(2.0 - a) / (a - 2.0) - xp.powf(1.0 - a) / (a - 1.0));
        let mut reflected_tail = 0.0;
        if let Some(c) = &t.cluster {
            let cfg = QuadratureConfig {
                rel_tol: 1e-9,
                abs_tol: 1e-300,
                ..Default::default()
            };
            reflected_tail = integrate_adaptive(|x: f64| x * c.mean_row(x), x_end, f64::INFINITY, &cfg)?.value;
            // Largest reflected gain: nearest cluster, RIS on the BS-UE segment at R_in.
            t.max_reflected = c.gain_scale * bs_centric_unit_gain(r, c.r_in, 1.0, c.alpha_los, c.alpha_ir);
        }
        t.tail_mean = 2.0 * PI * lambda_bs * (direct_tail + reflected_tail);
        Ok(t)
    }

    pub fn lambda_bs(&self) -> f64 {
        self.lambda_bs
    }

    pub fn serving_distance(&self) -> f64 {
        self.r
    }

    pub fn alpha_nlos(&self) -> f64 {
        self.alpha_nlos
    }

    /// Left edge of the strip of convergence of `E[exp(-z Q_I)]`.
    pub fn left_edge(&self) -> f64 {
        let mut edge = -1.0 / self.max_direct;
        if let Some(c) = &self.cluster {
            if self.max_reflected > 0.0 {
                let m = c.stats.scatter_mean();
                if m > 0.0 && c.overlap < 1.0 {
                    edge = edge.max(-1.0 / (m * self.max_reflected));
                }
                if c.overlap > 0.0 && c.stats.sigma_re_sq > 0.0 {
                    edge = edge.max(-1.0 / (2.0 * c.stats.sigma_re_sq * self.max_reflected));
                }
            }
        }
        edge
    }

    /// `E[exp(-z Q_I)]` with `z` in reference-power units.
    pub fn transform(&self, z: Complex64) -> TransformValue {
        if self.lambda_bs == 0.0 {
            return TransformValue::inside(Complex64::new(1.0, 0.0));
        }
        if !(z.re > self.left_edge()) {
            return TransformValue::outside();
        }
        let one = Complex64::new(1.0, 0.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.x_nodes.len() {
            let zd = z * self.direct[i];
            // 1 - D C with D = 1/(1 + z d) and C the cluster factor.
            let term = match &self.cluster {
                Some(c) => {
                    let (s, e) = self.rows[i];
                    let cf = (-c.exponent(z, &self.cw[s..e], &self.ca[s..e])).exp();
                    one - cf / (zd + 1.0)
                }
                None => zd / (zd + 1.0),
            };
            acc += term * self.x_weights[i];
        }
        acc += z * self.tail_mean;
        TransformValue::inside((-acc).exp())
    }

    /// `L_{Q_c(x)}(z)`: transform of the power from the BS at distance `x` and its cluster.
    pub fn cluster_transform(&self, z: Complex64, x: f64) -> TransformValue {
        if !(z.re >= 0.0) {
            return TransformValue::outside();
        }
        let d = crate::geometry::unit_gain(x, self.alpha_nlos) / crate::geometry::unit_gain(self.r, self.alpha_nlos);
        let mut v = Complex64::new(1.0, 0.0) / (z * d + 1.0);
        if let Some(c) = &self.cluster {
            let (w, a) = c.row(x, 16, 64);
            v *= (-c.exponent(z, &w, &a)).exp();
        }
        TransformValue::inside(v)
    }

    /// `E[Q_I]` in reference-power units, from the table (used as a consistency check).
    pub fn tabulated_mean(&self) -> f64 {
        let mut acc = self.tail_mean;
        for i in 0..self.x_nodes.len() {
            let mut m = self.direct[i];
            if let Some(c) = &self.cluster {
                let (s, e) = self.rows[i];
                let sum: f64 = self.cw[s..e].iter().zip(&self.ca[s..e]).map(|(w, a)| w * a).sum();
                m += sum * c.mean_gamma();
            }
            acc += self.x_weights[i] * m;
        }
        acc
    }

    pub fn node_count(&self) -> usize {
        self.x_nodes.len() + self.cw.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{NetworkModel, SystemParams};

    fn tables() -> (InterferenceTable, InterferenceTable, InterferenceTable) {
        let p = SystemParams::baseline();
        let base = NetworkModel::new(&p).unwrap().interference().clone();
        let c = base.cluster.clone();
        let fine = InterferenceTable::build(p.lambda_bs, p.serving_distance, p.pathloss.alpha_nlos, c, |_, _| (16, 64))
            .unwrap();
        let direct = InterferenceTable::new(p.lambda_bs, p.serving_distance, p.pathloss.alpha_nlos, None).unwrap();
        (base, fine, direct)
    }

    #[test]
    fn coarse_cluster_rows_match_fine_rows() {
        let (base, fine, direct) = tables();
        assert!(base.node_count() < fine.node_count() / 2);
        for z in [
            Complex64::new(0.1, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(10.0, 0.0),
            Complex64::new(3.0, 40.0),
            Complex64::new(0.0, 500.0),
            Complex64::new(200.0, -2000.0),
        ] {
            let (b, f) = (base.transform(z).value, fine.transform(z).value);
            // Exponent contributed by the clusters alone.
            let reflected = (f / direct.transform(z).value).ln();
            let err = (b.ln() - f.ln()).norm();
            assert!(err < 1e-5 && err <= 1e-3 * reflected.norm() + 1e-12, "z = {z}: {err:e} vs {:e}", reflected.norm());
        }
    }
}
