//! Small-scale fading: Rician links, the cascaded BS–RIS–UE coefficient
//! `zeta = rho1 * rho2`, the Gaussian approximation of the beamformed sum
//! `eta` and the Laplace transforms of the resulting power gains.

use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::numerics::TransformValue;

/// Rician link `sqrt(K/(K+1)) e^{i phi} + sqrt(1/(K+1)) CN(0, 1)`, scaled to `total_power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RicianSpec {
    pub k_factor: f64,
    pub total_power: f64,
}

impl RicianSpec {
    pub fn new(k_factor: f64, total_power: f64) -> Result<Self> {
        if !(k_factor >= 0.0 && k_factor.is_finite()) {
            return Err(Error::domain("Rician K factor", alloc::format!("{k_factor}")));
        }
        if !(total_power > 0.0 && total_power.is_finite()) {
            return Err(Error::domain("Rician total power", alloc::format!("{total_power}")));
        }
        Ok(RicianSpec { k_factor, total_power })
    }

    pub fn unit(k_factor: f64) -> Result<Self> {
        Self::new(k_factor, 1.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Complex64 {
        let k = self.k_factor;
        let los = (self.total_power * k / (k + 1.0)).sqrt();
        let nlos = (self.total_power / (k + 1.0) / 2.0).sqrt();
        let phi = 2.0 * PI * rng.random::<f64>();
        let (s, c) = phi.sin_cos();
        let g1: f64 = StandardNormal.sample(rng);
        let g2: f64 = StandardNormal.sample(rng);
        Complex64::new(los * c + nlos * g1, los * s + nlos * g2)
    }

    /// `E|rho|`.
    pub fn mean_abs(&self) -> f64 {
        let k = self.k_factor;
        // Kummer series for z = -K cannot fail for a = -1/2, b = 1.
        let f = confluent_1f1(-0.5, 1.0, -k).unwrap_or(f64::NAN);
        (PI * self.total_power / (4.0 * (k + 1.0))).sqrt() * f
    }
}

impl Default for RicianSpec {
    fn default() -> Self {
        RicianSpec {
            k_factor: 1.0,
            total_power: 1.0,
        }
    }
}

/// Kummer's confluent hypergeometric function `1F1(a; b; z)`.
///
/// Summed as a power series; for `z < 0` Kummer's transformation
/// `1F1(a; b; z) = e^z 1F1(b - a; b; -z)` is applied first so the series has
/// terms of one sign whenever `b - a > 0`.
pub fn confluent_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    if b <= 0.0 && b.fract() == 0.0 {
        return Err(Error::domain("1F1 parameter b", alloc::format!("{b} is a nonpositive integer")));
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::domain("1F1 argument", alloc::format!("a = {a}, b = {b}, z = {z}")));
    }
    // A terminating series (a a nonpositive integer) is exact as is.
    let terminating = a <= 0.0 && a.fract() == 0.0;
    if z < 0.0 && !terminating {
        return Ok(z.exp() * series_1f1(b - a, b, -z)?);
    }
    series_1f1(a, b, z)
}

fn series_1f1(a: f64, b: f64, z: f64) -> Result<f64> {
    const MAX_TERMS: usize = 20_000;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for n in 0..MAX_TERMS {
        let nf = n as f64;
        term *= (a + nf) / (b + nf) * z / (nf + 1.0);
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        if term.abs() <= 1e-16 * sum.abs() {
            small += 1;
            if small >= 2 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::NonConvergence {
        what: "1F1 series",
        estimate: sum,
        abs_error: term.abs(),
    })
}

/// Moments of `|zeta| = |rho1| |rho2|` for i.i.d. legs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaMoments {
    pub mean_abs: f64,
    pub var_abs: f64,
    pub second_moment: f64,
}

pub fn zeta_moments(spec: &RicianSpec) -> ZetaMoments {
    let m = spec.mean_abs();
    let mean_abs = m * m;
    let second_moment = spec.total_power * spec.total_power;
    ZetaMoments {
        mean_abs,
        var_abs: second_moment - mean_abs * mean_abs,
        second_moment,
    }
}

/// One draw of the cascaded coefficient.
pub fn sample_zeta<R: Rng + ?Sized>(spec: &RicianSpec, rng: &mut R) -> Complex64 {
    spec.sample(rng) * spec.sample(rng)
}

/// Gaussian approximation of the beamformed coefficient `eta` of one RIS:
/// `Re eta ~ N(mu, sigma_re^2)`, `Im eta ~ N(0, sigma_im^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamformStats {
    pub m_total: u32,
    pub m_batch: u32,
    pub mu: f64,
    pub sigma_re_sq: f64,
    pub sigma_im_sq: f64,
}

impl BeamformStats {
    /// `E[gamma_SR] = E|eta|^2`.
    pub fn mean_gamma_sr(&self) -> f64 {
        self.mu * self.mu + self.sigma_re_sq + self.sigma_im_sq
    }

    /// Mean of the non-overlapping (scattered) interference branch.
    pub fn scatter_mean(&self) -> f64 {
        (self.m_total - self.m_batch) as f64
    }

    pub fn mean_gamma_ir(&self, overlap: &BeamOverlap) -> f64 {
        let p = overlap.overlap_prob;
        p * self.mean_gamma_sr() + (1.0 - p) * self.scatter_mean()
    }
}

pub fn beamform_stats(zeta: &ZetaMoments, m_total: u32, m_batch: u32) -> Result<BeamformStats> {
    if m_batch == 0 || m_batch > m_total {
        return Err(Error::domain(
            "RIS element counts",
            alloc::format!("need 0 < m_batch <= m_total, got m_batch = {m_batch}, m_total = {m_total}"),
        ));
    }
    let m = m_total as f64;
    let mo = m_batch as f64;
    Ok(BeamformStats {
        m_total,
        m_batch,
        mu: mo * zeta.mean_abs,
        sigma_re_sq: (m + mo) * zeta.var_abs / 2.0,
        sigma_im_sq: (m - mo) * zeta.var_abs / 2.0,
    })
}

/// Probability that a foreign RIS beam covers the typical UE.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamOverlap {
    pub beamwidth: f64,
    pub overlap_prob: f64,
}

impl BeamOverlap {
    pub fn from_beamwidth(degrees: f64) -> Result<Self> {
        if !(degrees > 0.0 && degrees <= 360.0) {
            return Err(Error::domain("beamwidth", alloc::format!("{degrees} degrees")));
        }
        Ok(BeamOverlap {
            beamwidth: degrees,
            overlap_prob: degrees / 360.0,
        })
    }

    /// The conservative beamwidth `180 / M_o` degrees of a batch of `M_o` elements.
    pub fn from_batch(m_batch: u32) -> Result<Self> {
        if m_batch == 0 {
            return Err(Error::domain("batch size", "0"));
        }
        Self::from_beamwidth(180.0 / m_batch as f64)
    }
}

/// `E[exp(-s gamma_SR)]` for `gamma_SR = |eta|^2` under the Gaussian approximation.
pub fn laplace_gamma_sr(s: Complex64, stats: &BeamformStats) -> TransformValue {
    let edge = if stats.sigma_re_sq > 0.0 {
        -1.0 / (2.0 * stats.sigma_re_sq)
    } else {
        f64::NEG_INFINITY
    };
    if !(s.re > edge) {
        return TransformValue::outside();
    }
    TransformValue::inside(gamma_sr_unchecked(s, stats.mu * stats.mu, stats.sigma_re_sq, stats.sigma_im_sq))
}

/// The transform without the domain check; each square-root factor has positive
/// real part inside the strip, so principal roots give the analytic branch.
///
/// `1 / (sqrt(a) sqrt(b)) = exp(-(Log a + Log b) / 2)` for principal logarithms,
/// so the whole transform is a single complex exponential.
#[inline]
pub(crate) fn gamma_sr_unchecked(s: Complex64, mu_sq: f64, sre: f64, sim: f64) -> Complex64 {
    let a = s * (2.0 * sre) + 1.0;
    let b = s * (2.0 * sim) + 1.0;
    let na = a.norm_sqr();
    // -mu^2 s / a = -mu^2 s conj(a) / |a|^2
    let q = s * a.conj() * (-mu_sq / na);
    let log_mod = 0.25 * (na * b.norm_sqr()).ln();
    let arg = 0.5 * (a.im.atan2(a.re) + b.im.atan2(b.re));
    Complex64::new(q.re - log_mod, q.im - arg).exp()
}

/// `E[exp(-s gamma_IR)]`: with probability `p` the foreign beam overlaps and the
/// gain behaves like `gamma_SR`, otherwise it is exponential with mean `M - M_o`.
pub fn laplace_gamma_ir(s: Complex64, stats: &BeamformStats, overlap: &BeamOverlap) -> TransformValue {
    let sr = laplace_gamma_sr(s, stats);
    let mean = stats.scatter_mean();
    if !sr.in_domain || (mean > 0.0 && !(s.re > -1.0 / mean)) {
        return TransformValue::outside();
    }
    let p = overlap.overlap_prob;
    TransformValue::inside(sr.value * p + (1.0 - p) / (s * mean + 1.0))
}

/// Draw of `gamma_SR` under the Gaussian approximation.
pub fn sample_gamma_sr<R: Rng + ?Sized>(stats: &BeamformStats, rng: &mut R) -> f64 {
    let n1: f64 = StandardNormal.sample(rng);
    let n2: f64 = StandardNormal.sample(rng);
    let re = stats.mu + stats.sigma_re_sq.sqrt() * n1;
    let im = stats.sigma_im_sq.sqrt() * n2;
    re * re + im * im
}

/// Draw of `gamma_IR` from the overlap mixture.
pub fn sample_gamma_ir<R: Rng + ?Sized>(stats: &BeamformStats, overlap: &BeamOverlap, rng: &mut R) -> f64 {
    if rng.random::<f64>() < overlap.overlap_prob {
        sample_gamma_sr(stats, rng)
    } else {
        let e: f64 = Exp1.sample(rng);
        e * stats.scatter_mean()
    }
}

/// Exact beamformed coefficient: `M_o` phase-aligned magnitudes plus `M - M_o`
/// unaligned cascaded coefficients.
///
/// The unaligned elements keep their uniform phase, so each contributes
/// `E|zeta|^2 / 2` (not `V|zeta| / 2`) to the variance of either component.
/// The Gaussian approximation in [`BeamformStats`] therefore matches this draw
/// in the mean but not in the spread of the scattered part.
pub fn sample_eta_exact<R: Rng + ?Sized>(spec: &RicianSpec, m_total: u32, m_batch: u32, rng: &mut R) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in 0..m_total {
        let z = sample_zeta(spec, rng);
        if m < m_batch {
            acc.re += z.norm();
        } else {
            acc += z;
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::rngs::SmallRng;
    use rand::SeedableRng;

    /// Direct series without Kummer's transformation and an explicit remainder
    /// bound: after the terms start shrinking geometrically with ratio q < 1 the
    /// tail is at most |term| q / (1 - q).
    fn reference_1f1(a: f64, b: f64, z: f64) -> f64 {
        let mut term = 1.0f64;
        let mut sum = 1.0;
        for n in 0..500 {
            let nf = n as f64;
            let ratio = (a + nf) / (b + nf) * z / (nf + 1.0);
            term *= ratio;
            sum += term;
            let q = ratio.abs();
            if n > 5 && q < 0.5 && term.abs() * q / (1.0 - q) < 1e-17 {
                break;
            }
        }
        sum
    }

    #[test]
    fn hypergeometric_identities() {
        assert_eq!(confluent_1f1(0.3, 1.7, 0.0).unwrap(), 1.0);
        assert_relative_eq!(confluent_1f1(1.0, 1.0, 0.5).unwrap(), 0.5f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(confluent_1f1(1.0, 1.0, -3.0).unwrap(), (-3.0f64).exp(), max_relative = 1e-13);
        assert!(confluent_1f1(1.0, -2.0, 0.5).is_err());
    }

    #[test]
    fn hypergeometric_against_direct_series() {
        let v = confluent_1f1(-0.5, 1.0, -1.0).unwrap();
        let r = reference_1f1(-0.5, 1.0, -1.0);
        assert!(((v - r) / r).abs() < 1e-12, "{v} vs {r}");
        for &(a, b, z) in &[(0.5, 2.5, -4.0), (-0.5, 1.0, -7.5), (2.0, 3.0, 6.0), (-3.0, 1.5, -2.0)] {
            let v = confluent_1f1(a, b, z).unwrap();
            let r = reference_1f1(a, b, z);
            assert!(((v - r) / r).abs() < 1e-11, "({a},{b},{z}): {v} vs {r}");
        }
    }

    #[test]
    fn zeta_moments_k1() {
        let m = zeta_moments(&RicianSpec::unit(1.0).unwrap());
        let f = confluent_1f1(-0.5, 1.0, -1.0).unwrap();
        assert_relative_eq!(m.mean_abs, PI / 8.0 * f * f, max_relative = 1e-14);
        assert_eq!(m.second_moment, 1.0);
        assert!((m.var_abs - (1.0 - m.mean_abs * m.mean_abs)).abs() < 1e-12);
        // Rayleigh legs: E|rho| = sqrt(pi)/2.
        let r = zeta_moments(&RicianSpec::unit(0.0).unwrap());
        assert_relative_eq!(r.mean_abs, PI / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn stats_for_batch_of_600() {
        let z = zeta_moments(&RicianSpec::default());
        let s = beamform_stats(&z, 3000, 600).unwrap();
        assert_relative_eq!(s.mu, 600.0 * z.mean_abs);
        assert_relative_eq!(s.sigma_re_sq, 1800.0 * z.var_abs);
        assert_relative_eq!(s.sigma_im_sq, 1200.0 * z.var_abs);
        let full = beamform_stats(&z, 500, 500).unwrap();
        assert_eq!(full.sigma_im_sq, 0.0);
        assert!(beamform_stats(&z, 10, 11).is_err());
        assert!(beamform_stats(&z, 10, 0).is_err());
    }

    #[test]
    fn gamma_transforms_at_zero() {
        let s = beamform_stats(&zeta_moments(&RicianSpec::default()), 3000, 600).unwrap();
        let o = BeamOverlap::from_beamwidth(10.0).unwrap();
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(laplace_gamma_sr(zero, &s).value, Complex64::new(1.0, 0.0));
        assert_eq!(laplace_gamma_ir(zero, &s, &o).value, Complex64::new(1.0, 0.0));
        assert!((o.overlap_prob - 0.0278).abs() < 5e-5);
        let full = BeamOverlap::from_beamwidth(360.0).unwrap();
        let x = Complex64::new(1e-4, 2e-3);
        assert_eq!(laplace_gamma_ir(x, &s, &full).value, laplace_gamma_sr(x, &s).value);
        assert!(!laplace_gamma_sr(Complex64::new(-1.0, 0.0), &s).in_domain);
    }

    #[test]
    fn gamma_sr_degenerate_scatter() {
        let s = beamform_stats(&zeta_moments(&RicianSpec::default()), 100, 100).unwrap();
        let x = 0.003;
        let v = laplace_gamma_sr(Complex64::new(x, 0.0), &s).value.re;
        let a: f64 = 1.0 + 2.0 * x * s.sigma_re_sq;
        let expected = (-s.mu * s.mu * x / a).exp() / a.sqrt();
        assert_relative_eq!(v, expected, max_relative = 1e-13);
    }

    #[test]
    fn gamma_sr_derivative_is_mean() {
        let s = beamform_stats(&zeta_moments(&RicianSpec::default()), 3000, 600).unwrap();
        let h = 1e-9;
        let d = (laplace_gamma_sr(Complex64::new(h, 0.0), &s).value.re
            - laplace_gamma_sr(Complex64::new(-h, 0.0), &s).value.re)
            / (2.0 * h);
        assert_relative_eq!(-d, s.mean_gamma_sr(), max_relative = 1e-6);
    }

    #[test]
    fn gamma_sr_transform_matches_sampling() {
        let s = beamform_stats(&zeta_moments(&RicianSpec::default()), 3000, 600).unwrap();
        // Scale the argument so the expectation is O(1): E gamma ~ 2.2e5.
        let x = 0.1 / s.mean_gamma_sr();
        let mut rng = SmallRng::seed_from_u64(21);
        let n = 1_000_000;
        let (mut sum, mut sq) = (0.0, 0.0);
        for _ in 0..n {
            let v = (-x * sample_gamma_sr(&s, &mut rng)).exp();
            sum += v;
            sq += v * v;
        }
        let mean = sum / n as f64;
        let se = ((sq / n as f64 - mean * mean) / n as f64).sqrt();
        let a = laplace_gamma_sr(Complex64::new(x, 0.0), &s).value.re;
        assert!((mean - a).abs() < 3.0 * se, "{mean} vs {a} (se {se})");
    }

    #[test]
    fn eta_exact_degenerate_and_mean() {
        let spec = RicianSpec::default();
        let mut rng = SmallRng::seed_from_u64(4);
        for _ in 0..100 {
            let e = sample_eta_exact(&spec, 1, 1, &mut rng);
            assert!(e.re >= 0.0 && e.im == 0.0);
        }
        let z = zeta_moments(&spec);
        let (m, mo) = (300u32, 60u32);
        let n = 20_000;
        let (mut s_re, mut s_re2, mut s_im2) = (0.0, 0.0, 0.0);
        for _ in 0..n {
            let e = sample_eta_exact(&spec, m, mo, &mut rng);
            s_re += e.re;
            s_re2 += e.re * e.re;
            s_im2 += e.im * e.im;
        }
        let nf = n as f64;
        let mean = s_re / nf;
        let var_re = s_re2 / nf - mean * mean;
        let mu = mo as f64 * z.mean_abs;
        assert!((mean - mu).abs() < 3.0 * (var_re / nf).sqrt(), "{mean} vs {mu}");
        // Exact second moments: aligned elements add V|zeta|, scattered ones E|zeta|^2 / 2.
        let scattered = (m - mo) as f64 * z.second_moment / 2.0;
        let want_re = mo as f64 * z.var_abs + scattered;
        assert!((var_re / want_re - 1.0).abs() < 0.05, "{var_re} vs {want_re}");
        assert!((s_im2 / nf / scattered - 1.0).abs() < 0.05);
    }

    #[test]
    fn rician_sampler_moments() {
        let spec = RicianSpec::new(1.0, 2.0).unwrap();
        let mut rng = SmallRng::seed_from_u64(9);
        let n = 400_000;
        let (mut m1, mut m2) = (0.0, 0.0);
        for _ in 0..n {
            let a = spec.sample(&mut rng).norm();
            m1 += a;
            m2 += a * a;
        }
        let mean = m1 / n as f64;
        let var = m2 / n as f64 - mean * mean;
        assert!((mean - spec.mean_abs()).abs() < 4.0 * (var / n as f64).sqrt());
        assert!((m2 / n as f64 - 2.0).abs() < 0.02);
    }
}
