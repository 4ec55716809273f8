//! Quadrature, principal values and characteristic-function inversion.

mod quadrature;

pub use quadrature::{
    gauss_kronrod_21, gauss_legendre, gauss_legendre_on, integrate_adaptive, integrate_panels, Estimate,
    QuadValue, QuadratureConfig,
};

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The value of a transform together with a flag telling whether the evaluation
/// point lies inside the region where the defining expectation converges.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformValue {
    pub value: Complex64,
    pub in_domain: bool,
}

impl TransformValue {
    pub fn new(value: Complex64, in_domain: bool) -> Self {
        TransformValue { value, in_domain }
    }

    pub fn inside(value: Complex64) -> Self {
        TransformValue { value, in_domain: true }
    }

    pub fn outside() -> Self {
        TransformValue {
            value: Complex64::new(f64::NAN, f64::NAN),
            in_domain: false,
        }
    }

    pub fn require(self, what: &'static str) -> Result<Complex64> {
        if self.in_domain {
            Ok(self.value)
        } else {
            Err(Error::domain(what, "evaluation point outside the strip of convergence"))
        }
    }
}

/// Cauchy principal value of `int_{-inf}^{inf} g(u) du`, for `g` with at most a
/// simple pole at the origin.
pub fn principal_value_integral<G: Fn(f64) -> f64>(g: G, cfg: &QuadratureConfig) -> Result<f64> {
    principal_value_folded(|u| g(u) + g(-u), cfg)
}

/// Principal value from the even part `f(u) = g(u) + g(-u)`, i.e. the limit of
/// `int_eps^inf f` as `eps -> 0`.
///
/// The integral is computed for `eps`, `eps/2` and `eps/4` and extrapolated to zero
/// with a three-point Richardson step. If the result depends on `eps` in a way
/// the polynomial model cannot absorb (a log divergence from an uncancelled pole)
/// the routine reports [`Error::Divergence`].
pub fn principal_value_folded<F: FnMut(f64) -> f64>(mut f: F, cfg: &QuadratureConfig) -> Result<f64> {
    let eps = cfg.pv_epsilon;
    if !(eps > 0.0) {
        return Err(Error::domain("pv_epsilon", alloc::format!("{eps}")));
    }
    let tail = integrate_panels(&mut f, eps, 1.0, cfg)?;
    let near = QuadratureConfig {
        abs_tol: cfg.abs_tol * 1e-2,
        ..*cfg
    };
    let s1 = integrate_adaptive(&mut f, 0.5 * eps, eps, &near)?.value;
    let s2 = s1 + integrate_adaptive(&mut f, 0.25 * eps, 0.5 * eps, &near)?.value;
    let i0 = tail.value;
    let i1 = i0 + s1;
    let i2 = i0 + s2;
    let r3 = i0 / 3.0 - 2.0 * i1 + 8.0 * i2 / 3.0;
    let r2 = 2.0 * i2 - i1;
    let scale = 1.0f64.max(r3.abs());
    if (r3 - r2).abs() > 1e-6 * scale + 100.0 * cfg.abs_tol {
        return Err(Error::Divergence {
            what: "principal value",
            detail: alloc::format!("extrapolants disagree: {r3:e} vs {r2:e}"),
        });
    }
    Ok(r3)
}

/// `P[X <= 0]` from the characteristic function `phi(u) = E[exp(i u X)]`:
/// `1/2 - (1/pi) int_0^inf Im phi(u) / u du`.
///
/// Valid when `X` has no atom at zero and a finite first moment.
pub fn gil_pelaez_cdf_at_zero<P: FnMut(f64) -> Complex64>(
    mut phi: P,
    cfg: &QuadratureConfig,
) -> Result<Estimate<f64>> {
    let est = integrate_panels(|u: f64| phi(u).im / u, 0.0, 1.0, cfg)?;
    Ok(Estimate {
        value: 0.5 - est.value / PI,
        abs_error: est.abs_error / PI,
        ..est
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pv_of_odd_pole_is_zero() {
        let cfg = QuadratureConfig::default();
        let v = principal_value_integral(|u| 1.0 / u * (-u * u).exp(), &cfg).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn pv_of_pole_with_smooth_part() {
        // PV int (1 + u) e^{-u^2} / u du = int e^{-u^2} du = sqrt(pi).
        let cfg = QuadratureConfig::default();
        let v = principal_value_integral(|u| (1.0 + u) * (-u * u).exp() / u, &cfg).unwrap();
        assert_relative_eq!(v, PI.sqrt(), max_relative = 1e-8);
    }

    #[test]
    fn pv_dirichlet_with_capped_tail() {
        // sin(u)/u has a slowly decaying oscillatory tail; with a cap the error is O(1/cap).
        let cfg = QuadratureConfig {
            tail_cutoff: 2e3,
            max_subdivisions: 5000,
            ..Default::default()
        };
        let v = principal_value_integral(|u| u.sin() / u, &cfg).unwrap();
        assert!((v - PI).abs() < 2e-3, "{v}");
    }

    #[test]
    fn pv_detects_even_pole() {
        let cfg = QuadratureConfig::default();
        let r = principal_value_integral(|u| (-u * u).exp() / u.abs(), &cfg);
        assert!(matches!(r, Err(Error::Divergence { .. })), "{r:?}");
    }

    #[test]
    fn gil_pelaez_standard_normal_shifted() {
        // X ~ N(m, 1): P[X <= 0] = Phi(-m).
        let cfg = QuadratureConfig::default();
        for (m, expected) in [(0.5, 0.308_537_538_725_986_9), (-1.0, 0.841_344_746_068_542_9)] {
            let p = gil_pelaez_cdf_at_zero(
                |u| Complex64::new(-0.5 * u * u, m * u).exp(),
                &cfg,
            )
            .unwrap();
            assert!((p.value - expected).abs() < 1e-9, "{} vs {expected}", p.value);
        }
    }

    #[test]
    fn transform_value_require() {
        assert!(TransformValue::outside().require("x").is_err());
        assert_eq!(TransformValue::inside(Complex64::new(1.0, 0.0)).require("x").unwrap().re, 1.0);
    }
}
