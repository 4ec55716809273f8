//! Positive-part extraction for a real random variable `Y` known through its
//! bilateral Laplace transform `B(s) = E[exp(-s Y)]`.
//!
//! With `Y+` the restriction of `Y` to `(0, inf)`,
//!
//! ```text
//! L_{Y+}(s) = E[exp(-s Y); Y > 0]
//!           = PV (1 / 2 pi i) int (B(s - iu) - B(-iu)) du / u + (1 + B(s)) / 2 - P[Y < 0].
//! ```
//!
//! Conjugate symmetry of `B` on the real axis folds the principal value onto
//! `(1 / pi) int_0^inf Im[B(s - iu) - B(-iu)] / u du`. Adding `P[Y < 0]` back gives
//! `E[exp(-s max(Y, 0))]`, which is what the coverage probability needs.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{gil_pelaez_cdf_at_zero, principal_value_folded, Estimate, QuadratureConfig, TransformValue};

/// A random variable described by its bilateral Laplace transform.
pub trait BilateralTransform {
    fn bilateral(&self, s: Complex64) -> TransformValue;
}

/// Adapter for closed-form transforms given as closures.
pub struct FnTransform<F>(pub F);

impl<F: Fn(Complex64) -> Complex64> BilateralTransform for FnTransform<F> {
    fn bilateral(&self, s: Complex64) -> TransformValue {
        TransformValue::inside((self.0)(s))
    }
}

impl<T: BilateralTransform + ?Sized> BilateralTransform for &T {
    fn bilateral(&self, s: Complex64) -> TransformValue {
        (**self).bilateral(s)
    }
}

/// The variable `Y / factor` for a positive `factor`: `B(s / factor)`.
///
/// Rescaling keeps the characteristic function varying on a unit scale, which
/// the fixed near-origin cutoff of the principal-value integral relies on.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<B> {
    pub inner: B,
    pub factor: f64,
}

impl<B: BilateralTransform> BilateralTransform for Scaled<B> {
    fn bilateral(&self, s: Complex64) -> TransformValue {
        self.inner.bilateral(s / self.factor)
    }
}

fn eval<B: BilateralTransform + ?Sized>(b: &B, s: Complex64) -> Result<Complex64> {
    b.bilateral(s).require("bilateral transform argument")
}

/// `P[Y < 0]` by Gil–Pelaez inversion of the characteristic function `B(-iu)`.
pub fn prob_negative<B: BilateralTransform + ?Sized>(b: &B, cfg: &QuadratureConfig) -> Result<Estimate<f64>> {
    let mut failure = None;
    let est = gil_pelaez_cdf_at_zero(
        |u| match eval(b, Complex64::new(0.0, -u)) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        },
        cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(Estimate {
        value: est.value.clamp(0.0, 1.0),
        ..est
    })
}

/// The folded principal-value term `(1/pi) int_0^inf Im[B(s - iu) - B(-iu)] / u du`.
pub fn principal_value_term<B: BilateralTransform + ?Sized>(b: &B, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let mut failure = None;
    let v = principal_value_folded(
        |u| {
            let a = eval(b, Complex64::new(s, -u));
            let c = eval(b, Complex64::new(0.0, -u));
            match (a, c) {
                (Ok(a), Ok(c)) => (a - c).im / (PI * u),
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        cfg,
    )?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(v)
}

/// `L_{Y+}(s) = E[exp(-s Y); Y > 0]`.
pub fn laplace_positive_part<B: BilateralTransform + ?Sized>(b: &B, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("positive-part argument", alloc::format!("s = {s} must be positive")));
    }
    let pv = principal_value_term(b, s, cfg)?;
    let bs = eval(b, Complex64::new(s, 0.0))?.re;
    let p = prob_negative(b, cfg)?.value;
    Ok(pv + 0.5 * (1.0 + bs) - p)
}

/// `E[exp(-s max(Y, 0))] = L_{Y+}(s) + P[Y < 0]`, computed without inverting `P[Y < 0]`.
pub fn positive_part_transform<B: BilateralTransform + ?Sized>(b: &B, s: f64, cfg: &QuadratureConfig) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::domain("positive-part argument", alloc::format!("s = {s} must be positive")));
    }
    let pv = principal_value_term(b, s, cfg)?;
    let bs = eval(b, Complex64::new(s, 0.0))?.re;
    Ok(pv + 0.5 * (1.0 + bs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn exponential_is_all_positive() {
        let cfg = QuadratureConfig::default();
        let b = FnTransform(|s: Complex64| c(1.0) / (s + 1.0));
        for s in [0.5, 1.0, 2.0] {
            let l = laplace_positive_part(&b, s, &cfg).unwrap();
            assert!((l - 1.0 / (1.0 + s)).abs() < 1e-5, "{s}: {l}");
        }
        assert!(prob_negative(&b, &cfg).unwrap().value < 1e-5);
    }

    #[test]
    fn symmetric_laplace_difference() {
        let cfg = QuadratureConfig::default();
        let b = FnTransform(|s: Complex64| c(1.0) / ((c(1.0) + s) * (c(1.0) - s)));
        // Half-Laplace on each side; the strip is |Re s| < 1.
        let l = laplace_positive_part(&b, 0.5, &cfg).unwrap();
        assert!((l - 1.0 / 3.0).abs() < 1e-6, "{l}");
        assert!((prob_negative(&b, &cfg).unwrap().value - 0.5).abs() < 1e-8);
    }

    #[test]
    fn negative_point_mass() {
        // Y = -2: B(s) = exp(2s). Nothing is positive.
        let cfg = QuadratureConfig {
            tail_cutoff: 1e4,
            max_subdivisions: 10_000,
            ..Default::default()
        };
        let b = FnTransform(|s: Complex64| (s * 2.0).exp());
        let l = laplace_positive_part(&b, 0.7, &cfg).unwrap();
        assert!(l.abs() < 1e-3, "{l}");
    }

    #[test]
    fn nonpositive_argument_is_rejected() {
        let b = FnTransform(|s: Complex64| c(1.0) / (s + 1.0));
        assert!(laplace_positive_part(&b, 0.0, &QuadratureConfig::default()).is_err());
        assert!(positive_part_transform(&b, -1.0, &QuadratureConfig::default()).is_err());
    }

    #[test]
    fn shifted_exponential_routes_agree() {
        // Y = E - 0.5 with E ~ Exp(1).
        let cfg = QuadratureConfig::default();
        let b = FnTransform(|s: Complex64| (s * 0.5).exp() / (s + 1.0));
        let s = 1.3;
        let a = laplace_positive_part(&b, s, &cfg).unwrap() + prob_negative(&b, &cfg).unwrap().value;
        let d = positive_part_transform(&b, s, &cfg).unwrap();
        let exact = (-0.5f64).exp() / (1.0 + s) + 1.0 - (-0.5f64).exp();
        assert!((d - exact).abs() < 1e-6, "{d} vs {exact}");
        assert!((a - d).abs() < 1e-5);
    }
}
