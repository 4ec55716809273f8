use proptest::prelude::*;
use risnet_core::analytic::{laplace_positive_part, positive_part_transform, prob_negative, FnTransform};
use risnet_core::numerics::QuadratureConfig;
use risnet_core::Complex64;
use statrs::distribution::{ContinuousCDF, Gamma};

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `Y = X1 - a X2` with `X1, X2 ~ Exp(1)`: `B(s) = 1 / ((1 + s)(1 - a s))`.
fn exp_difference(a: f64) -> FnTransform<impl Fn(Complex64) -> Complex64> {
    FnTransform(move |s: Complex64| one() / ((one() + s) * (one() - s * a)))
}

/// `Y = G - c` with `G ~ Gamma(k, 1)`: `B(s) = exp(c s) / (1 + s)^k`.
fn shifted_gamma(k: f64, c: f64) -> FnTransform<impl Fn(Complex64) -> Complex64> {
    FnTransform(move |s: Complex64| (s * c).exp() / (one() + s).powf(k))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // P[X1 < a X2] = a / (1 + a); conditioned on Y > 0, Y is Exp(1).
    #[test]
    fn exponential_difference_matches_closed_form(a in 0.2f64..5.0, frac in 0.05f64..0.9) {
        let s = frac / a;
        let b = exp_difference(a);
        let cfg = QuadratureConfig::default();
        let p = prob_negative(&b, &cfg).unwrap().value;
        prop_assert!((p - a / (1.0 + a)).abs() < 1e-7, "P = {p}");
        let l = laplace_positive_part(&b, s, &cfg).unwrap();
        let expect = 1.0 / ((1.0 + a) * (1.0 + s));
        prop_assert!((l - expect).abs() < 1e-6, "L = {l}, expected {expect}");
        let total = positive_part_transform(&b, s, &cfg).unwrap();
        prop_assert!((total - (l + p)).abs() < 1e-6);
    }

    #[test]
    fn shifted_gamma_sign_probability_matches_its_cdf(k in 1.0f64..4.0, c in 0.5f64..5.0) {
        let p = prob_negative(&shifted_gamma(k, c), &QuadratureConfig::default()).unwrap().value;
        let expect = Gamma::new(k, 1.0).unwrap().cdf(c);
        prop_assert!((p - expect).abs() < 1e-6, "P = {p}, cdf = {expect}");
    }

    #[test]
    fn positive_part_transform_is_a_decreasing_probability_transform(a in 0.3f64..3.0, lo in 0.05f64..0.4, step in 0.05f64..0.4) {
        let b = exp_difference(a);
        let cfg = QuadratureConfig::default();
        let s1 = lo / a;
        let s2 = (lo + step) / a;
        let v1 = positive_part_transform(&b, s1, &cfg).unwrap();
        let v2 = positive_part_transform(&b, s2, &cfg).unwrap();
        prop_assert!(v1 <= 1.0 + 1e-9 && v2 >= -1e-9);
        prop_assert!(v2 <= v1 + 1e-9, "{v1} then {v2}");
    }
}

#[test]
fn positive_part_transform_tends_to_one_at_the_origin() {
    let cfg = QuadratureConfig::default();
    for a in [0.5, 1.0, 2.0] {
        let v = positive_part_transform(&exp_difference(a), 1e-7, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-5, "{a}: {v}");
    }
    let v = positive_part_transform(&shifted_gamma(2.5, 1.5), 1e-7, &cfg).unwrap();
    assert!((v - 1.0).abs() < 1e-5, "{v}");
}

#[test]
fn nonpositive_arguments_are_rejected() {
    let cfg = QuadratureConfig::default();
    let b = exp_difference(1.0);
    assert!(laplace_positive_part(&b, 0.0, &cfg).is_err());
    assert!(positive_part_transform(&b, -1.0, &cfg).is_err());
}
