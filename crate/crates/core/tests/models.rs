use std::sync::OnceLock;

use proptest::prelude::*;
use risnet_core::analytic::{NetworkModel, SystemParams};
use risnet_core::variants::{VariantModel, VariantNetwork, VariantParams};

fn baseline() -> &'static NetworkModel {
    static MODEL: OnceLock<NetworkModel> = OnceLock::new();
    MODEL.get_or_init(|| NetworkModel::new(&SystemParams::baseline()).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn coverage_decreases_with_the_threshold(db in -10.0f64..15.0, step_db in 0.5f64..6.0) {
        let t1 = 10f64.powf(db / 10.0);
        let t2 = 10f64.powf((db + step_db) / 10.0);
        let m = baseline();
        let c1 = m.coverage_probability(t1).unwrap();
        let c2 = m.coverage_probability(t2).unwrap();
        prop_assert!((0.0..=1.0).contains(&c1) && (0.0..=1.0).contains(&c2));
        prop_assert!(c2 < c1, "P({t1}) = {c1}, P({t2}) = {c2}");
    }
}

#[test]
fn upsilon_positive_part_transform_is_one_at_the_origin() {
    let v = baseline().laplace_upsilon_plus(1e-9 / baseline().reference_power()).unwrap();
    let p = baseline().prob_upsilon_negative().unwrap().value;
    assert!((v + p - 1.0).abs() < 1e-5, "L = {v}, P = {p}");
}

#[test]
fn more_ris_elements_raise_coverage() {
    let small = SystemParams::baseline().with_elements(1000, 200).unwrap();
    let small = NetworkModel::new(&small).unwrap();
    for t in [0.3, 3.0] {
        let a = small.coverage_probability(t).unwrap();
        let b = baseline().coverage_probability(t).unwrap();
        assert!(b > a, "{t}: {a} vs {b}");
    }
}

#[test]
fn binomial_wedge_coverage_grows_with_the_ris_count() {
    let mut last = 0.0;
    for n in [0, 1, 2, 4] {
        let p = VariantParams::baseline().with_model(VariantModel::BppWedge { n });
        let c = VariantNetwork::new(&p).unwrap().coverage(1.0).unwrap();
        assert!(c > last, "n = {n}: {c} after {last}");
        last = c;
    }
}

#[test]
fn empty_deployment_has_no_gain() {
    let p = VariantParams::baseline().with_model(VariantModel::PppWedge { mean: 0.0 });
    let net = VariantNetwork::new(&p).unwrap();
    let with = net.coverage(1.0).unwrap();
    let without = net.coverage_without_ris(1.0).unwrap();
    assert!((with - without).abs() < 1e-9, "{with} vs {without}");
}
