use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use risnet_core::analytic::SystemParams;
use risnet_core::montecarlo::{ofdm_parseval_check, Accumulator, EstimateWithCI, Simulator};

fn accumulate(xs: &[f64]) -> Accumulator {
    let mut a = Accumulator::default();
    xs.iter().for_each(|&x| a.push(x));
    a
}

proptest! {
    #[test]
    fn merging_accumulators_is_associative(
        a in prop::collection::vec(-1e3f64..1e3, 0..40),
        b in prop::collection::vec(-1e3f64..1e3, 0..40),
        c in prop::collection::vec(-1e3f64..1e3, 0..40),
    ) {
        let (x, y, z) = (accumulate(&a), accumulate(&b), accumulate(&c));
        let mut left = x;
        left.merge(&y);
        left.merge(&z);
        let mut yz = y;
        yz.merge(&z);
        let mut right = x;
        right.merge(&yz);
        prop_assert_eq!(left.n, right.n);
        prop_assert!((left.sum - right.sum).abs() <= 1e-9 * (1.0 + left.sum.abs()));
        prop_assert!((left.sum_sq - right.sum_sq).abs() <= 1e-9 * (1.0 + left.sum_sq));

        let all: Vec<f64> = a.iter().chain(&b).chain(&c).copied().collect();
        let whole = accumulate(&all);
        prop_assert_eq!(whole.n, left.n);
        prop_assert!((whole.sum - left.sum).abs() <= 1e-9 * (1.0 + whole.sum.abs()));
    }

    #[test]
    fn binomial_error_is_bounded(k in 0u64..1000, extra in 1u64..1000) {
        let n = k + extra;
        let e = EstimateWithCI::binomial(k, n);
        prop_assert!((0.0..=1.0).contains(&e.mean));
        prop_assert!(e.std_error <= 0.5 / (n as f64).sqrt() + 1e-15);
        prop_assert!(e.covers(e.mean, 0.0));
    }
}

#[test]
fn accumulator_matches_two_pass_moments() {
    let xs = [0.5, 1.5, 2.0, 7.25, -3.0, 4.0];
    let e = accumulate(&xs).estimate();
    let mean = xs.iter().sum::<f64>() / 6.0;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
    assert_relative_eq!(e.mean, mean, max_relative = 1e-14);
    assert_relative_eq!(e.std_error, (var / 6.0).sqrt(), max_relative = 1e-12);
}

#[test]
fn network_channels_conserve_energy_across_subcarriers() {
    let sim = Simulator::new(&SystemParams::baseline()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..20 {
        let taps = sim.sample_channel(1e-7, 4096, &mut rng).unwrap();
        let check = ofdm_parseval_check(&taps);
        assert!(check.rhs > 0.0);
        assert!(check.rel_err < 1e-9, "{check:?}");
    }
}

#[test]
fn simulation_is_reproducible_from_the_seed() {
    let sim = Simulator::new(&SystemParams::baseline()).unwrap();
    let draw = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..50).map(|_| sim.sample(&mut rng).rate()).collect::<Vec<_>>()
    };
    assert_eq!(draw(5), draw(5));
    assert_ne!(draw(5), draw(6));
}
