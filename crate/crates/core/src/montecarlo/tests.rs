use num_traits::Float as _;
use rand::rngs::SmallRng;
use rand::SeedableRng;

use super::*;
use crate::analytic::{mean_power_decomposition, NetworkModel, SystemParams};
use crate::Complex64;

fn rng(seed: u64) -> SmallRng {
    SmallRng::seed_from_u64(seed)
}

#[test]
fn windows_hold_tail_means() {
    let p = SystemParams::baseline();
    let sim = Simulator::new(&p).unwrap();
    let (dw, rw) = sim.windows();
    let (dt, rt) = sim.tail_means();
    let m = mean_power_decomposition(&p).unwrap();
    let total = m.direct_interference + m.reflected_interference;
    assert!(dw > 1000.0 && dw < 10_000.0, "{dw}");
    assert!(rw <= dw && rw > p.serving_distance, "{rw}");
    assert!(dt + rt <= DEFAULT_TAIL_BUDGET * total * 1.0001);
}

#[test]
fn interference_mean_matches_campbell() {
    let p = SystemParams::baseline();
    let sim = Simulator::new(&p).unwrap();
    let m = mean_power_decomposition(&p).unwrap();
    let mut r = rng(1);
    let (mut qi, mut qr, mut qs) = (Accumulator::default(), Accumulator::default(), Accumulator::default());
    for _ in 0..20_000 {
        let s = sim.sample(&mut r);
        qi.push(s.q_i);
        qr.push(s.q_i_reflected);
        qs.push(s.q_sr);
    }
    let total = m.direct_interference + m.reflected_interference;
    assert!(qi.estimate().covers(total, 4.0), "{:?} vs {total}", qi.estimate());
    assert!(qr.estimate().covers(m.reflected_interference, 4.0), "{:?} vs {}", qr.estimate(), m.reflected_interference);
    assert!(qs.estimate().covers(m.reflected_signal, 4.0), "{:?} vs {}", qs.estimate(), m.reflected_signal);
}

#[test]
fn coverage_matches_analytic() {
    let p = SystemParams::baseline();
    let sim = Simulator::new(&p).unwrap();
    let model = NetworkModel::new(&p).unwrap();
    let ts = [0.1, 1.0, 10.0];
    let est = estimate_coverage_curve(&sim, &ts, 20_000, &mut rng(2)).unwrap();
    for (e, &t) in est.iter().zip(&ts) {
        let a = model.coverage_probability(t).unwrap();
        assert!((e.mean - a).abs() <= (4.0 * e.std_error).max(0.01), "{t}: {e:?} vs {a}");
    }
}

#[test]
fn interference_transform_matches_analytic() {
    let p = SystemParams::baseline();
    let sim = Simulator::new(&p).unwrap();
    let model = NetworkModel::new(&p).unwrap();
    let rp = model.reference_power();
    for z in [0.5, 2.0] {
        let s = z / rp;
        let e = estimate_laplace(|r: &mut SmallRng| sim.sample_q_i(r).0, s, 20_000, &mut rng(3)).unwrap();
        let a = model.total_interference_laplace(Complex64::new(s, 0.0)).value.re;
        assert!(e.covers(a, 4.0), "{z}: {e:?} vs {a}");
    }
}

#[test]
fn reflected_signal_transform_matches_analytic() {
    let p = SystemParams::baseline();
    let sim = Simulator::new(&p).unwrap();
    let model = NetworkModel::new(&p).unwrap();
    let s = 0.05 / model.reference_power();
    let e = estimate_laplace(|r: &mut SmallRng| sim.sample_q_sr(r), -s, 20_000, &mut rng(4)).unwrap();
    let a = model.reflected_signal_laplace(Complex64::new(s, 0.0)).value.re;
    assert!(e.covers(a, 4.0), "{e:?} vs {a}");
}

#[test]
fn noise_only_limit() {
    let p = SystemParams {
        lambda_ris: 0.0,
        lambda_bs: 1e-12,
        ..SystemParams::baseline()
    };
    let sim = Simulator::new(&p).unwrap();
    let t = 1.0;
    let e = estimate_coverage(&sim, t, 20_000, &mut rng(5)).unwrap();
    let exact = (-t * p.noise_power / p.reference_power()).exp();
    assert!(e.covers(exact, 4.0), "{e:?} vs {exact}");
}

#[test]
fn sir_ignores_transmit_power() {
    let base = SystemParams {
        noise_power: 0.0,
        ..SystemParams::baseline()
    };
    let loud = SystemParams { p0: 10.0, ..base };
    let a = Simulator::new(&base).unwrap();
    let b = Simulator::new(&loud).unwrap();
    let (mut ra, mut rb) = (rng(6), rng(6));
    for _ in 0..200 {
        let (x, y) = (a.sample(&mut ra), b.sample(&mut rb));
        assert!((x.sinr / y.sinr - 1.0).abs() < 1e-9);
    }
}

#[test]
fn seeded_streams_are_reproducible() {
    let sim = Simulator::new(&SystemParams::baseline()).unwrap();
    let (mut a, mut b) = (rng(7), rng(7));
    for _ in 0..50 {
        assert_eq!(sim.sample(&mut a), sim.sample(&mut b));
    }
}

#[test]
fn coverage_is_one_minus_empirical_cdf() {
    let sim = Simulator::new(&SystemParams::baseline()).unwrap();
    let n = 500;
    let mut r = rng(8);
    let samples: alloc::vec::Vec<SinrSample> = (0..n).map(|_| sim.sample(&mut r)).collect();
    let est = estimate_coverage(&sim, 2.0, n, &mut rng(8)).unwrap();
    let below = samples.iter().filter(|s| s.sinr < 2.0).count();
    assert_eq!(est.mean, 1.0 - below as f64 / n as f64);
}

#[test]
fn rate_equals_integrated_empirical_coverage() {
    // int_0^inf 1[t <= x] / (1 + t) dt = ln(1 + x), so both sides agree sample by sample.
    let sim = Simulator::new(&SystemParams::baseline()).unwrap();
    let n = 300;
    let mut r = rng(9);
    let mut sinrs: alloc::vec::Vec<f64> = (0..n).map(|_| sim.sample(&mut r).sinr).collect();
    let rate = estimate_ergodic_rate(&sim, n, &mut rng(9)).unwrap();
    sinrs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut integral = 0.0;
    let mut prev = 0.0;
    for (i, &x) in sinrs.iter().enumerate() {
        let pc = (n - i) as f64 / n as f64;
        integral += pc * ((1.0 + x).ln() - (1.0 + prev).ln());
        prev = x;
    }
    assert!((integral - rate.mean).abs() < 1e-12, "{integral} vs {}", rate.mean);
}

#[test]
fn degenerate_rates() {
    assert_eq!(SinrSample::new(0.0, 0.0, 1.0, 0.0, 0.0).rate(), 0.0);
    let s = SinrSample::new(core::f64::consts::E - 1.0, 0.0, 1.0, 0.0, 0.0);
    assert!((s.rate() - 1.0).abs() < 1e-15);
}

#[test]
fn laplace_of_exponential() {
    use rand_distr::{Distribution, Exp1};
    let e = estimate_laplace(|r: &mut SmallRng| Exp1.sample(r), 1.0, 50_000, &mut rng(10)).unwrap();
    assert!(e.covers(0.5, 3.0), "{e:?}");
    let zero = estimate_laplace(|_: &mut SmallRng| 0.0, 3.0, 100, &mut rng(10)).unwrap();
    assert_eq!(zero.mean, 1.0);
    assert!(estimate_laplace(|_: &mut SmallRng| 0.0, 1.0, 99, &mut rng(10)).is_err());
}

#[test]
fn network_channels_satisfy_parseval() {
    let sim = Simulator::new(&SystemParams::baseline()).unwrap();
    let mut r = rng(11);
    for _ in 0..20 {
        let taps = sim.sample_channel(SAMPLING_INTERVAL, 4096, &mut r).unwrap();
        assert!(ofdm_parseval_check(&taps).rel_err < 1e-9);
    }
}
