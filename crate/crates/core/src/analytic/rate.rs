//! Ergodic rate as `int_0^inf P_c(t) / (1 + t) dt`.
//!
//! Substituting `v = ln(1 + t)` turns the integrand into `P_c(e^v - 1)`, which
//! starts at one and decays at least geometrically in `v` for any network with
//! a power-law interference field. Romberg extrapolation on an equispaced
//! grid in `v` is then accurate with few coverage evaluations, and each
//! refinement level is handed to the caller as one batch.

use alloc::vec::Vec;

#[allow(unused_imports)] // inherent float methods shadow it when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Target absolute accuracy of the rate in nats/s/Hz.
pub const RATE_TOLERANCE: f64 = 1e-5;

const INITIAL_STEP: f64 = 0.5;
const MAX_HALVINGS: usize = 3;
const NEGLIGIBLE: f64 = 1e-6;
const MAX_V: f64 = 80.0;
const BATCH: usize = 8;

/// Integrates with a batch evaluator of `P_c` at thresholds in linear scale.
/// The evaluator must return one result per requested threshold, in order.
pub fn integrate_rate<F>(mut coverage: F) -> Result<f64>
where
    F: FnMut(&[f64]) -> Vec<Result<f64>>,
{
    let mut eval = |vs: &[f64]| -> Result<Vec<f64>> {
        let ts: Vec<f64> = vs.iter().map(|v| v.exp_m1()).collect();
        let out = coverage(&ts);
        if out.len() != ts.len() {
            return Err(Error::domain("rate evaluator", "returned the wrong number of values"));
        }
        out.into_iter().collect()
    };

    // Coarse march until the integrand is negligible at two consecutive nodes.
    let h0 = INITIAL_STEP;
    let mut values = alloc::vec![1.0];
    let mut quiet = 0;
    while quiet < 2 {
        let start = values.len();
        if start as f64 * h0 > MAX_V {
            return Err(Error::Divergence {
                what: "ergodic rate",
                detail: alloc::format!("coverage still {} at t = {:e}", values[start - 1], (MAX_V).exp_m1()),
            });
        }
        let vs: Vec<f64> = (start..start + BATCH).map(|k| k as f64 * h0).collect();
        for p in eval(&vs)? {
            if quiet >= 2 {
                break;
            }
            values.push(p);
            quiet = if p < NEGLIGIBLE { quiet + 1 } else { 0 };
        }
    }
    // The tail beyond the last node is below 1e-6 and decays geometrically;
    // zero padding to a multiple of four intervals keeps Boole's rule usable.
    while (values.len() - 1) % 4 != 0 {
        values.push(0.0);
    }
    let intervals = values.len() - 1;
    let span = intervals as f64 * h0;

    let trapezoid = |f: &[f64], h: f64| -> f64 {
        let n = f.len() - 1;
        h * (0.5 * (f[0] + f[n]) + f[1..n].iter().sum::<f64>())
    };

    let mut table: Vec<Vec<f64>> = alloc::vec![alloc::vec![trapezoid(&values, h0)]];
    let mut h = h0;
    let mut best = table[0][0];
    let mut err = f64::INFINITY;
    for level in 1..=MAX_HALVINGS {
        h *= 0.5;
        let n = values.len() - 1;
        let mids: Vec<f64> = (0..n).map(|k| (2 * k + 1) as f64 * h).collect();
        let fresh = eval(&mids)?;
        let mut refined = Vec::with_capacity(2 * n + 1);
        for k in 0..n {
            refined.push(values[k]);
            refined.push(fresh[k]);
        }
        refined.push(values[n]);
        values = refined;
        debug_assert!((values.len() - 1) as f64 * h - span < 1e-9);

        let mut row = alloc::vec![trapezoid(&values, h)];
        let mut factor = 1.0;
        for j in 1..=level {
            factor *= 4.0;
            let prev = table[level - 1][j - 1];
            row.push(row[j - 1] + (row[j - 1] - prev) / (factor - 1.0));
        }
        err = (row[level] - table[level - 1][level - 1]).abs();
        best = row[level];
        table.push(row);
        // Two levels give Boole's rule; stop once it agrees with Simpson.
        if level >= 2 && err < RATE_TOLERANCE {
            break;
        }
    }
    if err > 100.0 * RATE_TOLERANCE {
        return Err(Error::NonConvergence {
            what: "ergodic rate",
            estimate: best,
            abs_error: err,
        });
    }
    Ok(best)
}
