use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use risnet_core::analytic::{mean_power_decomposition, NetworkModel};
use risnet_core::montecarlo::{Accumulator, EstimateWithCI, SinrSample, Simulator};
use risnet_core::variants::{VariantNetwork, VariantParams, VariantSimulator};
use serde::Serialize;

use crate::config::{ConfigError, ExperimentConfig, PointConfig, Scenario};
use crate::parallel::map_chunks;
use crate::validation::{Suite, ValidationOptions};

/// One CSV row. Column order is the field order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub analytic: f64,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub runtime_s: f64,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error(
        "parameters at sweep value {sweep_value} are outside the convergence strip of the \
         reflected-signal transform (bound {:.4}, must stay below 0.5)",
        0.5 - .margin
    )]
    Infeasible { sweep_value: f64, margin: f64 },
    #[error("evaluation failed at sweep value {sweep_value}: {source}")]
    Model {
        sweep_value: f64,
        source: risnet_core::Error,
    },
    #[error("{failed} validation criteria failed")]
    Acceptance { failed: usize },
    #[error("cannot write output: {0}")]
    Output(String),
}

impl RunError {
    /// Process exit code: 1 for failed checks or evaluations, 2 for config
    /// errors, 3 for infeasible parameters.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Infeasible { .. } => 3,
            RunError::Model { .. } | RunError::Acceptance { .. } | RunError::Output(_) => 1,
        }
    }
}

/// Rows of an experiment and the number of failed validation criteria.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub rows: Vec<ResultRow>,
    pub failed_criteria: usize,
}

/// Evaluates every sweep point. Points run concurrently; rows come back in
/// sweep order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunOutput, RunError> {
    if cfg.scenario == Scenario::Validate {
        return Ok(run_validation(cfg));
    }
    let labels: Vec<f64> = match &cfg.sweep {
        Some(s) => s.points.iter().map(|p| p.label).collect(),
        None => vec![0.0],
    };
    let points = cfg.points();
    let rows = points
        .par_iter()
        .zip(labels.par_iter())
        .map(|(pt, &label)| {
            let start = Instant::now();
            let (analytic, mc) = evaluate(cfg, pt, label)?;
            Ok(ResultRow {
                sweep_value: label,
                analytic,
                mc_mean: mc.mean,
                mc_se: mc.std_error,
                runtime_s: if cfg.record_runtime { start.elapsed().as_secs_f64() } else { 0.0 },
            })
        })
        .collect::<Result<Vec<_>, RunError>>()?;
    Ok(RunOutput {
        rows,
        failed_criteria: 0,
    })
}

fn run_validation(cfg: &ExperimentConfig) -> RunOutput {
    let opts = ValidationOptions {
        seed: cfg.seed,
        mc_samples: cfg.mc_samples,
        ..ValidationOptions::full()
    };
    let suite = Suite::new(opts);
    let mut rows = Vec::new();
    let mut failed = 0;
    for report in suite.run_all() {
        println!("{}", report.summary_line());
        for line in report.failure_details() {
            println!("{line}");
        }
        failed += !report.passed() as usize;
        let per_check = report.seconds / report.checks.len().max(1) as f64;
        for c in &report.checks {
            rows.push(ResultRow {
                sweep_value: report.id as f64,
                analytic: c.observed,
                mc_mean: c.reference,
                mc_se: c.se,
                runtime_s: if cfg.record_runtime { per_check } else { 0.0 },
            });
        }
    }
    RunOutput {
        rows,
        failed_criteria: failed,
    }
}

fn model_error(sweep_value: f64) -> impl Fn(risnet_core::Error) -> RunError {
    move |e| match e {
        risnet_core::Error::Infeasible { margin } => RunError::Infeasible { sweep_value, margin },
        source => RunError::Model { sweep_value, source },
    }
}

/// Analytic value and Monte Carlo estimate of one sweep point.
fn evaluate(cfg: &ExperimentConfig, pt: &PointConfig, label: f64) -> Result<(f64, EstimateWithCI), RunError> {
    let fail = model_error(label);
    if cfg.scenario == Scenario::Fig8 {
        let v = pt.variant(cfg.scenario, &cfg.element_budget)?;
        return evaluate_variant(cfg, &v, label);
    }
    let p = pt.system(cfg.scenario, &cfg.element_budget)?;
    let model = NetworkModel::new(&p).map_err(&fail)?;
    let bound = model.convergence_bound();
    if !bound.feasible {
        return Err(RunError::Infeasible {
            sweep_value: label,
            margin: bound.margin,
        });
    }
    let sim = Simulator::with_tail_budget(&p, pt.params.tail_budget)
        .map_err(&fail)?
        .with_mode(pt.params.gamma_sr_mode());
    let n = cfg.mc_samples;
    match cfg.scenario {
        Scenario::Coverage => {
            let analytic = model.coverage_probability(p.threshold).map_err(&fail)?;
            let hits: u64 = map_chunks(n, cfg.seed, |rng, len| {
                (0..len).filter(|_| sim.sample(rng).covered(p.threshold)).count() as u64
            })
            .into_iter()
            .sum();
            Ok((analytic, EstimateWithCI::binomial(hits, n as u64)))
        }
        Scenario::Rate | Scenario::Fig6 | Scenario::Fig7 => {
            let analytic = model.ergodic_rate().map_err(&fail)?;
            Ok((analytic, mc_rate(&sim, n, cfg.seed)))
        }
        Scenario::Fig5 => {
            let analytic = mean_power_decomposition(&p).map_err(&fail)?.reflected_fraction();
            Ok((analytic, mc_reflected_share(&sim, n, cfg.seed)))
        }
        Scenario::Fig8 | Scenario::Validate => unreachable!("handled above"),
    }
}

fn evaluate_variant(cfg: &ExperimentConfig, v: &VariantParams, label: f64) -> Result<(f64, EstimateWithCI), RunError> {
    let fail = model_error(label);
    let net = VariantNetwork::new(v).map_err(&fail)?;
    let bound = net.convergence_bound();
    if !bound.feasible {
        return Err(RunError::Infeasible {
            sweep_value: label,
            margin: bound.margin,
        });
    }
    let analytic = net.relative_gain().map_err(&fail)?;
    let sim = VariantSimulator::new(v).map_err(&fail)?;
    // Paired samples: the same realisation with and without its RISs.
    let parts = map_chunks(cfg.mc_samples, cfg.seed, |rng, len| {
        let mut r = Ratio::default();
        for _ in 0..len {
            let s = sim.sample(rng);
            let without = SinrSample::new(s.q_sd, 0.0, s.q_i, 0.0, s.noise);
            r.push(s.rate(), without.rate());
        }
        r
    });
    Ok((analytic, Ratio::merged(parts).estimate()))
}

fn mc_rate(sim: &Simulator, n: usize, seed: u64) -> EstimateWithCI {
    let mut acc = Accumulator::default();
    for part in map_chunks(n, seed, |rng, len| {
        let mut a = Accumulator::default();
        (0..len).for_each(|_| a.push(sim.sample(rng).rate()));
        a
    }) {
        acc.merge(&part);
    }
    acc.estimate()
}

/// `E[Q_IR] / E[Q_I]` from interference samples.
fn mc_reflected_share(sim: &Simulator, n: usize, seed: u64) -> EstimateWithCI {
    let parts = map_chunks(n, seed, |rng, len| {
        let mut r = Ratio::default();
        for _ in 0..len {
            let (total, reflected) = sim.sample_q_i(rng);
            r.push(reflected, total);
        }
        r
    });
    Ratio::merged(parts).estimate()
}

/// Ratio of means `E[X] / E[Y]` of paired samples, with a delta-method
/// standard error.
#[derive(Debug, Clone, Copy, Default)]
struct Ratio {
    n: u64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Ratio {
    fn push(&mut self, x: f64, y: f64) {
        self.n += 1;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    fn merged(parts: Vec<Ratio>) -> Ratio {
        parts.into_iter().fold(Ratio::default(), |a, b| Ratio {
            n: a.n + b.n,
            sx: a.sx + b.sx,
            sy: a.sy + b.sy,
            sxx: a.sxx + b.sxx,
            syy: a.syy + b.syy,
            sxy: a.sxy + b.sxy,
        })
    }

    fn estimate(&self) -> EstimateWithCI {
        let n = self.n as f64;
        let (mx, my) = (self.sx / n, self.sy / n);
        let r = mx / my;
        // Sample variance of x - r y.
        let var = ((self.sxx - 2.0 * r * self.sxy + r * r * self.syy) - n * (mx - r * my).powi(2)) / (n - 1.0);
        EstimateWithCI {
            mean: r,
            std_error: (var.max(0.0) / n).sqrt() / my.abs(),
            n: self.n,
        }
    }
}

/// Writes the rows with a header line.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), RunError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(|e| RunError::Output(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(["sweep_value", "analytic", "mc_mean", "mc_se", "runtime_s"])
            .map_err(|e| RunError::Output(e.to_string()))?;
    }
    w.flush().map_err(|e| RunError::Output(e.to_string()))
}
