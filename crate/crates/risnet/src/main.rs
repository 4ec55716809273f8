use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use risnet::parallel::thread_pool;
use risnet::{load_config, run_experiment, write_csv, RunError, Suite, ValidationOptions};

#[derive(Parser)]
#[command(name = "risnet", version, about = "Coverage and rate of RIS-assisted cellular networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file and write CSV.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// CSV destination; defaults to the config's output_path, then stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        mc_samples: Option<usize>,
        /// Write 0 in the runtime_s column so reruns are byte-identical.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run the acceptance checks and print one line per criterion.
    Validate {
        /// Fewer samples and shorter grids.
        #[arg(long)]
        quick: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = thread_pool().install(|| match cli.command {
        Command::Run {
            config,
            output,
            seed,
            mc_samples,
            no_timing,
        } => run(config, output, seed, mc_samples, no_timing),
        Command::Validate { quick, seed } => validate(quick, seed),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(
    config: PathBuf,
    output: Option<PathBuf>,
    seed: Option<u64>,
    mc_samples: Option<usize>,
    no_timing: bool,
) -> Result<(), RunError> {
    let mut cfg = load_config(&config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = mc_samples {
        cfg.mc_samples = n;
    }
    if no_timing {
        cfg.record_runtime = false;
    }
    cfg.validate()?;
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let out = run_experiment(&cfg)?;
    match output.or(cfg.output_path.clone()) {
        Some(path) => {
            let file = File::create(&path).map_err(|e| RunError::Output(format!("{}: {e}", path.display())))?;
            write_csv(&out.rows, BufWriter::new(file))?;
        }
        None => write_csv(&out.rows, io::stdout().lock())?,
    }
    if out.failed_criteria > 0 {
        return Err(RunError::Acceptance {
            failed: out.failed_criteria,
        });
    }
    Ok(())
}

fn validate(quick: bool, seed: Option<u64>) -> Result<(), RunError> {
    let mut opts = if quick {
        ValidationOptions::quick()
    } else {
        ValidationOptions::full()
    };
    if let Some(s) = seed {
        opts.seed = s;
    }
    let suite = Suite::new(opts);
    let mut failed = 0;
    for id in 1..=11 {
        let report = suite.run(id);
        println!("{}", report.summary_line());
        for line in report.failure_details() {
            println!("{line}");
        }
        failed += !report.passed() as usize;
    }
    if failed > 0 {
        return Err(RunError::Acceptance { failed });
    }
    Ok(())
}
