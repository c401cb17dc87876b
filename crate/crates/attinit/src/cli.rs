//! `attinit` command line.

use std::path::PathBuf;

use attinit_core::Method;
use clap::{Args, Parser, Subcommand};

use crate::config::{list_cases, ExperimentSpec, DEFAULT_SWEEP_BIASES};
use crate::error::AppError;
use crate::runner;

#[derive(Debug, Parser)]
#[command(name = "attinit", version, about = "Attitude initialization and MEKF handoff experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a built-in case or a TOML experiment spec.
    Run {
        /// Built-in case name or path to a spec file.
        case: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Comma-separated methods: Optimal, OptimalPlusMekf, MekfOnly.
        #[arg(long, value_delimiter = ',')]
        methods: Option<Vec<String>>,
    },
    /// Run the initializer alone over several gyro-bias levels.
    Sweep {
        /// Comma-separated bias levels, deg/h.
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_SWEEP_BIASES)]
        biases: Vec<f64>,
        /// Base spec (built-in name or file).
        #[arg(long, default_value = "bias_sweep")]
        base: String,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// List the built-in cases.
    List,
    /// Print a spec in the config file format.
    Show { case: String },
}

#[derive(Debug, Args)]
pub struct Overrides {
    /// Base seed; run i uses seed + i.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of Monte Carlo runs.
    #[arg(long)]
    pub mc_runs: Option<usize>,
    /// Output directory (default: out/<case name>).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Overrides {
    fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(seed) = self.seed {
            spec.scenario.seed = seed;
        }
        if let Some(n) = self.mc_runs {
            spec.scenario.mc_runs = n;
        }
        if let Some(out) = &self.out {
            spec.outputs = out.clone();
        }
    }

    fn init_threads(&self) {
        if let Some(n) = self.threads {
            // a second call in the same process keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

pub fn parse_methods(names: &[String]) -> Result<Vec<Method>, AppError> {
    names
        .iter()
        .map(|n| n.parse::<Method>().map_err(|e| AppError::Config(format!("methods: '{n}': {e}"))))
        .collect()
}

/// Executes one command, writing human-readable progress to stdout.
pub fn execute(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::List => {
            print!("{}", list_cases());
            Ok(())
        }
        Command::Show { case } => {
            print!("{}", ExperimentSpec::resolve(&case)?.to_toml()?);
            Ok(())
        }
        Command::Run { case, overrides, methods } => {
            let mut spec = ExperimentSpec::resolve(&case)?;
            overrides.apply(&mut spec);
            if let Some(m) = methods {
                spec.methods = parse_methods(&m)?;
            }
            overrides.init_threads();
            let report = runner::run_case(&spec)?;
            println!("wrote {}", report.curves.display());
            println!("wrote {}", report.summary.display());
            if let Some(p) = &report.plot {
                println!("wrote {}", p.display());
            }
            let k = spec.scenario.handoff_epoch() - 1;
            for r in &report.results {
                println!(
                    "{:<16} mean error at t={} s: {:.6} deg, at end: {:.6} deg",
                    r.method.name(),
                    r.times[k],
                    r.mean_at(k),
                    r.mean_at(r.times.len() - 1)
                );
            }
            if report.failed_runs > 0 {
                return Err(AppError::Numerical { failed: report.failed_runs, total: report.total_runs });
            }
            Ok(())
        }
        Command::Sweep { biases, base, overrides } => {
            let mut spec = ExperimentSpec::resolve(&base)?;
            overrides.apply(&mut spec);
            overrides.init_threads();
            let report = runner::run_bias_sweep(&spec, &biases)?;
            println!("wrote {}", report.sweep.display());
            println!("wrote {}", report.summary.display());
            if let Some(p) = &report.plot {
                println!("wrote {}", p.display());
            }
            for row in &report.rows {
                println!(
                    "bias {:>8} deg/h: mean error at t={} s {:.6} deg (se {:.2e}, {} runs)",
                    row.bias_degph, row.t_s, row.mean_err_deg, row.std_err_deg, row.runs
                );
            }
            if report.failed_runs > 0 {
                return Err(AppError::Numerical { failed: report.failed_runs, total: report.total_runs });
            }
            Ok(())
        }
    }
}
