//! Command-line front end for the simulation library.
//!
//! Exit codes: 0 success, 2 config validation failure, 3 round-solver
//! failure, 1 anything else.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qsim::config::{
    ExperimentConfig, MeasurementConfig, ModeConfig, ModelConfig, ObservableConfig,
    ProtocolConfig, TGridConfig,
};
use qsim::error::Error;
use qsim::experiment;

#[derive(Parser)]
#[command(
    name = "sim",
    about = "Stochastic Hamiltonian-simulation sweeps: exact, Trotter, qDRIFT, qSHIFT",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a JSON-configured experiment and write its CSV.
    Run {
        /// Path to the experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path (overrides the config's `output`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed override.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Reproduce the six-qubit benchmark error-scaling figure.
    ReproFig1 {
        /// Directory for the per-protocol CSVs and summary JSON.
        #[arg(long, default_value = "repro_fig1")]
        out_dir: PathBuf,
    },
    /// Power-law fit of a sweep CSV's abs_error column.
    Fit {
        /// Input CSV (as written by `run`/`sweep`).
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        t_min: Option<f64>,
        #[arg(long)]
        t_max: Option<f64>,
        /// Write the fit JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve and print one adaptive round distribution.
    DumpDist {
        /// Path to a qshift experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// 1-based round index.
        #[arg(long)]
        round: usize,
        /// Comma-separated 1-based draw history (empty for round 1).
        #[arg(long, default_value = "")]
        history: String,
        /// Write the JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Product-formula error sweep.
    Trotter {
        #[command(flatten)]
        common: SweepArgs,
        /// Formula order (1 or 2).
        #[arg(long, default_value_t = 1)]
        order: u8,
        /// Fold count N.
        #[arg(long, default_value_t = 1)]
        folds: usize,
    },
    /// Fixed-distribution sampling error sweep.
    Qdrift {
        #[command(flatten)]
        common: SweepArgs,
        /// Total sampled operators N.
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Adaptive quasi-probability sampling error sweep.
    Qshift {
        #[command(flatten)]
        common: SweepArgs,
        /// Total sampled operators N.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Draws per round r (N must be a multiple).
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// Explicit per-round draw counts, e.g. "1,2" (overrides --n/--r).
        #[arg(long)]
        schedule: Option<String>,
    },
    /// Generic sweep with the protocol chosen by flag.
    Sweep {
        #[command(flatten)]
        common: SweepArgs,
        /// One of: exact, trotter, qdrift, qshift.
        #[arg(long)]
        protocol: String,
        #[arg(long, default_value_t = 1)]
        order: u8,
        #[arg(long, default_value_t = 1)]
        folds: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long)]
        schedule: Option<String>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Chain length (2..=12).
    #[arg(long, default_value_t = 6)]
    qubits: usize,
    /// ZZ coupling weight J.
    #[arg(long, default_value_t = 1.0)]
    coupling: f64,
    /// Transverse-field weight h.
    #[arg(long, default_value_t = 0.1)]
    field: f64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long, default_value_t = 0.02)]
    t_min: f64,
    #[arg(long, default_value_t = 0.4)]
    t_max: f64,
    #[arg(long, default_value_t = 12)]
    points: usize,
    /// Linear rather than log spacing of the t grid.
    #[arg(long)]
    linear: bool,
    /// Monte-Carlo sample count (omit for exact ensemble evaluation).
    #[arg(long)]
    samples: Option<usize>,
    /// Per-sample shot count (implies Monte-Carlo measurement by shots).
    #[arg(long)]
    shots: Option<usize>,
    /// Output CSV path.
    #[arg(long, default_value = "sweep.csv")]
    out: PathBuf,
}

impl SweepArgs {
    fn to_config(&self, protocol: ProtocolConfig) -> ExperimentConfig {
        let mode = match (self.samples, self.shots) {
            (None, None) => ModeConfig::Ensemble,
            (samples, shots) => ModeConfig::MonteCarlo {
                samples: samples.unwrap_or(10_000),
                measurement: match shots {
                    Some(k) => MeasurementConfig::Shots { k },
                    None => MeasurementConfig::Exact,
                },
            },
        };
        ExperimentConfig {
            model: ModelConfig::Tfim {
                n: self.qubits,
                j: self.coupling,
                h: self.field,
            },
            observable: ObservableConfig::SumZ,
            seed: self.seed,
            protocol,
            t_grid: TGridConfig {
                min: self.t_min,
                max: self.t_max,
                count: self.points,
                log_spaced: !self.linear,
            },
            mode,
            output: Some(self.out.to_string_lossy().into_owned()),
        }
    }
}

fn parse_schedule(text: &str) -> Result<Vec<usize>, Error> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::Config(format!("bad schedule entry '{s}'")))
        })
        .collect()
}

fn qshift_protocol(n: usize, r: usize, schedule: &Option<String>) -> Result<ProtocolConfig, Error> {
    match schedule {
        Some(text) => Ok(ProtocolConfig::Qshift {
            n: None,
            r: None,
            schedule: Some(parse_schedule(text)?),
        }),
        None => Ok(ProtocolConfig::Qshift {
            n: Some(n),
            r: Some(r),
            schedule: None,
        }),
    }
}

fn write_or_print(json: String, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, json).map_err(Error::from),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn execute(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { config, out, seed } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            let path = experiment::run(&cfg, out.as_deref())?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::ReproFig1 { out_dir } => {
            let summary = experiment::repro_fig1(&out_dir)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            for p in &summary.protocols {
                eprintln!(
                    "{}: exponent {:.4} (expected {} ± {}), R² {:.6} → {}",
                    p.name,
                    p.exponent,
                    p.expected_exponent,
                    p.tolerance,
                    p.r_squared,
                    if p.pass { "pass" } else { "FAIL" }
                );
            }
            if summary.all_pass {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::FAILURE)
            }
        }
        Command::Fit {
            input,
            t_min,
            t_max,
            out,
        } => {
            let fit = experiment::fit_csv(&input, t_min, t_max)?;
            write_or_print(serde_json::to_string_pretty(&fit)?, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::DumpDist {
            config,
            round,
            history,
            out,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let cfg = ExperimentConfig::from_json(&text)?;
            let letters = parse_schedule(&history)?;
            let dump = experiment::dump_distribution(&cfg, round, &letters)?;
            write_or_print(serde_json::to_string_pretty(&dump)?, out.as_ref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Trotter {
            common,
            order,
            folds,
        } => {
            let cfg = common.to_config(ProtocolConfig::Trotter { order, folds });
            let path = experiment::run(&cfg, None)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Qdrift { common, n } => {
            let cfg = common.to_config(ProtocolConfig::Qdrift { n });
            let path = experiment::run(&cfg, None)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Qshift {
            common,
            n,
            r,
            schedule,
        } => {
            let cfg = common.to_config(qshift_protocol(n, r, &schedule)?);
            let path = experiment::run(&cfg, None)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            common,
            protocol,
            order,
            folds,
            n,
            r,
            schedule,
        } => {
            let protocol = match protocol.as_str() {
                "exact" => ProtocolConfig::Exact,
                "trotter" => ProtocolConfig::Trotter { order, folds },
                "qdrift" => ProtocolConfig::Qdrift { n },
                "qshift" => qshift_protocol(n, r, &schedule)?,
                other => {
                    return Err(Error::Config(format!(
                        "unknown protocol '{other}' (expected exact|trotter|qdrift|qshift)"
                    )))
                }
            };
            let cfg = common.to_config(protocol);
            let path = experiment::run(&cfg, None)?;
            eprintln!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
