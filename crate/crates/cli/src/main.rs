use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rug::Float;

use seqrac::monte_carlo::RNG_ALGORITHM;
use seqrac::schedule::{find_omega, lambda_sequence, DEFAULT_EPSILON, SCHEDULE_PRECISION};
use seqrac_cli::config::{self, ConfigError};
use seqrac_cli::emit::big;
use seqrac_cli::manifest::RunManifest;
use seqrac_cli::reports::{self, Report, ThresholdGrid};
use seqrac_cli::verify;

const EXIT_FAILED: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "seqrac", version, about = "Sequential qubit random access codes with unsharp measurements")]
struct Cli {
    /// Directory for data files and the run manifest. Without it the
    /// selected format is printed to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical unsharpness for symmetric and sharp-first measurement pairs.
    Thresholds {
        /// Points on the unit arc (used unless --delta1 is given).
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Comma-separated Δ₁ values.
        #[arg(long, value_delimiter = ',')]
        delta1: Option<Vec<f64>>,
        /// Fixed Δ₂ for the --delta1 values; defaults to the unit arc.
        #[arg(long, requires = "delta1")]
        delta2: Option<f64>,
    },
    /// Quantum disc and classical simplex over a (Δ₁, Δ₂) grid.
    Region {
        #[arg(long, default_value_t = 51)]
        resolution: usize,
    },
    /// Unsharpness schedule for n receivers.
    Schedule {
        #[command(flatten)]
        params: ScheduleParams,
    },
    /// Distinguishabilities and success probabilities along a chain.
    Sequence {
        #[arg(long)]
        omega: f64,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Comma-separated unsharpness per receiver.
        #[arg(long, value_delimiter = ',', conflicts_with_all = ["n", "epsilon"])]
        lambdas: Option<Vec<f64>>,
        /// Take the lambdas from the n-receiver schedule instead.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Monte Carlo run of the protocol, compared with the analytic values.
    Simulate {
        /// TOML run description (see README).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's shot count.
        #[arg(long)]
        shots: Option<u64>,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Exact small-angle polynomial P_k and the expansion of c_k.
    Poly {
        #[arg(long)]
        k: usize,
    },
    /// Runs the invariant suite.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct ScheduleParams {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    r: f64,
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// A decimal angle (any exponent) or `auto`.
    #[arg(long, default_value = "auto")]
    omega: String,
}

enum Failure {
    Usage(String),
    Infeasible(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// What a command produced and how to describe it in the manifest.
struct Outcome {
    command: &'static str,
    params: BTreeMap<String, String>,
    rng: Option<&'static str>,
    report: Report,
    /// Nonzero exit status to report after writing outputs.
    status: Option<u8>,
}

fn params<const N: usize>(pairs: [(&str, String); N]) -> BTreeMap<String, String> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn parse_omega(text: &str, n: usize, r: f64, epsilon: f64) -> Result<Float, Failure> {
    if text == "auto" {
        return find_omega(n, r, epsilon).map_err(|e| Failure::Infeasible(e.to_string()));
    }
    let parsed = Float::parse(text).map_err(|e| usage(format!("--omega {text:?}: {e}")))?;
    Ok(Float::with_val(SCHEDULE_PRECISION, parsed))
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    let plain = |command, params, report| Outcome { command, params, rng: None, report, status: None };
    Ok(match &cli.command {
        Command::Thresholds { points, delta1, delta2 } => {
            let grid = match delta1 {
                Some(values) => ThresholdGrid::Values { delta1: values.clone(), delta2: *delta2 },
                None => ThresholdGrid::Arc { points: *points },
            };
            let p = match &grid {
                ThresholdGrid::Arc { points } => params([("grid", "arc".into()), ("points", points.to_string())]),
                ThresholdGrid::Values { delta1, delta2 } => params([
                    ("grid", "values".into()),
                    ("delta1", delta1.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")),
                    ("delta2", delta2.map_or("arc".into(), |d| d.to_string())),
                ]),
            };
            plain("thresholds", p, reports::thresholds(&grid).map_err(usage)?)
        }
        Command::Region { resolution } => {
            plain("region", params([("resolution", resolution.to_string())]), reports::region(*resolution).map_err(usage)?)
        }
        Command::Schedule { params: sp } => {
            let omega = parse_omega(&sp.omega, sp.n, sp.r, sp.epsilon)?;
            let report = reports::schedule(&omega, sp.r, sp.epsilon, sp.n).map_err(usage)?;
            let status = report.infeasible.then_some(EXIT_INFEASIBLE);
            let p = params([
                ("n", sp.n.to_string()),
                ("r", sp.r.to_string()),
                ("epsilon", sp.epsilon.to_string()),
                ("omega", big(&omega)),
                ("omega_requested", sp.omega.clone()),
            ]);
            Outcome { command: "schedule", params: p, rng: None, report, status }
        }
        Command::Sequence { omega, r, lambdas, n, epsilon } => {
            let lambdas = match (lambdas, n) {
                (Some(l), _) => l.clone(),
                (None, Some(n)) => {
                    let eps = epsilon.unwrap_or(DEFAULT_EPSILON);
                    let s = lambda_sequence(&Float::with_val(SCHEDULE_PRECISION, *omega), *r, eps, *n).map_err(usage)?;
                    if !s.is_feasible() {
                        return Err(Failure::Infeasible(format!("receiver {} has no valid unsharpness", s.first_failure().unwrap_or(*n))));
                    }
                    s.lambdas()
                }
                (None, None) => return Err(usage("give --lambdas or --n")),
            };
            let p = params([
                ("omega", omega.to_string()),
                ("r", r.to_string()),
                ("lambdas", lambdas.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")),
            ]);
            plain("sequence", p, reports::sequence(*omega, *r, &lambdas).map_err(usage)?)
        }
        Command::Simulate { config: path, shots, seed } => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
            let mut file = config::parse(&text).map_err(usage)?;
            if let Some(s) = shots {
                file.shots = *s;
            }
            if let Some(s) = seed {
                file.seed = *s;
            }
            let resolved = file.resolve().map_err(|e| match e {
                ConfigError::Invalid(_) => usage(e),
                ConfigError::Infeasible(_) => Failure::Infeasible(e.to_string()),
            })?;
            let report = reports::simulate(resolved.omega, resolved.r, &resolved.lambdas, resolved.shots, resolved.seed).map_err(usage)?;
            let p = params([
                ("omega", resolved.omega.to_string()),
                ("r", resolved.r.to_string()),
                ("lambdas", resolved.lambdas.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(",")),
                ("shots", resolved.shots.to_string()),
                ("seed", resolved.seed.to_string()),
                ("config", path.display().to_string()),
            ]);
            Outcome { command: "simulate", params: p, rng: Some(RNG_ALGORITHM), report, status: None }
        }
        Command::Poly { k } => plain("poly", params([("k", k.to_string())]), reports::poly(*k).map_err(usage)?),
        Command::Verify { seed } => {
            let doc = verify::run_suite(*seed);
            let status = (!doc.passed).then_some(EXIT_FAILED);
            Outcome {
                command: "verify",
                params: params([("seed", seed.to_string())]),
                rng: Some(RNG_ALGORITHM),
                report: verify::report(&doc),
                status,
            }
        }
    })
}

fn emit(cli: &Cli, outcome: &Outcome) -> anyhow::Result<()> {
    let report = &outcome.report;
    match &cli.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            let mut manifest = RunManifest::new(outcome.command, outcome.params.clone(), outcome.rng);
            manifest.write_output(dir, &format!("{}.csv", report.stem), &report.csv)?;
            manifest.write_output(dir, &format!("{}.json", report.stem), &report.json)?;
            manifest.write(dir)?;
            eprintln!("wrote {}.csv, {}.json and manifest.json to {}", report.stem, report.stem, dir.display());
        }
        None => {
            let bytes = match cli.format {
                Format::Csv => &report.csv,
                Format::Json => &report.json,
            };
            std::io::stdout().write_all(bytes)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_USAGE);
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            if let Err(e) = emit(&cli, &outcome) {
                eprintln!("error: {e:#}");
                return ExitCode::from(EXIT_FAILED);
            }
            if outcome.status == Some(EXIT_INFEASIBLE) {
                eprintln!("schedule is infeasible");
            }
            ExitCode::from(outcome.status.unwrap_or(0))
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Infeasible(m)) => {
            eprintln!("infeasible: {m}");
            ExitCode::from(EXIT_INFEASIBLE)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_FAILED)
        }
    }
}
