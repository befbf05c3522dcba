use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use tscause::harness::{
    benchmark_network, cmd_detect, cmd_discover, cmd_score, cmd_simulate, load_network, og_claim_experiment,
    reports_to_tsv, type_error_experiment, DiscoverArgs, OgClaimReport, RunConfig, SimulateArgs, TypeErrorReport,
};
use tscause::hybrid::{DiscoverOptions, FocalMode, DEFAULT_MAX_COND};
use tscause::CausalModel;

/// Exit status when discovery finishes with conflicting orientations.
const EXIT_CONFLICTS: u8 = 3;

#[derive(Parser)]
#[command(name = "tscause", version, about = "Causal discovery from mechanism changes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a transition sequence from a network file.
    Simulate {
        #[arg(long)]
        network: PathBuf,
        /// Focal variable names in transition order (comma separated).
        #[arg(long, value_delimiter = ',')]
        focal: Vec<String>,
        /// Number of random focal variables when --focal is absent.
        #[arg(long, default_value_t = 0)]
        k: usize,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Chi-square change tags for every variable and transition.
    Detect {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, default_value_t = 0.01)]
        alpha: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Buckets, marked order graph, claims and the knowledge-guided CPDAG.
    Discover(DiscoverCli),
    /// Posterior over candidate diagrams.
    Score {
        #[arg(long)]
        manifest: PathBuf,
        /// One diagram per line, `A:;B:A` style.
        #[arg(long, conflicts_with = "exhaustive", required_unless_present = "exhaustive")]
        diagrams: Option<PathBuf>,
        /// Score every DAG on the variables (at most 5).
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 1.0)]
        ess: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Error-rate experiments on a network.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Args)]
struct DiscoverCli {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Ignore the manifest's focal names and identify focal buckets.
    #[arg(long)]
    identify_focal: bool,
    #[command(flatten)]
    influence: Influence,
    /// Exact marginals and d-separation from the manifest's truth models.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_COND)]
    max_cond: usize,
    #[arg(long, default_value = "discover-out")]
    out: PathBuf,
}

#[derive(Args, Clone, Copy)]
struct Influence {
    /// Treat every transition as influential (default).
    #[arg(long, overrides_with = "no_influential")]
    assume_influential: bool,
    /// Use only the inferences valid without influentiality.
    #[arg(long, overrides_with = "assume_influential")]
    no_influential: bool,
}

impl Influence {
    fn influential(self) -> bool {
        !self.no_influential
    }
}

#[derive(Args)]
struct Grid {
    /// Network file; the built-in 10-variable benchmark when absent.
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.1")]
    delta: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.01")]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "500")]
    n: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    runs: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Experiment {
    /// C2NC and NC2C rates of the change test.
    TypeErrors {
        #[command(flatten)]
        grid: Grid,
    },
    /// Order, NDP and edge claim errors of the marked order graph.
    OgClaims {
        #[command(flatten)]
        grid: Grid,
        #[arg(long, value_delimiter = ',', default_value = "5")]
        k: Vec<usize>,
        #[arg(long)]
        oracle: bool,
        #[arg(long)]
        identify_focal: bool,
        #[command(flatten)]
        influence: Influence,
    },
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn network(path: Option<&Path>) -> Result<CausalModel> {
    match path {
        Some(p) => Ok(load_network(p)?),
        None => Ok(benchmark_network()),
    }
}

fn configs(grid: &Grid, ks: &[usize], base: RunConfig) -> Vec<RunConfig> {
    let mut out = Vec::new();
    for &k in ks {
        for &delta in &grid.delta {
            for &alpha in &grid.alpha {
                for &n in &grid.n {
                    out.push(RunConfig {
                        k,
                        delta,
                        alpha,
                        n,
                        runs: grid.runs,
                        seed: grid.seed,
                        ..base
                    });
                }
            }
        }
    }
    out
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Simulate {
            network,
            focal,
            k,
            delta,
            n,
            seed,
            out,
        } => {
            let manifest = cmd_simulate(&SimulateArgs {
                network,
                focal,
                k,
                delta,
                n,
                seed,
                out,
            })?;
            println!("{}", manifest.display());
        }
        Command::Detect { manifest, alpha, out } => emit(out.as_deref(), &cmd_detect(&manifest, alpha)?)?,
        Command::Discover(d) => {
            let options = DiscoverOptions {
                focal: if d.identify_focal {
                    FocalMode::Identify
                } else {
                    FocalMode::Known
                },
                influential: d.influence.influential(),
                max_cond: d.max_cond,
            };
            let result = cmd_discover(&DiscoverArgs {
                manifest: d.manifest,
                alpha: d.alpha,
                options,
                oracle: d.oracle,
                out: d.out,
            })?;
            print!("{}", result.summary);
            if result.conflicts() > 0 {
                eprintln!("{} conflicting orientation(s) flagged", result.conflicts());
                return Ok(EXIT_CONFLICTS);
            }
        }
        Command::Score {
            manifest,
            diagrams,
            ess,
            out,
            ..
        } => {
            emit(out.as_deref(), &cmd_score(&manifest, diagrams.as_deref(), ess)?)?;
        }
        Command::Experiment(Experiment::TypeErrors { grid }) => {
            let model = network(grid.network.as_deref())?;
            let reports = configs(&grid, &[0], RunConfig::default())
                .iter()
                .map(|c| type_error_experiment(&model, c))
                .collect::<tscause::Result<Vec<_>>>()?;
            let tsv = reports_to_tsv(TypeErrorReport::TSV_HEADER, &reports, TypeErrorReport::tsv_row);
            emit(grid.out.as_deref(), &tsv)?;
        }
        Command::Experiment(Experiment::OgClaims {
            grid,
            k,
            oracle,
            identify_focal,
            influence,
        }) => {
            let model = network(grid.network.as_deref())?;
            let base = RunConfig {
                oracle,
                focal: if identify_focal {
                    FocalMode::Identify
                } else {
                    FocalMode::Known
                },
                influential: influence.influential(),
                ..RunConfig::default()
            };
            let reports = configs(&grid, &k, base)
                .iter()
                .map(|c| og_claim_experiment(&model, c))
                .collect::<tscause::Result<Vec<_>>>()?;
            let tsv = reports_to_tsv(OgClaimReport::TSV_HEADER, &reports, OgClaimReport::tsv_row);
            emit(grid.out.as_deref(), &tsv)?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
