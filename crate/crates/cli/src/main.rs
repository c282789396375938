//! `lpfnt`: index-set reports, fast Newton transforms, approximation studies
//! and active-subspace sensitivity scores from the command line.

mod commands;
mod config;
mod format;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lpfnt_core::Error;

use config::{CommandKind, Format, PValue, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "lpfnt", version, about = "Fast Newton transform on lp-degree index sets")]
struct Cli {
    /// Worker threads for transforms and Monte Carlo (default: all cores).
    #[arg(long, global = true, env = "LPFNT_THREADS")]
    threads: Option<usize>,

    /// Run the command described by a JSON file instead of flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args, Default)]
struct Shape {
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Exponent of the degree, a number in [0, inf] or `inf`.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
}

#[derive(Debug, Args, Default)]
struct Common {
    /// Node family: chebyshev_lobatto (default) or leja.
    #[arg(long)]
    nodes: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cardinality, density, bounds and entropy of A_{m,n,p}.
    Indexset {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        common: Common,
        /// Append the full index list to the report.
        #[arg(long)]
        dump: bool,
        /// Write the tube and entropy vectors as CSV.
        #[arg(long)]
        tubes_out: Option<PathBuf>,
    },
    /// Leja-ordered univariate nodes as a CSV column.
    Nodes {
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// The interpolation grid of A_{m,n,p}, one row per index.
    Grid {
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        common: Common,
    },
    /// Samples to Newton coefficients, or back with --inverse.
    Transform {
        /// Samples CSV, or a coefficient file (CSV or FNT1) with --inverse.
        input: PathBuf,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        common: Common,
        /// Use the dense triangular solve instead of the fast transform.
        #[arg(long)]
        naive: bool,
        #[arg(long)]
        inverse: bool,
    },
    /// Interpolate a model and report the RMSE on random test points.
    Approximate {
        #[arg(long)]
        model: Option<String>,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        common: Common,
        /// Number of uniform test points.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Degree range n1:n2, emitted for p in {1, 2, inf} unless --p is given.
        #[arg(long)]
        sweep: Option<String>,
    },
    /// Activity scores from the polynomial surrogate.
    Activity {
        #[arg(long)]
        model: Option<String>,
        #[command(flatten)]
        shape: Shape,
        #[command(flatten)]
        common: Common,
        /// Active dimension: gap, all or fixed:K.
        #[arg(long)]
        k: Option<String>,
        /// Monte Carlo reference with N samples and R replications, as N,R.
        #[arg(long)]
        mc: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a model or a coefficient file at the points of a CSV.
    Eval {
        /// Points CSV, one point per row.
        input: PathBuf,
        #[arg(long, conflicts_with = "coeffs")]
        model: Option<String>,
        /// Coefficient file (CSV or FNT1); points are then in [-1, 1]^m.
        #[arg(long)]
        coeffs: Option<PathBuf>,
        /// Points are given in [-1, 1]^m rather than physical units.
        #[arg(long)]
        reference: bool,
        #[arg(long)]
        m: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

impl RunConfig {
    fn shape(mut self, shape: Shape) -> Self {
        self.m = shape.m;
        self.n = shape.n;
        self.p = shape.p.map(PValue::Text);
        self
    }

    fn common(mut self, common: Common) -> Self {
        self.nodes = common.nodes;
        self.out = common.out;
        self.format = common.format;
        self
    }
}

impl From<Command> for RunConfig {
    fn from(command: Command) -> Self {
        match command {
            Command::Indexset {
                shape,
                common,
                dump,
                tubes_out,
            } => RunConfig {
                dump,
                tubes_out,
                ..RunConfig::new(CommandKind::Indexset)
            }
            .shape(shape)
            .common(common),
            Command::Nodes { n, common } => RunConfig {
                n,
                ..RunConfig::new(CommandKind::Nodes)
            }
            .common(common),
            Command::Grid { shape, common } => RunConfig::new(CommandKind::Grid).shape(shape).common(common),
            Command::Transform {
                input,
                shape,
                common,
                naive,
                inverse,
            } => RunConfig {
                input: Some(input),
                naive,
                inverse,
                ..RunConfig::new(CommandKind::Transform)
            }
            .shape(shape)
            .common(common),
            Command::Approximate {
                model,
                shape,
                common,
                samples,
                seed,
                sweep,
            } => RunConfig {
                model,
                samples,
                seed,
                sweep,
                ..RunConfig::new(CommandKind::Approximate)
            }
            .shape(shape)
            .common(common),
            Command::Activity {
                model,
                shape,
                common,
                k,
                mc,
                seed,
            } => RunConfig {
                model,
                k,
                mc,
                seed,
                ..RunConfig::new(CommandKind::Activity)
            }
            .shape(shape)
            .common(common),
            Command::Eval {
                input,
                model,
                coeffs,
                reference,
                m,
                common,
            } => RunConfig {
                input: Some(input),
                model,
                coeffs,
                reference,
                m,
                ..RunConfig::new(CommandKind::Eval)
            }
            .common(common),
        }
    }
}

/// Exit status of validation and usage failures; runtime failures exit 1.
const USAGE_EXIT: u8 = 2;

enum Failure {
    Usage(Error),
    Runtime(Error),
}

fn execute(cli: Cli) -> std::result::Result<(), Failure> {
    let mut cfg = match (cli.config, cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Failure::Usage(Error::Io(format!("{}: {e}", path.display()))))?;
            RunConfig::from_json(&text).map_err(Failure::Usage)?
        }
        (None, Some(command)) => RunConfig::from(command),
        _ => {
            return Err(Failure::Usage(Error::InvalidArgument(
                "give a subcommand or --config FILE".into(),
            )))
        }
    };
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    let job = cfg.validate().map_err(Failure::Usage)?;
    if let Some(threads) = cfg.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Runtime(Error::InvalidArgument(e.to_string())))?;
    }
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    commands::run(job, &cfg.out, &mut lock).map_err(Failure::Runtime)?;
    lock.flush().map_err(|e| Failure::Runtime(e.into()))
}

fn one_line(message: &str) -> String {
    message.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("error: usage: {}", one_line(first.trim_start_matches("error: ")));
            return ExitCode::from(USAGE_EXIT);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            ExitCode::from(USAGE_EXIT)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {}", one_line(&e.to_string()));
            ExitCode::FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn clap_definition() {
        Cli::command().debug_assert();
    }
}
