use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Parser, Subcommand, ValueEnum};

use lowrand::exploit::PredictorConfig;
use lowrand::{Rational, Scalar};
use lowrand_cli::commands::{self, Construction, Engine, Format, Outcome};
use lowrand_cli::experiments::ExperimentSpec;
use lowrand_cli::{default_out, load_game, parse_list, OUT_ENV};

#[derive(Parser)]
#[command(name = "lowrand", version, about = "Repeated games with limited randomness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Lines,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Lines => Format::Lines,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Folk,
    Stagewise,
    MpEps,
    ZerosumEps,
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Predictor,
    SeedLearner,
    Myopic,
}

#[derive(Subcommand)]
enum Command {
    /// Minmax levels, stage equilibria and minimal equilibrium entropy.
    Solve {
        #[arg(long)]
        game: String,
        /// Use floating point instead of exact rationals.
        #[arg(long)]
        float: bool,
    },
    /// Entropy of a strategy file, or the guarantee curve when no strategy is given.
    Entropy {
        #[arg(long)]
        game: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        strategy: Option<PathBuf>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Build an equilibrium profile of the n-stage game.
    Construct {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(long)]
        game: String,
        #[arg(long)]
        n: usize,
        /// Folk target payoff, e.g. `3,3`.
        #[arg(long)]
        target: Option<String>,
        #[arg(long)]
        eps: Option<String>,
        /// Index of the stage equilibrium for `stagewise`.
        #[arg(long, default_value_t = 0)]
        equilibrium: usize,
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
    },
    /// Exact exploitability and entropy report of a profile file.
    Certify {
        #[arg(long)]
        game: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        profile: PathBuf,
        /// Accept an eps-Nash verdict; anything worse exits with status 2.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long)]
        float: bool,
    },
    /// Sampled transcript of an exploitation engine against an opponent file.
    Exploit {
        #[arg(long)]
        game: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        opponent: PathBuf,
        #[arg(long, value_enum, default_value = "predictor")]
        engine: EngineArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        context_length: usize,
        /// Predictor confidence threshold, or the learner's distance threshold.
        #[arg(long)]
        threshold: Option<String>,
        #[arg(long, default_value_t = 3)]
        min_support: u32,
        #[arg(long)]
        single_shot: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Run a named experiment (or `all`, or `list`), writing CSV and a summary.
    Experiment {
        name: String,
        #[arg(long)]
        game: Option<String>,
        /// Comma-separated horizons.
        #[arg(long)]
        n: Option<String>,
        /// Comma-separated eps values.
        #[arg(long)]
        eps: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        target: Option<String>,
        /// Grid size, sample count or seed length, depending on the experiment.
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, env = OUT_ENV)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
}

fn one<T: Scalar>(text: &str) -> Result<T> {
    Ok(T::parse_scalar(text)?)
}

fn run(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Solve { game, float } => {
            if float {
                commands::solve(&load_game::<f64>(&game)?)
            } else {
                commands::solve(&load_game::<Rational>(&game)?)
            }
        }
        Command::Entropy { game, n, strategy, grid, format } => {
            commands::entropy(&load_game(&game)?, n, strategy.as_deref(), grid, format.into())
        }
        Command::Construct { kind, game, n, target, eps, equilibrium, out } => {
            let g = load_game::<Rational>(&game)?;
            let eps = || -> Result<Rational> {
                match &eps {
                    Some(e) => one(e),
                    None => bail!("--eps is required"),
                }
            };
            let what = match kind {
                Kind::Folk => {
                    let Some(t) = &target else { bail!("--target is required for folk") };
                    Construction::Folk { target: parse_list(t)? }
                }
                Kind::Stagewise => Construction::Stagewise { equilibrium },
                Kind::MpEps => Construction::MpEps { eps: eps()? },
                Kind::ZerosumEps => Construction::ZerosumEps { eps: eps()? },
            };
            commands::construct(&g, n, &what, &out.unwrap_or_else(default_out))
        }
        Command::Certify { game, n, profile, eps, float } => {
            if float {
                let e = eps.as_deref().map(one::<f64>).transpose()?;
                commands::certify_file(&load_game::<f64>(&game)?, n, &profile, e.as_ref())
            } else {
                let e = eps.as_deref().map(one::<Rational>).transpose()?;
                commands::certify_file(&load_game::<Rational>(&game)?, n, &profile, e.as_ref())
            }
        }
        Command::Exploit { game, n, opponent, engine, seed, context_length, threshold, min_support, single_shot, format } => {
            let g = load_game::<Rational>(&game)?;
            let engine = match engine {
                EngineArg::Predictor => {
                    let threshold = threshold.as_deref().map(one::<f64>).transpose()?.unwrap_or(0.75);
                    Engine::Predictor(PredictorConfig { context_length, threshold, min_support })
                }
                EngineArg::SeedLearner => Engine::SeedLearner {
                    threshold: threshold.as_deref().map(one::<Rational>).transpose()?.unwrap_or_default(),
                    single_shot,
                },
                EngineArg::Myopic => Engine::Myopic,
            };
            commands::exploit(&g, n, &opponent, &engine, seed, format.into())
        }
        Command::Experiment { name, game, n, eps, seed, target, size, out, format } => {
            if name == "list" {
                return Ok(Outcome { stdout: commands::list_experiments(), violation: false });
            }
            let horizons = n
                .map(|s| s.split(',').map(|x| x.trim().parse::<usize>()).collect::<Result<Vec<_>, _>>())
                .transpose()?;
            let spec = ExperimentSpec {
                name,
                game,
                horizons,
                eps: eps.as_deref().map(parse_list).transpose()?,
                seed,
                target: target.as_deref().map(parse_list).transpose()?,
                size,
            };
            commands::experiment(&spec, &out.unwrap_or_else(default_out), format.into())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            if outcome.violation {
                eprintln!("bound violated");
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
