use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use twinsgame::bundle::Bundle;
use twinsgame::{load_config, report, run_to_dir, ConfigError, RunError};
use twinsgame_core::eval::santafe_true_msne;
use twinsgame_core::game::{generate_observations, sample_vendor_game};
use twinsgame_core::learn::learn_model_report;
use twinsgame_core::rng::{derive_seed, stream};
use twinsgame_core::trial::{evaluate_plans, plan_method};
use twinsgame_core::{Game, LearnConfig, Method, SantaFeSpec, SolverConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_TRIAL_FAILURES: u8 = 3;

#[derive(Parser)]
#[command(name = "twinsgame", version, about = "Learn, reduce, solve and evaluate clustered many-player games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Vendor,
    Santafe,
}

#[derive(Subcommand)]
enum Command {
    /// Create a bundle holding a new game.
    GenGame {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        agents: usize,
        #[arg(long, default_value_t = 2)]
        types: usize,
        #[arg(long, default_value_t = 2)]
        locations: usize,
        #[arg(long, default_value_t = 1.5)]
        sigma2: f64,
        #[arg(long, default_value_t = 0.5)]
        capacity: f64,
        /// Visit-with-room, visit-crowded and stay-home payoffs.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [4.0, -6.0, 0.0], allow_negative_numbers = true)]
        utilities: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Bundle directory to create.
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Add uniformly random observed profiles to a bundle.
    Simulate {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        observations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Learn a clustered payoff model from the bundle's observations.
    Learn {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 10)]
        restarts: usize,
        #[arg(long)]
        normalize: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve the reduced games of the listed methods and print the equilibria.
    Solve {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "twins-TSNE,kplayer-NE")]
        methods: Vec<Method>,
    },
    /// Simulate and score the plans of the listed methods.
    Evaluate {
        #[arg(long)]
        bundle: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "CLL,ALL,kplayer-NE,twins-TSNE")]
        methods: Vec<Method>,
        #[arg(long, default_value_t = 100)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a configured experiment and persist every trial.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Override a config entry, e.g. `--set trials=3 --set game.sigma2=0.5`.
        #[arg(long = "set")]
        overrides: Vec<String>,
        #[arg(long, short)]
        out: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
    /// Symmetric mixed equilibrium of the bar game.
    OracleMsne {
        #[arg(long)]
        agents: usize,
        #[arg(long, value_delimiter = ',', required = true)]
        capacity: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [4.0, -6.0, 0.0], allow_negative_numbers = true)]
        utilities: Vec<f64>,
    },
}

/// An error together with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

fn invalid(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_INVALID, error: error.into() }
}

fn failure(error: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_FAILURE, error: error.into() }
}

impl From<twinsgame::BundleError> for Failure {
    fn from(e: twinsgame::BundleError) -> Self {
        match e {
            twinsgame::BundleError::Io { .. } => failure(e),
            _ => invalid(e),
        }
    }
}

fn load(dir: &Path) -> Result<Bundle, Failure> {
    Bundle::load(dir).map_err(Failure::from)
}

fn santafe(agents: usize, capacity: f64, utilities: &[f64]) -> Result<SantaFeSpec, Failure> {
    SantaFeSpec::new(agents, capacity, (utilities[0], utilities[1], utilities[2])).map_err(invalid)
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::GenGame { family, agents, types, locations, sigma2, capacity, utilities, seed, out } => {
            let game = match family {
                Family::Vendor => {
                    Game::Vendor(sample_vendor_game(agents, types, locations, sigma2, &mut stream(seed, &[0])).map_err(invalid)?)
                }
                Family::Santafe => Game::Santafe(santafe(agents, capacity, &utilities)?),
            };
            let mut bundle = Bundle { game: Some(game), ..Bundle::default() };
            bundle.meta.seed = Some(seed);
            bundle.save(&out)?;
            println!("wrote {}", out.display());
        }
        Command::Simulate { bundle: dir, observations, seed } => {
            let mut bundle = load(&dir)?;
            let game = bundle.game.as_ref().ok_or_else(|| invalid(anyhow!("bundle has no game")))?;
            let obs = generate_observations(game, observations, &mut stream(seed, &[1])).map_err(invalid)?;
            bundle.observations = Some(obs);
            bundle.model = None;
            bundle.solutions.clear();
            bundle.evaluations.clear();
            bundle.save(&dir)?;
            println!("wrote {observations} observations to {}", dir.display());
        }
        Command::Learn { bundle: dir, k, restarts, normalize, seed } => {
            let mut bundle = load(&dir)?;
            let obs = bundle.observations.as_ref().ok_or_else(|| invalid(anyhow!("bundle has no observations")))?;
            let config = LearnConfig { k, restarts, normalize, ..LearnConfig::default() };
            let report = learn_model_report(obs, &config, &mut stream(seed, &[2])).map_err(invalid)?;
            println!(
                "k={k} sse={:.6} r2={:.6} best restart {} of {}",
                report.model.sse,
                report.model.r2,
                report.best_restart,
                report.restart_sse.len()
            );
            println!("clusters: {:?}", report.model.clustering.sizes());
            bundle.model = Some(report.model);
            bundle.solutions.clear();
            bundle.evaluations.clear();
            bundle.save(&dir)?;
        }
        Command::Solve { bundle: dir, methods } => {
            let mut bundle = load(&dir)?;
            let (game, obs) = game_and_obs(&bundle)?;
            let solver = SolverConfig::default();
            let mut solved = Vec::new();
            for method in methods {
                let planned = plan_method(method, game, obs, bundle.model.as_ref(), &solver).map_err(invalid)?;
                let Some(eqs) = planned.equilibria else {
                    println!("{method}: no reduced game to solve");
                    continue;
                };
                println!("{method}: {} equilibria{}", eqs.len(), if eqs.degenerate { " (degenerate)" } else { "" });
                println!("{}", serde_json::to_string_pretty(&eqs).map_err(failure)?);
                solved.push((method.to_string(), eqs));
            }
            bundle.solutions.extend(solved);
            bundle.save(&dir)?;
        }
        Command::Evaluate { bundle: dir, methods, iterations, seed } => {
            let mut bundle = load(&dir)?;
            let (game, obs) = game_and_obs(&bundle)?;
            let solver = SolverConfig::default();
            let mut outcomes = Vec::new();
            for (i, &method) in methods.iter().enumerate() {
                let planned = plan_method(method, game, obs, bundle.model.as_ref(), &solver).map_err(invalid)?;
                let outcome =
                    evaluate_plans(game, method, planned, iterations, derive_seed(seed, &[i as u64])).map_err(failure)?;
                let c = outcome.selected_candidate().expect("evaluated outcome has a selection");
                println!(
                    "{method}: payoff {:.4} regret {:.4} ({} candidate plans)",
                    c.summary.mean_payoff,
                    c.summary.mean_regret,
                    outcome.candidates.len()
                );
                outcomes.push(outcome);
            }
            bundle.evaluations.retain(|e| !methods.contains(&e.method));
            bundle.evaluations.extend(outcomes);
            bundle.save(&dir)?;
        }
        Command::Experiment { config, overrides, out, quiet } => {
            let config = load_config(&config, &overrides).map_err(|e| match e {
                ConfigError::Io { .. } => failure(e),
                _ => invalid(e),
            })?;
            let table = run_to_dir(&config, &out, |t| {
                if !quiet {
                    let status = if t.failed() { "with failures" } else { "ok" };
                    eprintln!("setting {} trial {} {status}", t.setting, t.trial);
                }
            })
            .map_err(|e| match e {
                RunError::Config(_) => invalid(e),
                _ => failure(e),
            })?;
            print!("{}", report::format_summary(&table.summary()));
            if table.has_failures() {
                eprintln!("some trials failed; see {}", out.join("results.csv").display());
                return Ok(ExitCode::from(EXIT_TRIAL_FAILURES));
            }
        }
        Command::OracleMsne { agents, capacity, utilities } => {
            println!("capacity\tp\tboundary");
            for c in capacity {
                let eq = santafe_true_msne(&santafe(agents, c, &utilities)?);
                println!("{c}\t{:.10}\t{}", eq.p, eq.boundary);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn game_and_obs(bundle: &Bundle) -> Result<(&Game, &twinsgame_core::ObservationSet), Failure> {
    let game = bundle.game.as_ref().context("bundle has no game").map_err(invalid)?;
    let obs = bundle.observations.as_ref().context("bundle has no observations").map_err(invalid)?;
    Ok((game, obs))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
