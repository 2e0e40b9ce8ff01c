use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use routing_games_cli::runner::{self, Overrides, RunError};
use routing_games_cli::scenario::{DocSpec, NetworkSpec, Scenario, SolverKnobs, Task};
use routing_games_cli::reproduction;

/// Solvers and efficiency metrics for atomic splittable routing games on
/// load-balancing networks.
#[derive(Parser)]
#[command(name = "routing-games", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write the result bundle.
    Run {
        /// Scenario file (TOML).
        scenario: PathBuf,
        /// Output directory for the bundle.
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        knobs: KnobArgs,
    },
    /// Run the built-in reproduction suite of reference results.
    ReproducePaper {
        /// Output directory for the report and tables.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the indexed network family and emit one CSV table.
    Sweep {
        #[arg(long)]
        m_from: u32,
        #[arg(long)]
        m_to: u32,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        players: usize,
        #[arg(long, default_value_t = 0.1)]
        delta0: f64,
        #[arg(long, default_value_t = 2.0)]
        c0: f64,
        #[arg(long, default_value_t = 0.1)]
        base_latency: f64,
        #[arg(long, default_value_t = 1.0)]
        demand: f64,
        #[command(flatten)]
        knobs: KnobArgs,
    },
}

#[derive(Args)]
struct KnobArgs {
    /// Fixed-point tolerance on flows for the dynamics.
    #[arg(long)]
    eps_fp: Option<f64>,
    /// Equilibrium tolerance on perceived cost.
    #[arg(long)]
    eps_eq: Option<f64>,
    /// Round cap for the dynamics.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Grid step for the brute-force oracle.
    #[arg(long)]
    grid_step: Option<f64>,
    /// Best-response update order, e.g. --player-order 1,0.
    #[arg(long, value_delimiter = ',')]
    player_order: Option<Vec<usize>>,
    /// Seed for randomized verifier starts.
    #[arg(long)]
    seed: Option<u64>,
}

impl From<KnobArgs> for Overrides {
    fn from(args: KnobArgs) -> Self {
        Overrides {
            eps_fixed_point: args.eps_fp,
            eps_equilibrium: args.eps_eq,
            max_rounds: args.max_iter,
            grid_step: args.grid_step,
            player_order: args.player_order,
            seed: args.seed,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { scenario, out, knobs } => {
            match runner::run_scenario_file(&scenario, &out, &knobs.into()) {
                Ok(summary) => {
                    for (task, status) in &summary.statuses {
                        match status {
                            runner::TaskStatus::Ok => eprintln!("task {}: ok", task.as_str()),
                            runner::TaskStatus::Failed(reason) => {
                                eprintln!("task {}: failed ({reason})", task.as_str())
                            }
                        }
                    }
                    if summary.all_ok() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(4)
                    }
                }
                Err(err) => report_error(err),
            }
        }
        Command::ReproducePaper { out } => match reproduction::reproduce(&out) {
            Ok(report) => {
                for check in &report.checks {
                    eprintln!(
                        "check {}: {}",
                        check.name,
                        if check.pass { "PASS" } else { "FAIL" }
                    );
                }
                if report.all_pass() {
                    eprintln!(
                        "all {} checks pass; {} documented discrepancies listed in the report",
                        report.checks.len(),
                        report.notes.len()
                    );
                    ExitCode::SUCCESS
                } else {
                    for check in report.failing() {
                        eprintln!(
                            "FAILED {}: computed {}, expected {}",
                            check.name, check.computed, check.expected
                        );
                    }
                    ExitCode::from(4)
                }
            }
            Err(msg) => {
                eprintln!("error: {msg}");
                ExitCode::FAILURE
            }
        },
        Command::Sweep {
            m_from,
            m_to,
            out,
            players,
            delta0,
            c0,
            base_latency,
            demand,
            knobs,
        } => {
            let mut scenario = Scenario {
                network: NetworkSpec::Sequence {
                    players,
                    delta0,
                    c0,
                    base_latency,
                    demand,
                    m: m_from,
                    m_to: Some(m_to),
                },
                doc: DocSpec::Selfish,
                tasks: vec![Task::Sweep],
                solver: SolverKnobs::default(),
            };
            let overrides: Overrides = knobs.into();
            overrides.apply(&mut scenario);
            if let Err(msg) = scenario.validate() {
                eprintln!("error: {msg}");
                return ExitCode::from(2);
            }
            match runner::run_scenario(&scenario, &out) {
                Ok(summary) if summary.all_ok() => ExitCode::SUCCESS,
                Ok(_) => ExitCode::from(4),
                Err(err) => report_error(err),
            }
        }
    }
}

fn report_error(err: RunError) -> ExitCode {
    eprintln!("error: {err}");
    match err {
        RunError::Parse(_) => ExitCode::from(2),
        RunError::Regime(_) => ExitCode::from(3),
        RunError::Io(_) | RunError::Other(_) => ExitCode::FAILURE,
    }
}
