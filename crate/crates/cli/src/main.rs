//! `plflab`: batch front end for the simulator and the rate econometrics.
//!
//! Exit codes: 0 success, 2 input or schema error, 3 I/O error,
//! 4 numerical or estimation failure.

mod cmd;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::io::Ctx;

#[derive(Parser, Debug)]
#[command(name = "plflab", version, about = "Loanable-funds market simulator and interest-rate econometrics")]
struct Cli {
    /// Root for relative input paths and default panel/fx files
    #[arg(long, env = "PLFLAB_DATA_DIR", global = true)]
    data_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a scenario; writes snapshots.csv and summary.json
    Simulate(cmd::simulate::SimulateArgs),
    /// Tabulate borrow and supply rates of a model over a utilization grid
    Rates(cmd::rates::RatesArgs),
    /// UIP regressions with Newey-West inference, one row per market pair
    Uip(cmd::uip::UipArgs),
    /// Johansen rank test, VECM fit, impulse responses and stability check
    Vecm(cmd::vecm::VecmArgs),
    /// Illiquidity bands, available liquidity and fund concentration
    Liquidity(cmd::liquidity::LiquidityArgs),
    /// Re-run a scenario with the kink moved to each of several positions
    ExperimentKink(cmd::experiment::KinkArgs),
    /// Compare a kinked scenario with the same market under a smooth model
    ExperimentSmooth(cmd::experiment::SmoothArgs),
    /// Write a synthetic demo data set
    #[command(hide = true)]
    DemoData(cmd::demo::DemoArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = Ctx { data_dir: cli.data_dir };
    let result = match &cli.command {
        Command::Simulate(a) => cmd::simulate::run(&ctx, a),
        Command::Rates(a) => cmd::rates::run(&ctx, a),
        Command::Uip(a) => cmd::uip::run(&ctx, a),
        Command::Vecm(a) => cmd::vecm::run(&ctx, a),
        Command::Liquidity(a) => cmd::liquidity::run(&ctx, a),
        Command::ExperimentKink(a) => cmd::experiment::run_kink(&ctx, a),
        Command::ExperimentSmooth(a) => cmd::experiment::run_smooth(&ctx, a),
        Command::DemoData(a) => cmd::demo::run(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
