use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod benchmark;
mod generate;
mod output;
mod population_sim;
mod train;

#[derive(Parser)]
#[command(name = "altest", version, about = "Class-prior estimation from positive and unlabeled data")]
struct Cli {
    /// Directory for outputs when --output is omitted or relative.
    #[arg(long, global = true, env = "ALTEST_OUTPUT_DIR")]
    output_dir: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Alternate classifier and prior estimation; writes a JSON report.
    Train(train::TrainArgs),
    /// Like train, but reports only the prior estimate.
    EstimatePrior(train::EstimateArgs),
    /// Population-level prior map on a 1-D Gaussian mixture; writes CSV.
    PopulationSim(population_sim::PopulationArgs),
    /// Seeded benchmark sweep from a TOML config; writes CSV.
    Benchmark(benchmark::BenchmarkArgs),
    /// Samples a Gaussian PU problem into CSV files.
    Generate(generate::GenerateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let dir = cli.output_dir.as_deref();
    let result = match cli.command {
        Command::Train(a) => train::run_train(a, dir),
        Command::EstimatePrior(a) => train::run_estimate(a, dir),
        Command::PopulationSim(a) => population_sim::run(a, dir),
        Command::Benchmark(a) => benchmark::run(a, dir),
        Command::Generate(a) => generate::run(a, dir),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
