use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rmtlab::{Experiment, ExperimentConfig, HarnessError, EXIT_GATE_FAILURE, EXIT_PASS};

#[derive(Parser)]
#[command(name = "rmtlab", version = rmtlab::VERSION, about = "Spectral experiments on products of random matrices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pooled radii against the limiting radial law.
    CircularLaw(RunArgs),
    /// Variance and higher cumulants of a linear statistic.
    Clt(RunArgs),
    /// Least singular value of the raw linearization.
    LeastSv(RunArgs),
    /// Exact cumulants and rotary-flow asymptotics.
    Cumulants(RunArgs),
    /// Four-moment comparison of smoothed correlations and the local law.
    Universality(RunArgs),
    /// Intermediate singular values of one iid matrix.
    SvProfile(RunArgs),
    /// Girko identity and resolvent-swap Taylor scaling.
    GirkoSwap(RunArgs),
    /// Print the default config of an experiment.
    Defaults { experiment: String },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load(experiment: Experiment, args: &RunArgs) -> Result<ExperimentConfig, HarnessError> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
            ExperimentConfig::parse(&text, Some(experiment))?
        }
        None => ExperimentConfig::defaults(experiment),
    };
    let overrides = [
        ("n", args.n.map(|v| v.to_string())),
        ("m", args.m.map(|v| v.to_string())),
        ("tau", args.tau.map(|v| v.to_string())),
        ("replicas", args.replicas.map(|v| v.to_string())),
        ("master_seed", args.seed.map(|v| v.to_string())),
        ("workers", args.workers.map(|v| v.to_string())),
        ("out_dir", args.out.as_ref().map(|p| p.display().to_string())),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            cfg.set(key, &v)?;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(experiment: Experiment, args: &RunArgs) -> Result<bool, HarnessError> {
    let cfg = load(experiment, args)?;
    let record = rmtlab::run(&cfg)?;
    let dir = record.write(Path::new(&cfg.out_dir))?;
    for g in &record.gates {
        println!("{} {}: {} (threshold {})", if g.pass { "PASS" } else { "FAIL" }, g.name, g.value, g.threshold);
    }
    println!("wrote {}", dir.display());
    Ok(record.pass())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (experiment, args) = match cli.command {
        Command::CircularLaw(a) => (Experiment::CircularLaw, a),
        Command::Clt(a) => (Experiment::Clt, a),
        Command::LeastSv(a) => (Experiment::LeastSv, a),
        Command::Cumulants(a) => (Experiment::Cumulants, a),
        Command::Universality(a) => (Experiment::Universality, a),
        Command::SvProfile(a) => (Experiment::SvProfile, a),
        Command::GirkoSwap(a) => (Experiment::GirkoSwap, a),
        Command::Defaults { experiment } => {
            return match Experiment::from_name(&experiment) {
                Ok(e) => {
                    print!("{}", ExperimentConfig::defaults(e).to_text());
                    ExitCode::from(EXIT_PASS as u8)
                }
                Err(e) => {
                    eprintln!("rmtlab: {e}");
                    ExitCode::from(e.exit_code() as u8)
                }
            };
        }
    };
    match execute(experiment, &args) {
        Ok(true) => ExitCode::from(EXIT_PASS as u8),
        Ok(false) => ExitCode::from(EXIT_GATE_FAILURE as u8),
        Err(e) => {
            eprintln!("rmtlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
