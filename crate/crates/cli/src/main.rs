use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use tank_core::{parse_config, preset, ExperimentConfig, ModelSelection};

mod analyze;
mod plots;
mod simulate;

#[derive(Parser)]
#[command(name = "tank", version, about = "Funnel-controlled water tank on a moving cart")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the closed loop and write traces, plots and a summary.
    Simulate {
        #[command(flatten)]
        source: Source,
        /// Output directory (defaults to `output.dir` of the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the model selection of the config.
        #[arg(long, value_enum)]
        model: Option<ModelArg>,
        #[arg(long)]
        no_plots: bool,
    },
    #[command(subcommand)]
    Analyze(Analyze),
    #[command(subcommand)]
    Check(Check),
}

#[derive(Subcommand)]
enum Analyze {
    /// Transfer function on a lambda grid: closed form vs modal series vs
    /// boundary-value oracle.
    Transfer(analyze::TransferArgs),
    /// Atoms and total variation of the impulse-response comb.
    Impulse(analyze::ImpulseArgs),
}

#[derive(Subcommand)]
enum Check {
    /// Parse and validate a config without running it.
    Config {
        #[command(flatten)]
        source: Source,
    },
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
pub struct Source {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Bundled experiment: experiment1 or experiment2.
    #[arg(long)]
    preset: Option<String>,
}

impl Source {
    pub fn load(&self) -> tank_core::Result<ExperimentConfig> {
        match (&self.config, &self.preset) {
            (Some(path), _) => parse_config(path),
            (None, Some(name)) => preset(name),
            (None, None) => unreachable!("clap enforces one source"),
        }
    }

    pub fn describe(&self) -> String {
        match (&self.config, &self.preset) {
            (Some(path), _) => path.display().to_string(),
            (None, Some(name)) => format!("preset:{name}"),
            (None, None) => String::new(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Linear,
    Nonlinear,
    Both,
}

impl From<ModelArg> for ModelSelection {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Linear => ModelSelection::Linear,
            ModelArg::Nonlinear => ModelSelection::Nonlinear,
            ModelArg::Both => ModelSelection::Both,
        }
    }
}

/// Failure category, mapped to the process exit code.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Runtime(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Runtime(_) => 3,
        }
    }
}

impl From<tank_core::Error> for Failure {
    fn from(e: tank_core::Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

/// Config loading: any error, including a missing file, is a validation
/// failure.
pub fn load(source: &Source) -> Result<ExperimentConfig, Failure> {
    source.load().map_err(|e| Failure::Validation(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Simulate {
            source,
            out,
            model,
            no_plots,
        } => {
            let mut cfg = load(&source)?;
            if let Some(m) = model {
                cfg.model = m.into();
            }
            let out = out.unwrap_or_else(|| cfg.output_dir.clone());
            simulate::simulate(&cfg, &source.describe(), &out, !no_plots)
        }
        Command::Analyze(Analyze::Transfer(args)) => analyze::transfer(&args),
        Command::Analyze(Analyze::Impulse(args)) => analyze::impulse(&args),
        Command::Check(Check::Config { source }) => {
            let cfg = load(&source)?;
            let (dt, grid) = tank_core::derive_grids(&cfg)?;
            let p = &cfg.params;
            let courant = p.wave_speed() * dt / grid.spacing() + p.mu() * dt;
            println!("{}: ok", source.describe());
            println!("  models      {:?}", cfg.model.models().iter().map(|m| m.name()).collect::<Vec<_>>());
            println!("  horizon     {:.6e} s ({} time points, dt = {:.6e})", cfg.horizon, cfg.time_points, dt);
            println!("  grid        {} nodes, courant {:.6}", grid.n_points(), courant);
            println!("  snapshots   {}", cfg.snapshot_times().len());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Failure::Validation(msg) | Failure::Runtime(msg)) = &f;
            eprintln!("error: {msg}");
            ExitCode::from(f.code())
        }
    }
}
