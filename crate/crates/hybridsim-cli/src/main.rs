//! Command-line entry point. Subcommands fix the scheme (`direct`,
//! `teleport-dv`, `teleport-cv`), `sweep` takes it from the config or
//! `--scheme`, and `crossover` bisects the direct-vs-DV-teleport loss
//! crossing. Exit codes: 0 success, 2 configuration error, 1 runtime error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybridsim_cli::{
    emit_crossovers, emit_records, run_crossover, run_scenario, CliResult, GainMode, GridSpec,
    Metric, OutputFormat, ScenarioConfig, Scheme, Variant,
};

#[derive(Parser)]
#[command(
    name = "hybridsim",
    version,
    about = "Hybrid CV-DV entanglement distribution: direct transmission vs teleportation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Send both modes directly through the lossy down-links
    Direct(ScenarioArgs),
    /// Teleport the DV mode through the attenuated TMSV channel
    TeleportDv(ScenarioArgs),
    /// Teleport the CV mode in the characteristic-function picture
    TeleportCv(ScenarioArgs),
    /// Run a scenario whose scheme comes from the config or --scheme
    Sweep(ScenarioArgs),
    /// Find the symmetric total loss where direct and DV-teleport fidelities cross
    Crossover(CrossoverArgs),
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    s.parse()
}

fn parse_gain(s: &str) -> Result<GainMode, String> {
    s.parse()
}

#[derive(Args)]
struct ScenarioArgs {
    /// JSON scenario config; flags below override its fields
    #[arg(long)]
    config: Option<PathBuf>,
    /// Distribution scheme (only consulted by the sweep subcommand)
    #[arg(long)]
    scheme: Option<Scheme>,
    /// Cat amplitude grid: number, comma list, or start:stop:count
    #[arg(long, value_parser = parse_grid)]
    alpha0: Option<GridSpec>,
    /// TMSV squeezing parameter
    #[arg(long)]
    r: Option<f64>,
    /// Gain policy: unity, tuned, or fixed:<g>
    #[arg(long, value_parser = parse_gain)]
    gain_mode: Option<GainMode>,
    /// CV-arm transmissivity grid (requires --tb)
    #[arg(long, value_parser = parse_grid)]
    ta: Option<GridSpec>,
    /// DV-arm transmissivity grid (requires --ta)
    #[arg(long, value_parser = parse_grid)]
    tb: Option<GridSpec>,
    /// Symmetric total-loss grid in dB (alternative to --ta/--tb)
    #[arg(long, value_parser = parse_grid)]
    loss_db: Option<GridSpec>,
    /// Fock-space dimension per mode
    #[arg(long)]
    dim: Option<usize>,
    /// Photon-number cutoff override (default: chosen from delta)
    #[arg(long = "kmax")]
    k_max: Option<usize>,
    /// Trace-defect budget for the photon-number cutoff
    #[arg(long)]
    delta: Option<f64>,
    /// Hybrid-state variant
    #[arg(long)]
    variant: Option<Variant>,
    /// Metric column to emit; repeat the flag for several
    #[arg(long = "metric")]
    metric: Vec<Metric>,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output encoding
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

impl ScenarioArgs {
    fn into_config(self, forced_scheme: Option<Scheme>) -> CliResult<RunPlan> {
        let mut config = match &self.config {
            Some(path) => ScenarioConfig::from_file(path)?,
            None => ScenarioConfig::default(),
        };
        if let Some(scheme) = self.scheme {
            config.scheme = Some(scheme);
        }
        if let Some(scheme) = forced_scheme {
            config.scheme = Some(scheme);
        }
        if let Some(alpha0) = self.alpha0 {
            config.alpha0 = alpha0;
        }
        if let Some(r) = self.r {
            config.r = r;
        }
        if let Some(gain_mode) = self.gain_mode {
            config.gain_mode = gain_mode;
        }
        if let Some(ta) = self.ta {
            config.ta = Some(ta);
            config.loss_db = None;
        }
        if let Some(tb) = self.tb {
            config.tb = Some(tb);
            config.loss_db = None;
        }
        if let Some(loss_db) = self.loss_db {
            config.loss_db = Some(loss_db);
            config.ta = None;
            config.tb = None;
        }
        if let Some(dim) = self.dim {
            config.dim = dim;
        }
        if let Some(k_max) = self.k_max {
            config.k_max = Some(k_max);
        }
        if let Some(delta) = self.delta {
            config.delta = delta;
        }
        if let Some(variant) = self.variant {
            config.variant = variant;
        }
        if !self.metric.is_empty() {
            config.metrics = Some(self.metric);
        }
        Ok(RunPlan {
            config,
            output: self.output,
            format: self.format,
        })
    }
}

struct RunPlan {
    config: ScenarioConfig,
    output: Option<PathBuf>,
    format: OutputFormat,
}

#[derive(Args)]
struct CrossoverArgs {
    /// Cat amplitude grid: number, comma list, or start:stop:count
    #[arg(long, value_parser = parse_grid, default_value = "1.5")]
    alpha0: GridSpec,
    /// TMSV squeezing parameter
    #[arg(long, default_value_t = 2.5)]
    r: f64,
    /// Fock-space dimension for the direct-distribution fidelity
    #[arg(long, default_value_t = 40)]
    dim: usize,
    /// Trace-defect budget (kept for symmetry with the sweep flags)
    #[arg(long, default_value_t = 1e-14)]
    delta: f64,
    /// Output file (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Output encoding
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    format: OutputFormat,
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Direct(args) => run_sweep(args.into_config(Some(Scheme::Direct))?),
        Command::TeleportDv(args) => run_sweep(args.into_config(Some(Scheme::TeleportDv))?),
        Command::TeleportCv(args) => run_sweep(args.into_config(Some(Scheme::TeleportCv))?),
        Command::Sweep(args) => run_sweep(args.into_config(None)?),
        Command::Crossover(args) => {
            let records = run_crossover(&args.alpha0, args.r, args.dim, args.delta)?;
            emit_crossovers(&records, args.format, args.output.as_deref())
        }
    }
}

fn run_sweep(plan: RunPlan) -> CliResult<()> {
    let records = run_scenario(&plan.config)?;
    emit_records(&records, plan.format, plan.output.as_deref())
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(u8::try_from(error.exit_code()).unwrap_or(1))
        }
    }
}
