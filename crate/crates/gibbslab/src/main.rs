use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use gibbslab::config::{MethodChoice, RunConfig};
use gibbslab::report::{execute, CommandKind};
use gibbslab::Error;

/// Thermal generators for small fermion systems: assembly, parent spectra,
/// mixing studies, and kernel diagnostics.
#[derive(Parser)]
#[command(name = "gibbslab", version, about, disable_help_subcommand = true)]
struct Cli {
    /// TOML configuration file; defaults apply when omitted.
    #[arg(long, global = true, value_name = "path")]
    config: Option<PathBuf>,

    /// Output directory for report.toml and CSV files.
    #[arg(long, global = true, value_name = "dir", default_value = "out")]
    out: PathBuf,

    /// Seed override for randomized probes.
    #[arg(long, global = true, value_name = "u64")]
    seed: Option<u64>,

    /// Coefficient evaluation: closed, quadrature, or both.
    #[arg(long, global = true, value_name = "mode")]
    method: Option<String>,

    /// Mode-count cap override.
    #[arg(long = "max-modes", global = true, value_name = "k")]
    max_modes: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble the generator, verify its invariants, dump spectra.
    Build,
    /// Parent spectra and sector gaps.
    Gap,
    /// Mixing bound, empirical mixing time, budget comparison.
    Mix,
    /// Gap versus interaction strength on the single-site model.
    Sweep,
    /// Correlation and quasi-locality decay profiles on a chain.
    Correlations,
    /// Closed-form kernel self checks.
    Kernels,
    /// Parse and validate the configuration, write nothing.
    Validate,
}

impl Command {
    fn kind(&self) -> CommandKind {
        match self {
            Command::Build => CommandKind::Build,
            Command::Gap => CommandKind::Gap,
            Command::Mix => CommandKind::Mix,
            Command::Sweep => CommandKind::Sweep,
            Command::Correlations => CommandKind::Correlations,
            Command::Kernels => CommandKind::Kernels,
            Command::Validate => CommandKind::Validate,
        }
    }
}

fn init_workers() -> Result<(), Error> {
    let Ok(raw) = std::env::var("GIBBSLAB_WORKERS") else {
        return Ok(());
    };
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Ok(());
    }
    let n: usize = trimmed.parse().map_err(|_| {
        Error::Config(format!(
            "GIBBSLAB_WORKERS must be a positive integer, got {raw:?}"
        ))
    })?;
    if n == 0 {
        return Err(Error::Config(
            "GIBBSLAB_WORKERS must be a positive integer, got 0".into(),
        ));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))
}

fn load_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(method) = &cli.method {
        cfg.method = MethodChoice::parse(method)?;
    }
    if let Some(k) = cli.max_modes {
        cfg.max_modes = k;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = init_workers() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let cfg = match load_config(&cli) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match execute(&cfg, cli.command.kind(), &cli.out) {
        Ok(artifacts) => {
            for line in &artifacts.summary {
                println!("{line}");
            }
            for file in &artifacts.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
