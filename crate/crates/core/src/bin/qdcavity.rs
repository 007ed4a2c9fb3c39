use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qdcavity::config::{parse_config, Mode, ScenarioConfig};
use qdcavity::dynamics::check_cutoff_convergence;
use qdcavity::output::OutputFormat;
use qdcavity::presets::preset;
use qdcavity::{run, Error, Result};

#[derive(Parser)]
#[command(
    name = "qdcavity",
    version,
    about = "Driven quantum-dot cavity QED simulator"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalFlags,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalFlags {
    /// Override the Fock-space cutoff.
    #[arg(long, global = true, value_name = "N")]
    fock_cutoff: Option<usize>,
    /// Override the relative integration tolerance.
    #[arg(long, global = true, value_name = "RTOL")]
    tolerance: Option<f64>,
    /// Switch off pure dephasing.
    #[arg(long, global = true)]
    no_dephasing: bool,
    /// Worker threads for grids and sweeps.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Output format.
    #[arg(long, global = true, default_value = "csv", value_parser = ["csv", "csv+svg"])]
    format: String,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configuration file.
    Run {
        config: PathBuf,
        /// Output directory (defaults to output_path from the file, then ".").
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a built-in figure preset and write its configuration next to the data.
    Preset {
        name: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Parse and validate a configuration without running it.
    Validate { config: PathBuf },
    /// Compare all observables of a pulsed configuration at two cutoffs.
    Convergence {
        config: PathBuf,
        /// Two cutoffs, e.g. 4,6.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        cutoffs: Vec<usize>,
    },
}

fn load(path: &Path, flags: &GlobalFlags) -> Result<ScenarioConfig> {
    let text = std::fs::read_to_string(path)?;
    apply_flags(parse_config(&text)?, flags)
}

fn apply_flags(mut cfg: ScenarioConfig, flags: &GlobalFlags) -> Result<ScenarioConfig> {
    if let Some(n) = flags.fock_cutoff {
        cfg.fock_cutoff_override = Some(n);
    }
    if let Some(t) = flags.tolerance {
        cfg.tolerances.relative = t;
    }
    if flags.no_dephasing {
        cfg.dephasing_enabled = false;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(r: &run::RunReport) {
    for f in r.data_files.iter().chain(std::iter::once(&r.sidecar)) {
        println!("wrote {}", f.display());
    }
    println!("wall time {:.3} s", r.wall_time_s);
}

fn execute(cli: Cli) -> Result<()> {
    let flags = &cli.global;
    if let Some(n) = flags.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Config(format!("cannot configure {n} threads: {e}")))?;
    }
    let format = OutputFormat::parse(&flags.format).expect("restricted by clap");
    match &cli.command {
        Command::Run { config, out } => {
            let cfg = load(config, flags)?;
            let dir = out
                .clone()
                .or_else(|| cfg.output_path.as_ref().map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            report(&run::run(&cfg, &dir, format)?);
        }
        Command::Preset { name, out } => {
            let cfg = apply_flags(preset(name)?, flags)?;
            std::fs::create_dir_all(out)?;
            let cfg_path = out.join(format!("{name}.toml"));
            std::fs::write(&cfg_path, cfg.to_toml())?;
            println!("wrote {}", cfg_path.display());
            report(&run::run(&cfg, out, format)?);
        }
        Command::Validate { config } => {
            let cfg = load(config, flags)?;
            println!("ok: {} (mode {})", cfg.label(), cfg.mode.name());
        }
        Command::Convergence { config, cutoffs } => {
            let cfg = load(config, flags)?;
            let [n1, n2] = cutoffs[..] else {
                return Err(Error::Config(
                    "--cutoffs expects exactly two values, e.g. 4,6".into(),
                ));
            };
            if cfg.mode != Mode::Pulsed {
                return Err(Error::Config(
                    "convergence requires mode = \"pulsed\"".into(),
                ));
            }
            let worst = check_cutoff_convergence(&cfg.scenario()?, n1, n2)?;
            println!("max_abs_deviation = {worst:.6e} (cutoffs {n1} vs {n2})");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
