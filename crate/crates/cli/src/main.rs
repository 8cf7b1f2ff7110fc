use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod config;
mod error;
mod output;

use commands::verify::Suite;
use config::RunConfig;
use error::{exit_code, usage};

#[derive(Parser, Debug)]
#[command(name = "hismhd", version, about = "Hall and ion-slip MHD on the periodic box")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads.
    #[arg(long, global = true, env = "HISMHD_THREADS")]
    threads: Option<usize>,
    /// Random seed of the small data (overrides the file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Extra `key=value` override, repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the initial state and its provenance record.
    GenData,
    /// Integrate from the initial state or a checkpoint.
    Run {
        /// Initial checkpoint (default: OUT/initial.chk).
        #[arg(long)]
        initial: Option<PathBuf>,
        /// Continue from this checkpoint with its stored step size.
        #[arg(long)]
        restart: Option<PathBuf>,
    },
    /// Run evaluator suites; exits 1 if any assertion fails.
    Verify {
        #[arg(value_enum)]
        which: Suite,
    },
    /// Fit an exponential decay rate to a time-series column.
    DecayFit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "energy")]
        column: String,
        /// Only samples with t at or after this time.
        #[arg(long, default_value_t = 0.0)]
        from: f64,
    },
}

/// The merged configuration, written next to every output.
const EFFECTIVE_CONFIG: &str = "effective.conf";

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    for kv in &cli.set {
        let (k, v) = kv.split_once('=').ok_or_else(|| usage(format!("--set expects KEY=VALUE, got `{kv}`")))?;
        cfg.set(k.trim(), v.trim())?;
    }
    if let Some(s) = cli.seed {
        cfg.params.seed = s;
    }
    Ok(cfg)
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let cfg = load_config(&cli)?;
    if !matches!(cli.command, Command::DecayFit { .. }) {
        cfg.validate()?;
        std::fs::create_dir_all(&cli.out)?;
        std::fs::write(cli.out.join(EFFECTIVE_CONFIG), cfg.to_text())?;
    }
    match &cli.command {
        Command::GenData => commands::gen_data::gen_data(&cfg, &cli.out),
        Command::Run { initial, restart } => {
            commands::run::run(&cfg, &cli.out, initial.as_deref(), restart.as_deref())
        }
        Command::Verify { which } => commands::verify::verify(&cfg, *which, &cli.out),
        Command::DecayFit { input, column, from } => commands::decay_fit::decay_fit(input, column, *from, &cli.out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { error::EXIT_USAGE } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
