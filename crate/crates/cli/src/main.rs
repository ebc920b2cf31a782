use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use toml::Value;
use xband_cli::config::{self, KEYS};
use xband_cli::{run, Result, RunOutcome};

#[derive(Parser)]
#[command(
    name = "xband",
    version,
    about = "Cross-band interference experiments for asynchronous OFDMA links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one campaign or the reproduction suite.
    Run(RunArgs),
    /// List configuration keys and experiments.
    Keys,
}

#[derive(clap::Args)]
struct RunArgs {
    /// Campaign name or reproduce_paper.
    #[arg(long)]
    experiment: Option<String>,
    /// Flat key = value file in TOML syntax.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory (default results/<experiment>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override one key, e.g. --set p_r_db=9 (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,
}

fn init_threads() {
    if let Some(n) = std::env::var("XBAND_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn execute(args: RunArgs) -> Result<RunOutcome> {
    let mut layers = Vec::new();
    if let Some(path) = &args.config {
        layers.push(config::read_file(path)?);
    }
    let mut sets = BTreeMap::new();
    for s in &args.sets {
        let (k, v) = config::parse_assignment(s)?;
        sets.insert(k, v);
    }
    layers.push(sets);
    let mut flags = BTreeMap::new();
    if let Some(e) = args.experiment {
        flags.insert("experiment".to_string(), Value::String(e));
    }
    if let Some(s) = args.seed {
        flags.insert("seed".to_string(), Value::Integer(s as i64));
    }
    if let Some(t) = args.trials {
        flags.insert("trials".to_string(), Value::Integer(t as i64));
    }
    if let Some(o) = &args.out {
        flags.insert("out".to_string(), Value::String(o.display().to_string()));
    }
    layers.push(flags);

    let experiment = layers
        .iter()
        .rev()
        .find_map(|l| l.get("experiment").and_then(Value::as_str).map(str::to_string))
        .unwrap_or_else(|| "interference_strength".into());
    let cfg = config::build(&layers, &PathBuf::from("results").join(experiment))?;
    eprintln!("running {} into {}", cfg.experiment, cfg.out_dir.display());
    run(&cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match cli.command {
        Command::Keys => {
            for (k, help) in KEYS {
                println!("{k:<24}{help}");
            }
            println!();
            println!(
                "experiments: reproduce_paper, {}",
                xband_core::harness::ExperimentKind::ALL.map(|k| k.name()).join(", ")
            );
            ExitCode::SUCCESS
        }
        Command::Run(args) => match execute(args) {
            Ok(outcome) => {
                for f in outcome.files() {
                    println!("{}", f.display());
                }
                if let RunOutcome::Campaign { report, .. } = &outcome {
                    if report.failed_trials > 0 {
                        eprintln!("{} trials failed", report.failed_trials);
                    }
                }
                ExitCode::from(outcome.exit_code() as u8)
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
