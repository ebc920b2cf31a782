//! Command-line front end: configuration, campaign dispatch, CSV output and
//! the reproduction suite.

pub mod config;
pub mod error;
pub mod oracle;
pub mod output;
pub mod reproduce;

use std::path::PathBuf;

use xband_core::harness::{self, CampaignReport};

use crate::config::{Experiment, RunConfig};
pub use crate::error::{CliError, Result};
use crate::reproduce::{CriterionResult, ReproduceOptions};

/// What a run produced.
#[derive(Debug)]
pub enum RunOutcome {
    Campaign {
        report: CampaignReport,
        files: Vec<PathBuf>,
    },
    Reproduce {
        results: Vec<CriterionResult>,
        files: Vec<PathBuf>,
    },
}

impl RunOutcome {
    /// Process exit code: nonzero iff a criterion failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunOutcome::Campaign { .. } => 0,
            RunOutcome::Reproduce { results, .. } => i32::from(results.iter().any(|r| !r.passed)),
        }
    }

    pub fn files(&self) -> &[PathBuf] {
        match self {
            RunOutcome::Campaign { files, .. } | RunOutcome::Reproduce { files, .. } => files,
        }
    }
}

fn overrides_meta(cfg: &RunConfig) -> Vec<(String, String)> {
    cfg.overrides
        .iter()
        .map(|(k, v)| (format!("set.{k}"), v.clone()))
        .collect()
}

/// Runs the configured experiment and writes its CSVs under `cfg.out_dir`.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome> {
    match cfg.experiment {
        Experiment::Campaign(_) => {
            let report = harness::run(&cfg.spec)?;
            let files = output::write_report(&report, &cfg.out_dir, &overrides_meta(cfg))?;
            Ok(RunOutcome::Campaign { report, files })
        }
        Experiment::ReproducePaper => {
            let opts = ReproduceOptions::new(cfg.spec.scenario.seed, cfg.spec.n_trials);
            let mut results = Vec::new();
            let mut files = Vec::new();
            for id in 1..=10 {
                let r = reproduce::criterion(id, &opts)?;
                eprintln!("{}", r.summary());
                for t in &r.tables {
                    let path = cfg
                        .out_dir
                        .join(format!("criterion_{:02}", r.id))
                        .join(format!("{}.csv", t.name));
                    output::write_file(&path, &output::render_table(t))?;
                    files.push(path);
                }
                results.push(r);
            }
            let summary = reproduce::summary_table(&results);
            let path = cfg.out_dir.join("acceptance.csv");
            output::write_file(&path, &output::render_table(&summary))?;
            files.push(path);
            let mut meta = vec![
                ("version".to_string(), output::VERSION.to_string()),
                ("seed".to_string(), opts.seed.to_string()),
                ("trials".to_string(), opts.trials.to_string()),
                ("throughput_trials".to_string(), opts.throughput_trials.to_string()),
                ("determinism_trials".to_string(), opts.determinism_trials.to_string()),
                (
                    "failed_criteria".to_string(),
                    results.iter().filter(|r| !r.passed).count().to_string(),
                ),
            ];
            meta.push(("experiment".to_string(), cfg.experiment.to_string()));
            meta.extend(overrides_meta(cfg));
            let path = cfg.out_dir.join("meta.csv");
            output::write_file(&path, &output::render_meta(&meta))?;
            files.push(path);
            Ok(RunOutcome::Reproduce { results, files })
        }
    }
}
