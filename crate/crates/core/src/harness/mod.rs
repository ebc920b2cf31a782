//! Monte Carlo campaigns and their tabular reports.
//!
//! Every campaign derives its randomness from the scenario seed, a point
//! label and the trial index, and reduces per-trial results in trial order,
//! so reports are identical for any thread count.

mod ber;
mod interference;
mod spectra;
mod stats;
mod sync_error;
mod throughput;

use std::fmt;
use std::str::FromStr;

use crate::channel::ScenarioSpec;
use crate::error::{cfg_err, Error, Result};

pub use ber::{ber_curve, run_ber, BerCurve, BerResult};
pub use interference::{run_interference_strength, run_param_sweep, InterferenceStrength, ParamSweep, StrengthRow};
pub use spectra::{measure_scheme, run_mitigation_compare, MitigationSpectra};
pub use stats::{wilson_interval, Proportion};
pub use sync_error::{run_sync_error, sync_error_point, SyncErrorPoint, SyncErrorResult};
pub use throughput::{
    evaluate_format, run_freq_offset_sensitivity, run_throughput, throughput_formats, FormatOutcome, SchemeFormat,
    SensitivityResult, ThroughputPoint, ThroughputResult, TrialTally, THROUGHPUT_EPS_MAX,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    InterferenceStrength,
    ParamSweep,
    SyncError,
    Ber,
    MitigationCompare,
    Throughput,
    FreqOffsetSensitivity,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::InterferenceStrength,
        ExperimentKind::ParamSweep,
        ExperimentKind::SyncError,
        ExperimentKind::Ber,
        ExperimentKind::MitigationCompare,
        ExperimentKind::Throughput,
        ExperimentKind::FreqOffsetSensitivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::InterferenceStrength => "interference_strength",
            ExperimentKind::ParamSweep => "param_sweep",
            ExperimentKind::SyncError => "sync_error",
            ExperimentKind::Ber => "ber",
            ExperimentKind::MitigationCompare => "mitigation_compare",
            ExperimentKind::Throughput => "throughput",
            ExperimentKind::FreqOffsetSensitivity => "freq_offset_sensitivity",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown experiment '{s}'")))
    }
}

/// One campaign: a scenario plus the sweep lists the experiment uses.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub scenario: ScenarioSpec,
    pub n_trials: usize,
    pub p_r_db: Vec<f64>,
    pub k_factors: Vec<f64>,
    pub eps_max: Vec<f64>,
    /// Fraction of the shared span spent on mitigation in the spectrum comparison.
    pub overhead: f64,
    /// Subcarriers shared by both links in the throughput experiments.
    pub total_span: usize,
}

impl ExperimentSpec {
    pub fn new(kind: ExperimentKind) -> Self {
        let p_r_db = match kind {
            ExperimentKind::FreqOffsetSensitivity => vec![3.0, 9.0],
            _ => vec![0.0, 3.0, 6.0, 9.0],
        };
        Self {
            kind,
            scenario: ScenarioSpec::default(),
            n_trials: 10_000,
            p_r_db,
            k_factors: vec![f64::INFINITY, 10.0, 1.0, 0.0],
            eps_max: vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5],
            overhead: 0.25,
            total_span: 16,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.n_trials == 0 {
            return cfg_err("n_trials must be >= 1");
        }
        for (name, list) in [
            ("p_r_db", &self.p_r_db),
            ("k_factors", &self.k_factors),
            ("eps_max", &self.eps_max),
        ] {
            if list.is_empty() {
                return cfg_err(format!("{name} must not be empty"));
            }
        }
        if let Some(k) = self.k_factors.iter().find(|k| !(**k >= 0.0)) {
            return cfg_err(format!("k_factors entries must be >= 0, got {k}"));
        }
        if let Some(e) = self.eps_max.iter().find(|e| !(0.0..=0.5).contains(*e)) {
            return cfg_err(format!("eps_max entries must be in [0, 0.5], got {e}"));
        }
        if !(self.overhead > 0.0 && self.overhead < 1.0) {
            return cfg_err(format!("overhead must be in (0, 1), got {}", self.overhead));
        }
        if self.total_span < 4 || self.total_span > self.scenario.cfg.n_fft() / 2 {
            return cfg_err(format!("total_span {} is not valid", self.total_span));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// A named result table with fixed column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub description: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, description: &str, columns: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            description: description.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignReport {
    pub kind: ExperimentKind,
    pub tables: Vec<Table>,
    /// Ordered key/value metadata (seed, trial counts, realized parameters).
    pub meta: Vec<(String, String)>,
    pub failed_trials: usize,
}

impl CampaignReport {
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            tables: Vec::new(),
            meta: Vec::new(),
            failed_trials: 0,
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }
}

fn scenario_meta(report: &mut CampaignReport, spec: &ExperimentSpec) {
    let s = &spec.scenario;
    report.meta("experiment", spec.kind);
    report.meta("seed", s.seed);
    report.meta("n_trials", spec.n_trials);
    report.meta("n_fft", s.cfg.n_fft());
    report.meta("n_cp", s.cfg.n_cp());
    report.meta("subcarrier_spacing_hz", s.cfg.subcarrier_spacing_hz());
    report.meta("modulation", s.cfg.modulation());
    report.meta("omega1", &s.link1.subcarriers);
    report.meta("omega2", &s.link2.subcarriers);
    report.meta("p1", s.link1.power_per_subcarrier);
    report.meta("p2", s.link2.power_per_subcarrier);
    report.meta("mismatch", format!("{:?}", s.mismatch));
    report.meta("freq_offset", format!("{:?}", s.freq_offset));
    report.meta("channel", format!("{:?}", s.channel));
    report.meta("noise_power_per_subcarrier", s.noise_power_per_subcarrier);
    report.meta("packet_len", s.packet_len);
}

/// Runs the campaign named by `spec.kind`.
pub fn run(spec: &ExperimentSpec) -> Result<CampaignReport> {
    spec.validate()?;
    let mut report = match spec.kind {
        ExperimentKind::InterferenceStrength => run_interference_strength(spec)?.to_report(),
        ExperimentKind::ParamSweep => run_param_sweep(spec)?.to_report(),
        ExperimentKind::SyncError => run_sync_error(spec)?.to_report(),
        ExperimentKind::Ber => run_ber(spec)?.to_report(),
        ExperimentKind::MitigationCompare => run_mitigation_compare(spec)?.to_report(),
        ExperimentKind::Throughput => run_throughput(spec)?.to_report(),
        ExperimentKind::FreqOffsetSensitivity => run_freq_offset_sensitivity(spec)?.to_report(),
    };
    let extra = std::mem::take(&mut report.meta);
    scenario_meta(&mut report, spec);
    report.meta.extend(extra);
    report.meta("failed_trials", report.failed_trials);
    Ok(report)
}

/// Evenly spaced grid `start, start + step, ...` up to `stop` inclusive.
pub fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|i| start + step * i as f64).collect()
}
