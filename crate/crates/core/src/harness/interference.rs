use crate::analytic::{cbi_overall, param_sensitivity, to_db, PowerSpectrum, SweepBase, SweepParam};
use crate::channel::{measure_cbi, ChannelModel, ScenarioSpec};
use crate::error::Result;
use crate::rng::point_seed;

use super::{CampaignReport, Cell, ExperimentKind, ExperimentSpec, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct StrengthRow {
    pub f: f64,
    pub analytic: f64,
    pub nonfading: f64,
    pub rayleigh: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceStrength {
    pub rows: Vec<StrengthRow>,
    pub n_trials: usize,
    pub max_abs_diff_nonfading_db: f64,
    pub max_abs_diff_rayleigh_db: f64,
}

fn probe_scenario(base: &ScenarioSpec, channel: ChannelModel, label: &str) -> ScenarioSpec {
    let mut s = base.clone();
    s.channel = channel;
    s.noise_power_per_subcarrier = 0.0;
    s.seed = point_seed(base.seed, label);
    s
}

/// Average interference at the victim's integer subcarrier offsets `1..=|Omega_2|`,
/// measured noise-free under non-fading and Rayleigh channels.
pub fn run_interference_strength(spec: &ExperimentSpec) -> Result<InterferenceStrength> {
    spec.validate()?;
    let sc = &spec.scenario;
    let width = sc.link2.subcarriers.len();
    let f_grid: Vec<f64> = (1..=width).map(|f| f as f64).collect();
    let nf = measure_cbi(
        &probe_scenario(sc, ChannelModel::non_fading(), "nonfading"),
        &f_grid,
        spec.n_trials,
    )?;
    let ry = measure_cbi(
        &probe_scenario(sc, ChannelModel::rayleigh(), "rayleigh"),
        &f_grid,
        spec.n_trials,
    )?;
    let (n, n_cp) = (sc.cfg.n_fft(), sc.cfg.n_cp());
    let rows: Vec<StrengthRow> = f_grid
        .iter()
        .zip(nf.values().iter().zip(ry.values()))
        .map(|(&f, (&a, &b))| StrengthRow {
            f,
            analytic: cbi_overall(f, &sc.link1.subcarriers, 1.0, n, n_cp),
            nonfading: a,
            rayleigh: b,
        })
        .collect();
    let max_diff = |pick: fn(&StrengthRow) -> f64| {
        rows.iter()
            .map(|r| (to_db(pick(r)) - to_db(r.analytic)).abs())
            .fold(0.0, f64::max)
    };
    Ok(InterferenceStrength {
        max_abs_diff_nonfading_db: max_diff(|r| r.nonfading),
        max_abs_diff_rayleigh_db: max_diff(|r| r.rayleigh),
        rows,
        n_trials: spec.n_trials,
    })
}

impl InterferenceStrength {
    pub fn to_report(&self) -> CampaignReport {
        let mut t = Table::new(
            "interference_strength",
            "average interference at the victim's subcarrier offsets, normalized by P1",
            &[
                "f",
                "analytic_db",
                "sim_nonfading_db",
                "sim_rayleigh_db",
                "analytic_lin",
                "sim_nonfading_lin",
                "sim_rayleigh_lin",
                "n_trials",
            ],
        );
        for r in &self.rows {
            t.push(vec![
                Cell::Float(r.f),
                Cell::Float(to_db(r.analytic)),
                Cell::Float(to_db(r.nonfading)),
                Cell::Float(to_db(r.rayleigh)),
                Cell::Float(r.analytic),
                Cell::Float(r.nonfading),
                Cell::Float(r.rayleigh),
                Cell::from(self.n_trials),
            ]);
        }
        let mut report = CampaignReport::new(ExperimentKind::InterferenceStrength);
        report.tables.push(t);
        report.meta("max_abs_diff_nonfading_db", self.max_abs_diff_nonfading_db);
        report.meta("max_abs_diff_rayleigh_db", self.max_abs_diff_rayleigh_db);
        report
    }
}

/// Analytic interference spectra for each swept parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamSweep {
    pub base: SweepBase,
    pub sweeps: Vec<(SweepParam, Vec<(f64, PowerSpectrum)>)>,
}

pub const WIDTH_VALUES: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
pub const RHO_VALUES: [f64; 6] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
pub const FFT_VALUES: [f64; 3] = [64.0, 256.0, 1024.0];

/// Sweeps `|Omega_1|`, the CP overhead and the DFT size around the scenario's values.
pub fn run_param_sweep(spec: &ExperimentSpec) -> Result<ParamSweep> {
    spec.validate()?;
    let sc = &spec.scenario;
    let base = SweepBase {
        width: sc.link1.subcarriers.len(),
        rho: sc.cfg.cp_overhead(),
        n_fft: sc.cfg.n_fft(),
        p1: 1.0,
        f_grid: super::grid(0.5, 16.0, 0.25),
    };
    let widths: Vec<f64> = WIDTH_VALUES
        .into_iter()
        .filter(|&w| w as usize <= base.n_fft / 2)
        .collect();
    let sweeps = vec![
        (SweepParam::Width, param_sensitivity(SweepParam::Width, &widths, &base)?),
        (SweepParam::Rho, param_sensitivity(SweepParam::Rho, &RHO_VALUES, &base)?),
        (
            SweepParam::FftSize,
            param_sensitivity(SweepParam::FftSize, &FFT_VALUES, &base)?,
        ),
    ];
    Ok(ParamSweep { base, sweeps })
}

impl ParamSweep {
    pub fn to_report(&self) -> CampaignReport {
        let mut report = CampaignReport::new(ExperimentKind::ParamSweep);
        for (param, results) in &self.sweeps {
            let (name, col) = match param {
                SweepParam::Width => ("param_sweep_width", "width"),
                SweepParam::Rho => ("param_sweep_rho", "rho"),
                SweepParam::FftSize => ("param_sweep_n", "n_fft"),
            };
            let mut t = Table::new(
                name,
                "analytic overall interference per swept value",
                &[col, "f", "cbi_db", "cbi_lin"],
            );
            for (v, spec) in results {
                for (f, p) in spec.iter() {
                    t.push(vec![
                        Cell::Float(*v),
                        Cell::Float(f),
                        Cell::Float(to_db(p)),
                        Cell::Float(p),
                    ]);
                }
            }
            report.tables.push(t);
        }
        report.meta("base_width", self.base.width);
        report.meta("base_rho", self.base.rho);
        report.meta("base_n_fft", self.base.n_fft);
        report
    }
}
