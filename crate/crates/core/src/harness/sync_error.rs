use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::analytic::{cbi_overall, mean_interference_power, sync_error_std, to_db};
use crate::channel::{random_symbols, realize, synthesize_frame, FrameInputs, FreqOffsetModel, ScenarioSpec};
use crate::error::{Error, Result};
use crate::ofdm::Modem;
use crate::rng::{point_seed, trial_rng, Stream};
use crate::sync::{estimate_cfo, make_preamble, multiband_filter, synchronize};

use super::{CampaignReport, Cell, ExperimentKind, ExperimentSpec, Proportion, Table};

/// Data symbols sent after the preamble.
const DATA_SYMBOLS: usize = 2;
/// Link-2 silence before the preamble, in symbols.
const LEAD_IN_SYMBOLS: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct SyncErrorPoint {
    /// `None` when the interferer is switched off.
    pub p_r_db: Option<f64>,
    pub sinr_db: f64,
    pub analytic_std: f64,
    /// Estimator std with the estimate taken at the true preamble body.
    pub sim_std: f64,
    pub mean_error: f64,
    /// Estimator std at the detected frame start, over detected trials.
    pub detected_std: f64,
    pub detected: Proportion,
    /// Detected trials whose frame start is within one CP of the truth.
    pub timing_ok: Proportion,
    /// Largest |frame_start - true body start| among detected trials.
    pub max_timing_error: usize,
    pub failed_trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyncErrorResult {
    pub points: Vec<SyncErrorPoint>,
    pub n_trials: usize,
}

struct TrialOutcome {
    error: f64,
    detected: bool,
    detected_error: f64,
    timing_error: usize,
}

/// CFO error statistics for one interferer level. The intra-link offset is uniform in
/// `[-0.5, 0.5]`; `filtered` applies the multiband filter before synchronization.
///
/// Link 2 is silent for two symbols before its preamble. The estimator is
/// evaluated both at the true preamble body and at the detected frame start.
pub fn sync_error_point(
    scenario: &ScenarioSpec,
    p_r_db: Option<f64>,
    n_trials: usize,
    filtered: bool,
) -> Result<SyncErrorPoint> {
    let mut sc = scenario.clone();
    let label = match p_r_db {
        Some(p) => format!("sync/p_r={p}"),
        None => "sync/off".to_string(),
    };
    sc.seed = point_seed(scenario.seed, &label);
    if let Some(p) = p_r_db {
        sc.set_power_ratio_db(p);
    }
    sc.validate()?;
    let cfg = sc.cfg.clone();
    let modem = Modem::new(&cfg);
    let preamble = make_preamble(&sc.link2, &cfg, sc.seed)?;
    let l = cfg.symbol_len();
    let lead_in = LEAD_IN_SYMBOLS * l;
    let n_symbols = 1 + DATA_SYMBOLS;
    let total = lead_in + n_symbols * l;
    let n_link1 = total.div_ceil(l) + 1;
    let expected_start = lead_in + cfg.n_cp();

    let outcomes: Vec<Result<TrialOutcome>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = realize(&sc, t);
            let mut rng1 = trial_rng(sc.seed, t, Stream::InterfererData);
            let mut rng2 = trial_rng(sc.seed, t, Stream::SignalData);
            let mut rngs = trial_rng(sc.seed, t, Stream::Sync);
            let mut rngn = trial_rng(sc.seed, t, Stream::Noise);
            let cfo: f64 = rngs.gen_range(-0.5..=0.5);
            let mut link1 = random_symbols(&sc.link1, n_link1, &mut rng1)?;
            if p_r_db.is_none() {
                for s in &mut link1 {
                    s.scale(Complex64::new(0.0, 0.0));
                }
            }
            let mut link2 = vec![preamble.freq().clone()];
            link2.extend(random_symbols(&sc.link2, DATA_SYMBOLS, &mut rng2)?);
            let inputs = FrameInputs {
                link1: &link1,
                link2: &link2,
                link2_cfo: cfo,
                lead_in,
                n_symbols,
            };
            let frame = synthesize_frame(&modem, &real, inputs, sc.noise_power_per_subcarrier, &mut rngn)?;
            let rx = if filtered {
                multiband_filter(&frame.samples, &sc.link2.subcarriers, &cfg)
            } else {
                frame.samples
            };
            let error = estimate_cfo(&rx[expected_start..], &cfg)? - cfo;
            let res = synchronize(&rx, &cfg)?;
            Ok(TrialOutcome {
                error,
                detected: res.detected,
                detected_error: res.cfo_estimate - cfo,
                timing_error: res.frame_start.abs_diff(expected_start),
            })
        })
        .collect();

    let mut failed = 0usize;
    let mut detected = 0u64;
    let mut timing_ok = 0u64;
    let mut attempted = 0u64;
    let mut errors = Vec::with_capacity(n_trials);
    let mut detected_errors = Vec::with_capacity(n_trials);
    let mut max_timing_error = 0;
    for o in outcomes {
        match o {
            Ok(o) => {
                attempted += 1;
                errors.push(o.error);
                if o.detected {
                    detected += 1;
                    detected_errors.push(o.detected_error);
                    timing_ok += (o.timing_error <= cfg.n_cp()) as u64;
                    max_timing_error = max_timing_error.max(o.timing_error);
                }
            }
            Err(Error::EstimationFailed(_)) => failed += 1,
            Err(e) => return Err(e),
        }
    }
    let (mean, std) = mean_std(&errors);
    let (_, detected_std) = mean_std(&detected_errors);

    let eps = match sc.freq_offset {
        FreqOffsetModel::Fixed(e) => e,
        FreqOffsetModel::Uniform(_) => 0.0,
    };
    let p_i = match p_r_db {
        Some(_) => {
            let (n, n_cp) = (cfg.n_fft(), cfg.n_cp());
            let omega1 = sc.link1.subcarriers.clone();
            let p1 = sc.link1.power_per_subcarrier;
            mean_interference_power(&sc.link2.subcarriers, |f| cbi_overall(f, &omega1, p1, n, n_cp), eps)
        }
        None => 0.0,
    };
    let sinr = sc.link2.power_per_subcarrier / (p_i + sc.noise_power_per_subcarrier);
    let analytic_std = if sinr.is_finite() {
        sync_error_std(sc.link2.subcarriers.len(), sinr)?
    } else {
        0.0
    };
    Ok(SyncErrorPoint {
        p_r_db,
        sinr_db: to_db(sinr),
        analytic_std,
        sim_std: std,
        mean_error: mean,
        detected_std,
        detected: Proportion::new(detected, attempted),
        timing_ok: Proportion::new(timing_ok, detected),
        max_timing_error,
        failed_trials: failed,
    })
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Filtered synchronization error for every power ratio in the sweep.
pub fn run_sync_error(spec: &ExperimentSpec) -> Result<SyncErrorResult> {
    spec.validate()?;
    let points = spec
        .p_r_db
        .iter()
        .map(|&p| sync_error_point(&spec.scenario, Some(p), spec.n_trials, true))
        .collect::<Result<Vec<_>>>()?;
    Ok(SyncErrorResult {
        points,
        n_trials: spec.n_trials,
    })
}

impl SyncErrorResult {
    pub fn to_report(&self) -> CampaignReport {
        let mut t = Table::new(
            "sync_error",
            "std of the intra-link CFO estimation error (subcarriers) per power ratio",
            &[
                "p_r_db",
                "sinr_db",
                "analytic_std",
                "sim_std",
                "mean_error",
                "detected_std",
                "detection_rate",
                "detection_ci_low",
                "detection_ci_high",
                "timing_ok_rate",
                "max_timing_error",
                "n_trials",
            ],
        );
        let mut failed = 0;
        for p in &self.points {
            let (lo, hi) = p.detected.interval();
            t.push(vec![
                Cell::Float(p.p_r_db.unwrap_or(f64::NEG_INFINITY)),
                Cell::Float(p.sinr_db),
                Cell::Float(p.analytic_std),
                Cell::Float(p.sim_std),
                Cell::Float(p.mean_error),
                Cell::Float(p.detected_std),
                Cell::Float(p.detected.estimate()),
                Cell::Float(lo),
                Cell::Float(hi),
                Cell::Float(p.timing_ok.estimate()),
                Cell::from(p.max_timing_error),
                Cell::from(self.n_trials),
            ]);
            failed += p.failed_trials;
        }
        let mut report = CampaignReport::new(ExperimentKind::SyncError);
        report.tables.push(t);
        report.failed_trials = failed;
        report
    }
}
