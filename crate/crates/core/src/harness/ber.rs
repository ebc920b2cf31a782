use rayon::prelude::*;

use crate::channel::{random_symbols, realize, synthesize_frame, ChannelModel, FrameInputs, ScenarioSpec};
use crate::error::Result;
use crate::ofdm::{qpsk_decide, Modem};
use crate::rng::{point_seed, trial_rng, Stream};

use super::{CampaignReport, Cell, ExperimentKind, ExperimentSpec, Proportion, Table};

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub p_r_db: f64,
    pub k_factor: f64,
    pub subcarriers: Vec<i32>,
    /// Bit errors per subcarrier.
    pub errors: Vec<u64>,
    /// Bits sent per subcarrier.
    pub bits: u64,
}

impl BerCurve {
    pub fn ber(&self, i: usize) -> Proportion {
        Proportion::new(self.errors[i], self.bits)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerResult {
    /// Swept power ratio under the scenario's fading.
    pub by_p_r: Vec<BerCurve>,
    /// Swept K-factor at the last power ratio of the sweep.
    pub by_k: Vec<BerCurve>,
    pub n_trials: usize,
}

/// Per-subcarrier BER of link 2 with perfect synchronization and known channel.
pub fn ber_curve(scenario: &ScenarioSpec, n_trials: usize, label: &str) -> Result<BerCurve> {
    let mut sc = scenario.clone();
    sc.seed = point_seed(scenario.seed, label);
    sc.validate()?;
    let cfg = sc.cfg.clone();
    let modem = Modem::new(&cfg);
    let n_sym = sc.packet_len;
    let width = sc.link2.subcarriers.len();
    let per_trial: Vec<Result<Vec<u64>>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = realize(&sc, t);
            let mut rng1 = trial_rng(sc.seed, t, Stream::InterfererData);
            let mut rng2 = trial_rng(sc.seed, t, Stream::SignalData);
            let mut rngn = trial_rng(sc.seed, t, Stream::Noise);
            let link1 = random_symbols(&sc.link1, n_sym + 1, &mut rng1)?;
            let link2 = random_symbols(&sc.link2, n_sym, &mut rng2)?;
            let inputs = FrameInputs {
                link1: &link1,
                link2: &link2,
                link2_cfo: 0.0,
                lead_in: 0,
                n_symbols: n_sym,
            };
            let frame = synthesize_frame(&modem, &real, inputs, sc.noise_power_per_subcarrier, &mut rngn)?;
            let mut errs = vec![0u64; width];
            for (j, tx) in link2.iter().enumerate() {
                let rx = modem.demodulate_body(frame.window(j, &cfg), &sc.link2.subcarriers)?;
                for (i, (r, s)) in rx.values().iter().zip(tx.values()).enumerate() {
                    let (a0, a1) = qpsk_decide(r / real.h2);
                    let (b0, b1) = qpsk_decide(*s);
                    errs[i] += (a0 != b0) as u64 + (a1 != b1) as u64;
                }
            }
            Ok(errs)
        })
        .collect();
    let mut errors = vec![0u64; width];
    for r in per_trial {
        for (e, x) in errors.iter_mut().zip(r?) {
            *e += x;
        }
    }
    let k_factor = match sc.channel.kind {
        crate::channel::FadingKind::NonFading => f64::INFINITY,
        crate::channel::FadingKind::Rician { k_factor } => k_factor,
    };
    Ok(BerCurve {
        p_r_db: sc.power_ratio_db(),
        k_factor,
        subcarriers: sc.link2.subcarriers.indices().to_vec(),
        errors,
        bits: (2 * n_sym * n_trials) as u64,
    })
}

/// Power-ratio sweep under Rayleigh fading with tied channels, then a K-factor
/// sweep at the largest power ratio with independent channels per link.
pub fn run_ber(spec: &ExperimentSpec) -> Result<BerResult> {
    spec.validate()?;
    let mut by_p_r = Vec::with_capacity(spec.p_r_db.len());
    for &p in &spec.p_r_db {
        let mut sc = spec.scenario.clone();
        sc.channel = ChannelModel::rayleigh();
        sc.set_power_ratio_db(p);
        by_p_r.push(ber_curve(&sc, spec.n_trials, &format!("ber/p_r={p}"))?);
    }
    let p_k = spec.p_r_db.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut by_k = Vec::with_capacity(spec.k_factors.len());
    for &k in &spec.k_factors {
        let mut sc = spec.scenario.clone();
        sc.channel = ChannelModel::rician(k).untied();
        sc.set_power_ratio_db(p_k);
        by_k.push(ber_curve(&sc, spec.n_trials, &format!("ber/k={k}"))?);
    }
    Ok(BerResult {
        by_p_r,
        by_k,
        n_trials: spec.n_trials,
    })
}

impl BerResult {
    pub fn to_report(&self) -> CampaignReport {
        let cols = [
            "p_r_db",
            "k_factor",
            "subcarrier",
            "ber",
            "ber_ci_low",
            "ber_ci_high",
            "bit_errors",
            "bits",
            "n_trials",
        ];
        let mut report = CampaignReport::new(ExperimentKind::Ber);
        for (name, curves) in [("ber_by_p_r", &self.by_p_r), ("ber_by_k", &self.by_k)] {
            let mut t = Table::new(name, "link 2 bit error rate per subcarrier", &cols);
            for c in curves {
                for (i, &k) in c.subcarriers.iter().enumerate() {
                    let p = c.ber(i);
                    let (lo, hi) = p.interval();
                    t.push(vec![
                        Cell::Float(c.p_r_db),
                        Cell::Float(c.k_factor),
                        Cell::Int(k as i64),
                        Cell::Float(p.estimate()),
                        Cell::Float(lo),
                        Cell::Float(hi),
                        Cell::Int(c.errors[i] as i64),
                        Cell::Int(c.bits as i64),
                        Cell::from(self.n_trials),
                    ]);
                }
            }
            report.tables.push(t);
        }
        report
    }
}
