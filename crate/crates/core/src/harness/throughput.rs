use std::fmt;

use num_complex::Complex64;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channel::{
    random_symbols, realize, synthesize_frame, ChannelModel, FrameInputs, FreqOffsetModel, ScenarioSpec,
};
use crate::error::{arg_err, Result};
use crate::mitigation::{
    csc_decode, csc_encode, edge_subcarriers, fgb_allocate, isc_decode, isc_edge_pairs, isc_encode, CscSelector,
};
use crate::ofdm::{qpsk_decide, FreqSymbol, LinkSpec, Modem, SubcarrierSet};
use crate::rng::{point_seed, trial_rng, Stream};

use super::{CampaignReport, Cell, ExperimentKind, ExperimentSpec, Proportion, Table};

/// One concrete mitigation setting, applied identically by both links.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeFormat {
    None,
    /// Null subcarriers between the links.
    Fgb {
        gap: usize,
    },
    /// Edge subcarriers of each link grouped into antipodal pairs (even count).
    Isc {
        coded: usize,
    },
    /// Edge subcarriers of each link coded across symbol pairs.
    Csc {
        coded: usize,
    },
}

impl SchemeFormat {
    pub fn scheme(&self) -> &'static str {
        match self {
            SchemeFormat::None => "none",
            SchemeFormat::Fgb { .. } => "fgb",
            SchemeFormat::Isc { .. } => "isc",
            SchemeFormat::Csc { .. } => "csc",
        }
    }

    /// Guard width for FGB, coded subcarriers for ISC/CSC.
    pub fn parameter(&self) -> usize {
        match *self {
            SchemeFormat::None => 0,
            SchemeFormat::Fgb { gap } => gap,
            SchemeFormat::Isc { coded } | SchemeFormat::Csc { coded } => coded,
        }
    }
}

impl fmt::Display for SchemeFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.scheme(), self.parameter())
    }
}

/// Every format searched for `scheme` over a shared span of `total_span` subcarriers.
pub fn throughput_formats(scheme: &str, total_span: usize) -> Result<Vec<SchemeFormat>> {
    let half = total_span / 2;
    Ok(match scheme {
        "none" => vec![SchemeFormat::None],
        "fgb" => (0..=total_span - 2).map(|gap| SchemeFormat::Fgb { gap }).collect(),
        "isc" => (0..=half).step_by(2).map(|coded| SchemeFormat::Isc { coded }).collect(),
        "csc" => (0..=half).map(|coded| SchemeFormat::Csc { coded }).collect(),
        other => return arg_err(format!("unknown scheme '{other}'")),
    })
}

/// Bit accounting for one packet of link 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialTally {
    pub capacity_bits: u64,
    pub overhead_bits: u64,
    pub correct_bits: u64,
    pub error_bits: u64,
    /// Payload bits if the whole packet decoded correctly, else zero.
    pub delivered_bits: u64,
}

impl TrialTally {
    pub fn success(&self) -> bool {
        self.error_bits == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FormatOutcome {
    pub format: SchemeFormat,
    pub packets: Proportion,
    pub payload_bits: u64,
    pub totals: TrialTally,
    /// Delivered bits per OFDM symbol per subcarrier of the shared span.
    pub throughput: f64,
    pub ci: (f64, f64),
    pub failed_trials: usize,
}

struct Plan {
    link1: LinkSpec,
    link2: LinkSpec,
    isc1: Vec<(i32, i32)>,
    isc2: Vec<(i32, i32)>,
    csc1: Option<SubcarrierSet>,
    csc2: Option<SubcarrierSet>,
}

fn plan(base: &ScenarioSpec, format: SchemeFormat, total_span: usize) -> Result<Plan> {
    let gap = match format {
        SchemeFormat::Fgb { gap } => gap,
        _ => 0,
    };
    let (o1, o2) = fgb_allocate(total_span, gap)?;
    let mut link1 = base.link1.clone();
    let mut link2 = base.link2.clone();
    link1.subcarriers = o1;
    link2.subcarriers = o2;
    let toward2 = link2.subcarriers.first();
    let toward1 = link1.subcarriers.last();
    let mut p = Plan {
        isc1: Vec::new(),
        isc2: Vec::new(),
        csc1: None,
        csc2: None,
        link1,
        link2,
    };
    match format {
        SchemeFormat::Isc { coded } if coded > 0 => {
            if coded % 2 != 0 {
                return arg_err("ISC needs an even number of coded subcarriers");
            }
            p.isc1 = isc_edge_pairs(&p.link1.subcarriers, coded / 2, toward2)?;
            p.isc2 = isc_edge_pairs(&p.link2.subcarriers, coded / 2, toward1)?;
        }
        SchemeFormat::Csc { coded } if coded > 0 => {
            p.csc1 = Some(SubcarrierSet::new(edge_subcarriers(
                &p.link1.subcarriers,
                coded,
                toward2,
            )?)?);
            p.csc2 = Some(SubcarrierSet::new(edge_subcarriers(
                &p.link2.subcarriers,
                coded,
                toward1,
            )?)?);
        }
        _ => {}
    }
    Ok(p)
}

fn encode_stream(
    raw: &[FreqSymbol],
    isc: &[(i32, i32)],
    csc: Option<&SubcarrierSet>,
    base: &ScenarioSpec,
) -> Result<Vec<FreqSymbol>> {
    if !isc.is_empty() {
        return raw.iter().map(|s| isc_encode(s, isc)).collect();
    }
    match csc {
        Some(coded) => {
            let mut out = Vec::with_capacity(raw.len());
            for pair in raw.chunks(2) {
                if let [a, b] = pair {
                    let (x, y) = csc_encode((a, b), coded, &base.cfg)?;
                    out.push(x);
                    out.push(y);
                } else {
                    out.push(pair[0].clone());
                }
            }
            Ok(out)
        }
        None => Ok(raw.to_vec()),
    }
}

/// Payload positions of symbol `j`: subcarriers whose bits are new data.
fn carries_payload(p: &Plan, j: usize, k: i32) -> bool {
    if p.isc2.iter().any(|&(_, hi)| hi == k) {
        return false;
    }
    match &p.csc2 {
        Some(coded) => !(j % 2 == 1 && coded.contains(k)),
        None => true,
    }
}

fn count_bits(tx: &FreqSymbol, rx: &FreqSymbol, keep: impl Fn(i32) -> bool) -> (u64, u64) {
    let mut ok = 0;
    let mut bad = 0;
    for ((k, s), r) in tx.iter().zip(rx.values()) {
        if !keep(k) {
            continue;
        }
        let (a0, a1) = qpsk_decide(*r);
        let (b0, b1) = qpsk_decide(s);
        let e = (a0 != b0) as u64 + (a1 != b1) as u64;
        bad += e;
        ok += 2 - e;
    }
    (ok, bad)
}

fn run_packet(
    sc: &ScenarioSpec,
    p: &Plan,
    modem: &Modem,
    t: u64,
    capacity_bits: u64,
    payload_bits: u64,
) -> Result<TrialTally> {
    let cfg = &sc.cfg;
    let n_sym = sc.packet_len;
    let real = realize(sc, t);
    let mut rng1: ChaCha8Rng = trial_rng(sc.seed, t, Stream::InterfererData);
    let mut rng2 = trial_rng(sc.seed, t, Stream::SignalData);
    let mut rngn = trial_rng(sc.seed, t, Stream::Noise);
    let raw1 = random_symbols(&p.link1, n_sym + 2, &mut rng1)?;
    let raw2 = random_symbols(&p.link2, n_sym, &mut rng2)?;
    let tx1 = encode_stream(&raw1, &p.isc1, p.csc1.as_ref(), sc)?;
    let tx2 = encode_stream(&raw2, &p.isc2, p.csc2.as_ref(), sc)?;
    let inputs = FrameInputs {
        link1: &tx1,
        link2: &tx2,
        link2_cfo: 0.0,
        lead_in: 0,
        n_symbols: n_sym,
    };
    let frame = synthesize_frame(modem, &real, inputs, sc.noise_power_per_subcarrier, &mut rngn)?;
    let inv_h = Complex64::new(1.0, 0.0) / real.h2;
    let mut rx: Vec<FreqSymbol> = Vec::with_capacity(n_sym);
    for j in 0..n_sym {
        let mut r = modem.demodulate_body(frame.window(j, cfg), &p.link2.subcarriers)?;
        r.scale(inv_h);
        if !p.isc2.is_empty() {
            r = isc_decode(&r, &p.isc2)?;
        }
        rx.push(r);
    }
    if let Some(coded) = &p.csc2 {
        for q in (0..n_sym.saturating_sub(1)).step_by(2) {
            let e0 = modem
                .demodulate_body(frame.interference_window(q, cfg), coded)?
                .energy();
            let e1 = modem
                .demodulate_body(frame.interference_window(q + 1, cfg), coded)?
                .energy();
            let (d0, d1) = csc_decode(
                (&rx[q], &rx[q + 1]),
                coded,
                cfg,
                CscSelector::Genie { interference: (e0, e1) },
            )?;
            rx[q] = d0;
            rx[q + 1] = d1;
        }
    }
    let mut correct = 0;
    let mut errors = 0;
    for j in 0..n_sym {
        let (ok, bad) = count_bits(&raw2[j], &rx[j], |k| carries_payload(p, j, k));
        correct += ok;
        errors += bad;
    }
    debug_assert_eq!(correct + errors, payload_bits);
    Ok(TrialTally {
        capacity_bits,
        overhead_bits: capacity_bits - payload_bits,
        correct_bits: correct,
        error_bits: errors,
        delivered_bits: if errors == 0 { payload_bits } else { 0 },
    })
}

/// Runs `n_trials` packets of link 2 with `format` on both links.
///
/// Capacity is link 2's nominal share `ceil(span / 2)` subcarriers for every
/// symbol; throughput divides delivered bits by `symbols * span`.
pub fn evaluate_format(
    sc: &ScenarioSpec,
    format: SchemeFormat,
    total_span: usize,
    n_trials: usize,
) -> Result<FormatOutcome> {
    sc.validate()?;
    let p = plan(sc, format, total_span)?;
    let mut check = sc.clone();
    check.link1 = p.link1.clone();
    check.link2 = p.link2.clone();
    check.validate()?;
    let modem = Modem::new(&sc.cfg);
    let n_sym = sc.packet_len;
    let capacity_bits = (n_sym * total_span.div_ceil(2) * 2) as u64;
    let payload_bits: u64 = (0..n_sym)
        .map(|j| {
            p.link2
                .subcarriers
                .iter()
                .filter(|&k| carries_payload(&p, j, k))
                .count() as u64
                * 2
        })
        .sum();
    let tallies: Vec<Result<TrialTally>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| run_packet(sc, &p, &modem, t, capacity_bits, payload_bits))
        .collect();
    let mut totals = TrialTally::default();
    let mut successes = 0u64;
    let mut done = 0u64;
    let mut failed = 0usize;
    for r in tallies {
        match r {
            Ok(t) => {
                done += 1;
                successes += t.success() as u64;
                totals.capacity_bits += t.capacity_bits;
                totals.overhead_bits += t.overhead_bits;
                totals.correct_bits += t.correct_bits;
                totals.error_bits += t.error_bits;
                totals.delivered_bits += t.delivered_bits;
            }
            Err(_) => failed += 1,
        }
    }
    let packets = Proportion::new(successes, done);
    let scale = payload_bits as f64 / (n_sym * total_span) as f64;
    let (lo, hi) = packets.interval();
    Ok(FormatOutcome {
        format,
        packets,
        payload_bits,
        totals,
        throughput: packets.estimate() * scale,
        ci: (lo * scale, hi * scale),
        failed_trials: failed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputPoint {
    pub p_r_db: f64,
    pub eps_max: f64,
    pub scheme: &'static str,
    /// Format with the highest throughput.
    pub best: FormatOutcome,
    pub searched: Vec<FormatOutcome>,
}

fn search(
    sc: &ScenarioSpec,
    scheme: &'static str,
    total_span: usize,
    n_trials: usize,
) -> Result<(FormatOutcome, Vec<FormatOutcome>)> {
    let formats = throughput_formats(scheme, total_span)?;
    let searched = formats
        .into_iter()
        .map(|f| evaluate_format(sc, f, total_span, n_trials))
        .collect::<Result<Vec<_>>>()?;
    let best = searched
        .iter()
        .fold(None::<&FormatOutcome>, |b, o| match b {
            Some(b) if b.throughput >= o.throughput => Some(b),
            _ => Some(o),
        })
        .expect("at least one format")
        .clone();
    Ok((best, searched))
}

fn point_scenario(spec: &ExperimentSpec, p_r_db: f64, eps_max: f64) -> ScenarioSpec {
    let mut sc = spec.scenario.clone();
    sc.channel = ChannelModel::non_fading();
    sc.freq_offset = FreqOffsetModel::Uniform(eps_max);
    sc.set_power_ratio_db(p_r_db);
    sc.seed = point_seed(
        spec.scenario.seed,
        &format!("throughput/p_r={p_r_db}/eps_max={eps_max}"),
    );
    sc
}

fn run_points(spec: &ExperimentSpec, eps_list: &[f64], schemes: &[&'static str]) -> Result<Vec<ThroughputPoint>> {
    let mut points = Vec::new();
    for &p_r in &spec.p_r_db {
        for &eps in eps_list {
            let sc = point_scenario(spec, p_r, eps);
            for &scheme in schemes {
                let (best, searched) = search(&sc, scheme, spec.total_span, spec.n_trials)?;
                points.push(ThroughputPoint {
                    p_r_db: p_r,
                    eps_max: eps,
                    scheme,
                    best,
                    searched,
                });
            }
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThroughputResult {
    pub points: Vec<ThroughputPoint>,
    pub n_trials: usize,
}

/// Throughput inter-link offset bound.
pub const THROUGHPUT_EPS_MAX: f64 = 0.1;

impl ThroughputResult {
    pub fn get(&self, scheme: &str, p_r_db: f64) -> Option<&ThroughputPoint> {
        self.points.iter().find(|p| p.scheme == scheme && p.p_r_db == p_r_db)
    }

    pub fn to_report(&self) -> CampaignReport {
        points_report(ExperimentKind::Throughput, "throughput", &self.points, self.n_trials)
    }
}

/// Link 2 throughput per scheme and power ratio, each scheme at its best format.
pub fn run_throughput(spec: &ExperimentSpec) -> Result<ThroughputResult> {
    spec.validate()?;
    let points = run_points(spec, &[THROUGHPUT_EPS_MAX], &["none", "fgb", "isc", "csc"])?;
    Ok(ThroughputResult {
        points,
        n_trials: spec.n_trials,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityResult {
    pub points: Vec<ThroughputPoint>,
    pub n_trials: usize,
}

impl SensitivityResult {
    pub fn get(&self, scheme: &str, p_r_db: f64, eps_max: f64) -> Option<&ThroughputPoint> {
        self.points
            .iter()
            .find(|p| p.scheme == scheme && p.p_r_db == p_r_db && p.eps_max == eps_max)
    }

    pub fn to_report(&self) -> CampaignReport {
        points_report(
            ExperimentKind::FreqOffsetSensitivity,
            "freq_offset_sensitivity",
            &self.points,
            self.n_trials,
        )
    }
}

/// Throughput of CSC and FGB (and the unmitigated link) versus the offset bound.
pub fn run_freq_offset_sensitivity(spec: &ExperimentSpec) -> Result<SensitivityResult> {
    spec.validate()?;
    let points = run_points(spec, &spec.eps_max, &["none", "fgb", "csc"])?;
    Ok(SensitivityResult {
        points,
        n_trials: spec.n_trials,
    })
}

fn points_report(kind: ExperimentKind, name: &str, points: &[ThroughputPoint], n_trials: usize) -> CampaignReport {
    let mut best = Table::new(
        name,
        "link 2 throughput (bits per symbol per span subcarrier) at each scheme's best format",
        &[
            "p_r_db",
            "eps_max",
            "scheme",
            "format_param",
            "throughput",
            "ci_low",
            "ci_high",
            "packet_success",
            "payload_bits",
            "n_trials",
        ],
    );
    let mut all = Table::new(
        &format!("{name}_formats"),
        "every searched format with bit accounting totals",
        &[
            "p_r_db",
            "eps_max",
            "scheme",
            "format_param",
            "throughput",
            "ci_low",
            "ci_high",
            "capacity_bits",
            "overhead_bits",
            "correct_bits",
            "error_bits",
            "delivered_bits",
        ],
    );
    let mut failed = 0;
    for p in points {
        let b = &p.best;
        best.push(vec![
            Cell::Float(p.p_r_db),
            Cell::Float(p.eps_max),
            Cell::from(p.scheme),
            Cell::from(b.format.parameter()),
            Cell::Float(b.throughput),
            Cell::Float(b.ci.0),
            Cell::Float(b.ci.1),
            Cell::Float(b.packets.estimate()),
            Cell::Int(b.payload_bits as i64),
            Cell::from(n_trials),
        ]);
        for o in &p.searched {
            failed += o.failed_trials;
            all.push(vec![
                Cell::Float(p.p_r_db),
                Cell::Float(p.eps_max),
                Cell::from(p.scheme),
                Cell::from(o.format.parameter()),
                Cell::Float(o.throughput),
                Cell::Float(o.ci.0),
                Cell::Float(o.ci.1),
                Cell::Int(o.totals.capacity_bits as i64),
                Cell::Int(o.totals.overhead_bits as i64),
                Cell::Int(o.totals.correct_bits as i64),
                Cell::Int(o.totals.error_bits as i64),
                Cell::Int(o.totals.delivered_bits as i64),
            ]);
        }
    }
    let mut report = CampaignReport::new(kind);
    report.tables.push(best);
    report.tables.push(all);
    report.failed_trials = failed;
    report
}
