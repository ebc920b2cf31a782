//! The reproduction suite: ten pass/fail criteria, each with the tables that
//! back its verdict.

use std::time::Instant;

use rayon::ThreadPoolBuilder;
use xband_core::analytic::{
    self, cbi_case_a, cbi_case_b_avg, cbi_overall, decompose_sig_ici, mean_interference_power, min_guardband,
    step_average, sync_error_std, to_db, SweepBase, SweepParam,
};
use xband_core::channel::{MismatchModel, ScenarioSpec};
use xband_core::harness::{
    self, measure_scheme, run_freq_offset_sensitivity, run_interference_strength, run_mitigation_compare,
    run_throughput, Cell, ExperimentKind, ExperimentSpec, FormatOutcome, Table,
};
use xband_core::mitigation::MitigationScheme;
use xband_core::{OfdmConfig, SubcarrierSet};

use crate::error::Result;
use crate::oracle;
use crate::output::render_table;

/// Reference overall interference at f = 1..8, in dB.
pub const OVERALL_REF_DB: [f64; 8] = [-9.1, -13.5, -16.1, -17.8, -19.2, -20.3, -21.3, -22.1];

/// Reference minimum guardbands: rows CIR 5, 10, 15 dB; columns p_r 0, 3, 6, 9 dB.
pub const GUARD_REF_CIR_DB: [f64; 3] = [5.0, 10.0, 15.0];
pub const GUARD_REF_P_R_DB: [f64; 4] = [0.0, 3.0, 6.0, 9.0];
pub const GUARD_REF: [[f64; 4]; 3] = [[0.0, 0.0, 0.6, 1.6], [0.2, 1.0, 2.0, 4.0], [1.8, 3.7, 5.9, 10.0]];

pub const OVERALL_TOL_DB: f64 = 0.05;
/// Simulation vs analysis at the full trial count.
pub const SIM_TOL_DB: f64 = 0.2;
/// Simulation vs analysis for the reduced trial count.
pub const SIM_TOL_REDUCED_DB: f64 = 0.4;
/// Trial count at which the full tolerance applies.
pub const SIM_FULL_TRIALS: usize = 10_000;
pub const CASE_GAP_DB: f64 = 3.0;
pub const CASE_GAP_TOL_DB: f64 = 0.5;
pub const N_SWEEP_TOL_DB: f64 = 0.1;
pub const GUARD_TOL: f64 = 0.2;
pub const ISC_TOL_DB: f64 = 1.0;
pub const CSC_NULL_DBC: f64 = -60.0;
pub const FGB_TOL_DB: f64 = 0.2;
pub const GAIN_MIN: f64 = 1.8;
pub const FGB_VARIATION: f64 = 0.05;
pub const ORACLE_TOL_DB: f64 = 0.1;

#[derive(Debug, Clone)]
pub struct ReproduceOptions {
    pub seed: u64,
    /// Trials for the interference-strength and spectrum comparisons.
    pub trials: usize,
    /// Packets per format in the throughput searches.
    pub throughput_trials: usize,
    /// Trials per campaign in the determinism check.
    pub determinism_trials: usize,
}

impl ReproduceOptions {
    pub fn new(seed: u64, trials: usize) -> Self {
        Self {
            seed,
            trials,
            throughput_trials: trials,
            determinism_trials: trials.clamp(1, 200),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Each sub-check with its measured value and verdict.
    pub checks: Vec<SubCheck>,
    pub tables: Vec<Table>,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct SubCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    /// One line: verdict, id, title and the failing (or all) sub-checks.
    pub fn summary(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let shown: Vec<&SubCheck> = if self.passed {
            self.checks.iter().collect()
        } else {
            self.checks.iter().filter(|c| !c.passed).collect()
        };
        let details: Vec<String> = shown.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        format!(
            "[{verdict}] criterion {} {}: {}",
            self.id,
            self.title,
            details.join("; ")
        )
    }
}

struct Builder {
    checks: Vec<SubCheck>,
    tables: Vec<Table>,
}

impl Builder {
    fn new() -> Self {
        Self {
            checks: Vec::new(),
            tables: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(SubCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    fn finish(self, id: u8, title: &'static str, start: Instant) -> CriterionResult {
        CriterionResult {
            id,
            title,
            passed: !self.checks.is_empty() && self.checks.iter().all(|c| c.passed),
            checks: self.checks,
            tables: self.tables,
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

pub const TITLES: [&str; 10] = [
    "overall interference column",
    "simulation matches analysis",
    "case B exceeds case A by 3 dB",
    "parameter sweeps",
    "worked sync/ICI example",
    "minimum guardband table",
    "mitigation spectra",
    "throughput properties",
    "closed forms match oracles",
    "byte-identical output",
];

fn default_layout() -> (SubcarrierSet, SubcarrierSet, OfdmConfig) {
    let sc = ScenarioSpec::default();
    (sc.link1.subcarriers, sc.link2.subcarriers, sc.cfg)
}

pub fn criterion_1() -> CriterionResult {
    let start = Instant::now();
    let (o1, _, cfg) = default_layout();
    let mut b = Builder::new();
    let mut t = Table::new(
        "overall_reference",
        "overall interference at integer offsets vs reference",
        &["f", "analytic_db", "reference_db", "abs_err_db"],
    );
    let mut worst: f64 = 0.0;
    for (i, want) in OVERALL_REF_DB.iter().enumerate() {
        let f = (i + 1) as f64;
        let got = to_db(cbi_overall(f, &o1, 1.0, cfg.n_fft(), cfg.n_cp()));
        let err = (got - want).abs();
        worst = worst.max(err);
        t.push(vec![
            Cell::Float(f),
            Cell::Float(got),
            Cell::Float(*want),
            Cell::Float(err),
        ]);
    }
    b.tables.push(t);
    b.check(
        "max error",
        worst <= OVERALL_TOL_DB,
        format!("{worst:.4} dB (tol {OVERALL_TOL_DB})"),
    );
    let secs = start.elapsed().as_secs_f64();
    b.check("runtime", secs < 1.0, format!("{secs:.4} s (limit 1 s)"));
    b.finish(1, TITLES[0], start)
}

pub fn criterion_2(opts: &ReproduceOptions) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut spec = ExperimentSpec::new(ExperimentKind::InterferenceStrength);
    spec.n_trials = opts.trials;
    spec.scenario.seed = opts.seed;
    let res = run_interference_strength(&spec)?;
    let tol = if opts.trials >= SIM_FULL_TRIALS {
        SIM_TOL_DB
    } else {
        SIM_TOL_REDUCED_DB
    };
    let mut b = Builder::new();
    b.tables.extend(res.to_report().tables);
    let nf = res.max_abs_diff_nonfading_db;
    let ry = res.max_abs_diff_rayleigh_db;
    b.check(
        "non-fading",
        nf <= tol,
        format!("max |sim - analytic| {nf:.3} dB at {} trials (tol {tol})", opts.trials),
    );
    b.check(
        "rayleigh",
        ry <= tol,
        format!("max |sim - analytic| {ry:.3} dB at {} trials (tol {tol})", opts.trials),
    );
    Ok(b.finish(2, TITLES[1], start))
}

pub fn criterion_3() -> CriterionResult {
    let start = Instant::now();
    let (o1, _, cfg) = default_layout();
    let n = cfg.n_fft();
    let mut b = Builder::new();
    let mut t = Table::new(
        "case_gap",
        "step-averaged case B minus case A",
        &["f", "case_a_db", "case_b_db", "gap_db"],
    );
    let mut gaps = Vec::new();
    for f in 1..=8 {
        let c = f as f64;
        let a = to_db(step_average(c, |x| cbi_case_a(x, &o1, 1.0, n)));
        let bb = to_db(step_average(c, |x| cbi_case_b_avg(x, &o1, 1.0, n)));
        gaps.push(bb - a);
        t.push(vec![
            Cell::Float(c),
            Cell::Float(a),
            Cell::Float(bb),
            Cell::Float(bb - a),
        ]);
    }
    b.tables.push(t);
    let lo = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    b.check(
        "gap range",
        gaps.iter().all(|g| (g - CASE_GAP_DB).abs() <= CASE_GAP_TOL_DB),
        format!("{lo:.3}..{hi:.3} dB (want {CASE_GAP_DB} +/- {CASE_GAP_TOL_DB})"),
    );
    b.finish(3, TITLES[2], start)
}

fn sweep_table(name: &str, col: &str, rows: &[(f64, analytic::PowerSpectrum)]) -> Table {
    let mut t = Table::new(name, "overall interference per swept value", &[col, "f", "cbi_db"]);
    for (v, s) in rows {
        for (f, p) in s.iter() {
            t.push(vec![Cell::Float(*v), Cell::Float(f), Cell::Float(to_db(p))]);
        }
    }
    t
}

pub fn criterion_4() -> Result<CriterionResult> {
    let start = Instant::now();
    let mut b = Builder::new();
    let base = SweepBase::default();

    let rho = analytic::param_sensitivity(SweepParam::Rho, &[0.0, 0.5], &base)?;
    let drops: Vec<f64> = base
        .f_grid
        .iter()
        .enumerate()
        .filter(|(_, f)| f.fract() == 0.0)
        .map(|(i, _)| to_db(rho[0].1.values()[i]) - to_db(rho[1].1.values()[i]))
        .collect();
    let worst = drops.iter().map(|d| (d - 3.0).abs()).fold(0.0, f64::max);
    b.check(
        "rho 0 -> 0.5",
        worst <= 0.5,
        format!("reduction within {worst:.3} dB of 3 dB at integer f (tol 0.5)"),
    );
    b.tables.push(sweep_table("sweep_rho", "rho", &rho));

    let sizes = analytic::param_sensitivity(SweepParam::FftSize, &[64.0, 256.0, 1024.0], &base)?;
    let pair_gap = |i: usize, j: usize| {
        sizes[i]
            .1
            .values()
            .iter()
            .zip(sizes[j].1.values())
            .map(|(a, c)| (to_db(*a) - to_db(*c)).abs())
            .fold(0.0, f64::max)
    };
    let g = [(0, 1, pair_gap(0, 1)), (0, 2, pair_gap(0, 2)), (1, 2, pair_gap(1, 2))];
    let worst_n = g.iter().map(|x| x.2).fold(0.0, f64::max);
    let detail = g
        .iter()
        .map(|(i, j, d)| format!("N={} vs {}: {d:.3} dB", sizes[*i].0, sizes[*j].0))
        .collect::<Vec<_>>()
        .join(", ");
    b.check(
        "N curves agree",
        worst_n <= N_SWEEP_TOL_DB,
        format!("{detail} (tol {N_SWEEP_TOL_DB})"),
    );
    b.tables.push(sweep_table("sweep_n_fft", "n_fft", &sizes));

    let widths: Vec<f64> = (1..=16).map(f64::from).collect();
    let by_l = analytic::param_sensitivity(SweepParam::Width, &widths, &base)?;
    let monotone = by_l
        .windows(2)
        .all(|w| w[0].1.values().iter().zip(w[1].1.values()).all(|(a, c)| c >= a));
    b.check(
        "non-decreasing in L",
        monotone,
        format!("L = 1..16 on {} grid points", base.f_grid.len()),
    );
    b.tables.push(sweep_table("sweep_width", "width", &by_l));
    Ok(b.finish(4, TITLES[3], start))
}

pub fn criterion_5() -> Result<CriterionResult> {
    let start = Instant::now();
    let (o1, o2, cfg) = default_layout();
    let (n, n_cp) = (cfg.n_fft(), cfg.n_cp());
    let noise = ScenarioSpec::default().noise_power_per_subcarrier;
    let mut b = Builder::new();
    let overall = |f: f64| cbi_overall(f, &o1, 1.0, n, n_cp);

    let p_i = mean_interference_power(&o2, overall, 0.0);
    let p_i_db = to_db(p_i);
    b.check(
        "P_I",
        (p_i_db + 15.1).abs() <= 0.1,
        format!("{p_i_db:.3} dB (want -15.1 +/- 0.1)"),
    );
    let sinr = 1.0 / (p_i + noise);
    let std = sync_error_std(o2.len(), sinr)?;
    b.check(
        "df_std",
        (std - 0.028).abs() <= 0.001,
        format!("{std:.5} at SINR {:.2} dB (want 0.028 +/- 0.001)", to_db(sinr)),
    );

    let mut t = Table::new(
        "worked_example",
        "signal and ICI power at twice the CFO std",
        &["l", "delta_f", "p_sig_db", "p_ici_db"],
    );
    let df = 2.0 * std;
    let mut sig = Vec::new();
    let mut ici = Vec::new();
    for l in o2.iter() {
        let (s, i) = decompose_sig_ici(df, l, &o2, 1.0, n)?;
        sig.push(to_db(s));
        ici.push(to_db(i));
        t.push(vec![
            Cell::Int(l as i64),
            Cell::Float(df),
            Cell::Float(to_db(s)),
            Cell::Float(to_db(i)),
        ]);
    }
    b.tables.push(t);
    let p_sig = sig[0];
    b.check(
        "P_SIG",
        (p_sig + 0.1).abs() <= 0.05,
        format!("{p_sig:.4} dB (want -0.1 +/- 0.05)"),
    );
    let lo = ici.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ici.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    b.check(
        "P_ICI",
        lo > -23.7 && hi < -20.9,
        format!("{lo:.2}..{hi:.2} dB (want within -23.7..-20.9)"),
    );
    let c1 = to_db(overall(1.0));
    let c8 = to_db(overall(8.0));
    b.check(
        "P_CBI(1)",
        (c1 + 9.1).abs() <= 0.05,
        format!("{c1:.3} dB (want -9.1 +/- 0.05)"),
    );
    b.check(
        "P_CBI(8)",
        (c8 + 22.1).abs() <= 0.05,
        format!("{c8:.3} dB (want -22.1 +/- 0.05)"),
    );
    Ok(b.finish(5, TITLES[4], start))
}

pub fn criterion_6() -> Result<CriterionResult> {
    let start = Instant::now();
    let cfg = OfdmConfig::default();
    let mut b = Builder::new();
    let mut t = Table::new(
        "guardband_reference",
        "minimum guardband in subcarriers vs reference",
        &["cir_min_db", "p_r_db", "guard", "reference", "abs_err"],
    );
    let mut got = [[f64::NAN; 4]; 3];
    let mut worst: f64 = 0.0;
    for (i, &c) in GUARD_REF_CIR_DB.iter().enumerate() {
        for (j, &p) in GUARD_REF_P_R_DB.iter().enumerate() {
            let g = min_guardband(c, p, &cfg, 8)?.size().unwrap_or(f64::INFINITY);
            got[i][j] = g;
            let err = (g - GUARD_REF[i][j]).abs();
            worst = worst.max(err);
            t.push(vec![
                Cell::Float(c),
                Cell::Float(p),
                Cell::Float(g),
                Cell::Float(GUARD_REF[i][j]),
                Cell::Float(err),
            ]);
        }
    }
    b.tables.push(t);
    b.check(
        "entries",
        worst <= GUARD_TOL + 1e-9,
        format!("max error {worst:.2} subcarriers over 12 entries (tol {GUARD_TOL})"),
    );
    let rows_ok = got.iter().all(|r| r.windows(2).all(|w| w[1] >= w[0]));
    let cols_ok = (0..4).all(|j| (0..2).all(|i| got[i + 1][j] >= got[i][j]));
    b.check(
        "monotone",
        rows_ok && cols_ok,
        format!("in p_r: {rows_ok}, in CIR: {cols_ok}"),
    );
    Ok(b.finish(6, TITLES[5], start))
}

pub fn criterion_7(opts: &ReproduceOptions) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut b = Builder::new();
    let mut spec = ExperimentSpec::new(ExperimentKind::MitigationCompare);
    spec.n_trials = opts.trials;
    spec.scenario.seed = opts.seed;
    let res = run_mitigation_compare(&spec)?;
    b.tables.extend(res.to_report().tables);

    let none = res.none.to_db();
    let isc = res.isc.to_db();
    let mean_gap = isc.iter().zip(&none).map(|(a, c)| a - c).sum::<f64>() / none.len() as f64;
    b.check(
        "ISC vs none",
        mean_gap.abs() <= ISC_TOL_DB,
        format!(
            "mean ISC - none {mean_gap:.3} dB over the grid, {} pairs (tol {ISC_TOL_DB})",
            res.isc_pairs.len()
        ),
    );

    let fgb = res.fgb.to_db();
    let fgb_err = fgb
        .iter()
        .zip(&res.fgb_analytic)
        .map(|(a, c)| (a - to_db(*c)).abs())
        .fold(0.0, f64::max);
    b.check(
        "FGB vs shifted analytic",
        fgb_err <= FGB_TOL_DB,
        format!("max {fgb_err:.3} dB, gap {} (tol {FGB_TOL_DB})", res.fgb_gap),
    );

    let mut sc = spec.scenario.clone();
    let scheme = MitigationScheme::Csc {
        coded: res.csc_coded.clone(),
    };
    let ints: Vec<f64> = (1..=8).map(f64::from).collect();
    let mut t = Table::new(
        "csc_fixed_tau",
        "CSC interference at integer offsets for fixed mismatch",
        &["tau", "f", "csc_db"],
    );
    let mut worst = f64::NEG_INFINITY;
    let csc_trials = opts.trials.clamp(1, 500);
    for tau in [0.0, 8.0, 16.0, 16.5, 30.0, 47.25, 64.0, 79.5] {
        sc.mismatch = MismatchModel::Fixed(tau);
        let s = measure_scheme(&sc, &scheme, &ints, csc_trials)?;
        for (f, v) in s.iter() {
            let db = to_db(v);
            worst = worst.max(db);
            t.push(vec![Cell::Float(tau), Cell::Float(f), Cell::Float(db)]);
        }
    }
    b.tables.push(t);
    b.check(
        "CSC integer nulls",
        worst <= CSC_NULL_DBC,
        format!("worst {worst:.1} dBc over 8 fixed tau (limit {CSC_NULL_DBC})"),
    );
    Ok(b.finish(7, TITLES[6], start))
}

fn overlap(a: &FormatOutcome, c: &FormatOutcome) -> bool {
    a.ci.0 <= c.ci.1 && c.ci.0 <= a.ci.1
}

pub fn criterion_8(opts: &ReproduceOptions) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut b = Builder::new();
    let mut spec = ExperimentSpec::new(ExperimentKind::Throughput);
    spec.n_trials = opts.throughput_trials;
    spec.scenario.seed = opts.seed;
    let thr = run_throughput(&spec)?;
    b.tables.extend(thr.to_report().tables);

    let at = |scheme: &str, p: f64| &thr.get(scheme, p).expect("point present").best;
    let none9 = at("none", 9.0);
    for scheme in ["fgb", "csc"] {
        let s = at(scheme, 9.0);
        let ratio = s.throughput / none9.throughput;
        let separated = s.ci.0 > none9.ci.1;
        b.check(
            format!("{scheme} gain at 9 dB"),
            ratio >= GAIN_MIN && separated,
            format!("{ratio:.2}x none (min {GAIN_MIN}), CIs disjoint: {separated}"),
        );
    }
    let mut order_ok = true;
    let mut worst = String::new();
    for &p in &spec.p_r_db {
        let (f, c) = (at("fgb", p), at("csc", p));
        if !(f.throughput >= c.throughput || overlap(f, c)) {
            order_ok = false;
            worst = format!(" (fails at {p} dB: {:.4} < {:.4})", f.throughput, c.throughput);
        }
    }
    b.check("FGB >= CSC", order_ok, format!("every p_r at eps_max 0.1{worst}"));

    let mut sens = ExperimentSpec::new(ExperimentKind::FreqOffsetSensitivity);
    sens.n_trials = opts.throughput_trials;
    sens.scenario.seed = opts.seed;
    let res = run_freq_offset_sensitivity(&sens)?;
    b.tables.extend(res.to_report().tables);
    for &p in &sens.p_r_db {
        let csc: Vec<&FormatOutcome> = sens
            .eps_max
            .iter()
            .map(|&e| &res.get("csc", p, e).expect("point").best)
            .collect();
        let mono = csc
            .windows(2)
            .all(|w| w[1].throughput <= w[0].throughput || overlap(w[0], w[1]));
        b.check(
            format!("CSC non-increasing at {p} dB"),
            mono,
            format!("{:?}", csc.iter().map(|o| round4(o.throughput)).collect::<Vec<_>>()),
        );
        let e_hi = *sens.eps_max.last().expect("non-empty");
        let c = &res.get("csc", p, e_hi).expect("point").best;
        let nn = &res.get("none", p, e_hi).expect("point").best;
        b.check(
            format!("CSC ~ none at eps_max {e_hi}, {p} dB"),
            overlap(c, nn),
            format!(
                "csc {:.4} [{:.4}, {:.4}] vs none {:.4} [{:.4}, {:.4}]",
                c.throughput, c.ci.0, c.ci.1, nn.throughput, nn.ci.0, nn.ci.1
            ),
        );
        let fgb: Vec<f64> = sens
            .eps_max
            .iter()
            .map(|&e| res.get("fgb", p, e).expect("point").best.throughput)
            .collect();
        let hi = fgb.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = fgb.iter().copied().fold(f64::INFINITY, f64::min);
        let var = if hi > 0.0 { (hi - lo) / hi } else { 0.0 };
        b.check(
            format!("FGB flat at {p} dB"),
            var <= FGB_VARIATION,
            format!("variation {:.2}% (limit 5%)", 100.0 * var),
        );
    }
    Ok(b.finish(8, TITLES[7], start))
}

fn round4(x: f64) -> f64 {
    (x * 1e4).round() / 1e4
}

pub fn criterion_9(opts: &ReproduceOptions) -> CriterionResult {
    let start = Instant::now();
    let mut b = Builder::new();
    let checks = oracle::run_all(opts.seed);
    let mut t = Table::new(
        "oracle_equivalence",
        "worst closed-form vs oracle deviation per operation",
        &["operation", "points", "worst_db"],
    );
    for c in &checks {
        t.push(vec![
            Cell::Text(c.operation.to_string()),
            Cell::Int(c.points as i64),
            Cell::Float(c.worst_db),
        ]);
        b.check(
            c.operation,
            c.worst_db <= ORACLE_TOL_DB,
            format!("{:.2e} dB over {} points", c.worst_db, c.points),
        );
    }
    b.tables.push(t);
    b.finish(9, TITLES[8], start)
}

/// Renders every campaign's CSVs at a small trial count.
fn render_all(trials: usize, seed: u64) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for kind in ExperimentKind::ALL {
        let mut spec = ExperimentSpec::new(kind);
        spec.n_trials = match kind {
            ExperimentKind::Throughput | ExperimentKind::FreqOffsetSensitivity => trials.div_ceil(20),
            _ => trials,
        };
        if matches!(kind, ExperimentKind::FreqOffsetSensitivity) {
            spec.p_r_db = vec![9.0];
            spec.eps_max = vec![0.0, 0.5];
        }
        spec.scenario.seed = seed;
        let report = harness::run(&spec)?;
        for t in &report.tables {
            out.push((format!("{}/{}.csv", kind.name(), t.name), render_table(t)));
        }
        let meta: Vec<(String, String)> = report.meta.clone();
        out.push((format!("{}/meta.csv", kind.name()), crate::output::render_meta(&meta)));
    }
    Ok(out)
}

pub fn criterion_10(opts: &ReproduceOptions) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut b = Builder::new();
    let pool = |n: usize| ThreadPoolBuilder::new().num_threads(n).build().expect("thread pool");
    let trials = opts.determinism_trials;
    let serial = pool(1).install(|| render_all(trials, opts.seed))?;
    let parallel = pool(4).install(|| render_all(trials, opts.seed))?;
    let again = pool(4).install(|| render_all(trials, opts.seed))?;
    let differ = |a: &[(String, String)], c: &[(String, String)]| {
        a.iter()
            .zip(c)
            .filter(|(x, y)| x != y)
            .map(|(x, _)| x.0.clone())
            .collect::<Vec<_>>()
    };
    let d1 = differ(&serial, &parallel);
    let d2 = differ(&parallel, &again);
    b.check(
        "serial vs parallel",
        d1.is_empty() && serial.len() == parallel.len(),
        format!("{} files compared, differing: {d1:?}", serial.len()),
    );
    b.check(
        "repeat run",
        d2.is_empty(),
        format!("{} files compared, differing: {d2:?}", parallel.len()),
    );
    let mut t = Table::new(
        "determinism",
        "files rendered in the determinism check",
        &["file", "bytes"],
    );
    for (name, body) in &serial {
        t.push(vec![Cell::Text(name.clone()), Cell::Int(body.len() as i64)]);
    }
    b.tables.push(t);
    Ok(b.finish(10, TITLES[9], start))
}

pub fn criterion(id: u8, opts: &ReproduceOptions) -> Result<CriterionResult> {
    match id {
        1 => Ok(criterion_1()),
        2 => criterion_2(opts),
        3 => Ok(criterion_3()),
        4 => criterion_4(),
        5 => criterion_5(),
        6 => criterion_6(),
        7 => criterion_7(opts),
        8 => criterion_8(opts),
        9 => Ok(criterion_9(opts)),
        10 => criterion_10(opts),
        other => Err(crate::error::CliError::Config {
            key: "criterion".into(),
            message: format!("no criterion {other}"),
        }),
    }
}

pub fn run_all(opts: &ReproduceOptions) -> Result<Vec<CriterionResult>> {
    (1..=10).map(|id| criterion(id, opts)).collect()
}

/// Summary table with one row per criterion.
pub fn summary_table(results: &[CriterionResult]) -> Table {
    let mut t = Table::new(
        "acceptance",
        "acceptance criteria verdicts",
        &["criterion", "title", "passed", "seconds", "detail"],
    );
    for r in results {
        let detail: Vec<String> = r.checks.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect();
        t.push(vec![
            Cell::Int(r.id as i64),
            Cell::Text(r.title.to_string()),
            Cell::Text(r.passed.to_string()),
            Cell::Float(r.seconds),
            Cell::Text(detail.join("; ")),
        ]);
    }
    t
}
