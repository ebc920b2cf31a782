//! Brute-force counterparts of the closed-form models: direct time-domain
//! sums, discrete averages over every mismatch, numeric quadrature and a
//! Monte Carlo estimator run. Each check returns the worst deviation in dB.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use xband_core::analytic::{self, to_db, MismatchForm, SweepBase, SweepParam};
use xband_core::{OfdmConfig, SubcarrierSet};

/// Values below this (relative to the peak) are treated as exact nulls.
const NULL_FLOOR: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleCheck {
    pub operation: &'static str,
    pub points: usize,
    pub worst_db: f64,
}

/// Time samples `n in [start, end)` of the unit tone at subcarrier `k`, with the 1/N IDFT scale.
fn tone(k: f64, n_fft: usize, start: usize, end: usize) -> Vec<Complex64> {
    (start..end)
        .map(|n| Complex64::from_polar(1.0 / n_fft as f64, 2.0 * PI * k * n as f64 / n_fft as f64))
        .collect()
}

/// `|sum_n x(n) e^{-i 2 pi f (n + offset) / N}|^2`.
fn dtft_power(x: &[Complex64], f: f64, n_fft: usize, offset: usize) -> f64 {
    x.iter()
        .enumerate()
        .map(|(i, v)| v * Complex64::from_polar(1.0, -2.0 * PI * f * (i + offset) as f64 / n_fft as f64))
        .sum::<Complex64>()
        .norm_sqr()
}

fn full_leak(set: &SubcarrierSet, f: f64, n: usize) -> f64 {
    set.iter().map(|k| dtft_power(&tone(k as f64, n, 0, n), f, n, 0)).sum()
}

/// Victim window holding the tail `m` samples of one symbol and the head of the next,
/// with independent data so the two parts add in power.
fn split_leak(set: &SubcarrierSet, f: f64, n: usize, m: usize) -> f64 {
    set.iter()
        .map(|k| {
            let k = k as f64;
            dtft_power(&tone(k, n, 0, m), f, n, 0) + dtft_power(&tone(k, n, m, n), f, n, m)
        })
        .sum()
}

fn discrete_case_b_avg(set: &SubcarrierSet, f: f64, n: usize) -> f64 {
    (1..=n).map(|m| split_leak(set, f, n, m)).sum::<f64>() / n as f64
}

fn overall(set: &SubcarrierSet, f: f64, n: usize, rho: f64) -> f64 {
    rho * full_leak(set, f, n) + (1.0 - rho) * discrete_case_b_avg(set, f, n)
}

fn db_gap(a: f64, b: f64, scale: f64) -> f64 {
    if a.abs() <= NULL_FLOOR * scale && b.abs() <= NULL_FLOOR * scale {
        0.0
    } else {
        (to_db(a) - to_db(b)).abs()
    }
}

struct Tracker {
    operation: &'static str,
    points: usize,
    worst: f64,
}

impl Tracker {
    fn new(operation: &'static str) -> Self {
        Self {
            operation,
            points: 0,
            worst: 0.0,
        }
    }

    fn add(&mut self, closed: f64, oracle: f64, scale: f64) {
        self.points += 1;
        self.worst = self.worst.max(db_gap(closed, oracle, scale));
    }

    fn done(self) -> OracleCheck {
        OracleCheck {
            operation: self.operation,
            points: self.points,
            worst_db: self.worst,
        }
    }
}

/// The 0.25-subcarrier grid used by every spectral check.
pub fn f_grid() -> Vec<f64> {
    (0..=120).map(|i| -10.0 + 0.25 * i as f64).collect()
}

/// Runs every oracle on the default two-link layout.
pub fn run_all(seed: u64) -> Vec<OracleCheck> {
    let cfg = OfdmConfig::default();
    let n = cfg.n_fft();
    let n_cp = cfg.n_cp();
    let rho = cfg.cp_overhead();
    let o1 = SubcarrierSet::contiguous(-7, 8).expect("valid set");
    let o2 = SubcarrierSet::contiguous(1, 8).expect("valid set");
    let grid = f_grid();
    let mut out = Vec::new();

    let mut t = Tracker::new("dirichlet_power");
    let mut tk = Tracker::new("dirichlet_kernel");
    for &x in &grid {
        let direct: Complex64 = tone(0.0, n, 0, n)
            .iter()
            .enumerate()
            .map(|(i, v)| v * Complex64::from_polar(1.0, -2.0 * PI * x * i as f64 / n as f64))
            .sum();
        t.add(analytic::dirichlet_power(x, n), direct.norm_sqr(), 1.0);
        let closed = analytic::dirichlet_kernel(x, n);
        tk.add(closed.norm_sqr(), direct.norm_sqr(), 1.0);
        tk.add((closed - direct).norm_sqr(), 0.0, 1.0);
    }
    out.push(t.done());
    out.push(tk.done());

    let mut t = Tracker::new("cbi_case_a");
    for &f in &grid {
        t.add(analytic::cbi_case_a(f, &o1, 1.0, n), full_leak(&o1, f, n), 1.0);
    }
    out.push(t.done());

    let mut t = Tracker::new("cbi_case_b_at_tau");
    for tau in [16.25, 16.5, 21.0, 33.3, 48.0, 63.75, 79.5] {
        let m = analytic::overlap_samples(tau, n, n_cp);
        for &f in &grid {
            let closed = analytic::cbi_case_b_at_tau(f, tau, &o1, 1.0, n, n_cp, MismatchForm::Exact).expect("in range");
            t.add(closed, split_leak(&o1, f, n, m), 1.0);
        }
    }
    out.push(t.done());

    let b_avg: Vec<f64> = grid.iter().map(|&f| discrete_case_b_avg(&o1, f, n)).collect();
    let a_vals: Vec<f64> = grid.iter().map(|&f| full_leak(&o1, f, n)).collect();
    let mut t = Tracker::new("cbi_case_b_avg");
    for (i, &f) in grid.iter().enumerate() {
        t.add(analytic::cbi_case_b_avg(f, &o1, 1.0, n), b_avg[i], 1.0);
    }
    out.push(t.done());

    let mut t = Tracker::new("cbi_overall");
    for (i, &f) in grid.iter().enumerate() {
        let oracle = rho * a_vals[i] + (1.0 - rho) * b_avg[i];
        t.add(analytic::cbi_overall(f, &o1, 1.0, n, n_cp), oracle, 1.0);
    }
    out.push(t.done());

    // Simpson quadrature over each unit step.
    let mut t = Tracker::new("step_average");
    for c in 1..=8 {
        let center = c as f64;
        let closed = analytic::step_average(center, |x| analytic::cbi_overall(x, &o1, 1.0, n, n_cp));
        let intervals = 400;
        let h = 1.0 / intervals as f64;
        let g = |x: f64| rho * full_leak(&o1, x, n) + (1.0 - rho) * analytic::cbi_case_b_avg(x, &o1, 1.0, n);
        let mut s = g(center - 0.5) + g(center + 0.5);
        for i in 1..intervals {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * g(center - 0.5 + i as f64 * h);
        }
        t.add(closed, s * h / 3.0, 1.0);
    }
    out.push(t.done());

    let mut t = Tracker::new("signal_psd");
    for &f in &grid {
        t.add(analytic::signal_psd(f, &o2, 1.0, n), full_leak(&o2, f, n), 1.0);
    }
    out.push(t.done());

    let mut t = Tracker::new("decompose_sig_ici");
    for l in o2.iter() {
        for i in 0..=4 {
            let df = -0.5 + 0.25 * i as f64;
            let f = l as f64 + df;
            let (sig, ici) = analytic::decompose_sig_ici(df, l, &o2, 1.0, n).expect("valid");
            let own = SubcarrierSet::new([l]).expect("valid set");
            let rest = SubcarrierSet::new(o2.iter().filter(|&k| k != l)).expect("valid set");
            t.add(sig, full_leak(&own, f, n), 1.0);
            t.add(ici, full_leak(&rest, f, n), 1.0);
        }
    }
    out.push(t.done());

    let mut t = Tracker::new("mean_interference_power");
    for i in 0..=4 {
        let eps = -0.5 + 0.25 * i as f64;
        let closed = analytic::mean_interference_power(&o2, |f| analytic::cbi_overall(f, &o1, 1.0, n, n_cp), eps);
        let oracle = o2.iter().map(|k| overall(&o1, k as f64 + eps, n, rho)).sum::<f64>() / o2.len() as f64;
        t.add(closed, oracle, 1.0);
    }
    out.push(t.done());

    let mut t = Tracker::new("cir");
    for (i, &f) in grid.iter().enumerate() {
        if !(1.0..=8.0).contains(&f) {
            continue;
        }
        let l = f.round().clamp(1.0, 8.0) as i32;
        let df = f - l as f64;
        let (sig, ici) = analytic::decompose_sig_ici(df, l, &o2, 1.0, n).expect("valid");
        let cbi = analytic::cbi_overall(f, &o1, 1.0, n, n_cp);
        let own = SubcarrierSet::new([l]).expect("valid set");
        let rest = SubcarrierSet::new(o2.iter().filter(|&k| k != l)).expect("valid set");
        let oracle = full_leak(&own, f, n) / (full_leak(&rest, f, n) + rho * a_vals[i] + (1.0 - rho) * b_avg[i]);
        t.add(analytic::cir(sig, ici, cbi), oracle, 1.0);
    }
    out.push(t.done());

    let mut t = Tracker::new("isc_pair_psd");
    for k in [-3, 0] {
        let x: Vec<Complex64> = tone((k - 1) as f64, n, 0, n)
            .iter()
            .zip(tone(k as f64, n, 0, n))
            .map(|(a, b)| a - b)
            .collect();
        for &f in &grid {
            t.add(analytic::isc_pair_psd(f, k, 1.0, n), dtft_power(&x, f, n, 0), 1.0);
        }
    }
    out.push(t.done());

    // A CSC pair is one continuous tone over two CP-prefixed symbols; every
    // window inside it is averaged.
    let mut t = Tracker::new("csc_subcarrier_psd");
    for k in [-7, -2, 0] {
        let span = 2 * (n + n_cp);
        let x = tone(k as f64, n, 0, span);
        for &f in &grid {
            let oracle = (0..=span - n).map(|o| dtft_power(&x[o..o + n], f, n, o)).sum::<f64>() / (span - n + 1) as f64;
            t.add(analytic::csc_subcarrier_psd(f, k, 1.0, n), oracle, 1.0);
        }
    }
    out.push(t.done());

    let mut t = Tracker::new("param_sensitivity");
    let base = SweepBase {
        f_grid: (0..=40).map(|i| 0.5 + 0.25 * i as f64).collect(),
        ..SweepBase::default()
    };
    let sweeps = [
        (SweepParam::Width, vec![1.0, 4.0, 16.0]),
        (SweepParam::Rho, vec![0.0, 0.5]),
        (SweepParam::FftSize, vec![128.0]),
    ];
    for (param, values) in sweeps {
        let closed = analytic::param_sensitivity(param, &values, &base).expect("valid sweep");
        for (v, spec) in closed {
            let (width, rho_v, nn) = match param {
                SweepParam::Width => (v as usize, base.rho, base.n_fft),
                SweepParam::Rho => (base.width, v, base.n_fft),
                SweepParam::FftSize => (base.width, base.rho, v as usize),
            };
            let set = SubcarrierSet::contiguous(1 - width as i32, width).expect("valid set");
            for (f, val) in spec.iter() {
                t.add(val, overall(&set, f, nn, rho_v), 1.0);
            }
        }
    }
    out.push(t.done());

    let mut t = Tracker::new("min_guardband");
    for cir_min in [5.0, 10.0, 15.0, 20.0] {
        for p_r in [0.0, 3.0, 6.0, 9.0] {
            let closed = analytic::min_guardband(cir_min, p_r, &cfg, 8).expect("valid").size();
            let oracle = (0..=10 * n / 2)
                .map(|i| i as f64 / 10.0)
                .find(|g| -(to_db(overall(&o1, 1.0 + g, n, rho)) + p_r) >= cir_min);
            // Compare the CIR each guard achieves, so a 0.1 step near the threshold is visible.
            if let (Some(a), Some(b)) = (closed, oracle) {
                t.add(overall(&o1, 1.0 + a, n, rho), overall(&o1, 1.0 + b, n, rho), 1.0);
            } else {
                t.points += 1;
                if closed.is_some() != oracle.is_some() {
                    t.worst = f64::INFINITY;
                }
            }
        }
    }
    out.push(t.done());

    out.push(sync_std_check(seed));
    out
}

/// Monte Carlo of the half-symbol phase estimator on the even-subcarrier preamble in AWGN.
fn sync_std_check(seed: u64) -> OracleCheck {
    let n = 64;
    let even = [2.0, 4.0, 6.0, 8.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Tracker::new("sync_error_std");
    let tones: Vec<Vec<Complex64>> = even.iter().map(|&k| tone(k, n, 0, n)).collect();
    for sinr_db in [30.0, 40.0] {
        let sinr = 10f64.powf(sinr_db / 10.0);
        let sample_std = (1.0 / sinr / n as f64 / 2.0).sqrt();
        let trials = 20_000;
        let mut sq = 0.0;
        for _ in 0..trials {
            let mut x = vec![Complex64::new(0.0, 0.0); n];
            for tn in &tones {
                let a = Complex64::from_polar(2f64.sqrt(), PI / 4.0 + PI / 2.0 * rng.gen_range(0..4) as f64);
                for (xi, ti) in x.iter_mut().zip(tn) {
                    *xi += a * ti;
                }
            }
            for xi in &mut x {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                *xi += Complex64::new(re, im) * sample_std;
            }
            let p: Complex64 = (0..n / 2).map(|i| x[i].conj() * x[i + n / 2]).sum();
            let e = p.arg() / PI;
            sq += e * e;
        }
        let mc = (sq / trials as f64).sqrt();
        let closed = analytic::sync_error_std(8, sinr).expect("valid");
        // Standard deviations compare as powers: square both.
        t.add(closed * closed, mc * mc, 1.0);
    }
    t.done()
}
