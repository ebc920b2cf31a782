//! Closed-form interference, signal and synchronization models.
//!
//! All spectra are evaluated at a continuous frequency `f` in subcarrier
//! units (`f = 2` is subcarrier #2, `f = 2.5` the midpoint of #2 and #3) and
//! are linear powers. Kernels that are singular at `f = k` are evaluated by
//! their limits.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{arg_err, Result};
use crate::ofdm::{OfdmConfig, SubcarrierSet};

/// Distance to the nearest kernel singularity below which the limit is used.
pub const SINGULAR_TOL: f64 = 1e-9;

pub fn to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Linear power sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerSpectrum {
    f_grid: Vec<f64>,
    values: Vec<f64>,
}

impl PowerSpectrum {
    pub fn new(f_grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if f_grid.len() != values.len() {
            return arg_err(format!("grid has {} points but {} values", f_grid.len(), values.len()));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0)) {
            return arg_err(format!("power values must be non-negative, got {v}"));
        }
        Ok(Self { f_grid, values })
    }

    pub fn from_fn(f_grid: &[f64], eval: impl Fn(f64) -> f64) -> Self {
        let values = f_grid.iter().map(|&f| eval(f).max(0.0)).collect();
        Self {
            f_grid: f_grid.to_vec(),
            values,
        }
    }

    pub fn f_grid(&self) -> &[f64] {
        &self.f_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_db(&self) -> Vec<f64> {
        self.values.iter().map(|&v| to_db(v)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.f_grid.iter().copied().zip(self.values.iter().copied())
    }
}

/// Carrier-to-interference ratio (linear) sampled on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CirProfile {
    pub f_grid: Vec<f64>,
    pub cir_values: Vec<f64>,
}

impl CirProfile {
    pub fn from_components(signal: &PowerSpectrum, ici: &PowerSpectrum, cbi: &PowerSpectrum) -> Result<Self> {
        if signal.f_grid() != ici.f_grid() || signal.f_grid() != cbi.f_grid() {
            return arg_err("CIR components must share one frequency grid");
        }
        let cir_values = signal
            .values()
            .iter()
            .zip(ici.values())
            .zip(cbi.values())
            .map(|((&s, &i), &c)| cir(s, i, c))
            .collect();
        Ok(Self {
            f_grid: signal.f_grid().to_vec(),
            cir_values,
        })
    }
}

/// Reduces `x` into `(-n/2, n/2]`; leakage kernels repeat with period `n`.
fn principal(x: f64, n: usize) -> f64 {
    let n = n as f64;
    let r = x - n * (x / n).round();
    if r <= -n / 2.0 {
        r + n
    } else {
        r
    }
}

/// `1 - sin(y)/y`, accurate near zero.
fn one_minus_sinc(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        let y2 = y * y;
        y2 / 6.0 - y2 * y2 / 120.0 + y2 * y2 * y2 / 5040.0
    } else {
        1.0 - y.sin() / y
    }
}

/// Power of the rectangular-window leakage kernel, `sin^2(pi x) / (N^2 sin^2(pi x / N))`.
pub fn dirichlet_power(x: f64, n: usize) -> f64 {
    let x = principal(x, n);
    if x.abs() < SINGULAR_TOL {
        return 1.0;
    }
    let nf = n as f64;
    let num = (PI * x).sin();
    let den = nf * (PI * x / nf).sin();
    (num / den).powi(2)
}

/// Complex leakage kernel of a full-length window, phase included.
pub fn dirichlet_kernel(x: f64, n: usize) -> Complex64 {
    let nf = n as f64;
    let s = (PI * x / nf).sin();
    let mag = if s.abs() < SINGULAR_TOL * PI / nf {
        let m = (x / nf).round() as i64;
        if (m * (n as i64 - 1)).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    } else {
        (PI * x).sin() / (nf * s)
    };
    Complex64::from_polar(mag, -PI * x * (nf - 1.0) / nf)
}

/// Average Case-A (small mismatch) interference power; independent of the mismatch.
pub fn cbi_case_a(f: f64, omega1: &SubcarrierSet, p1: f64, n: usize) -> f64 {
    p1 * omega1.iter().map(|k| dirichlet_power(f - k as f64, n)).sum::<f64>()
}

/// How a Case-B mismatch is turned into a window overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MismatchForm {
    /// Integer overlap `M = ceil(tau - n_cp)`.
    #[default]
    Exact,
    /// Continuous overlap fraction `(tau - n_cp) / N`.
    Continuous,
}

/// Samples the victim window shares with the earlier interferer symbol.
pub fn overlap_samples(tau_samples: f64, n: usize, n_cp: usize) -> usize {
    let m = (tau_samples - n_cp as f64).ceil();
    m.clamp(1.0, n as f64) as usize
}

fn case_b_term_exact(x: f64, m: usize, n: usize) -> f64 {
    let nf = n as f64;
    let mf = m as f64;
    let x = principal(x, n);
    if x.abs() < SINGULAR_TOL {
        return (mf * mf + (nf - mf) * (nf - mf)) / (nf * nf);
    }
    let a = (mf * PI * x / nf).sin();
    let b = ((nf - mf) * PI * x / nf).sin();
    let d = nf * (PI * x / nf).sin();
    (a * a + b * b) / (d * d)
}

fn case_b_term_continuous(x: f64, u: f64, n: usize) -> f64 {
    let nf = n as f64;
    let x = principal(x, n);
    if x.abs() < SINGULAR_TOL {
        return u * u + (1.0 - u) * (1.0 - u);
    }
    let a = (u * PI * x).sin();
    let b = ((1.0 - u) * PI * x).sin();
    let d = nf * (PI * x / nf).sin();
    (a * a + b * b) / (d * d)
}

/// Average Case-B (large mismatch) interference power at one mismatch `tau` (samples).
pub fn cbi_case_b_at_tau(
    f: f64,
    tau_samples: f64,
    omega1: &SubcarrierSet,
    p1: f64,
    n: usize,
    n_cp: usize,
    form: MismatchForm,
) -> Result<f64> {
    let lo = n_cp as f64;
    let hi = (n + n_cp) as f64;
    if !(tau_samples > lo && tau_samples < hi) {
        return arg_err(format!(
            "tau = {tau_samples} is outside the large-mismatch range ({lo}, {hi})"
        ));
    }
    let sum: f64 = match form {
        MismatchForm::Exact => {
            let m = overlap_samples(tau_samples, n, n_cp);
            omega1.iter().map(|k| case_b_term_exact(f - k as f64, m, n)).sum()
        }
        MismatchForm::Continuous => {
            let u = (tau_samples - lo) / n as f64;
            omega1.iter().map(|k| case_b_term_continuous(f - k as f64, u, n)).sum()
        }
    };
    Ok(p1 * sum)
}

fn case_b_avg_term(x: f64, n: usize) -> f64 {
    let nf = n as f64;
    let x = principal(x, n);
    if x.abs() < SINGULAR_TOL {
        return 2.0 / 3.0;
    }
    let d = nf * (PI * x / nf).sin();
    one_minus_sinc(2.0 * PI * x) / (d * d)
}

/// Case-B interference averaged over a uniform mismatch in `(T_CP, T + T_CP)`.
pub fn cbi_case_b_avg(f: f64, omega1: &SubcarrierSet, p1: f64, n: usize) -> f64 {
    p1 * omega1.iter().map(|k| case_b_avg_term(f - k as f64, n)).sum::<f64>()
}

/// Overall average interference: `rho * case_a + (1 - rho) * case_b_avg`.
pub fn cbi_overall_with_rho(f: f64, omega1: &SubcarrierSet, p1: f64, n: usize, rho: f64) -> f64 {
    rho * cbi_case_a(f, omega1, p1, n) + (1.0 - rho) * cbi_case_b_avg(f, omega1, p1, n)
}

pub fn cbi_overall(f: f64, omega1: &SubcarrierSet, p1: f64, n: usize, n_cp: usize) -> f64 {
    let rho = n_cp as f64 / (n + n_cp) as f64;
    cbi_overall_with_rho(f, omega1, p1, n, rho)
}

/// Mean of `eval` over 101 evenly spaced points strictly inside `(center - 0.5, center + 0.5)`.
pub fn step_average(center: f64, eval: impl Fn(f64) -> f64) -> f64 {
    const POINTS: usize = 101;
    let step = 1.0 / (POINTS + 1) as f64;
    (1..=POINTS).map(|i| eval(center - 0.5 + i as f64 * step)).sum::<f64>() / POINTS as f64
}

/// Parameter swept by [`param_sensitivity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Interferer width `|Omega_1|`.
    Width,
    /// Cyclic-prefix overhead.
    Rho,
    /// DFT size.
    FftSize,
}

/// Baseline for a sensitivity sweep. The interferer occupies `{-L+1, ..., 0}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepBase {
    pub width: usize,
    pub rho: f64,
    pub n_fft: usize,
    pub p1: f64,
    pub f_grid: Vec<f64>,
}

impl Default for SweepBase {
    fn default() -> Self {
        Self {
            width: 8,
            rho: 0.2,
            n_fft: 64,
            p1: 1.0,
            f_grid: (0..=36).map(|i| 0.5 + 0.25 * i as f64).collect(),
        }
    }
}

/// Overall interference spectrum for each swept value.
pub fn param_sensitivity(sweep: SweepParam, values: &[f64], base: &SweepBase) -> Result<Vec<(f64, PowerSpectrum)>> {
    if values.is_empty() {
        return arg_err("sweep needs at least one value");
    }
    values
        .iter()
        .map(|&v| {
            let (width, rho, n) = match sweep {
                SweepParam::Width => {
                    if v < 1.0 || v.fract() != 0.0 || v as usize > base.n_fft / 2 {
                        return arg_err(format!("interferer width {v} is not valid"));
                    }
                    (v as usize, base.rho, base.n_fft)
                }
                SweepParam::Rho => {
                    if !(0.0..1.0).contains(&v) {
                        return arg_err(format!("rho {v} outside [0, 1)"));
                    }
                    (base.width, v, base.n_fft)
                }
                SweepParam::FftSize => {
                    let n = v as usize;
                    if v.fract() != 0.0 || n < 2 || !n.is_power_of_two() || base.width > n / 2 {
                        return arg_err(format!("DFT size {v} is not valid"));
                    }
                    (base.width, base.rho, n)
                }
            };
            let omega1 = SubcarrierSet::contiguous(1 - width as i32, width)?;
            let spec = PowerSpectrum::from_fn(&base.f_grid, |f| cbi_overall_with_rho(f, &omega1, base.p1, n, rho));
            Ok((v, spec))
        })
        .collect()
}

/// Average received power of the signal link at frequency `f` (perfect channel on average).
pub fn signal_psd(f: f64, omega2: &SubcarrierSet, p2: f64, n: usize) -> f64 {
    cbi_case_a(f, omega2, p2, n)
}

/// Splits the signal power seen at `l + delta_f` into useful signal and ICI.
pub fn decompose_sig_ici(delta_f: f64, l: i32, omega2: &SubcarrierSet, p2: f64, n: usize) -> Result<(f64, f64)> {
    if !omega2.contains(l) {
        return arg_err(format!("subcarrier {l} is not in the signal set {omega2}"));
    }
    if !(delta_f.abs() <= 0.5) {
        return arg_err(format!("|delta_f| must be <= 0.5, got {delta_f}"));
    }
    let f = l as f64 + delta_f;
    let p_sig = p2 * dirichlet_power(delta_f, n);
    let p_ici = p2
        * omega2
            .iter()
            .filter(|&k| k != l)
            .map(|k| dirichlet_power(f - k as f64, n))
            .sum::<f64>();
    Ok((p_sig, p_ici))
}

/// Standard deviation of the fractional CFO estimate (subcarrier units) at high SINR.
pub fn sync_error_std(m: usize, sinr: f64) -> Result<f64> {
    if m == 0 {
        return arg_err("number of signal subcarriers must be >= 1");
    }
    if !(sinr > 0.0) {
        return arg_err(format!("SINR must be positive, got {sinr}"));
    }
    Ok(2f64.sqrt() / (PI * (m as f64 * sinr).sqrt()))
}

/// Interference averaged over the victim's subcarriers, shifted by the inter-link offset.
pub fn mean_interference_power(omega2: &SubcarrierSet, cbi: impl Fn(f64) -> f64, epsilon: f64) -> f64 {
    omega2.iter().map(|k| cbi(epsilon + k as f64)).sum::<f64>() / omega2.len() as f64
}

/// `P_SIG / (P_ICI + P_CBI)`; `f64::INFINITY` when there is no interference at all.
pub fn cir(p_sig: f64, p_ici: f64, p_cbi: f64) -> f64 {
    let den = p_ici + p_cbi;
    if den == 0.0 {
        f64::INFINITY
    } else {
        p_sig / den
    }
}

/// Power spectrum of an antipodal pair `s(k-1) = a`, `s(k) = -a` at zero mismatch.
pub fn isc_pair_psd(f: f64, k: i32, p1: f64, n: usize) -> f64 {
    let lower = dirichlet_kernel(f - (k - 1) as f64, n);
    let upper = dirichlet_kernel(f - k as f64, n);
    p1 * (lower - upper).norm_sqr()
}

/// Large-N form of [`isc_pair_psd`]: `P1 (sin(pi x) / (pi x (x + 1)))^2` with `x = f - k`.
pub fn isc_pair_psd_approx(f: f64, k: i32, p1: f64) -> f64 {
    let x = f - k as f64;
    if x.abs() < SINGULAR_TOL || (x + 1.0).abs() < SINGULAR_TOL {
        return p1;
    }
    p1 * ((PI * x).sin() / (PI * x * (x + 1.0))).powi(2)
}

/// Spectrum of one CSC-coded subcarrier; equal to the full-window kernel for any mismatch.
pub fn csc_subcarrier_psd(f: f64, k: i32, p1: f64, n: usize) -> f64 {
    p1 * dirichlet_power(f - k as f64, n)
}

/// Outcome of a guardband search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Guardband {
    /// Guard width in subcarriers (0.1 resolution).
    Subcarriers(f64),
    NotAchievable,
}

impl Guardband {
    pub fn size(self) -> Option<f64> {
        match self {
            Guardband::Subcarriers(g) => Some(g),
            Guardband::NotAchievable => None,
        }
    }
}

/// Smallest guard (0.1-subcarrier steps, up to N/2) that keeps the victim's
/// edge subcarrier at or above `cir_min_db`, with ICI neglected and no
/// residual offset on the victim.
pub fn min_guardband(cir_min_db: f64, p_r_db: f64, cfg: &OfdmConfig, interferer_width: usize) -> Result<Guardband> {
    if interferer_width == 0 || interferer_width > cfg.n_fft() / 2 {
        return arg_err(format!("interferer width {interferer_width} is not valid"));
    }
    let omega1 = SubcarrierSet::contiguous(1 - interferer_width as i32, interferer_width)?;
    let (n, n_cp) = (cfg.n_fft(), cfg.n_cp());
    let steps = 10 * (n / 2);
    for i in 0..=steps {
        let gap = i as f64 / 10.0;
        let cir_db = -(to_db(cbi_overall(1.0 + gap, &omega1, 1.0, n, n_cp)) + p_r_db);
        if cir_db >= cir_min_db {
            return Ok(Guardband::Subcarriers(gap));
        }
    }
    Ok(Guardband::NotAchievable)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega1() -> SubcarrierSet {
        SubcarrierSet::contiguous(-7, 8).unwrap()
    }

    fn omega2() -> SubcarrierSet {
        SubcarrierSet::contiguous(1, 8).unwrap()
    }

    /// `|(1/N) sum_n e^{-i 2 pi x n / N}|^2` by direct summation.
    fn leakage_by_summation(x: f64, n: usize, start: usize, end: usize) -> f64 {
        let s: Complex64 = (start..end)
            .map(|m| Complex64::from_polar(1.0, -2.0 * PI * x * m as f64 / n as f64))
            .sum();
        (s / n as f64).norm_sqr()
    }

    #[test]
    fn case_a_nulls_and_peaks() {
        let o1 = omega1();
        for f in 1..=24 {
            assert!(cbi_case_a(f as f64, &o1, 1.0, 64) < 1e-28, "f = {f}");
        }
        for k in o1.iter() {
            assert!((cbi_case_a(k as f64, &o1, 2.5, 64) - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn case_a_matches_summation_at_half_bin() {
        let o1 = omega1();
        let oracle: f64 = o1.iter().map(|k| leakage_by_summation(1.5 - k as f64, 64, 0, 64)).sum();
        let got = cbi_case_a(1.5, &o1, 1.0, 64);
        assert!((got - oracle).abs() < 1e-12 * oracle, "{got} vs {oracle}");
    }

    #[test]
    fn case_b_exact_matches_truncated_summation() {
        let o1 = omega1();
        for &(f, tau) in &[(2.0, 48.0), (1.3, 20.4), (5.75, 70.0), (0.5, 17.0)] {
            let m = overlap_samples(tau, 64, 16);
            let oracle: f64 = o1
                .iter()
                .map(|k| {
                    let x = f - k as f64;
                    leakage_by_summation(x, 64, 0, m) + leakage_by_summation(x, 64, m, 64)
                })
                .sum();
            let got = cbi_case_b_at_tau(f, tau, &o1, 1.0, 64, 16, MismatchForm::Exact).unwrap();
            assert!((got - oracle).abs() < 1e-12 * oracle.max(1e-12), "f={f} tau={tau}");
        }
    }

    #[test]
    fn case_b_range_checked() {
        let o1 = omega1();
        assert!(cbi_case_b_at_tau(1.0, 16.0, &o1, 1.0, 64, 16, MismatchForm::Exact).is_err());
        assert!(cbi_case_b_at_tau(1.0, 80.0, &o1, 1.0, 64, 16, MismatchForm::Exact).is_err());
        assert!(cbi_case_b_at_tau(1.0, 16.5, &o1, 1.0, 64, 16, MismatchForm::Exact).is_ok());
    }

    #[test]
    fn case_b_average_matches_mismatch_integral() {
        let o1 = omega1();
        let (n, n_cp) = (64usize, 16usize);
        let per_sample = 200;
        for &f in &[1.0, 1.25, 1.5, 2.75, 4.1, 8.0] {
            for form in [MismatchForm::Exact, MismatchForm::Continuous] {
                let pts = n * per_sample;
                let mean: f64 = (0..pts)
                    .map(|i| {
                        let tau = n_cp as f64 + (i as f64 + 0.5) / per_sample as f64;
                        cbi_case_b_at_tau(f, tau, &o1, 1.0, n, n_cp, form).unwrap()
                    })
                    .sum::<f64>()
                    / pts as f64;
                let avg = cbi_case_b_avg(f, &o1, 1.0, n);
                assert!((mean / avg - 1.0).abs() < 1e-3, "f={f} {form:?}: {mean} vs {avg}");
            }
        }
    }

    #[test]
    fn case_b_symmetric_and_limit() {
        for &d in &[0.3, 1.0, 2.5, 7.25] {
            let a = case_b_avg_term(d, 64);
            let b = case_b_avg_term(-d, 64);
            assert!((a - b).abs() < 1e-15);
        }
        let near = case_b_avg_term(1e-6, 64);
        assert!((near - 2.0 / 3.0).abs() < 1e-6);
        assert!((case_b_avg_term(0.0, 64) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn case_b_step_averages_decrease() {
        let o1 = omega1();
        let steps: Vec<f64> = (1..=20)
            .map(|d| step_average(d as f64, |f| cbi_case_b_avg(f, &o1, 1.0, 64)))
            .collect();
        assert!(steps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn overall_is_the_mixture() {
        let o1 = omega1();
        for i in 0..40 {
            let f = 0.3 + 0.37 * i as f64;
            let mix = 0.2 * cbi_case_a(f, &o1, 1.0, 64) + 0.8 * cbi_case_b_avg(f, &o1, 1.0, 64);
            assert!((cbi_overall(f, &o1, 1.0, 64, 16) - mix).abs() < 1e-15);
        }
    }

    #[test]
    fn overall_reference_values() {
        let o1 = omega1();
        let expected = [-9.1, -13.5, -16.1, -17.8, -19.2, -20.3, -21.3, -22.1];
        for (i, e) in expected.iter().enumerate() {
            let got = to_db(cbi_overall((i + 1) as f64, &o1, 1.0, 64, 16));
            assert!((got - e).abs() <= 0.05, "f={} got {got}", i + 1);
        }
    }

    #[test]
    fn signal_psd_and_decomposition() {
        let o2 = omega2();
        assert!((signal_psd(3.0, &o2, 1.7, 64) - 1.7).abs() < 1e-12);
        assert!(signal_psd(12.0, &o2, 1.7, 64) < 1e-28);
        let oracle: f64 = o2.iter().map(|k| leakage_by_summation(4.5 - k as f64, 64, 0, 64)).sum();
        assert!((signal_psd(4.5, &o2, 1.0, 64) - oracle).abs() < 1e-12);

        let (s, i) = decompose_sig_ici(0.0, 3, &o2, 1.0, 64).unwrap();
        assert!((s - 1.0).abs() < 1e-15 && i < 1e-28);
        assert!(decompose_sig_ici(0.1, 0, &o2, 1.0, 64).is_err());
        assert!(decompose_sig_ici(0.6, 1, &o2, 1.0, 64).is_err());
    }

    #[test]
    fn sync_std_scaling() {
        let a = sync_error_std(8, 100.0).unwrap();
        let b = sync_error_std(32, 100.0).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
        assert_eq!(sync_error_std(8, f64::INFINITY).unwrap(), 0.0);
        assert!(sync_error_std(8, 0.0).is_err());
        assert!(sync_error_std(8, -1.0).is_err());
        assert!((sync_error_std(8, 10f64.powf(1.51)).unwrap() - 0.028).abs() < 5e-4);
    }

    #[test]
    fn mean_interference_silent_interferer() {
        let o2 = omega2();
        let o1 = omega1();
        assert_eq!(
            mean_interference_power(&o2, |f| cbi_overall(f, &o1, 0.0, 64, 16), 0.0),
            0.0
        );
        // Offset case against direct per-subcarrier evaluation.
        let direct: f64 = (1..=8)
            .map(|k| cbi_overall(k as f64 + 0.25, &o1, 1.0, 64, 16))
            .sum::<f64>()
            / 8.0;
        let got = mean_interference_power(&o2, |f| cbi_overall(f, &o1, 1.0, 64, 16), 0.25);
        assert!((got - direct).abs() < 1e-15);
    }

    #[test]
    fn cir_rules() {
        assert_eq!(cir(0.5, 0.0, 0.5), 1.0);
        assert_eq!(cir(1.0, 0.0, 0.0), f64::INFINITY);
        assert!(cir(1.0, 0.01, 0.2) > cir(1.0, 0.01, 0.3));
        let c = cir(from_db(-0.045), from_db(-22.0), from_db(-9.05));
        assert!((to_db(c) - 8.9).abs() < 0.15, "{}", to_db(c));
    }

    #[test]
    fn isc_pair_nulls_and_decay() {
        let k = 0;
        for f in 1..20 {
            assert!(isc_pair_psd(f as f64, k, 1.0, 64) < 1e-28);
        }
        for i in 0..60 {
            let f = 2.0 + 0.25 * i as f64;
            let unpaired = cbi_case_a(f, &SubcarrierSet::new([k - 1, k]).unwrap(), 1.0, 64);
            if unpaired > 1e-20 {
                assert!(isc_pair_psd(f, k, 1.0, 64) < unpaired, "f = {f}");
            }
        }
    }

    #[test]
    fn isc_pair_slope_is_twice_as_steep() {
        // Envelope at half-integer offsets, large N so the 1/x regime holds.
        let n = 1 << 14;
        let slope = |g: &dyn Fn(f64) -> f64| {
            let (x1, x2) = (20.5, 200.5);
            (to_db(g(x2)) - to_db(g(x1))) / (x2 / x1).log10()
        };
        let paired = slope(&|x| isc_pair_psd(x, 0, 1.0, n));
        let single = slope(&|x| dirichlet_power(x, n));
        assert!((paired + 40.0).abs() < 1.0, "paired slope {paired}");
        assert!((single + 20.0).abs() < 1.0, "single slope {single}");
        let approx = isc_pair_psd_approx(50.5, 0, 1.0);
        assert!((to_db(isc_pair_psd(50.5, 0, 1.0, n)) - to_db(approx)).abs() < 0.05);
    }

    #[test]
    fn csc_kernel_matches_single_case_a() {
        for i in 0..80 {
            let f = -3.0 + 0.173 * i as f64;
            let single = cbi_case_a(f, &SubcarrierSet::new([0]).unwrap(), 1.3, 64);
            assert_eq!(csc_subcarrier_psd(f, 0, 1.3, 64), single);
        }
        assert!(csc_subcarrier_psd(5.0, 0, 1.0, 64) < 1e-28);
        // Half-bin offset sits near the unmitigated level.
        let half = csc_subcarrier_psd(1.5, 0, 1.0, 64);
        assert!(to_db(half) > -14.0);
    }

    #[test]
    fn guardband_table_corners() {
        let cfg = OfdmConfig::default();
        assert_eq!(min_guardband(10.0, 6.0, &cfg, 8).unwrap(), Guardband::Subcarriers(2.0));
        assert_eq!(min_guardband(5.0, 0.0, &cfg, 8).unwrap(), Guardband::Subcarriers(0.0));
        assert_eq!(min_guardband(15.0, 9.0, &cfg, 8).unwrap(), Guardband::Subcarriers(10.0));
        assert_eq!(min_guardband(60.0, 20.0, &cfg, 8).unwrap(), Guardband::NotAchievable);
        assert!(min_guardband(10.0, 0.0, &cfg, 0).is_err());
    }

    #[test]
    fn sensitivity_rejects_bad_values() {
        let base = SweepBase::default();
        assert!(param_sensitivity(SweepParam::Width, &[0.0], &base).is_err());
        assert!(param_sensitivity(SweepParam::FftSize, &[100.0], &base).is_err());
        assert!(param_sensitivity(SweepParam::Rho, &[], &base).is_err());
        let out = param_sensitivity(SweepParam::Rho, &[0.0, 0.5], &base).unwrap();
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn power_spectrum_validation() {
        assert!(PowerSpectrum::new(vec![1.0], vec![]).is_err());
        assert!(PowerSpectrum::new(vec![1.0], vec![-1.0]).is_err());
        assert!(PowerSpectrum::new(vec![1.0], vec![f64::NAN]).is_err());
    }
}
