//! Waveform-level two-link scenario: temporal mismatch, inter-link carrier
//! offset, flat Rician fading and AWGN as seen at link 2's receiver.
//!
//! Time is measured in samples at the victim receiver. Link 2's symbols are
//! aligned to sample 0 (after an optional lead-in); link 1's stream starts one
//! symbol early and is delayed by the realized mismatch, so every victim
//! window overlaps at most two interferer symbols.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytic::PowerSpectrum;
use crate::error::{arg_err, cfg_err, Result};
use crate::ofdm::{map_bits, FreqSymbol, LinkRole, LinkSpec, Modem, OfdmConfig, SubcarrierSet};
use crate::rng::{trial_rng, Stream};

/// Distribution of the interferer's arrival delay relative to the victim.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MismatchModel {
    /// Fixed delay in samples, in `[0, N + N_CP)`.
    Fixed(f64),
    /// Uniform in `[0, N + N_CP)`, redrawn per trial.
    Uniform,
}

/// Inter-link carrier offset in subcarrier units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FreqOffsetModel {
    Fixed(f64),
    /// Uniform in `[-eps_max, eps_max]`, redrawn per trial.
    Uniform(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingKind {
    NonFading,
    /// `k_factor = 0` is Rayleigh; `f64::INFINITY` is non-fading.
    Rician {
        k_factor: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    pub kind: FadingKind,
    /// Use one coefficient for both links.
    pub tie_channels: bool,
}

impl ChannelModel {
    pub fn non_fading() -> Self {
        Self {
            kind: FadingKind::NonFading,
            tie_channels: true,
        }
    }

    pub fn rayleigh() -> Self {
        Self::rician(0.0)
    }

    pub fn rician(k_factor: f64) -> Self {
        Self {
            kind: FadingKind::Rician { k_factor },
            tie_channels: true,
        }
    }

    pub fn untied(mut self) -> Self {
        self.tie_channels = false;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let FadingKind::Rician { k_factor } = self.kind {
            if !(k_factor >= 0.0) {
                return cfg_err(format!("k_factor must be >= 0, got {k_factor}"));
            }
        }
        Ok(())
    }

    /// One coefficient with `E[|h|^2] = 1`. Always consumes the same number of draws.
    pub fn draw<R: Rng>(&self, rng: &mut R) -> Complex64 {
        let theta = rng.gen::<f64>() * 2.0 * PI;
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let scattered = Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2;
        match self.kind {
            FadingKind::NonFading => Complex64::new(1.0, 0.0),
            FadingKind::Rician { k_factor } if k_factor.is_infinite() => Complex64::new(1.0, 0.0),
            FadingKind::Rician { k_factor } => {
                let los = (k_factor / (k_factor + 1.0)).sqrt();
                let nlos = (1.0 / (k_factor + 1.0)).sqrt();
                Complex64::from_polar(los, theta) + scattered * nlos
            }
        }
    }
}

/// Two-link scenario at link 2's receiver. Link 1 interferes with link 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub cfg: OfdmConfig,
    pub link1: LinkSpec,
    pub link2: LinkSpec,
    pub mismatch: MismatchModel,
    pub freq_offset: FreqOffsetModel,
    pub channel: ChannelModel,
    pub noise_power_per_subcarrier: f64,
    /// OFDM symbols per packet.
    pub packet_len: usize,
    pub seed: u64,
}

impl Default for ScenarioSpec {
    /// N = 64, N_CP = 16, link 1 on -7..0, link 2 on 1..8, equal unit power,
    /// uniform mismatch, no offset, non-fading, -40 dB noise, 32-symbol packets.
    fn default() -> Self {
        let link1 = LinkSpec::new(
            SubcarrierSet::contiguous(-7, 8).expect("valid set"),
            1.0,
            LinkRole::Interferer,
        )
        .expect("valid link");
        let link2 = LinkSpec::new(
            SubcarrierSet::contiguous(1, 8).expect("valid set"),
            1.0,
            LinkRole::Signal,
        )
        .expect("valid link");
        Self {
            cfg: OfdmConfig::default(),
            link1,
            link2,
            mismatch: MismatchModel::Uniform,
            freq_offset: FreqOffsetModel::Fixed(0.0),
            channel: ChannelModel::non_fading(),
            noise_power_per_subcarrier: 1e-4,
            packet_len: 32,
            seed: 0,
        }
    }
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        self.link1.subcarriers.check_range(&self.cfg)?;
        self.link2.subcarriers.check_range(&self.cfg)?;
        if !self.link1.subcarriers.is_disjoint(&self.link2.subcarriers) {
            return cfg_err("the two links' subcarrier sets overlap");
        }
        let sym_len = self.cfg.symbol_len() as f64;
        if let MismatchModel::Fixed(tau) = self.mismatch {
            if !(0.0..sym_len).contains(&tau) {
                return cfg_err(format!("fixed tau {tau} outside [0, {sym_len})"));
            }
        }
        match self.freq_offset {
            FreqOffsetModel::Fixed(e) if !(e.abs() <= 0.5) => {
                return cfg_err(format!("|epsilon| must be <= 0.5, got {e}"));
            }
            FreqOffsetModel::Uniform(m) if !(0.0..=0.5).contains(&m) => {
                return cfg_err(format!("eps_max must be in [0, 0.5], got {m}"));
            }
            _ => {}
        }
        self.channel.validate()?;
        if !(self.noise_power_per_subcarrier >= 0.0 && self.noise_power_per_subcarrier.is_finite()) {
            return cfg_err("noise power must be a non-negative finite number");
        }
        if self.packet_len == 0 {
            return cfg_err("packet_len must be >= 1");
        }
        Ok(())
    }

    /// `10 log10(P1 / P2)`.
    pub fn power_ratio_db(&self) -> f64 {
        10.0 * (self.link1.power_per_subcarrier / self.link2.power_per_subcarrier).log10()
    }

    /// Sets P1 so that the power ratio equals `p_r_db`, keeping P2.
    pub fn set_power_ratio_db(&mut self, p_r_db: f64) {
        self.link1.power_per_subcarrier = self.link2.power_per_subcarrier * 10f64.powf(p_r_db / 10.0);
    }
}

/// Random quantities drawn for one trial.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialRealization {
    /// Continuous mismatch in samples.
    pub tau: f64,
    /// Integer delay actually applied to link 1, in `[0, N + N_CP)`.
    pub delay: usize,
    pub epsilon: f64,
    pub h1: Complex64,
    pub h2: Complex64,
}

/// Draws mismatch, offset and channel coefficients for `trial_index`.
pub fn realize(spec: &ScenarioSpec, trial_index: u64) -> TrialRealization {
    let mut rng = trial_rng(spec.seed, trial_index, Stream::Channel);
    let sym_len = spec.cfg.symbol_len();
    let u_tau: f64 = rng.gen();
    let u_eps: f64 = rng.gen();
    let tau = match spec.mismatch {
        MismatchModel::Fixed(t) => t,
        MismatchModel::Uniform => u_tau * sym_len as f64,
    };
    let epsilon = match spec.freq_offset {
        FreqOffsetModel::Fixed(e) => e,
        FreqOffsetModel::Uniform(m) => (2.0 * u_eps - 1.0) * m,
    };
    let mut delay = tau.round() as usize;
    if delay >= sym_len {
        delay = 0;
    }
    let h_a = spec.channel.draw(&mut rng);
    let h_b = spec.channel.draw(&mut rng);
    let h1 = h_a;
    let h2 = if spec.channel.tie_channels { h_a } else { h_b };
    TrialRealization {
        tau,
        delay,
        epsilon,
        h1,
        h2,
    }
}

/// Superposition at link 2's receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedFrame {
    /// Link 1 + link 2 + noise.
    pub samples: Vec<Complex64>,
    /// Link 1's contribution alone (channel and offset applied).
    pub interference: Vec<Complex64>,
    pub meta: TrialRealization,
    /// Samples before link 2's first symbol.
    pub lead_in: usize,
    pub n_symbols: usize,
    /// Link 2's transmitted symbols, when generated by [`realize_trial`].
    pub link2_tx: Vec<FreqSymbol>,
}

impl ReceivedFrame {
    fn window_start(&self, j: usize, cfg: &OfdmConfig) -> usize {
        self.lead_in + j * cfg.symbol_len() + cfg.n_cp()
    }

    /// CP-stripped window of link 2's symbol `j`.
    pub fn window(&self, j: usize, cfg: &OfdmConfig) -> &[Complex64] {
        let s = self.window_start(j, cfg);
        &self.samples[s..s + cfg.n_fft()]
    }

    pub fn interference_window(&self, j: usize, cfg: &OfdmConfig) -> &[Complex64] {
        let s = self.window_start(j, cfg);
        &self.interference[s..s + cfg.n_fft()]
    }
}

/// Per-frame inputs to [`synthesize_frame`].
#[derive(Debug, Clone, Copy)]
pub struct FrameInputs<'a> {
    /// Interferer symbols; the first one precedes link 2's first symbol.
    pub link1: &'a [FreqSymbol],
    /// Victim symbols; may be empty for an interferer-only frame.
    pub link2: &'a [FreqSymbol],
    /// Link 2's own carrier offset (subcarriers), applied from its first sample.
    pub link2_cfo: f64,
    pub lead_in: usize,
    /// Frame length in link-2 symbols.
    pub n_symbols: usize,
}

fn stream(modem: &Modem, syms: &[FreqSymbol]) -> Result<Vec<Complex64>> {
    let mut out = Vec::with_capacity(syms.len() * modem.config().symbol_len());
    for s in syms {
        out.extend(modem.modulate(s)?.into_samples());
    }
    Ok(out)
}

/// Builds the received samples for one realization.
pub fn synthesize_frame<R: Rng>(
    modem: &Modem,
    real: &TrialRealization,
    inputs: FrameInputs<'_>,
    noise_power_per_subcarrier: f64,
    noise_rng: &mut R,
) -> Result<ReceivedFrame> {
    let cfg = modem.config();
    let (n, l) = (cfg.n_fft(), cfg.symbol_len());
    let total = inputs.lead_in + inputs.n_symbols * l;
    if !inputs.link2.is_empty() && inputs.link2.len() != inputs.n_symbols {
        return arg_err(format!(
            "{} link 2 symbols for a {}-symbol frame",
            inputs.link2.len(),
            inputs.n_symbols
        ));
    }
    if real.delay >= l {
        return arg_err(format!("delay {} must be < {l}", real.delay));
    }
    let needed = total.div_ceil(l) + 1;
    if inputs.link1.len() < needed {
        return arg_err(format!(
            "frame needs {needed} interferer symbols, got {}",
            inputs.link1.len()
        ));
    }

    let s1 = stream(modem, inputs.link1)?;
    let step1 = 2.0 * PI * real.epsilon / n as f64;
    let interference: Vec<Complex64> = (0..total)
        .map(|t| {
            let m = t + l - real.delay;
            s1[m] * real.h1 * Complex64::from_polar(1.0, step1 * m as f64)
        })
        .collect();

    let mut samples = interference.clone();
    if !inputs.link2.is_empty() {
        let s2 = stream(modem, inputs.link2)?;
        let step2 = 2.0 * PI * inputs.link2_cfo / n as f64;
        for (m, x) in s2.iter().enumerate() {
            let rot = if inputs.link2_cfo == 0.0 {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::from_polar(1.0, step2 * m as f64)
            };
            samples[inputs.lead_in + m] += x * real.h2 * rot;
        }
    }

    if noise_power_per_subcarrier > 0.0 {
        let sigma = (noise_power_per_subcarrier / n as f64 / 2.0).sqrt();
        for x in &mut samples {
            let re: f64 = noise_rng.sample(StandardNormal);
            let im: f64 = noise_rng.sample(StandardNormal);
            *x += Complex64::new(re, im) * sigma;
        }
    }

    Ok(ReceivedFrame {
        samples,
        interference,
        meta: *real,
        lead_in: inputs.lead_in,
        n_symbols: inputs.n_symbols,
        link2_tx: Vec::new(),
    })
}

pub fn random_bits<R: Rng>(count: usize, rng: &mut R) -> Vec<u8> {
    (0..count).map(|_| rng.gen_range(0..=1u8)).collect()
}

/// `count` independent QPSK symbols for `link`.
pub fn random_symbols<R: Rng>(link: &LinkSpec, count: usize, rng: &mut R) -> Result<Vec<FreqSymbol>> {
    (0..count)
        .map(|_| map_bits(&random_bits(link.bits_per_symbol(), rng), link))
        .collect()
}

/// Frame with random QPSK data on both links, deterministic in `(spec.seed, trial_index)`.
pub fn realize_trial(spec: &ScenarioSpec, n_symbols: usize, trial_index: u64) -> Result<ReceivedFrame> {
    spec.validate()?;
    if n_symbols == 0 {
        return arg_err("n_symbols must be >= 1");
    }
    let modem = Modem::new(&spec.cfg);
    let real = realize(spec, trial_index);
    let mut rng1 = trial_rng(spec.seed, trial_index, Stream::InterfererData);
    let mut rng2 = trial_rng(spec.seed, trial_index, Stream::SignalData);
    let mut rngn = trial_rng(spec.seed, trial_index, Stream::Noise);
    let link1 = random_symbols(&spec.link1, n_symbols + 1, &mut rng1)?;
    let link2 = random_symbols(&spec.link2, n_symbols, &mut rng2)?;
    let inputs = FrameInputs {
        link1: &link1,
        link2: &link2,
        link2_cfo: 0.0,
        lead_in: 0,
        n_symbols,
    };
    let mut frame = synthesize_frame(&modem, &real, inputs, spec.noise_power_per_subcarrier, &mut rngn)?;
    frame.link2_tx = link2;
    Ok(frame)
}

/// Precomputed DTFT evaluator for windows of `N` samples.
#[derive(Debug, Clone)]
pub struct DtftProbe {
    n: usize,
    f_grid: Vec<f64>,
    twiddles: Vec<Complex64>,
}

impl DtftProbe {
    pub fn new(cfg: &OfdmConfig, f_grid: &[f64]) -> Result<Self> {
        let n = cfg.n_fft();
        let half = (n / 2) as f64;
        if let Some(f) = f_grid.iter().find(|f| !(-half..half).contains(*f)) {
            return arg_err(format!("probe frequency {f} outside [-{half}, {half})"));
        }
        let mut twiddles = Vec::with_capacity(f_grid.len() * n);
        for &f in f_grid {
            for m in 0..n {
                twiddles.push(Complex64::from_polar(1.0, -2.0 * PI * f * m as f64 / n as f64));
            }
        }
        Ok(Self {
            n,
            f_grid: f_grid.to_vec(),
            twiddles,
        })
    }

    pub fn f_grid(&self) -> &[f64] {
        &self.f_grid
    }

    /// Adds `|sum_n x(n) e^{-i 2 pi f n / N}|^2` for each grid point into `acc`.
    pub fn accumulate(&self, window: &[Complex64], acc: &mut [f64]) -> Result<()> {
        if window.len() != self.n {
            return arg_err(format!("window has {} samples, expected {}", window.len(), self.n));
        }
        for (i, a) in acc.iter_mut().enumerate() {
            let row = &self.twiddles[i * self.n..(i + 1) * self.n];
            let s: Complex64 = window.iter().zip(row).map(|(x, w)| x * w).sum();
            *a += s.norm_sqr();
        }
        Ok(())
    }

    pub fn probe(&self, window: &[Complex64]) -> Result<PowerSpectrum> {
        let mut acc = vec![0.0; self.f_grid.len()];
        self.accumulate(window, &mut acc)?;
        PowerSpectrum::new(self.f_grid.clone(), acc)
    }
}

pub fn dtft_probe(samples: &[Complex64], cfg: &OfdmConfig, f_grid: &[f64]) -> Result<PowerSpectrum> {
    DtftProbe::new(cfg, f_grid)?.probe(samples)
}

/// Which victim windows contribute to a spectrum measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WindowSelection {
    #[default]
    All,
    /// From each pair of consecutive windows, the one with less interference
    /// energy on the victim's subcarriers.
    LessInterferedOfPair,
}

/// Options for [`measure_spectrum`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeOptions {
    pub selection: WindowSelection,
    /// Divide by P1.
    pub normalize: bool,
    /// Transmit link 1; when false only noise reaches the probe.
    pub interferer_on: bool,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        Self {
            selection: WindowSelection::All,
            normalize: true,
            interferer_on: true,
        }
    }
}

fn window_energy_on(modem: &Modem, window: &[Complex64], set: &SubcarrierSet) -> Result<f64> {
    Ok(modem.demodulate_body(window, set)?.energy())
}

/// Average power spectrum seen in link 2's windows while link 2 is silent.
///
/// `make_interferer(rng, count)` produces the interferer's `count` symbols for
/// one trial; this is where transmit-side coding is plugged in.
pub fn measure_spectrum<F>(
    spec: &ScenarioSpec,
    f_grid: &[f64],
    n_trials: usize,
    opts: ProbeOptions,
    make_interferer: F,
) -> Result<PowerSpectrum>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<Vec<FreqSymbol>> + Sync,
{
    spec.validate()?;
    if n_trials == 0 {
        return arg_err("n_trials must be >= 1");
    }
    let modem = Modem::new(&spec.cfg);
    let probe = DtftProbe::new(&spec.cfg, f_grid)?;
    let n_sym = spec.packet_len;
    let per_trial: Vec<Result<(Vec<f64>, usize)>> = (0..n_trials as u64)
        .into_par_iter()
        .map(|t| {
            let real = realize(spec, t);
            let mut rng1 = trial_rng(spec.seed, t, Stream::InterfererData);
            let mut rngn = trial_rng(spec.seed, t, Stream::Noise);
            let count = n_sym + 2;
            let mut link1 = make_interferer(&mut rng1, count)?;
            if !opts.interferer_on {
                for s in &mut link1 {
                    s.scale(Complex64::new(0.0, 0.0));
                }
            }
            let inputs = FrameInputs {
                link1: &link1,
                link2: &[],
                link2_cfo: 0.0,
                lead_in: 0,
                n_symbols: n_sym,
            };
            let frame = synthesize_frame(&modem, &real, inputs, spec.noise_power_per_subcarrier, &mut rngn)?;
            let mut acc = vec![0.0; f_grid.len()];
            let mut used = 0;
            match opts.selection {
                WindowSelection::All => {
                    for j in 0..n_sym {
                        probe.accumulate(frame.window(j, &spec.cfg), &mut acc)?;
                        used += 1;
                    }
                }
                WindowSelection::LessInterferedOfPair => {
                    for j in (0..n_sym.saturating_sub(1)).step_by(2) {
                        let e0 = window_energy_on(&modem, frame.window(j, &spec.cfg), &spec.link2.subcarriers)?;
                        let e1 = window_energy_on(&modem, frame.window(j + 1, &spec.cfg), &spec.link2.subcarriers)?;
                        let pick = if e1 < e0 { j + 1 } else { j };
                        probe.accumulate(frame.window(pick, &spec.cfg), &mut acc)?;
                        used += 1;
                    }
                }
            }
            Ok((acc, used))
        })
        .collect();

    let mut sum = vec![0.0; f_grid.len()];
    let mut windows = 0usize;
    for r in per_trial {
        let (acc, used) = r?;
        for (s, a) in sum.iter_mut().zip(acc) {
            *s += a;
        }
        windows += used;
    }
    if windows == 0 {
        return arg_err("no windows were probed");
    }
    let norm = if opts.normalize {
        spec.link1.power_per_subcarrier
    } else {
        1.0
    };
    let values = sum.into_iter().map(|s| s / windows as f64 / norm).collect();
    PowerSpectrum::new(f_grid.to_vec(), values)
}

/// Average interference spectrum from uncoded random QPSK on link 1, normalized by P1.
pub fn measure_cbi(spec: &ScenarioSpec, f_grid: &[f64], n_trials: usize) -> Result<PowerSpectrum> {
    let link1 = spec.link1.clone();
    measure_spectrum(spec, f_grid, n_trials, ProbeOptions::default(), move |rng, count| {
        random_symbols(&link1, count, rng)
    })
}
