//! OFDM air-interface types and baseband symbol construction.
//!
//! Subcarriers use signed indices with 0 at DC; index `k` maps to DFT bin
//! `k mod N`. The IDFT carries the `1/N` factor and the DFT carries none, so a
//! time symbol built from `s(k)` satisfies `sum |t(n)|^2 = (1/N) sum |s(k)|^2`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{arg_err, cfg_err, Result};

/// Modulation alphabet used on every data subcarrier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Modulation {
    #[default]
    Qpsk,
}

impl Modulation {
    pub fn bits_per_symbol(self) -> usize {
        match self {
            Modulation::Qpsk => 2,
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulation::Qpsk => f.write_str("QPSK"),
        }
    }
}

/// Static air-interface parameters shared by every link in a scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct OfdmConfig {
    n_fft: usize,
    n_cp: usize,
    subcarrier_spacing_hz: f64,
    modulation: Modulation,
}

impl OfdmConfig {
    pub fn new(n_fft: usize, n_cp: usize, subcarrier_spacing_hz: f64) -> Result<Self> {
        if n_fft < 2 || !n_fft.is_power_of_two() {
            return cfg_err(format!("n_fft must be a power of two >= 2, got {n_fft}"));
        }
        if n_cp >= n_fft {
            return cfg_err(format!("n_cp must be < n_fft ({n_fft}), got {n_cp}"));
        }
        if !(subcarrier_spacing_hz > 0.0 && subcarrier_spacing_hz.is_finite()) {
            return cfg_err(format!(
                "subcarrier_spacing_hz must be positive, got {subcarrier_spacing_hz}"
            ));
        }
        Ok(Self {
            n_fft,
            n_cp,
            subcarrier_spacing_hz,
            modulation: Modulation::Qpsk,
        })
    }

    pub fn n_fft(&self) -> usize {
        self.n_fft
    }

    pub fn n_cp(&self) -> usize {
        self.n_cp
    }

    pub fn subcarrier_spacing_hz(&self) -> f64 {
        self.subcarrier_spacing_hz
    }

    pub fn modulation(&self) -> Modulation {
        self.modulation
    }

    /// Samples per transmitted symbol, cyclic prefix included.
    pub fn symbol_len(&self) -> usize {
        self.n_fft + self.n_cp
    }

    /// Cyclic-prefix overhead `n_cp / (n_fft + n_cp)`.
    pub fn cp_overhead(&self) -> f64 {
        self.n_cp as f64 / self.symbol_len() as f64
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.subcarrier_spacing_hz * self.n_fft as f64
    }

    /// Whether `k` is a valid signed subcarrier index, i.e. in `[-N/2, N/2)`.
    pub fn contains_index(&self, k: i32) -> bool {
        let half = (self.n_fft / 2) as i64;
        (-half..half).contains(&(k as i64))
    }

    /// DFT bin holding signed subcarrier `k`.
    pub fn bin(&self, k: i32) -> usize {
        (k as i64).rem_euclid(self.n_fft as i64) as usize
    }
}

impl Default for OfdmConfig {
    /// N = 64, N_CP = 16, 12.5 kHz spacing, QPSK.
    fn default() -> Self {
        Self::new(64, 16, 12_500.0).expect("default OFDM parameters are valid")
    }
}

/// Ordered, duplicate-free, non-empty set of signed subcarrier indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubcarrierSet {
    indices: Vec<i32>,
}

impl SubcarrierSet {
    pub fn new(indices: impl IntoIterator<Item = i32>) -> Result<Self> {
        let mut indices: Vec<i32> = indices.into_iter().collect();
        if indices.is_empty() {
            return arg_err("subcarrier set must not be empty");
        }
        indices.sort_unstable();
        if let Some(w) = indices.windows(2).find(|w| w[0] == w[1]) {
            return arg_err(format!("duplicate subcarrier index {}", w[0]));
        }
        Ok(Self { indices })
    }

    /// `len` consecutive subcarriers starting at `first`.
    pub fn contiguous(first: i32, len: usize) -> Result<Self> {
        Self::new((0..len as i32).map(|i| first + i))
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[i32] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> + '_ {
        self.indices.iter().copied()
    }

    pub fn first(&self) -> i32 {
        self.indices[0]
    }

    pub fn last(&self) -> i32 {
        self.indices[self.indices.len() - 1]
    }

    pub fn contains(&self, k: i32) -> bool {
        self.indices.binary_search(&k).is_ok()
    }

    pub fn position(&self, k: i32) -> Option<usize> {
        self.indices.binary_search(&k).ok()
    }

    pub fn is_disjoint(&self, other: &SubcarrierSet) -> bool {
        !self.iter().any(|k| other.contains(k))
    }

    pub fn is_subset(&self, other: &SubcarrierSet) -> bool {
        self.iter().all(|k| other.contains(k))
    }

    pub fn is_contiguous(&self) -> bool {
        (self.last() - self.first()) as usize + 1 == self.len()
    }

    /// Errors unless every index is valid for `cfg`.
    pub fn check_range(&self, cfg: &OfdmConfig) -> Result<()> {
        match self.iter().find(|&k| !cfg.contains_index(k)) {
            Some(k) => arg_err(format!(
                "subcarrier {k} outside [-{half}, {half})",
                half = cfg.n_fft() / 2
            )),
            None => Ok(()),
        }
    }
}

impl fmt::Display for SubcarrierSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_contiguous() && self.len() > 1 {
            write!(f, "{}..{}", self.first(), self.last())
        } else {
            let parts: Vec<String> = self.iter().map(|k| k.to_string()).collect();
            write!(f, "{}", parts.join(" "))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkRole {
    Signal,
    Interferer,
}

/// One link's spectrum allocation and per-subcarrier power (linear).
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub subcarriers: SubcarrierSet,
    pub power_per_subcarrier: f64,
    pub role: LinkRole,
}

impl LinkSpec {
    pub fn new(subcarriers: SubcarrierSet, power_per_subcarrier: f64, role: LinkRole) -> Result<Self> {
        if !(power_per_subcarrier > 0.0 && power_per_subcarrier.is_finite()) {
            return arg_err(format!(
                "power_per_subcarrier must be positive, got {power_per_subcarrier}"
            ));
        }
        Ok(Self {
            subcarriers,
            power_per_subcarrier,
            role,
        })
    }

    /// QPSK amplitude so that `E[|s(k)|^2]` equals the link power.
    pub fn amplitude(&self) -> f64 {
        self.power_per_subcarrier.sqrt()
    }

    pub fn bits_per_symbol(&self) -> usize {
        self.subcarriers.len() * Modulation::Qpsk.bits_per_symbol()
    }
}

/// Frequency-domain content of one symbol, supported exactly on a subcarrier set.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqSymbol {
    support: SubcarrierSet,
    values: Vec<Complex64>,
}

impl FreqSymbol {
    pub fn new(support: SubcarrierSet, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != support.len() {
            return arg_err(format!("{} values for {} subcarriers", values.len(), support.len()));
        }
        Ok(Self { support, values })
    }

    pub fn zeros(support: SubcarrierSet) -> Self {
        let values = vec![Complex64::new(0.0, 0.0); support.len()];
        Self { support, values }
    }

    pub fn support(&self) -> &SubcarrierSet {
        &self.support
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn get(&self, k: i32) -> Option<Complex64> {
        self.support.position(k).map(|i| self.values[i])
    }

    /// Overwrites the value on subcarrier `k`; errors if `k` is outside the support.
    pub fn set(&mut self, k: i32, value: Complex64) -> Result<()> {
        match self.support.position(k) {
            Some(i) => {
                self.values[i] = value;
                Ok(())
            }
            None => arg_err(format!("subcarrier {k} not in support {}", self.support)),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.support.iter().zip(self.values.iter().copied())
    }

    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn scale(&mut self, factor: Complex64) {
        for v in &mut self.values {
            *v *= factor;
        }
    }
}

/// One time-domain symbol with its cyclic prefix prepended.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSymbol {
    samples: Vec<Complex64>,
    n_cp: usize,
}

impl TimeSymbol {
    /// Prepends the last `n_cp` samples of `body` to it.
    pub fn from_body(body: &[Complex64], n_cp: usize) -> Result<Self> {
        if n_cp >= body.len() {
            return arg_err("cyclic prefix must be shorter than the symbol body");
        }
        let mut samples = Vec::with_capacity(body.len() + n_cp);
        samples.extend_from_slice(&body[body.len() - n_cp..]);
        samples.extend_from_slice(body);
        Ok(Self { samples, n_cp })
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    pub fn n_cp(&self) -> usize {
        self.n_cp
    }

    /// The symbol with its cyclic prefix stripped.
    pub fn body(&self) -> &[Complex64] {
        &self.samples[self.n_cp..]
    }
}

fn check_bit(b: u8) -> Result<bool> {
    match b {
        0 => Ok(false),
        1 => Ok(true),
        other => arg_err(format!("bit values must be 0 or 1, got {other}")),
    }
}

/// Gray-mapped QPSK point with magnitude `amplitude`.
///
/// `00 -> (1+i)`, `01 -> (-1+i)`, `11 -> (-1-i)`, `10 -> (1-i)`, all over sqrt(2).
pub fn qpsk_point(b0: bool, b1: bool, amplitude: f64) -> Complex64 {
    let a = amplitude * FRAC_1_SQRT_2;
    let re = if b1 { -a } else { a };
    let im = if b0 { -a } else { a };
    Complex64::new(re, im)
}

/// Hard-decision inverse of [`qpsk_point`].
pub fn qpsk_decide(value: Complex64) -> (u8, u8) {
    ((value.im < 0.0) as u8, (value.re < 0.0) as u8)
}

/// Maps `2 * |subcarriers|` bits onto the link's subcarriers in index order.
pub fn map_bits(bits: &[u8], link: &LinkSpec) -> Result<FreqSymbol> {
    let needed = link.bits_per_symbol();
    if bits.len() != needed {
        return arg_err(format!("expected {needed} bits, got {}", bits.len()));
    }
    let amp = link.amplitude();
    let values = bits
        .chunks_exact(2)
        .map(|pair| Ok(qpsk_point(check_bit(pair[0])?, check_bit(pair[1])?, amp)))
        .collect::<Result<Vec<_>>>()?;
    FreqSymbol::new(link.subcarriers.clone(), values)
}

/// Hard-decision bits of every value in `sym`, in index order.
pub fn demap_bits(sym: &FreqSymbol) -> Vec<u8> {
    sym.values()
        .iter()
        .flat_map(|&v| {
            let (b0, b1) = qpsk_decide(v);
            [b0, b1]
        })
        .collect()
}

/// FFT plans for one configuration. Cheap to clone and safe to share across threads.
#[derive(Clone)]
pub struct Modem {
    cfg: OfdmConfig,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Modem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modem").field("cfg", &self.cfg).finish()
    }
}

impl Modem {
    pub fn new(cfg: &OfdmConfig) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            cfg: cfg.clone(),
            forward: planner.plan_fft_forward(cfg.n_fft()),
            inverse: planner.plan_fft_inverse(cfg.n_fft()),
        }
    }

    pub fn config(&self) -> &OfdmConfig {
        &self.cfg
    }

    /// `t(n) = (1/N) sum_k s(k) e^{i 2 pi k n / N}` without the cyclic prefix.
    pub fn synthesize_body(&self, sym: &FreqSymbol) -> Result<Vec<Complex64>> {
        sym.support().check_range(&self.cfg)?;
        let n = self.cfg.n_fft();
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        for (k, v) in sym.iter() {
            buf[self.cfg.bin(k)] += v;
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / n as f64;
        for x in &mut buf {
            *x *= scale;
        }
        Ok(buf)
    }

    pub fn modulate(&self, sym: &FreqSymbol) -> Result<TimeSymbol> {
        let body = self.synthesize_body(sym)?;
        TimeSymbol::from_body(&body, self.cfg.n_cp())
    }

    /// All `N` DFT bins of a CP-stripped window, in bin order.
    pub fn spectrum(&self, body: &[Complex64]) -> Result<Vec<Complex64>> {
        if body.len() != self.cfg.n_fft() {
            return arg_err(format!(
                "window has {} samples, expected {}",
                body.len(),
                self.cfg.n_fft()
            ));
        }
        let mut buf = body.to_vec();
        self.forward.process(&mut buf);
        Ok(buf)
    }

    /// DFT of a CP-stripped window, restricted to `set`.
    pub fn demodulate_body(&self, body: &[Complex64], set: &SubcarrierSet) -> Result<FreqSymbol> {
        set.check_range(&self.cfg)?;
        let bins = self.spectrum(body)?;
        let values = set.iter().map(|k| bins[self.cfg.bin(k)]).collect();
        FreqSymbol::new(set.clone(), values)
    }

    pub fn demodulate(&self, sym: &TimeSymbol, set: &SubcarrierSet) -> Result<FreqSymbol> {
        if sym.samples().len() != self.cfg.symbol_len() || sym.n_cp() != self.cfg.n_cp() {
            return arg_err("time symbol does not match the configuration");
        }
        self.demodulate_body(sym.body(), set)
    }
}

pub fn ofdm_modulate(sym: &FreqSymbol, cfg: &OfdmConfig) -> Result<TimeSymbol> {
    Modem::new(cfg).modulate(sym)
}

pub fn ofdm_demodulate(sym: &TimeSymbol, cfg: &OfdmConfig, set: &SubcarrierSet) -> Result<FreqSymbol> {
    Modem::new(cfg).demodulate(sym, set)
}
