//! Packet synchronization for link 2: a two-half repeated preamble, delay
//! correlation for detection, fractional CFO estimation from the phase of the
//! half-symbol correlation, and a windowed FIR that keeps only link 2's band.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

use crate::error::{arg_err, cfg_err, Error, Result};
use crate::ofdm::{qpsk_point, FreqSymbol, LinkSpec, Modem, OfdmConfig, SubcarrierSet, TimeSymbol};
use crate::rng::{trial_rng, Stream};

/// Normalized metric level that declares a detection.
pub const DETECTION_THRESHOLD: f64 = 0.5;
/// Fraction of the peak metric that delimits the timing plateau.
pub const PLATEAU_FRACTION: f64 = 0.9;
pub const FILTER_TAPS: usize = 129;
/// Extra passband on each side of the pass set, in subcarriers.
pub const FILTER_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct Preamble {
    freq: FreqSymbol,
    pn: Vec<Complex64>,
    time: TimeSymbol,
}

impl Preamble {
    /// Generating symbol, nonzero only on even subcarriers.
    pub fn freq(&self) -> &FreqSymbol {
        &self.freq
    }

    /// Unit-magnitude PN values on the even subcarriers, in index order.
    pub fn pn(&self) -> &[Complex64] {
        &self.pn
    }

    pub fn time(&self) -> &TimeSymbol {
        &self.time
    }
}

/// PN QPSK on the even subcarriers of the link, with the same total power as a data symbol.
pub fn make_preamble(link: &LinkSpec, cfg: &OfdmConfig, seed: u64) -> Result<Preamble> {
    let even: Vec<i32> = link.subcarriers.iter().filter(|k| k.rem_euclid(2) == 0).collect();
    if even.is_empty() {
        return cfg_err(format!("no even subcarriers in {}", link.subcarriers));
    }
    let support = SubcarrierSet::new(even)?;
    let mut rng = trial_rng(seed, 0, Stream::Sync);
    let pn: Vec<Complex64> = (0..support.len())
        .map(|_| qpsk_point(rng.gen(), rng.gen(), 1.0))
        .collect();
    let scale = (link.subcarriers.len() as f64 * link.power_per_subcarrier / support.len() as f64).sqrt();
    let values = pn.iter().map(|v| v * scale).collect();
    let freq = FreqSymbol::new(support, values)?;
    let time = Modem::new(cfg).modulate(&freq)?;
    Ok(Preamble { freq, pn, time })
}

/// Merges contiguous runs of `set` into bands widened by half a subcarrier plus `margin`.
fn pass_bands(set: &SubcarrierSet, margin: f64) -> Vec<(f64, f64)> {
    let mut bands: Vec<(f64, f64)> = Vec::new();
    let mut start = set.first();
    let mut prev = start;
    for k in set.iter().skip(1) {
        if k != prev + 1 {
            bands.push((start as f64 - 0.5 - margin, prev as f64 + 0.5 + margin));
            start = k;
        }
        prev = k;
    }
    bands.push((start as f64 - 0.5 - margin, prev as f64 + 0.5 + margin));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for b in bands {
        match merged.last_mut() {
            Some(last) if b.0 <= last.1 => last.1 = last.1.max(b.1),
            _ => merged.push(b),
        }
    }
    merged
}

/// Taps of the Hamming-windowed ideal multiband response; `None` when it passes everything.
pub fn multiband_taps(pass_set: &SubcarrierSet, cfg: &OfdmConfig) -> Option<Vec<Complex64>> {
    let n = cfg.n_fft() as f64;
    let bands = pass_bands(pass_set, FILTER_MARGIN);
    let covered: f64 = bands.iter().map(|(a, b)| b - a).sum();
    if covered >= n {
        return None;
    }
    let mid = (FILTER_TAPS / 2) as i64;
    let taps = (0..FILTER_TAPS)
        .map(|i| {
            let m = i as i64 - mid;
            let ideal: Complex64 = bands
                .iter()
                .map(|&(a, b)| {
                    if m == 0 {
                        Complex64::new((b - a) / n, 0.0)
                    } else {
                        let mf = m as f64;
                        (Complex64::from_polar(1.0, 2.0 * PI * b * mf / n)
                            - Complex64::from_polar(1.0, 2.0 * PI * a * mf / n))
                            / Complex64::new(0.0, 2.0 * PI * mf)
                    }
                })
                .sum();
            let w = 0.54 - 0.46 * (2.0 * PI * i as f64 / (FILTER_TAPS - 1) as f64).cos();
            ideal * w
        })
        .collect();
    Some(taps)
}

/// Linear-phase FIR keeping `pass_set`, with the group delay removed so timing is preserved.
pub fn multiband_filter(samples: &[Complex64], pass_set: &SubcarrierSet, cfg: &OfdmConfig) -> Vec<Complex64> {
    let Some(taps) = multiband_taps(pass_set, cfg) else {
        return samples.to_vec();
    };
    let delay = (taps.len() / 2) as i64;
    let len = samples.len() as i64;
    (0..len)
        .map(|t| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, h) in taps.iter().enumerate() {
                let src = t + delay - i as i64;
                if (0..len).contains(&src) {
                    acc += h * samples[src as usize];
                }
            }
            acc
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    /// Normalized delay-correlation metric for every start offset.
    pub metric: Vec<f64>,
    /// Plateau midpoint: half a CP after the first sample that reaches 90% of
    /// the largest value within one CP of the first threshold crossing. Without
    /// a crossing, the midpoint of the plateau around the global maximum.
    pub peak: usize,
    pub max: f64,
}

/// `|sum r(d+n) conj(r(d+n+N/2))|^2 / (sum |r(d+n+N/2)|^2)^2` over `n < N/2`.
pub fn delay_correlate(samples: &[Complex64], cfg: &OfdmConfig) -> Result<Correlation> {
    let n = cfg.n_fft();
    let half = n / 2;
    if samples.len() < cfg.symbol_len() {
        return arg_err(format!(
            "need at least {} samples, got {}",
            cfg.symbol_len(),
            samples.len()
        ));
    }
    let metric: Vec<f64> = (0..=samples.len() - n)
        .map(|d| {
            let mut p = Complex64::new(0.0, 0.0);
            let mut r = 0.0;
            for i in 0..half {
                let b = samples[d + i + half];
                p += samples[d + i] * b.conj();
                r += b.norm_sqr();
            }
            if r > 0.0 {
                p.norm_sqr() / (r * r)
            } else {
                0.0
            }
        })
        .collect();
    let n_cp = cfg.n_cp();
    let Some(first) = metric.iter().position(|&v| v >= DETECTION_THRESHOLD) else {
        let (arg, max) = argmax(&metric, 0, metric.len());
        let level = PLATEAU_FRACTION * max;
        let mut lo = arg;
        while lo > 0 && metric[lo - 1] >= level {
            lo -= 1;
        }
        let mut hi = arg;
        while hi + 1 < metric.len() && metric[hi + 1] >= level {
            hi += 1;
        }
        return Ok(Correlation {
            metric,
            peak: (lo + hi) / 2,
            max,
        });
    };
    // The metric is normalized by the second half only and can exceed 1 once
    // the second half reaches data, so the plateau is located from its
    // leading edge and assumed to span the CP.
    let end = (first + n_cp + 1).min(metric.len());
    let (_, max) = argmax(&metric, first, end);
    let level = PLATEAU_FRACTION * max;
    let lead = (first..end).find(|&i| metric[i] >= level).unwrap_or(first);
    let peak = (lead + n_cp / 2).min(metric.len() - 1);
    Ok(Correlation { metric, peak, max })
}

fn argmax(xs: &[f64], from: usize, to: usize) -> (usize, f64) {
    xs[from..to]
        .iter()
        .copied()
        .enumerate()
        .fold(
            (from, f64::NEG_INFINITY),
            |best, (i, v)| if v > best.1 { (from + i, v) } else { best },
        )
}

/// Fractional CFO from a preamble starting at `samples[0]`, in subcarriers, range `(-1, 1]`.
pub fn estimate_cfo(samples: &[Complex64], cfg: &OfdmConfig) -> Result<f64> {
    let n = cfg.n_fft();
    let half = n / 2;
    if samples.len() < n {
        return arg_err(format!("need {n} samples, got {}", samples.len()));
    }
    let p: Complex64 = (0..half).map(|i| samples[i].conj() * samples[i + half]).sum();
    if p.norm() == 0.0 || !p.norm().is_finite() {
        return Err(Error::EstimationFailed("zero half-symbol correlation".into()));
    }
    Ok(p.arg() / PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyncResult {
    pub detected: bool,
    /// Estimated first sample of the preamble body.
    pub frame_start: usize,
    pub cfo_estimate: f64,
}

/// Detects the preamble and estimates timing and CFO.
///
/// `frame_start` points at the preamble body (after its CP); the plateau
/// spans the CP, so its midpoint sits half a CP before the body.
pub fn synchronize(samples: &[Complex64], cfg: &OfdmConfig) -> Result<SyncResult> {
    let corr = delay_correlate(samples, cfg)?;
    if corr.max < DETECTION_THRESHOLD {
        return Ok(SyncResult {
            detected: false,
            frame_start: corr.peak,
            cfo_estimate: 0.0,
        });
    }
    let start = corr.peak.min(samples.len() - cfg.n_fft());
    let cfo = estimate_cfo(&samples[start..], cfg)?;
    Ok(SyncResult {
        detected: true,
        frame_start: corr.peak + cfg.n_cp() / 2,
        cfo_estimate: cfo,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ofdm::LinkRole;

    fn link2() -> LinkSpec {
        LinkSpec::new(SubcarrierSet::contiguous(1, 8).unwrap(), 1.0, LinkRole::Signal).unwrap()
    }

    #[test]
    fn preamble_halves_repeat() {
        let cfg = OfdmConfig::default();
        let p = make_preamble(&link2(), &cfg, 3).unwrap();
        let body = p.time().body();
        for i in 0..32 {
            assert!((body[i] - body[i + 32]).norm() < 1e-15);
        }
        assert_eq!(p.freq().support().indices(), &[2, 4, 6, 8]);
        assert!((p.freq().energy() - 8.0).abs() < 1e-12);
        let q = make_preamble(&link2(), &cfg, 4).unwrap();
        assert_ne!(p.pn(), q.pn());
    }

    #[test]
    fn preamble_needs_even_subcarrier() {
        let link = LinkSpec::new(SubcarrierSet::new([3]).unwrap(), 1.0, LinkRole::Signal).unwrap();
        assert!(make_preamble(&link, &OfdmConfig::default(), 0).is_err());
    }

    #[test]
    fn pass_band_edges() {
        let set = SubcarrierSet::contiguous(1, 8).unwrap();
        assert_eq!(pass_bands(&set, 0.5), vec![(0.0, 9.0)]);
        let set = SubcarrierSet::new([1, 2, 4]).unwrap();
        assert_eq!(pass_bands(&set, 0.5), vec![(0.0, 5.0)]);
        let set = SubcarrierSet::new([1, 2, 9]).unwrap();
        assert_eq!(pass_bands(&set, 0.5), vec![(0.0, 3.0), (8.0, 10.0)]);
    }

    #[test]
    fn cfo_sign_and_range() {
        let cfg = OfdmConfig::default();
        let p = make_preamble(&link2(), &cfg, 1).unwrap();
        for &df in &[-0.9, -0.3, 0.0, 0.3, 0.45, 0.95] {
            let rx: Vec<Complex64> = p
                .time()
                .body()
                .iter()
                .enumerate()
                .map(|(m, x)| x * Complex64::from_polar(1.0, 2.0 * PI * df * m as f64 / 64.0))
                .collect();
            let est = estimate_cfo(&rx, &cfg).unwrap();
            assert!((est - df).abs() < 1e-9, "{df} -> {est}");
        }
        assert!(estimate_cfo(&[Complex64::new(0.0, 0.0); 64], &cfg).is_err());
    }
}
