use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xband_core::analytic::to_db;
use xband_core::channel::random_symbols;
use xband_core::sync::*;
use xband_core::{LinkRole, LinkSpec, Modem, OfdmConfig, SubcarrierSet};

fn link2() -> LinkSpec {
    LinkSpec::new(SubcarrierSet::contiguous(1, 8).unwrap(), 1.0, LinkRole::Signal).unwrap()
}

/// Power gain of the filter at subcarrier `f`, straight from the taps.
fn gain_db(taps: &[Complex64], f: f64, n: usize) -> f64 {
    let mid = (taps.len() / 2) as f64;
    let h: Complex64 = taps
        .iter()
        .enumerate()
        .map(|(i, t)| t * Complex64::from_polar(1.0, -2.0 * PI * f * (i as f64 - mid) / n as f64))
        .sum();
    to_db(h.norm_sqr())
}

/// Silence, then preamble and data symbols of link 2, rotated by `cfo` subcarriers.
fn packet(cfg: &OfdmConfig, lead: usize, cfo: f64, seed: u64) -> Vec<Complex64> {
    let modem = Modem::new(cfg);
    let pre = make_preamble(&link2(), cfg, 7).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![Complex64::new(0.0, 0.0); lead];
    out.extend_from_slice(pre.time().samples());
    for s in random_symbols(&link2(), 4, &mut rng).unwrap() {
        out.extend_from_slice(modem.modulate(&s).unwrap().samples());
    }
    let n = cfg.n_fft() as f64;
    for (i, x) in out.iter_mut().enumerate() {
        *x *= Complex64::from_polar(1.0, 2.0 * PI * cfo * i as f64 / n);
    }
    out
}

#[test]
fn preamble_has_repeated_halves() {
    let cfg = OfdmConfig::default();
    let pre = make_preamble(&link2(), &cfg, 3).unwrap();
    assert!(pre.freq().support().iter().all(|k| k % 2 == 0));
    assert!(pre.pn().iter().all(|v| (v.norm() - 1.0).abs() < 1e-12));
    assert!((pre.freq().energy() - 8.0).abs() < 1e-12);
    let body = pre.time().body();
    for i in 0..32 {
        assert!((body[i] - body[i + 32]).norm() < 1e-14);
    }
    let odd = LinkSpec::new(SubcarrierSet::new([1, 3]).unwrap(), 1.0, LinkRole::Signal).unwrap();
    assert!(make_preamble(&odd, &cfg, 3).is_err());
}

#[test]
fn filter_rejects_interferer_band() {
    let cfg = OfdmConfig::default();
    let taps = multiband_taps(&link2().subcarriers, &cfg).unwrap();
    assert_eq!(taps.len(), FILTER_TAPS);
    for k in -7..=-2 {
        assert!(
            gain_db(&taps, k as f64, 64) <= -40.0,
            "k={k} {}",
            gain_db(&taps, k as f64, 64)
        );
    }
    for k in 2..=7 {
        assert!(gain_db(&taps, k as f64, 64).abs() <= 0.5, "k={k}");
    }
    let all = SubcarrierSet::contiguous(-32, 64).unwrap();
    assert!(multiband_taps(&all, &cfg).is_none());
    let x: Vec<Complex64> = (0..50).map(|i| Complex64::new(i as f64, 1.0)).collect();
    assert_eq!(multiband_filter(&x, &all, &cfg), x);
}

#[test]
fn clean_preamble_is_found() {
    let cfg = OfdmConfig::default();
    let lead = 40;
    let rx = packet(&cfg, lead, 0.0, 1);
    let corr = delay_correlate(&rx, &cfg).unwrap();
    assert!(corr.metric.iter().cloned().fold(0.0, f64::max) >= 0.99);
    assert!(corr.max >= DETECTION_THRESHOLD);
    let res = synchronize(&rx, &cfg).unwrap();
    assert!(res.detected);
    assert!(res.frame_start.abs_diff(lead + cfg.n_cp()) <= cfg.n_cp());
    assert!(res.cfo_estimate.abs() < 1e-9);
}

#[test]
fn noise_does_not_trigger() {
    let cfg = OfdmConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..20 {
        let x: Vec<Complex64> = (0..800)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let corr = delay_correlate(&x, &cfg).unwrap();
        assert!(corr.max < 0.4, "{}", corr.max);
        assert!(!synchronize(&x, &cfg).unwrap().detected);
    }
    assert!(delay_correlate(&[Complex64::new(1.0, 0.0); 10], &cfg).is_err());
}

#[test]
fn cfo_is_recovered() {
    let cfg = OfdmConfig::default();
    for cfo in [0.3, -0.45, 0.05] {
        let rx = packet(&cfg, 0, cfo, 2);
        let est = estimate_cfo(&rx[cfg.n_cp()..], &cfg).unwrap();
        assert!((est - cfo).abs() < 1e-6, "{cfo} {est}");
    }
    assert!(estimate_cfo(&[Complex64::new(0.0, 0.0); 64], &cfg).is_err());
}

#[test]
fn zero_offset_estimates_are_unbiased_in_noise() {
    let cfg = OfdmConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let n = 400;
    let mean = (0..n)
        .map(|s| {
            let mut rx = packet(&cfg, 0, 0.0, s);
            for x in &mut rx {
                *x += Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5) * 0.02;
            }
            estimate_cfo(&rx[cfg.n_cp()..], &cfg).unwrap()
        })
        .sum::<f64>()
        / n as f64;
    assert!(mean.abs() < 2e-3, "{mean}");
}

#[test]
fn timing_follows_translation() {
    let cfg = OfdmConfig::default();
    let base = synchronize(&packet(&cfg, 40, 0.1, 5), &cfg).unwrap();
    for d in [1usize, 7, 33, 100] {
        let r = synchronize(&packet(&cfg, 40 + d, 0.1, 5), &cfg).unwrap();
        assert_eq!(r.frame_start, base.frame_start + d);
    }
}

#[test]
fn filter_keeps_timing() {
    let cfg = OfdmConfig::default();
    let lead = 200;
    let rx = packet(&cfg, lead, 0.2, 6);
    let filtered = multiband_filter(&rx, &link2().subcarriers, &cfg);
    let a = synchronize(&rx, &cfg).unwrap();
    let b = synchronize(&filtered, &cfg).unwrap();
    assert!(b.detected);
    assert!(b.frame_start.abs_diff(a.frame_start) <= 2);
    assert!((b.cfo_estimate - 0.2).abs() < 0.01);
}
