use num_complex::Complex64;
use proptest::prelude::*;
use xband_core::ofdm::{demap_bits, map_bits, ofdm_demodulate, ofdm_modulate};
use xband_core::{FreqSymbol, LinkRole, LinkSpec, OfdmConfig, SubcarrierSet, TimeSymbol};

fn link(first: i32, len: usize, p: f64) -> LinkSpec {
    LinkSpec::new(SubcarrierSet::contiguous(first, len).unwrap(), p, LinkRole::Signal).unwrap()
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

#[test]
fn gray_corners() {
    let l = link(1, 1, 1.0);
    let s = map_bits(&[0, 0], &l).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!(close(s.get(1).unwrap(), Complex64::new(h, h), 1e-15));
    let s = map_bits(&[1, 1], &l).unwrap();
    assert!(close(s.get(1).unwrap(), Complex64::new(-h, -h), 1e-15));
    assert!(map_bits(&[0, 1, 1], &l).is_err());
}

#[test]
fn qpsk_power_exact() {
    let l = link(1, 8, 2.0);
    let bits: Vec<u8> = (0..16).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
    let s = map_bits(&bits, &l).unwrap();
    for (_, v) in s.iter() {
        assert!((v.norm_sqr() - 2.0).abs() < 1e-12);
    }
    assert_eq!(demap_bits(&s), bits);
}

#[test]
fn dc_round_trip() {
    let cfg = OfdmConfig::default();
    let set = SubcarrierSet::new([0]).unwrap();
    let sym = FreqSymbol::new(set.clone(), vec![Complex64::new(1.0, 0.0)]).unwrap();
    let t = ofdm_modulate(&sym, &cfg).unwrap();
    for x in t.samples() {
        assert!(close(*x, Complex64::new(1.0 / 64.0, 0.0), 1e-15));
    }
    let all = SubcarrierSet::contiguous(-32, 64).unwrap();
    let back = ofdm_demodulate(&t, &cfg, &all).unwrap();
    for (k, v) in back.iter() {
        let want = if k == 0 { 1.0 } else { 0.0 };
        assert!(close(v, Complex64::new(want, 0.0), 1e-12), "k={k} {v}");
    }
}

#[test]
fn four_point_tone() {
    let cfg = OfdmConfig::new(4, 1, 12_500.0).unwrap();
    let sym = FreqSymbol::new(SubcarrierSet::new([1]).unwrap(), vec![Complex64::new(1.0, 0.0)]).unwrap();
    let t = ofdm_modulate(&sym, &cfg).unwrap();
    for (n, x) in t.body().iter().enumerate() {
        let want = Complex64::from_polar(0.25, 2.0 * std::f64::consts::PI * n as f64 / 4.0);
        assert!(close(*x, want, 1e-15));
    }
}

#[test]
fn cyclic_shift_is_linear_phase() {
    let cfg = OfdmConfig::default();
    let set = SubcarrierSet::contiguous(-5, 11).unwrap();
    let values: Vec<Complex64> = (0..11)
        .map(|i| Complex64::new((i as f64).cos(), (i as f64 * 0.7).sin()))
        .collect();
    let sym = FreqSymbol::new(set.clone(), values).unwrap();
    let body = ofdm_modulate(&sym, &cfg).unwrap().body().to_vec();
    for d in [0usize, 1, 5, 17, 63] {
        let shifted: Vec<Complex64> = (0..64).map(|n| body[(n + 64 - d) % 64]).collect();
        let t = TimeSymbol::from_body(&shifted, cfg.n_cp()).unwrap();
        let r = ofdm_demodulate(&t, &cfg, &set).unwrap();
        for (k, v) in r.iter() {
            let rot = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (k as f64) * d as f64 / 64.0);
            assert!(close(v, sym.get(k).unwrap() * rot, 1e-12), "d={d} k={k}");
        }
    }
}

prop_compose! {
    fn any_symbol()(first in -32i32..20, len in 1usize..12, seed in proptest::collection::vec(-1.0f64..1.0, 24)) -> FreqSymbol {
        let len = len.min((32 - first) as usize);
        let set = SubcarrierSet::contiguous(first, len).unwrap();
        let values = (0..len).map(|i| Complex64::new(seed[2 * i], seed[2 * i + 1])).collect();
        FreqSymbol::new(set, values).unwrap()
    }
}

proptest! {
    #[test]
    fn round_trip_parseval_and_cp(sym in any_symbol()) {
        let cfg = OfdmConfig::default();
        let t = ofdm_modulate(&sym, &cfg).unwrap();
        let s = t.samples();
        for i in 0..cfg.n_cp() {
            prop_assert_eq!(s[i], s[cfg.n_fft() + i]);
        }
        let time_energy: f64 = t.body().iter().map(|x| x.norm_sqr()).sum();
        let freq_energy = sym.energy() / cfg.n_fft() as f64;
        prop_assert!((time_energy - freq_energy).abs() <= 1e-12 * freq_energy.max(1e-300));
        let back = ofdm_demodulate(&t, &cfg, sym.support()).unwrap();
        let scale = sym.values().iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        for (a, b) in back.values().iter().zip(sym.values()) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }
}
