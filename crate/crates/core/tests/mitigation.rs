use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use xband_core::analytic::to_db;
use xband_core::channel::{dtft_probe, MismatchModel, ScenarioSpec};
use xband_core::harness::measure_scheme;
use xband_core::mitigation::*;
use xband_core::ofdm::qpsk_point;
use xband_core::{FreqSymbol, Modem, OfdmConfig, SubcarrierSet};

fn qpsk_symbol(set: &SubcarrierSet, rng: &mut ChaCha8Rng) -> FreqSymbol {
    let vals = set.iter().map(|_| qpsk_point(rng.gen(), rng.gen(), 1.0)).collect();
    FreqSymbol::new(set.clone(), vals).unwrap()
}

fn cgauss(rng: &mut ChaCha8Rng, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    Complex64::new(
        rng.sample::<f64, _>(StandardNormal) * s,
        rng.sample::<f64, _>(StandardNormal) * s,
    )
}

#[test]
fn fgb_allocations() {
    let (a, b) = fgb_allocate(16, 4).unwrap();
    assert_eq!(a, SubcarrierSet::contiguous(-5, 6).unwrap());
    assert_eq!(b, SubcarrierSet::contiguous(5, 6).unwrap());
    let (a, b) = fgb_allocate(16, 3).unwrap();
    assert_eq!((a.len(), b.len()), (6, 7));
    assert_eq!(b.first() - a.last() - 1, 3);
    assert!(fgb_allocate(16, 15).is_err());
}

#[test]
fn isc_pair_lowers_sidelobes() {
    let cfg = OfdmConfig::default();
    let modem = Modem::new(&cfg);
    let set = SubcarrierSet::new([-1, 0]).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let plain = FreqSymbol::new(set.clone(), vec![one, one]).unwrap();
    let coded = isc_encode(&plain, &[(-1, 0)]).unwrap();
    assert_eq!(coded.get(0).unwrap(), -one);
    let grid = [3.5, -4.5, 6.5];
    let p = dtft_probe(&modem.synthesize_body(&plain).unwrap(), &cfg, &grid).unwrap();
    let c = dtft_probe(&modem.synthesize_body(&coded).unwrap(), &cfg, &grid).unwrap();
    for (a, b) in p.values().iter().zip(c.values()) {
        assert!(to_db(*a) - to_db(*b) > 6.0);
    }
}

#[test]
fn isc_round_trip_and_noise_gain() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let set = SubcarrierSet::contiguous(-7, 8).unwrap();
    let pairs = isc_edge_pairs(&set, 2, 1).unwrap();
    assert_eq!(pairs, vec![(-3, -2), (-1, 0)]);
    let sym = isc_encode(&qpsk_symbol(&set, &mut rng), &pairs).unwrap();
    assert_eq!(isc_decode(&sym, &pairs).unwrap(), sym);

    let var = 0.1;
    let trials = 20_000;
    let mut raw = 0.0;
    let mut dec = 0.0;
    for _ in 0..trials {
        let mut rx = sym.clone();
        for k in set.iter() {
            rx.set(k, sym.get(k).unwrap() + cgauss(&mut rng, var)).unwrap();
        }
        let out = isc_decode(&rx, &pairs).unwrap();
        raw += (rx.get(-1).unwrap() - sym.get(-1).unwrap()).norm_sqr();
        dec += (out.get(-1).unwrap() - sym.get(-1).unwrap()).norm_sqr();
    }
    let gain = to_db(raw / dec);
    assert!((gain - 3.01).abs() < 0.15, "{gain}");
}

#[test]
fn isc_rejects_bad_pairs() {
    let set = SubcarrierSet::contiguous(-7, 8).unwrap();
    let sym = FreqSymbol::zeros(set.clone());
    assert!(isc_encode(&sym, &[(-3, -1)]).is_err());
    assert!(isc_encode(&sym, &[(0, 1)]).is_err());
    assert!(isc_encode(&sym, &[(-2, -1), (-1, 0)]).is_err());
    assert!(isc_edge_pairs(&set, 5, 1).is_err());
}

#[test]
fn csc_phase_cases() {
    let no_cp = OfdmConfig::new(64, 0, 12_500.0).unwrap();
    for k in -5..5 {
        assert!((csc_phase(k, &no_cp) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    }
    let cfg = OfdmConfig::default();
    assert!((csc_phase(0, &cfg) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
    assert!((csc_phase(1, &cfg) - Complex64::new(0.0, 1.0)).norm() < 1e-15);
}

#[test]
fn csc_pair_is_one_tone() {
    let cfg = OfdmConfig::default();
    let modem = Modem::new(&cfg);
    let set = SubcarrierSet::new([-3]).unwrap();
    let a = FreqSymbol::new(set.clone(), vec![Complex64::new(0.6, -0.8)]).unwrap();
    let b = FreqSymbol::new(set.clone(), vec![Complex64::new(-1.0, 0.0)]).unwrap();
    let (x, y) = csc_encode((&a, &b), &set, &cfg).unwrap();
    let mut s = modem.modulate(&x).unwrap().samples().to_vec();
    s.extend_from_slice(modem.modulate(&y).unwrap().samples());
    let w = 2.0 * std::f64::consts::PI * -3.0 / 64.0;
    for i in 1..s.len() {
        let step = s[i] / s[i - 1];
        assert!((step - Complex64::from_polar(1.0, w)).norm() < 1e-12, "i={i}");
    }
}

#[test]
fn csc_round_trip() {
    let cfg = OfdmConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let set = SubcarrierSet::contiguous(-7, 8).unwrap();
    let coded = SubcarrierSet::contiguous(-3, 4).unwrap();
    let a = qpsk_symbol(&set, &mut rng);
    let b = qpsk_symbol(&set, &mut rng);
    let (x, y) = csc_encode((&a, &b), &coded, &cfg).unwrap();
    for k in [-7, -4] {
        assert_eq!(y.get(k), b.get(k));
    }
    for sel in [
        CscSelector::Genie {
            interference: (1.0, 0.0),
        },
        CscSelector::Genie {
            interference: (0.0, 1.0),
        },
        CscSelector::EnergyMetric { amplitude: 1.0 },
    ] {
        let (p, q) = csc_decode((&x, &y), &coded, &cfg, sel).unwrap();
        for k in coded.iter() {
            assert!((p.get(k).unwrap() - a.get(k).unwrap()).norm() < 1e-12);
            assert!((q.get(k).unwrap() - a.get(k).unwrap()).norm() < 1e-12);
        }
    }
    let outside = SubcarrierSet::new([3]).unwrap();
    assert!(csc_encode((&a, &b), &outside, &cfg).is_err());
}

fn csc_spectrum(tau: f64, grid: &[f64]) -> Vec<f64> {
    let mut sc = ScenarioSpec::default();
    sc.mismatch = MismatchModel::Fixed(tau);
    let scheme = MitigationScheme::Csc {
        coded: sc.link1.subcarriers.clone(),
    };
    measure_scheme(&sc, &scheme, grid, 200).unwrap().values().to_vec()
}

#[test]
fn csc_nulls_at_integer_offsets() {
    let grid: Vec<f64> = (1..=8).map(f64::from).collect();
    for tau in [0.0, 10.0, 20.0, 47.5, 70.0] {
        for v in csc_spectrum(tau, &grid) {
            assert!(to_db(v) <= -60.0, "tau={tau} {}", to_db(v));
        }
    }
}

#[test]
fn csc_spectrum_ignores_mismatch() {
    let grid = [1.5, 2.5, 4.5, 7.5];
    let base = csc_spectrum(20.0, &grid);
    for tau in [33.0, 55.5, 79.0] {
        for (a, b) in csc_spectrum(tau, &grid).iter().zip(&base) {
            assert!((to_db(*a) - to_db(*b)).abs() <= 0.2, "tau={tau}");
        }
    }
}

#[test]
fn genie_selection_beats_energy_metric() {
    let cfg = OfdmConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let set = SubcarrierSet::contiguous(1, 8).unwrap();
    let mut errs = [0u64; 2];
    for _ in 0..3000 {
        let a = qpsk_symbol(&set, &mut rng);
        let b = qpsk_symbol(&set, &mut rng);
        let (x, y) = csc_encode((&a, &b), &set, &cfg).unwrap();
        let v0 = if rng.gen::<bool>() { 0.05 } else { 1.5 };
        let v1 = if rng.gen::<bool>() { 0.05 } else { 1.5 };
        let mut rx = (x.clone(), y.clone());
        for k in set.iter() {
            rx.0.set(k, x.get(k).unwrap() + cgauss(&mut rng, v0)).unwrap();
            rx.1.set(k, y.get(k).unwrap() + cgauss(&mut rng, v1)).unwrap();
        }
        let sels = [
            CscSelector::Genie { interference: (v0, v1) },
            CscSelector::EnergyMetric { amplitude: 1.0 },
        ];
        for (e, sel) in errs.iter_mut().zip(sels) {
            let (p, _) = csc_decode((&rx.0, &rx.1), &set, &cfg, sel).unwrap();
            for k in set.iter() {
                let got = p.get(k).unwrap();
                let want = a.get(k).unwrap();
                *e += u64::from((got.re < 0.0) != (want.re < 0.0)) + u64::from((got.im < 0.0) != (want.im < 0.0));
            }
        }
    }
    assert!(errs[0] <= errs[1], "{errs:?}");
}
