use rayon::ThreadPoolBuilder;
use xband_core::channel::ScenarioSpec;
use xband_core::harness::*;

fn small(kind: ExperimentKind, trials: usize) -> ExperimentSpec {
    let mut spec = ExperimentSpec::new(kind);
    spec.n_trials = trials;
    spec.scenario.seed = 17;
    spec
}

fn on_threads<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> T {
    ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(f)
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let mut thr = small(ExperimentKind::Throughput, 6);
    thr.p_r_db = vec![9.0];
    for spec in [
        small(ExperimentKind::InterferenceStrength, 40),
        small(ExperimentKind::SyncError, 40),
        small(ExperimentKind::Ber, 20),
        small(ExperimentKind::MitigationCompare, 20),
        thr,
    ] {
        let a = on_threads(1, || run(&spec).unwrap());
        let b = on_threads(4, || run(&spec).unwrap());
        assert_eq!(a, b, "{}", spec.kind);
        assert_eq!(a.failed_trials, 0);
    }
}

#[test]
fn seed_changes_results() {
    let a = run(&small(ExperimentKind::Ber, 10)).unwrap();
    let mut spec = small(ExperimentKind::Ber, 10);
    spec.scenario.seed = 18;
    let b = run(&spec).unwrap();
    assert_ne!(a.tables, b.tables);
    assert!(a.meta.iter().any(|(k, v)| k == "seed" && v == "17"));
}

#[test]
fn packet_bits_are_conserved() {
    let mut sc = ScenarioSpec::default();
    sc.set_power_ratio_db(6.0);
    for format in [
        SchemeFormat::None,
        SchemeFormat::Fgb { gap: 3 },
        SchemeFormat::Isc { coded: 4 },
        SchemeFormat::Csc { coded: 5 },
    ] {
        let out = evaluate_format(&sc, format, 16, 30).unwrap();
        let t = out.totals;
        assert_eq!(t.capacity_bits, 30 * 32 * 8 * 2);
        assert_eq!(t.correct_bits + t.error_bits, 30 * out.payload_bits);
        assert_eq!(t.capacity_bits, t.overhead_bits + 30 * out.payload_bits);
        assert_eq!(t.delivered_bits, out.packets.successes * out.payload_bits);
        assert!(out.ci.0 <= out.throughput && out.throughput <= out.ci.1);
    }
}

#[test]
fn format_lists() {
    assert_eq!(throughput_formats("fgb", 16).unwrap().len(), 15);
    assert_eq!(throughput_formats("isc", 16).unwrap().len(), 5);
    assert_eq!(throughput_formats("csc", 16).unwrap().len(), 9);
    assert_eq!(throughput_formats("none", 16).unwrap(), vec![SchemeFormat::None]);
    assert!(throughput_formats("tdma", 16).is_err());
}

#[test]
fn ber_rises_with_interference() {
    let mut spec = small(ExperimentKind::Ber, 200);
    spec.p_r_db = vec![0.0, 9.0];
    spec.k_factors = vec![0.0];
    let res = run_ber(&spec).unwrap();
    let (lo, hi) = (&res.by_p_r[0], &res.by_p_r[1]);
    let edge = lo.subcarriers.iter().position(|&k| k == 1).unwrap();
    assert!(hi.ber(edge).estimate() > lo.ber(edge).estimate());
    let far = lo.subcarriers.len() - 1;
    assert!(hi.ber(edge).estimate() >= hi.ber(far).estimate());
}

#[test]
fn wilson_bounds() {
    let (lo, hi) = wilson_interval(0, 100);
    assert_eq!(lo, 0.0);
    assert!(hi > 0.0 && hi < 0.05);
    let (lo, hi) = wilson_interval(50, 100);
    assert!((lo - 0.404).abs() < 0.002 && (hi - 0.596).abs() < 0.002);
    assert_eq!(Proportion::new(0, 0).estimate(), 0.0);
}

#[test]
fn invalid_specs_are_rejected() {
    let mut spec = small(ExperimentKind::Ber, 0);
    assert!(run(&spec).is_err());
    spec.n_trials = 5;
    spec.eps_max = vec![0.7];
    assert!(run(&spec).is_err());
    "bogus".parse::<ExperimentKind>().unwrap_err();
}

#[test]
fn preamble_detected_under_strong_interference() {
    let sc = ScenarioSpec::default();
    let p = sync_error_point(&sc, Some(9.0), 500, true).unwrap();
    assert!(p.detected.estimate() >= 0.99, "{:?}", p.detected);
}
