use crate::analytic::{cbi_overall, to_db, PowerSpectrum};
use crate::channel::{measure_spectrum, random_symbols, ProbeOptions, ScenarioSpec, WindowSelection};
use crate::error::{arg_err, Result};
use crate::mitigation::{csc_encode, fgb_allocate, isc_edge_pairs, isc_encode, MitigationScheme};
use crate::ofdm::{FreqSymbol, LinkSpec, SubcarrierSet};
use crate::rng::point_seed;

use super::{grid, CampaignReport, Cell, ExperimentKind, ExperimentSpec, Table};

fn coded_symbols(
    link: &LinkSpec,
    scheme: &MitigationScheme,
    scenario: &ScenarioSpec,
    rng: &mut rand_chacha::ChaCha8Rng,
    count: usize,
) -> Result<Vec<FreqSymbol>> {
    let raw = random_symbols(link, count, rng)?;
    match scheme {
        MitigationScheme::None | MitigationScheme::Fgb { .. } => Ok(raw),
        MitigationScheme::Isc { pairs } => raw.iter().map(|s| isc_encode(s, pairs)).collect(),
        MitigationScheme::Csc { coded } => {
            let mut out = Vec::with_capacity(count);
            for pair in raw.chunks(2) {
                if let [a, b] = pair {
                    let (x, y) = csc_encode((a, b), coded, &scenario.cfg)?;
                    out.push(x);
                    out.push(y);
                } else {
                    out.push(pair[0].clone());
                }
            }
            Ok(out)
        }
    }
}

/// Noise-free interference spectrum of link 1 coded with `scheme`, normalized by P1.
///
/// CSC is measured in the window of each victim symbol pair that the decoder
/// would choose; the other schemes use every window.
pub fn measure_scheme(
    scenario: &ScenarioSpec,
    scheme: &MitigationScheme,
    f_grid: &[f64],
    n_trials: usize,
) -> Result<PowerSpectrum> {
    scheme.validate(&scenario.link1.subcarriers)?;
    let mut sc = scenario.clone();
    sc.noise_power_per_subcarrier = 0.0;
    let opts = ProbeOptions {
        selection: match scheme {
            MitigationScheme::Csc { .. } => WindowSelection::LessInterferedOfPair,
            _ => WindowSelection::All,
        },
        ..ProbeOptions::default()
    };
    let link1 = sc.link1.clone();
    let sc_ref = &sc;
    measure_spectrum(&sc, f_grid, n_trials, opts, |rng, count| {
        coded_symbols(&link1, scheme, sc_ref, rng, count)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct MitigationSpectra {
    /// Offset from the victim's first subcarrier plus one (f = 1 is that subcarrier).
    pub f_grid: Vec<f64>,
    pub none: PowerSpectrum,
    pub fgb: PowerSpectrum,
    pub isc: PowerSpectrum,
    pub csc: PowerSpectrum,
    /// Closed form for the guardband layout on the same grid.
    pub fgb_analytic: Vec<f64>,
    pub fgb_gap: usize,
    pub isc_pairs: Vec<(i32, i32)>,
    pub csc_coded: SubcarrierSet,
    pub n_trials: usize,
}

/// The three mitigations at equal overhead, measured at the victim side.
///
/// Overhead is counted over the shared span: FGB nulls `overhead * span`
/// subcarriers; ISC pairs and CSC codes the interferer's edge subcarriers so
/// that half the coded subcarriers' payload equals the same amount.
pub fn run_mitigation_compare(spec: &ExperimentSpec) -> Result<MitigationSpectra> {
    spec.validate()?;
    let base = &spec.scenario;
    let budget = (spec.overhead * spec.total_span as f64).round() as usize;
    if budget == 0 {
        return arg_err("overhead budget rounds to zero subcarriers");
    }
    let omega1 = &base.link1.subcarriers;
    let toward = base.link2.subcarriers.first();
    let n_pairs = budget.min(omega1.len() / 2);
    let isc_pairs = isc_edge_pairs(omega1, n_pairs, toward)?;
    let n_coded = (2 * budget).min(omega1.len());
    let csc_coded = SubcarrierSet::new(crate::mitigation::edge_subcarriers(omega1, n_coded, toward)?)?;

    let f_grid = grid(0.5, 16.0, 0.1);
    let victim_shift = (toward - 1) as f64;
    let abs_grid: Vec<f64> = f_grid.iter().map(|f| f + victim_shift).collect();

    let run = |sc: &ScenarioSpec, scheme: &MitigationScheme, grid: &[f64], label: &str| {
        let mut s = sc.clone();
        s.seed = point_seed(base.seed, label);
        measure_scheme(&s, scheme, grid, spec.n_trials)
    };

    let none = run(base, &MitigationScheme::None, &abs_grid, "compare/none")?;
    let isc = run(
        base,
        &MitigationScheme::Isc {
            pairs: isc_pairs.clone(),
        },
        &abs_grid,
        "compare/isc",
    )?;
    let csc = run(
        base,
        &MitigationScheme::Csc {
            coded: csc_coded.clone(),
        },
        &abs_grid,
        "compare/csc",
    )?;

    let (o1, o2) = fgb_allocate(spec.total_span, budget)?;
    let mut fgb_sc = base.clone();
    fgb_sc.link1.subcarriers = o1.clone();
    fgb_sc.link2.subcarriers = o2.clone();
    let fgb_shift = (o2.first() - 1) as f64;
    let fgb_grid: Vec<f64> = f_grid.iter().map(|f| f + fgb_shift).collect();
    let fgb_abs = run(
        &fgb_sc,
        &MitigationScheme::Fgb { gap: budget },
        &fgb_grid,
        "compare/fgb",
    )?;
    let (n, n_cp) = (base.cfg.n_fft(), base.cfg.n_cp());
    let fgb_analytic = fgb_grid.iter().map(|&f| cbi_overall(f, &o1, 1.0, n, n_cp)).collect();

    let relabel = |s: PowerSpectrum| PowerSpectrum::new(f_grid.clone(), s.values().to_vec());
    Ok(MitigationSpectra {
        none: relabel(none)?,
        isc: relabel(isc)?,
        csc: relabel(csc)?,
        fgb: relabel(fgb_abs)?,
        fgb_analytic,
        fgb_gap: budget,
        isc_pairs,
        csc_coded,
        n_trials: spec.n_trials,
        f_grid,
    })
}

impl MitigationSpectra {
    pub fn to_report(&self) -> CampaignReport {
        let mut t = Table::new(
            "mitigation_compare",
            "interference spectra at equal overhead; f = 1 is the victim's first subcarrier",
            &[
                "f",
                "none_db",
                "fgb_db",
                "isc_db",
                "csc_db",
                "fgb_analytic_db",
                "none_lin",
                "fgb_lin",
                "isc_lin",
                "csc_lin",
                "fgb_analytic_lin",
            ],
        );
        for i in 0..self.f_grid.len() {
            let v = [
                self.none.values()[i],
                self.fgb.values()[i],
                self.isc.values()[i],
                self.csc.values()[i],
                self.fgb_analytic[i],
            ];
            let mut row = vec![Cell::Float(self.f_grid[i])];
            row.extend(v.iter().map(|&x| Cell::Float(to_db(x))));
            row.extend(v.iter().map(|&x| Cell::Float(x)));
            t.push(row);
        }
        let mut report = CampaignReport::new(ExperimentKind::MitigationCompare);
        report.tables.push(t);
        report.meta("fgb_gap", self.fgb_gap);
        let pairs: Vec<String> = self.isc_pairs.iter().map(|(a, b)| format!("{a}:{b}")).collect();
        report.meta("isc_pairs", pairs.join(" "));
        report.meta("csc_coded", &self.csc_coded);
        report.meta("spectrum_trials", self.n_trials);
        report
    }
}
