//! Transmit-side mitigation of cross-band interference.
//!
//! FGB inserts null subcarriers between the links. ISC makes adjacent
//! subcarrier pairs antipodal inside one symbol so their sidelobes cancel.
//! CSC repeats a subcarrier's value over two symbols with a phase that makes
//! the pair one continuous tone, so any receiver window lying inside the pair
//! sees a full-length sinusoid.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{arg_err, Result};
use crate::ofdm::{qpsk_point, FreqSymbol, OfdmConfig, SubcarrierSet};

#[derive(Debug, Clone, PartialEq)]
pub enum MitigationScheme {
    None,
    Fgb {
        gap: usize,
    },
    /// `(k - 1, k)` pairs.
    Isc {
        pairs: Vec<(i32, i32)>,
    },
    Csc {
        coded: SubcarrierSet,
    },
}

impl MitigationScheme {
    pub fn name(&self) -> &'static str {
        match self {
            MitigationScheme::None => "none",
            MitigationScheme::Fgb { .. } => "fgb",
            MitigationScheme::Isc { .. } => "isc",
            MitigationScheme::Csc { .. } => "csc",
        }
    }

    /// Checks the scheme against the subcarriers of the link that applies it.
    pub fn validate(&self, set: &SubcarrierSet) -> Result<()> {
        match self {
            MitigationScheme::None | MitigationScheme::Fgb { .. } => Ok(()),
            MitigationScheme::Isc { pairs } => check_pairs(pairs, set),
            MitigationScheme::Csc { coded } => {
                if coded.is_subset(set) {
                    Ok(())
                } else {
                    arg_err(format!("CSC set {coded} is not within {set}"))
                }
            }
        }
    }
}

/// Splits `total_span` subcarriers into link 1 (ending at 0), `gap` nulls, then link 2.
///
/// Link 2 receives `ceil((total_span - gap) / 2)` subcarriers.
pub fn fgb_allocate(total_span: usize, gap: usize) -> Result<(SubcarrierSet, SubcarrierSet)> {
    if total_span < gap + 2 {
        return arg_err(format!(
            "cannot fit two links and {gap} nulls in {total_span} subcarriers"
        ));
    }
    let rest = total_span - gap;
    let n2 = rest.div_ceil(2);
    let n1 = rest - n2;
    let omega1 = SubcarrierSet::contiguous(1 - n1 as i32, n1)?;
    let omega2 = SubcarrierSet::contiguous(gap as i32 + 1, n2)?;
    Ok((omega1, omega2))
}

fn check_pairs(pairs: &[(i32, i32)], set: &SubcarrierSet) -> Result<()> {
    let mut seen = Vec::with_capacity(2 * pairs.len());
    for &(a, b) in pairs {
        if b != a + 1 {
            return arg_err(format!("pair ({a}, {b}) is not adjacent"));
        }
        if !set.contains(a) || !set.contains(b) {
            return arg_err(format!("pair ({a}, {b}) is not within {set}"));
        }
        seen.push(a);
        seen.push(b);
    }
    seen.sort_unstable();
    if seen.windows(2).any(|w| w[0] == w[1]) {
        return arg_err("ISC pairs overlap");
    }
    Ok(())
}

/// `count` subcarriers of `set` nearest to `toward`, in index order.
pub fn edge_subcarriers(set: &SubcarrierSet, count: usize, toward: i32) -> Result<Vec<i32>> {
    if count > set.len() {
        return arg_err(format!("cannot take {count} subcarriers from {set}"));
    }
    let mut idx: Vec<i32> = set.indices().to_vec();
    idx.sort_by_key(|&k| ((k - toward).abs(), k));
    idx.truncate(count);
    idx.sort_unstable();
    Ok(idx)
}

/// Pairs the `2 * n_pairs` subcarriers nearest to `toward` into adjacent pairs.
pub fn isc_edge_pairs(set: &SubcarrierSet, n_pairs: usize, toward: i32) -> Result<Vec<(i32, i32)>> {
    let edge = edge_subcarriers(set, 2 * n_pairs, toward)?;
    let pairs: Vec<(i32, i32)> = edge.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    check_pairs(&pairs, set)?;
    Ok(pairs)
}

/// Lower index keeps its value, upper index carries the negation.
pub fn isc_encode(data: &FreqSymbol, pairs: &[(i32, i32)]) -> Result<FreqSymbol> {
    check_pairs(pairs, data.support())?;
    let mut out = data.clone();
    for &(a, b) in pairs {
        let v = data.get(a).expect("checked");
        out.set(b, -v)?;
    }
    Ok(out)
}

/// `(r(k-1) - r(k)) / 2` on each pair, written back as the encoded pattern.
pub fn isc_decode(received: &FreqSymbol, pairs: &[(i32, i32)]) -> Result<FreqSymbol> {
    check_pairs(pairs, received.support())?;
    let mut out = received.clone();
    for &(a, b) in pairs {
        let est = (received.get(a).expect("checked") - received.get(b).expect("checked")) / 2.0;
        out.set(a, est)?;
        out.set(b, -est)?;
    }
    Ok(out)
}

/// Phase that continues subcarrier `k` across a cyclic prefix of `n_cp` samples.
pub fn csc_phase(k: i32, cfg: &OfdmConfig) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k as f64 * cfg.n_cp() as f64 / cfg.n_fft() as f64)
}

/// On `coded`, the second symbol repeats the first with the continuity phase.
pub fn csc_encode(
    pair: (&FreqSymbol, &FreqSymbol),
    coded: &SubcarrierSet,
    cfg: &OfdmConfig,
) -> Result<(FreqSymbol, FreqSymbol)> {
    let (first, second) = pair;
    if first.support() != second.support() {
        return arg_err("CSC symbols must share one support");
    }
    if !coded.is_subset(first.support()) {
        return arg_err(format!("CSC set {coded} is not within {}", first.support()));
    }
    let mut out = second.clone();
    for k in coded.iter() {
        out.set(k, first.get(k).expect("checked") * csc_phase(k, cfg))?;
    }
    Ok((first.clone(), out))
}

/// Rule for choosing which symbol of a CSC pair to decode from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CscSelector {
    /// Known interference power on the coded set in each symbol.
    Genie { interference: (f64, f64) },
    /// Smaller squared distance to the nearest QPSK point of this amplitude.
    EnergyMetric { amplitude: f64 },
}

fn qpsk_residual(values: impl Iterator<Item = Complex64>, amplitude: f64) -> f64 {
    values
        .map(|v| {
            let nearest = qpsk_point(v.im < 0.0, v.re < 0.0, amplitude);
            (v - nearest).norm_sqr()
        })
        .sum()
}

/// Recovers the coded payload from one received (equalized) symbol pair.
///
/// Coded subcarriers of both outputs carry the selected estimate, with the
/// continuity phase removed; other subcarriers pass through unchanged.
pub fn csc_decode(
    pair: (&FreqSymbol, &FreqSymbol),
    coded: &SubcarrierSet,
    cfg: &OfdmConfig,
    selector: CscSelector,
) -> Result<(FreqSymbol, FreqSymbol)> {
    let (first, second) = pair;
    if first.support() != second.support() {
        return arg_err("CSC symbols must share one support");
    }
    if !coded.is_subset(first.support()) {
        return arg_err(format!("CSC set {coded} is not within {}", first.support()));
    }
    let undo = |k: i32| second.get(k).expect("checked") * csc_phase(k, cfg).conj();
    let use_second = match selector {
        CscSelector::Genie { interference } => interference.1 < interference.0,
        CscSelector::EnergyMetric { amplitude } => {
            let r0 = qpsk_residual(coded.iter().map(|k| first.get(k).expect("checked")), amplitude);
            let r1 = qpsk_residual(coded.iter().map(undo), amplitude);
            r1 < r0
        }
    };
    let mut a = first.clone();
    let mut b = second.clone();
    for k in coded.iter() {
        let est = if use_second {
            undo(k)
        } else {
            first.get(k).expect("checked")
        };
        a.set(k, est)?;
        b.set(k, est)?;
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(set: &SubcarrierSet, seed: u64) -> FreqSymbol {
        let vals = set
            .iter()
            .map(|k| Complex64::from_polar(1.0, 0.7 * k as f64 + seed as f64))
            .collect();
        FreqSymbol::new(set.clone(), vals).unwrap()
    }

    #[test]
    fn fgb_layouts() {
        let (a, b) = fgb_allocate(16, 0).unwrap();
        assert_eq!(a, SubcarrierSet::contiguous(-7, 8).unwrap());
        assert_eq!(b, SubcarrierSet::contiguous(1, 8).unwrap());
        let (a, b) = fgb_allocate(16, 2).unwrap();
        assert_eq!((a.len(), b.len()), (7, 7));
        assert_eq!(b.first() - a.last() - 1, 2);
        let (a, b) = fgb_allocate(16, 3).unwrap();
        assert_eq!((a.len(), b.len()), (6, 7));
        assert!(fgb_allocate(16, 16).is_err());
        assert!(fgb_allocate(16, 15).is_err());
        assert!(fgb_allocate(16, 14).is_ok());
    }

    #[test]
    fn isc_pair_rules() {
        let set = SubcarrierSet::contiguous(-7, 8).unwrap();
        let s = sym(&set, 0);
        assert!(isc_encode(&s, &[(-1, 0), (0, 1)]).is_err());
        assert!(isc_encode(&s, &[(-3, -1)]).is_err());
        assert!(isc_encode(&s, &[(-1, 0), (-2, -1)]).is_err());
        let pairs = isc_edge_pairs(&set, 2, 1).unwrap();
        assert_eq!(pairs, vec![(-3, -2), (-1, 0)]);
        let e = isc_encode(&s, &pairs).unwrap();
        assert_eq!(e.get(0).unwrap(), -s.get(-1).unwrap());
        assert_eq!(e.get(-5).unwrap(), s.get(-5).unwrap());
        assert_eq!(isc_decode(&e, &pairs).unwrap(), e);
    }

    #[test]
    fn csc_phase_cases() {
        let set = SubcarrierSet::contiguous(-3, 6).unwrap();
        let cfg0 = OfdmConfig::new(64, 0, 1.0).unwrap();
        let (a, b) = csc_encode((&sym(&set, 1), &sym(&set, 2)), &set, &cfg0).unwrap();
        assert_eq!(a, b);
        let cfg = OfdmConfig::default();
        assert_eq!(csc_phase(0, &cfg), Complex64::new(1.0, 0.0));
        let coded = SubcarrierSet::new([-1, 0]).unwrap();
        let (a, b) = csc_encode((&sym(&set, 1), &sym(&set, 2)), &coded, &cfg).unwrap();
        assert_eq!(b.get(0).unwrap(), a.get(0).unwrap());
        assert_eq!(b.get(2).unwrap(), sym(&set, 2).get(2).unwrap());
        assert!(csc_encode((&a, &b), &SubcarrierSet::new([9]).unwrap(), &cfg).is_err());
    }

    #[test]
    fn csc_round_trip() {
        let set = SubcarrierSet::contiguous(1, 8).unwrap();
        let cfg = OfdmConfig::default();
        let coded = SubcarrierSet::contiguous(1, 3).unwrap();
        let a = sym(&set, 1);
        let (e0, e1) = csc_encode((&a, &sym(&set, 2)), &coded, &cfg).unwrap();
        for sel in [
            CscSelector::Genie {
                interference: (1.0, 0.0),
            },
            CscSelector::Genie {
                interference: (0.0, 1.0),
            },
        ] {
            let (d0, d1) = csc_decode((&e0, &e1), &coded, &cfg, sel).unwrap();
            for k in coded.iter() {
                assert!((d0.get(k).unwrap() - a.get(k).unwrap()).norm() < 1e-14);
                assert!((d1.get(k).unwrap() - a.get(k).unwrap()).norm() < 1e-14);
            }
            assert_eq!(d1.get(6), e1.get(6));
        }
    }
}
