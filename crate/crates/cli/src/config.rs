//! Run configuration: a flat `key = value` file (TOML syntax) merged with
//! `--set key=value` overrides, applied on top of the default scenario.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use toml::Value;
use xband_core::channel::{ChannelModel, FreqOffsetModel, MismatchModel};
use xband_core::harness::{ExperimentKind, ExperimentSpec};
use xband_core::{LinkRole, LinkSpec, OfdmConfig, SubcarrierSet};

use crate::error::{CliError, Result};

/// What the CLI runs: one campaign, or the full reproduction suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    Campaign(ExperimentKind),
    ReproducePaper,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Campaign(k) => k.name(),
            Experiment::ReproducePaper => "reproduce_paper",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "reproduce_paper" {
            return Ok(Experiment::ReproducePaper);
        }
        s.parse::<ExperimentKind>()
            .map(Experiment::Campaign)
            .map_err(|_| CliError::Config {
                key: "experiment".into(),
                message: format!("unknown experiment '{s}'"),
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: Experiment,
    pub spec: ExperimentSpec,
    pub out_dir: PathBuf,
    /// Every key that was set, after merging, for the metadata file.
    pub overrides: BTreeMap<String, String>,
}

/// Keys accepted in config files and `--set`.
pub const KEYS: &[(&str, &str)] = &[
    ("experiment", "campaign name or reproduce_paper"),
    ("seed", "campaign seed (u64)"),
    ("trials", "Monte Carlo trials per point"),
    ("n_fft", "FFT size N"),
    ("n_cp", "cyclic prefix length in samples"),
    ("subcarrier_spacing_hz", "subcarrier spacing"),
    ("modulation", "qpsk"),
    ("width1", "link 1 subcarriers, ending at -guardband"),
    ("width2", "link 2 subcarriers, starting at 1"),
    ("guardband", "null subcarriers between the links"),
    ("p1", "link 1 power per subcarrier (linear)"),
    ("p2", "link 2 power per subcarrier (linear)"),
    ("p_r_db", "power ratio P1/P2 in dB; also the single p_r sweep point"),
    ("p_r_list", "p_r sweep in dB (array)"),
    ("mismatch", "\"uniform\" or a fixed delay in samples"),
    ("eps_max", "inter-link offset drawn uniform in [-eps_max, eps_max]"),
    ("epsilon", "fixed inter-link offset"),
    ("channel", "non_fading, rayleigh or rician"),
    ("k_factor", "Rician K factor (linear)"),
    ("tie_channels", "one fading coefficient for both links (bool)"),
    ("noise_db", "noise power per subcarrier in dB"),
    ("packet_len", "OFDM symbols per packet"),
    ("k_factors", "K sweep (array)"),
    ("eps_max_list", "eps_max sweep (array)"),
    ("overhead", "mitigation overhead fraction"),
    ("total_span", "subcarriers shared by both links in throughput runs"),
    ("out", "output directory"),
];

/// Parses `key=value` with the value in TOML syntax, falling back to a bare string.
pub fn parse_assignment(s: &str) -> Result<(String, Value)> {
    let (key, raw) = s.split_once('=').ok_or_else(|| CliError::Config {
        key: s.trim().to_string(),
        message: "expected key=value".into(),
    })?;
    let key = key.trim().to_string();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("parsed key"),
        Err(_) => Value::String(raw.to_string()),
    };
    Ok((key, value))
}

/// Reads a config file into a flat key map.
pub fn read_file(path: &Path) -> Result<BTreeMap<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config {
        key: path.display().to_string(),
        message: e.message().to_string(),
    })?;
    let mut out = BTreeMap::new();
    for (k, v) in table {
        if let Value::Table(_) = v {
            return Err(CliError::Config {
                key: k,
                message: "sections are not supported; use flat keys".into(),
            });
        }
        out.insert(k, v);
    }
    Ok(out)
}

/// Validation message fragment and the key it points at.
const VALIDATION_KEYS: &[(&str, &str)] = &[
    ("tau", "mismatch"),
    ("eps_max entries", "eps_max_list"),
    ("eps_max", "eps_max"),
    ("epsilon", "epsilon"),
    ("k_factors", "k_factors"),
    ("k_factor", "k_factor"),
    ("noise", "noise_db"),
    ("packet_len", "packet_len"),
    ("n_trials", "trials"),
    ("p_r_db", "p_r_list"),
    ("overhead", "overhead"),
    ("total_span", "total_span"),
    ("overlap", "guardband"),
    ("subcarrier", "width1"),
];

fn bad(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

fn as_f64(key: &str, v: &Value) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        Value::String(s) if s == "inf" => Ok(f64::INFINITY),
        other => Err(bad(key, format!("expected a number, got {other}"))),
    }
}

fn as_usize(key: &str, v: &Value) -> Result<usize> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as usize),
        other => Err(bad(key, format!("expected a non-negative integer, got {other}"))),
    }
}

fn as_u64(key: &str, v: &Value) -> Result<u64> {
    match v {
        Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        // Seeds above i64::MAX arrive as strings.
        Value::String(s) => s.parse().map_err(|_| bad(key, format!("expected a u64, got '{s}'"))),
        other => Err(bad(key, format!("expected a u64, got {other}"))),
    }
}

fn as_str<'a>(key: &str, v: &'a Value) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| bad(key, format!("expected a string, got {v}")))
}

fn as_bool(key: &str, v: &Value) -> Result<bool> {
    v.as_bool()
        .ok_or_else(|| bad(key, format!("expected true or false, got {v}")))
}

fn as_list(key: &str, v: &Value) -> Result<Vec<f64>> {
    match v {
        Value::Array(a) => a.iter().map(|x| as_f64(key, x)).collect(),
        other => Ok(vec![as_f64(key, other)?]),
    }
}

fn display(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Builds a validated run configuration; later maps override earlier ones.
pub fn build(layers: &[BTreeMap<String, Value>], default_out: &Path) -> Result<RunConfig> {
    let mut merged: BTreeMap<String, Value> = BTreeMap::new();
    for layer in layers {
        for (k, v) in layer {
            if !KEYS.iter().any(|(name, _)| name == k) {
                return Err(bad(k, "unknown key"));
            }
            merged.insert(k.clone(), v.clone());
        }
    }
    let get = |k: &str| merged.get(k);

    let experiment = match get("experiment") {
        Some(v) => as_str("experiment", v)?.parse()?,
        None => Experiment::Campaign(ExperimentKind::InterferenceStrength),
    };
    let kind = match experiment {
        Experiment::Campaign(k) => k,
        Experiment::ReproducePaper => ExperimentKind::InterferenceStrength,
    };
    let mut spec = ExperimentSpec::new(kind);
    let sc = &mut spec.scenario;

    if let Some(v) = get("modulation") {
        let m = as_str("modulation", v)?;
        if !m.eq_ignore_ascii_case("qpsk") {
            return Err(bad("modulation", format!("only qpsk is supported, got '{m}'")));
        }
    }
    let n_fft = get("n_fft")
        .map(|v| as_usize("n_fft", v))
        .transpose()?
        .unwrap_or(sc.cfg.n_fft());
    let n_cp = get("n_cp")
        .map(|v| as_usize("n_cp", v))
        .transpose()?
        .unwrap_or(sc.cfg.n_cp());
    let spacing = get("subcarrier_spacing_hz")
        .map(|v| as_f64("subcarrier_spacing_hz", v))
        .transpose()?
        .unwrap_or(sc.cfg.subcarrier_spacing_hz());
    sc.cfg = OfdmConfig::new(n_fft, n_cp, spacing).map_err(|e| {
        let key = if get("n_cp").is_some() { "n_cp" } else { "n_fft" };
        bad(key, e.to_string())
    })?;

    let width1 = get("width1")
        .map(|v| as_usize("width1", v))
        .transpose()?
        .unwrap_or(sc.link1.subcarriers.len());
    let width2 = get("width2")
        .map(|v| as_usize("width2", v))
        .transpose()?
        .unwrap_or(sc.link2.subcarriers.len());
    let guard = get("guardband")
        .map(|v| as_usize("guardband", v))
        .transpose()?
        .unwrap_or(0);
    let set1 = SubcarrierSet::contiguous(1 - width1 as i32 - guard as i32, width1)
        .map_err(|e| bad("width1", e.to_string()))?;
    let set2 = SubcarrierSet::contiguous(1, width2).map_err(|e| bad("width2", e.to_string()))?;
    let p1 = get("p1")
        .map(|v| as_f64("p1", v))
        .transpose()?
        .unwrap_or(sc.link1.power_per_subcarrier);
    let p2 = get("p2")
        .map(|v| as_f64("p2", v))
        .transpose()?
        .unwrap_or(sc.link2.power_per_subcarrier);
    sc.link1 = LinkSpec::new(set1, p1, LinkRole::Interferer).map_err(|e| bad("p1", e.to_string()))?;
    sc.link2 = LinkSpec::new(set2, p2, LinkRole::Signal).map_err(|e| bad("p2", e.to_string()))?;
    if let Some(v) = get("p_r_db") {
        let p = as_f64("p_r_db", v)?;
        sc.set_power_ratio_db(p);
        spec.p_r_db = vec![p];
    }

    if let Some(v) = get("mismatch") {
        sc.mismatch = match v {
            Value::String(s) if s == "uniform" => MismatchModel::Uniform,
            other => MismatchModel::Fixed(as_f64("mismatch", other)?),
        };
    }
    if let Some(v) = get("eps_max") {
        sc.freq_offset = FreqOffsetModel::Uniform(as_f64("eps_max", v)?);
    }
    if let Some(v) = get("epsilon") {
        if get("eps_max").is_some() {
            return Err(bad("epsilon", "cannot be combined with eps_max"));
        }
        sc.freq_offset = FreqOffsetModel::Fixed(as_f64("epsilon", v)?);
    }
    if let Some(v) = get("channel") {
        let k = get("k_factor").map(|v| as_f64("k_factor", v)).transpose()?;
        sc.channel = match as_str("channel", v)? {
            "non_fading" | "awgn" => ChannelModel::non_fading(),
            "rayleigh" => ChannelModel::rayleigh(),
            "rician" => ChannelModel::rician(k.ok_or_else(|| bad("k_factor", "required for a rician channel"))?),
            other => return Err(bad("channel", format!("unknown channel '{other}'"))),
        };
    } else if get("k_factor").is_some() {
        sc.channel = ChannelModel::rician(as_f64("k_factor", get("k_factor").expect("present"))?);
    }
    if let Some(v) = get("tie_channels") {
        sc.channel.tie_channels = as_bool("tie_channels", v)?;
    }
    if let Some(v) = get("noise_db") {
        sc.noise_power_per_subcarrier = 10f64.powf(as_f64("noise_db", v)? / 10.0);
    }
    if let Some(v) = get("packet_len") {
        sc.packet_len = as_usize("packet_len", v)?;
    }
    if let Some(v) = get("seed") {
        sc.seed = as_u64("seed", v)?;
    }
    if let Some(v) = get("trials") {
        spec.n_trials = as_usize("trials", v)?;
    }
    if let Some(v) = get("p_r_list") {
        spec.p_r_db = as_list("p_r_list", v)?;
    }
    if let Some(v) = get("k_factors") {
        spec.k_factors = as_list("k_factors", v)?;
    }
    if let Some(v) = get("eps_max_list") {
        spec.eps_max = as_list("eps_max_list", v)?;
    }
    if let Some(v) = get("overhead") {
        spec.overhead = as_f64("overhead", v)?;
    }
    if let Some(v) = get("total_span") {
        spec.total_span = as_usize("total_span", v)?;
    }
    let out_dir = match get("out") {
        Some(v) => PathBuf::from(as_str("out", v)?),
        None => default_out.to_path_buf(),
    };

    spec.validate().map_err(|e| {
        let msg = e.to_string();
        let key = VALIDATION_KEYS
            .iter()
            .find(|(needle, _)| msg.contains(needle))
            .map_or("scenario", |(_, key)| key);
        bad(key, msg)
    })?;
    let overrides = merged.iter().map(|(k, v)| (k.clone(), display(v))).collect();
    Ok(RunConfig {
        experiment,
        spec,
        out_dir,
        overrides,
    })
}

/// Convenience for tests and callers that hold `key=value` strings.
pub fn from_assignments<S: AsRef<str>>(sets: &[S], default_out: &Path) -> Result<RunConfig> {
    let mut layer = BTreeMap::new();
    for s in sets {
        let (k, v) = parse_assignment(s.as_ref())?;
        layer.insert(k, v);
    }
    build(&[layer], default_out)
}
