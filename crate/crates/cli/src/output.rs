//! Stable CSV rendering: a `#` comment line naming the columns, a header row,
//! floats in scientific notation with 9 significant digits, LF line endings.

use std::fs;
use std::path::{Path, PathBuf};

use xband_core::harness::{CampaignReport, Cell, Table};

use crate::error::{CliError, Result};

pub const VERSION: &str = concat!("xband ", env!("CARGO_PKG_VERSION"));

pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.8e}")
    }
}

fn escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format_float(*x),
        Cell::Text(s) => escape(s),
    }
}

pub fn render_table(t: &Table) -> String {
    let mut out = format!("# {}; columns: {}\n", t.description, t.columns.join(", "));
    out.push_str(&t.columns.join(","));
    out.push('\n');
    for row in &t.rows {
        let line: Vec<String> = row.iter().map(cell).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

pub fn render_meta(entries: &[(String, String)]) -> String {
    let mut out = String::from("# run metadata; columns: key, value\nkey,value\n");
    for (k, v) in entries {
        out.push_str(&format!("{},{}\n", escape(k), escape(v)));
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::Io {
            path: dir.to_path_buf(),
            source: e,
        })?;
    }
    fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

/// Writes every table as `<name>.csv` plus `meta.csv`; returns the written paths.
pub fn write_report(report: &CampaignReport, dir: &Path, extra_meta: &[(String, String)]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for t in &report.tables {
        let path = dir.join(format!("{}.csv", t.name));
        write_file(&path, &render_table(t))?;
        written.push(path);
    }
    let mut meta = vec![("version".to_string(), VERSION.to_string())];
    meta.extend(report.meta.iter().cloned());
    meta.extend(extra_meta.iter().cloned());
    let path = dir.join("meta.csv");
    write_file(&path, &render_meta(&meta))?;
    written.push(path);
    Ok(written)
}
