//! Rendering of scan tables and atomic file output.
//!
//! CSV is the authoritative format: comma-separated, header row, LF line
//! endings, floats printed with 17 significant digits so that reading a file
//! back yields bit-identical values.

use std::io::Write;
use std::path::Path;

use lindley_core::paradox::{Classification, RegionReport, ScanCell, ScanTable};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const CSV_COLUMNS: [&str; 9] = [
    "d",
    "t",
    "sigma_units",
    "eta",
    "alpha",
    "sigma_prior",
    "z_bar0",
    "pvalue",
    "class",
];

/// One flattened scan cell as stored in CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub d: f64,
    pub t: f64,
    pub sigma_units: f64,
    pub eta: f64,
    pub alpha: f64,
    pub sigma_prior: Option<f64>,
    pub z_bar0: f64,
    pub pvalue: f64,
    pub class: Classification,
}

impl From<&ScanCell> for CsvRow {
    fn from(c: &ScanCell) -> Self {
        CsvRow {
            d: c.report.outcome,
            t: c.t,
            sigma_units: c.report.sigma_units,
            eta: c.efficiency,
            alpha: c.alpha_mag,
            sigma_prior: c.prior_sigma,
            z_bar0: c.report.z_bar0,
            pvalue: c.report.pvalue,
            class: c.report.classification,
        }
    }
}

impl From<&CsvRow> for ScanCell {
    fn from(r: &CsvRow) -> Self {
        ScanCell {
            t: r.t,
            efficiency: r.eta,
            alpha_mag: r.alpha,
            prior_sigma: r.sigma_prior,
            report: RegionReport {
                outcome: r.d,
                z_bar0: r.z_bar0,
                pvalue: r.pvalue,
                classification: r.class,
                sigma_units: r.sigma_units,
            },
        }
    }
}

/// 17 significant digits in scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn scan_to_csv(table: &ScanTable) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let csv_err = |e: csv::Error| CliError::Config(format!("csv encoding failed: {e}"));
    w.write_record(CSV_COLUMNS).map_err(csv_err)?;
    for cell in &table.cells {
        let r = CsvRow::from(cell);
        w.write_record([
            format_float(r.d),
            format_float(r.t),
            format_float(r.sigma_units),
            format_float(r.eta),
            format_float(r.alpha),
            r.sigma_prior.map(format_float).unwrap_or_default(),
            format_float(r.z_bar0),
            format_float(r.pvalue),
            r.class.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Config(format!("csv encoding failed: {e}")))
}

pub fn read_scan_csv(data: &[u8]) -> Result<Vec<CsvRow>, CliError> {
    let mut r = csv::Reader::from_reader(data);
    let headers = r
        .headers()
        .map_err(|e| CliError::config(format!("bad csv header: {e}")))?
        .clone();
    if headers.iter().ne(CSV_COLUMNS) {
        return Err(CliError::config(format!("unexpected csv columns {headers:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| CliError::config(format!("bad csv row: {e}"))))
        .collect()
}

pub fn scan_to_json(table: &ScanTable) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(table)
        .map_err(|e| CliError::Config(format!("json encoding failed: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

const SVG_W: f64 = 640.0;
const SVG_H: f64 = 400.0;
const MARGIN: f64 = 50.0;
const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

/// `z̄₀` against `d`, one polyline per (η, |α|, σ) slice.
pub fn scan_to_svg(table: &ScanTable) -> Vec<u8> {
    let d_min = table.cells.iter().map(|c| c.report.outcome).fold(f64::INFINITY, f64::min);
    let d_max = table.cells.iter().map(|c| c.report.outcome).fold(f64::NEG_INFINITY, f64::max);
    let span = if d_max > d_min { d_max - d_min } else { 1.0 };
    let x = |d: f64| MARGIN + (d - d_min) / span * (SVG_W - 2.0 * MARGIN);
    let y = |z: f64| SVG_H - MARGIN - z * (SVG_H - 2.0 * MARGIN);

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SVG_W}\" height=\"{SVG_H}\" viewBox=\"0 0 {SVG_W} {SVG_H}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let (x0, x1, y0, y1) = (MARGIN, SVG_W - MARGIN, SVG_H - MARGIN, MARGIN);
    s.push_str(&format!(
        "<path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" fill=\"none\" stroke=\"black\"/>\n"
    ));
    for k in 0..=5 {
        let z = k as f64 / 5.0;
        let yy = y(z);
        s.push_str(&format!(
            "<line x1=\"{}\" y1=\"{yy:.2}\" x2=\"{x0}\" y2=\"{yy:.2}\" stroke=\"black\"/><text x=\"{}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{z:.1}</text>\n",
            x0 - 5.0,
            x0 - 8.0,
            yy + 4.0
        ));
        let d = d_min + span * k as f64 / 5.0;
        let xx = x(d);
        s.push_str(&format!(
            "<line x1=\"{xx:.2}\" y1=\"{y0}\" x2=\"{xx:.2}\" y2=\"{}\" stroke=\"black\"/><text x=\"{xx:.2}\" y=\"{}\" font-size=\"11\" text-anchor=\"middle\">{d:.3}</text>\n",
            y0 + 5.0,
            y0 + 18.0
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">d</text>\n",
        SVG_W / 2.0,
        SVG_H - 10.0
    ));
    s.push_str(&format!(
        "<text x=\"14\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">posterior of the null</text>\n",
        SVG_H / 2.0,
        SVG_H / 2.0
    ));

    let mut slices: Vec<(f64, f64, Option<f64>)> = Vec::new();
    for c in &table.cells {
        let key = (c.efficiency, c.alpha_mag, c.prior_sigma);
        if !slices.contains(&key) {
            slices.push(key);
        }
    }
    for (i, key) in slices.iter().enumerate() {
        let mut pts: Vec<(f64, f64)> = table
            .cells
            .iter()
            .filter(|c| (c.efficiency, c.alpha_mag, c.prior_sigma) == *key)
            .map(|c| (c.report.outcome, c.report.z_bar0))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let points: Vec<String> = pts.iter().map(|&(d, z)| format!("{:.2},{:.2}", x(d), y(z))).collect();
        let label = match key.2 {
            Some(sigma) => format!("eta={} alpha={} sigma={sigma}", key.0, key.1),
            None => format!("eta={} alpha={}", key.0, key.1),
        };
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"><title>{label}</title></polyline>\n",
            PALETTE[i % PALETTE.len()],
            points.join(" ")
        ));
    }
    s.push_str("</svg>\n");
    s.into_bytes()
}

/// Writes `bytes` to a temporary file beside `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
