//! CSV results and run manifests.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::experiments::{Method, Model, SweepResult, SweepRow, SweepVariable};
use crate::geometry::GeometryKind;

pub const CSV_HEADER: [&str; 9] = [
    "sweep_var",
    "sweep_value",
    "geometry",
    "model",
    "method",
    "mean_crb",
    "trials_used",
    "deficient_rank_trials",
    "seed",
];

/// Writes the result table. Rows are emitted in the canonical order and
/// `mean_crb` uses the shortest round-trip scientific representation.
pub fn write_csv_to<W: Write>(result: &SweepResult, out: W) -> std::result::Result<(), csv::Error> {
    let mut sorted = result.clone();
    sorted.sort();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for row in &sorted.rows {
        w.write_record([
            sorted.sweep_var.as_str().to_string(),
            row.sweep_value.to_string(),
            row.geometry.label().to_string(),
            row.model.as_str().to_string(),
            row.method.as_str().to_string(),
            format!("{:e}", row.mean_crb),
            row.trials_used.to_string(),
            row.deficient_rank_trials.to_string(),
            row.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes to `path`, or to standard output when `path` is `-`.
pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    if path == Path::new("-") {
        return write_csv_to(result, io::stdout().lock()).map_err(csv_err);
    }
    let file = File::create(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    write_csv_to(result, file).map_err(csv_err)
}

fn parse_field<T: FromStr>(value: &str, column: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad {column} value `{value}`")))
}

fn geometry_from_label(label: &str) -> Result<GeometryKind> {
    match label {
        "ULA" => Ok(GeometryKind::Ula),
        "UCA" => Ok(GeometryKind::Uca),
        "UCyA" => Ok(GeometryKind::Ucya),
        other => Err(Error::InvalidConfig(format!("unknown geometry `{other}`"))),
    }
}

/// Reads a results table back. An empty table takes its sweep variable from
/// `default_var`.
pub fn read_csv_from<R: io::Read>(input: R, default_var: SweepVariable) -> Result<SweepResult> {
    let mut reader = csv::Reader::from_reader(input);
    let path = std::path::PathBuf::from("<reader>");
    let headers = reader
        .headers()
        .map_err(|source| Error::Csv { path: path.clone(), source })?
        .clone();
    if headers.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::InvalidConfig(format!("unexpected CSV header {headers:?}")));
    }
    let mut result = SweepResult::empty(default_var);
    for record in reader.records() {
        let r = record.map_err(|source| Error::Csv { path: path.clone(), source })?;
        result.sweep_var = parse_field(&r[0], "sweep_var")?;
        let model = match &r[3] {
            "structured" => Model::Structured,
            "unstructured" => Model::Unstructured,
            other => return Err(Error::InvalidConfig(format!("unknown model `{other}`"))),
        };
        let method = match &r[4] {
            "OP" => Method::Op,
            "SB" => Method::Sb,
            other => return Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        };
        result.rows.push(SweepRow {
            sweep_value: parse_field(&r[1], "sweep_value")?,
            geometry: geometry_from_label(&r[2])?,
            model,
            method,
            mean_crb: parse_field(&r[5], "mean_crb")?,
            trials_used: parse_field(&r[6], "trials_used")?,
            deficient_rank_trials: parse_field(&r[7], "deficient_rank_trials")?,
            seed: parse_field(&r[8], "seed")?,
        });
    }
    Ok(result)
}

/// Provenance of one CLI run, written next to the CSV as `key = value` lines.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    /// Fully resolved configuration as `key = value` pairs, in the same
    /// syntax accepted by `--config`.
    pub config_echo: Vec<(String, String)>,
    pub tool_version: String,
    pub started_at: String,
    pub completed_at: String,
    pub output_path: String,
}

/// Keys that appear in manifests but are not configuration.
pub const MANIFEST_KEYS: [&str; 5] = ["subcommand", "tool_version", "started_at", "completed_at", "output_path"];

impl RunManifest {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in [
            ("subcommand", &self.subcommand),
            ("tool_version", &self.tool_version),
            ("started_at", &self.started_at),
            ("completed_at", &self.completed_at),
            ("output_path", &self.output_path),
        ] {
            s.push_str(&format!("{k} = {v}\n"));
        }
        for (k, v) in &self.config_echo {
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.render()).map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }
}
