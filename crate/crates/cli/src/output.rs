//! Record and manifest writers.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use rotjac_core::experiments::{RecordTable, SummaryStats, Value};
use serde::Serialize;
use serde_json::{json, Map, Value as Json};

/// Shortest text that parses back to the same `f64`.
pub fn format_real(x: f64) -> String {
    format!("{x:?}")
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Real(x) => format_real(*x),
        Value::Int(n) => n.to_string(),
        Value::Flag(b) => b.to_string(),
        Value::Text(s) => s.clone(),
        Value::Missing => String::new(),
    }
}

fn cell_json(v: &Value) -> Json {
    match v {
        Value::Real(x) => serde_json::Number::from_f64(*x).map_or(Json::Null, Json::Number),
        Value::Int(n) => json!(n),
        Value::Flag(b) => json!(b),
        Value::Text(s) => json!(s),
        Value::Missing => Json::Null,
    }
}

/// Header row then one row per record, LF line endings.
pub fn write_csv(records: &RecordTable, path: &Path) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
    w.write_record(&records.columns)?;
    for row in &records.rows {
        w.write_record(row.iter().map(cell_text))?;
    }
    w.flush()
}

pub fn records_json(records: &RecordTable) -> Json {
    Json::Array(
        records
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Json> = records.columns.iter().cloned().zip(row.iter().map(cell_json)).collect();
                Json::Object(obj)
            })
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// The run does not match the configuration the check is defined for.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

impl Assertion {
    pub fn check(name: &str, ok: bool, detail: String) -> Self {
        Self { name: name.into(), status: if ok { Status::Pass } else { Status::Fail }, detail }
    }

    pub fn not_applicable(name: &str, detail: &str) -> Self {
        Self { name: name.into(), status: Status::NotApplicable, detail: detail.into() }
    }
}

#[derive(Debug, Serialize)]
struct SummaryJson<'a> {
    metric: &'a str,
    sigma: Option<f64>,
    mean: f64,
    std_error: f64,
    n: usize,
    prediction: Option<f64>,
    rel_err: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a Json,
    pub master_seed: u64,
    pub seed_source: &'a str,
    pub started_unix: u64,
    pub finished_unix: u64,
    #[serde(serialize_with = "serialize_summary")]
    pub summary: &'a [SummaryStats],
    pub assertions: &'a [Assertion],
    pub passed: bool,
}

fn serialize_summary<S: serde::Serializer>(stats: &&[SummaryStats], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(stats.iter().map(|x| SummaryJson {
        metric: &x.metric,
        sigma: x.sigma,
        mean: x.mean,
        std_error: x.std_error,
        n: x.n,
        prediction: x.prediction,
        rel_err: x.rel_err,
    }))
}

fn write_json_file(value: &impl Serialize, path: &Path) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()
}

pub fn write_manifest(manifest: &Manifest<'_>, path: &Path) -> io::Result<()> {
    write_json_file(manifest, path)
}

/// `{ "manifest": …, "records": [...] }`.
pub fn write_json(records: &RecordTable, manifest: &Manifest<'_>, path: &Path) -> io::Result<()> {
    write_json_file(&json!({ "manifest": manifest, "records": records_json(records) }), path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.csv");
        write_csv(&RecordTable::new(&["a", "b"]), &path).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n");
    }

    #[test]
    fn rows_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        let xs = [0.1, 1.0 / 3.0, 1e-300, -2.5e17];
        let mut t = RecordTable::new(&["x", "flag", "gap"]);
        for &x in &xs[..3] {
            t.push(vec![x.into(), true.into(), Value::Missing]);
        }
        write_csv(&t, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(!text.contains('\r'));
        for (line, want) in text.lines().skip(1).zip(xs) {
            let got: f64 = line.split(',').next().unwrap().parse().unwrap();
            assert_eq!(got.to_bits(), want.to_bits());
        }
        for x in xs {
            assert_eq!(format_real(x).parse::<f64>().unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn json_matches_csv_cells() {
        let mut t = RecordTable::new(&["x", "n", "g"]);
        t.push(vec![0.25.into(), 3usize.into(), Value::Missing]);
        let j = records_json(&t);
        assert_eq!(j, json!([{ "x": 0.25, "n": 3, "g": null }]));
    }
}
