//! Tabular results and their CSV/JSON encodings.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde_json::{json, Map, Number, Value as Json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// `.json` outputs default to JSON, everything else to CSV.
    pub fn for_output(explicit: Option<Format>, out: Option<&Path>) -> Format {
        explicit.unwrap_or_else(|| match out.and_then(|p| p.extension()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Int(i128),
    Real(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i128)
    }
}

impl From<u128> for Value {
    fn from(v: u128) -> Self {
        Value::Int(v as i128)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v as i128)
    }
}

impl From<u32> for Value {
    fn from(v: u32) -> Self {
        Value::Int(v as i128)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i128)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Real(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Null, Into::into)
    }
}

/// Rounds to 12 significant digits and prints the shortest form.
pub fn format_real(x: f64) -> String {
    if !x.is_finite() {
        return String::new();
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            Value::Real(v) => format_real(*v),
            Value::Bool(v) => v.to_string(),
            Value::Null => String::new(),
            Value::Text(s) if s.contains([',', '"', '\n', '\r']) => {
                format!("\"{}\"", s.replace('"', "\"\""))
            }
            Value::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Int(v) => {
                if let Ok(i) = i64::try_from(*v) {
                    Json::from(i)
                } else if let Ok(u) = u64::try_from(*v) {
                    Json::from(u)
                } else {
                    Number::from_f64(*v as f64).map_or(Json::Null, Json::Number)
                }
            }
            Value::Real(v) => Number::from_f64(*v).map_or(Json::Null, Json::Number),
            Value::Text(s) => Json::String(s.clone()),
            Value::Bool(b) => Json::Bool(*b),
            Value::Null => Json::Null,
        }
    }
}

/// Column layout of one output table.
#[derive(Clone, Copy, Debug)]
pub struct Schema {
    pub command: &'static str,
    pub table: &'static str,
    /// Exactly one row, emitted as an object in JSON.
    pub single: bool,
    pub columns: &'static [&'static str],
}

const fn rows(command: &'static str, table: &'static str, columns: &'static [&'static str]) -> Schema {
    Schema {
        command,
        table,
        single: false,
        columns,
    }
}

const fn one(command: &'static str, table: &'static str, columns: &'static [&'static str]) -> Schema {
    Schema {
        command,
        table,
        single: true,
        columns,
    }
}

const HIT_RATE_DETAIL: &[&str] = &[
    "capacity_bytes",
    "hits",
    "misses",
    "total_reads",
    "hit_rate",
    "bytes_inserted",
    "bytes_evicted",
    "eviction_events",
    "oversize",
    "final_occupied",
];

/// Every table any command can emit. The first table of a command is its
/// primary output.
pub const SCHEMAS: &[Schema] = &[
    rows("generate", "files", &["date", "path", "bytes", "lines"]),
    one("generate", "summary", &["seed", "days", "files", "events", "transfers", "transfer_bytes"]),
    one(
        "analyze reads",
        "summary",
        &[
            "total_read_ops",
            "unresolved_ops",
            "distinct_files",
            "mean_reads_per_file",
            "size_samples",
            "total_bytes_read",
            "mean_read_size",
            "mean_offset",
        ],
    ),
    rows("analyze reads", "per_file", &["path", "reads"]),
    rows("analyze reads", "histogram", &["bin_low", "bin_high", "count"]),
    one(
        "analyze lifetimes",
        "summary",
        &["tau_secs", "lifetimes", "incomplete", "orphan_closes", "mean_hours"],
    ),
    rows("analyze lifetimes", "quantiles", &["threshold_hours", "fraction_below"]),
    rows("analyze lifetimes", "histogram", &["bin_low_hours", "bin_high_hours", "count"]),
    rows(
        "analyze lifetimes",
        "records",
        &["path", "t_s", "t_e", "hours", "opens", "complete"],
    ),
    one("analyze transfers", "summary", &["transfers", "total_bytes"]),
    rows("analyze transfers", "daily", &["date", "transfers", "bytes"]),
    rows("analyze sweep-tau", "sweep", &["tau_secs", "tau_days", "lifetimes", "mean_hours"]),
    one("analyze sweep-tau", "summary", &["grand_mean_hours"]),
    one("fit-powerlaw", "fit", &["a", "b", "eps", "rmse", "iterations", "converged"]),
    rows("fit-powerlaw", "points", &["x", "y", "fitted"]),
    rows("simulate hit-rate", "curve", &["capacity_bytes", "hit_rate"]),
    rows("simulate hit-rate", "detail", HIT_RATE_DETAIL),
    rows(
        "simulate content-model",
        "series",
        &[
            "step",
            "size_param",
            "rate_param",
            "hit_rate",
            "increment_bytes",
            "cache_bytes",
            "evicted_bytes_cumulative",
        ],
    ),
    one("simulate content-model", "summary", &["capacity_bytes", "steps", "fill_step"]),
    rows("simulate fill-time", "fill", &["capacity_bytes", "fill_secs", "fill_days"]),
    rows("oracle lru", "detail", HIT_RATE_DETAIL),
];

pub fn schema(command: &str, table: &str) -> Schema {
    *SCHEMAS
        .iter()
        .find(|s| s.command == command && s.table == table)
        .unwrap_or_else(|| panic!("no schema for {command}/{table}"))
}

#[derive(Clone, Debug)]
pub struct Table {
    pub schema: Schema,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(command: &str, table: &str) -> Self {
        Table {
            schema: schema(command, table),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(
            row.len(),
            self.schema.columns.len(),
            "row width for {}/{}",
            self.schema.command,
            self.schema.table
        );
        self.rows.push(row);
    }

    pub fn with_row(mut self, row: Vec<Value>) -> Self {
        self.push(row);
        self
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.schema.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Value::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    fn to_json(&self) -> Json {
        let objects: Vec<Json> = self
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Json> = self
                    .schema
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), v.json()))
                    .collect();
                Json::Object(m)
            })
            .collect();
        if self.schema.single {
            objects.into_iter().next().unwrap_or(Json::Null)
        } else {
            Json::Array(objects)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub seed: Option<u64>,
    pub flags: Vec<String>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let data: Map<String, Json> = self
            .tables
            .iter()
            .map(|t| (t.schema.table.to_string(), t.to_json()))
            .collect();
        let doc = json!({
            "meta": {
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "seed": self.seed,
                "flags": self.flags,
            },
            "data": data,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("json encoding");
        s.push('\n');
        s
    }

    /// Writes to `out` (primary table for CSV, with the others beside it as
    /// `<stem>.<table>.csv`) or to stdout. Returns the files written.
    pub fn emit(&self, out: Option<&Path>, format: Format) -> io::Result<Vec<PathBuf>> {
        let Some(out) = out else {
            let text = match format {
                Format::Json => self.to_json(),
                Format::Csv => {
                    if self.tables.len() > 1 {
                        log::info!("secondary tables are written only with --out");
                    }
                    self.tables.first().map(Table::to_csv).unwrap_or_default()
                }
            };
            io::stdout().lock().write_all(text.as_bytes())?;
            return Ok(Vec::new());
        };
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        match format {
            Format::Json => {
                fs::write(out, self.to_json())?;
                Ok(vec![out.to_path_buf()])
            }
            Format::Csv => {
                let mut written = Vec::new();
                for (i, t) in self.tables.iter().enumerate() {
                    let path = if i == 0 {
                        out.to_path_buf()
                    } else {
                        secondary_path(out, t.schema.table)
                    };
                    fs::write(&path, t.to_csv())?;
                    written.push(path);
                }
                Ok(written)
            }
        }
    }
}

/// `dir/curve.csv` + `detail` -> `dir/curve.detail.csv`.
pub fn secondary_path(primary: &Path, table: &str) -> PathBuf {
    let stem = primary
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    primary.with_file_name(format!("{stem}.{table}.csv"))
}

pub fn schema_report(flags: Vec<String>) -> Report {
    let mut t = Table {
        schema: Schema {
            command: "--schema",
            table: "schema",
            single: false,
            columns: &["command", "table", "primary", "single_row", "position", "column"],
        },
        rows: Vec::new(),
    };
    let mut seen: Vec<&str> = Vec::new();
    for s in SCHEMAS {
        let primary = !seen.contains(&s.command);
        if primary {
            seen.push(s.command);
        }
        for (i, c) in s.columns.iter().enumerate() {
            t.rows.push(vec![
                s.command.into(),
                s.table.into(),
                primary.into(),
                s.single.into(),
                i.into(),
                (*c).into(),
            ]);
        }
    }
    Report {
        command: "--schema",
        seed: None,
        flags,
        tables: vec![t],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reals_keep_twelve_significant_digits() {
        assert_eq!(format_real(0.1 + 0.2), "0.3");
        assert_eq!(format_real(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_real(1.26e12), "1260000000000");
        assert_eq!(format_real(2.5), "2.5");
        assert_eq!(format_real(f64::NAN), "");
    }

    #[test]
    fn csv_quotes_text_when_needed() {
        assert_eq!(Value::from("a,b").csv(), "\"a,b\"");
        assert_eq!(Value::from("plain").csv(), "plain");
        assert_eq!(Value::Null.csv(), "");
    }

    #[test]
    fn secondary_names() {
        assert_eq!(
            secondary_path(Path::new("out/curve.csv"), "detail"),
            PathBuf::from("out/curve.detail.csv")
        );
    }

    #[test]
    fn every_command_table_is_unique() {
        for (i, a) in SCHEMAS.iter().enumerate() {
            for b in &SCHEMAS[i + 1..] {
                assert!(!(a.command == b.command && a.table == b.table));
            }
        }
    }

    #[test]
    fn format_inference() {
        assert_eq!(Format::for_output(None, Some(Path::new("x.json"))), Format::Json);
        assert_eq!(Format::for_output(None, Some(Path::new("x.csv"))), Format::Csv);
        assert_eq!(Format::for_output(Some(Format::Csv), Some(Path::new("x.json"))), Format::Csv);
    }
}
