//! Rendering and writing of result tables.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use gup_core::algebra::PhysicalUnits;
use gup_core::export::Table;
use serde::Serialize;
use serde_json::{json, Value};

/// Relative output paths resolve against this directory when it is set.
pub const OUTPUT_DIR_ENV: &str = "GUP_OUTPUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// hbar = 1 with beta explicit.
    Scaled,
    /// Length in hbar sqrt(beta), momentum in 1/sqrt(beta), time in m hbar beta.
    Paper,
}

/// Powers of length, momentum and time carried by a column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dim {
    pub length: f64,
    pub momentum: f64,
    pub time: f64,
}

impl Dim {
    pub const NONE: Dim = Dim::new(0.0, 0.0, 0.0);
    pub const LENGTH: Dim = Dim::new(1.0, 0.0, 0.0);
    pub const MOMENTUM: Dim = Dim::new(0.0, 1.0, 0.0);
    pub const TIME: Dim = Dim::new(0.0, 0.0, 1.0);

    pub const fn new(length: f64, momentum: f64, time: f64) -> Self {
        Self { length, momentum, time }
    }

    fn unit(&self, u: &PhysicalUnits) -> f64 {
        u.length_unit().powf(self.length) * u.momentum_unit().powf(self.momentum) * u.time_unit().powf(self.time)
    }
}

/// A table together with the dimension of each column.
#[derive(Debug, Clone)]
pub struct Dimensioned {
    pub table: Table,
    pub dims: Vec<Dim>,
}

impl Dimensioned {
    pub fn new(table: Table, dims: Vec<Dim>) -> Self {
        assert_eq!(table.columns.len(), dims.len(), "one dimension per column");
        Self { table, dims }
    }

    pub fn rescaled(mut self, units: Option<&PhysicalUnits>) -> Table {
        if let Some(u) = units {
            let scale: Vec<f64> = self.dims.iter().map(|d| d.unit(u).recip()).collect();
            for row in &mut self.table.rows {
                row.iter_mut().zip(&scale).for_each(|(v, s)| *v *= s);
            }
        }
        self.table
    }
}

/// Secondary output of a subcommand, written next to the primary table.
#[derive(Debug, Clone)]
pub enum Extra {
    Table(Table),
    Value(Value),
}

#[derive(Debug, Clone)]
pub struct Report {
    pub table: Table,
    pub meta: Value,
    pub extra: Option<(&'static str, Extra)>,
}

impl Report {
    pub fn new(table: Table, meta: Value) -> Self {
        Self { table, meta, extra: None }
    }

    pub fn with_extra(mut self, name: &'static str, extra: Extra) -> Self {
        self.extra = Some((name, extra));
        self
    }

    /// The JSON document: primary records, `meta`, and the extra under its name.
    pub fn to_json(&self) -> Value {
        let mut doc = self.table.to_json(self.meta.clone());
        if let Some((name, extra)) = &self.extra {
            doc[*name] = match extra {
                Extra::Table(t) => t.to_json(Value::Null)["records"].clone(),
                Extra::Value(v) => v.clone(),
            };
        }
        doc
    }
}

pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn sibling(path: &Path, name: &str, ext: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{name}.{ext}"))
}

fn render_extra(extra: &Extra) -> (String, &'static str) {
    match extra {
        Extra::Table(t) => (t.to_csv(), "csv"),
        Extra::Value(v) => (pretty(v), "json"),
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// Writes the report. In CSV mode the extra goes to a sibling file, or to
/// stderr when the primary table goes to stdout.
pub fn emit(report: &Report, format: Format, output: Option<&Path>) -> io::Result<()> {
    let body = match format {
        Format::Csv => report.table.to_csv(),
        Format::Json => pretty(&report.to_json()),
    };
    match output {
        Some(path) => {
            let path = resolve_output(path);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(&path, body)?;
            if let (Format::Csv, Some((name, extra))) = (format, &report.extra) {
                let (text, ext) = render_extra(extra);
                fs::write(sibling(&path, name, ext), text)?;
            }
        }
        None => {
            io::stdout().lock().write_all(body.as_bytes())?;
            if let (Format::Csv, Some((_, extra))) = (format, &report.extra) {
                io::stderr().lock().write_all(render_extra(extra).0.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// Parameter echo: global flags merged with the subcommand's own.
pub fn meta(command: &str, global: &impl Serialize, args: &impl Serialize) -> Value {
    let mut params = serde_json::to_value(global).expect("flags serialize");
    if let (Some(p), Value::Object(extra)) = (params.as_object_mut(), serde_json::to_value(args).expect("flags serialize")) {
        p.extend(extra);
    }
    json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "hbar": 1.0,
        "params": params,
    })
}
