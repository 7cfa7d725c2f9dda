//! Tabular plot data with CSV and JSON renderings.

use serde_json::{json, Map, Value};

/// A rectangular table of reals with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    /// Appends a row; panics if its width differs from the header.
    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    /// One header line, then one line per row. Non-finite values render as
    /// `nan`, `inf` or `-inf`.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| format_number(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// `{"meta": meta, "records": [{column: value, ...}, ...]}`; non-finite values become `null`.
    pub fn to_json(&self, meta: Value) -> Value {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (name, &v) in self.columns.iter().zip(row) {
                    let cell = if v.is_finite() { json!(v) } else { Value::Null };
                    m.insert(name.clone(), cell);
                }
                Value::Object(m)
            })
            .collect();
        json!({ "meta": meta, "records": records })
    }
}

pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![1.0, f64::NAN]);
        t.push(vec![-2.5e-9, f64::INFINITY]);
        assert_eq!(t.to_csv(), "a,b\n1.0,nan\n-2.5e-9,inf\n");
    }

    #[test]
    fn json_round_trips_values() {
        let mut t = Table::new(["x"]);
        t.push(vec![0.1 + 0.2]);
        t.push(vec![f64::NAN]);
        let v = t.to_json(json!({"beta": 0.5}));
        assert_eq!(v["records"][0]["x"].as_f64().unwrap(), 0.1 + 0.2);
        assert!(v["records"][1]["x"].is_null());
        assert_eq!(v["meta"]["beta"], 0.5);
        let parsed: f64 = format_number(0.1 + 0.2).parse().unwrap();
        assert_eq!(parsed, 0.1 + 0.2);
    }
}
