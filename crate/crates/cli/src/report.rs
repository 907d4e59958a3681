//! Command output rendered as text, JSON or CSV.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

/// Rows under fixed columns, with optional custom text and JSON renderings.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub text: Option<String>,
    pub json: Option<Value>,
}

impl Report {
    pub fn new(columns: &[&'static str]) -> Self {
        Report {
            columns: columns.to_vec(),
            ..Default::default()
        }
    }

    pub fn row(&mut self, values: Vec<String>) {
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push(values);
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn with_json(mut self, json: Value) -> Self {
        self.json = Some(json);
        self
    }

    fn row_object(&self, row: &[String]) -> Value {
        let map: Map<String, Value> = self
            .columns
            .iter()
            .zip(row)
            .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
            .collect();
        Value::Object(map)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone().unwrap_or_else(|| self.default_text()),
            Format::Json => {
                let value = self.json.clone().unwrap_or_else(|| match self.rows.as_slice() {
                    [row] => self.row_object(row),
                    rows => Value::Array(rows.iter().map(|r| self.row_object(r)).collect()),
                });
                serde_json::to_string_pretty(&value).expect("JSON values serialize") + "\n"
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 fields")
            }
        }
    }

    fn default_text(&self) -> String {
        let mut out = String::new();
        if let [row] = self.rows.as_slice() {
            let width = self.columns.iter().map(|c| c.len()).max().unwrap_or(0);
            for (k, v) in self.columns.iter().zip(row) {
                let _ = writeln!(out, "{k:width$}  {v}");
            }
            return out;
        }
        let mut widths: Vec<usize> = self.columns.iter().map(|c| c.len()).collect();
        for row in &self.rows {
            for (w, v) in widths.iter_mut().zip(row) {
                *w = (*w).max(v.chars().count());
            }
        }
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c}{}", " ".repeat(w - c.chars().count())))
                .collect();
            padded.join("  ").trim_end().to_string() + "\n"
        };
        out.push_str(&line(self.columns.clone()));
        for row in &self.rows {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_each_format() {
        let mut r = Report::new(&["a", "b"]);
        r.row(vec!["1".into(), "x,y".into()]);
        assert_eq!(r.render(Format::Text), "a  1\nb  x,y\n");
        assert_eq!(r.render(Format::Csv), "a,b\n1,\"x,y\"\n");
        let v: Value = serde_json::from_str(&r.render(Format::Json)).unwrap();
        assert_eq!(v["b"], "x,y");
        r.row(vec!["22".into(), "z".into()]);
        assert_eq!(r.render(Format::Text), "a   b\n1   x,y\n22  z\n");
    }
}
