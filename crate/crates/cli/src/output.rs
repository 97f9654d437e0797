//! Reports and their JSON / CSV renderings.

use std::collections::BTreeMap;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// What a subcommand produced: a table, a summary and a verdict.
#[derive(Clone, Debug)]
pub struct Report {
    pub command: &'static str,
    pub pass: bool,
    pub summary: Map<String, Value>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
    /// Unit of each numeric column or summary field.
    pub units: BTreeMap<&'static str, &'static str>,
}

impl Report {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Report {
            command,
            pass: true,
            summary: Map::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
            units: BTreeMap::new(),
        }
    }

    pub fn unit(mut self, field: &'static str, unit: &'static str) -> Self {
        self.units.insert(field, unit);
        self
    }

    pub fn row(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn set(&mut self, key: &str, v: impl Serialize) {
        self.summary.insert(key.into(), to_value(v));
    }

    /// Keys come out sorted since `serde_json::Map` is a `BTreeMap`.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().map(|c| c.to_string()).zip(r.iter().cloned()).collect()))
            .collect();
        let mut top = Map::new();
        top.insert("command".into(), Value::from(self.command));
        top.insert("pass".into(), Value::from(self.pass));
        top.insert("rows".into(), Value::Array(rows));
        top.insert("summary".into(), Value::Object(self.summary.clone()));
        top.insert("units".into(), to_value(&self.units));
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("json values serialize");
        s.push('\n');
        s
    }

    /// Table rows only; a column's unit goes in its header as `name [unit]`.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let header: Vec<String> = self
            .columns
            .iter()
            .map(|c| match self.units.get(c) {
                Some(u) => format!("{c} [{u}]"),
                None => c.to_string(),
            })
            .collect();
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r.iter().map(cell)).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv of utf-8 cells"))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn emit(&self, format: Format, out: Option<&std::path::Path>) -> Result<(), CliError> {
        let text = self.render(format)?;
        match out {
            Some(p) => std::fs::write(p, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// JSON has no infinities; they are written as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::from(format!("{x}"))
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_keys_are_sorted() {
        let mut r = Report::new("t", &["b", "a"]).unit("b", "nats");
        r.row(vec![num(1.0), Value::from("x,y")]);
        r.set("zeta", 1);
        r.set("alpha", f64::INFINITY.to_string());
        let j = r.to_json();
        assert!(j.find("\"alpha\"").unwrap() < j.find("\"zeta\"").unwrap());
        assert!(j.find("\"a\"").unwrap() < j.find("\"b\"").unwrap());
    }

    #[test]
    fn csv_quotes_and_units() {
        let mut r = Report::new("t", &["b", "a"]).unit("b", "nats");
        r.row(vec![num(f64::INFINITY), Value::from("x,y")]);
        assert_eq!(r.to_csv().unwrap(), "b [nats],a\ninf,\"x,y\"\n");
    }
}
