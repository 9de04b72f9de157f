//! Deterministic tabular output. CSV prints floats with 17 significant
//! digits; JSON relies on the serializer's shortest round-trip form. No
//! timestamps or other run-varying fields appear, so identical configs
//! produce byte-identical files.

use serde_json::{json, Map, Value};

#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format_f64(*v),
            Cell::Text(s) => quote_csv(s),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) => {
                let v = if *v == 0.0 { 0.0 } else { *v };
                serde_json::Number::from_f64(v)
                    .map(Value::Number)
                    .unwrap_or_else(|| Value::String(format!("{v}")))
            }
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Flag(b) => Value::Bool(*b),
        }
    }
}

/// One significand digit before the point plus 16 after: 17 in total.
/// Negative zero is normalized so different evaluation orders agree.
pub fn format_f64(v: f64) -> String {
    let v = if v == 0.0 { 0.0 } else { v };
    format!("{v:.16e}")
}

fn quote_csv(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Output of one command: a data table, ordered summary scalars, and an
/// optional judgement. `pass: None` marks a pure data command.
#[derive(Debug)]
pub struct Report {
    pub command: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Cell)>,
    pub pass: Option<bool>,
}

impl Report {
    pub fn new(command: &'static str, columns: Vec<String>) -> Self {
        Report {
            command,
            columns,
            rows: Vec::new(),
            summary: Vec::new(),
            pass: None,
        }
    }

    pub fn render_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            debug_assert_eq!(row.len(), self.columns.len());
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        if !self.summary.is_empty() || self.pass.is_some() {
            out.push('\n');
            out.push_str("metric,value\n");
            for (key, cell) in &self.summary {
                out.push_str(&format!("{key},{}\n", cell.csv()));
            }
            if let Some(pass) = self.pass {
                out.push_str(&format!("pass,{pass}\n"));
            }
        }
        out
    }

    pub fn render_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| Value::Array(row.iter().map(Cell::json).collect()))
            .collect();
        let mut summary = Map::new();
        for (key, cell) in &self.summary {
            summary.insert((*key).to_string(), cell.json());
        }
        let mut top = Map::new();
        top.insert("command".into(), json!(self.command));
        top.insert("columns".into(), json!(self.columns));
        top.insert("rows".into(), Value::Array(rows));
        top.insert("summary".into(), Value::Object(summary));
        top.insert(
            "pass".into(),
            self.pass.map(Value::Bool).unwrap_or(Value::Null),
        );
        let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("static structure");
        s.push('\n');
        s
    }
}

/// Column pair naming for a complex quantity.
pub fn complex_columns(stem: &str) -> [String; 2] {
    [format!("{stem}_re"), format!("{stem}_im")]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_embedded_commas() {
        assert_eq!(quote_csv("a,b"), "\"a,b\"");
        assert_eq!(quote_csv("plain"), "plain");
        assert_eq!(quote_csv("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn float_format_is_17_significant_digits() {
        assert_eq!(format_f64(-0.25), "-2.5000000000000000e-1");
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
    }
}
