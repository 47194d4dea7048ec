//! Tables and records rendered as CSV or JSON.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// 17 significant digits; non-finite values spelled `NaN`, `inf`, `-inf`.
pub fn format_number(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_number(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
        }
    }

    fn json(&self) -> Value {
        match self {
            // serde_json has no NaN/inf; keep them readable as strings
            Cell::Num(v) if !v.is_finite() => Value::String(format_number(*v)),
            Cell::Num(v) => Value::from(*v),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

/// Rows sharing one header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn object(&self, row: &[Cell]) -> Value {
        let mut map = Map::new();
        for (k, v) in self.header.iter().zip(row) {
            map.insert((*k).to_string(), v.json());
        }
        Value::Object(map)
    }

    /// JSON array of row objects.
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self.rows.iter().map(|r| self.object(r)).collect();
        let mut s = serde_json::to_string_pretty(&Value::Array(rows)).expect("table serializes");
        s.push('\n');
        s
    }

    /// A one-row table as a JSON object.
    pub fn to_json_record(&self) -> String {
        let value = match self.rows.as_slice() {
            [row] => self.object(row),
            _ => return self.to_json(),
        };
        let mut s = serde_json::to_string_pretty(&value).expect("record serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn render_record(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json_record(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_number(0.1), "1.0000000000000001e-1");
        assert_eq!(format_number(0.5), "5.0000000000000000e-1");
        assert_eq!(format_number(f64::NAN), "NaN");
        for &v in &[0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300] {
            assert_eq!(format_number(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b", "c"]);
        t.push(vec![1.5.into(), "x,y".into(), 3usize.into()]);
        assert_eq!(t.to_csv(), "a,b,c\n1.5000000000000000e0,\"x,y\",3\n");
        assert!(!t.to_csv().contains('\r'));
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![2.0.into(), f64::NAN.into()]);
        let v: Value = serde_json::from_str(&t.to_json_record()).unwrap();
        assert_eq!(v["a"], 2.0);
        assert_eq!(v["b"], "NaN");
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["a", "b"]);
    }
}
