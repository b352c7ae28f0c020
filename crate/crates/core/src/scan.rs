//! Tabular output of parameter sweeps.
//!
//! Every sweep in this crate returns a [`ScanTable`]: an ordered set of
//! named numeric columns plus a metadata block recording the resolved
//! parameters of the run. Tables serialize to CSV (`#`-prefixed `key=value`
//! metadata lines, a header row, then data rows with 17 significant digits)
//! or to a JSON object with `meta` and `columns` maps. Serialization is
//! deterministic: identical tables produce byte-identical output.

use std::fmt::Display;
use std::io::{self, Write};

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct Column {
    name: String,
    values: Vec<f64>,
}

/// Ordered records of (parameter, observables) produced by sweeps.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ScanTable {
    meta: Vec<(String, String)>,
    columns: Vec<Column>,
}

impl ScanTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a metadata entry. Insertion order is preserved in output.
    pub fn push_meta(&mut self, key: impl Into<String>, value: impl Display) {
        self.meta.push((key.into(), value.to_string()));
    }

    /// Appends a column; all columns must share the same length.
    pub fn push_column(&mut self, name: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let name = name.into();
        if let Some(first) = self.columns.first() {
            if first.values.len() != values.len() {
                return Err(Error::ColumnLength {
                    name,
                    got: values.len(),
                    expected: first.values.len(),
                });
            }
        }
        self.columns.push(Column { name, values });
        Ok(())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Metadata value parsed as f64, if present and parseable.
    pub fn meta_f64(&self, key: &str) -> Option<f64> {
        self.meta(key).and_then(|v| v.parse().ok())
    }

    pub fn meta_entries(&self) -> impl Iterator<Item = (&str, &str)> {
        self.meta.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn column(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|c| c.name == name)
            .map(|c| c.values.as_slice())
    }

    pub fn column_names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|c| c.name.as_str())
    }

    pub fn n_rows(&self) -> usize {
        self.columns.first().map_or(0, |c| c.values.len())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}={v}")?;
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        writeln!(w, "{}", names.join(","))?;
        for row in 0..self.n_rows() {
            let mut line = String::new();
            for (i, col) in self.columns.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&fmt_sig17(col.values[row]));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, mut w: W) -> io::Result<()> {
        let mut meta = Map::new();
        for (k, v) in &self.meta {
            meta.insert(k.clone(), Value::String(v.clone()));
        }
        let mut columns = Map::new();
        for col in &self.columns {
            let values: Vec<Value> = col.values.iter().map(|&v| Value::from(v)).collect();
            columns.insert(col.name.clone(), Value::Array(values));
        }
        let mut root = Map::new();
        root.insert("meta".to_string(), Value::Object(meta));
        root.insert("columns".to_string(), Value::Object(columns));
        serde_json::to_writer_pretty(&mut w, &Value::Object(root))?;
        writeln!(w)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    pub fn to_json_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_json(&mut buf).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("JSON output is UTF-8")
    }
}

/// Formats with 17 significant digits, enough to round-trip any f64.
pub fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Uniform closed grid over [lo, hi] with exact endpoints.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2, "linspace needs at least 2 points");
    let span = hi - lo;
    (0..n)
        .map(|j| {
            if j == n - 1 {
                hi
            } else {
                lo + span * (j as f64) / ((n - 1) as f64)
            }
        })
        .collect()
}

/// Divides each entry by the maximum of the slice; an identically zero
/// input maps to all zeros (0/0 -> 0).
pub fn normalized(values: &[f64]) -> Vec<f64> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max <= 0.0 {
        return vec![0.0; values.len()];
    }
    values.iter().map(|&v| v / max).collect()
}

/// Formats a complex number in the CLI literal grammar (`a`, `bi`, `a+bi`).
pub fn fmt_complex(z: num_complex::Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.re == 0.0 {
        format!("{}i", z.im)
    } else if z.im < 0.0 {
        format!("{}{}i", z.re, z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn csv_layout() {
        let mut t = ScanTable::new();
        t.push_meta("command", "demo");
        t.push_meta("n_points", 2);
        t.push_column("x", vec![0.0, 0.5]).unwrap();
        t.push_column("y", vec![1.0, 2.0]).unwrap();
        let csv = t.to_csv_string();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# command=demo");
        assert_eq!(lines[1], "# n_points=2");
        assert_eq!(lines[2], "x,y");
        assert_eq!(lines[3], "0.0000000000000000e0,1.0000000000000000e0");
        assert_eq!(lines.len(), 5);
    }

    #[test]
    fn json_layout() {
        let mut t = ScanTable::new();
        t.push_meta("seed", 42u64);
        t.push_column("x", vec![1.5]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&t.to_json_string()).unwrap();
        assert_eq!(v["meta"]["seed"], "42");
        assert_eq!(v["columns"]["x"][0], 1.5);
    }

    #[test]
    fn column_length_mismatch() {
        let mut t = ScanTable::new();
        t.push_column("x", vec![0.0, 1.0]).unwrap();
        assert!(t.push_column("y", vec![0.0]).is_err());
    }

    #[test]
    fn sig17_round_trips() {
        for &x in &[0.0, 1.0, std::f64::consts::PI, -2.5e-13, 6.02e23] {
            let s = fmt_sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn linspace_endpoints_exact() {
        let g = linspace(0.1, 0.3, 7);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[6], 0.3);
        assert_eq!(g.len(), 7);
        let g = linspace(-5.0, 5.0, 21);
        assert_eq!(g[10], 0.0);
        assert_eq!(g[20], 5.0);
    }

    #[test]
    fn normalized_handles_zero() {
        assert_eq!(normalized(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(normalized(&[1.0, 4.0, 2.0]), vec![0.25, 1.0, 0.5]);
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(fmt_complex(Complex64::new(-1.0, 0.0)), "-1");
        assert_eq!(fmt_complex(Complex64::new(0.0, 1.0)), "1i");
        assert_eq!(fmt_complex(Complex64::new(0.5, 0.5)), "0.5+0.5i");
        assert_eq!(fmt_complex(Complex64::new(3.0, -4.0)), "3-4i");
    }
}
