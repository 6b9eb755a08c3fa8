//! What a command produces: text, a JSON record, an optional CSV table.

use std::fmt::Write as _;
use std::path::Path;

use gencol::bigo::Decision;
use serde_json::Value;

use crate::session::CliError;

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Right-aligned columns, two spaces apart, indented by `indent`.
    pub fn render(&self, indent: usize) -> String {
        let mut width: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: Vec<&str>| {
            let mut s = " ".repeat(indent);
            for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
                if i > 0 {
                    s.push_str("  ");
                }
                let _ = write!(s, "{c:>w$}");
            }
            s.push('\n');
            s
        };
        let mut out = line(self.header.clone());
        for r in &self.rows {
            out.push_str(&line(r.iter().map(String::as_str).collect()));
        }
        out
    }

    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let fail = |e: csv::Error| CliError::Data(format!("cannot write {}: {e}", path.display()));
        let mut w = csv::Writer::from_path(path).map_err(fail)?;
        w.write_record(&self.header).map_err(fail)?;
        for r in &self.rows {
            w.write_record(r).map_err(fail)?;
        }
        w.flush()
            .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
    }
}

pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
    pub csv: Option<Table>,
}

pub fn exit_code(d: Decision) -> i32 {
    match d {
        Decision::Holds => 0,
        Decision::Fails => 1,
        Decision::Indeterminate => 2,
    }
}

pub fn decision_word(d: Decision) -> &'static str {
    match d {
        Decision::Holds => "holds",
        Decision::Fails => "fails",
        Decision::Indeterminate => "indeterminate",
    }
}

/// Shortest scientific form that reads back to the same `f64`.
pub fn sci(x: f64) -> String {
    if x.is_finite() {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

pub fn opt_sci(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), sci)
}

/// Short form for exponents and slopes.
pub fn fixed(x: f64) -> String {
    format!("{x:.4}")
}

pub fn opt_fixed(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), fixed)
}

pub fn interval(k: (f64, f64)) -> String {
    format!("[{}, {}]", k.0, k.1)
}
