//! Row tables rendered as CSV or JSON.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Map, Value as Json};

use crate::config::{Format, RunConfig};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

/// Magnitudes below this print as `0`.
pub const FLUSH: f64 = 1e-15;

/// `x` with 12 significant digits, trailing zeros removed.
pub fn sig12(x: f64) -> String {
    if x.abs() < FLUSH {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        // rounding can carry into a new leading digit; redo with one fewer
        let digits = s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len();
        let s = if digits > 12 && decimals > 0 {
            format!("{x:.prec$}", prec = decimals - 1)
        } else {
            s
        };
        trim_zeros(&s)
    } else {
        let s = format!("{x:.11e}");
        let (mant, e) = s.split_once('e').expect("exponent");
        format!("{}e{e}", trim_zeros(mant))
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        let t = s.trim_end_matches('0').trim_end_matches('.');
        if t == "-0" {
            "0".into()
        } else {
            t.to_string()
        }
    } else {
        s.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => sig12(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Num(x) => sig12(*x)
                .parse::<f64>()
                .ok()
                .and_then(|v| serde_json::Number::from_f64(v).map(Json::Number))
                .unwrap_or(Json::Null),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Json::Null,
        }
    }
}

/// Records of one subcommand plus pass/fail tallies.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Index of the boolean `pass` column, if any.
    pub pass_column: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
}

impl RunSummary {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        let pass_column = columns.iter().position(|c| *c == "pass");
        RunSummary {
            command,
            columns,
            rows: Vec::new(),
            pass_column,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn tally(&self) -> Tally {
        let Some(i) = self.pass_column else {
            return Tally { passed: 0, failed: 0 };
        };
        let passed = self.rows.iter().filter(|r| r[i] == Cell::Bool(true)).count();
        Tally {
            passed,
            failed: self.rows.len() - passed,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for r in &self.rows {
            w.write_record(r.iter().map(Cell::csv))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, config: &RunConfig) -> Json {
        let rows: Vec<Json> = self
            .rows
            .iter()
            .map(|r| {
                let mut m = Map::new();
                for (c, v) in self.columns.iter().zip(r) {
                    m.insert(c.to_string(), v.json());
                }
                Json::Object(m)
            })
            .collect();
        json!({
            "command": self.command,
            "config": config,
            "rows": rows,
            "summary": self.tally(),
        })
    }

    pub fn write<W: Write>(&self, config: &RunConfig, mut out: W) -> std::io::Result<()> {
        match config.format {
            Format::Csv => self.write_csv(&mut out).map_err(std::io::Error::other),
            Format::Json => {
                serde_json::to_writer_pretty(&mut out, &self.to_json(config))?;
                writeln!(out)
            }
        }
    }
}
