//! Report envelopes and fixed-column CSV.

use std::fmt::Write as _;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use chui_core::QuadratureSpec;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Wall-clock data is the only part of a report that differs between reruns.
#[derive(Serialize)]
pub struct WallClock {
    pub unix_seconds: f64,
    pub elapsed_seconds: f64,
}

#[derive(Serialize)]
pub struct Envelope<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub spec: &'a QuadratureSpec,
    pub result: Value,
    pub wall_clock: WallClock,
}

impl<'a> Envelope<'a> {
    pub fn new(command: &'a str, seed: u64, spec: &'a QuadratureSpec, result: Value, elapsed: Duration) -> Self {
        let unix_seconds = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        Envelope {
            tool: "chuilab",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            spec,
            result,
            wall_clock: WallClock {
                unix_seconds,
                elapsed_seconds: elapsed.as_secs_f64(),
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Metadata as `#` comment lines, then the header and rows.
    pub fn to_csv(&self, table: &Table) -> serde_json::Result<String> {
        let mut s = String::new();
        let _ = writeln!(s, "# tool={} version={} command={}", self.tool, self.version, self.command);
        let _ = writeln!(s, "# seed={}", self.seed);
        let _ = writeln!(s, "# spec={}", serde_json::to_string(self.spec)?);
        let _ = writeln!(
            s,
            "# wall_clock unix_seconds={} elapsed_seconds={}",
            self.wall_clock.unix_seconds, self.wall_clock.elapsed_seconds
        );
        s.push_str(&table.render());
        Ok(s)
    }
}

pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(x: $t) -> Self {
                Cell::Int(x as i64)
            }
        }
    )*};
}
int_cell!(u8, i32, u64, usize);

/// Absent values render as an empty field.
impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Text(String::new()), Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            // 17 significant digits round-trip every f64.
            Cell::Num(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Num(x) => x.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
        }
    }
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns.len(), "row width");
        self.rows.push(cells);
    }

    pub fn render(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::render).collect();
            s.push_str(&line.join(","));
            s.push('\n');
        }
        s
    }
}
