//! File formats: numeric CSV matrices, group files, `key = value` configs,
//! and versioned CSV output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::groups::GroupLayout;
use crate::penalty::PenaltyParams;
use crate::solver::{Loss, SolverConfig, StepRule};

pub const SCHEMA_LINE: &str = "# schema=v1";

fn parse_err(file: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        file: file.display().to_string(),
        line,
        msg: msg.into(),
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a plain numeric CSV. Every row must have the same width.
pub fn read_matrix(path: &Path, header: bool) -> Result<Array2<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let mut data = Vec::new();
    let mut width = None;
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(parse_err(path, line, format!("expected {w} fields, found {}", record.len())));
            }
            _ => {}
        }
        for field in record.iter() {
            let v: f64 = field
                .parse()
                .map_err(|_| parse_err(path, line, format!("not a number: {field:?}")))?;
            data.push(v);
        }
        rows += 1;
    }
    let cols = width.unwrap_or(0);
    Array2::from_shape_vec((rows, cols), data).map_err(|e| parse_err(path, 0, e.to_string()))
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.display().to_string(),
            source,
        },
        kind => parse_err(path, line, format!("{kind:?}")),
    }
}

/// Reads a vector stored either as one column or as one row.
pub fn read_vector(path: &Path, header: bool) -> Result<Array1<f64>> {
    let m = read_matrix(path, header)?;
    match m.dim() {
        (_, 1) => Ok(m.column(0).to_owned()),
        (1, _) => Ok(m.row(0).to_owned()),
        (0, 0) => Ok(Array1::zeros(0)),
        (r, c) => Err(parse_err(path, 0, format!("expected a single row or column, found {r}x{c}"))),
    }
}

/// Parses a group file: one group per line, whitespace-separated 0-based
/// indices, `#` comments and blank lines ignored.
pub fn parse_groups(text: &str, file: &Path) -> Result<Vec<Vec<usize>>> {
    let mut groups = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let group = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<usize>()
                    .map_err(|_| parse_err(file, i + 1, format!("not a coordinate index: {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        groups.push(group);
    }
    Ok(groups)
}

pub fn read_groups(path: &Path, p: usize) -> Result<GroupLayout> {
    let groups = parse_groups(&read_text(path)?, path)?;
    GroupLayout::new(groups, p)
}

pub fn format_groups(layout: &GroupLayout) -> String {
    let mut out = String::new();
    for g in layout.groups() {
        let line: Vec<String> = g.iter().map(|i| i.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

/// Solver settings read from a `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    pub loss: Loss,
    pub solver: SolverConfig,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            loss: Loss::LinearClassification,
            solver: SolverConfig {
                eta2: 1.0,
                ..SolverConfig::default()
            },
        }
    }
}

pub fn parse_config(text: &str, file: &Path) -> Result<FitConfig> {
    let mut cfg = FitConfig::default();
    let mut lambda1 = cfg.solver.params.lambda1();
    let mut l_target = cfg.solver.params.l_target();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| parse_err(file, i + 1, msg);
        let (key, value) = line
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| err(format!("expected `key = value`, found {line:?}")))?;
        let num = || value.parse::<f64>().map_err(|_| err(format!("{key}: not a number: {value:?}")));
        let int = || value.parse::<usize>().map_err(|_| err(format!("{key}: not a count: {value:?}")));
        let flag = || value.parse::<bool>().map_err(|_| err(format!("{key}: expected true or false")));
        match key {
            "loss" => {
                cfg.loss = match value {
                    "classification" | "linear-classification" => Loss::LinearClassification,
                    "squared" => Loss::Squared,
                    _ => return Err(err(format!("unknown loss {value:?}"))),
                }
            }
            "solver.eta1" => cfg.solver.eta1 = num()?,
            "solver.eta2" => cfg.solver.eta2 = num()?,
            "solver.max_iters" => cfg.solver.max_iters = int()?,
            "solver.rel_tol" => cfg.solver.rel_tol = num()?,
            "solver.step" => cfg.solver.step_rule = StepRule::Fixed(num()?),
            "solver.acceleration" => cfg.solver.acceleration = flag()?,
            "solver.debias" => cfg.solver.debias = flag()?,
            "penalty.lambda1" => lambda1 = num()?,
            "penalty.l" => l_target = int()?,
            _ => return Err(err(format!("unknown key {key:?}"))),
        }
    }
    cfg.solver.params = PenaltyParams::new(lambda1, l_target)?;
    Ok(cfg)
}

pub fn read_config(path: &Path) -> Result<FitConfig> {
    parse_config(&read_text(path)?, path)
}

/// Destination for one CSV table.
#[derive(Debug, Clone)]
pub struct CsvSink {
    pub path: Option<PathBuf>,
    pub reproducible: bool,
}

impl CsvSink {
    /// Writes the schema line, a timestamp line unless reproducible, then
    /// the header and rows.
    pub fn write(&self, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut buf = Vec::new();
        writeln!(buf, "{SCHEMA_LINE}").expect("write to memory");
        if !self.reproducible {
            let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            writeln!(buf, "# generated_unix={secs}").expect("write to memory");
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            for r in rows {
                w.write_record(r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            }
            w.flush().map_err(|source| self.io_err(source))?;
        }
        match &self.path {
            Some(p) => fs::write(p, buf).map_err(|source| self.io_err(source)),
            None => std::io::stdout().write_all(&buf).map_err(|source| self.io_err(source)),
        }
    }

    fn io_err(&self, source: std::io::Error) -> Error {
        Error::Io {
            path: self.path.as_ref().map_or("<stdout>".into(), |p| p.display().to_string()),
            source,
        }
    }
}

/// Shortest round-trip representation; `NaN` for failed rows.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}
