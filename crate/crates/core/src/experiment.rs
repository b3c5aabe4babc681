//! Batch experiments: a TOML config names the rates, snapshots, scenarios
//! and methods; every (snapshot, scenario) pair becomes one comparison row.
//!
//! ```toml
//! schema = "polling-wait/v1"
//! cases = [[1, 1, 1, 1], [3, 6, 3, 6]]
//! scenarios = [1, 2, 3, 4]          # optional, default all four
//! tagged_class = 1                  # optional
//! modes = ["analytic", "simulate", "deterministic"]
//! output = "rows.csv"               # optional
//!
//! [params]
//! lambda = [1.0, 1.0]
//! mu = [[2.86, 2.86], [2.86, 2.86]] # mu[class][station]
//!
//! [trunc]                           # optional, any subset of fields
//! eps = 1e-3
//!
//! [sim]                             # optional, any subset of fields
//! replications = 800
//! seed = 1
//! ```

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::deterministic::deterministic_wait;
use crate::error::{Error, Result};
use crate::model::{
    relabel_for_class2, ArrivalState, Class, QueueLengths, Scenario, SystemParams, TruncationConfig,
};
use crate::scenario::Analyzer;
use crate::simulator::{simulate_conditional, SimConfig, SimEstimate};

pub const SCHEMA: &str = "polling-wait/v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Simulate,
    Deterministic,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "analytic" => Ok(Mode::Analytic),
            "simulate" => Ok(Mode::Simulate),
            "deterministic" => Ok(Mode::Deterministic),
            other => Err(Error::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Table,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "table" => Ok(Format::Table),
            other => Err(Error::InvalidConfig(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub params: SystemParams,
    pub cases: Vec<QueueLengths>,
    pub scenarios: Vec<Scenario>,
    pub tagged: Class,
    pub modes: Vec<Mode>,
    pub trunc: TruncationConfig,
    pub sim: SimConfig,
    pub output: Option<PathBuf>,
    pub format: Format,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    schema: String,
    params: RawParams,
    cases: Vec<[u32; 4]>,
    #[serde(default = "all_scenarios")]
    scenarios: Vec<u8>,
    #[serde(default = "one")]
    tagged_class: u8,
    modes: Vec<Mode>,
    #[serde(default)]
    trunc: RawTrunc,
    #[serde(default)]
    sim: RawSim,
    output: Option<PathBuf>,
    #[serde(default)]
    format: Format,
}

fn all_scenarios() -> Vec<u8> {
    vec![1, 2, 3, 4]
}

fn one() -> u8 {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    lambda: [f64; 2],
    mu: [[f64; 2]; 2],
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawTrunc {
    n_max: Option<usize>,
    eps: Option<f64>,
    series_tol: Option<f64>,
    quad_tol: Option<f64>,
    t_max_factor: Option<f64>,
    max_depth: Option<usize>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawSim {
    replications: Option<usize>,
    seed: Option<u64>,
    warmup: Option<u64>,
    horizon: Option<u64>,
    batches: Option<usize>,
    parallel: Option<bool>,
    max_events: Option<usize>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        if raw.schema != SCHEMA {
            return Err(Error::InvalidConfig(format!(
                "schema `{}` is not `{SCHEMA}`",
                raw.schema
            )));
        }
        let params = SystemParams::new(raw.params.lambda, raw.params.mu)?;
        let d = TruncationConfig::default();
        let t = raw.trunc;
        let trunc = TruncationConfig {
            n_max: t.n_max.unwrap_or(d.n_max),
            eps: t.eps.unwrap_or(d.eps),
            series_tol: t.series_tol.unwrap_or(d.series_tol),
            quad_tol: t.quad_tol.unwrap_or(d.quad_tol),
            t_max_factor: t.t_max_factor.unwrap_or(d.t_max_factor),
            max_depth: t.max_depth.unwrap_or(d.max_depth),
        };
        let d = SimConfig::default();
        let s = raw.sim;
        let sim = SimConfig {
            replications: s.replications.unwrap_or(d.replications),
            seed: s.seed.unwrap_or(d.seed),
            warmup: s.warmup.unwrap_or(d.warmup),
            horizon: s.horizon.unwrap_or(d.horizon),
            batches: s.batches.unwrap_or(d.batches),
            parallel: s.parallel.unwrap_or(d.parallel),
            max_events: s.max_events.unwrap_or(d.max_events),
        };
        let cfg = ExperimentConfig {
            params,
            cases: raw.cases.into_iter().map(QueueLengths).collect(),
            scenarios: raw
                .scenarios
                .into_iter()
                .map(Scenario::from_index)
                .collect::<Result<_>>()?,
            tagged: Class::from_number(raw.tagged_class)?,
            modes: raw.modes,
            trunc,
            sim,
            output: raw.output,
            format: raw.format,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.cases.is_empty() {
            return Err(Error::InvalidConfig("no cases".into()));
        }
        if self.modes.is_empty() {
            return Err(Error::InvalidConfig("no modes".into()));
        }
        if self.scenarios.is_empty() {
            return Err(Error::InvalidConfig("no scenarios".into()));
        }
        self.trunc.validate()?;
        if self.modes.contains(&Mode::Simulate) {
            self.sim.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub la: QueueLengths,
    pub m: Scenario,
    pub analytic: Option<f64>,
    pub residual: Option<f64>,
    pub sim: Option<SimEstimate>,
    pub det: Option<f64>,
    /// `|sim - analytic| / sim` in percent.
    pub error_pct: Option<f64>,
    /// First error met while computing the row.
    pub failure: Option<String>,
}

impl ComparisonRow {
    pub fn failed(&self) -> bool {
        self.failure.is_some()
    }
}

pub fn error_pct(sim: f64, analytic: f64) -> f64 {
    ((sim - analytic) / sim).abs() * 100.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub rows: usize,
    pub failed: usize,
    pub mean_error_pct: Option<f64>,
    /// Share of compared rows with error below 9 %.
    pub share_below_9: Option<f64>,
}

pub fn summarize(rows: &[ComparisonRow]) -> Summary {
    let errs: Vec<f64> = rows.iter().filter_map(|r| r.error_pct).collect();
    let n = errs.len() as f64;
    Summary {
        rows: rows.len(),
        failed: rows.iter().filter(|r| r.failed()).count(),
        mean_error_pct: (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / n),
        share_below_9: (!errs.is_empty())
            .then(|| errs.iter().filter(|&&e| e < 9.0).count() as f64 / n),
    }
}

/// Runs every (case, scenario) pair; a failing pair is flagged, not fatal.
/// Rows come back in config order.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<(Vec<ComparisonRow>, Summary)> {
    cfg.validate()?;
    let analyzer = if cfg.modes.contains(&Mode::Analytic) {
        let (_, p) = relabel_for_class2(
            ArrivalState::new(QueueLengths::default(), Scenario::M1, cfg.tagged),
            cfg.params,
        );
        Some(Analyzer::new(p, cfg.trunc)?)
    } else {
        None
    };
    let pairs: Vec<(QueueLengths, Scenario)> = cfg
        .cases
        .iter()
        .flat_map(|&q| cfg.scenarios.iter().map(move |&m| (q, m)))
        .collect();
    let rows = pairs
        .par_iter()
        .map(|&(la, m)| one_row(cfg, analyzer.as_ref(), la, m))
        .collect::<Vec<_>>();
    let summary = summarize(&rows);
    Ok((rows, summary))
}

fn one_row(
    cfg: &ExperimentConfig,
    analyzer: Option<&Analyzer>,
    la: QueueLengths,
    m: Scenario,
) -> ComparisonRow {
    let s = ArrivalState::new(la, m, cfg.tagged);
    let mut row = ComparisonRow {
        la,
        m,
        analytic: None,
        residual: None,
        sim: None,
        det: None,
        error_pct: None,
        failure: None,
    };
    let mut note = |e: Error, what: &str| {
        if row.failure.is_none() {
            row.failure = Some(format!("{what}: {e}"));
        }
    };
    if let Some(an) = analyzer {
        let (s1, _) = relabel_for_class2(s, cfg.params);
        match an.analyze(&s1) {
            Ok(r) => {
                row.analytic = Some(r.cond_wait);
                row.residual = Some(r.residual_prob);
            }
            Err(e) => note(e, "analytic"),
        }
    }
    if cfg.modes.contains(&Mode::Simulate) {
        match simulate_conditional(&s, &cfg.params, &cfg.sim) {
            Ok(e) => row.sim = Some(e),
            Err(e) => note(e, "simulate"),
        }
    }
    if cfg.modes.contains(&Mode::Deterministic) {
        match deterministic_wait(&s, &cfg.params) {
            Ok(w) => row.det = Some(w),
            Err(e) => note(e, "deterministic"),
        }
    }
    if let (Some(a), Some(e)) = (row.analytic, row.sim) {
        row.error_pct = Some(error_pct(e.mean, a));
    }
    row
}

pub const CSV_HEADER: [&str; 8] = [
    "la",
    "m",
    "analytic",
    "sim_mean",
    "sim_stderr",
    "det",
    "error_pct",
    "residual",
];

fn opt_full(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_2(x: Option<f64>) -> String {
    x.map(|v| format!("{v:.2}")).unwrap_or_else(|| "-".into())
}

/// Writes `rows` as CSV (full precision) or as an aligned table (two
/// decimals).
pub fn emit_report<W: Write>(rows: &[ComparisonRow], format: Format, out: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidConfig("no rows to report".into()));
    }
    match format {
        Format::Csv => write_csv(rows, out),
        Format::Table => write_table(rows, out),
    }
}

fn write_csv<W: Write>(rows: &[ComparisonRow], out: W) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.la.to_string(),
            r.m.index().to_string(),
            opt_full(r.analytic),
            opt_full(r.sim.map(|e| e.mean)),
            opt_full(r.sim.map(|e| e.stderr)),
            opt_full(r.det),
            opt_full(r.error_pct),
            opt_full(r.residual),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

fn write_table<W: Write>(rows: &[ComparisonRow], mut out: W) -> Result<()> {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<16} {:>2} {:>9} {:>9} {:>7} {:>9} {:>8} {:>9}",
        "La", "m", "analytic", "sim", "+-", "det", "error", "residual"
    );
    for r in rows {
        let err = r
            .error_pct
            .map(|e| format!("{e:.2}%"))
            .unwrap_or_else(|| "-".into());
        let res = r
            .residual
            .map(|v| format!("{v:.1e}"))
            .unwrap_or_else(|| "-".into());
        let _ = write!(
            s,
            "{:<16} {:>2} {:>9} {:>9} {:>7} {:>9} {:>8} {:>9}",
            r.la.to_string(),
            r.m.index(),
            opt_2(r.analytic),
            opt_2(r.sim.map(|e| e.mean)),
            opt_2(r.sim.map(|e| e.stderr)),
            opt_2(r.det),
            err,
            res
        );
        if let Some(f) = &r.failure {
            let _ = write!(s, "  FAILED {f}");
        }
        s.push('\n');
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

/// Values recovered from a CSV report.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub la: QueueLengths,
    pub m: Scenario,
    pub analytic: Option<f64>,
    pub sim_mean: Option<f64>,
    pub sim_stderr: Option<f64>,
    pub det: Option<f64>,
    pub error_pct: Option<f64>,
    pub residual: Option<f64>,
}

fn parse_la(s: &str) -> Result<QueueLengths> {
    let bad = || Error::InvalidConfig(format!("bad queue vector `{s}`"));
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let v: Vec<u32> = inner
        .split(',')
        .map(|x| x.trim().parse().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let arr: [u32; 4] = v.try_into().map_err(|_| bad())?;
    Ok(QueueLengths(arr))
}

pub fn read_csv_report<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut rd = csv::Reader::from_reader(input);
    let num = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse()
                .map(Some)
                .map_err(|_| Error::InvalidConfig(format!("bad number `{s}`")))
        }
    };
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| Error::Io(e.to_string()))?;
        if rec.len() != CSV_HEADER.len() {
            return Err(Error::InvalidConfig("wrong number of columns".into()));
        }
        let m: u8 = rec[1]
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad scenario `{}`", &rec[1])))?;
        rows.push(CsvRow {
            la: parse_la(&rec[0])?,
            m: Scenario::from_index(m)?,
            analytic: num(&rec[2])?,
            sim_mean: num(&rec[3])?,
            sim_stderr: num(&rec[4])?,
            det: num(&rec[5])?,
            error_pct: num(&rec[6])?,
            residual: num(&rec[7])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG: &str = r#"
schema = "polling-wait/v1"
cases = [[1, 1, 1, 1]]
scenarios = [1]
modes = ["deterministic"]

[params]
lambda = [1.0, 1.0]
mu = [[2.86, 2.86], [2.86, 2.86]]
"#;

    #[test]
    fn deterministic_only_row_leaves_other_columns_empty() {
        let cfg = ExperimentConfig::from_toml(CFG).unwrap();
        let (rows, sum) = run_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert!(r.analytic.is_none() && r.sim.is_none() && r.error_pct.is_none());
        assert!((r.det.unwrap() - 3.0 / 2.86).abs() < 1e-12);
        assert_eq!(sum.failed, 0);
        assert!(sum.mean_error_pct.is_none());
    }

    #[test]
    fn error_metric() {
        assert!((error_pct(1.48, 1.60) - 8.108).abs() < 1e-3);
        // the printed 7.66 % comes from unrounded table entries
        assert!(error_pct(1.48, 1.60) > 7.0);
    }

    #[test]
    fn wrong_schema_and_unknown_keys_rejected() {
        let bad = CFG.replace("polling-wait/v1", "polling-wait/v0");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = CFG.replace("scenarios", "scenario");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
        let bad = CFG.replace("modes = [\"deterministic\"]", "modes = []");
        assert!(ExperimentConfig::from_toml(&bad).is_err());
    }

    #[test]
    fn one_row_gives_two_csv_lines_and_round_trips() {
        let row = ComparisonRow {
            la: QueueLengths::new(3, 6, 3, 6),
            m: Scenario::M3,
            analytic: Some(9.123456789012345),
            residual: Some(7.5e-4),
            sim: Some(SimEstimate {
                mean: 8.43,
                stderr: 0.1,
                n: 800,
                seed: 1,
            }),
            det: Some(7.35),
            error_pct: Some(error_pct(8.43, 9.123456789012345)),
            failure: None,
        };
        let mut buf = Vec::new();
        emit_report(std::slice::from_ref(&row), Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("la,m,analytic,sim_mean,sim_stderr,det,error_pct,residual"));
        let back = read_csv_report(buf.as_slice()).unwrap();
        assert_eq!(back[0].la, row.la);
        assert_eq!(back[0].analytic, row.analytic);
        assert_eq!(back[0].error_pct, row.error_pct);
        assert_eq!(back[0].residual, row.residual);
    }

    #[test]
    fn empty_rows_rejected() {
        assert!(emit_report(&[], Format::Table, Vec::new()).is_err());
    }
}
