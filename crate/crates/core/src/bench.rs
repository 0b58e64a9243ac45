//! Benchmark harness: every solver on every suite instance and epsilon.
//!
//! A suite file lists instance paths, one per line, relative to the suite
//! file. Blank lines and lines starting with `#` are skipped.

use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::DEFAULT_EXACT_CAP;
use crate::geometry::DEFAULT_FP_TOLERANCE;
use crate::io::{read_instance, write_atomic};
use crate::model::Instance;
use crate::solve::{solve, Algorithm, SolveOptions};

/// CSV columns, in order.
pub const CSV_COLUMNS: [&str; 13] = [
    "instance_id",
    "n",
    "model",
    "epsilon",
    "k",
    "exact_size",
    "ptas_size",
    "ratio",
    "greedy_size",
    "exact_ms",
    "ptas_ms",
    "greedy_ms",
    "status",
];

/// One row per (instance, epsilon). Missing values are empty cells.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BenchRow {
    pub instance_id: String,
    pub n: Option<usize>,
    pub model: Option<String>,
    pub epsilon: f64,
    pub k: Option<usize>,
    pub exact_size: Option<usize>,
    pub ptas_size: Option<usize>,
    /// `ptas_size / exact_size`; 1 when both are zero.
    pub ratio: Option<f64>,
    pub greedy_size: Option<usize>,
    pub exact_ms: Option<f64>,
    pub ptas_ms: Option<f64>,
    pub greedy_ms: Option<f64>,
    pub status: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub epsilons: Vec<f64>,
    /// Timed runs per solver; the median is reported.
    pub repeats: usize,
    pub exact_cap: usize,
    pub fp_tolerance: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            epsilons: vec![0.5, 1.0 / 3.0],
            repeats: 3,
            exact_cap: DEFAULT_EXACT_CAP,
            fp_tolerance: DEFAULT_FP_TOLERANCE,
        }
    }
}

pub fn read_suite(path: &Path) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect())
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

struct Timed {
    size: usize,
    k: Option<usize>,
    ms: f64,
}

fn timed(
    instance: &Instance,
    algorithm: Algorithm,
    options: &SolveOptions,
    repeats: usize,
) -> Result<Timed> {
    let mut times = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let s = solve(instance, algorithm, options)?;
        times.push(millis(s.elapsed));
        last = Some(s);
    }
    let s = last.expect("at least one run");
    Ok(Timed {
        size: s.labeling.len(),
        k: s.k,
        // Whole microseconds.
        ms: (median(times) * 1e3).round() / 1e3,
    })
}

/// Benchmarks one instance at every epsilon.
pub fn bench_instance(instance: &Instance, config: &BenchConfig) -> Vec<BenchRow> {
    let base = SolveOptions {
        epsilon: 0.5,
        fp_tolerance: config.fp_tolerance,
        exact_cap: config.exact_cap,
    };
    let mut notes = Vec::new();
    let exact = if instance.len() <= config.exact_cap.min(64) {
        timed(instance, Algorithm::Exact, &base, config.repeats)
            .map_err(|e| notes.push(format!("exact: {e}")))
            .ok()
    } else {
        notes.push(format!(
            "exact skipped: n = {} above cap {}",
            instance.len(),
            config.exact_cap
        ));
        None
    };
    let greedy = timed(instance, Algorithm::Greedy, &base, config.repeats)
        .map_err(|e| notes.push(format!("greedy: {e}")))
        .ok();

    config
        .epsilons
        .iter()
        .map(|&epsilon| {
            let mut row_notes = notes.clone();
            let options = SolveOptions { epsilon, ..base };
            let ptas = timed(instance, Algorithm::Ptas, &options, config.repeats)
                .map_err(|e| row_notes.push(format!("ptas: {e}")))
                .ok();
            let ratio = match (&ptas, &exact) {
                (Some(p), Some(e)) if e.size > 0 => Some(p.size as f64 / e.size as f64),
                (Some(p), Some(_)) if p.size == 0 => Some(1.0),
                _ => None,
            };
            BenchRow {
                instance_id: instance.id().to_string(),
                n: Some(instance.len()),
                model: Some(instance.model().to_string()),
                epsilon,
                k: ptas.as_ref().and_then(|p| p.k),
                exact_size: exact.as_ref().map(|e| e.size),
                ptas_size: ptas.as_ref().map(|p| p.size),
                ratio,
                greedy_size: greedy.as_ref().map(|g| g.size),
                exact_ms: exact.as_ref().map(|e| e.ms),
                ptas_ms: ptas.as_ref().map(|p| p.ms),
                greedy_ms: greedy.as_ref().map(|g| g.ms),
                status: if row_notes.is_empty() {
                    "ok".to_string()
                } else {
                    row_notes.join("; ")
                },
            }
        })
        .collect()
}

fn error_rows(label: String, error: &Error, config: &BenchConfig) -> Vec<BenchRow> {
    config
        .epsilons
        .iter()
        .map(|&epsilon| BenchRow {
            instance_id: label.clone(),
            n: None,
            model: None,
            epsilon,
            k: None,
            exact_size: None,
            ptas_size: None,
            ratio: None,
            greedy_size: None,
            exact_ms: None,
            ptas_ms: None,
            greedy_ms: None,
            status: format!("error: {error}"),
        })
        .collect()
}

/// Runs the whole suite. Unreadable instances become error rows.
pub fn run_bench(suite: &Path, config: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for path in read_suite(suite)? {
        match read_instance(&path) {
            Ok(instance) => rows.extend(bench_instance(&instance, config)),
            Err(e) => rows.extend(error_rows(path.display().to_string(), &e, config)),
        }
    }
    Ok(rows)
}

pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
}

pub fn write_bench_csv(rows: &[BenchRow], path: &Path) -> Result<()> {
    write_atomic(path, bench_csv(rows)?.as_bytes())
}
