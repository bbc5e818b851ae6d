//! Record files, the per-cell summary table and budget curves.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use balance_core::metrics::{summarize, MetricsSummary};
use balance_core::{Budget, Variant};
use serde::{Deserialize, Serialize};

use crate::{ArenaError, MatchRecord};

pub const RECORDS_FILE: &str = "records.ndjson";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const CURVES_FILE: &str = "curves.json";
pub const META_FILE: &str = "report.json";

/// Name of the cross-game cell.
pub const ALL_GAMES: &str = "all";

pub fn write_records(path: &Path, records: &[MatchRecord]) -> Result<(), ArenaError> {
    let file = fs::File::create(path).map_err(|e| ArenaError::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in records {
        let line = serde_json::to_string(r).expect("records serialize");
        writeln!(out, "{line}").map_err(|e| ArenaError::io(path, e))?;
    }
    out.flush().map_err(|e| ArenaError::io(path, e))
}

pub fn read_records(path: &Path) -> Result<Vec<MatchRecord>, ArenaError> {
    let file = fs::File::open(path).map_err(|e| ArenaError::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| ArenaError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| ArenaError::Record {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        records.push(record);
    }
    Ok(records)
}

pub fn variant_label(variant: Option<Variant>) -> &'static str {
    variant.map_or("none", Variant::label)
}

pub fn budget_label(budget: Budget) -> String {
    match budget {
        Budget::Iterations(n) => n.to_string(),
        Budget::Seconds(s) => format!("{s}s"),
    }
}

/// Sort key putting iteration budgets before time budgets, each ascending.
fn budget_order(budget: Budget) -> (u8, f64) {
    match budget {
        Budget::Iterations(n) => (0, n as f64),
        Budget::Seconds(s) => (1, s),
    }
}

/// One row of the summary table, in file column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub variant: String,
    pub budget: String,
    pub game: String,
    pub n: usize,
    pub gain: f64,
    pub cr95_gain: f64,
    pub win: f64,
    pub draw: f64,
    pub loss: f64,
    pub score: f64,
    pub cr95_score: f64,
}

impl SummaryRow {
    fn new(variant: Option<Variant>, budget: Budget, game: &str, m: &MetricsSummary) -> SummaryRow {
        SummaryRow {
            variant: variant_label(variant).to_string(),
            budget: budget_label(budget),
            game: game.to_string(),
            n: m.n,
            gain: m.gain,
            cr95_gain: m.cr95_gain,
            win: m.win,
            draw: m.draw,
            loss: m.loss,
            score: m.score,
            cr95_score: m.cr95_score,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub budget: String,
    pub n: usize,
    pub gain: f64,
    pub cr95_gain: f64,
    pub score: f64,
    pub cr95_score: f64,
}

/// Gain and score of one variant on one game (or all games) against budget.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub variant: String,
    pub game: String,
    pub points: Vec<CurvePoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub rows: Vec<SummaryRow>,
    pub curves: Vec<Curve>,
    pub records: usize,
    pub failed: usize,
}

/// Summary rows per (variant, budget, game) plus an `all` row per
/// (variant, budget) that weights every game equally. Failed records are
/// counted and left out.
pub fn build_report(records: &[MatchRecord]) -> Report {
    let ok: Vec<&MatchRecord> = records.iter().filter(|r| r.error.is_none()).collect();

    // (variant, budget order, budget label) -> game -> samples
    type Cells = BTreeMap<(Option<Variant>, u8, u64, String), (Budget, BTreeMap<String, Vec<(i8, f64)>>)>;
    let mut cells: Cells = BTreeMap::new();
    for r in &ok {
        let (kind, value) = budget_order(r.budget);
        let key = (r.variant, kind, value.to_bits(), budget_label(r.budget));
        let cell = cells.entry(key).or_insert_with(|| (r.budget, BTreeMap::new()));
        cell.1.entry(r.game.clone()).or_default().push((r.b, r.score));
    }

    let mut rows = Vec::new();
    let mut curves: BTreeMap<(Option<Variant>, String), Vec<((u8, f64), CurvePoint)>> = BTreeMap::new();
    for ((variant, ..), (budget, games)) in &cells {
        let per_game: Vec<MetricsSummary> =
            games.values().map(|s| summarize(s).expect("cells are non-empty")).collect();
        let all = average(&per_game);
        let named = games.keys().map(String::as_str).zip(&per_game).chain([(ALL_GAMES, &all)]);
        for (game, m) in named {
            let row = SummaryRow::new(*variant, *budget, game, m);
            let point = CurvePoint {
                budget: row.budget.clone(),
                n: row.n,
                gain: row.gain,
                cr95_gain: row.cr95_gain,
                score: row.score,
                cr95_score: row.cr95_score,
            };
            curves.entry((*variant, game.to_string())).or_default().push((budget_order(*budget), point));
            rows.push(row);
        }
    }
    let curves = curves
        .into_iter()
        .map(|((variant, game), mut points)| {
            points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite budgets"));
            Curve { variant: variant_label(variant).to_string(), game, points: points.into_iter().map(|p| p.1).collect() }
        })
        .collect();

    Report { rows, curves, records: records.len(), failed: records.len() - ok.len() }
}

/// Equal-weight mean over games; radii combine as for a mean of independent
/// estimates.
fn average(parts: &[MetricsSummary]) -> MetricsSummary {
    let k = parts.len() as f64;
    let mean = |f: fn(&MetricsSummary) -> f64| parts.iter().map(f).sum::<f64>() / k;
    let radius = |f: fn(&MetricsSummary) -> f64| parts.iter().map(|p| f(p) * f(p)).sum::<f64>().sqrt() / k;
    let win = mean(|m| m.win);
    let loss = mean(|m| m.loss);
    MetricsSummary {
        n: parts.iter().map(|m| m.n).sum(),
        gain: win - loss,
        cr95_gain: radius(|m| m.cr95_gain),
        win,
        draw: mean(|m| m.draw),
        loss,
        score: mean(|m| m.score),
        cr95_score: radius(|m| m.cr95_score),
    }
}

pub fn write_summary(path: &Path, rows: &[SummaryRow]) -> Result<(), ArenaError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| ArenaError::io(path, e))
}

pub fn read_summary(path: &Path) -> Result<Vec<SummaryRow>, ArenaError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_error(path, e))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| csv_error(path, e))
}

fn csv_error(path: &Path, e: csv::Error) -> ArenaError {
    ArenaError::Record { path: path.to_path_buf(), line: e.position().map_or(0, |p| p.line() as usize), message: e.to_string() }
}

#[derive(Clone, Debug)]
pub struct ReportFiles {
    pub records: PathBuf,
    pub summary: PathBuf,
    pub curves: PathBuf,
    pub meta: PathBuf,
}

/// Writes records (sorted by job index), summary, curves and a small meta
/// file with record and failure counts into `dir`.
pub fn emit_report(records: &[MatchRecord], dir: &Path) -> Result<(Report, ReportFiles), ArenaError> {
    fs::create_dir_all(dir).map_err(|e| ArenaError::io(dir, e))?;
    let mut sorted = records.to_vec();
    sorted.sort_by_key(|r| r.index);
    let report = build_report(&sorted);
    let files = ReportFiles {
        records: dir.join(RECORDS_FILE),
        summary: dir.join(SUMMARY_FILE),
        curves: dir.join(CURVES_FILE),
        meta: dir.join(META_FILE),
    };
    write_records(&files.records, &sorted)?;
    write_summary(&files.summary, &report.rows)?;
    let curves = serde_json::to_string_pretty(&report.curves).expect("curves serialize");
    fs::write(&files.curves, curves + "\n").map_err(|e| ArenaError::io(&files.curves, e))?;
    let meta = serde_json::json!({ "records": report.records, "failed": report.failed });
    fs::write(&files.meta, format!("{meta:#}\n")).map_err(|e| ArenaError::io(&files.meta, e))?;
    Ok((report, files))
}
