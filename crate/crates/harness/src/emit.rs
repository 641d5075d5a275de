//! CSV tables, figure series, per-run records and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::{HarnessError, Result};
use crate::runner::{AggregateReport, MeanDegreeStats, Model, RunRecord};

const TOP_K: usize = 10;

fn incomplete(what: impl Into<String>) -> HarnessError {
    HarnessError::IncompleteReport(what.into())
}

fn writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(HarnessError::csv(path))
}

fn finish(mut w: csv::Writer<fs::File>, path: &Path) -> Result<()> {
    w.flush().map_err(HarnessError::io(path))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = writer(path)?;
    for row in rows {
        w.serialize(row).map_err(HarnessError::csv(path))?;
    }
    finish(w, path)
}

fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// Mean arrival of the top-10 nodes: DRPA pooled over every beta > 0 and r,
/// PA from the beta = 0 grid runs.
pub fn write_table1(report: &AggregateReport, path: &Path) -> Result<()> {
    let pick = |pa: bool| -> Vec<drpa_core::metrics::RunResult> {
        report
            .drpa_runs()
            .filter(|x| (x.spec.beta == 0.0) == pa)
            .map(|x| x.result.clone())
            .collect()
    };
    let drpa = pick(false);
    let pa = pick(true);
    if drpa.is_empty() {
        return Err(incomplete("table1 needs runs with beta > 0"));
    }
    if pa.is_empty() {
        return Err(incomplete("table1 needs runs with beta = 0"));
    }
    let mut w = writer(path)?;
    let mut header = vec!["network".to_string(), "runs".to_string()];
    header.extend((1..=TOP_K).map(|i| format!("top{i}")));
    header.push("mean".into());
    w.write_record(&header).map_err(HarnessError::csv(path))?;
    for (name, runs) in [("DRPA", &drpa), ("PA", &pa)] {
        let k = TOP_K.min(runs.iter().map(|r| r.node_count()).min().unwrap_or(0));
        let means = drpa_core::metrics::top_k_arrivals(runs, k)?;
        let overall = means.iter().sum::<f64>() / means.len().max(1) as f64;
        let mut rec = vec![name.to_string(), runs.len().to_string()];
        rec.extend((0..TOP_K).map(|i| means.get(i).map_or(String::new(), |&m| fmt_f64(m))));
        rec.push(fmt_f64(overall));
        w.write_record(&rec).map_err(HarnessError::csv(path))?;
    }
    finish(w, path)
}

#[derive(Serialize)]
struct Table2Row {
    network: String,
    beta: Option<f64>,
    runs: usize,
    max: f64,
    variance: f64,
    skewness: f64,
    mean: f64,
    min: f64,
}

impl Table2Row {
    fn new(network: String, beta: Option<f64>, runs: &[&RunRecord]) -> Option<Self> {
        let s: MeanDegreeStats = MeanDegreeStats::of(runs.iter().copied())?;
        Some(Table2Row {
            network,
            beta,
            runs: runs.len(),
            max: s.max,
            variance: s.variance,
            skewness: s.skewness,
            mean: s.mean,
            min: s.min,
        })
    }
}

/// Run means of degree statistics: reference PA, then one row per beta.
pub fn write_table2(report: &AggregateReport, path: &Path) -> Result<()> {
    let pa: Vec<&RunRecord> = report.pa_runs().collect();
    let mut rows = vec![Table2Row::new("PA".into(), None, &pa)
        .ok_or_else(|| incomplete("table2 needs the reference PA runs"))?];
    for &beta in &report.config.betas {
        let runs = report.runs_at_beta(beta);
        let row = Table2Row::new(format!("DRPA(beta={beta})"), Some(beta), &runs)
            .ok_or_else(|| incomplete(format!("table2 has no runs for beta = {beta}")))?;
        rows.push(row);
    }
    write_rows(path, &rows)
}

#[derive(Serialize)]
struct Table3Row {
    beta: f64,
    mode: crate::config::FitMode,
    samples: usize,
    fitted: usize,
    n_tail: Option<f64>,
    xmin: Option<f64>,
    alpha: Option<f64>,
    ks_distance: Option<f64>,
    power_vs_lognormal: Option<f64>,
    p_value_lognormal: Option<f64>,
    power_vs_exponential: Option<f64>,
    p_value_exponential: Option<f64>,
    error: Option<String>,
}

/// Power-law fit and likelihood-ratio comparisons, one row per beta > 0.
pub fn write_table3(report: &AggregateReport, path: &Path) -> Result<()> {
    if report.fits.is_empty() {
        return Err(incomplete("table3 needs runs with beta > 0"));
    }
    let rows: Vec<Table3Row> = report
        .fits
        .iter()
        .map(|f| {
            let s = f.summary;
            Table3Row {
                beta: f.beta,
                mode: f.mode,
                samples: f.samples,
                fitted: f.fitted,
                n_tail: s.map(|s| s.n_tail),
                xmin: s.map(|s| s.xmin),
                alpha: s.map(|s| s.alpha),
                ks_distance: s.map(|s| s.ks_distance),
                power_vs_lognormal: s.map(|s| s.power_vs_lognormal),
                p_value_lognormal: s.map(|s| s.p_value_lognormal),
                power_vs_exponential: s.map(|s| s.power_vs_exponential),
                p_value_exponential: s.map(|s| s.p_value_exponential),
                error: f.error.clone(),
            }
        })
        .collect();
    write_rows(path, &rows)
}

#[derive(Serialize)]
struct NodeRow {
    node_id: u32,
    arrival: u32,
    final_degree: u32,
    rank: u32,
    rank_arrival_diff: i64,
}

/// File name of the per-run record CSV.
pub fn run_file_name(x: &RunRecord) -> String {
    match x.spec.model {
        Model::Drpa => format!(
            "run_{}_{}_{}.csv",
            x.spec.beta,
            x.spec.r.unwrap_or(0),
            x.spec.run
        ),
        Model::Pa => format!("run_pa_{}.csv", x.spec.run),
    }
}

pub fn write_run(x: &RunRecord, path: &Path) -> Result<()> {
    let rows: Vec<NodeRow> = x
        .result
        .records
        .iter()
        .map(|r| NodeRow {
            node_id: r.node,
            arrival: r.arrival,
            final_degree: r.final_degree,
            rank: r.rank,
            rank_arrival_diff: r.rank_arrival_diff,
        })
        .collect();
    write_rows(path, &rows)
}

#[derive(Serialize)]
struct ManifestRun {
    model: Model,
    beta: f64,
    r: Option<u32>,
    run: u32,
    seed: u64,
    rci: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    /// Experiment parameters; worker count and output directory are left out
    /// because the outputs do not depend on them.
    config: serde_json::Value,
    conventions: Vec<(&'static str, &'static str)>,
    files: &'a [String],
    runs: Vec<ManifestRun>,
}

/// Modelling choices that affect the numbers, recorded next to the outputs.
pub const CONVENTIONS: [(&str, &str); 8] = [
    ("rng", "ChaCha8 seeded per run; uniform = (next_u64 >> 11) * 2^-53"),
    ("seed_derivation", "chained SplitMix64 over (base_seed, stream, beta index, r index, run)"),
    ("seed_graph", "clique of n0 nodes; m = 1 gives two connected nodes"),
    ("warmup", "pure preferential attachment while step < r"),
    ("rank_ties", "equal degree ranked by earlier arrival"),
    ("table1_pa_row", "beta = 0 grid runs"),
    ("table2_pa_row", "reference preferential-attachment runs"),
    ("discretization", drpa_core::fitdist::DISCRETIZATION),
];

fn experiment_parameters(cfg: &ExperimentConfig) -> serde_json::Value {
    let mut value = serde_json::to_value(cfg).unwrap_or_default();
    if let Some(map) = value.as_object_mut() {
        map.remove("workers");
        if let Some(out) = map.get_mut("outputs").and_then(|o| o.as_object_mut()) {
            out.remove("dir");
        }
    }
    value
}

pub fn write_manifest(report: &AggregateReport, files: &[String], path: &Path) -> Result<()> {
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        config: experiment_parameters(&report.config),
        conventions: CONVENTIONS.to_vec(),
        files,
        runs: report
            .runs
            .iter()
            .map(|x| ManifestRun {
                model: x.spec.model,
                beta: x.spec.beta,
                r: x.spec.r,
                run: x.spec.run,
                seed: x.spec.seed,
                rci: x.result.rci,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|source| HarnessError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(HarnessError::io(path))
}

/// Writes every output enabled in the report's config into `dir`.
///
/// Returns the written paths. The bytes depend only on the configuration.
pub fn emit_all(report: &AggregateReport, dir: &Path) -> Result<Vec<PathBuf>> {
    if report.runs.is_empty() {
        return Err(incomplete("no runs to report"));
    }
    fs::create_dir_all(dir).map_err(HarnessError::io(dir))?;
    let out = &report.config.outputs;
    let mut names = Vec::new();
    let mut emit = |name: String, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        f(&dir.join(&name))?;
        names.push(name);
        Ok(())
    };
    if out.table1 {
        emit("table1.csv".into(), &|p| write_table1(report, p))?;
    }
    if out.table2 {
        emit("table2.csv".into(), &|p| write_table2(report, p))?;
    }
    if out.table3 {
        emit("table3.csv".into(), &|p| write_table3(report, p))?;
    }
    for fig in &out.figures {
        emit(fig.file_name(), &|p| write_rows(p, &fig.rows(report)?))?;
    }
    if out.runs {
        for x in &report.runs {
            emit(run_file_name(x), &|p| write_run(x, p))?;
        }
    }
    let manifest = "manifest.json".to_string();
    names.push(manifest.clone());
    write_manifest(report, &names, &dir.join(&manifest))?;
    Ok(names.iter().map(|n| dir.join(n)).collect())
}
