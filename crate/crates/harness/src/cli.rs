//! Command-line interface.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use drpa_core::analytic::{self, AsymptoticModel};
use drpa_core::fitdist::{fit_report, FitReport};
use drpa_core::growth::{grow, KernelConfig, Trajectories};
use drpa_core::metrics::{degree_stats, rci};

use crate::config::{ExperimentConfig, FitMode};
use crate::emit;
use crate::error::{HarnessError, Result};
use crate::figures::Figure;
use crate::runner::{run_experiment, Model, RunRecord, RunSpec};

#[derive(Debug, Parser)]
#[command(name = "drpa", version, about = "Degree-recency-biased preferential attachment experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Grow one network and write its node records.
    Grow(GrowArgs),
    /// Run a (beta, r) grid and write tables, figure data and per-run records.
    Sweep(SweepArgs),
    /// Fit power-law, log-normal and exponential tails to a degree sample.
    Fit(FitArgs),
    /// Integrate the continuum equations and check the asymptotic shares.
    Analytic(AnalyticArgs),
    /// Rank correlation index of an (arrival, rank) table.
    Rci(RciArgs),
}

#[derive(Debug, Args)]
pub struct GrowArgs {
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub r: u32,
    #[arg(long, default_value_t = 1)]
    pub m: u32,
    #[arg(long, default_value_t = 1000)]
    pub nodes: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Node-record CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// JSON experiment config; flags below override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub betas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub rs: Option<Vec<u32>>,
    #[arg(long)]
    pub runs: Option<u32>,
    #[arg(long)]
    pub nodes: Option<u32>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, value_enum)]
    pub fit_mode: Option<FitModeArg>,
    /// Figures to write, comma separated; `none` writes no figures.
    #[arg(long, value_delimiter = ',')]
    pub figures: Option<Vec<String>>,
    /// Tables to write, comma separated from 1, 2, 3; `none` writes no tables.
    #[arg(long, value_delimiter = ',')]
    pub tables: Option<Vec<String>>,
    /// Skip the per-run record files.
    #[arg(long)]
    pub no_run_files: bool,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum FitModeArg {
    Pooled,
    PerRun,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// CSV with a `final_degree` or `degree` column, or one degree per line.
    #[arg(long)]
    pub input: PathBuf,
    /// JSON report; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyticArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub c1: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub c2: Vec<f64>,
    /// Decay rate of the recent-degree term.
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub m: f64,
    #[arg(long, default_value_t = 200.0)]
    pub horizon: f64,
}

#[derive(Debug, Args)]
pub struct RciArgs {
    /// CSV with `arrival` and `rank` columns.
    #[arg(long)]
    pub input: PathBuf,
}

/// Parses `args` and runs the command, writing human output to `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            HarnessError::Help(e.to_string())
        }
        _ => HarnessError::Config(e.to_string()),
    })?;
    match cli.command {
        Command::Grow(a) => cmd_grow(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, stdout),
        Command::Fit(a) => cmd_fit(a, stdout),
        Command::Analytic(a) => cmd_analytic(a, stdout),
        Command::Rci(a) => cmd_rci(a, stdout),
    }
}

fn say(out: &mut dyn Write, text: &str) -> Result<()> {
    writeln!(out, "{text}").map_err(HarnessError::io("<stdout>"))
}

fn cmd_grow(a: GrowArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = KernelConfig::new(a.beta, a.r).with_m(a.m).with_seed(a.seed);
    cfg.validate()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let wrap = |source| HarnessError::Run {
        beta: a.beta,
        r: a.r,
        seed: a.seed,
        source,
    };
    let (_, result) = grow(&cfg, a.nodes, &Trajectories::None).map_err(wrap)?;
    let stats = degree_stats(&result.degrees()).map_err(wrap)?;
    let record = RunRecord {
        spec: RunSpec {
            model: Model::Drpa,
            beta: a.beta,
            r: Some(a.r),
            beta_index: 0,
            r_index: 0,
            run: 0,
            seed: a.seed,
        },
        result,
        stats,
    };
    match &a.out {
        Some(path) => {
            emit::write_run(&record, path)?;
            say(
                out,
                &format!(
                    "nodes={} rci={} max_degree={} variance={}",
                    record.result.node_count(),
                    record.result.rci,
                    stats.max,
                    stats.variance
                ),
            )
        }
        None => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["node_id", "arrival", "final_degree", "rank", "rank_arrival_diff"])
                .map_err(HarnessError::csv("<stdout>"))?;
            for r in &record.result.records {
                w.write_record([
                    r.node.to_string(),
                    r.arrival.to_string(),
                    r.final_degree.to_string(),
                    r.rank.to_string(),
                    r.rank_arrival_diff.to_string(),
                ])
                .map_err(HarnessError::csv("<stdout>"))?;
            }
            let bytes = w
                .into_inner()
                .map_err(|e| HarnessError::InvalidInput(e.to_string()))?;
            out.write_all(&bytes).map_err(HarnessError::io("<stdout>"))
        }
    }
}

fn sweep_config(a: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(v) = &a.betas {
        cfg.betas = v.clone();
    }
    if let Some(v) = &a.rs {
        cfg.rs = v.clone();
    }
    if let Some(v) = a.runs {
        cfg.runs_per_config = v;
    }
    if let Some(v) = a.nodes {
        cfg.target_n = v;
    }
    if let Some(v) = a.m {
        cfg.m = v;
    }
    if let Some(v) = a.seed {
        cfg.base_seed = v;
    }
    if let Some(v) = a.workers {
        cfg.workers = v;
    }
    if let Some(v) = a.fit_mode {
        cfg.fit_mode = match v {
            FitModeArg::Pooled => FitMode::Pooled,
            FitModeArg::PerRun => FitMode::PerRun,
        };
    }
    if let Some(v) = &a.figures {
        cfg.outputs.figures = if v.len() == 1 && v[0] == "none" {
            Vec::new()
        } else {
            v.iter().map(|s| s.parse::<Figure>()).collect::<Result<_>>()?
        };
    }
    if let Some(v) = &a.tables {
        let out = &mut cfg.outputs;
        out.table1 = false;
        out.table2 = false;
        out.table3 = false;
        for t in v.iter().filter(|t| t.as_str() != "none") {
            match t.as_str() {
                "1" => out.table1 = true,
                "2" => out.table2 = true,
                "3" => out.table3 = true,
                other => return Err(HarnessError::InvalidInput(format!("unknown table {other:?}"))),
            }
        }
    }
    if a.no_run_files {
        cfg.outputs.runs = false;
    }
    if let Some(v) = &a.out_dir {
        cfg.outputs.dir = v.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let cfg = sweep_config(&a)?;
    let report = run_experiment(&cfg)?;
    let files = emit::emit_all(&report, &cfg.outputs.dir)?;
    for s in &report.summaries {
        say(
            out,
            &format!(
                "beta={} r={} runs={} rci_mean={:.4} max_degree_mean={:.2}",
                s.beta,
                s.r.unwrap_or(0),
                s.runs,
                s.rci.mean,
                s.degree.max
            ),
        )?;
    }
    if let Some(s) = &report.pa_summary {
        say(
            out,
            &format!("PA runs={} rci_mean={:.4} max_degree_mean={:.2}", s.runs, s.rci.mean, s.degree.max),
        )?;
    }
    say(
        out,
        &format!("wrote {} files to {}", files.len(), cfg.outputs.dir.display()),
    )
}

fn read_degrees(path: &Path) -> Result<Vec<u32>> {
    let text = std::fs::read_to_string(path).map_err(HarnessError::io(path))?;
    let bad = |line: usize, what: &str| {
        HarnessError::InvalidInput(format!("{}:{line}: {what}", path.display()))
    };
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((_, first)) = lines.next() else {
        return Err(bad(1, "empty file"));
    };
    let header: Vec<&str> = first.split(',').map(str::trim).collect();
    let (column, mut values) = match header
        .iter()
        .position(|h| *h == "final_degree" || *h == "degree")
    {
        Some(c) => (c, Vec::new()),
        None => {
            let v = header[0]
                .parse::<u32>()
                .map_err(|_| bad(1, "expected a `final_degree` or `degree` column"))?;
            (0, vec![v])
        }
    };
    for (i, line) in lines {
        let field = line
            .split(',')
            .nth(column)
            .ok_or_else(|| bad(i + 1, "missing degree field"))?;
        values.push(
            field
                .trim()
                .parse::<u32>()
                .map_err(|_| bad(i + 1, "degree is not a non-negative integer"))?,
        );
    }
    Ok(values)
}

#[derive(Serialize)]
struct FitOutput {
    samples: usize,
    report: FitReport,
}

fn write_json<T: Serialize>(value: &T, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let label = path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf);
    let mut text = serde_json::to_string_pretty(value).map_err(|source| HarnessError::Json {
        path: label.clone(),
        source,
    })?;
    text.push('\n');
    match path {
        Some(p) => std::fs::write(p, text).map_err(HarnessError::io(p)),
        None => out.write_all(text.as_bytes()).map_err(HarnessError::io(label)),
    }
}

fn cmd_fit(a: FitArgs, out: &mut dyn Write) -> Result<()> {
    let degrees = read_degrees(&a.input)?;
    let report = fit_report(&degrees)?;
    write_json(
        &FitOutput {
            samples: degrees.len(),
            report,
        },
        a.out.as_deref(),
        out,
    )
}

#[derive(Serialize)]
struct AnalyticOutput {
    beta_threshold: f64,
    crossover_exists: bool,
    crossover_time: Option<f64>,
    horizon: f64,
    max_discrepancy: f64,
    steps: usize,
    final_probabilities: Vec<f64>,
    asymptotic_probabilities: Vec<f64>,
}

fn cmd_analytic(a: AnalyticArgs, out: &mut dyn Write) -> Result<()> {
    let model = AsymptoticModel {
        c1: a.c1,
        c2: a.c2,
        alpha_decay: a.alpha,
        beta: a.beta,
        m: a.m,
    };
    model
        .validate()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    let report = analytic::validate_asymptotics(&model, a.horizon)?;
    let asymptotic = (0..model.len())
        .map(|i| analytic::asymptotic_p(&model, i, a.horizon))
        .collect::<drpa_core::Result<Vec<_>>>()?;
    let output = AnalyticOutput {
        beta_threshold: analytic::beta_threshold(model.c1_total(), model.c2_total())?,
        crossover_exists: analytic::dominance_crossover_exists(&model)?,
        crossover_time: analytic::dominance_crossover(&model)?,
        horizon: report.horizon,
        max_discrepancy: report.max_discrepancy,
        steps: report.steps,
        final_probabilities: report.final_probabilities,
        asymptotic_probabilities: asymptotic,
    };
    write_json(&output, None, out)
}

#[derive(serde::Deserialize)]
struct RankRow {
    arrival: u32,
    rank: u32,
}

fn cmd_rci(a: RciArgs, out: &mut dyn Write) -> Result<()> {
    let mut reader = csv::Reader::from_path(&a.input).map_err(HarnessError::csv(&a.input))?;
    let mut arrivals = Vec::new();
    let mut ranks = Vec::new();
    for row in reader.deserialize::<RankRow>() {
        let row = row.map_err(|e| HarnessError::InvalidInput(format!("{}: {e}", a.input.display())))?;
        arrivals.push(row.arrival);
        ranks.push(row.rank);
    }
    let value = rci(&arrivals, &ranks)?;
    say(out, &format!("{value}"))
}
