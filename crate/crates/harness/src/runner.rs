//! Grid execution and aggregation.

use rayon::prelude::*;
use serde::Serialize;

use drpa_core::fitdist::{fit_report, FitReport};
use drpa_core::growth::{grow_with_kernel, Kernel, KernelConfig, Trajectories};
use drpa_core::metrics::{
    degree_stats, max_arrival_in_top_fraction, top_k_arrivals, DegreeStats, RunResult,
};

use crate::config::{ExperimentConfig, FitMode};
use crate::error::{HarnessError, Result};
use crate::seeds::{derive_seed, Stream};

/// Which growth model produced a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Model {
    #[serde(rename = "DRPA")]
    Drpa,
    #[serde(rename = "PA")]
    Pa,
}

/// Coordinates of one run in the experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSpec {
    pub model: Model,
    pub beta: f64,
    /// `None` for the reference PA runs, which have no recency span.
    pub r: Option<u32>,
    pub beta_index: u32,
    pub r_index: u32,
    pub run: u32,
    pub seed: u64,
}

impl RunSpec {
    pub fn kernel_config(&self, cfg: &ExperimentConfig) -> KernelConfig {
        // reference PA ignores r; the smallest grid value keeps the config valid
        let r = self.r.unwrap_or_else(|| cfg.rs.iter().copied().min().unwrap_or(1));
        KernelConfig::new(self.beta, r).with_m(cfg.m).with_seed(self.seed)
    }
}

/// Every run of `cfg`, in grid order: DRPA by (beta, r, run), then reference PA.
pub fn run_specs(cfg: &ExperimentConfig) -> Vec<RunSpec> {
    let mut specs = Vec::with_capacity(cfg.total_runs());
    for (bi, &beta) in cfg.betas.iter().enumerate() {
        for (ri, &r) in cfg.rs.iter().enumerate() {
            for run in 0..cfg.runs_per_config {
                specs.push(RunSpec {
                    model: Model::Drpa,
                    beta,
                    r: Some(r),
                    beta_index: bi as u32,
                    r_index: ri as u32,
                    run,
                    seed: derive_seed(cfg.base_seed, Stream::Drpa, bi as u32, ri as u32, run),
                });
            }
        }
    }
    if cfg.pa_baseline {
        for run in 0..cfg.runs_per_config {
            specs.push(RunSpec {
                model: Model::Pa,
                beta: 0.0,
                r: None,
                beta_index: 0,
                r_index: 0,
                run,
                seed: derive_seed(cfg.base_seed, Stream::PaBaseline, 0, 0, run),
            });
        }
    }
    specs
}

/// A finished run with its degree statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub spec: RunSpec,
    pub result: RunResult,
    pub stats: DegreeStats,
}

/// Grows the network for one spec.
pub fn execute(cfg: &ExperimentConfig, spec: &RunSpec) -> Result<RunRecord> {
    let kernel = match spec.model {
        Model::Drpa => Kernel::Drpa,
        Model::Pa => Kernel::PreferentialAttachment,
    };
    let kcfg = spec.kernel_config(cfg);
    let wrap = |source| HarnessError::Run {
        beta: spec.beta,
        r: kcfg.r,
        seed: spec.seed,
        source,
    };
    let (_, result) = grow_with_kernel(
        &kcfg,
        cfg.target_n,
        &Trajectories::TopByDegree(cfg.trajectory_top_k),
        kernel,
    )
    .map_err(wrap)?;
    let stats = degree_stats(&result.degrees()).map_err(wrap)?;
    Ok(RunRecord {
        spec: *spec,
        result,
        stats,
    })
}

/// Mean, spread and range of a scalar across runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Spread {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl Spread {
    pub fn of(values: impl IntoIterator<Item = f64>) -> Option<Spread> {
        let v: Vec<f64> = values.into_iter().collect();
        if v.is_empty() {
            return None;
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        Some(Spread {
            mean,
            std: var.sqrt(),
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Run means of the per-run degree statistics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanDegreeStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub variance: f64,
    pub skewness: f64,
}

impl MeanDegreeStats {
    pub fn of<'a>(runs: impl IntoIterator<Item = &'a RunRecord>) -> Option<Self> {
        let stats: Vec<&DegreeStats> = runs.into_iter().map(|r| &r.stats).collect();
        if stats.is_empty() {
            return None;
        }
        let n = stats.len() as f64;
        let avg = |f: fn(&DegreeStats) -> f64| stats.iter().map(|s| f(s)).sum::<f64>() / n;
        Some(MeanDegreeStats {
            mean: avg(|s| s.mean),
            min: avg(|s| s.min),
            max: avg(|s| s.max),
            variance: avg(|s| s.variance),
            skewness: avg(|s| s.skewness),
        })
    }
}

/// Aggregates for one (beta, r) pair, or for the reference PA runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigSummary {
    pub model: Model,
    pub beta: f64,
    pub r: Option<u32>,
    pub runs: usize,
    pub rci: Spread,
    pub degree: MeanDegreeStats,
    pub top10_arrivals: Vec<f64>,
    pub max_arrival_top1pct: Vec<u32>,
}

impl ConfigSummary {
    fn from_runs(model: Model, beta: f64, r: Option<u32>, runs: &[&RunRecord]) -> Result<Self> {
        let results: Vec<RunResult> = runs.iter().map(|r| r.result.clone()).collect();
        let k = 10.min(results.iter().map(|r| r.node_count()).min().unwrap_or(0));
        Ok(ConfigSummary {
            model,
            beta,
            r,
            runs: runs.len(),
            rci: Spread::of(runs.iter().map(|r| r.result.rci))
                .ok_or_else(|| HarnessError::IncompleteReport(format!("beta = {beta}")))?,
            degree: MeanDegreeStats::of(runs.iter().copied())
                .ok_or_else(|| HarnessError::IncompleteReport(format!("beta = {beta}")))?,
            top10_arrivals: top_k_arrivals(&results, k)?,
            max_arrival_top1pct: runs
                .iter()
                .map(|r| max_arrival_in_top_fraction(&r.result, 0.01))
                .collect::<drpa_core::Result<_>>()?,
        })
    }
}

/// `table3.csv` entry for one beta.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaFit {
    pub beta: f64,
    pub mode: FitMode,
    /// Degree samples submitted (1 when pooled).
    pub samples: usize,
    /// Samples whose fit succeeded.
    pub fitted: usize,
    pub summary: Option<FitSummary>,
    /// First fit error, if any sample failed.
    pub error: Option<String>,
}

/// Fit values; averages over samples in per-run mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitSummary {
    pub n_tail: f64,
    pub xmin: f64,
    pub alpha: f64,
    pub ks_distance: f64,
    pub power_vs_lognormal: f64,
    pub p_value_lognormal: f64,
    pub power_vs_exponential: f64,
    pub p_value_exponential: f64,
}

impl FitSummary {
    fn mean(reports: &[FitReport]) -> Option<Self> {
        if reports.is_empty() {
            return None;
        }
        let n = reports.len() as f64;
        let avg = |f: fn(&FitReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        Some(FitSummary {
            n_tail: avg(|r| r.n_tail as f64),
            xmin: avg(|r| f64::from(r.xmin)),
            alpha: avg(|r| r.alpha),
            ks_distance: avg(|r| r.ks_distance),
            power_vs_lognormal: avg(|r| r.lr_power_vs_lognormal.ratio),
            p_value_lognormal: avg(|r| r.lr_power_vs_lognormal.p_value),
            power_vs_exponential: avg(|r| r.lr_power_vs_exponential.ratio),
            p_value_exponential: avg(|r| r.lr_power_vs_exponential.p_value),
        })
    }
}

fn fit_beta(beta: f64, mode: FitMode, runs: &[&RunRecord]) -> BetaFit {
    let samples: Vec<Vec<u32>> = match mode {
        FitMode::Pooled => vec![runs.iter().flat_map(|r| r.result.degrees()).collect()],
        FitMode::PerRun => runs.iter().map(|r| r.result.degrees()).collect(),
    };
    let outcomes: Vec<_> = samples.par_iter().map(|s| fit_report(s)).collect();
    let error = outcomes
        .iter()
        .find_map(|o| o.as_ref().err().map(|e| e.to_string()));
    let reports: Vec<FitReport> = outcomes.into_iter().filter_map(|o| o.ok()).collect();
    BetaFit {
        beta,
        mode,
        samples: samples.len(),
        fitted: reports.len(),
        summary: FitSummary::mean(&reports),
        error,
    }
}

/// Everything the emitters need, in deterministic grid order.
#[derive(Debug, Clone)]
pub struct AggregateReport {
    pub config: ExperimentConfig,
    pub runs: Vec<RunRecord>,
    /// One per (beta, r) pair, beta-major.
    pub summaries: Vec<ConfigSummary>,
    /// Reference PA runs, when enabled.
    pub pa_summary: Option<ConfigSummary>,
    /// `table3.csv` fits, one per beta > 0.
    pub fits: Vec<BetaFit>,
}

impl AggregateReport {
    pub fn drpa_runs(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(|r| r.spec.model == Model::Drpa)
    }

    pub fn pa_runs(&self) -> impl Iterator<Item = &RunRecord> {
        self.runs.iter().filter(|r| r.spec.model == Model::Pa)
    }

    /// DRPA runs at `beta`, all r values pooled.
    pub fn runs_at_beta(&self, beta: f64) -> Vec<&RunRecord> {
        self.drpa_runs().filter(|r| r.spec.beta == beta).collect()
    }

    pub fn summary(&self, beta: f64, r: u32) -> Option<&ConfigSummary> {
        self.summaries
            .iter()
            .find(|s| s.beta == beta && s.r == Some(r))
    }

    /// Folds finished runs into per-configuration summaries and fits.
    pub fn assemble(config: ExperimentConfig, runs: Vec<RunRecord>) -> Result<Self> {
        let mut summaries = Vec::with_capacity(config.grid_size());
        for &beta in &config.betas {
            for &r in &config.rs {
                let group: Vec<&RunRecord> = runs
                    .iter()
                    .filter(|x| x.spec.model == Model::Drpa && x.spec.beta == beta && x.spec.r == Some(r))
                    .collect();
                if group.is_empty() {
                    continue;
                }
                summaries.push(ConfigSummary::from_runs(Model::Drpa, beta, Some(r), &group)?);
            }
        }
        let pa: Vec<&RunRecord> = runs.iter().filter(|x| x.spec.model == Model::Pa).collect();
        let pa_summary = if pa.is_empty() {
            None
        } else {
            Some(ConfigSummary::from_runs(Model::Pa, 0.0, None, &pa)?)
        };
        let mut fits = Vec::new();
        for &beta in config.betas.iter().filter(|&&b| b > 0.0) {
            let group: Vec<&RunRecord> = runs
                .iter()
                .filter(|x| x.spec.model == Model::Drpa && x.spec.beta == beta)
                .collect();
            if !group.is_empty() {
                fits.push(fit_beta(beta, config.fit_mode, &group));
            }
        }
        Ok(AggregateReport {
            config,
            runs,
            summaries,
            pa_summary,
            fits,
        })
    }
}

/// Runs every configuration of `cfg` and aggregates the results.
///
/// Runs execute in parallel on `cfg.workers` threads; the report depends only on
/// the configuration, not on the thread count or scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<AggregateReport> {
    cfg.validate()?;
    let specs = run_specs(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    let runs = pool.install(|| {
        specs
            .par_iter()
            .map(|spec| execute(cfg, spec))
            .collect::<Result<Vec<_>>>()
    })?;
    pool.install(|| AggregateReport::assemble(cfg.clone(), runs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            betas: vec![0.0, 0.5],
            rs: vec![5, 20],
            runs_per_config: 3,
            target_n: 120,
            workers: 2,
            ..Default::default()
        }
    }

    #[test]
    fn spec_order_and_count() {
        let cfg = small();
        let specs = run_specs(&cfg);
        assert_eq!(specs.len(), cfg.total_runs());
        assert_eq!(specs.len(), (4 + 1) * 3);
        assert_eq!((specs[0].beta, specs[0].r, specs[0].run), (0.0, Some(5), 0));
        assert_eq!(specs.last().unwrap().model, Model::Pa);
    }

    #[test]
    fn report_independent_of_worker_count() {
        let a = run_experiment(&small()).unwrap();
        let b = run_experiment(&ExperimentConfig { workers: 1, ..small() }).unwrap();
        assert_eq!(a.runs, b.runs);
        assert_eq!(a.summaries, b.summaries);
        assert_eq!(a.fits, b.fits);
        assert_eq!(a.summaries.len(), 4);
        assert!(a.summaries.iter().all(|s| s.runs == 3));
    }

    #[test]
    fn single_run_reproducible_alone() {
        let cfg = small();
        let report = run_experiment(&cfg).unwrap();
        let spec = run_specs(&cfg)[7];
        assert_eq!(execute(&cfg, &spec).unwrap(), report.runs[7]);
    }

    #[test]
    fn spread_basics() {
        let s = Spread::of([1.0, 3.0]).unwrap();
        assert_eq!((s.mean, s.std, s.min, s.max), (2.0, 1.0, 1.0, 3.0));
        assert!(Spread::of([]).is_none());
    }
}
