use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::figures::Figure;

pub const DEFAULT_BETAS: [f64; 12] = [0.0, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0];
pub const DEFAULT_RS: [u32; 4] = [5, 20, 50, 100];

/// How `table3.csv` degree samples are formed for each beta.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FitMode {
    /// One fit on the degrees of every run and every r at that beta.
    #[default]
    Pooled,
    /// One fit per run; ratios and p-values are averaged.
    PerRun,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub table1: bool,
    pub table2: bool,
    pub table3: bool,
    pub figures: Vec<Figure>,
    /// Per-run node records, one CSV per run.
    pub runs: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("drpa-out"),
            table1: true,
            table2: true,
            table3: true,
            figures: Figure::ALL.to_vec(),
            runs: true,
        }
    }
}

/// A (beta, r) sweep. The JSON config file uses these field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub betas: Vec<f64>,
    pub rs: Vec<u32>,
    pub runs_per_config: u32,
    pub target_n: u32,
    pub m: u32,
    pub base_seed: u64,
    pub outputs: OutputConfig,
    pub trajectory_top_k: usize,
    /// Also grow `runs_per_config` reference PA networks for the PA rows.
    pub pa_baseline: bool,
    pub fit_mode: FitMode,
    /// Window, in steps, for the degree-burst measure.
    pub burst_window: u32,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            betas: DEFAULT_BETAS.to_vec(),
            rs: DEFAULT_RS.to_vec(),
            runs_per_config: 50,
            target_n: 1000,
            m: 1,
            base_seed: 20_240_101,
            outputs: OutputConfig::default(),
            trajectory_top_k: 5,
            pa_baseline: true,
            fit_mode: FitMode::Pooled,
            burst_window: 10,
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.betas.is_empty() || self.rs.is_empty() {
            return bad("the beta and r grids must be nonempty".into());
        }
        if let Some(b) = self.betas.iter().find(|b| !(0.0..=1.0).contains(*b)) {
            return bad(format!("beta {b} is outside [0, 1]"));
        }
        if self.rs.contains(&0) {
            return bad("r values must be positive".into());
        }
        if self.runs_per_config == 0 {
            return bad("runs_per_config must be at least 1".into());
        }
        if self.m == 0 {
            return bad("m must be at least 1".into());
        }
        if self.target_n <= self.m.max(1) + 1 {
            return bad(format!("target_n = {} is too small", self.target_n));
        }
        if self.burst_window == 0 {
            return bad("burst_window must be positive".into());
        }
        Ok(())
    }

    pub fn grid_size(&self) -> usize {
        self.betas.len() * self.rs.len()
    }

    pub fn total_runs(&self) -> usize {
        let pa = if self.pa_baseline { 1 } else { 0 };
        (self.grid_size() + pa) * self.runs_per_config as usize
    }
}
