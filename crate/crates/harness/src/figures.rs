//! Figure data series. Each figure is one long-format CSV.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use drpa_core::metrics::{max_arrival_in_top_fraction, max_window_gain, top_count};

use crate::error::{HarnessError, Result};
use crate::runner::{AggregateReport, Model, RunRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    /// RCI per run, ordered by r then beta.
    RciByR,
    /// RCI per run, ordered by beta then r.
    RciByBeta,
    /// Rank-arrival difference of the top 10% nodes.
    RankArrivalTop10pct,
    /// Latest arrival among the top 1% nodes.
    MaxArrivalTop1pct,
    /// Arrival against rank for the top 5% nodes.
    ArrivalByRankTop5pct,
    /// Degree events of the tracked top nodes.
    Trajectories,
    /// Largest degree gain of tracked nodes within the burst window.
    TrajectoryBursts,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::RciByR,
        Figure::RciByBeta,
        Figure::RankArrivalTop10pct,
        Figure::MaxArrivalTop1pct,
        Figure::ArrivalByRankTop5pct,
        Figure::Trajectories,
        Figure::TrajectoryBursts,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Figure::RciByR => "rci_by_r",
            Figure::RciByBeta => "rci_by_beta",
            Figure::RankArrivalTop10pct => "rank_arrival_top10pct",
            Figure::MaxArrivalTop1pct => "max_arrival_top1pct",
            Figure::ArrivalByRankTop5pct => "arrival_by_rank_top5pct",
            Figure::Trajectories => "trajectories",
            Figure::TrajectoryBursts => "trajectory_bursts",
        }
    }

    pub fn file_name(self) -> String {
        format!("fig_{}.csv", self.name())
    }

    /// Rows of this figure, in a stable order.
    pub fn rows(self, report: &AggregateReport) -> Result<Vec<FigureRow>> {
        let mut rows = Vec::new();
        match self {
            Figure::RciByR | Figure::RciByBeta => {
                let mut runs: Vec<&RunRecord> = report.runs.iter().collect();
                if self == Figure::RciByR {
                    // stable sort keeps beta and run order within each r
                    runs.sort_by_key(|x| x.spec.r.map_or(0, |r| r + 1));
                }
                rows.extend(runs.into_iter().map(|x| FigureRow::new(x).rci(x.result.rci)));
            }
            Figure::RankArrivalTop10pct | Figure::ArrivalByRankTop5pct => {
                let fraction = if self == Figure::RankArrivalTop10pct { 0.10 } else { 0.05 };
                for x in &report.runs {
                    let k = top_count(x.result.node_count(), fraction);
                    for rec in x.result.by_rank().into_iter().take(k) {
                        let mut row = FigureRow::new(x);
                        row.rank = Some(rec.rank);
                        row.node = Some(rec.node);
                        row.arrival = Some(rec.arrival);
                        if self == Figure::RankArrivalTop10pct {
                            row.rank_arrival_diff = Some(rec.rank_arrival_diff);
                        }
                        rows.push(row);
                    }
                }
            }
            Figure::MaxArrivalTop1pct => {
                for x in &report.runs {
                    let mut row = FigureRow::new(x);
                    row.arrival = Some(max_arrival_in_top_fraction(&x.result, 0.01)?);
                    rows.push(row);
                }
            }
            Figure::Trajectories | Figure::TrajectoryBursts => {
                let window = report.config.burst_window;
                for x in &report.runs {
                    let by_node = x.result.records.iter();
                    for (&node, events) in &x.result.trajectories {
                        let rank = by_node.clone().find(|r| r.node == node).map(|r| r.rank);
                        if self == Figure::Trajectories {
                            for e in events {
                                let mut row = FigureRow::new(x);
                                row.node = Some(node);
                                row.rank = rank;
                                row.step = Some(e.step);
                                row.degree = Some(e.degree);
                                rows.push(row);
                            }
                        } else {
                            let mut row = FigureRow::new(x);
                            row.node = Some(node);
                            row.rank = rank;
                            row.window = Some(window);
                            row.degree = Some(max_window_gain(events, window));
                            rows.push(row);
                        }
                    }
                }
            }
        }
        Ok(rows)
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| HarnessError::InvalidInput(format!("unknown figure {s:?}")))
    }
}

/// One long-format row. Columns a figure does not use are left empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureRow {
    pub model: Model,
    pub beta: f64,
    pub r: Option<u32>,
    pub run: u32,
    pub seed: u64,
    pub rci: Option<f64>,
    pub node: Option<u32>,
    pub rank: Option<u32>,
    pub arrival: Option<u32>,
    pub rank_arrival_diff: Option<i64>,
    pub step: Option<u32>,
    pub window: Option<u32>,
    /// Degree for trajectories, burst gain for the burst figure.
    pub degree: Option<u32>,
}

impl FigureRow {
    fn new(x: &RunRecord) -> Self {
        FigureRow {
            model: x.spec.model,
            beta: x.spec.beta,
            r: x.spec.r,
            run: x.spec.run,
            seed: x.spec.seed,
            rci: None,
            node: None,
            rank: None,
            arrival: None,
            rank_arrival_diff: None,
            step: None,
            window: None,
            degree: None,
        }
    }

    fn rci(mut self, rci: f64) -> Self {
        self.rci = Some(rci);
        self
    }
}
