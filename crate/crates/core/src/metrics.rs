//! Rank and arrival statistics on finished networks.
//!
//! Ranks are by descending degree with ties broken by earlier arrival, so rank 1
//! is the highest-degree node. The rank-arrival difference is `arrival - rank`:
//! positive values mark late arrivals that climbed.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::growth::{DegreeEvent, GrowthNetwork, KernelConfig};
use crate::{Error, NodeId, Result};

/// Final state of one node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NodeRecord {
    pub node: NodeId,
    pub arrival: u32,
    pub final_degree: u32,
    pub rank: u32,
    pub rank_arrival_diff: i64,
}

/// Per-node records of a finished run plus its rank change index.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RunResult {
    /// Ordered by node id (equivalently, arrival).
    pub records: Vec<NodeRecord>,
    pub rci: f64,
    pub trajectories: BTreeMap<NodeId, Vec<DegreeEvent>>,
    pub config: KernelConfig,
}

impl RunResult {
    pub fn from_network(net: &GrowthNetwork, config: &KernelConfig) -> Result<Self> {
        let degrees = net.degrees();
        let arrivals: Vec<u32> = (1..=net.node_count()).collect();
        let ranks = rank_by_degree(degrees, &arrivals)?;
        let records = arrivals
            .iter()
            .zip(degrees)
            .zip(&ranks)
            .map(|((&arrival, &final_degree), &rank)| NodeRecord {
                node: arrival,
                arrival,
                final_degree,
                rank,
                rank_arrival_diff: rank_arrival_difference(arrival, rank),
            })
            .collect();
        Ok(RunResult {
            records,
            rci: rci(&arrivals, &ranks)?,
            trajectories: BTreeMap::new(),
            config: *config,
        })
    }

    pub fn node_count(&self) -> usize {
        self.records.len()
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.records.iter().map(|r| r.final_degree).collect()
    }

    /// Records sorted by rank.
    pub fn by_rank(&self) -> Vec<NodeRecord> {
        let mut sorted = self.records.clone();
        sorted.sort_unstable_by_key(|r| r.rank);
        sorted
    }

    /// Ids of the `k` best-ranked nodes, best first.
    pub fn top_nodes(&self, k: usize) -> Vec<NodeId> {
        self.by_rank().iter().take(k).map(|r| r.node).collect()
    }
}

/// Degree ranks (1 = highest degree); equal degrees rank by earlier arrival.
pub fn rank_by_degree(degrees: &[u32], arrivals: &[u32]) -> Result<Vec<u32>> {
    if degrees.is_empty() {
        return Err(Error::InvalidInput("no degrees to rank".into()));
    }
    if degrees.len() != arrivals.len() {
        return Err(Error::InvalidInput(format!(
            "{} degrees but {} arrivals",
            degrees.len(),
            arrivals.len()
        )));
    }
    let mut order: Vec<usize> = (0..degrees.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        degrees[b]
            .cmp(&degrees[a])
            .then(arrivals[a].cmp(&arrivals[b]))
    });
    let mut ranks = vec![0u32; degrees.len()];
    for (pos, &idx) in order.iter().enumerate() {
        ranks[idx] = pos as u32 + 1;
    }
    Ok(ranks)
}

pub fn rank_arrival_difference(arrival: u32, rank: u32) -> i64 {
    i64::from(arrival) - i64::from(rank)
}

fn check_permutation(values: &[u32], what: &str) -> Result<()> {
    let n = values.len();
    let mut seen = vec![false; n];
    for &v in values {
        let slot = (v as usize).checked_sub(1).filter(|&i| i < n);
        match slot {
            Some(i) if !seen[i] => seen[i] = true,
            _ => {
                return Err(Error::InvalidInput(format!(
                    "{what} are not a permutation of 1..={n}"
                )))
            }
        }
    }
    Ok(())
}

/// Rank change index: `sum_n |n - rank_n|` over `sum_{m=1..N} |m - (N - m)|`.
///
/// The denominator is taken literally as written, so a full reversal scores
/// exactly 1 for even `N` and slightly less for odd `N`.
pub fn rci(arrivals: &[u32], ranks: &[u32]) -> Result<f64> {
    if arrivals.len() != ranks.len() {
        return Err(Error::InvalidInput("arrival and rank lengths differ".into()));
    }
    if arrivals.len() < 2 {
        return Err(Error::InvalidInput("RCI needs at least two nodes".into()));
    }
    check_permutation(arrivals, "arrivals")?;
    check_permutation(ranks, "ranks")?;
    let n = arrivals.len() as i64;
    let numerator: i64 = arrivals
        .iter()
        .zip(ranks)
        .map(|(&a, &r)| (i64::from(a) - i64::from(r)).abs())
        .sum();
    let denominator: i64 = (1..=n).map(|m| (m - (n - m)).abs()).sum();
    Ok(numerator as f64 / denominator as f64)
}

/// Position-wise mean arrival of the rank-1..=k nodes across runs.
pub fn top_k_arrivals(results: &[RunResult], k: usize) -> Result<Vec<f64>> {
    if results.is_empty() {
        return Err(Error::InvalidInput("no runs to average".into()));
    }
    let mut sums = vec![0.0; k];
    for result in results {
        if result.node_count() < k {
            return Err(Error::InvalidInput(format!(
                "run has {} nodes, fewer than k = {k}",
                result.node_count()
            )));
        }
        for (slot, rec) in sums.iter_mut().zip(result.by_rank()) {
            *slot += f64::from(rec.arrival);
        }
    }
    let runs = results.len() as f64;
    Ok(sums.into_iter().map(|s| s / runs).collect())
}

/// Number of nodes in the top `fraction` of `n`, rounded up.
pub fn top_count(n: usize, fraction: f64) -> usize {
    // guard against 0.01 * 1000 landing a hair above 10
    let count = libm::ceil(fraction * n as f64 - 1e-9) as usize;
    count.clamp(1, n)
}

/// Latest arrival among the top `ceil(fraction * N)` ranked nodes.
pub fn max_arrival_in_top_fraction(result: &RunResult, fraction: f64) -> Result<u32> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "fraction must lie in (0, 1], got {fraction}"
        )));
    }
    let count = top_count(result.node_count(), fraction);
    result
        .records
        .iter()
        .filter(|r| (r.rank as usize) <= count)
        .map(|r| r.arrival)
        .max()
        .ok_or_else(|| Error::InvalidInput("empty run".into()))
}

/// Degree-distribution moments with population variance and `g1` skewness.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DegreeStats {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub variance: f64,
    pub skewness: f64,
    /// Zero variance; skewness is reported as 0.
    pub degenerate: bool,
}

pub fn degree_stats(degrees: &[u32]) -> Result<DegreeStats> {
    if degrees.is_empty() {
        return Err(Error::InvalidInput("no degrees".into()));
    }
    let n = degrees.len() as f64;
    let mean = degrees.iter().map(|&d| f64::from(d)).sum::<f64>() / n;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &d in degrees {
        let dev = f64::from(d) - mean;
        m2 += dev * dev;
        m3 += dev * dev * dev;
    }
    m2 /= n;
    m3 /= n;
    let degenerate = m2 == 0.0;
    let skewness = if degenerate { 0.0 } else { m3 / libm::pow(m2, 1.5) };
    Ok(DegreeStats {
        mean,
        min: f64::from(*degrees.iter().min().unwrap()),
        max: f64::from(*degrees.iter().max().unwrap()),
        variance: m2,
        skewness,
        degenerate,
    })
}

/// Full degree log of `node`.
pub fn record_trajectory(net: &GrowthNetwork, node: NodeId) -> Result<Vec<DegreeEvent>> {
    net.events(node).map(|e| e.to_vec())
}

/// Largest degree gained inside any span of `window` consecutive steps.
///
/// Used as the burst measure when comparing recency spans.
pub fn max_window_gain(trajectory: &[DegreeEvent], window: u32) -> u32 {
    let mut best = 0;
    let mut start = 0;
    for e in trajectory {
        while trajectory[start].step + window <= e.step {
            start += 1;
        }
        // degree held just before the window opened
        let base = if start == 0 {
            0
        } else {
            trajectory[start - 1].degree
        };
        best = best.max(e.degree - base);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank_by_degree(&[5, 3, 3, 1], &[1, 2, 3, 4]).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(rank_by_degree(&[2, 2, 2], &[1, 2, 3]).unwrap(), vec![1, 2, 3]);
        assert_eq!(rank_by_degree(&[1, 9], &[1, 2]).unwrap(), vec![2, 1]);
        assert!(rank_by_degree(&[1, 2], &[1]).is_err());
        assert!(rank_by_degree(&[], &[]).is_err());
    }

    #[test]
    fn rank_arrival_examples() {
        assert_eq!(rank_arrival_difference(100, 10), 90);
        assert_eq!(rank_arrival_difference(1, 1), 0);
        assert_eq!(rank_arrival_difference(10, 100), -90);
    }

    #[test]
    fn rci_examples() {
        let id: Vec<u32> = (1..=10).collect();
        assert_eq!(rci(&id, &id).unwrap(), 0.0);
        assert_eq!(rci(&[1, 2, 3, 4], &[4, 3, 2, 1]).unwrap(), 1.0);
        assert!(rci(&[1, 2, 3], &[1, 1, 3]).is_err());
        assert!(rci(&[1, 2, 4], &[1, 2, 3]).is_err());
        assert!(rci(&[1], &[1]).is_err());
    }

    #[test]
    fn reversal_is_one_for_even_n() {
        for n in (2..=400u32).step_by(2) {
            let arrivals: Vec<u32> = (1..=n).collect();
            let reversed: Vec<u32> = (1..=n).rev().collect();
            assert_eq!(rci(&arrivals, &reversed).unwrap(), 1.0, "n = {n}");
        }
    }

    #[test]
    fn reversal_odd_n_matches_printed_denominator() {
        for n in (3..=99u32).step_by(2) {
            let arrivals: Vec<u32> = (1..=n).collect();
            let reversed: Vec<u32> = (1..=n).rev().collect();
            let num = f64::from(n * n - 1) / 2.0;
            let den: i64 = (1..=i64::from(n)).map(|m| (2 * m - i64::from(n)).abs()).sum();
            assert_eq!(rci(&arrivals, &reversed).unwrap(), num / den as f64);
            assert!(num / (den as f64) < 1.0);
        }
    }

    fn run_with(degrees: &[u32]) -> RunResult {
        let arrivals: Vec<u32> = (1..=degrees.len() as u32).collect();
        let ranks = rank_by_degree(degrees, &arrivals).unwrap();
        RunResult {
            records: arrivals
                .iter()
                .zip(degrees)
                .zip(&ranks)
                .map(|((&a, &d), &r)| NodeRecord {
                    node: a,
                    arrival: a,
                    final_degree: d,
                    rank: r,
                    rank_arrival_diff: rank_arrival_difference(a, r),
                })
                .collect(),
            rci: rci(&arrivals, &ranks).unwrap(),
            trajectories: BTreeMap::new(),
            config: KernelConfig::new(0.0, 5),
        }
    }

    #[test]
    fn top_k_examples() {
        let run = run_with(&[1, 2, 9, 1]);
        assert_eq!(top_k_arrivals(std::slice::from_ref(&run), 1).unwrap(), vec![3.0]);
        let other = run_with(&[1, 9, 2, 1]);
        assert_eq!(top_k_arrivals(&[run, other], 2).unwrap(), vec![2.5, 2.5]);
        assert!(top_k_arrivals(&[], 3).is_err());
        assert!(top_k_arrivals(&[run_with(&[1, 1])], 3).is_err());
    }

    #[test]
    fn max_arrival_examples() {
        let mut degrees = vec![1u32; 1000];
        for (i, node) in [2usize, 5, 40, 77, 150, 300, 420, 610, 800, 900].iter().enumerate() {
            degrees[node - 1] = 50 - i as u32;
        }
        let run = run_with(&degrees);
        assert_eq!(max_arrival_in_top_fraction(&run, 0.01).unwrap(), 900);
        assert_eq!(max_arrival_in_top_fraction(&run, 1.0).unwrap(), 1000);
        assert!(max_arrival_in_top_fraction(&run, 0.0).is_err());
        assert!(max_arrival_in_top_fraction(&run, 1.5).is_err());
        assert_eq!(top_count(1000, 0.01), 10);
        assert_eq!(top_count(1000, 0.05), 50);
        assert_eq!(top_count(1000, 0.1), 100);
    }

    #[test]
    fn degree_stats_examples() {
        let flat = degree_stats(&[2, 2, 2, 2]).unwrap();
        assert_eq!(flat.variance, 0.0);
        assert_eq!(flat.skewness, 0.0);
        assert!(flat.degenerate);

        // deviations -1, -1, -1, 3: m2 = 12/4 = 3, m3 = 24/4 = 6, g1 = 6 / 3^1.5
        let s = degree_stats(&[1, 1, 1, 5]).unwrap();
        assert_eq!((s.max, s.min, s.mean, s.variance), (5.0, 1.0, 2.0, 3.0));
        assert!((s.skewness - 1.154_700_538_379_251_5).abs() < 1e-12);
        assert!(!s.degenerate);
        assert!(degree_stats(&[]).is_err());
    }

    #[test]
    fn window_gain() {
        let t = |v: &[(u32, u32)]| -> Vec<DegreeEvent> {
            v.iter().map(|&(step, degree)| DegreeEvent { step, degree }).collect()
        };
        let traj = t(&[(10, 1), (11, 2), (12, 3), (40, 4), (41, 5)]);
        assert_eq!(max_window_gain(&traj, 3), 3);
        assert_eq!(max_window_gain(&traj, 2), 2);
        assert_eq!(max_window_gain(&traj, 100), 5);
        assert_eq!(max_window_gain(&t(&[(10, 1)]), 5), 1);
    }

    fn brute_moments(x: &[u32]) -> (f64, f64) {
        let n = x.len() as f64;
        let mean = x.iter().map(|&v| v as f64).sum::<f64>() / n;
        let var = x.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / n;
        let m3 = x.iter().map(|&v| (v as f64 - mean).powi(3)).sum::<f64>() / n;
        (var, if var == 0.0 { 0.0 } else { m3 / var.powf(1.5) })
    }

    proptest! {
        #[test]
        fn rank_arrival_sums_to_zero(perm in Just((1..=60u32).collect::<Vec<_>>()).prop_shuffle()) {
            let arrivals: Vec<u32> = (1..=60).collect();
            let total: i64 = arrivals.iter().zip(&perm).map(|(&a, &r)| rank_arrival_difference(a, r)).sum();
            prop_assert_eq!(total, 0);
            prop_assert!(rci(&arrivals, &perm).unwrap() >= 0.0);
        }

        #[test]
        fn ranking_ignores_input_order(degrees in proptest::collection::vec(1u32..20, 1..50), seed in any::<u64>()) {
            let arrivals: Vec<u32> = (1..=degrees.len() as u32).collect();
            let ranks = rank_by_degree(&degrees, &arrivals).unwrap();
            let mut idx: Vec<usize> = (0..degrees.len()).collect();
            // deterministic shuffle from the seed
            let mut s = seed;
            for i in (1..idx.len()).rev() {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                idx.swap(i, (s >> 33) as usize % (i + 1));
            }
            let d2: Vec<u32> = idx.iter().map(|&i| degrees[i]).collect();
            let a2: Vec<u32> = idx.iter().map(|&i| arrivals[i]).collect();
            let r2 = rank_by_degree(&d2, &a2).unwrap();
            for (pos, &i) in idx.iter().enumerate() {
                prop_assert_eq!(r2[pos], ranks[i]);
            }
        }

        #[test]
        fn stats_match_two_pass(x in proptest::collection::vec(1u32..200, 1..300)) {
            let s = degree_stats(&x).unwrap();
            let (var, skew) = brute_moments(&x);
            prop_assert!((s.variance - var).abs() <= 1e-12 * var.max(1.0));
            prop_assert!((s.skewness - skew).abs() <= 1e-12 * skew.abs().max(1.0));
            prop_assert!(s.max >= s.mean && s.mean >= s.min);
        }
    }
}
