//! Network growth under the degree-recency-biased attachment kernel.
//!
//! Time is counted in node arrivals. The seed graph is a clique on `n0` nodes
//! built at step `n0`; node `t > n0` arrives at step `t` and attaches `m` edges
//! to distinct existing nodes. Every degree change is logged per node so that
//! `k_i(t - r)` can be looked up exactly for any recency span.
//!
//! # Random stream
//!
//! A run draws from `ChaCha8Rng::seed_from_u64(seed)`. Each attachment consumes
//! one `u64`, mapped to `u = (x >> 11) * 2^-53` in `[0, 1)`. The target is the
//! first node (in id order) whose running weight sum exceeds `u * total`. For
//! `m > 1` the chosen weight is zeroed and the total recomputed before the next
//! draw. Any reimplementation following these rules reproduces the edge lists.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::metrics::RunResult;
use crate::{Error, NodeId, Result, Step};

/// One entry of a node's degree log: the degree held at the end of `step`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DegreeEvent {
    pub step: Step,
    pub degree: u32,
}

/// Kernel used before the recency history is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum WarmupPolicy {
    /// Plain degree-proportional attachment while the current step is below
    /// the given step.
    PurePaUntilStep(Step),
}

impl WarmupPolicy {
    fn in_warmup(&self, current: Step) -> bool {
        match *self {
            WarmupPolicy::PurePaUntilStep(until) => current < until,
        }
    }
}

/// Parameters of one growth process.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct KernelConfig {
    /// Recency bias exponent in `[0, 1]`.
    pub beta: f64,
    /// Recency span in steps.
    pub r: u32,
    /// Edges per arriving node.
    pub m: u32,
    /// Seed clique size.
    pub n0: u32,
    pub warmup: WarmupPolicy,
    pub seed: u64,
}

impl KernelConfig {
    /// One edge per arrival, a two-node seed edge and pure PA for the first `r` steps.
    pub fn new(beta: f64, r: u32) -> Self {
        KernelConfig {
            beta,
            r,
            m: 1,
            n0: 2,
            warmup: WarmupPolicy::PurePaUntilStep(r),
            seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Sets `m` and grows the seed clique to `m + 1` nodes if it is smaller.
    pub fn with_m(mut self, m: u32) -> Self {
        self.m = m;
        self.n0 = self.n0.max(m.saturating_add(1));
        self
    }

    pub fn with_n0(mut self, n0: u32) -> Self {
        self.n0 = n0;
        self
    }

    pub fn with_warmup(mut self, warmup: WarmupPolicy) -> Self {
        self.warmup = warmup;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidConfig(format!(
                "beta must lie in [0, 1], got {}",
                self.beta
            )));
        }
        if self.r == 0 {
            return Err(Error::InvalidConfig("r must be at least 1".into()));
        }
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if self.n0 < 2 || self.n0 <= self.m {
            return Err(Error::InvalidConfig(format!(
                "seed size n0 = {} must be at least 2 and exceed m = {}",
                self.n0, self.m
            )));
        }
        Ok(())
    }
}

/// Which degree logs a run should keep in its [`RunResult`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Trajectories {
    #[default]
    None,
    Nodes(Vec<NodeId>),
    /// The `k` highest-ranked nodes of the finished network.
    TopByDegree(usize),
}

/// Attachment rule driving [`grow_with_kernel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Kernel {
    /// `k_i * R_i`, with the configured warm-up.
    Drpa,
    /// Reference preferential attachment: weights are degrees, history ignored.
    PreferentialAttachment,
}

/// The evolving graph together with its per-node degree logs.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthNetwork {
    degrees: Vec<u32>,
    edges: Vec<(NodeId, NodeId)>,
    events: Vec<Vec<DegreeEvent>>,
    step: Step,
}

impl GrowthNetwork {
    /// Clique on `n0` nodes, built at step `n0`.
    pub fn seed_clique(n0: u32) -> Result<Self> {
        if n0 < 2 {
            return Err(Error::InvalidConfig("seed graph needs at least 2 nodes".into()));
        }
        let mut edges = Vec::new();
        for a in 1..=n0 {
            for b in (a + 1)..=n0 {
                edges.push((a, b));
            }
        }
        let degree = n0 - 1;
        Ok(GrowthNetwork {
            degrees: vec![degree; n0 as usize],
            edges,
            events: (0..n0)
                .map(|_| vec![DegreeEvent { step: n0, degree }])
                .collect(),
            step: n0,
        })
    }

    pub fn node_count(&self) -> u32 {
        self.degrees.len() as u32
    }

    pub fn current_step(&self) -> Step {
        self.step
    }

    /// Current degrees, indexed by `node - 1`.
    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    pub fn degree(&self, node: NodeId) -> Result<u32> {
        self.index(node).map(|i| self.degrees[i])
    }

    pub fn events(&self, node: NodeId) -> Result<&[DegreeEvent]> {
        self.index(node).map(|i| self.events[i].as_slice())
    }

    /// Degree of `node` at the end of `step`; zero before the node existed.
    pub fn degree_at(&self, node: NodeId, step: Step) -> Result<u32> {
        let i = self.index(node)?;
        if step > self.step {
            return Err(Error::FutureStep {
                requested: step,
                current: self.step,
            });
        }
        Ok(logged_degree(&self.events[i], Some(step)))
    }

    fn index(&self, node: NodeId) -> Result<usize> {
        if node == 0 || node > self.node_count() {
            return Err(Error::NodeNotFound(node));
        }
        Ok(node as usize - 1)
    }

    /// Adds node `current_step + 1` and links it to `targets`.
    fn attach(&mut self, targets: &[usize]) {
        self.step += 1;
        let step = self.step;
        let newcomer = self.degrees.len();
        let new_id = newcomer as NodeId + 1;
        for &t in targets {
            self.degrees[t] += 1;
            self.events[t].push(DegreeEvent {
                step,
                degree: self.degrees[t],
            });
            self.edges.push((new_id, t as NodeId + 1));
        }
        let degree = targets.len() as u32;
        self.degrees.push(degree);
        self.events.push(vec![DegreeEvent { step, degree }]);
    }
}

/// `None` means "before the first step", which is always degree 0.
fn logged_degree(events: &[DegreeEvent], step: Option<Step>) -> u32 {
    let Some(step) = step else { return 0 };
    match events.partition_point(|e| e.step <= step) {
        0 => 0,
        n => events[n - 1].degree,
    }
}

/// `((k_now - k_past) / k_now)^beta`, with `0^0 = 1`.
pub fn recency_factor(k_now: u32, k_past: u32, beta: f64) -> Result<f64> {
    if k_now == 0 {
        return Err(Error::InvalidNode);
    }
    if k_past > k_now {
        return Err(Error::InvalidHistory {
            now: k_now,
            past: k_past,
        });
    }
    if beta == 0.0 {
        return Ok(1.0);
    }
    let fraction = f64::from(k_now - k_past) / f64::from(k_now);
    Ok(libm::pow(fraction, beta))
}

/// Unnormalized attachment weights over existing nodes, indexed by `node - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct AttachmentWeights {
    pub weights: Vec<f64>,
    pub total: f64,
}

impl AttachmentWeights {
    fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(Error::DegenerateWeights);
        }
        Ok(AttachmentWeights { weights, total })
    }

    /// Selection probabilities `p_i = w_i / total`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.weights.iter().map(|w| w / self.total).collect()
    }
}

/// Weights `k_i(t) * R_i(t)` for the network as it stands at its current step.
///
/// The weight is evaluated as `k^(1-beta) * d^beta` with `d = k - k(t - r)`,
/// which equals `k * R` and is exactly `k` at `beta = 0` and exactly `d` at
/// `beta = 1`.
pub fn attachment_weights(net: &GrowthNetwork, cfg: &KernelConfig) -> Result<AttachmentWeights> {
    let mut weights = Vec::with_capacity(net.degrees.len());
    fill_weights(net, cfg, Kernel::Drpa, &mut weights);
    AttachmentWeights::from_weights(weights)
}

/// Degree-proportional weights, the reference kernel.
pub fn pa_weights(net: &GrowthNetwork) -> Result<AttachmentWeights> {
    AttachmentWeights::from_weights(net.degrees.iter().map(|&k| f64::from(k)).collect())
}

fn fill_weights(net: &GrowthNetwork, cfg: &KernelConfig, kernel: Kernel, out: &mut Vec<f64>) {
    out.clear();
    let plain = match kernel {
        Kernel::PreferentialAttachment => true,
        Kernel::Drpa => cfg.beta == 0.0 || cfg.warmup.in_warmup(net.step),
    };
    if plain {
        out.extend(net.degrees.iter().map(|&k| f64::from(k)));
        return;
    }
    let past_step = net.step.checked_sub(cfg.r);
    let beta = cfg.beta;
    out.extend(net.degrees.iter().zip(&net.events).map(|(&k, log)| {
        let recent = k - logged_degree(log, past_step);
        drpa_weight(k, recent, beta)
    }));
}

#[inline]
fn drpa_weight(k: u32, recent: u32, beta: f64) -> f64 {
    if beta == 0.0 {
        return f64::from(k);
    }
    if beta == 1.0 {
        return f64::from(recent);
    }
    if recent == 0 {
        return 0.0;
    }
    libm::pow(f64::from(k), 1.0 - beta) * libm::pow(f64::from(recent), beta)
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Index of the first entry whose running sum exceeds `u * total`.
fn pick(weights: &[f64], u: f64) -> Result<usize> {
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::DegenerateWeights);
    }
    let x = u * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = Some(i);
            if x < acc {
                return Ok(i);
            }
        }
    }
    // rounding left x at the very top of the range
    last.ok_or(Error::DegenerateWeights)
}

/// Grows a DRPA network to `target_n` nodes.
pub fn grow(
    cfg: &KernelConfig,
    target_n: u32,
    trajectories: &Trajectories,
) -> Result<(GrowthNetwork, RunResult)> {
    grow_with_kernel(cfg, target_n, trajectories, Kernel::Drpa)
}

pub fn grow_with_kernel(
    cfg: &KernelConfig,
    target_n: u32,
    trajectories: &Trajectories,
    kernel: Kernel,
) -> Result<(GrowthNetwork, RunResult)> {
    cfg.validate()?;
    if target_n <= cfg.n0 {
        return Err(Error::InvalidConfig(format!(
            "target size {target_n} must exceed the seed size {}",
            cfg.n0
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = GrowthNetwork::seed_clique(cfg.n0)?;
    net.degrees.reserve(target_n as usize);
    net.events.reserve(target_n as usize);
    let mut weights = Vec::with_capacity(target_n as usize);
    let mut targets = Vec::with_capacity(cfg.m as usize);

    while net.node_count() < target_n {
        fill_weights(&net, cfg, kernel, &mut weights);
        targets.clear();
        for _ in 0..cfg.m {
            let chosen = pick(&weights, unit_f64(&mut rng))?;
            weights[chosen] = 0.0;
            targets.push(chosen);
        }
        net.attach(&targets);
    }

    let mut result = RunResult::from_network(&net, cfg)?;
    let keep = match trajectories {
        Trajectories::None => Vec::new(),
        Trajectories::Nodes(nodes) => nodes.clone(),
        Trajectories::TopByDegree(k) => result.top_nodes(*k),
    };
    let mut logs = BTreeMap::new();
    for node in keep {
        logs.insert(node, net.events(node)?.to_vec());
    }
    result.trajectories = logs;
    Ok((net, result))
}
