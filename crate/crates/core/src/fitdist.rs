//! Discrete heavy-tail fits for degree samples.
//!
//! Three families are fitted on the tail `x >= xmin` of an integer sample, each
//! as a proper probability mass function over the integers `xmin, xmin + 1, ...`:
//!
//! * power law: `x^-alpha / zeta(alpha, xmin)` (Hurwitz zeta normalization),
//! * exponential: geometric `(1 - e^-lambda) e^(-lambda (x - xmin))`,
//! * log-normal: the mass of a log-normal density on `[x - 1/2, x + 1/2)`,
//!   renormalized over `[xmin - 1/2, inf)`.
//!
//! `xmin` is chosen for the power law by minimizing the Kolmogorov-Smirnov
//! distance; the alternatives are fitted on the same tail and compared with the
//! log-likelihood ratio `R = sum(ln p_a - ln p_b)`, with the two-sided
//! normalized-ratio p-value `erfc(|R| / (sigma sqrt(2n)))`.

use alloc::vec::Vec;

use crate::special::{hurwitz_zeta, normal_interval, normal_sf};
use crate::{Error, Result};

/// Minimum number of points a candidate tail must keep.
pub const MIN_TAIL: u64 = 10;

const ALPHA_MIN: f64 = 1.0 + 1e-9;
const ALPHA_MAX: f64 = 50.0;

/// Describes how the continuous families are turned into mass functions.
pub const DISCRETIZATION: &str = "power law: Hurwitz-zeta pmf; exponential: geometric pmf on x - xmin; \
log-normal: density mass on [x-0.5, x+0.5) renormalized over [xmin-0.5, inf)";

/// Sorted distinct values with their multiplicities.
#[derive(Debug, Clone, PartialEq)]
struct Histogram {
    values: Vec<u32>,
    counts: Vec<f64>,
}

impl Histogram {
    fn new(sample: &[u32]) -> Self {
        let mut sorted = sample.to_vec();
        sorted.sort_unstable();
        let mut values = Vec::new();
        let mut counts: Vec<f64> = Vec::new();
        for x in sorted {
            if values.last() == Some(&x) {
                *counts.last_mut().unwrap() += 1.0;
            } else {
                values.push(x);
                counts.push(1.0);
            }
        }
        Histogram { values, counts }
    }

    fn tail(&self, xmin: u32) -> Histogram {
        let start = self.values.partition_point(|&v| v < xmin);
        Histogram {
            values: self.values[start..].to_vec(),
            counts: self.counts[start..].to_vec(),
        }
    }

    fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.values.iter().copied().zip(self.counts.iter().copied())
    }
}

/// Discrete power law on `x >= xmin`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerLaw {
    pub alpha: f64,
    pub xmin: u32,
}

impl PowerLaw {
    fn log_norm(&self) -> f64 {
        libm::log(hurwitz_zeta(self.alpha, f64::from(self.xmin)))
    }

    /// `P(X <= x)`.
    pub fn cdf(&self, x: u32) -> f64 {
        if x < self.xmin {
            return 0.0;
        }
        1.0 - hurwitz_zeta(self.alpha, f64::from(x) + 1.0)
            / hurwitz_zeta(self.alpha, f64::from(self.xmin))
    }
}

/// Geometric tail `P(x) = (1 - e^-lambda) e^(-lambda (x - xmin))`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Exponential {
    pub lambda: f64,
    pub xmin: u32,
}

/// Binned log-normal, truncated below at `xmin - 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogNormal {
    pub mu: f64,
    pub sigma: f64,
    pub xmin: u32,
}

impl LogNormal {
    fn z(&self, x: f64) -> f64 {
        (libm::log(x) - self.mu) / self.sigma
    }

    fn log_tail_mass(&self) -> f64 {
        libm::log(normal_sf(self.z(f64::from(self.xmin) - 0.5)))
    }

    fn log_bin(&self, x: u32) -> f64 {
        let x = f64::from(x);
        libm::log(normal_interval(self.z(x - 0.5), self.z(x + 0.5)))
    }
}

/// A fitted tail model.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum TailModel {
    PowerLaw(PowerLaw),
    Exponential(Exponential),
    LogNormal(LogNormal),
}

impl TailModel {
    pub fn xmin(&self) -> u32 {
        match self {
            TailModel::PowerLaw(m) => m.xmin,
            TailModel::Exponential(m) => m.xmin,
            TailModel::LogNormal(m) => m.xmin,
        }
    }

    /// Natural log of the mass at `x`; `-inf` below `xmin`.
    pub fn log_pmf(&self, x: u32) -> f64 {
        if x < self.xmin() {
            return f64::NEG_INFINITY;
        }
        self.evaluator().log_pmf(x)
    }

    fn evaluator(&self) -> Evaluator {
        let log_norm = match self {
            TailModel::PowerLaw(m) => m.log_norm(),
            TailModel::Exponential(_) => 0.0,
            TailModel::LogNormal(m) => m.log_tail_mass(),
        };
        Evaluator {
            model: *self,
            log_norm,
        }
    }
}

/// A model with its normalizing constant cached.
struct Evaluator {
    model: TailModel,
    log_norm: f64,
}

impl Evaluator {
    fn log_pmf(&self, x: u32) -> f64 {
        match self.model {
            TailModel::PowerLaw(m) => -m.alpha * libm::log(f64::from(x)) - self.log_norm,
            TailModel::Exponential(m) => {
                libm::log(-libm::expm1(-m.lambda)) - m.lambda * f64::from(x - m.xmin)
            }
            TailModel::LogNormal(m) => m.log_bin(x) - self.log_norm,
        }
    }
}

fn mean_log_likelihood(tail: &Histogram, model: TailModel) -> f64 {
    let eval = model.evaluator();
    tail.iter().map(|(x, c)| c * eval.log_pmf(x)).sum::<f64>() / tail.total()
}

/// Power-law exponent MLE for a tail with the given `xmin`.
fn power_law_mle(tail: &Histogram, xmin: u32) -> PowerLaw {
    let n = tail.total();
    let mean_log = tail
        .iter()
        .map(|(x, c)| c * libm::log(f64::from(x)))
        .sum::<f64>()
        / n;
    let q = f64::from(xmin);
    // concave in alpha: golden-section search for the maximum
    let objective = |alpha: f64| -alpha * mean_log - libm::log(hurwitz_zeta(alpha, q));
    let alpha = golden_max(objective, ALPHA_MIN, ALPHA_MAX, 1e-12);
    PowerLaw { alpha, xmin }
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol * (1.0 + libm::fabs(lo)) {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        }
    }
    0.5 * (lo + hi)
}

/// Largest gap between the empirical and fitted CDFs over the integers `>= xmin`.
fn ks_distance(tail: &Histogram, model: &PowerLaw) -> f64 {
    let n = tail.total();
    let zeta_min = hurwitz_zeta(model.alpha, f64::from(model.xmin));
    let cdf = |x: u32| 1.0 - hurwitz_zeta(model.alpha, f64::from(x) + 1.0) / zeta_min;
    let mut worst: f64 = 0.0;
    let mut cum = 0.0;
    let mut prev_emp = 0.0;
    let mut next_start = model.xmin;
    for (x, c) in tail.iter() {
        // flat stretch of the empirical CDF before x; the model peaks at its right end
        if x > next_start {
            worst = worst.max(libm::fabs(cdf(x - 1) - prev_emp));
        }
        cum += c;
        let emp = cum / n;
        worst = worst.max(libm::fabs(cdf(x) - emp));
        prev_emp = emp;
        next_start = x + 1;
    }
    worst
}

/// Result of the power-law scan.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PowerLawFit {
    pub alpha: f64,
    pub xmin: u32,
    pub ks_distance: f64,
    pub n_tail: u64,
}

impl PowerLawFit {
    pub fn model(&self) -> PowerLaw {
        PowerLaw {
            alpha: self.alpha,
            xmin: self.xmin,
        }
    }
}

fn check_sample(sample: &[u32]) -> Result<Histogram> {
    if sample.contains(&0) {
        return Err(Error::InvalidInput("sample values must be at least 1".into()));
    }
    if (sample.len() as u64) < MIN_TAIL {
        return Err(Error::InsufficientData("fewer than 10 observations"));
    }
    let hist = Histogram::new(sample);
    if hist.values.len() < 2 {
        return Err(Error::DegenerateSample("all observations are equal"));
    }
    Ok(hist)
}

/// Power-law fit with `xmin` chosen by KS minimization.
///
/// Candidates are the distinct sample values that leave at least [`MIN_TAIL`]
/// points and two distinct values in the tail; ties keep the smallest `xmin`.
pub fn fit_power_law(sample: &[u32]) -> Result<PowerLawFit> {
    let hist = check_sample(sample)?;
    let mut best: Option<PowerLawFit> = None;
    let mut remaining = hist.total();
    for (i, &xmin) in hist.values.iter().enumerate() {
        if remaining < MIN_TAIL as f64 || i + 1 >= hist.values.len() {
            break;
        }
        let tail = Histogram {
            values: hist.values[i..].to_vec(),
            counts: hist.counts[i..].to_vec(),
        };
        let model = power_law_mle(&tail, xmin);
        let ks = ks_distance(&tail, &model);
        if best.is_none_or(|b| ks < b.ks_distance) {
            best = Some(PowerLawFit {
                alpha: model.alpha,
                xmin,
                ks_distance: ks,
                n_tail: remaining as u64,
            });
        }
        remaining -= hist.counts[i];
    }
    best.ok_or(Error::InsufficientData("no xmin leaves a usable tail"))
}

/// Power-law MLE at a fixed `xmin`.
pub fn fit_power_law_at(sample: &[u32], xmin: u32) -> Result<PowerLawFit> {
    let tail = tail_of(sample, xmin)?;
    let model = power_law_mle(&tail, xmin);
    Ok(PowerLawFit {
        alpha: model.alpha,
        xmin,
        ks_distance: ks_distance(&tail, &model),
        n_tail: tail.total() as u64,
    })
}

fn tail_of(sample: &[u32], xmin: u32) -> Result<Histogram> {
    if xmin == 0 {
        return Err(Error::InvalidInput("xmin must be at least 1".into()));
    }
    let tail = Histogram::new(sample).tail(xmin);
    if tail.total() < 2.0 {
        return Err(Error::InsufficientData("tail holds fewer than 2 points"));
    }
    if tail.values.len() < 2 {
        return Err(Error::DegenerateSample("tail holds a single distinct value"));
    }
    Ok(tail)
}

/// Geometric MLE on the tail `x >= xmin`: `lambda = ln(1 + 1/(mean - xmin))`.
pub fn fit_exponential(sample: &[u32], xmin: u32) -> Result<Exponential> {
    let tail = tail_of(sample, xmin)?;
    let excess = tail
        .iter()
        .map(|(x, c)| c * f64::from(x - xmin))
        .sum::<f64>()
        / tail.total();
    Ok(Exponential {
        lambda: libm::log1p(1.0 / excess),
        xmin,
    })
}

/// Binned log-normal MLE on the tail `x >= xmin` (Nelder-Mead over `mu, ln sigma`).
pub fn fit_lognormal(sample: &[u32], xmin: u32) -> Result<LogNormal> {
    let tail = tail_of(sample, xmin)?;
    let n = tail.total();
    let mean = tail.iter().map(|(x, c)| c * libm::log(f64::from(x))).sum::<f64>() / n;
    let var = tail
        .iter()
        .map(|(x, c)| {
            let d = libm::log(f64::from(x)) - mean;
            c * d * d
        })
        .sum::<f64>()
        / n;
    let start = [mean, libm::log(libm::sqrt(var).max(0.1))];
    let objective = |p: [f64; 2]| {
        if !(-100.0..=100.0).contains(&p[0]) || !(-12.0..=5.0).contains(&p[1]) {
            return f64::INFINITY;
        }
        let model = TailModel::LogNormal(LogNormal {
            mu: p[0],
            sigma: libm::exp(p[1]),
            xmin,
        });
        let ll = mean_log_likelihood(&tail, model);
        if ll.is_finite() {
            -ll
        } else {
            f64::INFINITY
        }
    };
    let best = nelder_mead(objective, start, [0.25, 0.25]);
    let sigma = libm::exp(best[1]);
    if sigma < 1e-4 {
        return Err(Error::DegenerateSample("log-normal scale collapsed to zero"));
    }
    Ok(LogNormal {
        mu: best[0],
        sigma,
        xmin,
    })
}

fn nelder_mead(f: impl Fn([f64; 2]) -> f64, start: [f64; 2], step: [f64; 2]) -> [f64; 2] {
    let mut simplex = [
        start,
        [start[0] + step[0], start[1]],
        [start[0], start[1] + step[1]],
    ];
    let mut values = simplex.map(&f);
    for _ in 0..4000 {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);
        let spread = libm::fabs(values[2] - values[0]);
        let size = libm::fabs(simplex[2][0] - simplex[0][0]) + libm::fabs(simplex[2][1] - simplex[0][1]);
        if spread <= 1e-13 * (1.0 + libm::fabs(values[0])) && size < 1e-9 {
            break;
        }
        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let contracted = if fr < values[2] { along(-0.5) } else { along(0.5) };
            let fc = f(contracted);
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for i in 1..3 {
                    simplex[i] = [
                        simplex[0][0] + 0.5 * (simplex[i][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[i][1] - simplex[0][1]),
                    ];
                    values[i] = f(simplex[i]);
                }
            }
        }
    }
    let best = (0..3).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap();
    simplex[best]
}

/// Outcome of a pairwise likelihood-ratio comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LikelihoodRatio {
    /// `sum(ln p_a - ln p_b)`; positive favors model `a`.
    pub ratio: f64,
    /// `ratio / (sigma sqrt(n))`.
    pub normalized: f64,
    pub p_value: f64,
}

/// Log-likelihood ratio of `a` over `b` on the tail `x >= xmin` of `sample`.
///
/// If every pointwise difference is exactly zero the models are
/// indistinguishable and the result is `(0, p = 1)`.
pub fn loglikelihood_ratio(sample: &[u32], a: &TailModel, b: &TailModel) -> Result<LikelihoodRatio> {
    if a.xmin() != b.xmin() {
        return Err(Error::InvalidComparison {
            a: a.xmin(),
            b: b.xmin(),
        });
    }
    let tail = Histogram::new(sample).tail(a.xmin());
    let n = tail.total();
    if n < 2.0 {
        return Err(Error::InsufficientData("tail holds fewer than 2 points"));
    }
    let (ea, eb) = (a.evaluator(), b.evaluator());
    let diffs: Vec<(f64, f64)> = tail
        .iter()
        .map(|(x, c)| (ea.log_pmf(x) - eb.log_pmf(x), c))
        .collect();
    let ratio: f64 = diffs.iter().map(|(d, c)| c * d).sum();
    if !ratio.is_finite() {
        return Err(Error::UndefinedTest);
    }
    let mean = ratio / n;
    let var = diffs
        .iter()
        .map(|(d, c)| c * (d - mean) * (d - mean))
        .sum::<f64>()
        / n;
    let sigma = libm::sqrt(var);
    if sigma == 0.0 || var <= 1e-300 {
        if diffs.iter().all(|(d, _)| *d == 0.0) {
            return Ok(LikelihoodRatio {
                ratio: 0.0,
                normalized: 0.0,
                p_value: 1.0,
            });
        }
        return Err(Error::UndefinedTest);
    }
    let root_n = libm::sqrt(n);
    Ok(LikelihoodRatio {
        ratio,
        normalized: ratio / (sigma * root_n),
        p_value: libm::erfc(libm::fabs(ratio) / (sigma * core::f64::consts::SQRT_2 * root_n)),
    })
}

/// Fitted parameters and pairwise comparisons for one degree sample.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FitReport {
    pub alpha: f64,
    pub xmin: u32,
    pub ks_distance: f64,
    pub n_tail: u64,
    pub lognormal: LogNormal,
    pub exponential: Exponential,
    pub lr_power_vs_lognormal: LikelihoodRatio,
    pub lr_power_vs_exponential: LikelihoodRatio,
}

/// Full pipeline: power-law scan, alternatives on the same tail, both comparisons.
pub fn fit_report(sample: &[u32]) -> Result<FitReport> {
    let power = fit_power_law(sample)?;
    let lognormal = fit_lognormal(sample, power.xmin)?;
    let exponential = fit_exponential(sample, power.xmin)?;
    let pl = TailModel::PowerLaw(power.model());
    Ok(FitReport {
        alpha: power.alpha,
        xmin: power.xmin,
        ks_distance: power.ks_distance,
        n_tail: power.n_tail,
        lognormal,
        exponential,
        lr_power_vs_lognormal: loglikelihood_ratio(sample, &pl, &TailModel::LogNormal(lognormal))?,
        lr_power_vs_exponential: loglikelihood_ratio(
            sample,
            &pl,
            &TailModel::Exponential(exponential),
        )?,
    })
}
