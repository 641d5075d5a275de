//! Tail fitters on synthetic samples drawn by independent test-side samplers.

use drpa_core::fitdist::{
    fit_exponential, fit_lognormal, fit_power_law, fit_power_law_at, fit_report, loglikelihood_ratio, TailModel,
};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
}

/// Inverse-CDF sampler for `x^-alpha` on `1..`, tabulated by direct summation.
struct PowerLawSampler {
    cdf: Vec<f64>,
}

impl PowerLawSampler {
    fn new(alpha: f64, cutoff: u32) -> Self {
        let mass: Vec<f64> = (1..=cutoff).map(|x| f64::from(x).powf(-alpha)).collect();
        // mass beyond the cutoff, from the integral of the remainder
        let tail = f64::from(cutoff).powf(1.0 - alpha) / (alpha - 1.0);
        let total = mass.iter().rev().sum::<f64>() + tail;
        let mut acc = 0.0;
        let cdf = mass
            .iter()
            .map(|m| {
                acc += m / total;
                acc
            })
            .collect();
        PowerLawSampler { cdf }
    }

    fn sample(&self, n: usize, seed: u64) -> Vec<u32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let u = uniform(&mut rng);
                let i = self.cdf.partition_point(|&c| c < u);
                (i + 1).min(self.cdf.len()) as u32
            })
            .collect()
    }
}

fn geometric(n: usize, lambda: f64, xmin: u32, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| xmin + (-uniform(&mut rng).ln() / lambda).floor() as u32)
        .collect()
}

/// Rounded log-normal draws (Box-Muller); values that round to 0 are dropped.
fn lognormal(n: usize, mu: f64, sigma: f64, seed: u64) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (u1, u2) = (uniform(&mut rng), uniform(&mut rng));
        let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
        let x = (mu + sigma * z).exp().round();
        if x >= 1.0 {
            out.push(x as u32);
        }
    }
    out
}

#[test]
fn power_law_exponent_recovered() {
    let sampler = PowerLawSampler::new(2.5, 2_000_000);
    for seed in 0..3 {
        let fit = fit_power_law(&sampler.sample(100_000, seed)).unwrap();
        assert!((2.40..=2.60).contains(&fit.alpha), "seed {seed}: alpha {}", fit.alpha);
    }
}

#[test]
fn lognormal_parameters_recovered() {
    let sample = lognormal(100_000, 1.0, 0.5, 7);
    let fit = fit_lognormal(&sample, 1).unwrap();
    assert!((0.9..=1.1).contains(&fit.mu), "mu {}", fit.mu);
    assert!((0.45..=0.55).contains(&fit.sigma), "sigma {}", fit.sigma);
}

#[test]
fn geometric_rate_recovered() {
    for &lambda in &[0.05, 0.2, 0.8] {
        let fit = fit_exponential(&geometric(100_000, lambda, 3, 11), 3).unwrap();
        assert!(((fit.lambda - lambda) / lambda).abs() < 0.05, "{lambda}: {}", fit.lambda);
    }
}

#[test]
fn power_law_data_beats_exponential() {
    let sampler = PowerLawSampler::new(2.5, 2_000_000);
    let report = fit_report(&sampler.sample(20_000, 3)).unwrap();
    assert!(report.lr_power_vs_exponential.ratio > 0.0);
}

const SEEDS: u64 = 20;

/// Log-likelihood ratios (power vs log-normal, power vs exponential, log-normal
/// vs exponential) with all three families fitted at the sample's known lower
/// bound.
fn ratios_at(sample: &[u32], xmin: u32) -> [f64; 3] {
    let pl = TailModel::PowerLaw(fit_power_law_at(sample, xmin).unwrap().model());
    let ln = TailModel::LogNormal(fit_lognormal(sample, xmin).unwrap());
    let ex = TailModel::Exponential(fit_exponential(sample, xmin).unwrap());
    let lr = |a: &TailModel, b: &TailModel| loglikelihood_ratio(sample, a, b).unwrap().ratio;
    [lr(&pl, &ln), lr(&pl, &ex), lr(&ln, &ex)]
}

fn wins(family: &str, won: impl Fn(u64) -> bool) {
    let count = (0..SEEDS).filter(|&seed| won(seed)).count() as u64;
    assert!(count * 100 >= 95 * SEEDS, "{family} won {count} of {SEEDS}");
}

// Each family, fitted on its own synthetic data at n = 10^4, should win both of
// its comparisons on at least 95% of seeds.

#[test]
fn power_law_data_wins_both_comparisons() {
    let sampler = PowerLawSampler::new(2.5, 2_000_000);
    wins("power law", |seed| {
        let [pl_ln, pl_ex, _] = ratios_at(&sampler.sample(10_000, seed), 1);
        pl_ln > 0.0 && pl_ex > 0.0
    });
}

#[test]
fn lognormal_data_wins_both_comparisons() {
    wins("log-normal", |seed| {
        let [pl_ln, _, ln_ex] = ratios_at(&lognormal(10_000, 1.0, 0.5, seed), 1);
        pl_ln < 0.0 && ln_ex > 0.0
    });
}

#[test]
fn geometric_data_wins_both_comparisons() {
    wins("exponential", |seed| {
        let [_, pl_ex, ln_ex] = ratios_at(&geometric(10_000, 0.1, 1, seed), 1);
        pl_ex < 0.0 && ln_ex < 0.0
    });
}
