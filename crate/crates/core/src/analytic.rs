//! Continuous-time approximation of the recency kernel.
//!
//! Degree `k_i` and recency `r_i` evolve as
//!
//! ```text
//! k_i' = m * k_i^(1-beta) r_i^beta / sum_j k_j^(1-beta) r_j^beta
//! r_i' = -alpha * r_i + k_i'
//! ```
//!
//! With the long-run solutions `k_i = m p_i t + C1_i` and
//! `r_i = m p_i / alpha + C2_i e^(-alpha t)`, the selection probability
//! settles to
//!
//! ```text
//! p_i = (C1_i e^(alpha t) (1-beta) + C2_i alpha beta t) / (C1 e^(alpha t) (1-beta) + C2 alpha beta t)
//! ```
//!
//! and the recency term can exceed the degree term at some `t > 0` exactly when
//! `beta > C1 e / (C1 e + C2)`.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Integration constants and rates of the continuous model.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticModel {
    pub c1: Vec<f64>,
    pub c2: Vec<f64>,
    /// Recency decay rate.
    pub alpha_decay: f64,
    pub beta: f64,
    /// Total degree growth rate (edges per arrival).
    pub m: f64,
}

impl AsymptoticModel {
    pub fn validate(&self) -> Result<()> {
        if self.c1.len() != self.c2.len() || self.c1.is_empty() {
            return Err(Error::InvalidInput(
                "c1 and c2 must be nonempty and of equal length".into(),
            ));
        }
        if !(self.alpha_decay > 0.0) || !(self.m > 0.0) {
            return Err(Error::InvalidInput("alpha and m must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::InvalidInput("beta must lie in [0, 1]".into()));
        }
        Ok(())
    }

    pub fn c1_total(&self) -> f64 {
        self.c1.iter().sum()
    }

    pub fn c2_total(&self) -> f64 {
        self.c2.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.c1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c1.is_empty()
    }
}

/// Continuous degrees and recencies at time `t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OdeState {
    pub k: Vec<f64>,
    pub r: Vec<f64>,
    pub t: f64,
}

/// Unnormalized selection weights `k^(1-beta) r^beta`; `0^0 = 1`.
fn weights(k: &[f64], r: &[f64], beta: f64, out: &mut Vec<f64>) -> Result<f64> {
    out.clear();
    for (&ki, &ri) in k.iter().zip(r) {
        if ri < 0.0 {
            return Err(Error::StepSize);
        }
        out.push(libm::pow(ki, 1.0 - beta) * libm::pow(ri, beta));
    }
    let total: f64 = out.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(Error::SingularState);
    }
    Ok(total)
}

/// Selection probabilities of the state under `model`.
pub fn selection_probabilities(state: &OdeState, model: &AsymptoticModel) -> Result<Vec<f64>> {
    let mut w = Vec::with_capacity(state.k.len());
    let total = weights(&state.k, &state.r, model.beta, &mut w)?;
    Ok(w.into_iter().map(|x| x / total).collect())
}

/// Writes `(k', r')` for the given point.
fn field(
    k: &[f64],
    r: &[f64],
    model: &AsymptoticModel,
    scratch: &mut Vec<f64>,
    dk: &mut [f64],
    dr: &mut [f64],
) -> Result<()> {
    let total = weights(k, r, model.beta, scratch)?;
    for i in 0..k.len() {
        dk[i] = model.m * scratch[i] / total;
        dr[i] = -model.alpha_decay * r[i] + dk[i];
    }
    Ok(())
}

/// One classical fourth-order Runge-Kutta step.
pub fn ode_step(state: &OdeState, model: &AsymptoticModel, dt: f64) -> Result<OdeState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidInput("step size must be positive".into()));
    }
    let n = state.k.len();
    if n == 0 || state.r.len() != n {
        return Err(Error::InvalidInput("state vectors must be nonempty and of equal length".into()));
    }
    if state.k.iter().any(|&k| !(k > 0.0)) {
        return Err(Error::InvalidInput("degrees must be positive".into()));
    }
    if state.r.iter().any(|&r| r < 0.0) {
        return Err(Error::InvalidInput("recencies must be nonnegative".into()));
    }

    let mut scratch = Vec::with_capacity(n);
    let mut stages = [(); 4].map(|_| (alloc::vec![0.0; n], alloc::vec![0.0; n]));
    let mut k_tmp = alloc::vec![0.0; n];
    let mut r_tmp = alloc::vec![0.0; n];
    let offsets = [0.0, 0.5, 0.5, 1.0];
    for s in 0..4 {
        if s == 0 {
            k_tmp.copy_from_slice(&state.k);
            r_tmp.copy_from_slice(&state.r);
        } else {
            let (pk, pr) = &stages[s - 1];
            for i in 0..n {
                k_tmp[i] = state.k[i] + offsets[s] * dt * pk[i];
                r_tmp[i] = state.r[i] + offsets[s] * dt * pr[i];
            }
        }
        let (dk, dr) = &mut stages[s];
        field(&k_tmp, &r_tmp, model, &mut scratch, dk, dr)?;
    }

    type Stage = (Vec<f64>, Vec<f64>);
    let combine = |base: &[f64], pick: fn(&Stage) -> &Vec<f64>| -> Vec<f64> {
        (0..n)
            .map(|i| {
                base[i]
                    + dt / 6.0
                        * (pick(&stages[0])[i]
                            + 2.0 * pick(&stages[1])[i]
                            + 2.0 * pick(&stages[2])[i]
                            + pick(&stages[3])[i])
            })
            .collect()
    };
    let k = combine(&state.k, |s| &s.0);
    let r = combine(&state.r, |s| &s.1);
    if r.iter().any(|&x| x < 0.0) {
        return Err(Error::StepSize);
    }
    Ok(OdeState {
        k,
        r,
        t: state.t + dt,
    })
}

/// Asymptotic selection probability of `node` at time `t`.
///
/// Numerator and denominator are rescaled by the larger of `e^(alpha t)(1-beta)`
/// and `alpha beta t` so that large `t` does not overflow.
pub fn asymptotic_p(model: &AsymptoticModel, node: usize, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::InvalidInput("t must be positive".into()));
    }
    let (c1i, c2i) = match (model.c1.get(node), model.c2.get(node)) {
        (Some(&a), Some(&b)) => (a, b),
        _ => return Err(Error::InvalidInput("node index out of range".into())),
    };
    let beta = model.beta;
    let alpha = model.alpha_decay;
    let log_degree = libm::log(1.0 - beta) + alpha * t;
    let log_recency = libm::log(alpha * beta * t);
    let top = log_degree.max(log_recency);
    let degree = libm::exp(log_degree - top);
    let recency = libm::exp(log_recency - top);
    let denominator = model.c1_total() * degree + model.c2_total() * recency;
    if denominator == 0.0 || !denominator.is_finite() {
        return Err(Error::SingularParameters);
    }
    Ok((c1i * degree + c2i * recency) / denominator)
}

/// `C1 e / (C1 e + C2)`: the smallest `beta` at which recency can dominate.
pub fn beta_threshold(c1_total: f64, c2_total: f64) -> Result<f64> {
    if !(c1_total > 0.0) || !(c2_total > 0.0) {
        return Err(Error::InvalidInput("C1 and C2 totals must be positive".into()));
    }
    let e = core::f64::consts::E;
    Ok(c1_total * e / (c1_total * e + c2_total))
}

/// Recency term minus degree term, `C2 alpha beta t - C1 e^(alpha t) (1 - beta)`.
pub fn dominance_margin(c1_total: f64, c2_total: f64, alpha: f64, beta: f64, t: f64) -> f64 {
    c2_total * alpha * beta * t - c1_total * libm::exp(alpha * t) * (1.0 - beta)
}

/// Whether the recency term overtakes the degree term at some `t > 0`.
pub fn dominance_crossover_exists(model: &AsymptoticModel) -> Result<bool> {
    Ok(dominance_crossover(model)?.is_some())
}

/// Earliest time (to bisection precision) at which the recency term exceeds the
/// degree term, or `None` if it never does.
///
/// The margin peaks at `t = 1/alpha`; the onset is bracketed in `(0, 1/alpha]`.
/// The returned time always has a strictly positive margin.
pub fn dominance_crossover(model: &AsymptoticModel) -> Result<Option<f64>> {
    model.validate()?;
    let (c1, c2) = (model.c1_total(), model.c2_total());
    let threshold = beta_threshold(c1, c2)?;
    if !(model.beta > threshold) {
        return Ok(None);
    }
    let alpha = model.alpha_decay;
    let peak = 1.0 / alpha;
    if model.beta == 1.0 {
        return Ok(Some(peak));
    }
    let f = |t: f64| dominance_margin(c1, c2, alpha, model.beta, t);
    if !(f(peak) > 0.0) {
        // positive region narrower than rounding allows to resolve
        return Ok(None);
    }
    let (mut lo, mut hi) = (0.0, peak);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some(hi))
}

/// Initial state consistent with the long-run solutions at `t = 0`:
/// `k_i = C1_i` and `r_i = m p_i / alpha + C2_i`, with `p_i` the `t -> 0` limit
/// of the asymptotic probability.
pub fn consistent_initial_state(model: &AsymptoticModel) -> Result<OdeState> {
    model.validate()?;
    let (c1, c2) = (model.c1_total(), model.c2_total());
    let p: Vec<f64> = if model.beta < 1.0 {
        if !(c1 > 0.0) {
            return Err(Error::SingularParameters);
        }
        model.c1.iter().map(|&c| c / c1).collect()
    } else {
        if !(c2 > 0.0) {
            return Err(Error::SingularParameters);
        }
        model.c2.iter().map(|&c| c / c2).collect()
    };
    Ok(OdeState {
        k: model.c1.clone(),
        r: p
            .iter()
            .zip(&model.c2)
            .map(|(&pi, &c2i)| model.m * pi / model.alpha_decay + c2i)
            .collect(),
        t: 0.0,
    })
}

/// Agreement between the integrated dynamics and the asymptotic formula.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AsymptoticReport {
    pub horizon: f64,
    /// Start of the trailing window (last 10% of the horizon).
    pub window_start: f64,
    pub max_discrepancy: f64,
    pub steps: usize,
    pub final_state: OdeState,
    pub final_probabilities: Vec<f64>,
}

/// Integrates from [`consistent_initial_state`] to `horizon` and reports the
/// largest `|p_i(t) - asymptotic_p(i, t)|` seen over the trailing 10%.
pub fn validate_asymptotics(model: &AsymptoticModel, horizon: f64) -> Result<AsymptoticReport> {
    validate_asymptotics_with_step(model, horizon, 0.01)
}

pub fn validate_asymptotics_with_step(
    model: &AsymptoticModel,
    horizon: f64,
    dt: f64,
) -> Result<AsymptoticReport> {
    if !(horizon > 0.0) || !(dt > 0.0) {
        return Err(Error::InvalidInput("horizon and step must be positive".into()));
    }
    let mut state = consistent_initial_state(model)?;
    let window_start = 0.9 * horizon;
    let mut worst: f64 = 0.0;
    let mut steps = 0;
    let mut step = dt;
    let mut check = |state: &OdeState| -> Result<()> {
        if state.t >= window_start {
            let p = selection_probabilities(state, model)?;
            for (i, pi) in p.iter().enumerate() {
                worst = worst.max(libm::fabs(pi - asymptotic_p(model, i, state.t)?));
            }
        }
        Ok(())
    };
    while state.t < horizon {
        let h = step.min(horizon - state.t);
        match ode_step(&state, model, h) {
            Ok(next) => {
                state = next;
                steps += 1;
                check(&state)?;
                step = dt;
            }
            Err(Error::StepSize) if h > 1e-12 => step = h / 2.0,
            Err(e) => return Err(e),
        }
        if horizon - state.t < 1e-12 * horizon {
            break;
        }
    }
    let final_probabilities = selection_probabilities(&state, model)?;
    Ok(AsymptoticReport {
        horizon,
        window_start,
        max_discrepancy: worst,
        steps,
        final_state: state,
        final_probabilities,
    })
}
