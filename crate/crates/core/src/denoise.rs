//! Fitness-guided denoising: the network-free replacement for a trained
//! noise predictor.
//!
//! Each step estimates the clean sample `x0_hat` for every individual as a
//! fitness-weighted convex combination of the current population,
//!
//! ```text
//! x0_hat^j = sum_i w_ij * x^i,
//! w_ij ∝ g[f(x^i)] * N(x^j; sqrt(abar_t) * x^i, (1 - abar_t) I),
//! ```
//!
//! then applies the implicit-model update of [`crate::schedule`] with fresh
//! mutation noise. The density map `g` is `exp(beta * z_i)` over min-max
//! normalized fitness `z`, kept in log space throughout: at latent
//! dimensions in the tens, raw Gaussian kernels underflow, while the shared
//! normalization constant cancels in the per-target log-sum-exp.

use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::schedule::{NoiseSchedule, ScheduleError};

/// Log-density weights `log g[f_i]` assigned to each individual.
///
/// Min-max normalization makes the weights invariant under shifting all raw
/// fitness values by a constant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityWeights {
    log_g: Vec<f64>,
}

impl DensityWeights {
    pub fn log_g(&self) -> &[f64] {
        &self.log_g
    }

    pub fn len(&self) -> usize {
        self.log_g.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_g.is_empty()
    }
}

/// Maps fitness to log density: `log g_i = beta * (f_i - f_min) / (f_max - f_min)`.
///
/// A degenerate batch (all fitness equal) maps to uniform weights, as does
/// `beta = 0`, which disables fitness guidance entirely.
pub fn map_fitness(fitness: &[f64], beta: f64) -> Result<DensityWeights, DenoiseError> {
    if fitness.is_empty() {
        return Err(DenoiseError::Argument(
            "fitness vector must not be empty".to_string(),
        ));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(DenoiseError::Argument(format!(
            "beta must be finite and non-negative, got {beta}"
        )));
    }
    for (index, &f) in fitness.iter().enumerate() {
        if !f.is_finite() {
            return Err(DenoiseError::NonFiniteFitness { index, value: f });
        }
    }
    let min = fitness.iter().copied().fold(f64::INFINITY, f64::min);
    let max = fitness.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_g = if max == min {
        vec![0.0; fitness.len()]
    } else {
        fitness
            .iter()
            .map(|&f| beta * ((f - min) / (max - min)))
            .collect()
    };
    Ok(DensityWeights { log_g })
}

/// The normalized weight matrix behind [`estimate_x0`]: entry `(j, i)` is the
/// weight of source individual `i` in target `j`'s estimate. Every row is
/// non-negative and sums to 1.
pub fn x0_weight_matrix(
    population: ArrayView2<'_, f64>,
    weights: &DensityWeights,
    sqrt_abar_t: f64,
    one_minus_abar_t: f64,
) -> Result<Array2<f64>, DenoiseError> {
    let n = population.nrows();
    if n == 0 || population.ncols() == 0 {
        return Err(DenoiseError::Argument(
            "population must be non-empty".to_string(),
        ));
    }
    if weights.len() != n {
        return Err(DenoiseError::Argument(format!(
            "{} density weights for {} individuals",
            weights.len(),
            n
        )));
    }
    if !(one_minus_abar_t > 0.0) || !one_minus_abar_t.is_finite() {
        return Err(DenoiseError::Argument(format!(
            "1 - abar_t must be positive, got {one_minus_abar_t}"
        )));
    }
    if !sqrt_abar_t.is_finite() || sqrt_abar_t < 0.0 {
        return Err(DenoiseError::Argument(format!(
            "sqrt(abar_t) must be finite and non-negative, got {sqrt_abar_t}"
        )));
    }

    let inv_two_var = 1.0 / (2.0 * one_minus_abar_t);
    let mut w = Array2::<f64>::zeros((n, n));
    let mut log_w = vec![0.0; n];
    for j in 0..n {
        let target = population.row(j);
        let mut row_max = f64::NEG_INFINITY;
        for i in 0..n {
            let source = population.row(i);
            let mut dist_sq = 0.0;
            for (xt, xs) in target.iter().zip(source.iter()) {
                let d = xt - sqrt_abar_t * xs;
                dist_sq += d * d;
            }
            let lw = weights.log_g[i] - dist_sq * inv_two_var;
            log_w[i] = lw;
            row_max = row_max.max(lw);
        }
        // log-sum-exp: the max-aligned sum is at least 1, so the
        // normalization below cannot divide by zero.
        let mut total = 0.0;
        for i in 0..n {
            let e = (log_w[i] - row_max).exp();
            w[[j, i]] = e;
            total += e;
        }
        if !(total >= 1.0) || !total.is_finite() {
            return Err(DenoiseError::Internal(format!(
                "weight normalization degenerated for target {j}: total {total}"
            )));
        }
        for i in 0..n {
            w[[j, i]] /= total;
        }
    }
    Ok(w)
}

/// Estimates the clean sample for every individual as the weighted
/// combination of the current population rows.
pub fn estimate_x0(
    population: ArrayView2<'_, f64>,
    weights: &DensityWeights,
    sqrt_abar_t: f64,
    one_minus_abar_t: f64,
) -> Result<Array2<f64>, DenoiseError> {
    let w = x0_weight_matrix(population, weights, sqrt_abar_t, one_minus_abar_t)?;
    Ok(w.dot(&population))
}

/// One denoising step `t -> t-1` with fresh mutation noise.
///
/// Noise is drawn individual-major, dimension-minor from `rng` regardless of
/// the noise scale, so a run's random stream is identical across
/// configurations that share a seed.
pub fn denoise_step<R: Rng>(
    population: ArrayView2<'_, f64>,
    x0: ArrayView2<'_, f64>,
    schedule: &NoiseSchedule,
    t: usize,
    rng: &mut R,
) -> Result<Array2<f64>, DenoiseError> {
    if population.dim() != x0.dim() {
        return Err(DenoiseError::Argument(format!(
            "population {:?} and x0 {:?} shapes disagree",
            population.dim(),
            x0.dim()
        )));
    }
    let c = schedule.coefficients(t)?;
    if c.sqrt_one_minus_abar_t == 0.0 {
        return Err(DenoiseError::Argument(format!(
            "abar at step {t} leaves no noise to remove (abar_t = 1)"
        )));
    }
    let (n, d) = population.dim();
    let mut out = Array2::<f64>::zeros((n, d));
    for j in 0..n {
        for k in 0..d {
            let eps: f64 = rng.sample(StandardNormal);
            let xt = population[[j, k]];
            let x0v = x0[[j, k]];
            let direction = (xt - c.sqrt_abar_t * x0v) / c.sqrt_one_minus_abar_t;
            out[[j, k]] = c.sqrt_abar_prev * x0v + c.dir_coeff * direction + c.sigma_t * eps;
        }
    }
    Ok(out)
}

#[derive(Debug, Error)]
pub enum DenoiseError {
    #[error("non-finite fitness {value} at index {index}")]
    NonFiniteFitness { index: usize, value: f64 },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}
