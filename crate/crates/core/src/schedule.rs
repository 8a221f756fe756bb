//! Diffusion noise schedule: the cumulative signal fractions `abar_t` and the
//! per-step coefficients of the deterministic-plus-noise denoising update
//!
//! ```text
//! x_{t-1} = sqrt(abar_{t-1}) * x0_hat
//!         + sqrt(1 - abar_{t-1} - sigma_t^2) * (x_t - sqrt(abar_t) * x0_hat) / sqrt(1 - abar_t)
//!         + sigma_t * eps
//! ```
//!
//! (Denoising Diffusion Implicit Models, J. Song et al., 2020.)
//!
//! The configured `sigma` is a noise *scale* in `[0, 1]`: the per-step noise
//! deviation is `sigma_t = sigma * sqrt(1 - abar_{t-1})`, so the direction
//! radicand factors as `(1 - sigma^2) * (1 - abar_{t-1})` and the update
//! splits each step's noise budget between the predicted direction and fresh
//! mutation noise in a fixed, variance-preserving proportion. An absolute,
//! t-independent `sigma` cannot work here: the radicand
//! `1 - abar_{t-1} - sigma^2` must stay non-negative at every step, and near
//! the end of denoising `abar_{t-1}` approaches 1, which forces any fixed
//! `sigma` above `sqrt(1 - abar_0)` out of range. The relative form keeps
//! the radicand non-negative for every scale up to 1 and anneals the
//! mutation noise as the signal fraction grows.

use thiserror::Error;

/// Immutable `abar_t` sequence (t = 0..=T) with precomputed per-step noise
/// deviations and direction coefficients. Freely shareable across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    alpha_bar: Vec<f64>,
    sigma: f64,
    /// Per-step noise deviation, indexed by t (entry 0 unused).
    sigma_t: Vec<f64>,
    /// `sqrt(1 - abar_{t-1} - sigma_t^2)`, indexed by t (entry 0 unused).
    dir_coeff: Vec<f64>,
}

/// Coefficients consumed by one denoising step `t -> t-1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCoefficients {
    pub sqrt_abar_t: f64,
    pub sqrt_one_minus_abar_t: f64,
    pub sqrt_abar_prev: f64,
    /// `sqrt(1 - abar_{t-1} - sigma_t^2)`, the direction term weight.
    pub dir_coeff: f64,
    /// Noise deviation applied at this step.
    pub sigma_t: f64,
}

impl NoiseSchedule {
    /// Linear interpolation of `abar` from `abar_start` at t = 0 down to
    /// `abar_end` at t = `steps`.
    pub fn linear(
        steps: usize,
        abar_start: f64,
        abar_end: f64,
        sigma: f64,
    ) -> Result<Self, ScheduleError> {
        if steps < 1 {
            return Err(ScheduleError::Argument(
                "steps must be at least 1".to_string(),
            ));
        }
        if !(abar_start.is_finite() && abar_end.is_finite())
            || !(0.0 < abar_end && abar_end < abar_start && abar_start < 1.0)
        {
            return Err(ScheduleError::Argument(format!(
                "need 0 < abar_end < abar_start < 1, got start={abar_start}, end={abar_end}"
            )));
        }
        let t_max = steps as f64;
        let alpha_bar = (0..=steps)
            .map(|t| abar_start + (abar_end - abar_start) * t as f64 / t_max)
            .collect();
        Self::from_alpha_bar(alpha_bar, sigma)
    }

    /// Builds a schedule from an explicit `abar` sequence. Values must be
    /// finite, in `(0, 1]`, and non-increasing; the per-step direction
    /// radicand must be non-negative at the given noise scale.
    ///
    /// Unlike [`NoiseSchedule::linear`], equal adjacent values and
    /// `abar = 1` are accepted, which admits the boundary cases of the
    /// denoising update (a step that copies `x0_hat`, a step that is the
    /// identity).
    pub fn from_alpha_bar(alpha_bar: Vec<f64>, sigma: f64) -> Result<Self, ScheduleError> {
        if alpha_bar.len() < 2 {
            return Err(ScheduleError::Argument(
                "schedule needs at least one step (two abar values)".to_string(),
            ));
        }
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(ScheduleError::Argument(format!(
                "sigma must be finite and non-negative, got {sigma}"
            )));
        }
        for (t, &a) in alpha_bar.iter().enumerate() {
            if !a.is_finite() || a <= 0.0 || a > 1.0 {
                return Err(ScheduleError::Argument(format!(
                    "abar[{t}] = {a} outside (0, 1]"
                )));
            }
            if t > 0 && a > alpha_bar[t - 1] {
                return Err(ScheduleError::Argument(format!(
                    "abar must be non-increasing, rises at t = {t}"
                )));
            }
        }

        let steps = alpha_bar.len() - 1;
        let mut sigma_t = vec![0.0; steps + 1];
        let mut dir_coeff = vec![0.0; steps + 1];
        for t in 1..=steps {
            let prev = alpha_bar[t - 1];
            let sigma_sq = sigma * sigma * (1.0 - prev);
            let radicand = (1.0 - prev) - sigma_sq;
            if radicand < 0.0 {
                return Err(ScheduleError::NegativeRadicand {
                    t,
                    radicand,
                    sigma,
                });
            }
            sigma_t[t] = sigma_sq.sqrt();
            dir_coeff[t] = radicand.sqrt();
        }

        Ok(Self {
            alpha_bar,
            sigma,
            sigma_t,
            dir_coeff,
        })
    }

    /// Number of denoising steps T.
    pub fn steps(&self) -> usize {
        self.alpha_bar.len() - 1
    }

    /// Configured noise scale.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `abar_t` for t in 0..=T.
    pub fn alpha_bar(&self, t: usize) -> f64 {
        self.alpha_bar[t]
    }

    /// Coefficients for the step `t -> t-1`, valid for t in 1..=T.
    pub fn coefficients(&self, t: usize) -> Result<StepCoefficients, ScheduleError> {
        if t < 1 || t > self.steps() {
            return Err(ScheduleError::StepOutOfRange {
                t,
                steps: self.steps(),
            });
        }
        Ok(StepCoefficients {
            sqrt_abar_t: self.alpha_bar[t].sqrt(),
            sqrt_one_minus_abar_t: (1.0 - self.alpha_bar[t]).sqrt(),
            sqrt_abar_prev: self.alpha_bar[t - 1].sqrt(),
            dir_coeff: self.dir_coeff[t],
            sigma_t: self.sigma_t[t],
        })
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("invalid schedule argument: {0}")]
    Argument(String),
    #[error(
        "direction radicand 1 - abar[{t}-1] - sigma_t^2 = {radicand} is negative at t = {t} \
         for noise scale {sigma}"
    )]
    NegativeRadicand { t: usize, radicand: f64, sigma: f64 },
    #[error("step t = {t} outside valid range 1..={steps}")]
    StepOutOfRange { t: usize, steps: usize },
}

/// Paper-default endpoints: `abar_0 = 1 - 1e-4`, `abar_T = 1e-4`.
pub const DEFAULT_ABAR_START: f64 = 1.0 - 1e-4;
pub const DEFAULT_ABAR_END: f64 = 1e-4;

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn default_schedule() -> NoiseSchedule {
        NoiseSchedule::linear(100, DEFAULT_ABAR_START, DEFAULT_ABAR_END, 0.8).unwrap()
    }

    #[test]
    fn endpoints_match_configuration() {
        let s = default_schedule();
        assert_relative_eq!(s.alpha_bar(0), 1.0 - 1e-4, max_relative = 1e-12);
        assert_relative_eq!(s.alpha_bar(100), 1e-4, max_relative = 1e-12);
    }

    #[test]
    fn two_step_schedule_hits_linear_midpoint() {
        let s = NoiseSchedule::linear(2, DEFAULT_ABAR_START, DEFAULT_ABAR_END, 0.8).unwrap();
        assert_relative_eq!(s.alpha_bar(1), 0.5, max_relative = 1e-12);
        assert_relative_eq!(
            s.coefficients(1).unwrap().sqrt_abar_prev,
            (1.0 - 1e-4f64).sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn terminal_coefficient_matches_endpoint() {
        let s = default_schedule();
        assert_relative_eq!(
            s.coefficients(100).unwrap().sqrt_abar_t,
            0.01,
            max_relative = 1e-12
        );
    }

    #[test]
    fn alpha_bar_strictly_decreasing_and_coefficients_monotone() {
        let s = default_schedule();
        for t in 1..=s.steps() {
            assert!(s.alpha_bar(t) < s.alpha_bar(t - 1), "abar rises at t={t}");
        }
        for t in 2..=s.steps() {
            let a = s.coefficients(t - 1).unwrap();
            let b = s.coefficients(t).unwrap();
            assert!(b.sqrt_abar_t < a.sqrt_abar_t);
            assert!(b.sqrt_one_minus_abar_t > a.sqrt_one_minus_abar_t);
        }
    }

    /// Direct scan of the direction radicand over every step of the default
    /// configuration. With the relative noise scale the scan passes at
    /// sigma = 0.8; a fixed absolute sigma of 0.8 would fail it at 65 of the
    /// 100 steps (see `fixed_sigma_exceeds_terminal_variance`).
    #[test]
    fn radicand_scan_default_config_passes() {
        let s = default_schedule();
        let mut min_radicand = f64::INFINITY;
        for t in 1..=s.steps() {
            let c = s.coefficients(t).unwrap();
            let radicand = (1.0 - s.alpha_bar(t - 1)) - c.sigma_t * c.sigma_t;
            min_radicand = min_radicand.min(radicand);
            assert!(c.dir_coeff.is_finite() && c.dir_coeff >= 0.0);
            assert!(c.sigma_t.is_finite() && c.sigma_t >= 0.0);
        }
        assert!(
            min_radicand >= -1e-15,
            "scan found negative radicand {min_radicand}"
        );
    }

    /// Documents why sigma is a relative scale: against the same linear abar
    /// sequence, a fixed deviation of 0.8 overshoots the available variance
    /// 1 - abar_{t-1} for most of the trajectory.
    #[test]
    fn fixed_sigma_exceeds_terminal_variance() {
        let s = default_schedule();
        let fixed = 0.8f64;
        let min_radicand = (1..=s.steps())
            .map(|t| (1.0 - s.alpha_bar(t - 1)) - fixed * fixed)
            .fold(f64::INFINITY, f64::min);
        assert!(min_radicand < 0.0);
        let failing_steps = (1..=s.steps())
            .filter(|&t| (1.0 - s.alpha_bar(t - 1)) - fixed * fixed < 0.0)
            .count();
        assert_eq!(failing_steps, 65);
    }

    #[test]
    fn construction_rejects_oversized_noise_scale() {
        let err = NoiseSchedule::linear(100, DEFAULT_ABAR_START, DEFAULT_ABAR_END, 1.5).unwrap_err();
        assert!(matches!(err, ScheduleError::NegativeRadicand { .. }));
    }

    #[test]
    fn construction_rejects_degenerate_bounds() {
        assert!(NoiseSchedule::linear(0, 0.9, 0.1, 0.8).is_err());
        assert!(NoiseSchedule::linear(10, 0.1, 0.9, 0.8).is_err());
        assert!(NoiseSchedule::linear(10, 0.9, 0.9, 0.8).is_err());
        assert!(NoiseSchedule::linear(10, 1.0, 0.1, 0.8).is_err());
        assert!(NoiseSchedule::linear(10, 0.9, 0.0, 0.8).is_err());
        assert!(NoiseSchedule::linear(10, 0.9, 0.1, -0.1).is_err());
        assert!(NoiseSchedule::linear(10, 0.9, 0.1, f64::NAN).is_err());
    }

    #[test]
    fn from_alpha_bar_validates_sequence() {
        assert!(NoiseSchedule::from_alpha_bar(vec![0.9], 0.0).is_err());
        assert!(NoiseSchedule::from_alpha_bar(vec![0.5, 0.9], 0.0).is_err());
        assert!(NoiseSchedule::from_alpha_bar(vec![0.9, 1.1], 0.0).is_err());
        assert!(NoiseSchedule::from_alpha_bar(vec![0.9, f64::NAN], 0.0).is_err());
        // boundary cases used by the denoising update are accepted
        assert!(NoiseSchedule::from_alpha_bar(vec![1.0, 0.5], 0.0).is_ok());
        assert!(NoiseSchedule::from_alpha_bar(vec![0.5, 0.5], 0.0).is_ok());
    }

    #[test]
    fn coefficients_rejects_out_of_range_step() {
        let s = default_schedule();
        assert!(matches!(
            s.coefficients(0),
            Err(ScheduleError::StepOutOfRange { .. })
        ));
        assert!(matches!(
            s.coefficients(101),
            Err(ScheduleError::StepOutOfRange { .. })
        ));
        assert!(s.coefficients(1).is_ok());
        assert!(s.coefficients(100).is_ok());
    }

    #[test]
    fn zero_scale_with_unit_abar_prev_zeroes_direction_and_noise() {
        let s = NoiseSchedule::from_alpha_bar(vec![1.0, 0.5], 0.0).unwrap();
        let c = s.coefficients(1).unwrap();
        assert_eq!(c.sqrt_abar_prev, 1.0);
        assert_eq!(c.dir_coeff, 0.0);
        assert_eq!(c.sigma_t, 0.0);
    }
}
