//! Run configuration: noise tuning and learning-rate schedules.

use thiserror::Error;

use crate::vector::DEFAULT_EPS_NORM;

/// Default multiplier for the auto-tuned noise level θ = c·η.
pub const NOISE_LEVEL_FACTOR: f64 = 1.0;
/// Default multiplier for the auto-tuned noise period N₀ = ⌈c·η^(−1/2)⌉.
pub const NOISE_PERIOD_FACTOR: f64 = 1.0;
/// Default warmup for the decaying schedule: η_t = η₀ for t ≤ 500, then η₀·500/t.
pub const DEFAULT_WARMUP: usize = 500;

/// Configuration for a single optimizer run.
///
/// `theta` and `noise_period` drive Saddle-NGD's periodic noise injection;
/// `noise_sigma` is the per-step gradient noise of the noisy-GD baseline.
/// The escape guarantees only pin the scalings θ ∝ η and N₀ ∝ η^(−1/2) up
/// to problem-dependent constants, so the multipliers are explicit knobs.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleNgdConfig {
    /// Base step size η (η₀ when a decaying schedule rescales the step).
    pub eta: f64,
    /// Noise standard deviation per coordinate on noise rounds.
    pub theta: f64,
    /// Noise period N₀: rounds with t ≡ 0 (mod N₀) are noise rounds, t = 0 included.
    pub noise_period: usize,
    /// Noisy-GD baseline: per-coordinate standard deviation of the Gaussian
    /// noise added to the gradient every step.
    pub noise_sigma: f64,
    /// Iteration budget.
    pub total_iters: usize,
    /// Gradient norms at or below this threshold normalize to the zero vector.
    pub eps_norm: f64,
    /// Seed for the run's random source.
    pub seed: u64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("expert noise period requires rho > 0 (got {0}); quadratic landscapes need no tuning")]
    NonPositiveRho(f64),
    #[error("expert noise period is undefined for these constants: {0}")]
    OutOfRange(String),
}

impl SaddleNgdConfig {
    /// Auto-tuned configuration: θ = η and N₀ = ⌈η^(−1/2)⌉, with the noisy-GD
    /// baseline's σ defaulting to η as well.
    pub fn auto(eta: f64, total_iters: usize, seed: u64) -> Self {
        Self::auto_with_factors(eta, total_iters, seed, NOISE_LEVEL_FACTOR, NOISE_PERIOD_FACTOR)
    }

    /// Auto-tuning with explicit multipliers: θ = c_theta·η, N₀ = ⌈c_n·η^(−1/2)⌉.
    pub fn auto_with_factors(
        eta: f64,
        total_iters: usize,
        seed: u64,
        c_theta: f64,
        c_n: f64,
    ) -> Self {
        assert!(eta > 0.0 && eta.is_finite(), "eta must be positive");
        assert!(c_theta >= 0.0, "c_theta must be non-negative");
        assert!(c_n > 0.0, "c_n must be positive");
        let noise_period = (c_n / eta.sqrt()).ceil().max(1.0) as usize;
        Self {
            eta,
            theta: c_theta * eta,
            noise_period,
            noise_sigma: eta,
            total_iters,
            eps_norm: DEFAULT_EPS_NORM,
            seed,
        }
    }

    pub fn with_theta(mut self, theta: f64) -> Self {
        assert!(theta >= 0.0 && theta.is_finite(), "theta must be >= 0");
        self.theta = theta;
        self
    }

    pub fn with_noise_period(mut self, noise_period: usize) -> Self {
        assert!(noise_period >= 1, "noise_period must be >= 1");
        self.noise_period = noise_period;
        self
    }

    pub fn with_noise_sigma(mut self, noise_sigma: f64) -> Self {
        assert!(noise_sigma >= 0.0 && noise_sigma.is_finite(), "noise_sigma must be >= 0");
        self.noise_sigma = noise_sigma;
        self
    }

    pub fn with_eps_norm(mut self, eps_norm: f64) -> Self {
        assert!(eps_norm > 0.0, "eps_norm must be positive");
        self.eps_norm = eps_norm;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    /// Expert-mode noise period from the problem constants β (smoothness),
    /// γ (negative-curvature threshold), and ρ (Hessian Lipschitz constant).
    ///
    /// Sets the seeded gradient component to
    /// g₁ = 2η(4β√ρ/γ)²·log(γ²/(8βρ√η)) and returns
    /// N₀ = ⌈(4β/(γ√η))·log(2β√η/g₁)⌉, the smallest period for which the
    /// escape analysis guarantees the gradient norm rises past 2β√η between
    /// consecutive noise rounds.
    pub fn expert_noise_period(
        eta: f64,
        beta: f64,
        gamma: f64,
        rho: f64,
    ) -> Result<usize, ConfigError> {
        assert!(eta > 0.0 && beta > 0.0 && gamma > 0.0, "eta, beta, gamma must be positive");
        if rho <= 0.0 {
            return Err(ConfigError::NonPositiveRho(rho));
        }
        let sqrt_eta = eta.sqrt();
        let log_arg_g1 = gamma * gamma / (8.0 * beta * rho * sqrt_eta);
        if log_arg_g1 <= 1.0 {
            return Err(ConfigError::OutOfRange(format!(
                "gamma^2/(8*beta*rho*sqrt(eta)) = {log_arg_g1} <= 1; decrease eta"
            )));
        }
        let scale = 4.0 * beta * rho.sqrt() / gamma;
        let g1 = 2.0 * eta * scale * scale * log_arg_g1.ln();
        let log_arg_n0 = 2.0 * beta * sqrt_eta / g1;
        if log_arg_n0 <= 1.0 {
            return Err(ConfigError::OutOfRange(format!(
                "seeded component g1 = {g1} already exceeds the escape threshold"
            )));
        }
        let n0 = (4.0 * beta / (gamma * sqrt_eta)) * log_arg_n0.ln();
        Ok(n0.ceil().max(1.0) as usize)
    }
}

/// Learning-rate schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Schedule {
    /// η_t = η₀ for all t.
    Constant { eta0: f64 },
    /// η_t = η₀ for t ≤ warmup, then η₀·warmup/t. Strictly non-increasing.
    WarmupDecay { eta0: f64, warmup: usize },
}

impl Schedule {
    pub fn constant(eta0: f64) -> Self {
        assert!(eta0 > 0.0 && eta0.is_finite(), "eta0 must be positive");
        Schedule::Constant { eta0 }
    }

    pub fn warmup_decay(eta0: f64) -> Self {
        Self::warmup_decay_with(eta0, DEFAULT_WARMUP)
    }

    pub fn warmup_decay_with(eta0: f64, warmup: usize) -> Self {
        assert!(eta0 > 0.0 && eta0.is_finite(), "eta0 must be positive");
        assert!(warmup >= 1, "warmup must be >= 1");
        Schedule::WarmupDecay { eta0, warmup }
    }

    pub fn eta0(&self) -> f64 {
        match *self {
            Schedule::Constant { eta0 } | Schedule::WarmupDecay { eta0, .. } => eta0,
        }
    }

    /// Step size for iteration `t` (0-based).
    pub fn eta_at(&self, t: usize) -> f64 {
        match *self {
            Schedule::Constant { eta0 } => eta0,
            Schedule::WarmupDecay { eta0, warmup } => {
                if t <= warmup {
                    eta0
                } else {
                    eta0 * warmup as f64 / t as f64
                }
            }
        }
    }
}
