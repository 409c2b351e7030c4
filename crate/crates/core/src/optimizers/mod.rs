//! First-order optimizers: Saddle-NGD, the noisy-GD baseline, plain GD and
//! NGD, and the run drivers that produce per-iteration traces.
//!
//! The Saddle-NGD update is
//!
//! ```text
//! x_{t+1} = x_t − η·g_t/‖g_t‖ + θ·n_t,   n_t ~ N(0, I_d) if t ≡ 0 (mod N₀), else 0
//! ```
//!
//! Most rounds are noiseless; the periodic Gaussian kick guarantees a
//! component along the most negative curvature direction near saddles, which
//! the normalized updates then amplify. Noise fires at t = 0.

mod config;

pub use config::{
    ConfigError, SaddleNgdConfig, Schedule, DEFAULT_WARMUP, NOISE_LEVEL_FACTOR,
    NOISE_PERIOD_FACTOR,
};

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use thiserror::Error;

use crate::objective::{Objective, StochasticObjective};
use crate::random::RandomSource;
use crate::vector::{normalize, ParamVector};

/// The four algorithms under study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algo {
    /// Plain gradient descent: x − η·g.
    Gd,
    /// Normalized gradient descent: x − η·g/‖g‖, no noise.
    Ngd,
    /// NGD with Gaussian noise injected every `noise_period` rounds.
    SaddleNgd,
    /// Baseline: x − η·(g + σ·n) with fresh Gaussian noise every step.
    NoisyGd,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Gd => "gd",
            Algo::Ngd => "ngd",
            Algo::SaddleNgd => "saddle_ngd",
            Algo::NoisyGd => "noisy_gd",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "gd" => Ok(Algo::Gd),
            "ngd" => Ok(Algo::Ngd),
            "saddle_ngd" | "saddle-ngd" => Ok(Algo::SaddleNgd),
            "noisy_gd" | "noisy-gd" => Ok(Algo::NoisyGd),
            other => Err(format!(
                "unknown algorithm '{other}' (expected gd, ngd, saddle_ngd, noisy_gd)"
            )),
        }
    }
}

/// One per-iteration trace entry.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    /// Iterate index t, strictly increasing from 0.
    pub iterate_index: usize,
    /// Logged metric at x_t (objective value, or e.g. reconstruction error).
    pub value_or_error: f64,
    /// Norm of the (projected) gradient estimate at x_t.
    pub grad_norm: f64,
    /// Step size used by the step leaving x_t.
    pub eta_t: f64,
    /// Whether the step leaving x_t is a noise round.
    pub noisy_step: bool,
    /// Nanoseconds of wall time since the run started.
    pub wall_nanos: u64,
}

/// Run failure: some iterate or gradient stopped being finite.
#[derive(Debug, Error, PartialEq)]
pub enum RunError {
    #[error("non-finite gradient at iteration {iter}")]
    NonFiniteGradient { iter: usize },
    #[error("non-finite iterate after step {iter}")]
    NonFiniteState { iter: usize },
}

/// Final iterate plus the full trace.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub final_x: ParamVector,
    pub trace: Vec<RunRecord>,
}

/// Feasible set for a run: unconstrained, or a product of unit spheres for
/// blockwise-normalized component matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Euclidean,
    /// The stacked vector is a concatenation of `block_len`-dimensional
    /// blocks, each constrained to the unit sphere.
    ProductOfSpheres { block_len: usize },
}

impl Domain {
    fn check(&self, dim: usize) {
        if let Domain::ProductOfSpheres { block_len } = self {
            assert!(*block_len >= 1, "block_len must be >= 1");
            assert_eq!(
                dim % block_len,
                0,
                "dimension {dim} is not a multiple of block length {block_len}"
            );
        }
    }

    /// Projects a gradient onto the tangent space at `x`: per block,
    /// g ← g − (g·u)u. The identity on Euclidean domains.
    pub fn project(&self, x: &ParamVector, g: &ParamVector) -> ParamVector {
        match *self {
            Domain::Euclidean => g.clone(),
            Domain::ProductOfSpheres { block_len } => {
                self.check(x.dim());
                assert_eq!(x.dim(), g.dim(), "project requires equal dimensions");
                let mut out = g.clone();
                let (xs, gs) = (x.as_slice(), g.as_slice());
                for b in (0..x.dim()).step_by(block_len) {
                    let xb = &xs[b..b + block_len];
                    let gb = &gs[b..b + block_len];
                    let inner: f64 = xb.iter().zip(gb.iter()).map(|(a, c)| a * c).sum();
                    let ob = &mut out.as_mut_slice()[b..b + block_len];
                    for (o, xv) in ob.iter_mut().zip(xb.iter()) {
                        *o -= inner * xv;
                    }
                }
                out
            }
        }
    }

    /// Retracts a point back onto the feasible set: per block, u ← u/‖u‖.
    pub fn retract(&self, x: ParamVector) -> ParamVector {
        match *self {
            Domain::Euclidean => x,
            Domain::ProductOfSpheres { block_len } => {
                self.check(x.dim());
                let mut out = x;
                for b in (0..out.dim()).step_by(block_len) {
                    let xb = &mut out.as_mut_slice()[b..b + block_len];
                    let norm: f64 = xb.iter().map(|v| v * v).sum::<f64>().sqrt();
                    // A vanished block divides to NaN and the run driver
                    // reports a non-finite state instead of guessing a point.
                    for v in xb.iter_mut() {
                        *v /= norm;
                    }
                }
                out
            }
        }
    }
}

/// One Saddle-NGD update from iterate `x` with gradient `g` at round `t`,
/// using the step size `cfg.eta`.
pub fn saddle_ngd_step(
    x: &ParamVector,
    g: &ParamVector,
    cfg: &SaddleNgdConfig,
    t: usize,
    rng: &mut RandomSource,
) -> ParamVector {
    saddle_ngd_step_with_eta(x, g, cfg.eta, cfg, t, rng)
}

/// Saddle-NGD update with an explicit step size, for schedule-driven runs.
/// θ and N₀ stay fixed from the configuration while η_t varies.
pub fn saddle_ngd_step_with_eta(
    x: &ParamVector,
    g: &ParamVector,
    eta: f64,
    cfg: &SaddleNgdConfig,
    t: usize,
    rng: &mut RandomSource,
) -> ParamVector {
    let mut next = x.add_scaled(-eta, &normalize(g, cfg.eps_norm));
    if t.is_multiple_of(cfg.noise_period) {
        let noise = rng.normal_vector(x.dim());
        next.axpy(cfg.theta, &noise);
    }
    next
}

/// One noisy-GD update: x − η·(g + σ·n) with fresh Gaussian noise every step.
pub fn noisy_gd_step(
    x: &ParamVector,
    g: &ParamVector,
    eta: f64,
    noise_sigma: f64,
    rng: &mut RandomSource,
) -> ParamVector {
    let noise = rng.normal_vector(x.dim());
    x.add_scaled(-eta, &g.add_scaled(noise_sigma, &noise))
}

/// Average of `batch` independent unbiased gradient estimates at `x`.
pub fn minibatch_gradient(
    sobj: &dyn StochasticObjective,
    x: &ParamVector,
    batch: usize,
    rng: &mut RandomSource,
) -> ParamVector {
    assert!(batch >= 1, "minibatch size must be at least 1");
    sobj.minibatch_gradient(x, batch, rng)
}

fn noise_round(algo: Algo, cfg: &SaddleNgdConfig, t: usize) -> bool {
    match algo {
        Algo::SaddleNgd => t.is_multiple_of(cfg.noise_period),
        Algo::NoisyGd => cfg.noise_sigma != 0.0,
        Algo::Gd | Algo::Ngd => false,
    }
}

/// Shared run loop. `grad` produces the raw (possibly stochastic) gradient
/// estimate; `metric` is the logged scalar.
#[allow(clippy::too_many_arguments)]
fn drive(
    grad: &mut dyn FnMut(&ParamVector, &mut RandomSource) -> ParamVector,
    metric: &dyn Fn(&ParamVector) -> f64,
    x0: &ParamVector,
    algo: Algo,
    cfg: &SaddleNgdConfig,
    schedule: &Schedule,
    domain: Domain,
    log_every: usize,
) -> Result<RunOutcome, RunError> {
    assert!(log_every >= 1, "log_every must be >= 1");
    domain.check(x0.dim());
    let started = Instant::now();
    let mut rng = RandomSource::new(cfg.seed);
    let mut x = x0.clone();
    let mut trace = Vec::new();

    for t in 0..cfg.total_iters {
        let raw = grad(&x, &mut rng);
        if !raw.all_finite() {
            return Err(RunError::NonFiniteGradient { iter: t });
        }
        let g = domain.project(&x, &raw);
        let eta_t = schedule.eta_at(t);
        if t.is_multiple_of(log_every) {
            trace.push(RunRecord {
                iterate_index: t,
                value_or_error: metric(&x),
                grad_norm: g.norm(),
                eta_t,
                noisy_step: noise_round(algo, cfg, t),
                wall_nanos: started.elapsed().as_nanos() as u64,
            });
        }
        let stepped = match algo {
            Algo::Gd => x.add_scaled(-eta_t, &g),
            Algo::Ngd => x.add_scaled(-eta_t, &normalize(&g, cfg.eps_norm)),
            Algo::SaddleNgd => saddle_ngd_step_with_eta(&x, &g, eta_t, cfg, t, &mut rng),
            Algo::NoisyGd => noisy_gd_step(&x, &g, eta_t, cfg.noise_sigma, &mut rng),
        };
        x = domain.retract(stepped);
        if !x.all_finite() {
            return Err(RunError::NonFiniteState { iter: t });
        }
    }

    // Closing record for the final iterate; no step leaves it.
    let raw = grad(&x, &mut rng);
    if !raw.all_finite() {
        return Err(RunError::NonFiniteGradient {
            iter: cfg.total_iters,
        });
    }
    let g = domain.project(&x, &raw);
    trace.push(RunRecord {
        iterate_index: cfg.total_iters,
        value_or_error: metric(&x),
        grad_norm: g.norm(),
        eta_t: schedule.eta_at(cfg.total_iters),
        noisy_step: false,
        wall_nanos: started.elapsed().as_nanos() as u64,
    });

    Ok(RunOutcome { final_x: x, trace })
}

/// Runs `algo` on an exact objective for `cfg.total_iters` steps, logging
/// the objective value and gradient norm at every iterate (including the
/// initial state). Deterministic given `cfg.seed`.
pub fn run_optimizer(
    obj: &dyn Objective,
    x0: &ParamVector,
    algo: Algo,
    cfg: &SaddleNgdConfig,
    schedule: &Schedule,
) -> Result<RunOutcome, RunError> {
    assert_eq!(x0.dim(), obj.dim(), "x0 dimension mismatch");
    drive(
        &mut |x, _rng| obj.gradient(x),
        &|x| obj.value(x),
        x0,
        algo,
        cfg,
        schedule,
        Domain::Euclidean,
        1,
    )
}

/// Runs `algo` with minibatch stochastic gradients, optionally constrained
/// to a product of unit spheres (project to the tangent space, step, then
/// renormalize each block). `metric` is evaluated every `log_every`
/// iterations and at the final iterate.
#[allow(clippy::too_many_arguments)]
pub fn run_stochastic(
    sobj: &dyn StochasticObjective,
    x0: &ParamVector,
    algo: Algo,
    cfg: &SaddleNgdConfig,
    schedule: &Schedule,
    batch: usize,
    domain: Domain,
    metric: &dyn Fn(&ParamVector) -> f64,
    log_every: usize,
) -> Result<RunOutcome, RunError> {
    assert_eq!(x0.dim(), sobj.dim(), "x0 dimension mismatch");
    assert!(batch >= 1, "minibatch size must be at least 1");
    drive(
        &mut |x, rng| sobj.minibatch_gradient(x, batch, rng),
        metric,
        x0,
        algo,
        cfg,
        schedule,
        domain,
        log_every,
    )
}
