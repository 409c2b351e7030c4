//! Saddle-point-aware first-order optimization: normalized gradient descent
//! with periodic noise injection, baselines, benchmark landscapes, and an
//! online fourth-order tensor-decomposition / ICA benchmark.
//!
//! The crate splits into four pieces:
//!
//! - [`vector`], [`random`], [`objective`]: dense parameter vectors, a
//!   seed-deterministic random source, and the objective-function contracts
//!   shared by everything else.
//! - [`optimizers`]: Saddle-NGD (normalized gradient descent with periodic
//!   Gaussian noise injection), a noisy-GD baseline, plain GD/NGD,
//!   learning-rate schedules, minibatch gradients, and the run driver.
//! - [`landscapes`]: quadratic benchmark objectives, the gradient/curvature
//!   region classifier, and matrix-free curvature probes.
//! - [`tensor_ica`]: orthogonal fourth-order tensor decomposition with an
//!   unbiased streaming gradient estimator for the ICA setting.
//!
//! [`oracle`] holds deliberately slow brute-force reference implementations;
//! they exist so tests can cross-check the fast paths and are never called
//! from production code.

pub mod gradcheck;
pub mod landscapes;
pub mod linalg;
pub mod objective;
pub mod optimizers;
pub mod oracle;
pub mod random;
pub mod strict;
pub mod tensor_ica;
pub mod vector;

pub use objective::{ExactStochastic, Objective, StochasticObjective};
pub use random::RandomSource;
pub use vector::{normalize, ParamVector, DEFAULT_EPS_NORM};
