//! Objective-function contracts.
//!
//! [`Objective`] is the deterministic contract: exact value and exact
//! analytic gradient. [`StochasticObjective`] provides sample-conditional
//! unbiased gradient estimates for the streaming setting; its minibatch
//! gradient is the plain average of independent single-sample estimates.

use crate::random::RandomSource;
use crate::vector::ParamVector;

/// A deterministic objective f: R^d -> R with an exact analytic gradient.
///
/// Implementations are read-only after construction and safe to evaluate
/// from multiple threads.
///
/// Dimension mismatches are contract violations and panic.
pub trait Objective: Sync {
    fn dim(&self) -> usize;

    /// f(x). Finite and deterministic for fixed `x`.
    fn value(&self, x: &ParamVector) -> f64;

    /// ∇f(x), returned as a fresh vector.
    fn gradient(&self, x: &ParamVector) -> ParamVector;

    /// Exact Hessian-vector product H(x)·v when the objective has one in
    /// closed form. Callers fall back to finite differences on `None`.
    fn hessian_vec(&self, _x: &ParamVector, _v: &ParamVector) -> Option<ParamVector> {
        None
    }
}

/// An objective accessed only through unbiased per-sample gradient estimates.
pub trait StochasticObjective: Sync {
    fn dim(&self) -> usize;

    /// One unbiased estimate of the exact gradient at `x`, conditioned on a
    /// fresh sample drawn from `rng`.
    fn sample_gradient(&self, x: &ParamVector, rng: &mut RandomSource) -> ParamVector;

    /// Average of `batch` independent single-sample estimates.
    ///
    /// Implementations may exploit structure (e.g. hoisting sample-independent
    /// terms) as long as the result equals the plain average up to rounding
    /// and consumes the same random draws in the same order.
    fn minibatch_gradient(
        &self,
        x: &ParamVector,
        batch: usize,
        rng: &mut RandomSource,
    ) -> ParamVector {
        assert!(batch >= 1, "minibatch size must be at least 1");
        let mut acc = self.sample_gradient(x, rng);
        for _ in 1..batch {
            let g = self.sample_gradient(x, rng);
            acc.axpy(1.0, &g);
        }
        acc.scaled(1.0 / batch as f64)
    }
}

/// Degenerate stochastic wrapper: every "sample" returns the exact gradient.
///
/// Useful for driving the stochastic machinery with a deterministic
/// objective, and for tests of the b = 1 edge case.
pub struct ExactStochastic<O: Objective> {
    inner: O,
}

impl<O: Objective> ExactStochastic<O> {
    pub fn new(inner: O) -> Self {
        Self { inner }
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Objective> StochasticObjective for ExactStochastic<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn sample_gradient(&self, x: &ParamVector, _rng: &mut RandomSource) -> ParamVector {
        self.inner.gradient(x)
    }
}
