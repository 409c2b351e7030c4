//! Matrix-free minimum-eigenvalue estimation.
//!
//! Power iteration on the shifted operator c·I − H, where H is applied only
//! through central finite-difference Hessian-vector products
//! Hv ≈ (∇f(x+εv̂) − ∇f(x−εv̂))·‖v‖/(2ε). This keeps classification usable
//! at any dimension; the dense Jacobi solver in [`crate::oracle`] is the
//! test-time cross-check for d ≤ 20.

use thiserror::Error;

use crate::gradcheck::fd_step;
use crate::objective::Objective;
use crate::random::RandomSource;
use crate::vector::{normalize, ParamVector};

/// Iterations spent estimating an upper bound on ‖H‖ before shifting.
const NORM_BOUND_ITERS: usize = 40;
/// Safety inflation applied to the estimated spectral norm.
const NORM_BOUND_INFLATION: f64 = 1.5;
/// Residual tolerance, relative to the shift c.
const RESIDUAL_RTOL: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum EigenError {
    #[error(
        "power iteration inconclusive: residual {residual:.3e} above {tolerance:.3e} \
         after {iters} iterations"
    )]
    NotConverged {
        iters: usize,
        residual: f64,
        tolerance: f64,
    },
    #[error("non-finite Hessian-vector product encountered")]
    NonFinite,
}

/// Estimated smallest Hessian eigenvalue and its unit eigenvector.
#[derive(Debug, Clone)]
pub struct MinEigenEstimate {
    pub lambda_min: f64,
    pub direction: ParamVector,
}

/// H(x)·v through central differences of the gradient; exact for quadratics
/// up to rounding.
pub fn hessian_vec_fd(obj: &dyn Objective, x: &ParamVector, v: &ParamVector) -> ParamVector {
    let vnorm = v.norm();
    if vnorm == 0.0 {
        return ParamVector::zeros(v.dim());
    }
    let unit = v.scaled(1.0 / vnorm);
    let eps = fd_step(x);
    let plus = obj.gradient(&x.add_scaled(eps, &unit));
    let minus = obj.gradient(&x.add_scaled(-eps, &unit));
    plus.sub(&minus).scaled(vnorm / (2.0 * eps))
}

/// Smallest eigenvalue of ∇²f(x) by shifted power iteration with an
/// internally estimated shift, using at most `iters` shifted iterations.
///
/// Returns the Rayleigh quotient vᵀHv and the unit direction v once the
/// shifted residual falls below 1e-6·c; errs out as inconclusive otherwise
/// rather than guessing.
pub fn min_eigen_estimate(
    obj: &dyn Objective,
    x: &ParamVector,
    iters: usize,
    rng: &mut RandomSource,
) -> Result<MinEigenEstimate, EigenError> {
    assert!(iters >= 1, "iteration budget must be >= 1");
    min_eigen_estimate_with_bound(obj, x, iters, None, rng)
}

/// Same as [`min_eigen_estimate`] but with a caller-supplied upper bound on
/// the Hessian spectral norm (skips the estimation stage).
pub fn min_eigen_estimate_with_bound(
    obj: &dyn Objective,
    x: &ParamVector,
    iters: usize,
    hnorm_bound: Option<f64>,
    rng: &mut RandomSource,
) -> Result<MinEigenEstimate, EigenError> {
    let dim = obj.dim();
    let mut v = normalize(&rng.normal_vector(dim), 1e-300);

    let bound = match hnorm_bound {
        Some(b) => {
            assert!(b > 0.0 && b.is_finite(), "spectral norm bound must be positive");
            b
        }
        None => {
            // Power iteration on H itself: applying H twice per two rounds is
            // a power method on H², so ‖Hv‖ approaches max|λ| regardless of
            // the sign of the dominant eigenvalue.
            let mut s_max = 0.0f64;
            for _ in 0..NORM_BOUND_ITERS {
                let w = hessian_vec_fd(obj, x, &v);
                if !w.all_finite() {
                    return Err(EigenError::NonFinite);
                }
                let s = w.norm();
                if s <= 1e-300 {
                    break; // numerically zero curvature along every probed direction
                }
                s_max = s_max.max(s);
                v = w.scaled(1.0 / s);
            }
            NORM_BOUND_INFLATION * s_max + 1e-8
        }
    };

    // Shifted stage: the dominant eigenpair of c·I − H is (c − λ_min, v_min).
    // Fresh random start: the bound stage leaves v near the dominant
    // eigenvector of H, which is an exact eigenvector of the shifted
    // operator and would trip the residual test on the wrong eigenpair.
    v = normalize(&rng.normal_vector(dim), 1e-300);
    let c = bound;
    let tolerance = RESIDUAL_RTOL * c;
    for it in 1..=iters {
        let hv = hessian_vec_fd(obj, x, &v);
        if !hv.all_finite() {
            return Err(EigenError::NonFinite);
        }
        let bv = v.scaled(c).sub(&hv);
        let mu = v.dot(&bv);
        let residual = bv.add_scaled(-mu, &v).norm();
        if residual < tolerance {
            return Ok(MinEigenEstimate {
                lambda_min: c - mu,
                direction: v,
            });
        }
        let norm = bv.norm();
        if norm <= 1e-300 {
            // B annihilates v: v is an exact eigenvector with eigenvalue 0.
            return Ok(MinEigenEstimate {
                lambda_min: c,
                direction: v,
            });
        }
        let _ = it;
        v = bv.scaled(1.0 / norm);
    }

    // One final residual evaluation for the error report.
    let hv = hessian_vec_fd(obj, x, &v);
    let bv = v.scaled(c).sub(&hv);
    let mu = v.dot(&bv);
    let residual = bv.add_scaled(-mu, &v).norm();
    Err(EigenError::NotConverged {
        iters,
        residual,
        tolerance,
    })
}
