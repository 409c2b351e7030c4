//! Strict-saddle problem parameters.

use thiserror::Error;

/// The constants describing a strict-saddle function: every point either has
/// gradient norm ≥ `nu`, a Hessian eigenvalue ≤ −`gamma`, or lies within `r`
/// of a local minimum around which the function is `alpha`-strongly convex.
/// `beta` is the gradient Lipschitz constant, `rho` the Hessian Lipschitz
/// constant, and `bound_b` a bound on |f|.
///
/// The asymptotic analysis hides polynomial factors in all of these; the
/// artifact surfaces every constant explicitly instead of guessing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrictSaddleParams {
    /// Local strong-convexity modulus around minima (> 0).
    pub alpha: f64,
    /// Negative-curvature threshold (> 0).
    pub gamma: f64,
    /// Gradient-norm threshold (> 0).
    pub nu: f64,
    /// Local-minimum radius (> 0).
    pub r: f64,
    /// Smoothness (gradient Lipschitz) constant (> 0).
    pub beta: f64,
    /// Hessian Lipschitz constant (≥ 0; 0 for quadratics).
    pub rho: f64,
    /// Bound on |f(x)| (> 0).
    pub bound_b: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("{name} must be strictly positive, got {value}")]
    NotPositive { name: &'static str, value: f64 },
    #[error("rho must be non-negative, got {0}")]
    NegativeRho(f64),
    #[error("alpha ({alpha}) must not exceed beta ({beta})")]
    AlphaAboveBeta { alpha: f64, beta: f64 },
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
}

impl StrictSaddleParams {
    pub fn new(
        alpha: f64,
        gamma: f64,
        nu: f64,
        r: f64,
        beta: f64,
        rho: f64,
        bound_b: f64,
    ) -> Result<Self, ParamError> {
        let positive = [
            ("alpha", alpha),
            ("gamma", gamma),
            ("nu", nu),
            ("r", r),
            ("beta", beta),
            ("bound_b", bound_b),
        ];
        for (name, value) in positive {
            if !value.is_finite() {
                return Err(ParamError::NotFinite { name, value });
            }
            if value <= 0.0 {
                return Err(ParamError::NotPositive { name, value });
            }
        }
        if !rho.is_finite() {
            return Err(ParamError::NotFinite {
                name: "rho",
                value: rho,
            });
        }
        if rho < 0.0 {
            return Err(ParamError::NegativeRho(rho));
        }
        if alpha > beta {
            return Err(ParamError::AlphaAboveBeta { alpha, beta });
        }
        Ok(Self {
            alpha,
            gamma,
            nu,
            r,
            beta,
            rho,
            bound_b,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_valid_params() {
        let p = StrictSaddleParams::new(1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 10.0).unwrap();
        assert_eq!(p.beta, 2.0);
    }

    #[test]
    fn rejects_alpha_above_beta() {
        let err = StrictSaddleParams::new(3.0, 1.0, 1.0, 1.0, 2.0, 0.0, 10.0).unwrap_err();
        assert_eq!(
            err,
            ParamError::AlphaAboveBeta {
                alpha: 3.0,
                beta: 2.0
            }
        );
    }

    #[test]
    fn rejects_nonpositive_and_negative_rho() {
        assert!(StrictSaddleParams::new(0.0, 1.0, 1.0, 1.0, 2.0, 0.0, 10.0).is_err());
        assert!(StrictSaddleParams::new(1.0, 1.0, 1.0, 1.0, 2.0, -1.0, 10.0).is_err());
        // rho = 0 is fine: quadratics have exactly Lipschitz-0 Hessians.
        assert!(StrictSaddleParams::new(1.0, 1.0, 1.0, 1.0, 2.0, 0.0, 10.0).is_ok());
    }
}
