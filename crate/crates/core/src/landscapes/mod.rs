//! Benchmark objectives with known structure and the strict-saddle region
//! classifier.
//!
//! A point is classified by checking, in order: large gradient
//! (‖∇f‖ ≥ β√η), negative curvature (λ_min(∇²f) ≤ −γ), and otherwise
//! proximity to a local minimum. The three regions partition the space;
//! boundaries belong to the earlier-checked region.

mod eigen;

pub use eigen::{
    hessian_vec_fd, min_eigen_estimate, min_eigen_estimate_with_bound, EigenError,
    MinEigenEstimate,
};

use thiserror::Error;

use crate::linalg::{random_orthonormal, symmetric_from_spectrum, Matrix};
use crate::objective::Objective;
use crate::random::RandomSource;
use crate::strict::StrictSaddleParams;
use crate::vector::ParamVector;

/// Iteration budget handed to the eigenvalue probe by the classifier.
const CLASSIFY_EIGEN_ITERS: usize = 20_000;
/// Fixed probe seed so classification is a deterministic function of its inputs.
const CLASSIFY_PROBE_SEED: u64 = 0x5add_1e5e_ed00_0001;

/// f(x) = C + ½(x−x̄)ᵀH(x−x̄) with symmetric H; gradient H(x−x̄), exact.
#[derive(Debug, Clone)]
pub struct QuadraticObjective {
    hessian: Matrix,
    offset: ParamVector,
    constant: f64,
}

#[derive(Debug, Error)]
pub enum LandscapeError {
    #[error("hessian must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("hessian asymmetry {defect:.3e} exceeds 1e-12")]
    Asymmetric { defect: f64 },
    #[error("offset dimension {offset} does not match hessian dimension {hessian}")]
    OffsetMismatch { offset: usize, hessian: usize },
}

impl QuadraticObjective {
    pub fn new(hessian: Matrix, offset: ParamVector, constant: f64) -> Result<Self, LandscapeError> {
        if hessian.rows() != hessian.cols() {
            return Err(LandscapeError::NotSquare {
                rows: hessian.rows(),
                cols: hessian.cols(),
            });
        }
        let defect = hessian.asymmetry();
        if defect > 1e-12 {
            return Err(LandscapeError::Asymmetric { defect });
        }
        if offset.dim() != hessian.rows() {
            return Err(LandscapeError::OffsetMismatch {
                offset: offset.dim(),
                hessian: hessian.rows(),
            });
        }
        Ok(Self {
            hessian,
            offset,
            constant,
        })
    }

    /// ½xᵀ·diag(d)·x centered at the origin.
    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::new(
            Matrix::diagonal(diag),
            ParamVector::zeros(diag.len()),
            0.0,
        )
        .expect("diagonal matrices are symmetric")
    }

    /// The pure saddle F(x₁, x₂) = x₁² − x₂², i.e. H = diag(2, −2).
    pub fn pure_saddle() -> Self {
        Self::from_diagonal(&[2.0, -2.0])
    }

    /// Quadratic with the given spectrum in a random orthonormal basis,
    /// centered at the origin.
    pub fn from_spectrum(eigs: &[f64], rng: &mut RandomSource) -> Self {
        let q = random_orthonormal(eigs.len(), rng);
        Self::new(
            symmetric_from_spectrum(eigs, &q),
            ParamVector::zeros(eigs.len()),
            0.0,
        )
        .expect("spectral synthesis is symmetric by construction")
    }

    /// Same, centered at `offset`.
    pub fn from_spectrum_at(eigs: &[f64], offset: ParamVector, rng: &mut RandomSource) -> Self {
        let q = random_orthonormal(eigs.len(), rng);
        Self::new(symmetric_from_spectrum(eigs, &q), offset, 0.0)
            .expect("spectral synthesis is symmetric by construction")
    }

    pub fn hessian(&self) -> &Matrix {
        &self.hessian
    }

    pub fn offset(&self) -> &ParamVector {
        &self.offset
    }
}

impl Objective for QuadraticObjective {
    fn dim(&self) -> usize {
        self.offset.dim()
    }

    fn value(&self, x: &ParamVector) -> f64 {
        let d = x.sub(&self.offset);
        self.constant + 0.5 * d.dot(&self.hessian.matvec(&d))
    }

    fn gradient(&self, x: &ParamVector) -> ParamVector {
        self.hessian.matvec(&x.sub(&self.offset))
    }

    fn hessian_vec(&self, _x: &ParamVector, v: &ParamVector) -> Option<ParamVector> {
        Some(self.hessian.matvec(v))
    }
}

/// Which strict-saddle scenario a point falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegionKind {
    /// ‖∇f(x)‖ ≥ β√η.
    LargeGradient,
    /// Small gradient and λ_min(∇²f(x)) ≤ −γ.
    Saddle,
    /// Neither: the complement, near a local minimum for strict-saddle f.
    NearLocalMin,
}

impl RegionKind {
    pub fn name(self) -> &'static str {
        match self {
            RegionKind::LargeGradient => "LargeGradient",
            RegionKind::Saddle => "Saddle",
            RegionKind::NearLocalMin => "NearLocalMin",
        }
    }
}

/// Region label plus the quantity that triggered it: the gradient norm for
/// [`RegionKind::LargeGradient`], the estimated λ_min otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionLabel {
    pub kind: RegionKind,
    pub witness: f64,
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("eigenvalue estimation inconclusive: {0}")]
    Eigen(#[from] EigenError),
}

/// Classifies `x` into exactly one region.
///
/// Boundary cases use ≥ for the gradient test and ≤ for the curvature test,
/// so threshold points land in the earlier-checked region. The curvature
/// probe is deterministic (fixed internal seed) and reports an explicit
/// inconclusive error instead of guessing when power iteration does not
/// converge.
pub fn classify_region(
    obj: &dyn Objective,
    x: &ParamVector,
    params: &StrictSaddleParams,
    eta: f64,
) -> Result<RegionLabel, ClassifyError> {
    assert!(eta > 0.0 && eta.is_finite(), "eta must be positive");
    let grad_norm = obj.gradient(x).norm();
    if grad_norm >= params.beta * eta.sqrt() {
        return Ok(RegionLabel {
            kind: RegionKind::LargeGradient,
            witness: grad_norm,
        });
    }
    let mut probe_rng = RandomSource::new(CLASSIFY_PROBE_SEED);
    let est = min_eigen_estimate(obj, x, CLASSIFY_EIGEN_ITERS, &mut probe_rng)?;
    if est.lambda_min <= -params.gamma {
        Ok(RegionLabel {
            kind: RegionKind::Saddle,
            witness: est.lambda_min,
        })
    } else {
        Ok(RegionLabel {
            kind: RegionKind::NearLocalMin,
            witness: est.lambda_min,
        })
    }
}

/// ‖∇f(x) − [∇f(x₀) + H(x₀)(x−x₀)]‖: how far the gradient strays from the
/// quadratic model built at x₀.
///
/// For a function with ρ-Lipschitz Hessians this is at most (ρ/2)‖x−x₀‖²;
/// identically ~0 for quadratics. Uses the objective's exact Hessian-vector
/// product when available, finite differences otherwise.
pub fn quadratic_approx_error(obj: &dyn Objective, x0: &ParamVector, x: &ParamVector) -> f64 {
    let u = x.sub(x0);
    let hu = obj
        .hessian_vec(x0, &u)
        .unwrap_or_else(|| hessian_vec_fd(obj, x0, &u));
    let model = obj.gradient(x0).add(&hu);
    obj.gradient(x).sub(&model).norm()
}
