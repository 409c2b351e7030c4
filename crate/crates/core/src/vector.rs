//! Dense real parameter vectors and the gradient-direction normalization.

use std::fmt;
use std::ops::Index;

/// Below this Euclidean norm a gradient is treated as zero when normalizing.
///
/// At an exact stationary point only injected noise should move the iterate,
/// so the normalized direction degenerates to the zero vector instead of
/// producing NaN.
pub const DEFAULT_EPS_NORM: f64 = 1e-12;

/// A dense `d`-dimensional real vector; the optimizer state and gradient type.
///
/// The dimension is fixed at construction. Binary operations panic on
/// mismatched dimensions, which is always a caller bug.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    data: Vec<f64>,
}

impl ParamVector {
    pub fn from_vec(data: Vec<f64>) -> Self {
        assert!(!data.is_empty(), "ParamVector requires dimension >= 1");
        Self { data }
    }

    pub fn from_slice(data: &[f64]) -> Self {
        Self::from_vec(data.to_vec())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "ParamVector requires dimension >= 1");
        Self {
            data: vec![0.0; dim],
        }
    }

    /// Standard basis vector e_k.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "basis index {k} out of range for dimension {dim}");
        let mut v = Self::zeros(dim);
        v.data[k] = 1.0;
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "dot product requires equal dimensions"
        );
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "add requires equal dimensions");
        Self {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim(), "sub requires equal dimensions");
        Self {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// `self + c * other`, returned as a new vector.
    pub fn add_scaled(&self, c: f64, other: &Self) -> Self {
        assert_eq!(
            self.dim(),
            other.dim(),
            "add_scaled requires equal dimensions"
        );
        Self {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + c * b)
                .collect(),
        }
    }

    /// In-place `self += c * other`; internal hot-loop helper.
    pub(crate) fn axpy(&mut self, c: f64, other: &Self) {
        assert_eq!(self.dim(), other.dim(), "axpy requires equal dimensions");
        for (a, b) in self.data.iter_mut().zip(other.data.iter()) {
            *a += c * b;
        }
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

impl Index<usize> for ParamVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.data[i]
    }
}

impl fmt::Display for ParamVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.data.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

/// Gradient direction ĝ = g/‖g‖, with the zero vector below `eps_norm`.
///
/// The degenerate branch keeps exact stationary points fixed under noiseless
/// updates: movement there comes only from injected noise.
pub fn normalize(g: &ParamVector, eps_norm: f64) -> ParamVector {
    assert!(eps_norm > 0.0, "eps_norm must be positive");
    let n = g.norm();
    if n > eps_norm {
        g.scaled(1.0 / n)
    } else {
        ParamVector::zeros(g.dim())
    }
}
