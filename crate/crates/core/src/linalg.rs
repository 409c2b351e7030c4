//! Small dense linear algebra: just enough for benchmark quadratics and
//! orthonormal model generation. Everything here is O(d²)–O(d³) and meant
//! for the d ≤ a-few-dozen regime of the benchmarks.

use crate::random::RandomSource;
use crate::vector::ParamVector;

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be >= 1");
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, v) in diag.iter().enumerate() {
            m.set(i, i, *v);
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> ParamVector {
        ParamVector::from_vec((0..self.rows).map(|i| self.get(i, j)).collect())
    }

    /// y = M · x.
    pub fn matvec(&self, x: &ParamVector) -> ParamVector {
        assert_eq!(x.dim(), self.cols, "matvec dimension mismatch");
        let xs = x.as_slice();
        ParamVector::from_vec(
            (0..self.rows)
                .map(|i| {
                    self.row(i)
                        .iter()
                        .zip(xs.iter())
                        .map(|(a, b)| a * b)
                        .sum()
                })
                .collect(),
        )
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out.data[i * out.cols + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Largest absolute deviation from symmetry, 0 for square symmetric.
    pub fn asymmetry(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "asymmetry requires a square matrix");
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Largest absolute deviation of MᵀM from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        assert_eq!(self.rows, self.cols, "defect requires a square matrix");
        let gram = self.transpose().matmul(self);
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram.get(i, j) - target).abs());
            }
        }
        worst
    }
}

/// d×d matrix of independent standard normals.
pub fn gaussian_matrix(d: usize, rng: &mut RandomSource) -> Matrix {
    Matrix::from_fn(d, d, |_, _| rng.standard_normal())
}

/// Orthonormalizes the columns of `m` by modified Gram–Schmidt with one
/// re-orthogonalization pass.
///
/// MGS produces the thin QR factor with strictly positive R diagonal, so a
/// Gaussian input yields a Haar-distributed orthonormal matrix without any
/// sign correction.
pub fn orthonormalize_columns(m: &Matrix) -> Matrix {
    assert_eq!(m.rows(), m.cols(), "expected a square matrix");
    let d = m.rows();
    let mut cols: Vec<ParamVector> = (0..d).map(|j| m.column(j)).collect();
    for j in 0..d {
        for _pass in 0..2 {
            for i in 0..j {
                let proj = cols[i].dot(&cols[j]);
                cols[j] = cols[j].add_scaled(-proj, &cols[i]);
            }
        }
        let norm = cols[j].norm();
        assert!(
            norm > 1e-12,
            "rank-deficient input to orthonormalize_columns"
        );
        cols[j] = cols[j].scaled(1.0 / norm);
    }
    Matrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Haar-distributed random orthonormal d×d matrix.
pub fn random_orthonormal(d: usize, rng: &mut RandomSource) -> Matrix {
    orthonormalize_columns(&gaussian_matrix(d, rng))
}

/// Symmetric matrix Q·diag(eigs)·Qᵀ with the given spectrum in the basis Q.
pub fn symmetric_from_spectrum(eigs: &[f64], q: &Matrix) -> Matrix {
    let d = eigs.len();
    assert_eq!(q.rows(), d, "basis dimension mismatch");
    assert_eq!(q.cols(), d, "basis dimension mismatch");
    let mut out = Matrix::zeros(d, d);
    for (k, &lam) in eigs.iter().enumerate() {
        if lam == 0.0 {
            continue;
        }
        for i in 0..d {
            let qik = q.get(i, k);
            for j in 0..d {
                let v = out.get(i, j) + lam * qik * q.get(j, k);
                out.set(i, j, v);
            }
        }
    }
    // Clean up rounding so downstream symmetry checks at 1e-12 never trip.
    for i in 0..d {
        for j in (i + 1)..d {
            let s = 0.5 * (out.get(i, j) + out.get(j, i));
            out.set(i, j, s);
            out.set(j, i, s);
        }
    }
    out
}
