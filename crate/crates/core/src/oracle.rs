//! Brute-force reference implementations for test-time cross-checks.
//!
//! Nothing here is called from production paths: the dense fourth-order
//! tensor is O(d⁴) memory and the Jacobi eigensolver is O(d³) per sweep.
//! They exist so the closed-form fast paths elsewhere can be validated
//! against an independent computation at small d.
#![allow(clippy::needless_range_loop)]

use crate::linalg::Matrix;
use crate::tensor_ica::{ComponentSet, IcaModel};

/// Dense symmetric fourth-order tensor over R^d, stored as a flat d⁴ array.
#[derive(Debug, Clone)]
pub struct DenseTensor {
    d: usize,
    entries: Vec<f64>,
}

impl DenseTensor {
    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1, "tensor dimension must be >= 1");
        assert!(d <= 16, "dense tensors are a small-d oracle only");
        Self {
            d,
            entries: vec![0.0; d * d * d * d],
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    fn idx(&self, i1: usize, i2: usize, i3: usize, i4: usize) -> usize {
        ((i1 * self.d + i2) * self.d + i3) * self.d + i4
    }

    pub fn get(&self, i1: usize, i2: usize, i3: usize, i4: usize) -> f64 {
        self.entries[self.idx(i1, i2, i3, i4)]
    }

    /// self += v⊗v⊗v⊗v.
    pub fn add_fourth_power(&mut self, v: &[f64]) {
        assert_eq!(v.len(), self.d);
        let d = self.d;
        for i1 in 0..d {
            for i2 in 0..d {
                for i3 in 0..d {
                    for i4 in 0..d {
                        let idx = self.idx(i1, i2, i3, i4);
                        self.entries[idx] += v[i1] * v[i2] * v[i3] * v[i4];
                    }
                }
            }
        }
    }

    /// Full multilinear contraction T(u, v, z, w).
    pub fn contract(&self, u: &[f64], v: &[f64], z: &[f64], w: &[f64]) -> f64 {
        assert!(u.len() == self.d && v.len() == self.d && z.len() == self.d && w.len() == self.d);
        let d = self.d;
        let mut total = 0.0;
        for i1 in 0..d {
            for i2 in 0..d {
                for i3 in 0..d {
                    for i4 in 0..d {
                        total += self.get(i1, i2, i3, i4) * u[i1] * v[i2] * z[i3] * w[i4];
                    }
                }
            }
        }
        total
    }

    pub fn sub(&self, other: &DenseTensor) -> DenseTensor {
        assert_eq!(self.d, other.d);
        DenseTensor {
            d: self.d,
            entries: self
                .entries
                .iter()
                .zip(other.entries.iter())
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum()
    }
}

/// T = ∑_k a_k⊗4 for the model's components, materialized entry by entry.
pub fn dense_model_tensor(model: &IcaModel) -> DenseTensor {
    let mut t = DenseTensor::zeros(model.dim());
    for k in 0..model.dim() {
        t.add_fourth_power(model.component(k).as_slice());
    }
    t
}

/// T(u, u, v, v) by full dense contraction.
pub fn dense_pair_value(model: &IcaModel, u: &[f64], v: &[f64]) -> f64 {
    dense_model_tensor(model).contract(u, u, v, v)
}

/// ∑_{i≠j} T(u_i, u_i, u_j, u_j) by full dense contraction over ordered pairs.
pub fn dense_objective_value(model: &IcaModel, u: &ComponentSet) -> f64 {
    let t = dense_model_tensor(model);
    let d = model.dim();
    let mut total = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                total += t.contract(u.component(i), u.component(i), u.component(j), u.component(j));
            }
        }
    }
    total
}

/// (‖T − ∑_i u_i⊗4‖_F)² / ‖T‖_F² with both tensors materialized.
pub fn dense_reconstruction_error(model: &IcaModel, u: &ComponentSet) -> f64 {
    let t = dense_model_tensor(model);
    let mut approx = DenseTensor::zeros(model.dim());
    for i in 0..model.dim() {
        approx.add_fourth_power(u.component(i));
    }
    t.sub(&approx).frobenius_sq() / t.frobenius_sq()
}

/// All eigenvalues of a symmetric matrix by cyclic Jacobi rotations,
/// sorted ascending. Reliable for the d ≤ 20 oracle regime.
pub fn jacobi_eigenvalues(m: &Matrix) -> Vec<f64> {
    assert_eq!(m.rows(), m.cols(), "jacobi requires a square matrix");
    assert!(
        m.asymmetry() <= 1e-9,
        "jacobi requires a symmetric matrix (defect {})",
        m.asymmetry()
    );
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();

    let frob: f64 = a
        .iter()
        .flat_map(|row| row.iter())
        .map(|v| v * v)
        .sum::<f64>()
        .sqrt();
    let stop = 1e-14 * frob.max(1e-300);

    for _sweep in 0..200 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off += a[i][j] * a[i][j];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{random_orthonormal, symmetric_from_spectrum};
    use crate::random::RandomSource;

    #[test]
    fn jacobi_recovers_a_known_spectrum() {
        let mut rng = RandomSource::new(13);
        let spectrum = [-2.5, -0.25, 0.0, 1.0, 4.0];
        let q = random_orthonormal(5, &mut rng);
        let h = symmetric_from_spectrum(&spectrum, &q);
        let eigs = jacobi_eigenvalues(&h);
        for (got, want) in eigs.iter().zip(spectrum.iter()) {
            assert!((got - want).abs() <= 1e-10, "{got} vs {want}");
        }
    }

    #[test]
    fn jacobi_on_diagonal_matrix_is_exact() {
        let h = Matrix::diagonal(&[3.0, -1.0, 2.0]);
        assert_eq!(jacobi_eigenvalues(&h), vec![-1.0, 2.0, 3.0]);
    }

    #[test]
    fn dense_tensor_contraction_on_identity_components() {
        // T = ∑ e_k⊗4: T(u,u,v,v) = ∑_k u_k² v_k².
        let model = IcaModel::identity(3);
        let t = dense_model_tensor(&model);
        let u = [1.0, 2.0, 0.5];
        let v = [0.0, 1.0, -1.0];
        let want: f64 = (0..3).map(|k| u[k] * u[k] * v[k] * v[k]).sum();
        assert!((t.contract(&u, &u, &v, &v) - want).abs() <= 1e-12);
        assert!((t.frobenius_sq() - 3.0).abs() <= 1e-12);
    }
}
