//! Orthogonal fourth-order tensor decomposition and the online ICA benchmark.
//!
//! The target tensor is T = ∑_k a_k⊗4 for an orthonormal basis {a_k}. Its
//! components are recovered by minimizing ∑_{i≠j} T(u_i, u_i, u_j, u_j) over
//! unit vectors u_i, a strict-saddle objective whose local minima are all
//! global. The decomposition is unique up to permutations and sign flips.
//!
//! In the online ICA setting the tensor is never formed: samples y = A·x
//! with Rademacher x drive an unbiased estimator of each pair term
//! T(u, u, v, v). The estimator here is derived from the Rademacher
//! fourth-moment identity
//! E[x_i x_j x_k x_l] = δ_ij δ_kl + δ_ik δ_jl + δ_il δ_jk − 2δ_ijkl,
//! which gives E[(u·y)²(v·y)²] = ‖u‖²‖v‖² + 2(u·v)² − 2∑_k(a_k·u)²(a_k·v)²
//! and hence the closed form in [`unbiased_pair_estimate`]. Everything is
//! computed from inner products; the d⁴ tensor is materialized only by the
//! test oracle.

use thiserror::Error;

use crate::linalg::{random_orthonormal, Matrix};
use crate::objective::{Objective, StochasticObjective};
use crate::random::RandomSource;
use crate::vector::{normalize, ParamVector};

/// Ground-truth model: an orthonormal mixing matrix A whose columns a_k are
/// the tensor components.
#[derive(Debug, Clone)]
pub struct IcaModel {
    dim: usize,
    components: Vec<ParamVector>,
}

#[derive(Debug, Error)]
pub enum TensorIcaError {
    #[error("expected {expected} components of dimension {expected}, got {got}")]
    BadShape { expected: usize, got: usize },
    #[error("components are not orthonormal: worst deviation {defect:.3e} exceeds 1e-10")]
    NotOrthonormal { defect: f64 },
    #[error("stacked component vector has length {got}, expected d² = {expected}")]
    BadStackedLength { got: usize, expected: usize },
}

impl IcaModel {
    /// Haar-random orthonormal model: QR of a Gaussian matrix with the
    /// factor signed so R's diagonal is positive. Seed-deterministic.
    pub fn generate(dim: usize, rng: &mut RandomSource) -> Self {
        assert!(dim >= 2, "model dimension must be >= 2");
        let q = random_orthonormal(dim, rng);
        let components = (0..dim).map(|k| q.column(k)).collect();
        Self::from_components(components).expect("QR output is orthonormal")
    }

    /// Model with the standard basis as components (A = I).
    pub fn identity(dim: usize) -> Self {
        assert!(dim >= 2, "model dimension must be >= 2");
        Self {
            dim,
            components: (0..dim).map(|k| ParamVector::basis(dim, k)).collect(),
        }
    }

    pub fn from_components(components: Vec<ParamVector>) -> Result<Self, TensorIcaError> {
        let dim = components.len();
        if dim < 2 || components.iter().any(|c| c.dim() != dim) {
            return Err(TensorIcaError::BadShape {
                expected: dim,
                got: components.iter().map(|c| c.dim()).max().unwrap_or(0),
            });
        }
        let mut defect = 0.0f64;
        for i in 0..dim {
            for j in i..dim {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((components[i].dot(&components[j]) - target).abs());
            }
        }
        if defect > 1e-10 {
            return Err(TensorIcaError::NotOrthonormal { defect });
        }
        Ok(Self { dim, components })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, k: usize) -> &ParamVector {
        &self.components[k]
    }

    pub fn components(&self) -> &[ParamVector] {
        &self.components
    }

    /// The mixing matrix A with the components as columns.
    pub fn mixing_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim, self.dim, |i, k| self.components[k][i])
    }

    /// y = A·x = ∑_k x_k a_k.
    pub fn mix(&self, x: &ParamVector) -> ParamVector {
        assert_eq!(x.dim(), self.dim, "mix dimension mismatch");
        let mut y = vec![0.0; self.dim];
        self.mix_into(x.as_slice(), &mut y);
        ParamVector::from_vec(y)
    }

    fn mix_into(&self, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        for (k, a) in self.components.iter().enumerate() {
            let xk = x[k];
            for (yi, ai) in y.iter_mut().zip(a.iter()) {
                *yi += xk * ai;
            }
        }
    }
}

/// One observation y = A·x with Rademacher source x.
#[derive(Debug, Clone)]
pub struct IcaSample {
    pub y: ParamVector,
}

/// Draws y = A·x with a fresh Rademacher x.
pub fn draw_sample(model: &IcaModel, rng: &mut RandomSource) -> IcaSample {
    let x = rng.rademacher_vector(model.dim());
    IcaSample { y: model.mix(&x) }
}

/// T(u, u, v, v) = ∑_k (a_k·u)²(a_k·v)², computed componentwise.
pub fn exact_pair_value(model: &IcaModel, u: &ParamVector, v: &ParamVector) -> f64 {
    assert_eq!(u.dim(), model.dim(), "pair value dimension mismatch");
    assert_eq!(v.dim(), model.dim(), "pair value dimension mismatch");
    model
        .components
        .iter()
        .map(|a| {
            let au = a.dot(u);
            let av = a.dot(v);
            au * au * av * av
        })
        .sum()
}

/// Single-sample unbiased estimate of [`exact_pair_value`]:
/// t̂(u, v; y) = (‖u‖²‖v‖² + 2(u·v)² − (u·y)²(v·y)²) / 2.
pub fn unbiased_pair_estimate(sample: &IcaSample, u: &ParamVector, v: &ParamVector) -> f64 {
    let y = &sample.y;
    assert_eq!(u.dim(), y.dim(), "estimate dimension mismatch");
    assert_eq!(v.dim(), y.dim(), "estimate dimension mismatch");
    let uu = u.dot(u);
    let vv = v.dot(v);
    let uv = u.dot(v);
    let uy = u.dot(y);
    let vy = v.dot(y);
    0.5 * (uu * vv + 2.0 * uv * uv - uy * uy * vy * vy)
}

/// d component estimates u_1..u_d stacked into one optimizer vector of
/// length d², block i holding u_i.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentSet {
    dim: usize,
    stacked: ParamVector,
}

impl ComponentSet {
    pub fn from_stacked(dim: usize, stacked: ParamVector) -> Result<Self, TensorIcaError> {
        if stacked.dim() != dim * dim {
            return Err(TensorIcaError::BadStackedLength {
                got: stacked.dim(),
                expected: dim * dim,
            });
        }
        Ok(Self { dim, stacked })
    }

    /// U = A: the ground-truth components as the estimate.
    pub fn from_model(model: &IcaModel) -> Self {
        let mut data = Vec::with_capacity(model.dim() * model.dim());
        for k in 0..model.dim() {
            data.extend_from_slice(model.component(k).as_slice());
        }
        Self {
            dim: model.dim(),
            stacked: ParamVector::from_vec(data),
        }
    }

    /// Independent Gaussian components normalized to unit length;
    /// seed-deterministic. The standard experiment initialization.
    pub fn random_unit(dim: usize, rng: &mut RandomSource) -> Self {
        assert!(dim >= 2, "component set dimension must be >= 2");
        let mut data = Vec::with_capacity(dim * dim);
        for _ in 0..dim {
            let u = normalize(&rng.normal_vector(dim), 1e-300);
            data.extend_from_slice(u.as_slice());
        }
        Self {
            dim,
            stacked: ParamVector::from_vec(data),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn component(&self, i: usize) -> &[f64] {
        &self.stacked.as_slice()[i * self.dim..(i + 1) * self.dim]
    }

    pub fn stacked(&self) -> &ParamVector {
        &self.stacked
    }

    pub fn into_stacked(self) -> ParamVector {
        self.stacked
    }

    /// Worst deviation of a component norm from 1.
    pub fn unit_norm_defect(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                let n: f64 = self.component(i).iter().map(|v| v * v).sum::<f64>().sqrt();
                (n - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Inner products P[k][i] = a_k·u_i for all components, as a dim×dim
/// row-major table (rows indexed by model component k).
fn projection_table(model: &IcaModel, stacked: &[f64]) -> Vec<f64> {
    let d = model.dim();
    let mut p = vec![0.0; d * d];
    for (k, a) in model.components.iter().enumerate() {
        let ak = a.as_slice();
        for i in 0..d {
            let u = &stacked[i * d..(i + 1) * d];
            p[k * d + i] = ak.iter().zip(u.iter()).map(|(x, y)| x * y).sum();
        }
    }
    p
}

/// The offline decomposition objective over stacked component sets:
/// f(U) = ∑_{i≠j} T(u_i, u_i, u_j, u_j), with ordered pairs so each
/// unordered pair counts twice.
#[derive(Debug, Clone)]
pub struct OfflineTensorObjective {
    model: IcaModel,
}

impl OfflineTensorObjective {
    pub fn new(model: IcaModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &IcaModel {
        &self.model
    }
}

/// Builds the offline objective for a model.
pub fn offline_objective(model: IcaModel) -> OfflineTensorObjective {
    OfflineTensorObjective::new(model)
}

impl Objective for OfflineTensorObjective {
    fn dim(&self) -> usize {
        self.model.dim() * self.model.dim()
    }

    fn value(&self, x: &ParamVector) -> f64 {
        assert_eq!(x.dim(), self.dim(), "value dimension mismatch");
        let d = self.model.dim();
        let p = projection_table(&self.model, x.as_slice());
        // ∑_{i≠j} ∑_k P_ki² P_kj² = ∑_k [(∑_i P_ki²)² − ∑_i P_ki⁴].
        let mut total = 0.0;
        for k in 0..d {
            let row = &p[k * d..(k + 1) * d];
            let s: f64 = row.iter().map(|v| v * v).sum();
            let q: f64 = row.iter().map(|v| v * v * v * v).sum();
            total += s * s - q;
        }
        total
    }

    fn gradient(&self, x: &ParamVector) -> ParamVector {
        assert_eq!(x.dim(), self.dim(), "gradient dimension mismatch");
        let d = self.model.dim();
        let p = projection_table(&self.model, x.as_slice());
        // Block i: 2·∑_{j≠i} ∑_k 2(a_k·u_i)(a_k·u_j)² a_k
        //        = 4·∑_k P_ki(S_k − P_ki²)·a_k with S_k = ∑_j P_kj².
        let mut grad = vec![0.0; d * d];
        for k in 0..d {
            let row = &p[k * d..(k + 1) * d];
            let s: f64 = row.iter().map(|v| v * v).sum();
            let ak = self.model.component(k).as_slice();
            for i in 0..d {
                let coeff = 4.0 * row[i] * (s - row[i] * row[i]);
                if coeff == 0.0 {
                    continue;
                }
                let block = &mut grad[i * d..(i + 1) * d];
                for (g, a) in block.iter_mut().zip(ak.iter()) {
                    *g += coeff * a;
                }
            }
        }
        ParamVector::from_vec(grad)
    }
}

/// The streaming form of the decomposition objective: unbiased per-sample
/// gradients of ∑_{i≠j} t̂(u_i, u_j; y), averaging to the offline gradient.
#[derive(Debug, Clone)]
pub struct OnlineIcaObjective {
    model: IcaModel,
}

impl OnlineIcaObjective {
    pub fn new(model: IcaModel) -> Self {
        Self { model }
    }

    pub fn model(&self) -> &IcaModel {
        &self.model
    }

    /// Gradient of φ_y(U) = ∑_{i≠j} t̂(u_i, u_j; y) for a given sample.
    ///
    /// Block i is 2·∑_{j≠i} [‖u_j‖²u_i + 2(u_i·u_j)u_j − (u_i·y)(u_j·y)²y].
    pub fn sample_gradient_at(&self, x: &ParamVector, sample: &IcaSample) -> ParamVector {
        assert_eq!(x.dim(), self.dim(), "gradient dimension mismatch");
        let d = self.model.dim();
        let mut grad = vec![0.0; d * d];
        self.deterministic_part(x.as_slice(), &mut grad);
        self.accumulate_sample_part(x.as_slice(), sample.y.as_slice(), 2.0, &mut grad);
        ParamVector::from_vec(grad)
    }

    /// The sample-independent terms 2[(s − ‖u_i‖²)u_i + 2(∑_j (u_i·u_j)u_j − ‖u_i‖²u_i)].
    fn deterministic_part(&self, u: &[f64], out: &mut [f64]) {
        let d = self.model.dim();
        // Gram matrix G_ij = u_i·u_j and its trace.
        let mut gram = vec![0.0; d * d];
        let mut trace = 0.0;
        for i in 0..d {
            let ui = &u[i * d..(i + 1) * d];
            for j in i..d {
                let uj = &u[j * d..(j + 1) * d];
                let dot: f64 = ui.iter().zip(uj.iter()).map(|(a, b)| a * b).sum();
                gram[i * d + j] = dot;
                gram[j * d + i] = dot;
            }
            trace += gram[i * d + i];
        }
        for i in 0..d {
            let gii = gram[i * d + i];
            let block = &mut out[i * d..(i + 1) * d];
            // 2(s − G_ii)u_i − 4·G_ii·u_i, then + 4·∑_j G_ij u_j.
            let self_coeff = 2.0 * (trace - gii) - 4.0 * gii;
            for (o, v) in block.iter_mut().zip(u[i * d..(i + 1) * d].iter()) {
                *o += self_coeff * v;
            }
            for j in 0..d {
                let gij = gram[i * d + j];
                if gij == 0.0 {
                    continue;
                }
                let uj = &u[j * d..(j + 1) * d];
                for (o, v) in block.iter_mut().zip(uj.iter()) {
                    *o += 4.0 * gij * v;
                }
            }
        }
    }

    /// Adds `weight`·[−p_i(w − p_i²)·y] to each block i, with p_i = u_i·y
    /// and w = ∑_j p_j².
    fn accumulate_sample_part(&self, u: &[f64], y: &[f64], weight: f64, out: &mut [f64]) {
        let d = self.model.dim();
        let mut p = vec![0.0; d];
        let mut w = 0.0;
        for i in 0..d {
            let ui = &u[i * d..(i + 1) * d];
            let dot: f64 = ui.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
            p[i] = dot;
            w += dot * dot;
        }
        for i in 0..d {
            let coeff = -weight * p[i] * (w - p[i] * p[i]);
            if coeff == 0.0 {
                continue;
            }
            let block = &mut out[i * d..(i + 1) * d];
            for (o, yv) in block.iter_mut().zip(y.iter()) {
                *o += coeff * yv;
            }
        }
    }
}

impl StochasticObjective for OnlineIcaObjective {
    fn dim(&self) -> usize {
        self.model.dim() * self.model.dim()
    }

    fn sample_gradient(&self, x: &ParamVector, rng: &mut RandomSource) -> ParamVector {
        let sample = draw_sample(&self.model, rng);
        self.sample_gradient_at(x, &sample)
    }

    /// Hoisted minibatch: the sample-independent terms are computed once and
    /// only the y-dependent parts are averaged. Equal to the plain average
    /// of per-sample estimates up to rounding, with identical random draws.
    fn minibatch_gradient(
        &self,
        x: &ParamVector,
        batch: usize,
        rng: &mut RandomSource,
    ) -> ParamVector {
        assert!(batch >= 1, "minibatch size must be at least 1");
        assert_eq!(x.dim(), self.dim(), "gradient dimension mismatch");
        let d = self.model.dim();
        let u = x.as_slice();
        let mut grad = vec![0.0; d * d];
        self.deterministic_part(u, &mut grad);
        let weight = 2.0 / batch as f64;
        let mut xsrc = vec![0.0; d];
        let mut y = vec![0.0; d];
        for _ in 0..batch {
            let rademacher = rng.rademacher_vector(d);
            xsrc.copy_from_slice(rademacher.as_slice());
            self.model.mix_into(&xsrc, &mut y);
            self.accumulate_sample_part(u, &y, weight, &mut grad);
        }
        ParamVector::from_vec(grad)
    }
}

/// Builds the streaming objective for a model.
pub fn online_objective(model: IcaModel) -> OnlineIcaObjective {
    OnlineIcaObjective::new(model)
}

/// Squared relative Frobenius reconstruction error
/// E = (‖T − ∑_i u_i⊗4‖_F)² / ‖T‖_F², in closed form:
/// E = (d − 2∑_{k,i}(a_k·u_i)⁴ + ∑_{i,j}(u_i·u_j)⁴) / d.
///
/// Uses ‖T‖_F² = d and ⟨a⊗4, b⊗4⟩ = (a·b)⁴; no tensor is materialized.
pub fn reconstruction_error(model: &IcaModel, u: &ComponentSet) -> f64 {
    assert_eq!(model.dim(), u.dim(), "reconstruction dimension mismatch");
    let d = model.dim();
    let p = projection_table(model, u.stacked().as_slice());
    let cross: f64 = p.iter().map(|v| v * v * v * v).sum();
    let mut gram4 = 0.0;
    for i in 0..d {
        let ui = u.component(i);
        for j in 0..d {
            let uj = u.component(j);
            let dot: f64 = ui.iter().zip(uj.iter()).map(|(a, b)| a * b).sum();
            gram4 += dot * dot * dot * dot;
        }
    }
    (d as f64 - 2.0 * cross + gram4) / d as f64
}

/// True when |M| is a permutation matrix to within `tol`: exactly one entry
/// of magnitude ≈1 per row and column, all else ≈0. Applied to AᵀU it tests
/// whether U recovers the components up to permutation and sign flips.
pub fn is_signed_permutation(m: &Matrix, tol: f64) -> bool {
    let n = m.rows();
    if m.cols() != n {
        return false;
    }
    let mut col_used = vec![false; n];
    for i in 0..n {
        let mut hits = 0;
        for (j, used) in col_used.iter_mut().enumerate() {
            let a = m.get(i, j).abs();
            if (a - 1.0).abs() <= tol {
                if *used {
                    return false;
                }
                *used = true;
                hits += 1;
            } else if a > tol {
                return false;
            }
        }
        if hits != 1 {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gradcheck::max_rel_error_at_random_points;
    use crate::optimizers::Domain;

    fn rotated_45(model: &IcaModel) -> ComponentSet {
        // u1 = (a1 + a2)/√2, u2 = (−a1 + a2)/√2.
        let inv = 1.0 / 2.0_f64.sqrt();
        let a1 = model.component(0);
        let a2 = model.component(1);
        let u1 = a1.scaled(inv).add_scaled(inv, a2);
        let u2 = a1.scaled(-inv).add_scaled(inv, a2);
        let mut data = u1.into_vec();
        data.extend_from_slice(u2.as_slice());
        ComponentSet::from_stacked(2, ParamVector::from_vec(data)).unwrap()
    }

    #[test]
    fn generated_models_are_orthonormal_and_deterministic() {
        for d in [2usize, 5, 10] {
            let mut rng = RandomSource::new(2024);
            let model = IcaModel::generate(d, &mut rng);
            let defect = model.mixing_matrix().orthonormality_defect();
            assert!(defect <= 1e-10, "defect {defect} at d={d}");
        }
        let a = IcaModel::generate(4, &mut RandomSource::new(5));
        let b = IcaModel::generate(4, &mut RandomSource::new(5));
        for k in 0..4 {
            assert_eq!(a.component(k), b.component(k));
        }
    }

    #[test]
    fn haar_angle_is_uniform() {
        // Angle of the first column at d = 2 should be uniform on [0, 2π):
        // Kolmogorov–Smirnov statistic over 1e4 draws stays below 0.02.
        let n = 10_000usize;
        let mut rng = RandomSource::new(314);
        let mut angles: Vec<f64> = (0..n)
            .map(|_| {
                let m = IcaModel::generate(2, &mut rng);
                let a1 = m.component(0);
                let mut angle = a1[1].atan2(a1[0]);
                if angle < 0.0 {
                    angle += std::f64::consts::TAU;
                }
                angle / std::f64::consts::TAU
            })
            .collect();
        angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut ks = 0.0f64;
        for (i, a) in angles.iter().enumerate() {
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            ks = ks.max((a - lo).abs()).max((hi - a).abs());
        }
        assert!(ks <= 0.02, "KS statistic {ks}");
    }

    #[test]
    fn samples_are_sign_vectors_under_identity_mixing() {
        let model = IcaModel::identity(3);
        let mut rng = RandomSource::new(1);
        for _ in 0..100 {
            let s = draw_sample(&model, &mut rng);
            assert!(s.y.iter().all(|v| *v == 1.0 || *v == -1.0));
        }
    }

    #[test]
    fn samples_have_norm_sqrt_d() {
        let mut rng = RandomSource::new(2);
        let model = IcaModel::generate(6, &mut rng);
        for _ in 0..100 {
            let s = draw_sample(&model, &mut rng);
            assert!((s.y.dot(&s.y) - 6.0).abs() <= 1e-10);
        }
    }

    #[test]
    fn sample_second_moment_is_identity() {
        let d = 4usize;
        let n = 100_000usize;
        let mut rng = RandomSource::new(8);
        let model = IcaModel::generate(d, &mut rng);
        let mut acc = vec![0.0f64; d * d];
        for _ in 0..n {
            let s = draw_sample(&model, &mut rng);
            for i in 0..d {
                for j in 0..d {
                    acc[i * d + j] += s.y[i] * s.y[j];
                }
            }
        }
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((acc[i * d + j] / n as f64 - target).abs());
            }
        }
        assert!(worst <= 0.05, "E[yyᵀ] deviation {worst}");
    }

    #[test]
    fn pair_values_on_the_components_themselves() {
        let mut rng = RandomSource::new(3);
        let model = IcaModel::generate(5, &mut rng);
        let a1 = model.component(0).clone();
        let a2 = model.component(1).clone();
        assert!((exact_pair_value(&model, &a1, &a1) - 1.0).abs() <= 1e-12);
        assert!(exact_pair_value(&model, &a1, &a2).abs() <= 1e-12);
    }

    #[test]
    fn estimator_is_constant_one_in_the_analytic_case() {
        // A = I, u = v = e1: t̂ = (1 + 2 − y1⁴)/2 = 1 for every sample.
        let model = IcaModel::identity(2);
        let e1 = ParamVector::basis(2, 0);
        let mut rng = RandomSource::new(10);
        for _ in 0..50 {
            let s = draw_sample(&model, &mut rng);
            assert_eq!(unbiased_pair_estimate(&s, &e1, &e1), 1.0);
        }
    }

    #[test]
    fn estimator_vanishes_for_zero_u() {
        let mut rng = RandomSource::new(11);
        let model = IcaModel::generate(3, &mut rng);
        let zero = ParamVector::zeros(3);
        let v = rng.normal_vector(3);
        for _ in 0..20 {
            let s = draw_sample(&model, &mut rng);
            assert_eq!(unbiased_pair_estimate(&s, &zero, &zero), 0.0);
            // u = 0, v arbitrary: every term carries a factor of u.
            assert_eq!(unbiased_pair_estimate(&s, &zero, &v), 0.0);
        }
    }

    #[test]
    fn estimator_mean_matches_exact_value() {
        let mut rng = RandomSource::new(12);
        let model = IcaModel::generate(4, &mut rng);
        let u = normalize(&rng.normal_vector(4), 1e-300);
        let v = normalize(&rng.normal_vector(4), 1e-300);
        let exact = exact_pair_value(&model, &u, &v);
        let n = 50_000usize;
        let (mut mean, mut m2) = (0.0f64, 0.0f64);
        for i in 0..n {
            let s = draw_sample(&model, &mut rng);
            let est = unbiased_pair_estimate(&s, &u, &v);
            let delta = est - mean;
            mean += delta / (i + 1) as f64;
            m2 += delta * (est - mean);
        }
        let se = (m2 / (n as f64 - 1.0) / n as f64).sqrt();
        assert!(
            (mean - exact).abs() <= 3.0 * se.max(1e-12),
            "mean {mean}, exact {exact}, se {se}"
        );
    }

    #[test]
    fn objective_vanishes_at_ground_truth_and_signed_permutations() {
        let mut rng = RandomSource::new(13);
        let model = IcaModel::generate(4, &mut rng);
        let obj = offline_objective(model.clone());
        let truth = ComponentSet::from_model(&model);
        assert!(obj.value(truth.stacked()).abs() <= 1e-12);

        // Permute components and flip signs: still a global minimum.
        let perm = [2usize, 0, 3, 1];
        let signs = [1.0, -1.0, -1.0, 1.0];
        let mut data = Vec::new();
        for (slot, &src) in perm.iter().enumerate() {
            data.extend(model.component(src).scaled(signs[slot]).iter());
        }
        let permuted = ComponentSet::from_stacked(4, ParamVector::from_vec(data)).unwrap();
        assert!(obj.value(permuted.stacked()).abs() <= 1e-12);
        assert!(reconstruction_error(&model, &permuted).abs() <= 1e-12);
    }

    #[test]
    fn forty_five_degree_rotation_hand_values() {
        let mut rng = RandomSource::new(14);
        let model = IcaModel::generate(2, &mut rng);
        let rotated = rotated_45(&model);
        let u1 = ParamVector::from_slice(rotated.component(0));
        let u2 = ParamVector::from_slice(rotated.component(1));
        // Every projection squared is 1/2: pair value 1/2, objective 1,
        // reconstruction error (2 − 2·1 + 2)/2 = 1.
        assert!((exact_pair_value(&model, &u1, &u2) - 0.5).abs() <= 1e-12);
        let obj = offline_objective(model.clone());
        assert!((obj.value(rotated.stacked()) - 1.0).abs() <= 1e-12);
        assert!((reconstruction_error(&model, &rotated) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn offline_gradient_matches_finite_differences() {
        let mut rng = RandomSource::new(15);
        let model = IcaModel::generate(4, &mut rng);
        let obj = offline_objective(model);
        let worst = max_rel_error_at_random_points(&obj, 30, 1.0, &mut rng);
        assert!(worst <= 1e-5, "worst relative error {worst}");
    }

    #[test]
    fn offline_gradient_matches_naive_double_sum() {
        // Independent slow evaluation of 2·∑_{j≠i} ∑_k 2(a_k·u_i)(a_k·u_j)² a_k.
        let mut rng = RandomSource::new(16);
        let model = IcaModel::generate(3, &mut rng);
        let obj = offline_objective(model.clone());
        let x = rng.normal_vector(9);
        let fast = obj.gradient(&x);
        let d = 3usize;
        let mut slow = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                if j == i {
                    continue;
                }
                let ui = ParamVector::from_slice(&x.as_slice()[i * d..(i + 1) * d]);
                let uj = ParamVector::from_slice(&x.as_slice()[j * d..(j + 1) * d]);
                for k in 0..d {
                    let ak = model.component(k);
                    let coeff = 2.0 * 2.0 * ak.dot(&ui) * ak.dot(&uj).powi(2);
                    for (s, a) in slow[i * d..(i + 1) * d].iter_mut().zip(ak.iter()) {
                        *s += coeff * a;
                    }
                }
            }
        }
        let slow = ParamVector::from_vec(slow);
        assert!(fast.sub(&slow).norm() <= 1e-12 * slow.norm().max(1.0));
    }

    #[test]
    fn online_mean_gradient_matches_offline_gradient() {
        let d = 4usize;
        let mut rng = RandomSource::new(17);
        let model = IcaModel::generate(d, &mut rng);
        let offline = offline_objective(model.clone());
        let online = online_objective(model);
        let x = ComponentSet::random_unit(d, &mut rng).into_stacked();
        let exact = offline.gradient(&x);

        let n = 20_000usize;
        let dim = d * d;
        let mut mean = vec![0.0f64; dim];
        let mut m2 = vec![0.0f64; dim];
        for i in 0..n {
            let g = online.sample_gradient(&x, &mut rng);
            for c in 0..dim {
                let delta = g[c] - mean[c];
                mean[c] += delta / (i + 1) as f64;
                m2[c] += delta * (g[c] - mean[c]);
            }
        }
        for c in 0..dim {
            let se = (m2[c] / (n as f64 - 1.0) / n as f64).sqrt();
            assert!(
                (mean[c] - exact[c]).abs() <= 3.0 * se.max(1e-12),
                "coordinate {c}: mean {} vs exact {}",
                mean[c],
                exact[c]
            );
        }
    }

    #[test]
    fn hoisted_minibatch_equals_average_of_samples() {
        let d = 4usize;
        let mut rng = RandomSource::new(18);
        let model = IcaModel::generate(d, &mut rng);
        let online = online_objective(model.clone());
        let x = ComponentSet::random_unit(d, &mut rng).into_stacked();

        let seed = 777u64;
        let batch = 7usize;
        let fast = online.minibatch_gradient(&x, batch, &mut RandomSource::new(seed));

        let mut rng2 = RandomSource::new(seed);
        let mut acc = ParamVector::zeros(d * d);
        for _ in 0..batch {
            let s = draw_sample(&model, &mut rng2);
            acc = acc.add(&online.sample_gradient_at(&x, &s));
        }
        let slow = acc.scaled(1.0 / batch as f64);
        assert!(fast.sub(&slow).norm() <= 1e-12 * slow.norm().max(1.0));
    }

    #[test]
    fn projected_gradient_vanishes_at_ground_truth() {
        let mut rng = RandomSource::new(19);
        let model = IcaModel::generate(5, &mut rng);
        let obj = offline_objective(model.clone());
        let truth = ComponentSet::from_model(&model);
        let g = obj.gradient(truth.stacked());
        let domain = Domain::ProductOfSpheres { block_len: 5 };
        let tangent = domain.project(truth.stacked(), &g);
        assert!(tangent.norm() <= 1e-10, "projected norm {}", tangent.norm());
    }

    #[test]
    fn reconstruction_error_zero_at_truth_and_invariant_under_relabeling() {
        let mut rng = RandomSource::new(20);
        let model = IcaModel::generate(5, &mut rng);
        let truth = ComponentSet::from_model(&model);
        assert!(reconstruction_error(&model, &truth).abs() <= 1e-12);

        let u = ComponentSet::random_unit(5, &mut rng);
        let base = reconstruction_error(&model, &u);
        let perm = [4usize, 2, 0, 1, 3];
        let signs = [-1.0, 1.0, -1.0, 1.0, -1.0];
        let mut data = Vec::new();
        for (slot, &src) in perm.iter().enumerate() {
            data.extend(u.component(src).iter().map(|v| v * signs[slot]));
        }
        let relabeled = ComponentSet::from_stacked(5, ParamVector::from_vec(data)).unwrap();
        let moved = reconstruction_error(&model, &relabeled);
        assert!((base - moved).abs() <= 1e-12, "{base} vs {moved}");
    }

    #[test]
    fn signed_permutation_detector() {
        let mut m = Matrix::zeros(3, 3);
        m.set(0, 2, -1.0);
        m.set(1, 0, 1.0);
        m.set(2, 1, 1.0);
        assert!(is_signed_permutation(&m, 1e-4));
        m.set(0, 0, 0.3);
        assert!(!is_signed_permutation(&m, 1e-4));
    }
}
