//! Central finite-difference gradient validation.
//!
//! Every shipped objective must agree with central differences to relative
//! L2 error ≤ 1e-5 at random points; the `check-grad` CLI subcommand and the
//! test suites both go through this module.

use crate::objective::Objective;
use crate::random::RandomSource;
use crate::vector::ParamVector;

/// Step-size rule shared by all finite-difference probes in the crate.
///
/// h = 1e-5 · max(1, ‖x‖) balances truncation against cancellation for f64.
pub fn fd_step(x: &ParamVector) -> f64 {
    1e-5 * x.norm().max(1.0)
}

/// Central-difference gradient: (f(x + h·e_i) − f(x − h·e_i)) / 2h per coordinate.
pub fn central_difference_gradient(obj: &dyn Objective, x: &ParamVector) -> ParamVector {
    let h = fd_step(x);
    let mut point = x.clone();
    let mut out = Vec::with_capacity(x.dim());
    for i in 0..x.dim() {
        let xi = x[i];
        point.as_mut_slice()[i] = xi + h;
        let plus = obj.value(&point);
        point.as_mut_slice()[i] = xi - h;
        let minus = obj.value(&point);
        point.as_mut_slice()[i] = xi;
        out.push((plus - minus) / (2.0 * h));
    }
    ParamVector::from_vec(out)
}

/// Relative L2 error between the analytic and finite-difference gradients at `x`.
pub fn gradient_rel_error(obj: &dyn Objective, x: &ParamVector) -> f64 {
    let analytic = obj.gradient(x);
    let numeric = central_difference_gradient(obj, x);
    let diff = analytic.sub(&numeric).norm();
    let scale = analytic.norm().max(numeric.norm()).max(1e-10);
    diff / scale
}

/// Maximum relative L2 error over `n_points` Gaussian points of the given
/// coordinate scale. Points where both gradients nearly vanish are skipped:
/// relative error is meaningless at exact stationary points.
pub fn max_rel_error_at_random_points(
    obj: &dyn Objective,
    n_points: usize,
    scale: f64,
    rng: &mut RandomSource,
) -> f64 {
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    while checked < n_points {
        let x = rng.normal_vector(obj.dim()).scaled(scale);
        if obj.gradient(&x).norm() < 1e-8 {
            continue; // degenerate point, resample
        }
        worst = worst.max(gradient_rel_error(obj, &x));
        checked += 1;
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::landscapes::QuadraticObjective;

    #[test]
    fn quadratic_gradient_matches_central_differences() {
        let obj = QuadraticObjective::pure_saddle();
        let mut rng = RandomSource::new(11);
        let worst = max_rel_error_at_random_points(&obj, 100, 1.0, &mut rng);
        assert!(worst <= 1e-5, "worst relative error {worst}");
    }

    #[test]
    fn detects_a_wrong_gradient() {
        struct Broken;
        impl Objective for Broken {
            fn dim(&self) -> usize {
                2
            }
            fn value(&self, x: &ParamVector) -> f64 {
                x[0] * x[0] + x[1] * x[1]
            }
            fn gradient(&self, x: &ParamVector) -> ParamVector {
                // deliberately off by a factor in the second coordinate
                ParamVector::from_vec(vec![2.0 * x[0], 3.0 * x[1]])
            }
        }
        let mut rng = RandomSource::new(5);
        let worst = max_rel_error_at_random_points(&Broken, 20, 1.0, &mut rng);
        assert!(worst > 1e-2, "broken gradient slipped through: {worst}");
    }
}
