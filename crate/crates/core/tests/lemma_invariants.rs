//! Empirically testable consequences of the convergence analysis, asserted
//! on landscapes where the quantities are computable in closed form.

use saddle_ngd::landscapes::QuadraticObjective;
use saddle_ngd::optimizers::{run_optimizer, saddle_ngd_step, Algo, SaddleNgdConfig, Schedule};
use saddle_ngd::{normalize, Objective, ParamVector, RandomSource};

fn random_spectrum(
    d: usize,
    lo: f64,
    hi: f64,
    rng: &mut RandomSource,
) -> Vec<f64> {
    (0..d).map(|_| rng.uniform_in(lo, hi)).collect()
}

/// One noiseless NGD step on a β-smooth quadratic satisfies
/// f(x') ≤ f(x) − η‖g‖ + βη²/2 whenever ‖g‖ ≥ β√η.
#[test]
fn one_step_descent_inequality_on_random_quadratics() {
    let beta = 2.0;
    let mut rng = RandomSource::new(1001);
    for case in 0..100 {
        let d = 2 + case % 7;
        let mut eigs = random_spectrum(d, -beta, beta, &mut rng);
        eigs[0] = beta * if case % 2 == 0 { 1.0 } else { -1.0 }; // ‖H‖ = β exactly
        let obj = QuadraticObjective::from_spectrum(&eigs, &mut rng);
        let eta = rng.uniform_in(1e-4, 0.1);
        let cfg = SaddleNgdConfig::auto(eta, 1, 0).with_theta(0.0);

        // Sample a point with a large enough gradient.
        let mut x = rng.normal_vector(d);
        let mut g = obj.gradient(&x);
        while g.norm() < beta * eta.sqrt() {
            x = rng.normal_vector(d).scaled(2.0);
            g = obj.gradient(&x);
        }

        let mut probe = RandomSource::new(0);
        let next = saddle_ngd_step(&x, &g, &cfg, 1, &mut probe); // non-noise round
        let lhs = obj.value(&next);
        let rhs = obj.value(&x) - eta * g.norm() + 0.5 * beta * eta * eta;
        assert!(
            lhs <= rhs + 1e-12,
            "case {case}: f(x') = {lhs} exceeds bound {rhs}"
        );
    }
}

/// Noiseless NGD near a strong minimum never leaves the larger of the
/// initial ball and the 2β²η²/α² ball: ‖x_t − x*‖² ≤ max{‖x₀ − x*‖², 2β²η²/α²}.
#[test]
fn local_minimum_stability_over_ten_thousand_steps() {
    let (alpha, beta) = (1.0, 2.0);
    let mut rng = RandomSource::new(2002);
    for &eta in &[0.1, 0.01, 1e-3] {
        for d in [2usize, 6] {
            let mut eigs = random_spectrum(d, alpha, beta, &mut rng);
            eigs[0] = alpha;
            eigs[d - 1] = beta;
            let minimizer = rng.normal_vector(d);
            let obj = QuadraticObjective::from_spectrum_at(&eigs, minimizer.clone(), &mut rng);
            let cfg = SaddleNgdConfig::auto(eta, 1, 0).with_theta(0.0);

            let start_dist = 0.5;
            let x0 = minimizer.add_scaled(start_dist, &normalize(&rng.normal_vector(d), 1e-300));
            let bound = (start_dist * start_dist)
                .max(2.0 * beta * beta * eta * eta / (alpha * alpha))
                + 1e-12;

            let mut probe = RandomSource::new(0);
            let mut x = x0;
            for t in 0..10_000usize {
                let g = obj.gradient(&x);
                x = saddle_ngd_step(&x, &g, &cfg, (t % 7) + 1, &mut probe);
                let dist_sq = x.sub(&minimizer).dot(&x.sub(&minimizer));
                assert!(
                    dist_sq <= bound,
                    "eta={eta} d={d} t={t}: ||x-x*||^2 = {dist_sq} > {bound}"
                );
            }
        }
    }
}

/// Near a saddle of a quadratic with λ_min = −1, periodic noise plus
/// normalized steps push the gradient norm past 2β√η within 10·η^(−1/2)
/// steps and decrease f, in at least 9 of 10 seeded runs. A noiseless NGD
/// run started exactly at the saddle never moves.
#[test]
fn saddle_escape_with_noise_and_frozen_control_without() {
    let d = 10usize;
    let eta: f64 = 1e-4;
    let beta: f64 = 1.0; // spectrum {+1, ..., +1, −1}
    let mut diag = vec![1.0; d];
    diag[d - 1] = -1.0;
    let obj = QuadraticObjective::from_diagonal(&diag);
    let x0 = ParamVector::zeros(d);
    let escape_threshold = 2.0 * beta * eta.sqrt();
    let budget = 10 * (1.0 / eta.sqrt()).ceil() as usize; // 1000
    let schedule = Schedule::constant(eta);

    let mut escapes = 0;
    for seed in 0..10u64 {
        let cfg = SaddleNgdConfig::auto(eta, budget, seed);
        assert_eq!(cfg.noise_period, 100);
        let out = run_optimizer(&obj, &x0, Algo::SaddleNgd, &cfg, &schedule).unwrap();
        let hit = out
            .trace
            .iter()
            .find(|r| r.grad_norm >= escape_threshold);
        if let Some(rec) = hit {
            assert!(rec.iterate_index <= budget);
            if rec.value_or_error <= obj.value(&x0) - 0.01 * eta {
                escapes += 1;
            }
        }
    }
    assert!(escapes >= 9, "only {escapes}/10 seeds escaped");

    // Control: noiseless NGD parked on the stationary point stays put.
    let cfg = SaddleNgdConfig::auto(eta, budget, 0).with_theta(0.0);
    let out = run_optimizer(&obj, &x0, Algo::Ngd, &cfg, &schedule).unwrap();
    assert_eq!(out.final_x, x0);
    assert!(out.trace.iter().all(|r| r.grad_norm == 0.0));
}

/// GD's decrease eventually overtakes NGD's on the pure saddle once the
/// iterate leaves the flat neighborhood: observable within 2000 steps.
#[test]
fn gd_prevails_once_gradients_are_large() {
    let obj = QuadraticObjective::pure_saddle();
    let x0 = ParamVector::from_slice(&[1e-3, 1e-3]);
    let eta = 0.01;
    let cfg = SaddleNgdConfig::auto(eta, 2000, 0).with_theta(0.0);
    let sched = Schedule::constant(eta);
    let ngd = run_optimizer(&obj, &x0, Algo::Ngd, &cfg, &sched).unwrap();
    let gd = run_optimizer(&obj, &x0, Algo::Gd, &cfg, &sched).unwrap();

    let crossover = ngd
        .trace
        .iter()
        .zip(gd.trace.iter())
        .find(|(n, g)| -g.value_or_error > -n.value_or_error);
    let (n_rec, _) = crossover.expect("GD never overtook NGD within 2000 steps");
    assert!(n_rec.iterate_index > 10, "crossover should not be immediate");
}
