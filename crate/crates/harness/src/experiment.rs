//! Seeded experiment grids: configuration, execution over a worker pool,
//! and exact aggregation over repetitions.
//!
//! Every run's seed derives from (base_seed, repeat, algorithm name), so
//! algorithms see independent noise streams while the whole grid stays
//! reproducible. For the ICA experiment the ground-truth model and the
//! initialization derive from (base_seed, repeat) only: both algorithms in
//! a repeat face the same landscape and the comparison is paired.

use std::path::PathBuf;
use std::str::FromStr;

use thiserror::Error;

use saddle_ngd::landscapes::QuadraticObjective;
use saddle_ngd::optimizers::{
    run_optimizer, run_stochastic, Algo, Domain, RunError, RunRecord, SaddleNgdConfig, Schedule,
};
use saddle_ngd::random::derive_seed;
use saddle_ngd::tensor_ica::{online_objective, reconstruction_error, ComponentSet, IcaModel};
use saddle_ngd::{Objective, ParamVector, RandomSource};

use crate::pool;

/// Saddle-NGD noise level for the ICA benchmark, as a fraction of η₀.
///
/// The scaling θ = Θ(η) leaves the constant free; this one is calibrated so
/// the injected kicks are strong enough to leave the tensor objective's
/// saddles quickly but weak enough not to dominate the late, small-step
/// phase of the decaying schedule (θ comparable to η₀ makes the error climb
/// again once η_t has decayed well below θ).
pub const ICA_THETA_FACTOR: f64 = 0.01;

/// Noisy-GD gradient-noise level σ as a fraction of η₀ (every experiment).
pub const NOISY_GD_SIGMA_FACTOR: f64 = 1.0;

/// The benchmark experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// GD vs NGD escaping the pure saddle x₁² − x₂² from a near-origin start.
    PureSaddle,
    /// Saddle-NGD escaping a quadratic saddle with spectrum {+1, …, +1, −1}.
    QuadraticEscape,
    /// Online fourth-order tensor decomposition / ICA benchmark.
    Ica,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::PureSaddle => "pure_saddle",
            ExperimentKind::QuadraticEscape => "quadratic_escape",
            ExperimentKind::Ica => "ica",
        }
    }
}

impl FromStr for ExperimentKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "pure_saddle" | "puresaddle" => Ok(ExperimentKind::PureSaddle),
            "quadratic_escape" | "quadratic-escape" => Ok(ExperimentKind::QuadraticEscape),
            "ica" => Ok(ExperimentKind::Ica),
            other => Err(format!("unknown experiment '{other}'")),
        }
    }
}

/// Which learning-rate schedule to build from η₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleKind {
    Constant,
    /// η_t = η₀ for t ≤ 500, then η₀·500/t. The CLI token is `paper`.
    WarmupDecay,
}

impl ScheduleKind {
    pub fn build(self, eta0: f64) -> Schedule {
        match self {
            ScheduleKind::Constant => Schedule::constant(eta0),
            ScheduleKind::WarmupDecay => Schedule::warmup_decay(eta0),
        }
    }
}

impl FromStr for ScheduleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "constant" => Ok(ScheduleKind::Constant),
            "paper" => Ok(ScheduleKind::WarmupDecay),
            other => Err(format!("unknown schedule '{other}' (expected constant or paper)")),
        }
    }
}

/// Full experiment description. `None` noise fields fall back to the
/// experiment's defaults.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub d: usize,
    pub algos: Vec<Algo>,
    pub eta0: f64,
    pub schedule: ScheduleKind,
    pub batch: usize,
    pub total_iters: usize,
    pub repeats: usize,
    pub base_seed: u64,
    pub log_every: usize,
    /// Saddle-NGD noise level θ; default η₀ (ICA: `ICA_THETA_FACTOR`·η₀).
    pub theta: Option<f64>,
    /// Saddle-NGD noise period N₀; default ⌈η₀^(−1/2)⌉.
    pub noise_period: Option<usize>,
    /// Noisy-GD gradient noise σ; default `NOISY_GD_SIGMA_FACTOR`·η₀.
    pub sigma: Option<f64>,
    pub threads: Option<usize>,
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind) -> Self {
        let base = Self {
            kind,
            d: 10,
            algos: vec![Algo::SaddleNgd, Algo::NoisyGd],
            eta0: 0.1,
            schedule: ScheduleKind::WarmupDecay,
            batch: 500,
            total_iters: 10_000,
            repeats: 10,
            base_seed: 0,
            log_every: 10,
            theta: None,
            noise_period: None,
            sigma: None,
            threads: None,
            out_dir: None,
        };
        match kind {
            ExperimentKind::Ica => base,
            ExperimentKind::PureSaddle => Self {
                d: 2,
                algos: vec![Algo::Gd, Algo::Ngd],
                eta0: 0.01,
                schedule: ScheduleKind::Constant,
                batch: 1,
                total_iters: 2_000,
                repeats: 1,
                log_every: 1,
                ..base
            },
            ExperimentKind::QuadraticEscape => Self {
                d: 10,
                algos: vec![Algo::SaddleNgd, Algo::Ngd],
                eta0: 1e-4,
                schedule: ScheduleKind::Constant,
                batch: 1,
                total_iters: 1_000,
                repeats: 10,
                log_every: 1,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.kind == ExperimentKind::PureSaddle && self.d != 2 {
            return Err("--d: the pure saddle is two-dimensional".into());
        }
        if self.d < 2 {
            return Err(format!("--d must be at least 2, got {}", self.d));
        }
        if self.algos.is_empty() {
            return Err("--algos must name at least one algorithm".into());
        }
        if !(self.eta0 > 0.0 && self.eta0.is_finite()) {
            return Err(format!("--eta0 must be positive, got {}", self.eta0));
        }
        if self.batch == 0 {
            return Err("--batch must be at least 1".into());
        }
        if self.repeats == 0 {
            return Err("--repeats must be at least 1".into());
        }
        if self.log_every == 0 {
            return Err("--log-every must be at least 1".into());
        }
        if let Some(theta) = self.theta {
            if !(theta >= 0.0 && theta.is_finite()) {
                return Err(format!("--theta must be non-negative, got {theta}"));
            }
        }
        if let Some(np) = self.noise_period {
            if np == 0 {
                return Err("--noise-period must be at least 1".into());
            }
        }
        if let Some(sigma) = self.sigma {
            if !(sigma >= 0.0 && sigma.is_finite()) {
                return Err(format!("--sigma must be non-negative, got {sigma}"));
            }
        }
        Ok(())
    }

    fn resolved_theta(&self) -> f64 {
        self.theta.unwrap_or(match self.kind {
            ExperimentKind::Ica => ICA_THETA_FACTOR * self.eta0,
            _ => self.eta0,
        })
    }

    fn resolved_sigma(&self) -> f64 {
        self.sigma.unwrap_or(NOISY_GD_SIGMA_FACTOR * self.eta0)
    }

    fn run_config(&self, seed: u64) -> SaddleNgdConfig {
        let mut cfg = SaddleNgdConfig::auto(self.eta0, self.total_iters, seed)
            .with_theta(self.resolved_theta())
            .with_noise_sigma(self.resolved_sigma());
        if let Some(np) = self.noise_period {
            cfg = cfg.with_noise_period(np);
        }
        cfg
    }
}

/// One aggregated point: statistics of the metric at iteration `t` over the
/// repeats of one algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateRow {
    pub t: usize,
    pub algo: Algo,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub n: usize,
}

/// One run's identity and (metric-valued) trace.
#[derive(Debug, Clone)]
pub struct RawRun {
    pub run_id: String,
    pub seed: u64,
    pub algo: Algo,
    pub repeat: usize,
    pub records: Vec<RunRecord>,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub aggregates: Vec<AggregateRow>,
    pub runs: Vec<RawRun>,
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("invalid configuration: {0}")]
    Usage(String),
    #[error("run {run_id} (seed {seed}) aborted: {source}")]
    RunAborted {
        run_id: String,
        seed: u64,
        #[source]
        source: RunError,
    },
}

fn subsample(records: Vec<RunRecord>, log_every: usize, total_iters: usize) -> Vec<RunRecord> {
    if log_every == 1 {
        return records;
    }
    records
        .into_iter()
        .filter(|r| r.iterate_index % log_every == 0 || r.iterate_index == total_iters)
        .collect()
}

fn single_run(cfg: &ExperimentConfig, algo: Algo, repeat: usize) -> Result<RawRun, ExperimentError> {
    let seed = derive_seed(cfg.base_seed, repeat as u64, algo.name());
    let run_id = format!("{}-r{repeat:03}", algo.name());
    let run_cfg = cfg.run_config(seed);
    let schedule = cfg.schedule.build(cfg.eta0);

    let abort = |source| ExperimentError::RunAborted {
        run_id: run_id.clone(),
        seed,
        source,
    };

    let records = match cfg.kind {
        ExperimentKind::PureSaddle => {
            let obj = QuadraticObjective::pure_saddle();
            let x0 = ParamVector::from_slice(&[1e-3, 1e-3]);
            let out = run_optimizer(&obj, &x0, algo, &run_cfg, &schedule).map_err(abort)?;
            let f0 = obj.value(&ParamVector::zeros(2));
            let mut records = out.trace;
            for r in &mut records {
                r.value_or_error = f0 - r.value_or_error; // logged metric: F(0,0) − F(x_t)
            }
            subsample(records, cfg.log_every, cfg.total_iters)
        }
        ExperimentKind::QuadraticEscape => {
            let mut diag = vec![1.0; cfg.d];
            diag[cfg.d - 1] = -1.0;
            let obj = QuadraticObjective::from_diagonal(&diag);
            let x0 = ParamVector::zeros(cfg.d);
            let out = run_optimizer(&obj, &x0, algo, &run_cfg, &schedule).map_err(abort)?;
            let f0 = obj.value(&x0);
            let mut records = out.trace;
            for r in &mut records {
                r.value_or_error = f0 - r.value_or_error; // value decrease from the saddle
            }
            subsample(records, cfg.log_every, cfg.total_iters)
        }
        ExperimentKind::Ica => {
            let d = cfg.d;
            let model = IcaModel::generate(
                d,
                &mut RandomSource::new(derive_seed(cfg.base_seed, repeat as u64, "ica-model")),
            );
            let x0 = ComponentSet::random_unit(
                d,
                &mut RandomSource::new(derive_seed(cfg.base_seed, repeat as u64, "ica-init")),
            )
            .into_stacked();
            let online = online_objective(model.clone());
            let metric = move |x: &ParamVector| {
                let cs = ComponentSet::from_stacked(d, x.clone())
                    .expect("run state has stacked dimension d²");
                reconstruction_error(&model, &cs)
            };
            let out = run_stochastic(
                &online,
                &x0,
                algo,
                &run_cfg,
                &schedule,
                cfg.batch,
                Domain::ProductOfSpheres { block_len: d },
                &metric,
                cfg.log_every,
            )
            .map_err(abort)?;
            out.trace
        }
    };

    Ok(RawRun {
        run_id,
        seed,
        algo,
        repeat,
        records,
    })
}

fn aggregate(cfg: &ExperimentConfig, runs: &[RawRun]) -> Vec<AggregateRow> {
    let mut algos = cfg.algos.clone();
    algos.sort_by_key(|a| a.name());
    algos.dedup();

    let mut rows = Vec::new();
    for algo in algos {
        let group: Vec<&RawRun> = runs.iter().filter(|r| r.algo == algo).collect();
        if group.is_empty() {
            continue;
        }
        let grid: Vec<usize> = group[0].records.iter().map(|r| r.iterate_index).collect();
        for run in &group {
            debug_assert!(
                run.records
                    .iter()
                    .map(|r| r.iterate_index)
                    .eq(grid.iter().copied()),
                "runs of one algorithm share the logging grid"
            );
        }
        let n = group.len();
        for (slot, &t) in grid.iter().enumerate() {
            let mut sum = 0.0;
            for run in &group {
                sum += run.records[slot].value_or_error;
            }
            let mean = sum / n as f64;
            let std = if n >= 2 {
                let ss: f64 = group
                    .iter()
                    .map(|run| {
                        let d = run.records[slot].value_or_error - mean;
                        d * d
                    })
                    .sum();
                (ss / (n as f64 - 1.0)).sqrt()
            } else {
                0.0
            };
            rows.push(AggregateRow {
                t,
                algo,
                mean,
                std,
                stderr: std / (n as f64).sqrt(),
                n,
            });
        }
    }
    rows.sort_by(|a, b| (a.algo.name(), a.t).cmp(&(b.algo.name(), b.t)));
    rows
}

/// Executes repeats × |algos| runs over the worker pool and aggregates the
/// metric exactly over repeats. Deterministic for a fixed base seed; output
/// is independent of the worker count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    cfg.validate().map_err(ExperimentError::Usage)?;

    let mut jobs: Vec<Box<dyn FnOnce() -> Result<RawRun, ExperimentError> + Send>> = Vec::new();
    for &algo in &cfg.algos {
        for repeat in 0..cfg.repeats {
            let cfg = cfg.clone();
            jobs.push(Box::new(move || single_run(&cfg, algo, repeat)));
        }
    }

    let threads = pool::resolve_threads(cfg.threads);
    let results = pool::run_jobs(jobs, threads);

    let mut runs = Vec::with_capacity(results.len());
    for result in results {
        runs.push(result?);
    }
    runs.sort_by(|a, b| (a.algo.name(), a.repeat).cmp(&(b.algo.name(), b.repeat)));

    let aggregates = aggregate(cfg, &runs);
    Ok(ExperimentOutput { aggregates, runs })
}
