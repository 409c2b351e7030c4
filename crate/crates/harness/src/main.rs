//! Command-line benchmark runner.
//!
//! Subcommands: `ica`, `puresaddle`, `quadratic-escape`, `check-grad`,
//! `classify`. Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use saddle_ngd::gradcheck::max_rel_error_at_random_points;
use saddle_ngd::landscapes::{classify_region, QuadraticObjective};
use saddle_ngd::optimizers::Algo;
use saddle_ngd::strict::StrictSaddleParams;
use saddle_ngd::tensor_ica::{offline_objective, IcaModel};
use saddle_ngd::{Objective, ParamVector, RandomSource};

use saddle_ngd_harness::csvio::emit_csv;
use saddle_ngd_harness::experiment::{
    run_experiment, ExperimentConfig, ExperimentError, ExperimentKind, ScheduleKind,
};

const USAGE: &str = "\
saddle-ngd — saddle-escape optimizer benchmarks

USAGE:
    saddle-ngd <SUBCOMMAND> [FLAGS]

SUBCOMMANDS:
    ica                 online tensor-decomposition / ICA benchmark
    puresaddle          GD vs NGD on the pure saddle x1^2 - x2^2
    quadratic-escape    Saddle-NGD escape from a quadratic saddle
    check-grad <obj>    finite-difference gradient check (exit 0 iff <= 1e-5)
    classify <obj> <point>
                        strict-saddle region of a point
    help                print this text

EXPERIMENT FLAGS (defaults depend on the subcommand):
    --d N               problem dimension
    --eta0 F            base step size
    --theta F           Saddle-NGD noise level (default: auto from eta0)
    --noise-period N    Saddle-NGD noise period (default: ceil(eta0^-1/2))
    --sigma F           noisy-GD gradient noise (default: eta0)
    --batch N           minibatch size (ica)
    --iters N           iteration budget
    --repeats N         seeded repetitions
    --seed N            base seed
    --algos a,b         subset of gd,ngd,saddle_ngd,noisy_gd
    --schedule S        constant | paper (the latter: eta0 for t<=500, then 500/t)
    --log-every N       metric logging cadence
    --out DIR           output directory (default results/)
    --threads N         worker cap (or env SADDLE_NGD_THREADS)
    --config FILE       key=value file; flags override it

CHECK-GRAD / CLASSIFY FLAGS:
    --points N --scale F --d N --seed N --diag v1,v2,...
    --eta F --alpha F --beta F --gamma F --nu F --r F --rho F --bound-b F

OBJECTIVES for check-grad / classify:
    puresaddle | quadratic (see --diag) | tensor (see --d, --seed)
";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match dispatch(&args) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            eprintln!();
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
    }
}

/// Ok(exit code) for completed commands, Err(message) for usage errors.
fn dispatch(args: &[String]) -> Result<ExitCode, String> {
    let Some(sub) = args.first() else {
        return Err("missing subcommand".into());
    };
    let rest = &args[1..];
    match sub.as_str() {
        "ica" => run_experiment_command(ExperimentKind::Ica, rest),
        "puresaddle" => run_experiment_command(ExperimentKind::PureSaddle, rest),
        "quadratic-escape" => run_experiment_command(ExperimentKind::QuadraticEscape, rest),
        "check-grad" => check_grad_command(rest),
        "classify" => classify_command(rest),
        "help" | "--help" | "-h" => {
            print!("{USAGE}");
            Ok(ExitCode::SUCCESS)
        }
        other => Err(format!("unknown subcommand '{other}'")),
    }
}

/// Parses `--key value` pairs, expanding `--config FILE` in place so that
/// later flags override file entries.
fn parse_flags(args: &[String]) -> Result<Vec<(String, String)>, String> {
    let mut pairs = Vec::new();
    let mut it = args.iter();
    while let Some(arg) = it.next() {
        let Some(key) = arg.strip_prefix("--") else {
            return Err(format!("unexpected argument '{arg}'"));
        };
        let Some(value) = it.next() else {
            return Err(format!("flag --{key} expects a value"));
        };
        if key == "config" {
            let text = std::fs::read_to_string(value)
                .map_err(|e| format!("--config {value}: {e}"))?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((k, v)) = line.split_once('=') else {
                    return Err(format!(
                        "--config {value}: line {} is not key=value",
                        lineno + 1
                    ));
                };
                pairs.push((k.trim().replace('_', "-"), v.trim().to_string()));
            }
        } else {
            pairs.push((key.replace('_', "-"), value.to_string()));
        }
    }
    Ok(pairs)
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value
        .parse::<T>()
        .map_err(|e| format!("--{key} {value}: {e}"))
}

fn parse_algos(value: &str) -> Result<Vec<Algo>, String> {
    let mut algos = Vec::new();
    for part in value.split(',').filter(|p| !p.is_empty()) {
        algos.push(Algo::from_str(part.trim())?);
    }
    if algos.is_empty() {
        return Err("--algos: empty list".into());
    }
    Ok(algos)
}

fn parse_point(value: &str) -> Result<ParamVector, String> {
    let coords: Result<Vec<f64>, String> = value
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| format!("point '{value}': {e}"))
        })
        .collect();
    let coords = coords?;
    if coords.is_empty() {
        return Err("point must have at least one coordinate".into());
    }
    Ok(ParamVector::from_vec(coords))
}

fn run_experiment_command(kind: ExperimentKind, args: &[String]) -> Result<ExitCode, String> {
    let mut cfg = ExperimentConfig::new(kind);
    let mut out_dir = PathBuf::from("results");
    for (key, value) in parse_flags(args)? {
        match key.as_str() {
            "d" => cfg.d = parse_value(&key, &value)?,
            "eta0" => cfg.eta0 = parse_value(&key, &value)?,
            "theta" => cfg.theta = Some(parse_value(&key, &value)?),
            "noise-period" => cfg.noise_period = Some(parse_value(&key, &value)?),
            "sigma" => cfg.sigma = Some(parse_value(&key, &value)?),
            "batch" => cfg.batch = parse_value(&key, &value)?,
            "iters" => cfg.total_iters = parse_value(&key, &value)?,
            "repeats" => cfg.repeats = parse_value(&key, &value)?,
            "seed" => cfg.base_seed = parse_value(&key, &value)?,
            "algos" => cfg.algos = parse_algos(&value)?,
            "schedule" => cfg.schedule = ScheduleKind::from_str(&value)?,
            "log-every" => cfg.log_every = parse_value(&key, &value)?,
            "threads" => cfg.threads = Some(parse_value(&key, &value)?),
            "out" => out_dir = PathBuf::from(&value),
            other => return Err(format!("unknown flag --{other}")),
        }
    }
    cfg.out_dir = Some(out_dir.clone());
    cfg.validate()?;

    let started = Instant::now();
    let output = match run_experiment(&cfg) {
        Ok(output) => output,
        Err(ExperimentError::Usage(msg)) => return Err(msg),
        Err(err @ ExperimentError::RunAborted { .. }) => {
            eprintln!("error: {err}");
            return Ok(ExitCode::from(1));
        }
    };
    match emit_csv(&output.aggregates, &output.runs, &out_dir, kind.name()) {
        Ok((aggregate_path, raw_path)) => {
            println!(
                "wrote {} and {} ({} runs, {:.1}s)",
                aggregate_path.display(),
                raw_path.display(),
                output.runs.len(),
                started.elapsed().as_secs_f64()
            );
            Ok(ExitCode::SUCCESS)
        }
        Err(err) => {
            eprintln!("error: {err}");
            Ok(ExitCode::from(1))
        }
    }
}

struct ObjectiveFlags {
    d: usize,
    seed: u64,
    points: usize,
    scale: f64,
    diag: Vec<f64>,
    eta: f64,
    alpha: f64,
    beta: f64,
    gamma: f64,
    nu: f64,
    r: f64,
    rho: f64,
    bound_b: f64,
}

impl Default for ObjectiveFlags {
    fn default() -> Self {
        Self {
            d: 4,
            seed: 1,
            points: 100,
            scale: 1.0,
            diag: vec![2.0, -2.0],
            eta: 0.01,
            alpha: 1.0,
            beta: 2.0,
            gamma: 1.0,
            nu: 1.0,
            r: 1.0,
            rho: 1.0,
            bound_b: 100.0,
        }
    }
}

fn parse_objective_flags(args: &[String]) -> Result<ObjectiveFlags, String> {
    let mut flags = ObjectiveFlags::default();
    for (key, value) in parse_flags(args)? {
        match key.as_str() {
            "d" => flags.d = parse_value(&key, &value)?,
            "seed" => flags.seed = parse_value(&key, &value)?,
            "points" => flags.points = parse_value(&key, &value)?,
            "scale" => flags.scale = parse_value(&key, &value)?,
            "diag" => {
                flags.diag = value
                    .split(',')
                    .map(|p| p.trim().parse::<f64>().map_err(|e| format!("--diag: {e}")))
                    .collect::<Result<_, _>>()?
            }
            "eta" => flags.eta = parse_value(&key, &value)?,
            "alpha" => flags.alpha = parse_value(&key, &value)?,
            "beta" => flags.beta = parse_value(&key, &value)?,
            "gamma" => flags.gamma = parse_value(&key, &value)?,
            "nu" => flags.nu = parse_value(&key, &value)?,
            "r" => flags.r = parse_value(&key, &value)?,
            "rho" => flags.rho = parse_value(&key, &value)?,
            "bound-b" => flags.bound_b = parse_value(&key, &value)?,
            other => return Err(format!("unknown flag --{other}")),
        }
    }
    Ok(flags)
}

fn build_objective(name: &str, flags: &ObjectiveFlags) -> Result<Box<dyn Objective>, String> {
    match name {
        "puresaddle" => Ok(Box::new(QuadraticObjective::pure_saddle())),
        "quadratic" => Ok(Box::new(QuadraticObjective::from_diagonal(&flags.diag))),
        "tensor" => {
            if flags.d < 2 {
                return Err("--d: tensor objective needs d >= 2".into());
            }
            let model = IcaModel::generate(flags.d, &mut RandomSource::new(flags.seed));
            Ok(Box::new(offline_objective(model)))
        }
        other => Err(format!(
            "unknown objective '{other}' (expected puresaddle, quadratic, tensor)"
        )),
    }
}

fn check_grad_command(args: &[String]) -> Result<ExitCode, String> {
    let Some(name) = args.first() else {
        return Err("check-grad expects an objective name".into());
    };
    let flags = parse_objective_flags(&args[1..])?;
    let obj = build_objective(name, &flags)?;
    let mut rng = RandomSource::new(flags.seed);
    let worst = max_rel_error_at_random_points(obj.as_ref(), flags.points, flags.scale, &mut rng);
    println!(
        "max relative error over {} points: {worst:.3e}",
        flags.points
    );
    if worst <= 1e-5 {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn classify_command(args: &[String]) -> Result<ExitCode, String> {
    if args.len() < 2 {
        return Err("classify expects an objective name and a point".into());
    }
    let name = &args[0];
    let point = parse_point(&args[1])?;
    let flags = parse_objective_flags(&args[2..])?;
    let obj = build_objective(name, &flags)?;
    if point.dim() != obj.dim() {
        return Err(format!(
            "point has dimension {}, objective expects {}",
            point.dim(),
            obj.dim()
        ));
    }
    let params = StrictSaddleParams::new(
        flags.alpha,
        flags.gamma,
        flags.nu,
        flags.r,
        flags.beta,
        flags.rho,
        flags.bound_b,
    )
    .map_err(|e| e.to_string())?;
    match classify_region(obj.as_ref(), &point, &params, flags.eta) {
        Ok(label) => {
            println!("{} (witness {:.6e})", label.kind.name(), label.witness);
            Ok(ExitCode::SUCCESS)
        }
        Err(err) => {
            eprintln!("error: {err}");
            Ok(ExitCode::from(1))
        }
    }
}
