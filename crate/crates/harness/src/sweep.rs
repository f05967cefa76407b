//! Sweeps, benchmarks, analytic curves and CAVI trajectories.

use rayon::prelude::*;
use rcsm_core::analysis::{approx_index_error, AsymptoticParams};
use rcsm_core::detectors::Diagnostics;
use rcsm_core::model::db_to_linear;

use crate::config::{DetectorKind, ExperimentConfig, SweepParam};
use crate::report::{AnalyticRow, ConvergenceRow, SweepRow};
use crate::stats::{mean, median, wilson95};
use crate::trial::{detect, generate_instance, run_trial, TrialResult};
use crate::{HarnessError, Result};

/// A swept parameter and its value; `None` outside a sweep.
pub type SweepPoint = Option<(SweepParam, f64)>;

/// The configs a run expands to, with the swept parameter and value.
pub fn expand(cfg: &ExperimentConfig) -> Result<Vec<(SweepPoint, ExperimentConfig)>> {
    cfg.validate()?;
    match &cfg.sweep {
        None => Ok(vec![(None, cfg.clone())]),
        Some(s) => s
            .values
            .iter()
            .map(|&v| Ok((Some((s.param, v)), cfg.with_param(s.param, v)?)))
            .collect(),
    }
}

/// Runs trials `0..cfg.trials`. Results come back in trial order whatever
/// the thread count.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<Vec<TrialResult>> {
    let ids = 0..cfg.trials as u64;
    if cfg.threads <= 1 {
        return ids.map(|t| run_trial(cfg, t)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))?;
    pool.install(|| ids.into_par_iter().map(|t| run_trial(cfg, t)).collect())
}

/// Large-system index-error estimate, for the detectors it describes.
pub fn analytic_p_ie(cfg: &ExperimentConfig) -> Result<Option<f64>> {
    let d = cfg.dims;
    if !matches!(cfg.detector, DetectorKind::MlGa | DetectorKind::Cavi) || d.k >= d.l {
        return Ok(None);
    }
    let a = AsymptoticParams::for_system(db_to_linear(cfg.snr_db), d.k, d.n)?;
    Ok(Some(approx_index_error(d.l, d.k, &a, d.m)?.p_ie))
}

fn aggregate(cfg: &ExperimentConfig, point: SweepPoint, results: &[TrialResult]) -> Result<SweepRow> {
    let trials = results.len() as u64;
    let errors = results.iter().filter(|r| r.index_error).count() as u64;
    let mut times: Vec<f64> = results.iter().map(|r| r.wall_time_ns as f64).collect();
    let d = cfg.dims;
    Ok(SweepRow {
        detector: cfg.detector,
        n: d.n,
        l: d.l,
        k: d.k,
        m: d.m,
        snr_db: cfg.snr_db,
        order: cfg.order,
        mu: cfg.step_size,
        iters: cfg.iterations,
        sweep_name: point.map(|(p, _)| p.name().to_string()).unwrap_or_default(),
        sweep_value: point.map(|(_, v)| v),
        trials,
        errors,
        error_rate: errors as f64 / trials as f64,
        wilson_halfwidth: wilson95(errors, trials).halfwidth(),
        analytic_p_ie: analytic_p_ie(cfg)?,
        mean_runtime_ns: mean(&times),
        median_runtime_ns: median(&mut times),
        seed: cfg.seed,
    })
}

/// One row per sweep value. Every value reuses trial ids `0..trials`, so
/// sweep points are paired on the same random instances where the
/// dimensions allow.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    expand(cfg)?
        .into_iter()
        .map(|(point, c)| aggregate(&c, point, &run_trials(&c)?))
        .collect()
}

/// Untimed warm-up trials run before each benchmark point.
pub const BENCH_WARMUP: u64 = 5;

/// Single-threaded timing run. Warm-up trials use ids past the measured
/// range and are discarded; runtime columns report the median and mean
/// over the measured trials.
pub fn run_bench(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    if !matches!(cfg.detector, DetectorKind::MlGa | DetectorKind::Cavi) {
        return Err(HarnessError::Config(format!(
            "bench supports cavi and ml-ga, not {}",
            cfg.detector
        )));
    }
    expand(cfg)?
        .into_iter()
        .map(|(point, mut c)| {
            c.threads = 1;
            c.timing = true;
            let n = c.trials as u64;
            for t in n..n + BENCH_WARMUP {
                run_trial(&c, t)?;
            }
            let results = (0..n).map(|t| run_trial(&c, t)).collect::<Result<Vec<_>>>()?;
            aggregate(&c, point, &results)
        })
        .collect()
}

/// Analytic curve; `q` overrides the interferer count (default `K`).
pub fn analyze(cfg: &ExperimentConfig, q: Option<usize>) -> Result<Vec<AnalyticRow>> {
    expand(cfg)?
        .into_iter()
        .map(|(_, c)| {
            let d = c.dims;
            let q = q.unwrap_or(d.k);
            let a = AsymptoticParams::for_system(db_to_linear(c.snr_db), q, d.n)?;
            let e = approx_index_error(d.l, q, &a, d.m)?;
            Ok(AnalyticRow {
                n: d.n,
                l: d.l,
                k: d.k,
                q,
                m: d.m,
                snr_db: c.snr_db,
                alpha_bar: a.alpha_bar,
                omega_bar: a.omega_bar,
                lambda_star: e.lambda_star,
                exponent: e.exponent,
                pep: e.pep,
                p_ie: e.p_ie,
            })
        })
        .collect()
}

/// CAVI `q` trajectories for trials `0..trials`, one row per
/// (trial, iteration, antenna).
pub fn convergence(cfg: &ExperimentConfig) -> Result<Vec<ConvergenceRow>> {
    cfg.validate()?;
    let mut c = cfg.clone();
    c.detector = DetectorKind::Cavi;
    let mut rows = Vec::new();
    for trial in 0..c.trials as u64 {
        let inst = generate_instance(&c, trial)?;
        let result = detect(&c, &inst, true).map_err(|source| HarnessError::Trial {
            trial_id: trial,
            source,
        })?;
        let Diagnostics::Trajectory(path) = result.diagnostics else {
            unreachable!("trajectory recording was requested");
        };
        for (iteration, q) in path.iter().enumerate() {
            for (l, &value) in q.iter().enumerate() {
                rows.push(ConvergenceRow {
                    trial,
                    iteration,
                    antenna: l + 1,
                    q: value,
                    active: inst.support.is_active(l),
                });
            }
        }
    }
    Ok(rows)
}
