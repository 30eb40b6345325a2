//! Repeated sample-then-optimize restarts.
//!
//! Restart `i` draws everything from stream `i` of the master seed, so the
//! error and parameter columns do not depend on how restarts are scheduled
//! across worker threads. Only the wall-time column varies between runs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::ParamBounds;
use crate::error::{Error, Result};
use crate::model::{fitness_error, BhCurve, JaParams, PENALTY_ERROR};
use crate::optim::{run_optimizer, Algorithm, OptimizerConfig, StopCriteria};
use crate::sampling::{sample_population, InitStrategy, SeededRng};

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub data: BhCurve,
    pub bounds: ParamBounds,
    pub optimizer: OptimizerConfig,
    pub init: InitStrategy,
    pub restarts: usize,
    pub seed: u64,
    pub stop: StopCriteria,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("need at least one restart".into()));
        }
        self.bounds.validate()?;
        self.init.validate(&self.bounds)?;
        self.optimizer.validate()
    }
}

/// Outcome of one restart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub restart: usize,
    /// Final fitness error [%].
    pub error: f64,
    /// Wall-clock time of sampling plus optimization [s], millisecond resolution.
    pub time_s: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub params: JaParams,
    pub strategy: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub stream: u64,
    /// Set when the restart could not run; `error` then holds the penalty value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Runs one restart on stream `index` of `spec.seed`.
pub fn run_restart(spec: &ExperimentSpec, index: usize) -> RunRecord {
    let stream = index as u64;
    let mut rng = SeededRng::new(spec.seed, stream);
    let start = Instant::now();
    let outcome = sample_population(&spec.init, &spec.bounds, &mut rng, spec.optimizer.population_size)
        .and_then(|population| {
            run_optimizer(
                &spec.optimizer,
                &population,
                &spec.bounds,
                |p| fitness_error(&spec.data, p),
                &spec.stop,
                &mut rng,
            )
        });
    let time_s = (start.elapsed().as_secs_f64() * 1e3).round() / 1e3;
    let base = RunRecord {
        restart: index,
        error: PENALTY_ERROR,
        time_s,
        iterations: 0,
        evaluations: 0,
        params: spec.bounds.midpoint(),
        strategy: spec.init.tag(),
        algorithm: spec.optimizer.algorithm,
        seed: spec.seed,
        stream,
        failure: None,
    };
    match outcome {
        Ok(trace) => RunRecord {
            error: trace.best_error,
            iterations: trace.iterations,
            evaluations: trace.evaluations,
            params: trace.best,
            ..base
        },
        Err(e) => {
            log::warn!("restart {index} failed: {e}");
            RunRecord {
                failure: Some(e.to_string()),
                ..base
            }
        }
    }
}

/// Runs all restarts on the current rayon pool; records come back in restart order.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    run_experiment_with_progress(spec, |_| {})
}

/// [`run_experiment`] calling `progress(done)` after each finished restart.
pub fn run_experiment_with_progress<P>(spec: &ExperimentSpec, progress: P) -> Result<Vec<RunRecord>>
where
    P: Fn(usize) + Sync,
{
    spec.validate()?;
    let done = AtomicUsize::new(0);
    Ok((0..spec.restarts)
        .into_par_iter()
        .map(|i| {
            let record = run_restart(spec, i);
            progress(done.fetch_add(1, Ordering::Relaxed) + 1);
            record
        })
        .collect())
}

/// Error column of `records`.
pub fn errors(records: &[RunRecord]) -> Vec<f64> {
    records.iter().map(|r| r.error).collect()
}

/// Wall-time column of `records`.
pub fn times(records: &[RunRecord]) -> Vec<f64> {
    records.iter().map(|r| r.time_s).collect()
}

/// Record with the lowest error (first on ties).
pub fn best_record(records: &[RunRecord]) -> Option<&RunRecord> {
    records
        .iter()
        .reduce(|best, r| if r.error < best.error { r } else { best })
}
