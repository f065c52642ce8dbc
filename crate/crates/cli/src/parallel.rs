//! Thread-parallel drivers. They call the same per-start and per-trial
//! entry points as the sequential drivers in `optsample-core` and reduce in
//! index order, so results do not depend on the thread count.

use optsample_core::bench::{ExperimentConfig, ExperimentPlan, ExperimentReport};
use optsample_core::optimize::{self, SearchConfig, SearchResult};
use optsample_core::{ObjectiveSpec, Result};
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "OPTSAMPLE_THREADS";

/// Pool sized by `threads`, else by `OPTSAMPLE_THREADS`, else one thread per
/// core.
pub fn thread_pool(threads: Option<usize>) -> CliResult<rayon::ThreadPool> {
    let count = match threads {
        Some(t) => t,
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| CliError::usage(format!("{THREADS_ENV}=`{v}` is not a thread count")))?,
            Err(_) => 0,
        },
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build()
        .map_err(|e| CliError::failure(format!("cannot start thread pool: {e}")))
}

pub fn optimize_points_par(spec: &ObjectiveSpec, config: &SearchConfig) -> Result<SearchResult> {
    config.validate()?;
    let outcomes = (0..config.restarts)
        .into_par_iter()
        .map(|s| optimize::run_start(spec, config, s))
        .collect::<Result<Vec<_>>>()?;
    optimize::reduce_starts(outcomes)
}

pub fn run_experiment_par(config: ExperimentConfig) -> Result<ExperimentReport> {
    let plan = ExperimentPlan::new(config)?;
    let search = optimize_points_par(plan.spec(), &plan.config().search)?;
    let trials = (0..plan.config().trials)
        .into_par_iter()
        .map(|t| plan.run_trial(&search.points, t))
        .collect::<Result<Vec<_>>>()?;
    plan.finish(search, trials)
}
