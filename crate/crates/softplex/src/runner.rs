//! Deterministic trial-parallel execution.
//!
//! Trials are identified by index and draw from index-derived substreams, so
//! the sample at index `i` is one fixed value no matter where it runs. The
//! runner materializes all samples in index order and reduces sequentially;
//! output is therefore byte-identical for every thread count.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use softplex_core::experiments::{
    collect_row, estimate, normalized_pattern_density, pattern_density_sample, point_config,
    point_seed, run_trial, sweep, DensityScaling, EstimatorResult, PatternKind, Regime, Statistic,
    SweepRow, TrialConfig,
};
use softplex_core::{Error, Result};

/// Applies `f` to `0..count`, returning results in index order. Work is
/// distributed dynamically; on multiple errors the one with the smallest
/// index wins, matching what a sequential run would report first.
pub fn parallel_map<T, F>(count: u64, threads: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    let threads = threads.max(1).min(count.max(1) as usize);
    if threads == 1 {
        return (0..count).map(f).collect();
    }
    let next = AtomicU64::new(0);
    let slots: Vec<Mutex<Option<Result<T>>>> = (0..count).map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= count {
                    break;
                }
                let result = f(i);
                *slots[i as usize].lock().expect("result slot") = Some(result);
            });
        }
    });
    slots
        .into_iter()
        .map(|slot| slot.into_inner().expect("result slot").expect("slot filled"))
        .collect()
}

/// Parallel version of [`estimate`]; identical output for any thread count.
pub fn estimate_parallel(
    statistic: Statistic,
    config: &TrialConfig,
    trials: u64,
    threads: usize,
) -> Result<EstimatorResult> {
    if threads <= 1 {
        return estimate(statistic, config, trials);
    }
    config.validate()?;
    if trials < 2 {
        return Err(Error::Precondition(format!("need at least 2 trials, got {trials}")));
    }
    let samples = parallel_map(trials, threads, |id| {
        run_trial(config, id).and_then(|outcome| statistic.extract(&outcome))
    })?;
    EstimatorResult::from_samples(statistic.name(), &samples, config.seed)
}

/// Parallel version of [`normalized_pattern_density`].
pub fn density_parallel(
    pattern: PatternKind,
    scaling: DensityScaling,
    config: &TrialConfig,
    trials: u64,
    threads: usize,
) -> Result<EstimatorResult> {
    if threads <= 1 {
        return normalized_pattern_density(pattern, scaling, config, trials);
    }
    config.validate()?;
    if trials < 2 {
        return Err(Error::Precondition(format!("need at least 2 trials, got {trials}")));
    }
    let samples =
        parallel_map(trials, threads, |id| pattern_density_sample(pattern, scaling, config, id))?;
    EstimatorResult::from_samples(format!("density:{}", pattern.name()), &samples, config.seed)
}

/// Parallel version of [`sweep`]; rows and all their statistics are
/// byte-identical to the sequential ladder.
pub fn sweep_parallel(
    regime: &Regime,
    n_values: &[usize],
    template: &TrialConfig,
    k: usize,
    trials: u64,
    threads: usize,
) -> Result<Vec<SweepRow>> {
    if threads <= 1 {
        return sweep(regime, n_values, template, k, trials);
    }
    regime.validate()?;
    template.validate()?;
    if n_values.is_empty() {
        return Err(Error::Precondition("need at least one ladder size".into()));
    }
    if trials < 2 {
        return Err(Error::Precondition(format!("need at least 2 trials, got {trials}")));
    }
    let mut rows = Vec::with_capacity(n_values.len());
    for (idx, &n) in n_values.iter().enumerate() {
        let r = regime.radius(n, template.domain.dim())?;
        let cfg = point_config(template, n, r, point_seed(template.seed, idx));
        let outcomes = parallel_map(trials, threads, |id| run_trial(&cfg, id))?;
        rows.push(collect_row(&cfg, k, n, &outcomes)?);
    }
    Ok(rows)
}
