use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::propagation::Propagator;
use crate::rankers::{run, AlgorithmKind, RankParams};
use crate::scalar::Scalar;

pub const BENCH_HEADER: &str = "algorithm,threshold,iterations,millis";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub kind: AlgorithmKind,
    pub threshold: f64,
    /// Main-loop iterations; equals `max_iters` when not converged.
    pub iterations: usize,
    pub millis: f64,
    pub converged: bool,
}

/// Runs every kind at every threshold, sequentially so timings do not
/// interfere, and records iteration counts and wall-clock time.
pub fn convergence_benchmark<S, P>(
    prop: &P,
    kinds: &[AlgorithmKind],
    thresholds: &[f64],
    base: &RankParams<S>,
) -> Result<Vec<BenchRow>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    let mut rows = Vec::with_capacity(kinds.len() * thresholds.len());
    for &kind in kinds {
        for &threshold in thresholds {
            let params = base.with_threshold(S::lit(threshold));
            let started = Instant::now();
            let state = run(kind, prop, &params)?;
            let millis = started.elapsed().as_secs_f64() * 1e3;
            rows.push(BenchRow { kind, threshold, iterations: state.iterations, millis, converged: state.converged });
        }
    }
    Ok(rows)
}

pub fn write_bench_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(BENCH_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!("{},{:e},{},{:.3}\n", r.kind, r.threshold, r.iterations, r.millis));
    }
    out
}
