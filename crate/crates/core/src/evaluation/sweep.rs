use rayon::prelude::*;
use serde::Serialize;

use super::fmt_float;
use super::metrics::precision_at_k;
use crate::error::{Error, Result};
use crate::propagation::Propagator;
use crate::rankers::{devrank, RankParams};
use crate::scalar::Scalar;

pub const SWEEP_HEADER: &str = "alpha,beta,precision";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepCell {
    pub alpha: f64,
    pub beta: f64,
    pub precision: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid {
    pub step: f64,
    pub cells: Vec<SweepCell>,
}

impl SweepGrid {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_HEADER);
        out.push('\n');
        for c in &self.cells {
            out.push_str(&format!("{},{},{}\n", fmt_float(c.alpha), fmt_float(c.beta), fmt_float(c.precision)));
        }
        out
    }

    pub fn best(&self) -> Option<&SweepCell> {
        self.cells.iter().fold(None, |best: Option<&SweepCell>, c| match best {
            Some(b) if b.precision >= c.precision => Some(b),
            _ => Some(c),
        })
    }
}

fn divisions(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= 1.0) {
        return Err(Error::InvalidParameter(format!("sweep step must lie in (0, 1], got {step}")));
    }
    Ok((1.0 / step + 1e-9).floor() as usize)
}

/// Rounds lattice coordinates so `37 × 0.01` prints as `0.37`.
fn tidy(v: f64) -> f64 {
    (v * 1e12).round() / 1e12
}

/// Lattice points `(i·step, j·step)` with `i + j ≤ ⌊1/step⌋`, alpha-major.
pub fn lattice_points(step: f64) -> Result<Vec<(f64, f64)>> {
    let m = divisions(step)?;
    Ok((0..=m)
        .flat_map(|i| (0..=m - i).map(move |j| (tidy(i as f64 * step), tidy(j as f64 * step))))
        .collect())
}

/// Closed-form lattice size `(m + 1)(m + 2) / 2`, `m = ⌊1/step⌋`.
pub fn lattice_size(step: f64) -> Result<usize> {
    let m = divisions(step)?;
    Ok((m + 1) * (m + 2) / 2)
}

/// Runs DevRank at every lattice point and records developer precision@k
/// against `truth`. Cells are computed in parallel and returned in lattice
/// order.
pub fn sweep_alpha_beta<S, P, T>(prop: &P, truth: &[T], k: usize, step: f64, base: &RankParams<S>) -> Result<SweepGrid>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
    T: PartialOrd + Sync,
{
    let points = lattice_points(step)?;
    let cells = points
        .par_iter()
        .map(|&(alpha, beta)| {
            let params = base.with_alpha(S::lit(alpha)).with_beta(S::lit(beta));
            let state = devrank(prop, &params)?;
            Ok(SweepCell { alpha, beta, precision: precision_at_k(&state.dev_scores, truth, k)?, converged: state.converged })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepGrid { step, cells })
}
