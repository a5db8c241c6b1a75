//! Temporal-split evaluation: ground truth from the test window, ranking
//! metrics, the α/β sweep, commit statistics and the convergence benchmark.

mod bench;
mod ground_truth;
mod metrics;
mod report;
mod stats;
mod sweep;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use bench::{convergence_benchmark, write_bench_csv, BenchRow, BENCH_HEADER};
pub use ground_truth::{compute_ground_truth, GroundTruth, WindowTally};
pub use metrics::{counts_as, pearson_top_k, precision_at_k, top_k, Correlation, TopKSelection};
pub use report::{pearson_table, precision_table, top_table, MetricTable, TopRow, TopTable};
pub use stats::{commit_follower_samples, commit_follower_stats, FollowerSamples, StatsBin, StatsBins};
pub use sweep::{lattice_points, lattice_size, sweep_alpha_beta, SweepCell, SweepGrid, SWEEP_HEADER};

/// Training events are those dated before `train_end`; the test window is
/// `[train_end, test_end)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_end: NaiveDate,
    pub test_end: NaiveDate,
    pub label: String,
}

impl SplitSpec {
    pub fn new(train_end: NaiveDate, test_end: NaiveDate, label: impl Into<String>) -> Result<Self> {
        if train_end >= test_end {
            return Err(Error::InvalidParameter(format!(
                "train_end ({train_end}) must precede test_end ({test_end})"
            )));
        }
        Ok(Self { train_end, test_end, label: label.into() })
    }

    pub fn in_window(&self, date: NaiveDate) -> bool {
        self.train_end <= date && date < self.test_end
    }
}

/// Formats a float for CSV output; non-finite values become `NaN`.
pub(crate) fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        "NaN".to_string()
    }
}
