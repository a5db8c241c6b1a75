use serde::Serialize;

use super::fmt_float;
use super::ground_truth::GroundTruth;
use super::metrics::{counts_as, pearson_top_k, precision_at_k, TopKSelection};
use crate::error::Result;
use crate::graph::{DevId, HeteroNetwork};
use crate::rankers::{rank_positions, ranking_order, RankState};
use crate::scalar::Scalar;

/// Metric values per `k` (rows) and per algorithm (columns).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricTable {
    pub columns: Vec<String>,
    pub rows: Vec<(usize, Vec<f64>)>,
}

impl MetricTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k");
        for c in &self.columns {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (k, values) in &self.rows {
            out.push_str(&k.to_string());
            for v in values {
                out.push(',');
                out.push_str(&fmt_float(*v));
            }
            out.push('\n');
        }
        out
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|(_, v)| v[idx]).collect())
    }
}

/// precision@k of each named score vector against `truth`, for every `k`.
pub fn precision_table<S: Scalar>(series: &[(&str, &[S])], truth: &[u64], ks: &[usize]) -> Result<MetricTable> {
    let rows = ks
        .iter()
        .map(|&k| {
            let values = series.iter().map(|(_, s)| precision_at_k(s, truth, k)).collect::<Result<Vec<_>>>()?;
            Ok((k, values))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricTable { columns: series.iter().map(|(n, _)| n.to_string()).collect(), rows })
}

/// Pearson correlation of each score vector with `truth` over its top-k.
/// Undefined correlations are reported as NaN.
pub fn pearson_table<S: Scalar>(
    series: &[(&str, &[S])],
    truth: &[u64],
    ks: &[usize],
    selection: TopKSelection,
) -> Result<MetricTable> {
    let truth_s: Vec<S> = counts_as(truth);
    let rows = ks
        .iter()
        .map(|&k| {
            let values = series
                .iter()
                .map(|(name, s)| {
                    let c = pearson_top_k(s, &truth_s, k, selection)?;
                    if let super::Correlation::Undefined(why) = &c {
                        log::warn!("Pearson for {name} at k = {k} undefined: {why}");
                    }
                    Ok(c.or_nan())
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((k, values))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MetricTable { columns: series.iter().map(|(n, _)| n.to_string()).collect(), rows })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopRow {
    pub developer: String,
    pub new_followers: u64,
    pub train_followers: u64,
    pub train_commits: u64,
    /// 1-based position under each compared algorithm.
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TopTable {
    pub algorithms: Vec<String>,
    pub rows: Vec<TopRow>,
}

impl TopTable {
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec![
            "developer_id".to_string(),
            "new_followers".to_string(),
            "train_followers".to_string(),
            "train_commits".to_string(),
        ];
        header.extend(self.algorithms.iter().map(|a| format!("rank_{a}")));
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![
                r.developer.clone(),
                r.new_followers.to_string(),
                r.train_followers.to_string(),
                r.train_commits.to_string(),
            ];
            rec.extend(r.ranks.iter().map(usize::to_string));
            w.write_record(&rec).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

/// The `n` developers with the largest follower gain, with their training
/// statistics and their rank under each state.
pub fn top_table<S: Scalar>(net: &HeteroNetwork, truth: &GroundTruth, n: usize, states: &[&RankState<S>]) -> TopTable {
    let followers = net.follower_counts();
    let commits = net.developer_commit_totals();
    let positions: Vec<Vec<usize>> = states.iter().map(|s| rank_positions(&s.dev_scores)).collect();
    let rows = ranking_order(&truth.new_followers)
        .into_iter()
        .take(n)
        .map(|i| TopRow {
            developer: net.developer_name(DevId(i as u32)).to_string(),
            new_followers: truth.new_followers[i],
            train_followers: followers[i],
            train_commits: commits[i],
            ranks: positions.iter().map(|p| p[i]).collect(),
        })
        .collect();
    TopTable { algorithms: states.iter().map(|s| s.kind.to_string()).collect(), rows }
}
