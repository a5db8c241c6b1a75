use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use super::fmt_float;
use crate::error::{Error, Result};
use crate::graph::{EventKind, EventLog};

/// One `(lo, hi]` bucket of commit totals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsBin {
    pub lo: u64,
    pub hi: u64,
    pub population: usize,
    /// Mean gain per member, `None` for an empty bin.
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsBins {
    pub bin_width: u64,
    /// Developers binned by commits made; mean is new followers.
    pub developers: Vec<StatsBin>,
    /// Projects binned by commits received; mean is new stars.
    pub projects: Vec<StatsBin>,
}

/// Per-entity `(commits before cutoff, gain inside the window)` pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FollowerSamples {
    pub developers: BTreeMap<String, (u64, u64)>,
    pub projects: BTreeMap<String, (u64, u64)>,
}

/// Collects commit totals before `cutoff` and follower/star gains inside
/// `[cutoff, window_end)` for every developer and project with at least one
/// pre-cutoff commit.
pub fn commit_follower_samples(log: &EventLog, cutoff: NaiveDate, window_end: NaiveDate) -> Result<FollowerSamples> {
    if cutoff >= window_end {
        return Err(Error::InvalidParameter(format!("cutoff ({cutoff}) must precede window end ({window_end})")));
    }
    let mut samples = FollowerSamples::default();
    for e in log.events.iter().filter(|e| e.kind == EventKind::Commit && e.date < cutoff) {
        samples.developers.entry(e.actor.clone()).or_default().0 += e.count;
        let project = log.project_aliases.resolve(&e.target);
        samples.projects.entry(project.to_string()).or_default().0 += e.count;
    }
    for e in log.events.iter().filter(|e| cutoff <= e.date && e.date < window_end) {
        match e.kind {
            EventKind::Follow if e.actor != e.target => {
                if let Some(entry) = samples.developers.get_mut(&e.target) {
                    entry.1 += 1;
                }
            }
            EventKind::Star => {
                if let Some(entry) = samples.projects.get_mut(log.project_aliases.resolve(&e.target)) {
                    entry.1 += 1;
                }
            }
            _ => {}
        }
    }
    Ok(samples)
}

fn bin(samples: impl Iterator<Item = (u64, u64)>, width: u64) -> Vec<StatsBin> {
    let mut sums: Vec<(usize, u64)> = Vec::new();
    for (commits, gain) in samples {
        let b = ((commits - 1) / width) as usize;
        if sums.len() <= b {
            sums.resize(b + 1, (0, 0));
        }
        sums[b].0 += 1;
        sums[b].1 += gain;
    }
    sums.into_iter()
        .enumerate()
        .map(|(b, (population, total))| StatsBin {
            lo: b as u64 * width,
            hi: (b as u64 + 1) * width,
            population,
            mean: (population > 0).then(|| total as f64 / population as f64),
        })
        .collect()
}

/// Mean follower gain by developer commit volume and mean star gain by
/// project commit volume.
pub fn commit_follower_stats(log: &EventLog, cutoff: NaiveDate, window_end: NaiveDate, bin_width: u64) -> Result<StatsBins> {
    if bin_width == 0 {
        return Err(Error::InvalidParameter("bin width must be positive".into()));
    }
    let samples = commit_follower_samples(log, cutoff, window_end)?;
    Ok(StatsBins {
        bin_width,
        developers: bin(samples.developers.values().copied(), bin_width),
        projects: bin(samples.projects.values().copied(), bin_width),
    })
}

impl StatsBins {
    fn csv(bins: &[StatsBin], mean_name: &str) -> String {
        let mut out = format!("lo,hi,population,{mean_name}\n");
        for b in bins {
            let mean = b.mean.map(fmt_float).unwrap_or_else(|| "NaN".into());
            out.push_str(&format!("{},{},{},{}\n", b.lo, b.hi, b.population, mean));
        }
        out
    }

    pub fn developers_csv(&self) -> String {
        Self::csv(&self.developers, "mean_new_followers")
    }

    pub fn projects_csv(&self) -> String {
        Self::csv(&self.projects, "mean_new_stars")
    }
}
