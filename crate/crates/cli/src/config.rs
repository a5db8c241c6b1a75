//! Run configuration: command-line flags layered over an optional JSON file.

use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use clap::Args;
use devrank::synthetic::SyntheticSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// Flags shared by every subcommand. Each is optional here so a config
/// file can supply it; flags win over file values.
#[derive(Debug, Clone, Default, Args)]
pub struct SharedArgs {
    /// follows.csv (follower_id,followee_id,date)
    #[arg(long)]
    pub follows: Option<PathBuf>,
    /// commits.csv (developer_id,project_id,date[,count])
    #[arg(long)]
    pub commits: Option<PathBuf>,
    /// stars.csv (developer_id,project_id,date)
    #[arg(long)]
    pub stars: Option<PathBuf>,
    /// Optional projects.csv (project_id,name,forked_from)
    #[arg(long)]
    pub projects: Option<PathBuf>,
    /// Training cutoff: events strictly before this date form the network
    #[arg(long)]
    pub train_end: Option<NaiveDate>,
    /// End of the (half-open) test window
    #[arg(long)]
    pub test_end: Option<NaiveDate>,
    /// Algorithm(s): devrank, pagerank, hits, df, dc
    #[arg(long, value_delimiter = ',')]
    pub algo: Option<Vec<String>>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Convergence threshold(s) on the L1 error
    #[arg(long, value_delimiter = ',')]
    pub threshold: Option<Vec<f64>>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// Top-k cutoff(s)
    #[arg(long, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Sweep lattice spacing
    #[arg(long)]
    pub step: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (0 = all cores); outputs do not depend on it
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSON config file with the same keys as the long flags (snake_case)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Use the dense-matrix reference engine (small networks only)
    #[arg(long)]
    pub dense_oracle: bool,
    /// Skip and count malformed input rows instead of failing
    #[arg(long)]
    pub skip_malformed: bool,
    /// Also merge projects that share a name
    #[arg(long)]
    pub merge_by_name: bool,
    /// Commit-count bin width for `stats`
    #[arg(long)]
    pub bin_width: Option<u64>,
    /// Rows in the top-developer table written by `eval`
    #[arg(long)]
    pub top: Option<usize>,
    /// Compute Pearson over the truth-selected top-k instead of the score-selected one
    #[arg(long)]
    pub pearson_by_truth: bool,
}

/// Generator flags for `gen`.
#[derive(Debug, Clone, Default, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n_developers: Option<usize>,
    #[arg(long)]
    pub n_projects: Option<usize>,
    #[arg(long)]
    pub follow_exponent: Option<f64>,
    #[arg(long)]
    pub commit_exponent: Option<f64>,
    #[arg(long)]
    pub mean_commits: Option<f64>,
    #[arg(long)]
    pub mean_follows: Option<f64>,
    #[arg(long)]
    pub mean_stars: Option<f64>,
    #[arg(long)]
    pub stickiness: Option<f64>,
    #[arg(long)]
    pub start: Option<NaiveDate>,
    #[arg(long)]
    pub end: Option<NaiveDate>,
}

/// JSON config file layout.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    follows: Option<PathBuf>,
    commits: Option<PathBuf>,
    stars: Option<PathBuf>,
    projects: Option<PathBuf>,
    train_end: Option<NaiveDate>,
    test_end: Option<NaiveDate>,
    algo: Option<OneOrMany<String>>,
    alpha: Option<f64>,
    beta: Option<f64>,
    threshold: Option<OneOrMany<f64>>,
    max_iters: Option<usize>,
    k: Option<OneOrMany<usize>>,
    step: Option<f64>,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    dense_oracle: Option<bool>,
    skip_malformed: Option<bool>,
    merge_by_name: Option<bool>,
    bin_width: Option<u64>,
    top: Option<usize>,
    pearson_by_truth: Option<bool>,
    synthetic: Option<SyntheticSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> From<OneOrMany<T>> for Vec<T> {
    fn from(v: OneOrMany<T>) -> Self {
        match v {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(xs) => xs,
        }
    }
}

/// Fully merged configuration. Serialized into `run_meta.json`.
#[derive(Debug, Clone, Default, Serialize)]
pub struct RunConfig {
    pub follows: Option<PathBuf>,
    pub commits: Option<PathBuf>,
    pub stars: Option<PathBuf>,
    pub projects: Option<PathBuf>,
    pub train_end: Option<NaiveDate>,
    pub test_end: Option<NaiveDate>,
    pub algo: Option<Vec<String>>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub threshold: Option<Vec<f64>>,
    pub max_iters: Option<usize>,
    pub k: Option<Vec<usize>>,
    pub step: Option<f64>,
    pub seed: Option<u64>,
    #[serde(skip)]
    pub threads: Option<usize>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub dense_oracle: bool,
    pub skip_malformed: bool,
    pub merge_by_name: bool,
    pub bin_width: Option<u64>,
    pub top: Option<usize>,
    pub pearson_by_truth: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub synthetic: Option<SyntheticSpec>,
}

fn read_file_config(path: &Path) -> Result<FileConfig, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&raw).map_err(|e| CliError::config(format!("bad config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(flags: &SharedArgs, gen: Option<&GenArgs>) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => read_file_config(p)?,
            None => FileConfig::default(),
        };
        let synthetic = gen.map(|g| merge_synthetic(file.synthetic.clone().unwrap_or_default(), g, flags.seed.or(file.seed)));
        Ok(Self {
            follows: flags.follows.clone().or(file.follows),
            commits: flags.commits.clone().or(file.commits),
            stars: flags.stars.clone().or(file.stars),
            projects: flags.projects.clone().or(file.projects),
            train_end: flags.train_end.or(file.train_end),
            test_end: flags.test_end.or(file.test_end),
            algo: flags.algo.clone().or(file.algo.map(Into::into)),
            alpha: flags.alpha.or(file.alpha),
            beta: flags.beta.or(file.beta),
            threshold: flags.threshold.clone().or(file.threshold.map(Into::into)),
            max_iters: flags.max_iters.or(file.max_iters),
            k: flags.k.clone().or(file.k.map(Into::into)),
            step: flags.step.or(file.step),
            seed: flags.seed.or(file.seed),
            threads: flags.threads.or(file.threads),
            out: flags.out.clone().or(file.out),
            dense_oracle: flags.dense_oracle || file.dense_oracle.unwrap_or(false),
            skip_malformed: flags.skip_malformed || file.skip_malformed.unwrap_or(false),
            merge_by_name: flags.merge_by_name || file.merge_by_name.unwrap_or(false),
            bin_width: flags.bin_width.or(file.bin_width),
            top: flags.top.or(file.top),
            pearson_by_truth: flags.pearson_by_truth || file.pearson_by_truth.unwrap_or(false),
            synthetic,
        })
    }

    pub fn out_dir(&self) -> Result<&Path, CliError> {
        self.out.as_deref().ok_or_else(|| CliError::config("--out is required"))
    }

    pub fn require<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T, CliError> {
        value.as_ref().ok_or_else(|| CliError::config(format!("--{flag} is required")))
    }
}

fn merge_synthetic(mut spec: SyntheticSpec, g: &GenArgs, seed: Option<u64>) -> SyntheticSpec {
    if let Some(v) = g.n_developers {
        spec.developers = v;
    }
    if let Some(v) = g.n_projects {
        spec.projects = v;
    }
    if let Some(v) = g.follow_exponent {
        spec.follow_exponent = v;
    }
    if let Some(v) = g.commit_exponent {
        spec.commit_exponent = v;
    }
    if let Some(v) = g.mean_commits {
        spec.mean_commits = v;
    }
    if let Some(v) = g.mean_follows {
        spec.mean_follows = v;
    }
    if let Some(v) = g.mean_stars {
        spec.mean_stars = v;
    }
    if let Some(v) = g.stickiness {
        spec.stickiness = v;
    }
    if let Some(v) = g.start {
        spec.start = v;
    }
    if let Some(v) = g.end {
        spec.end = v;
    }
    if let Some(v) = seed {
        spec.seed = v;
    }
    spec
}
