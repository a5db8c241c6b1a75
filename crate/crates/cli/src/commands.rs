use std::path::{Path, PathBuf};

use devrank::dense::DensePropagator;
use devrank::evaluation::{
    commit_follower_stats, compute_ground_truth, convergence_benchmark, pearson_table, precision_table,
    sweep_alpha_beta, top_table, write_bench_csv, SplitSpec, TopKSelection,
};
use devrank::graph::{load_event_log, write_event_log, EventLog, HeteroNetwork, LoadOptions};
use devrank::rankers::{run, AlgorithmKind, RankParams, RankState, DEFAULT_MAX_ITERS, DEFAULT_THRESHOLD};
use devrank::synthetic::generate;
use devrank::{Propagator, SparsePropagator};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

const DEFAULT_EVAL_KS: [usize; 10] = [10, 20, 30, 40, 50, 60, 70, 80, 90, 100];
const DEFAULT_SWEEP_K: usize = 50;
const DEFAULT_STEP: f64 = 0.01;
const DEFAULT_BIN_WIDTH: u64 = 100;
const DEFAULT_TOP: usize = 10;
const DEFAULT_BENCH_THRESHOLDS: [f64; 3] = [1e-8, 1e-10, 1e-12];

#[derive(Debug, Serialize)]
struct InputDigest {
    path: PathBuf,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct NetworkSummary {
    developers: usize,
    projects: usize,
    follows: usize,
    commit_edges: usize,
    stars: usize,
}

#[derive(Debug, Serialize)]
struct RunSummary {
    algorithm: AlgorithmKind,
    alpha: f64,
    beta: f64,
    threshold: f64,
    max_iters: usize,
    iterations: usize,
    init_iterations: usize,
    final_err: Option<f64>,
    converged: bool,
    warnings: Vec<String>,
}

impl From<&RankState<f64>> for RunSummary {
    fn from(s: &RankState<f64>) -> Self {
        Self {
            algorithm: s.kind,
            alpha: s.alpha,
            beta: s.beta,
            threshold: s.threshold,
            max_iters: s.max_iters,
            iterations: s.iterations,
            init_iterations: s.init_iterations,
            final_err: s.final_err(),
            converged: s.converged,
            warnings: s.warnings.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
struct RunMeta<'a> {
    command: &'a str,
    version: &'static str,
    engine: &'static str,
    config: &'a RunConfig,
    inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    network: Option<NetworkSummary>,
    runs: Vec<RunSummary>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    notes: Vec<String>,
}

impl<'a> RunMeta<'a> {
    fn new(command: &'a str, cfg: &'a RunConfig) -> Result<Self, CliError> {
        Ok(Self {
            command,
            version: env!("CARGO_PKG_VERSION"),
            engine: if cfg.dense_oracle { "dense" } else { "sparse" },
            config: cfg,
            inputs: digests(cfg)?,
            network: None,
            runs: Vec::new(),
            notes: Vec::new(),
        })
    }

    fn with_network(mut self, net: &HeteroNetwork) -> Self {
        self.network = Some(NetworkSummary {
            developers: net.n_developers(),
            projects: net.n_projects(),
            follows: net.follows().len(),
            commit_edges: net.commits().len(),
            stars: net.stars().len(),
        });
        self
    }
}

fn digests(cfg: &RunConfig) -> Result<Vec<InputDigest>, CliError> {
    [&cfg.follows, &cfg.commits, &cfg.stars, &cfg.projects]
        .into_iter()
        .flatten()
        .map(|path| {
            let bytes = std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
            Ok(InputDigest { path: path.clone(), sha256: hex::encode(Sha256::digest(&bytes)) })
        })
        .collect()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::input(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn write_meta(dir: &Path, meta: &RunMeta<'_>) -> Result<(), CliError> {
    let mut json = serde_json::to_string_pretty(meta).expect("run metadata serializes");
    json.push('\n');
    write_file(dir, "run_meta.json", &json)
}

fn load(cfg: &RunConfig) -> Result<EventLog, CliError> {
    let follows = RunConfig::require(&cfg.follows, "follows")?;
    let commits = RunConfig::require(&cfg.commits, "commits")?;
    let stars = RunConfig::require(&cfg.stars, "stars")?;
    let options = LoadOptions { skip_malformed: cfg.skip_malformed, merge_by_name: cfg.merge_by_name };
    let log = load_event_log(follows, commits, stars, cfg.projects.as_deref(), options)?;
    for (file, n) in &log.skipped_rows {
        log::warn!("skipped {n} malformed rows in {file}");
    }
    Ok(log)
}

fn engine(cfg: &RunConfig, net: &HeteroNetwork) -> Result<Box<dyn Propagator<f64>>, CliError> {
    if cfg.dense_oracle {
        Ok(Box::new(DensePropagator::<f64>::new(net)?))
    } else {
        Ok(Box::new(SparsePropagator::new(net)))
    }
}

fn base_params(cfg: &RunConfig) -> Result<RankParams<f64>, CliError> {
    let threshold = match cfg.threshold.as_deref() {
        None | Some([]) => DEFAULT_THRESHOLD,
        Some([t]) => *t,
        Some(_) => return Err(CliError::config("this command takes a single --threshold")),
    };
    let params = RankParams::new()
        .with_threshold(threshold)
        .with_max_iters(cfg.max_iters.unwrap_or(DEFAULT_MAX_ITERS));
    if !(threshold > 0.0) {
        return Err(CliError::config(format!("threshold must be positive, got {threshold}")));
    }
    Ok(params)
}

fn split(cfg: &RunConfig, label: &str) -> Result<SplitSpec, CliError> {
    let train_end = *RunConfig::require(&cfg.train_end, "train-end")?;
    let test_end = *RunConfig::require(&cfg.test_end, "test-end")?;
    Ok(SplitSpec::new(train_end, test_end, label)?)
}

fn kinds(cfg: &RunConfig, default: &[AlgorithmKind]) -> Result<Vec<AlgorithmKind>, CliError> {
    match &cfg.algo {
        None => Ok(default.to_vec()),
        Some(names) => names.iter().map(|n| n.parse::<AlgorithmKind>().map_err(CliError::from)).collect(),
    }
}

fn non_empty(net: &HeteroNetwork) -> Result<(), CliError> {
    if net.n_developers() == 0 {
        Err(CliError::input("the network has no developers (check --train-end and the input files)"))
    } else {
        Ok(())
    }
}

fn scores_csv(names: &[String], scores: &[f64]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["external_id", "score", "rank"]).expect("in-memory write");
    for (pos, idx) in devrank::rankers::ranking_order(scores).into_iter().enumerate() {
        w.write_record([names[idx].as_str(), &scores[idx].to_string(), &(pos + 1).to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn converged_or_exit(states: &[&RankState<f64>]) -> Result<(), CliError> {
    let failed: Vec<String> = states.iter().filter(|s| !s.converged).map(|s| s.kind.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::not_converged(format!("did not converge: {}", failed.join(", "))))
    }
}

pub fn cmd_gen(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out_dir()?;
    let spec = cfg.synthetic.clone().unwrap_or_default();
    spec.validate()?;
    let log = generate(&spec)?;
    write_event_log(&log, out)?;
    let mut meta = RunMeta::new("gen", cfg)?;
    meta.notes.push(format!(
        "{} follows, {} commits, {} stars",
        log.count(devrank::EventKind::Follow),
        log.count(devrank::EventKind::Commit),
        log.count(devrank::EventKind::Star)
    ));
    write_meta(out, &meta)
}

pub fn cmd_rank(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out_dir()?;
    let kind = match kinds(cfg, &[AlgorithmKind::DevRank])?.as_slice() {
        [k] => *k,
        _ => return Err(CliError::config("rank takes a single --algo")),
    };
    let log = load(cfg)?;
    let net = HeteroNetwork::snapshot(&log, cfg.train_end);
    non_empty(&net)?;
    let mut params = base_params(cfg)?;
    params.alpha = cfg.alpha;
    params.beta = cfg.beta;
    let prop = engine(cfg, &net)?;
    let state = run(kind, prop.as_ref(), &params)?;

    write_file(out, "dev_scores.csv", &scores_csv(net.developer_names(), &state.dev_scores))?;
    write_file(out, "proj_scores.csv", &scores_csv(net.project_names(), &state.proj_scores))?;
    let mut meta = RunMeta::new("rank", cfg)?.with_network(&net);
    meta.runs.push(RunSummary::from(&state));
    write_meta(out, &meta)?;
    converged_or_exit(&[&state])
}

/// The five configurations compared by `eval`: DevRank with the configured
/// weights, the rest with their default damping.
fn eval_params(cfg: &RunConfig, kind: AlgorithmKind) -> Result<RankParams<f64>, CliError> {
    let mut params = base_params(cfg)?;
    if kind == AlgorithmKind::DevRank {
        params.alpha = cfg.alpha;
        params.beta = cfg.beta;
    }
    Ok(params)
}

fn usable_ks(ks: &[usize], population: usize, what: &str) -> Vec<usize> {
    let kept: Vec<usize> = ks.iter().copied().filter(|&k| k >= 1 && k <= population).collect();
    if kept.len() < ks.len() {
        log::warn!("dropping k values outside 1..={population} for {what}");
    }
    kept
}

pub fn cmd_eval(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out_dir()?;
    let split = split(cfg, "eval")?;
    let log = load(cfg)?;
    let net = HeteroNetwork::snapshot(&log, Some(split.train_end));
    non_empty(&net)?;
    let truth = compute_ground_truth(&log, &split, &net);
    let prop = engine(cfg, &net)?;
    let states = AlgorithmKind::ALL
        .iter()
        .map(|&kind| Ok(run(kind, prop.as_ref(), &eval_params(cfg, kind)?)?))
        .collect::<Result<Vec<_>, CliError>>()?;

    let ks = cfg.k.clone().unwrap_or_else(|| DEFAULT_EVAL_KS.to_vec());
    let dev_series: Vec<(&str, &[f64])> = states.iter().map(|s| (s.kind.name(), s.dev_scores.as_slice())).collect();
    let proj_series: Vec<(&str, &[f64])> = states.iter().map(|s| (s.kind.name(), s.proj_scores.as_slice())).collect();
    let selection = if cfg.pearson_by_truth { TopKSelection::ByTruth } else { TopKSelection::ByScore };

    let dev_ks = usable_ks(&ks, net.n_developers(), "developers");
    let proj_ks = usable_ks(&ks, net.n_projects(), "projects");
    let dev_pearson_ks: Vec<usize> = dev_ks.iter().copied().filter(|&k| k >= 2).collect();
    let proj_pearson_ks: Vec<usize> = proj_ks.iter().copied().filter(|&k| k >= 2).collect();

    write_file(out, "precision_developers.csv", &precision_table(&dev_series, &truth.new_followers, &dev_ks)?.to_csv())?;
    write_file(out, "precision_projects.csv", &precision_table(&proj_series, &truth.new_stars, &proj_ks)?.to_csv())?;
    write_file(
        out,
        "pearson_developers.csv",
        &pearson_table(&dev_series, &truth.new_followers, &dev_pearson_ks, selection)?.to_csv(),
    )?;
    write_file(
        out,
        "pearson_projects.csv",
        &pearson_table(&proj_series, &truth.new_stars, &proj_pearson_ks, selection)?.to_csv(),
    )?;
    let refs: Vec<&RankState<f64>> = states.iter().collect();
    write_file(out, "top_developers.csv", &top_table(&net, &truth, cfg.top.unwrap_or(DEFAULT_TOP), &refs).to_csv())?;

    let mut meta = RunMeta::new("eval", cfg)?.with_network(&net);
    meta.runs = states.iter().map(RunSummary::from).collect();
    meta.notes.push(format!(
        "test window follows: {} raw, {} counted, {} dropped; stars: {} raw, {} counted, {} dropped",
        truth.follows.raw, truth.follows.counted, truth.follows.dropped, truth.stars.raw, truth.stars.counted, truth.stars.dropped
    ));
    write_meta(out, &meta)?;
    converged_or_exit(&refs)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out_dir()?;
    let split = split(cfg, "sweep")?;
    let log = load(cfg)?;
    let net = HeteroNetwork::snapshot(&log, Some(split.train_end));
    non_empty(&net)?;
    let truth = compute_ground_truth(&log, &split, &net);
    let prop = engine(cfg, &net)?;
    let k = match cfg.k.as_deref() {
        None | Some([]) => DEFAULT_SWEEP_K.min(net.n_developers()),
        Some([k]) => *k,
        Some(_) => return Err(CliError::config("sweep takes a single --k")),
    };
    let step = cfg.step.unwrap_or(DEFAULT_STEP);
    let grid = sweep_alpha_beta(prop.as_ref(), &truth.new_followers, k, step, &base_params(cfg)?)?;
    write_file(out, "sweep.csv", &grid.to_csv())?;
    let mut meta = RunMeta::new("sweep", cfg)?.with_network(&net);
    if let Some(best) = grid.best() {
        meta.notes.push(format!(
            "best precision@{k} = {} at alpha = {}, beta = {}",
            best.precision, best.alpha, best.beta
        ));
    }
    let stalled = grid.cells.iter().filter(|c| !c.converged).count();
    if stalled > 0 {
        log::warn!("{stalled} sweep cells did not converge");
        meta.notes.push(format!("{stalled} cells did not converge"));
    }
    write_meta(out, &meta)
}

pub fn cmd_stats(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out_dir()?;
    let split = split(cfg, "stats")?;
    let log = load(cfg)?;
    let stats = commit_follower_stats(&log, split.train_end, split.test_end, cfg.bin_width.unwrap_or(DEFAULT_BIN_WIDTH))?;
    write_file(out, "stats_developers.csv", &stats.developers_csv())?;
    write_file(out, "stats_projects.csv", &stats.projects_csv())?;
    write_meta(out, &RunMeta::new("stats", cfg)?)
}

pub fn cmd_bench(cfg: &RunConfig) -> Result<(), CliError> {
    let out = cfg.out_dir()?;
    let kinds = kinds(cfg, &AlgorithmKind::ALL)?;
    let thresholds = cfg.threshold.clone().unwrap_or_else(|| DEFAULT_BENCH_THRESHOLDS.to_vec());
    if let Some(t) = thresholds.iter().find(|t| !(**t > 0.0)) {
        return Err(CliError::config(format!("thresholds must be positive, got {t}")));
    }
    let log = load(cfg)?;
    let net = HeteroNetwork::snapshot(&log, cfg.train_end);
    non_empty(&net)?;
    let prop = engine(cfg, &net)?;
    let mut base = RankParams::<f64>::new().with_max_iters(cfg.max_iters.unwrap_or(DEFAULT_MAX_ITERS));
    base.alpha = cfg.alpha;
    base.beta = cfg.beta;
    let rows = convergence_benchmark(prop.as_ref(), &kinds, &thresholds, &base)?;
    write_file(out, "convergence.csv", &write_bench_csv(&rows))?;

    let mut meta = RunMeta::new("bench", cfg)?.with_network(&net);
    for r in rows.iter().filter(|r| !r.converged) {
        let note = format!("{} at threshold {:e} hit max_iters without converging", r.kind, r.threshold);
        log::warn!("{note}");
        meta.notes.push(note);
    }
    write_meta(out, &meta)
}
