//! Acceptance checks, one line per criterion. Run with
//! `cargo test -p devrank-cli --test acceptance`.

mod common;
#[path = "../../core/tests/support/oracle.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::{Duration, Instant};

use common::*;
use devrank::dense::DensePropagator;
use devrank::evaluation::{pearson_top_k, precision_at_k, Correlation, TopKSelection};
use devrank::rankers::{ranking_order, run, run_observed, AlgorithmKind, IterationView, RankParams};
use devrank::{CommitPropagation, HeteroNetwork, SparsePropagator};
use oracle::{linf, random_network, random_weights, Dense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ORACLE_NETWORKS: u64 = 60;
const ORACLE_TOL: f64 = 1e-9;
const ORACLE_BUDGET: Duration = Duration::from_secs(10);
const NORMALIZATION_TOL: f64 = 1e-12;
const REDUCTION_TOL: f64 = 1e-12;
const REDUCTION_INSTANCES: u64 = 20;
const SCALE_FACTOR: u64 = 7;
const SCALE_INSTANCES: u64 = 20;
const PROTOCOL_BUDGET: Duration = Duration::from_secs(60);
const PROTOCOL_K: &str = "50";
const BENCH_THRESHOLDS: [f64; 3] = [1e-8, 1e-10, 1e-12];
const BENCH_MAX_ITERS: usize = 1000;
const METRIC_PAIRS: usize = 100;
const METRIC_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rank_params(kind: AlgorithmKind, alpha: f64, beta: f64, threshold: f64) -> RankParams<f64> {
    let p = RankParams::new().with_threshold(threshold).with_max_iters(100_000);
    match kind {
        AlgorithmKind::DevRank => p.with_alpha(alpha).with_beta(beta),
        AlgorithmKind::Dc => p.with_beta(beta),
        _ => p.with_alpha(alpha),
    }
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for seed in 0..ORACLE_NETWORKS {
        let net = random_network(seed, 20, 10);
        let (alpha, beta) = random_weights(seed);
        let o = Dense::new(&net);
        let sparse = SparsePropagator::new(&net);
        let dense = DensePropagator::<f64>::new(&net).map_err(|e| e.to_string())?;
        for kind in AlgorithmKind::ALL {
            let (d, p) = oracle::solve(&o, kind, alpha, beta);
            let params = rank_params(kind, alpha, beta, 1e-12);
            for state in [run(kind, &sparse, &params), run(kind, &dense, &params)] {
                let state = state.map_err(|e| e.to_string())?;
                let err = linf(&state.dev_scores, &d).max(linf(&state.proj_scores, &p));
                ensure(state.converged && err <= ORACLE_TOL, || format!("seed {seed} {kind}: L-inf {err:e}"))?;
                worst = worst.max(err);
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < ORACLE_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("{ORACLE_NETWORKS} networks x 5 algorithms x 2 engines, max L-inf {worst:.1e} <= {ORACLE_TOL:e}, {elapsed:.2?}"))
}

fn normalization() -> Outcome {
    let mut iterations = 0usize;
    let mut worst = 0.0f64;
    for seed in 0..ORACLE_NETWORKS {
        let net = random_network(seed, 20, 10);
        let (alpha, beta) = random_weights(seed);
        let prop = SparsePropagator::new(&net);
        for kind in AlgorithmKind::ALL {
            let mut bad = None;
            let mut check = |v: &IterationView<'_, f64>| {
                let sd = (v.dev_scores.iter().sum::<f64>() - 1.0).abs();
                let sp = (v.proj_scores.iter().sum::<f64>() - 1.0).abs();
                worst = worst.max(sd).max(sp);
                iterations += 1;
                if (sd > NORMALIZATION_TOL || sp > NORMALIZATION_TOL) && bad.is_none() {
                    bad = Some(format!("seed {seed} {kind} iteration {}: |sum-1| {sd:e} / {sp:e}", v.iteration));
                }
            };
            run_observed(kind, &prop, &rank_params(kind, alpha, beta, 1e-12), Some(&mut check)).map_err(|e| e.to_string())?;
            if let Some(msg) = bad {
                return Err(msg);
            }
        }
    }
    Ok(format!("{iterations} iterations checked, max |sum - 1| {worst:.1e} <= {NORMALIZATION_TOL:e}"))
}

fn reductions() -> Outcome {
    let mut worst = 0.0f64;
    for seed in 0..REDUCTION_INSTANCES {
        let net = random_network(1000 + seed, 20, 10);
        let prop = SparsePropagator::new(&net);
        let (alpha, beta) = random_weights(1000 + seed);
        let p = RankParams::new().with_threshold(1e-13).with_max_iters(100_000);
        let get = |kind, params: RankParams<f64>| run(kind, &prop, &params).map(|s| s.dev_scores).map_err(|e| e.to_string());
        let df = linf(&get(AlgorithmKind::DevRank, p.with_alpha(alpha).with_beta(0.0))?, &get(AlgorithmKind::Df, p.with_alpha(alpha))?);
        let dc = linf(&get(AlgorithmKind::DevRank, p.with_alpha(0.0).with_beta(beta))?, &get(AlgorithmKind::Dc, p.with_beta(beta))?);
        ensure(df <= REDUCTION_TOL, || format!("seed {seed}: DevRank(beta=0) vs DF {df:e}"))?;
        ensure(dc <= REDUCTION_TOL, || format!("seed {seed}: DevRank(alpha=0) vs DC {dc:e}"))?;
        worst = worst.max(df).max(dc);
    }
    Ok(format!("{REDUCTION_INSTANCES} instances, max L-inf {worst:.1e} <= {REDUCTION_TOL:e}"))
}

fn jack_example() -> Outcome {
    let mut b = HeteroNetwork::builder();
    b.add_commits("Jack", "p1", 3).add_commits("Jack", "p2", 1).add_commits("Mike", "p1", 1);
    let net = b.build();
    let c = CommitPropagation::new(&net);
    let id = |n: &str| net.developer_id(n).unwrap();
    let pid = |n: &str| net.project_id(n).unwrap();
    let dp: [f64; 2] = [c.dev_to_proj_weight(id("Jack"), pid("p1")), c.dev_to_proj_weight(id("Jack"), pid("p2"))];
    let pd: [f64; 2] = [c.proj_to_dev_weight(pid("p1"), id("Jack")), c.proj_to_dev_weight(pid("p1"), id("Mike"))];
    ensure(dp == [0.75, 0.25], || format!("dev->proj {dp:?}"))?;
    ensure(pd == [0.75, 0.25], || format!("proj->dev {pd:?}"))?;
    let flow = c.apply_dev_to_proj(&[1.0, 0.0]).map_err(|e| e.to_string())?;
    ensure(flow == [0.75, 0.25], || format!("Jack's unit score spreads as {flow:?}"))?;
    Ok("dev->proj (0.75, 0.25), proj->dev (0.75, 0.25), exact".into())
}

fn scale_invariance() -> Outcome {
    for seed in 0..SCALE_INSTANCES {
        let net = random_network(2000 + seed, 20, 10);
        let mut b = HeteroNetwork::builder();
        net.developer_names().iter().for_each(|n| {
            b.add_developer(n);
        });
        net.project_names().iter().for_each(|n| {
            b.add_project(n);
        });
        for &(f, t) in net.follows() {
            b.add_follow(net.developer_name(f), net.developer_name(t));
        }
        for &(d, p, n) in net.commits() {
            b.add_commits(net.developer_name(d), net.project_name(p), SCALE_FACTOR * n);
        }
        let scaled = b.build();
        let params = RankParams::new().with_threshold(1e-12);
        let a = run(AlgorithmKind::DevRank, &SparsePropagator::new(&net), &params).map_err(|e| e.to_string())?;
        let s = run(AlgorithmKind::DevRank, &SparsePropagator::new(&scaled), &params).map_err(|e| e.to_string())?;
        ensure(ranking_order(&a.dev_scores) == ranking_order(&s.dev_scores), || format!("seed {seed}: order changed"))?;
    }
    Ok(format!("{SCALE_INSTANCES} instances, counts x{SCALE_FACTOR}, developer order unchanged"))
}

fn cli_ok(args: Vec<String>) -> Result<(), String> {
    let out = devrank(&args);
    ensure(out.status.success(), || format!("devrank {} exited {}: {}", args[0], code(&out), stderr(&out)))
}

fn verb(verb: &str, data: &Path, extra: &[&str]) -> Vec<String> {
    let mut a = vec![verb.to_string()];
    a.extend(input_flags(data));
    a.extend(extra.iter().map(|s| s.to_string()));
    a
}

fn protocol(work: &Path) -> Outcome {
    let start = Instant::now();
    let data = work.join("synthetic");
    cli_ok(["gen", "--out", &path_arg(&data), "--n-developers", "10000", "--n-projects", "1000", "--seed", "42"].map(String::from).to_vec())?;
    // The generator spans 2008-01-01..2014-01-01; split at the midpoint.
    let out = work.join("eval");
    cli_ok(verb("eval", &data, &["--train-end", "2011-01-01", "--test-end", "2014-01-01", "--out", &path_arg(&out)]))?;
    let elapsed = start.elapsed();
    let table = read(out.join("precision_developers.csv"));
    let row = column(&table, "k").iter().position(|k| k == PROTOCOL_K).ok_or("no k=50 row")?;
    let dev: f64 = column(&table, "DevRank")[row].parse().unwrap();
    let hits: f64 = column(&table, "HITS")[row].parse().unwrap();
    ensure(dev > hits, || format!("DevRank p@50 {dev} <= HITS p@50 {hits}"))?;
    ensure(elapsed < PROTOCOL_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("p@50 DevRank {dev} > HITS {hits}, gen + eval {elapsed:.2?}"))
}

fn convergence(work: &Path) -> Outcome {
    let data = work.join("synthetic");
    let out = work.join("bench");
    let thresholds = BENCH_THRESHOLDS.map(|t| format!("{t:e}")).join(",");
    let max_iters = BENCH_MAX_ITERS.to_string();
    cli_ok(verb("bench", &data, &["--threshold", &thresholds, "--max-iters", &max_iters, "--out", &path_arg(&out)]))?;
    let meta = read(out.join("run_meta.json"));
    ensure(!meta.contains("without converging"), || "a run hit max_iters".into())?;
    let body = read(out.join("convergence.csv"));
    let mut by_algo: BTreeMap<String, Vec<(f64, usize)>> = BTreeMap::new();
    for line in body.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        by_algo.entry(f[0].to_string()).or_default().push((f[1].parse().unwrap(), f[2].parse().unwrap()));
    }
    ensure(by_algo.len() == 5, || format!("expected 5 algorithms, got {}", by_algo.len()))?;
    let mut summary = Vec::new();
    for (algo, rows) in &by_algo {
        let ts: Vec<f64> = rows.iter().map(|r| r.0).collect();
        ensure(ts == BENCH_THRESHOLDS, || format!("{algo}: thresholds {ts:?}"))?;
        let its: Vec<usize> = rows.iter().map(|r| r.1).collect();
        ensure(its.windows(2).all(|w| w[0] <= w[1]), || format!("{algo}: iterations {its:?} decrease"))?;
        ensure(its.iter().all(|&i| i < BENCH_MAX_ITERS), || format!("{algo}: iterations {its:?}"))?;
        summary.push(format!("{algo} {its:?}"));
    }
    Ok(summary.join(", "))
}

fn naive_top(v: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap().then(a.cmp(&b)));
    idx.truncate(k);
    idx
}

fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(88);
    let mut worst = 0.0f64;
    for pair in 0..METRIC_PAIRS {
        let n = rng.gen_range(5..80);
        let scores: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let truth: Vec<f64> = (0..n).map(|_| rng.gen_range(0..15) as f64).collect();
        let k = rng.gen_range(2..=n);
        let p = precision_at_k(&scores, &truth, k).map_err(|e| e.to_string())?;
        let t = naive_top(&truth, k);
        let want = naive_top(&scores, k).iter().filter(|i| t.contains(i)).count() as f64 / k as f64;
        ensure((p - want).abs() <= METRIC_TOL && (0.0..=1.0).contains(&p), || format!("pair {pair}: precision {p} vs {want}"))?;

        let chosen = naive_top(&scores, k);
        let x: Vec<f64> = chosen.iter().map(|&i| scores[i]).collect();
        let y: Vec<f64> = chosen.iter().map(|&i| truth[i]).collect();
        let want = naive_pearson(&x, &y);
        let got = pearson_top_k(&scores, &truth, k, TopKSelection::ByScore).map_err(|e| e.to_string())?;
        match got {
            Correlation::Defined(r) => {
                ensure((r - want).abs() <= METRIC_TOL, || format!("pair {pair}: pearson {r} vs {want}"))?;
                worst = worst.max((r - want).abs());
                let (a, b, c, d) = (rng.gen_range(0.1..10.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.1..10.0), rng.gen_range(-3.0..3.0));
                let s2: Vec<f64> = scores.iter().map(|s| a * s + b).collect();
                let t2: Vec<f64> = truth.iter().map(|s| c * s + d).collect();
                let r2 = pearson_top_k(&s2, &t2, k, TopKSelection::ByScore).map_err(|e| e.to_string())?.or_nan();
                ensure((r - r2).abs() <= METRIC_TOL, || format!("pair {pair}: affine {r} vs {r2}"))?;
            }
            Correlation::Undefined(_) => ensure(!want.is_finite(), || format!("pair {pair}: undefined but naive {want}"))?,
        }
    }
    Ok(format!("{METRIC_PAIRS} pairs, max pearson diff {worst:.1e} <= {METRIC_TOL:e}; precision in [0,1]; affine invariant"))
}

/// Every file under `dir`, with the bench millis column blanked.
fn snapshot(dir: &Path) -> BTreeMap<String, String> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let mut body = read(&path);
        if name == "convergence.csv" {
            body = body.lines().map(|l| l.rsplit_once(',').unwrap().0.to_string() + "\n").collect();
        }
        files.insert(name, body);
    }
    files
}

fn determinism(work: &Path) -> Outcome {
    let split = ["--train-end", "2011-01-01", "--test-end", "2014-01-01"];
    let mut checked = Vec::new();
    let mut reference: BTreeMap<&str, BTreeMap<String, String>> = BTreeMap::new();
    for (attempt, threads) in ["1", "4", "4"].iter().enumerate() {
        let root = work.join(format!("det{attempt}"));
        let data = root.join("data");
        let gen = ["gen", "--n-developers", "5000", "--n-projects", "500", "--seed", "11", "--threads", threads, "--out"];
        cli_ok(gen.iter().map(|s| s.to_string()).chain([path_arg(&data)]).collect())?;
        // Later commands read the first run's data so input digests in run_meta.json match.
        let shared = work.join("det0/data");
        let commands: [(&str, Vec<&str>); 5] = [
            ("rank", vec![]),
            ("eval", split.to_vec()),
            ("sweep", [&split[..], &["--step", "0.1", "--k", "50"]].concat()),
            ("stats", split.to_vec()),
            ("bench", vec![]),
        ];
        let mut outputs = vec![("gen", snapshot(&data))];
        for (name, extra) in commands {
            let out = root.join(name);
            let mut args = verb(name, &shared, &extra);
            args.extend(["--threads".to_string(), threads.to_string(), "--out".to_string(), path_arg(&out)]);
            cli_ok(args)?;
            outputs.push((name, snapshot(&out)));
        }
        for (name, files) in outputs {
            match reference.get(name) {
                None => {
                    reference.insert(name, files);
                }
                Some(first) => {
                    ensure(*first == files, || format!("{name} differs on attempt {attempt} (threads {threads})"))?;
                    if attempt == 1 {
                        checked.push(format!("{name} ({} files)", files.len()));
                    }
                }
            }
        }
    }
    Ok(format!("byte-identical across runs and --threads 1/4: {}; bench compared without millis", checked.join(", ")))
}

fn main() {
    let work = tempfile::tempdir().expect("temp dir");
    let criteria: Vec<(&str, Check<'_>)> = vec![
        ("oracle equivalence", Box::new(oracle_equivalence)),
        ("normalization invariant", Box::new(normalization)),
        ("reduction identities", Box::new(reductions)),
        ("asymmetric propagation (Jack example)", Box::new(jack_example)),
        ("ranking scale invariance", Box::new(scale_invariance)),
        ("synthetic protocol reproduction", Box::new(|| protocol(work.path()))),
        ("convergence benchmark", Box::new(|| convergence(work.path()))),
        ("evaluation-math oracles", Box::new(metric_oracles)),
        ("determinism", Box::new(|| determinism(work.path()))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
