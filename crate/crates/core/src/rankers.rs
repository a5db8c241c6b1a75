//! DevRank and the four baseline rankers.
//!
//! All algorithms iterate Jacobi-style: iteration `n` is computed entirely
//! from iteration `n − 1`. Both score vectors are rescaled to unit sum after
//! every iteration, and the stopping error is the L1 change summed over the
//! vectors that are iterated.
//!
//! | kind     | developer update                                   | project update           |
//! |----------|----------------------------------------------------|--------------------------|
//! | DevRank  | `α·F(D) + β·PD(P) + (1−α−β)/n_d`                   | `DP(D)` each iteration   |
//! | PageRank | `α·F(D) + (1−α)/n_d`                               | `C(D)` once, at the end  |
//! | HITS     | `α·Cᵀ(P) + (1−α)/n_d`                              | `C(D)` each iteration    |
//! | DF       | `α·F(D) + (1−α)/n_d`                               | `DP(D)` once, at the end |
//! | DC       | `β·PD(P) + (1−β)/n_d`                              | `DP(D)` each iteration   |
//!
//! `F` is the follow step, `DP`/`PD` the commit-weighted flows and `C`/`Cᵀ`
//! the unweighted commit adjacency.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DevId, HeteroNetwork, ProjectId};
use crate::propagation::{Propagator, SparsePropagator};
use crate::scalar::{l1_distance, normalize, Scalar};

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_DEVRANK_ALPHA: f64 = 0.37;
pub const DEFAULT_DEVRANK_BETA: f64 = 0.63;
pub const DEFAULT_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_MAX_ITERS: usize = 1000;

/// Slack allowed on `α + β ≤ 1`, so lattice points such as `0.37 + 0.63`
/// are not rejected over a rounding ulp.
const WEIGHT_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AlgorithmKind {
    DevRank,
    PageRank,
    #[serde(rename = "HITS")]
    Hits,
    #[serde(rename = "DF")]
    Df,
    #[serde(rename = "DC")]
    Dc,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] =
        [AlgorithmKind::DevRank, AlgorithmKind::PageRank, AlgorithmKind::Hits, AlgorithmKind::Df, AlgorithmKind::Dc];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::DevRank => "DevRank",
            AlgorithmKind::PageRank => "PageRank",
            AlgorithmKind::Hits => "HITS",
            AlgorithmKind::Df => "DF",
            AlgorithmKind::Dc => "DC",
        }
    }

    pub fn uses_alpha(self) -> bool {
        !matches!(self, AlgorithmKind::Dc)
    }

    pub fn uses_beta(self) -> bool {
        matches!(self, AlgorithmKind::DevRank | AlgorithmKind::Dc)
    }
}

impl fmt::Display for AlgorithmKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AlgorithmKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "devrank" => Ok(AlgorithmKind::DevRank),
            "pagerank" => Ok(AlgorithmKind::PageRank),
            "hits" => Ok(AlgorithmKind::Hits),
            "df" => Ok(AlgorithmKind::Df),
            "dc" => Ok(AlgorithmKind::Dc),
            other => Err(Error::InvalidParameter(format!("unknown algorithm `{other}`"))),
        }
    }
}

/// Ranker parameters. `alpha` weights the follow term (or is the damping
/// factor for PageRank/HITS/DF), `beta` weights the commit term. Unset
/// weights fall back to per-algorithm defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankParams<S> {
    pub alpha: Option<S>,
    pub beta: Option<S>,
    pub threshold: S,
    pub max_iters: usize,
}

impl<S: Scalar> Default for RankParams<S> {
    fn default() -> Self {
        Self { alpha: None, beta: None, threshold: S::lit(DEFAULT_THRESHOLD), max_iters: DEFAULT_MAX_ITERS }
    }
}

impl<S: Scalar> RankParams<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_alpha(mut self, alpha: S) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn with_beta(mut self, beta: S) -> Self {
        self.beta = Some(beta);
        self
    }

    pub fn with_threshold(mut self, threshold: S) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    /// Effective `(alpha, beta)` for `kind` plus warnings about supplied
    /// weights the algorithm ignores.
    pub fn resolve(&self, kind: AlgorithmKind) -> Result<(S, S, Vec<String>)> {
        let mut warnings = Vec::new();
        if !(self.threshold > S::zero()) {
            return Err(Error::InvalidParameter(format!("threshold must be positive, got {}", self.threshold)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be at least 1".into()));
        }
        let check = |name: &str, v: S| -> Result<S> {
            if v >= S::zero() && v <= S::one() {
                Ok(v)
            } else {
                Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        let ignored = |name: &str, warnings: &mut Vec<String>| {
            warnings.push(format!("{kind} ignores {name}; the supplied value is unused"));
        };
        let (alpha, beta) = match kind {
            AlgorithmKind::DevRank => {
                let alpha = check("alpha", self.alpha.unwrap_or(S::lit(DEFAULT_DEVRANK_ALPHA)))?;
                let beta = check("beta", self.beta.unwrap_or(S::lit(DEFAULT_DEVRANK_BETA)))?;
                if (alpha + beta).as_f64() > 1.0 + WEIGHT_SLACK {
                    return Err(Error::InvalidParameter(format!("alpha + beta must not exceed 1, got {alpha} + {beta}")));
                }
                (alpha, beta)
            }
            AlgorithmKind::PageRank | AlgorithmKind::Hits | AlgorithmKind::Df => {
                if self.beta.is_some() {
                    ignored("beta", &mut warnings);
                }
                (check("alpha", self.alpha.unwrap_or(S::lit(DEFAULT_DAMPING)))?, S::zero())
            }
            AlgorithmKind::Dc => {
                if self.alpha.is_some() {
                    ignored("alpha", &mut warnings);
                }
                (S::zero(), check("beta", self.beta.unwrap_or(S::lit(DEFAULT_DAMPING)))?)
            }
        };
        Ok((alpha, beta, warnings))
    }
}

/// Outcome of one ranker run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankState<S> {
    pub kind: AlgorithmKind,
    pub alpha: S,
    pub beta: S,
    pub threshold: S,
    pub max_iters: usize,
    pub dev_scores: Vec<S>,
    pub proj_scores: Vec<S>,
    /// Completed iterations of the main loop.
    pub iterations: usize,
    /// Iterations spent in the follow-network PageRank used to seed DevRank.
    pub init_iterations: usize,
    /// L1 error of each completed main-loop iteration.
    pub trace: Vec<S>,
    pub converged: bool,
    pub warnings: Vec<String>,
}

impl<S: Scalar> RankState<S> {
    pub fn final_err(&self) -> Option<S> {
        self.trace.last().copied()
    }

    /// Developers from most to least influential.
    pub fn developer_ranking(&self) -> Vec<DevId> {
        ranking_order(&self.dev_scores).into_iter().map(|i| DevId(i as u32)).collect()
    }

    pub fn project_ranking(&self) -> Vec<ProjectId> {
        ranking_order(&self.proj_scores).into_iter().map(|i| ProjectId(i as u32)).collect()
    }
}

/// Indices sorted by descending value, ties broken by ascending index.
/// NaN sorts after every number.
pub fn ranking_order<T: PartialOrd>(values: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (&values[a], &values[b]);
        let by_value = match (x.partial_cmp(x).is_some(), y.partial_cmp(y).is_some()) {
            (true, true) => y.partial_cmp(x).expect("comparable"),
            (true, false) => std::cmp::Ordering::Less,
            (false, true) => std::cmp::Ordering::Greater,
            (false, false) => std::cmp::Ordering::Equal,
        };
        by_value.then(a.cmp(&b))
    });
    order
}

/// 1-based rank position of every entity under [`ranking_order`].
pub fn rank_positions<T: PartialOrd>(values: &[T]) -> Vec<usize> {
    let mut positions = vec![0; values.len()];
    for (pos, idx) in ranking_order(values).into_iter().enumerate() {
        positions[idx] = pos + 1;
    }
    positions
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    /// Follow-network PageRank seeding DevRank.
    Init,
    Main,
}

/// Snapshot handed to an observer after each iteration.
#[derive(Debug)]
pub struct IterationView<'a, S> {
    pub phase: Phase,
    pub iteration: usize,
    pub dev_scores: &'a [S],
    pub proj_scores: &'a [S],
    pub err: S,
}

pub type Observer<'o, S> = Option<&'o mut dyn FnMut(&IterationView<'_, S>)>;

/// Converged follow-network PageRank.
#[derive(Debug, Clone, PartialEq)]
pub struct FollowRank<S> {
    pub scores: Vec<S>,
    pub iterations: usize,
    pub trace: Vec<S>,
    pub converged: bool,
}

/// PageRank over the follow network, started from the uniform vector.
pub fn pagerank_follow<S, P>(prop: &P, alpha: S, threshold: S, max_iters: usize) -> Result<FollowRank<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    follow_iteration(prop, alpha, threshold, max_iters, &mut |_, _, _| Ok(()))
}

type StepHook<'a, S> = &'a mut dyn FnMut(usize, &[S], S) -> Result<()>;

fn follow_iteration<S, P>(
    prop: &P,
    alpha: S,
    threshold: S,
    max_iters: usize,
    each: StepHook<'_, S>,
) -> Result<FollowRank<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    let n = prop.n_developers();
    if n == 0 {
        return Err(Error::NoDevelopers);
    }
    let teleport = (S::one() - alpha) / S::from_len(n);
    let mut scores = vec![S::one() / S::from_len(n); n];
    let mut trace = Vec::new();
    let mut converged = false;
    for it in 1..=max_iters {
        let mut next = prop.follow(&scores)?;
        for v in next.iter_mut() {
            *v = alpha * *v + teleport;
        }
        normalize(&mut next);
        let err = l1_distance(&next, &scores);
        scores = next;
        trace.push(err);
        each(it, &scores, err)?;
        if err < threshold {
            converged = true;
            break;
        }
    }
    Ok(FollowRank { iterations: trace.len(), scores, trace, converged })
}

#[derive(Debug, Clone, Copy)]
enum CommitFlow {
    Weighted,
    Binary,
}

struct Coupled<S> {
    dev: Vec<S>,
    proj: Vec<S>,
    trace: Vec<S>,
    converged: bool,
}

/// Joint developer/project iteration shared by DevRank, HITS and DC.
#[allow(clippy::too_many_arguments)]
fn coupled_iteration<S, P>(
    prop: &P,
    mut dev: Vec<S>,
    mut proj: Vec<S>,
    follow_weight: S,
    commit_weight: S,
    flow: CommitFlow,
    threshold: S,
    max_iters: usize,
    observer: &mut Observer<'_, S>,
) -> Result<Coupled<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    let n_d = prop.n_developers();
    let rest = (S::one() - follow_weight - commit_weight).max(S::zero());
    let teleport = rest / S::from_len(n_d);
    let mut trace = Vec::new();
    let mut converged = false;
    for it in 1..=max_iters {
        let (mut next_proj, back) = match flow {
            CommitFlow::Weighted => (prop.dev_to_proj(&dev)?, prop.proj_to_dev(&proj)?),
            CommitFlow::Binary => (prop.binary_dev_to_proj(&dev)?, prop.binary_proj_to_dev(&proj)?),
        };
        normalize(&mut next_proj);

        let mut next_dev = if follow_weight > S::zero() { prop.follow(&dev)? } else { vec![S::zero(); n_d] };
        for (v, &b) in next_dev.iter_mut().zip(&back) {
            *v = follow_weight * *v + commit_weight * b + teleport;
        }
        normalize(&mut next_dev);

        let err = l1_distance(&next_dev, &dev) + l1_distance(&next_proj, &proj);
        dev = next_dev;
        proj = next_proj;
        trace.push(err);
        if let Some(obs) = observer.as_mut() {
            obs(&IterationView { phase: Phase::Main, iteration: it, dev_scores: &dev, proj_scores: &proj, err });
        }
        if err < threshold {
            converged = true;
            break;
        }
    }
    Ok(Coupled { dev, proj, trace, converged })
}

fn uniform<S: Scalar>(n: usize) -> Vec<S> {
    if n == 0 {
        Vec::new()
    } else {
        vec![S::one() / S::from_len(n); n]
    }
}

fn not_converged<S: Scalar>(kind: AlgorithmKind, max_iters: usize, trace: &[S]) -> String {
    let last = trace.last().map(|e| e.as_f64()).unwrap_or(f64::NAN);
    format!("{kind} did not converge within {max_iters} iterations (last err {last:e})")
}

/// DevRank: follow PageRank and asymmetric commit propagation, iterated
/// jointly. Developer scores are seeded with the follow-network PageRank
/// under the same follow weight; project scores start uniform.
pub fn devrank<S, P>(prop: &P, params: &RankParams<S>) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    devrank_observed(prop, params, None)
}

fn devrank_observed<S, P>(prop: &P, params: &RankParams<S>, mut observer: Observer<'_, S>) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    let kind = AlgorithmKind::DevRank;
    let (alpha, beta, mut warnings) = params.resolve(kind)?;
    let initial_proj = uniform::<S>(prop.n_projects());
    let seed = follow_iteration(prop, alpha, params.threshold, params.max_iters, &mut |it, dev, err| {
        if let Some(obs) = observer.as_mut() {
            obs(&IterationView { phase: Phase::Init, iteration: it, dev_scores: dev, proj_scores: &initial_proj, err });
        }
        Ok(())
    })?;
    if !seed.converged {
        warnings.push(format!(
            "follow-network seeding did not converge within {} iterations",
            params.max_iters
        ));
    }
    let run = coupled_iteration(
        prop,
        seed.scores,
        initial_proj.clone(),
        alpha,
        beta,
        CommitFlow::Weighted,
        params.threshold,
        params.max_iters,
        &mut observer,
    )?;
    if !run.converged {
        warnings.push(not_converged(kind, params.max_iters, &run.trace));
    }
    Ok(RankState {
        kind,
        alpha,
        beta,
        threshold: params.threshold,
        max_iters: params.max_iters,
        dev_scores: run.dev,
        proj_scores: run.proj,
        iterations: run.trace.len(),
        init_iterations: seed.iterations,
        trace: run.trace,
        converged: run.converged,
        warnings,
    })
}

/// Shared body of PageRank and DF: follow PageRank on developers, projects
/// derived once from the converged developer vector.
fn follow_then_project<S, P>(
    kind: AlgorithmKind,
    prop: &P,
    params: &RankParams<S>,
    mut observer: Observer<'_, S>,
) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    let (alpha, beta, mut warnings) = params.resolve(kind)?;
    let project = |dev: &[S]| -> Result<Vec<S>> {
        let mut proj = match kind {
            AlgorithmKind::PageRank => prop.binary_dev_to_proj(dev)?,
            _ => prop.dev_to_proj(dev)?,
        };
        normalize(&mut proj);
        Ok(proj)
    };
    let ranked = follow_iteration(prop, alpha, params.threshold, params.max_iters, &mut |it, dev, err| {
        if let Some(obs) = observer.as_mut() {
            let proj = project(dev)?;
            obs(&IterationView { phase: Phase::Main, iteration: it, dev_scores: dev, proj_scores: &proj, err });
        }
        Ok(())
    })?;
    if !ranked.converged {
        warnings.push(not_converged(kind, params.max_iters, &ranked.trace));
    }
    let proj_scores = project(&ranked.scores)?;
    Ok(RankState {
        kind,
        alpha,
        beta,
        threshold: params.threshold,
        max_iters: params.max_iters,
        dev_scores: ranked.scores,
        proj_scores,
        iterations: ranked.iterations,
        init_iterations: 0,
        trace: ranked.trace,
        converged: ranked.converged,
        warnings,
    })
}

/// PageRank baseline: follow PageRank for developers, unweighted commit
/// projection for projects.
pub fn pagerank_variant<S, P>(prop: &P, params: &RankParams<S>) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    follow_then_project(AlgorithmKind::PageRank, prop, params, None)
}

/// DF ablation: follow PageRank for developers, weighted commit projection
/// for projects.
pub fn df_variant<S, P>(prop: &P, params: &RankParams<S>) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    follow_then_project(AlgorithmKind::Df, prop, params, None)
}

fn commit_only<S, P>(
    kind: AlgorithmKind,
    prop: &P,
    params: &RankParams<S>,
    mut observer: Observer<'_, S>,
) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    let (alpha, beta, mut warnings) = params.resolve(kind)?;
    if prop.n_developers() == 0 {
        return Err(Error::NoDevelopers);
    }
    let (weight, flow) = match kind {
        AlgorithmKind::Hits => (alpha, CommitFlow::Binary),
        _ => (beta, CommitFlow::Weighted),
    };
    let run = coupled_iteration(
        prop,
        uniform(prop.n_developers()),
        uniform(prop.n_projects()),
        S::zero(),
        weight,
        flow,
        params.threshold,
        params.max_iters,
        &mut observer,
    )?;
    if !run.converged {
        warnings.push(not_converged(kind, params.max_iters, &run.trace));
    }
    Ok(RankState {
        kind,
        alpha,
        beta,
        threshold: params.threshold,
        max_iters: params.max_iters,
        dev_scores: run.dev,
        proj_scores: run.proj,
        iterations: run.trace.len(),
        init_iterations: 0,
        trace: run.trace,
        converged: run.converged,
        warnings,
    })
}

/// HITS baseline on the unweighted commit network: developers act as hubs,
/// projects as authorities. Follow edges are not used.
pub fn hits_variant<S, P>(prop: &P, params: &RankParams<S>) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    commit_only(AlgorithmKind::Hits, prop, params, None)
}

/// DC ablation: asymmetric commit propagation only.
pub fn dc_variant<S, P>(prop: &P, params: &RankParams<S>) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    commit_only(AlgorithmKind::Dc, prop, params, None)
}

/// Dispatches to the ranker for `kind`. Ignored parameters are reported as
/// warnings (logged and kept in [`RankState::warnings`]).
pub fn run<S, P>(kind: AlgorithmKind, prop: &P, params: &RankParams<S>) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    run_observed(kind, prop, params, None)
}

/// [`run`] with a callback invoked after every iteration, including the
/// seeding iterations of DevRank.
pub fn run_observed<S, P>(
    kind: AlgorithmKind,
    prop: &P,
    params: &RankParams<S>,
    observer: Observer<'_, S>,
) -> Result<RankState<S>>
where
    S: Scalar,
    P: Propagator<S> + ?Sized,
{
    let state = match kind {
        AlgorithmKind::DevRank => devrank_observed(prop, params, observer),
        AlgorithmKind::PageRank | AlgorithmKind::Df => follow_then_project(kind, prop, params, observer),
        AlgorithmKind::Hits | AlgorithmKind::Dc => commit_only(kind, prop, params, observer),
    }?;
    for w in &state.warnings {
        log::warn!("{w}");
    }
    Ok(state)
}

/// Builds the sparse engine for `net` and runs `kind` on it.
pub fn rank_network<S: Scalar>(kind: AlgorithmKind, net: &HeteroNetwork, params: &RankParams<S>) -> Result<RankState<S>> {
    run(kind, &SparsePropagator::new(net), params)
}
