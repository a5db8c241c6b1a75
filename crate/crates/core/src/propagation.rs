//! Matrix-free score flows over the follow graph and the commit bipartite
//! graph.
//!
//! Every `apply_*` pulls into each destination from a sorted in-edge list, so
//! the floating-point accumulation order is fixed by the network alone. Large
//! vectors are filled in parallel across destinations; the result is
//! bitwise-identical for any worker count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DevId, HeteroNetwork, ProjectId};
use crate::scalar::Scalar;

/// Destinations below this count are filled sequentially.
const PARALLEL_MIN: usize = 4096;

fn gather<S, F>(n: usize, f: F) -> Vec<S>
where
    S: Scalar,
    F: Fn(usize) -> S + Sync + Send,
{
    if n >= PARALLEL_MIN {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

fn check_len<S>(v: &[S], expected: usize) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual: v.len() })
    }
}

/// Compressed adjacency: `targets[offsets[i]..offsets[i + 1]]` are the
/// neighbours of node `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Csr<T> {
    offsets: Vec<usize>,
    targets: Vec<T>,
}

impl<T: Copy> Csr<T> {
    /// `pairs` must be sorted by source.
    fn from_sorted(n: usize, pairs: impl Iterator<Item = (usize, T)>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        let mut targets = Vec::new();
        for (src, t) in pairs {
            offsets[src + 1] += 1;
            targets.push(t);
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Self { offsets, targets }
    }

    #[inline]
    fn row(&self, i: usize) -> &[T] {
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Row-stochastic follow transitions. Score flows from a follower to each of
/// its followees, split evenly by the follower's out-degree; developers who
/// follow nobody spread their score uniformly over all developers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FollowTransition {
    n: usize,
    followees: Csr<DevId>,
    followers: Csr<DevId>,
    out_degree: Vec<u32>,
    dangling: Vec<DevId>,
}

impl FollowTransition {
    pub fn new(net: &HeteroNetwork) -> Self {
        let n = net.n_developers();
        // follows() is sorted by (follower, followee).
        let followees = Csr::from_sorted(n, net.follows().iter().map(|&(f, t)| (f.index(), t)));
        let mut by_followee: Vec<(DevId, DevId)> = net.follows().iter().map(|&(f, t)| (t, f)).collect();
        by_followee.sort_unstable();
        let followers = Csr::from_sorted(n, by_followee.into_iter().map(|(t, f)| (t.index(), f)));
        let out_degree: Vec<u32> = (0..n).map(|i| followees.row(i).len() as u32).collect();
        let dangling = (0..n).filter(|&i| out_degree[i] == 0).map(|i| DevId(i as u32)).collect();
        Self { n, followees, followers, out_degree, dangling }
    }

    pub fn n_developers(&self) -> usize {
        self.n
    }

    pub fn followees(&self, d: DevId) -> &[DevId] {
        self.followees.row(d.index())
    }

    pub fn followers(&self, d: DevId) -> &[DevId] {
        self.followers.row(d.index())
    }

    pub fn out_degree(&self, d: DevId) -> u32 {
        self.out_degree[d.index()]
    }

    pub fn dangling(&self) -> &[DevId] {
        &self.dangling
    }

    /// One follow step: `inflow(d) = Σ_{f → d} s(f) / out(f) + Σ_{dangling g} s(g) / n`.
    pub fn apply<S: Scalar>(&self, scores: &[S]) -> Result<Vec<S>> {
        check_len(scores, self.n)?;
        if self.n == 0 {
            return Ok(Vec::new());
        }
        let share: Vec<S> = (0..self.n)
            .map(|i| match self.out_degree[i] {
                0 => S::zero(),
                k => scores[i] / S::from_count(k as u64),
            })
            .collect();
        let dangling_mass: S = self.dangling.iter().map(|d| scores[d.index()]).sum();
        let uniform = dangling_mass / S::from_len(self.n);
        Ok(gather(self.n, |d| {
            self.followers.row(d).iter().fold(uniform, |acc, f| acc + share[f.index()])
        }))
    }
}

/// Commit-weighted bipartite propagation.
///
/// Developer → project flow is split by the developer's total commits;
/// project → developer flow is split by the project's total received commits.
/// The two directions are therefore not transposes of each other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommitPropagation {
    n_d: usize,
    n_p: usize,
    edges: Vec<(DevId, ProjectId, u64)>,
    by_developer: Csr<(ProjectId, u64)>,
    by_project: Csr<(DevId, u64)>,
    dev_total: Vec<u64>,
    proj_total: Vec<u64>,
}

impl CommitPropagation {
    pub fn new(net: &HeteroNetwork) -> Self {
        let (n_d, n_p) = (net.n_developers(), net.n_projects());
        let edges = net.commits().to_vec();
        let by_developer = Csr::from_sorted(n_d, edges.iter().map(|&(d, p, c)| (d.index(), (p, c))));
        let mut by_proj: Vec<(ProjectId, DevId, u64)> = edges.iter().map(|&(d, p, c)| (p, d, c)).collect();
        by_proj.sort_unstable();
        let by_project = Csr::from_sorted(n_p, by_proj.into_iter().map(|(p, d, c)| (p.index(), (d, c))));
        let dev_total = net.developer_commit_totals();
        let proj_total = net.project_commit_totals();
        Self { n_d, n_p, edges, by_developer, by_project, dev_total, proj_total }
    }

    pub fn n_developers(&self) -> usize {
        self.n_d
    }

    pub fn n_projects(&self) -> usize {
        self.n_p
    }

    /// Commit edges sorted by `(developer, project)`.
    pub fn edges(&self) -> &[(DevId, ProjectId, u64)] {
        &self.edges
    }

    pub fn dev_total(&self, d: DevId) -> u64 {
        self.dev_total[d.index()]
    }

    pub fn proj_total(&self, p: ProjectId) -> u64 {
        self.proj_total[p.index()]
    }

    fn count(&self, d: DevId, p: ProjectId) -> u64 {
        let row = self.by_developer.row(d.index());
        row.binary_search_by_key(&p, |&(q, _)| q).map(|i| row[i].1).unwrap_or(0)
    }

    /// Share of developer `d`'s score that flows to project `p`.
    pub fn dev_to_proj_weight<S: Scalar>(&self, d: DevId, p: ProjectId) -> S {
        match self.count(d, p) {
            0 => S::zero(),
            c => S::from_count(c) / S::from_count(self.dev_total(d)),
        }
    }

    /// Share of project `p`'s score that flows back to developer `d`.
    pub fn proj_to_dev_weight<S: Scalar>(&self, p: ProjectId, d: DevId) -> S {
        match self.count(d, p) {
            0 => S::zero(),
            c => S::from_count(c) / S::from_count(self.proj_total(p)),
        }
    }

    /// `inflow(p) = Σ_d s(d) · n(d,p) / total(d)`. Developers without
    /// commits contribute nothing.
    pub fn apply_dev_to_proj<S: Scalar>(&self, dev_scores: &[S]) -> Result<Vec<S>> {
        check_len(dev_scores, self.n_d)?;
        Ok(gather(self.n_p, |p| {
            self.by_project.row(p).iter().fold(S::zero(), |acc, &(d, c)| {
                acc + dev_scores[d.index()] * (S::from_count(c) / S::from_count(self.dev_total[d.index()]))
            })
        }))
    }

    /// `inflow(d) = Σ_p s(p) · n(d,p) / total(p)`.
    pub fn apply_proj_to_dev<S: Scalar>(&self, proj_scores: &[S]) -> Result<Vec<S>> {
        check_len(proj_scores, self.n_p)?;
        Ok(gather(self.n_d, |d| {
            self.by_developer.row(d).iter().fold(S::zero(), |acc, &(p, c)| {
                acc + proj_scores[p.index()] * (S::from_count(c) / S::from_count(self.proj_total[p.index()]))
            })
        }))
    }

    /// Unweighted adjacency sum, developer → project.
    pub fn apply_binary_dev_to_proj<S: Scalar>(&self, dev_scores: &[S]) -> Result<Vec<S>> {
        check_len(dev_scores, self.n_d)?;
        Ok(gather(self.n_p, |p| {
            self.by_project.row(p).iter().fold(S::zero(), |acc, &(d, _)| acc + dev_scores[d.index()])
        }))
    }

    /// Unweighted adjacency sum, project → developer.
    pub fn apply_binary_proj_to_dev<S: Scalar>(&self, proj_scores: &[S]) -> Result<Vec<S>> {
        check_len(proj_scores, self.n_p)?;
        Ok(gather(self.n_d, |d| {
            self.by_developer.row(d).iter().fold(S::zero(), |acc, &(p, _)| acc + proj_scores[p.index()])
        }))
    }
}

/// The five flows the rankers need. Implemented by the sparse engine and by
/// the dense reference engine in [`crate::dense`].
pub trait Propagator<S: Scalar>: Sync {
    fn n_developers(&self) -> usize;
    fn n_projects(&self) -> usize;
    fn follow(&self, dev_scores: &[S]) -> Result<Vec<S>>;
    fn dev_to_proj(&self, dev_scores: &[S]) -> Result<Vec<S>>;
    fn proj_to_dev(&self, proj_scores: &[S]) -> Result<Vec<S>>;
    fn binary_dev_to_proj(&self, dev_scores: &[S]) -> Result<Vec<S>>;
    fn binary_proj_to_dev(&self, proj_scores: &[S]) -> Result<Vec<S>>;
}

/// Sparse engine: follow transitions plus commit propagation.
#[derive(Debug, Clone)]
pub struct SparsePropagator {
    pub follow: FollowTransition,
    pub commit: CommitPropagation,
}

impl SparsePropagator {
    pub fn new(net: &HeteroNetwork) -> Self {
        Self { follow: FollowTransition::new(net), commit: CommitPropagation::new(net) }
    }
}

impl<S: Scalar> Propagator<S> for SparsePropagator {
    fn n_developers(&self) -> usize {
        self.follow.n_developers()
    }

    fn n_projects(&self) -> usize {
        self.commit.n_projects()
    }

    fn follow(&self, dev_scores: &[S]) -> Result<Vec<S>> {
        self.follow.apply(dev_scores)
    }

    fn dev_to_proj(&self, dev_scores: &[S]) -> Result<Vec<S>> {
        self.commit.apply_dev_to_proj(dev_scores)
    }

    fn proj_to_dev(&self, proj_scores: &[S]) -> Result<Vec<S>> {
        self.commit.apply_proj_to_dev(proj_scores)
    }

    fn binary_dev_to_proj(&self, dev_scores: &[S]) -> Result<Vec<S>> {
        self.commit.apply_binary_dev_to_proj(dev_scores)
    }

    fn binary_proj_to_dev(&self, proj_scores: &[S]) -> Result<Vec<S>> {
        self.commit.apply_binary_proj_to_dev(proj_scores)
    }
}
