use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use chrono::NaiveDate;

use super::event::{EventKind, EventLog};

/// Dense handle of a developer within one [`HeteroNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DevId(pub u32);

/// Dense handle of a project within one [`HeteroNetwork`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjectId(pub u32);

impl DevId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl ProjectId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for DevId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d#{}", self.0)
    }
}

impl fmt::Display for ProjectId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p#{}", self.0)
    }
}

/// Immutable developer–project network.
///
/// External ids are interned in lexicographic order, so the dense index of
/// an entity depends only on the set of retained ids and never on row order
/// in the input files. Edge lists are sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeteroNetwork {
    developers: Vec<String>,
    projects: Vec<String>,
    dev_index: HashMap<String, DevId>,
    proj_index: HashMap<String, ProjectId>,
    follows: Vec<(DevId, DevId)>,
    commits: Vec<(DevId, ProjectId, u64)>,
    stars: Vec<(DevId, ProjectId)>,
}

/// Accumulates edges by external id and interns on [`build`](Self::build).
#[derive(Debug, Clone, Default)]
pub struct NetworkBuilder {
    developers: BTreeSet<String>,
    projects: BTreeSet<String>,
    follows: BTreeSet<(String, String)>,
    commits: BTreeMap<(String, String), u64>,
    stars: BTreeSet<(String, String)>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a developer with no edges.
    pub fn add_developer(&mut self, id: &str) -> &mut Self {
        self.developers.insert(id.to_string());
        self
    }

    pub fn add_project(&mut self, id: &str) -> &mut Self {
        self.projects.insert(id.to_string());
        self
    }

    /// Self-follows are ignored; repeated follows collapse.
    pub fn add_follow(&mut self, follower: &str, followee: &str) -> &mut Self {
        if follower != followee {
            self.developers.insert(follower.to_string());
            self.developers.insert(followee.to_string());
            self.follows.insert((follower.to_string(), followee.to_string()));
        }
        self
    }

    /// Adds `count` commits; repeated pairs accumulate. Zero counts are ignored.
    pub fn add_commits(&mut self, developer: &str, project: &str, count: u64) -> &mut Self {
        if count > 0 {
            self.developers.insert(developer.to_string());
            self.projects.insert(project.to_string());
            *self.commits.entry((developer.to_string(), project.to_string())).or_default() += count;
        }
        self
    }

    pub fn add_star(&mut self, developer: &str, project: &str) -> &mut Self {
        self.developers.insert(developer.to_string());
        self.projects.insert(project.to_string());
        self.stars.insert((developer.to_string(), project.to_string()));
        self
    }

    pub fn build(self) -> HeteroNetwork {
        let developers: Vec<String> = self.developers.into_iter().collect();
        let projects: Vec<String> = self.projects.into_iter().collect();
        let dev_index: HashMap<String, DevId> =
            developers.iter().enumerate().map(|(i, s)| (s.clone(), DevId(i as u32))).collect();
        let proj_index: HashMap<String, ProjectId> =
            projects.iter().enumerate().map(|(i, s)| (s.clone(), ProjectId(i as u32))).collect();

        let mut follows: Vec<(DevId, DevId)> =
            self.follows.iter().map(|(a, b)| (dev_index[a], dev_index[b])).collect();
        follows.sort_unstable();
        let mut commits: Vec<(DevId, ProjectId, u64)> =
            self.commits.iter().map(|((d, p), &n)| (dev_index[d], proj_index[p], n)).collect();
        commits.sort_unstable();
        let mut stars: Vec<(DevId, ProjectId)> =
            self.stars.iter().map(|(d, p)| (dev_index[d], proj_index[p])).collect();
        stars.sort_unstable();

        HeteroNetwork { developers, projects, dev_index, proj_index, follows, commits, stars }
    }
}

impl HeteroNetwork {
    pub fn builder() -> NetworkBuilder {
        NetworkBuilder::new()
    }

    /// Network induced by the events dated strictly before `cutoff`, or by
    /// every event when `cutoff` is `None`. Project ids are resolved through
    /// the log's alias map before counting.
    pub fn snapshot(log: &EventLog, cutoff: Option<NaiveDate>) -> Self {
        let mut builder = NetworkBuilder::new();
        for e in log.events.iter().filter(|e| cutoff.is_none_or(|c| e.date < c)) {
            match e.kind {
                EventKind::Follow => {
                    builder.add_follow(&e.actor, &e.target);
                }
                EventKind::Commit => {
                    builder.add_commits(&e.actor, log.project_aliases.resolve(&e.target), e.count);
                }
                EventKind::Star => {
                    builder.add_star(&e.actor, log.project_aliases.resolve(&e.target));
                }
            }
        }
        builder.build()
    }

    pub fn n_developers(&self) -> usize {
        self.developers.len()
    }

    pub fn n_projects(&self) -> usize {
        self.projects.len()
    }

    pub fn developer_id(&self, external: &str) -> Option<DevId> {
        self.dev_index.get(external).copied()
    }

    pub fn project_id(&self, external: &str) -> Option<ProjectId> {
        self.proj_index.get(external).copied()
    }

    pub fn developer_name(&self, id: DevId) -> &str {
        &self.developers[id.index()]
    }

    pub fn project_name(&self, id: ProjectId) -> &str {
        &self.projects[id.index()]
    }

    pub fn developer_names(&self) -> &[String] {
        &self.developers
    }

    pub fn project_names(&self) -> &[String] {
        &self.projects
    }

    /// Follow pairs `(follower, followee)`, sorted.
    pub fn follows(&self) -> &[(DevId, DevId)] {
        &self.follows
    }

    /// Commit edges `(developer, project, count)`, sorted by developer then project.
    pub fn commits(&self) -> &[(DevId, ProjectId, u64)] {
        &self.commits
    }

    pub fn stars(&self) -> &[(DevId, ProjectId)] {
        &self.stars
    }

    /// Number of followers of each developer.
    pub fn follower_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.n_developers()];
        for &(_, followee) in &self.follows {
            counts[followee.index()] += 1;
        }
        counts
    }

    /// Total commits made by each developer.
    pub fn developer_commit_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.n_developers()];
        for &(d, _, n) in &self.commits {
            totals[d.index()] += n;
        }
        totals
    }

    /// Total commits received by each project.
    pub fn project_commit_totals(&self) -> Vec<u64> {
        let mut totals = vec![0u64; self.n_projects()];
        for &(_, p, n) in &self.commits {
            totals[p.index()] += n;
        }
        totals
    }

    pub fn follow_view(&self) -> FollowView<'_> {
        FollowView { net: self }
    }

    pub fn commit_view(&self) -> CommitView<'_> {
        CommitView { net: self }
    }
}

/// Developer-only view: follow edges between developers.
#[derive(Debug, Clone, Copy)]
pub struct FollowView<'a> {
    net: &'a HeteroNetwork,
}

impl<'a> FollowView<'a> {
    pub fn n_nodes(&self) -> usize {
        self.net.n_developers()
    }

    pub fn nodes(&self) -> impl Iterator<Item = DevId> + 'a {
        (0..self.net.n_developers() as u32).map(DevId)
    }

    pub fn edges(&self) -> &'a [(DevId, DevId)] {
        &self.net.follows
    }
}

/// Bipartite view: developers, projects, and weighted commit edges.
#[derive(Debug, Clone, Copy)]
pub struct CommitView<'a> {
    net: &'a HeteroNetwork,
}

impl<'a> CommitView<'a> {
    pub fn n_developers(&self) -> usize {
        self.net.n_developers()
    }

    pub fn n_projects(&self) -> usize {
        self.net.n_projects()
    }

    pub fn n_nodes(&self) -> usize {
        self.n_developers() + self.n_projects()
    }

    pub fn developers(&self) -> impl Iterator<Item = DevId> + 'a {
        (0..self.net.n_developers() as u32).map(DevId)
    }

    pub fn projects(&self) -> impl Iterator<Item = ProjectId> + 'a {
        (0..self.net.n_projects() as u32).map(ProjectId)
    }

    pub fn edges(&self) -> &'a [(DevId, ProjectId, u64)] {
        &self.net.commits
    }
}

/// Splits the network into its follow view and its commit view.
pub fn decompose(net: &HeteroNetwork) -> (FollowView<'_>, CommitView<'_>) {
    (net.follow_view(), net.commit_view())
}
