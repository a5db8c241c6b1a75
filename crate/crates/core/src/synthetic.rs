//! Seeded synthetic event logs for desk-scale runs of the evaluation
//! protocol.
//!
//! Events are generated in date order and each choice looks at the network
//! built so far:
//!
//! * commit: the developer is drawn by a fixed heavy-tailed activity weight;
//!   the project is the developer's previous project with probability
//!   `stickiness`, otherwise drawn proportional to
//!   `(received commits + 1)^commit_exponent`;
//! * follow: the follower is uniform; the followee is drawn proportional to
//!   `(followers + 1 + commits made)^follow_exponent`;
//! * star: the developer is uniform; the project is drawn proportional to
//!   its received commits.
//!
//! Counting commits in the followee weight plants the "more commits, more
//! future followers" relationship the evaluation is meant to detect.

use std::collections::HashSet;

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Event, EventKind, EventLog};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticSpec {
    pub developers: usize,
    pub projects: usize,
    pub follow_exponent: f64,
    pub commit_exponent: f64,
    pub mean_commits: f64,
    pub mean_follows: f64,
    pub mean_stars: f64,
    /// Probability a commit goes to the developer's previous project.
    pub stickiness: f64,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            developers: 1000,
            projects: 100,
            follow_exponent: 1.0,
            commit_exponent: 1.0,
            mean_commits: 10.0,
            mean_follows: 8.0,
            mean_stars: 2.0,
            stickiness: 0.9,
            start: NaiveDate::from_ymd_opt(2008, 1, 1).expect("valid date"),
            end: NaiveDate::from_ymd_opt(2014, 1, 1).expect("valid date"),
            seed: 42,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParameter(m));
        if self.developers < 2 || self.projects < 1 {
            return fail(format!(
                "need at least 2 developers and 1 project, got {} and {}",
                self.developers, self.projects
            ));
        }
        for (name, v) in [("follow_exponent", self.follow_exponent), ("commit_exponent", self.commit_exponent)] {
            if !(v >= 0.0 && v.is_finite()) {
                return fail(format!("{name} must be a finite value >= 0, got {v}"));
            }
        }
        for (name, v) in [("mean_commits", self.mean_commits), ("mean_follows", self.mean_follows), ("mean_stars", self.mean_stars)] {
            if !(v > 0.0 && v.is_finite()) {
                return fail(format!("{name} must be positive, got {v}"));
            }
        }
        if !(0.0..=1.0).contains(&self.stickiness) {
            return fail(format!("stickiness must lie in [0, 1], got {}", self.stickiness));
        }
        if self.start >= self.end {
            return fail(format!("start ({}) must precede end ({})", self.start, self.end));
        }
        Ok(())
    }

    /// Midpoint of the generated time span.
    pub fn midpoint(&self) -> NaiveDate {
        self.start + Duration::days((self.end - self.start).num_days() / 2)
    }
}

/// Fenwick tree over non-negative weights supporting point updates and
/// sampling proportional to weight.
#[derive(Debug, Clone)]
struct WeightTree {
    tree: Vec<f64>,
    weights: Vec<f64>,
    top: usize,
}

impl WeightTree {
    fn new(weights: Vec<f64>) -> Self {
        let n = weights.len();
        let mut tree = vec![0.0; n + 1];
        for (i, &w) in weights.iter().enumerate() {
            tree[i + 1] += w;
            let parent = (i + 1) + ((i + 1) & (i + 1).wrapping_neg());
            if parent <= n {
                tree[parent] += tree[i + 1];
            }
        }
        let top = if n == 0 { 0 } else { 1 << (usize::BITS - 1 - n.leading_zeros()) };
        Self { tree, weights, top }
    }

    fn total(&self) -> f64 {
        let mut i = self.weights.len();
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i &= i - 1;
        }
        s
    }

    fn set(&mut self, idx: usize, weight: f64) {
        let delta = weight - self.weights[idx];
        self.weights[idx] = weight;
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += delta;
            i += i & i.wrapping_neg();
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let total = self.total();
        if !(total > 0.0) {
            return rng.gen_range(0..self.weights.len());
        }
        let mut target = rng.gen::<f64>() * total;
        let mut pos = 0usize;
        let mut step = self.top;
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                target -= self.tree[next];
                pos = next;
            }
            step >>= 1;
        }
        // Rounding drift can land on a zero-weight slot; walk to the next live one.
        let mut idx = pos.min(self.weights.len() - 1);
        let start = idx;
        while self.weights[idx] <= 0.0 {
            idx = (idx + 1) % self.weights.len();
            if idx == start {
                break;
            }
        }
        idx
    }
}

fn id_width(n: usize) -> usize {
    n.saturating_sub(1).max(1).to_string().len()
}

/// Generates a chronologically ordered event log from `spec`.
pub fn generate(spec: &SyntheticSpec) -> Result<EventLog> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n_d, n_p) = (spec.developers, spec.projects);
    let dw = id_width(n_d);
    let pw = id_width(n_p);
    let dev_name = |i: usize| format!("dev{i:0dw$}");
    let proj_name = |i: usize| format!("proj{i:0pw$}");

    let n_commits = (n_d as f64 * spec.mean_commits).round() as usize;
    let n_follows = (n_d as f64 * spec.mean_follows).round() as usize;
    let n_stars = (n_d as f64 * spec.mean_stars).round() as usize;

    let mut kinds: Vec<EventKind> = std::iter::repeat_n(EventKind::Commit, n_commits)
        .chain(std::iter::repeat_n(EventKind::Follow, n_follows))
        .chain(std::iter::repeat_n(EventKind::Star, n_stars))
        .collect();
    kinds.shuffle(&mut rng);
    let span = (spec.end - spec.start).num_days();
    let mut offsets: Vec<i64> = (0..kinds.len()).map(|_| rng.gen_range(0..span)).collect();
    offsets.sort_unstable();

    // Pareto(shape 1.5) activity, capped so one developer cannot dominate.
    let activity: Vec<f64> = (0..n_d).map(|_| (1.0 - rng.gen::<f64>()).powf(-1.0 / 1.5).min(1000.0)).collect();
    let committers = WeightTree::new(activity);

    let mut received = vec![0u64; n_p];
    let mut commit_pull = WeightTree::new(vec![1.0; n_p]);
    let mut star_pull = WeightTree::new(vec![0.0; n_p]);

    let mut followers = vec![0u64; n_d];
    let mut made = vec![0u64; n_d];
    let attract = |followers: u64, made: u64| ((followers + 1 + made) as f64).powf(spec.follow_exponent);
    let mut follow_pull = WeightTree::new(vec![attract(0, 0); n_d]);
    let mut last_project: Vec<Option<usize>> = vec![None; n_d];
    let mut seen_follows: HashSet<(usize, usize)> = HashSet::new();

    let mut events = Vec::with_capacity(kinds.len());
    for (kind, offset) in kinds.into_iter().zip(offsets) {
        let date = spec.start + Duration::days(offset);
        match kind {
            EventKind::Commit => {
                let d = committers.sample(&mut rng);
                let p = match last_project[d] {
                    Some(p) if rng.gen::<f64>() < spec.stickiness => p,
                    _ => commit_pull.sample(&mut rng),
                };
                last_project[d] = Some(p);
                received[p] += 1;
                commit_pull.set(p, ((received[p] + 1) as f64).powf(spec.commit_exponent));
                star_pull.set(p, received[p] as f64);
                made[d] += 1;
                follow_pull.set(d, attract(followers[d], made[d]));
                events.push(Event::commit(dev_name(d), proj_name(p), date, 1));
            }
            EventKind::Follow => {
                let f = rng.gen_range(0..n_d);
                let picked = (0..8).map(|_| follow_pull.sample(&mut rng)).find(|&t| t != f && !seen_follows.contains(&(f, t)));
                if let Some(t) = picked {
                    seen_follows.insert((f, t));
                    followers[t] += 1;
                    follow_pull.set(t, attract(followers[t], made[t]));
                    events.push(Event::follow(dev_name(f), dev_name(t), date));
                }
            }
            EventKind::Star => {
                let d = rng.gen_range(0..n_d);
                let p = star_pull.sample(&mut rng);
                events.push(Event::star(dev_name(d), proj_name(p), date));
            }
        }
    }
    Ok(EventLog::new(events))
}
