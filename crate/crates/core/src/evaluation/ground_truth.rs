use serde::Serialize;

use super::SplitSpec;
use crate::graph::{EventKind, EventLog, HeteroNetwork};

/// Raw and retained event counts inside the test window.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct WindowTally {
    pub raw: usize,
    pub counted: usize,
    /// Events touching an entity absent from the training snapshot, or
    /// self-follows.
    pub dropped: usize,
}

/// Influence gained during the test window by entities of the training
/// snapshot, indexed like the snapshot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroundTruth {
    pub new_followers: Vec<u64>,
    pub new_stars: Vec<u64>,
    pub follows: WindowTally,
    pub stars: WindowTally,
}

/// Counts follow and star events in `[train_end, test_end)` whose endpoints
/// both exist in `train_net`. Every follow event counts once; the window
/// does not deduplicate repeated (follower, followee) pairs.
pub fn compute_ground_truth(log: &EventLog, split: &SplitSpec, train_net: &HeteroNetwork) -> GroundTruth {
    let mut truth = GroundTruth {
        new_followers: vec![0; train_net.n_developers()],
        new_stars: vec![0; train_net.n_projects()],
        follows: WindowTally::default(),
        stars: WindowTally::default(),
    };
    for e in log.events.iter().filter(|e| split.in_window(e.date)) {
        match e.kind {
            EventKind::Follow => {
                truth.follows.raw += 1;
                let pair = (train_net.developer_id(&e.actor), train_net.developer_id(&e.target));
                match pair {
                    (Some(a), Some(t)) if a != t => {
                        truth.new_followers[t.index()] += 1;
                        truth.follows.counted += 1;
                    }
                    _ => truth.follows.dropped += 1,
                }
            }
            EventKind::Star => {
                truth.stars.raw += 1;
                let project = log.project_aliases.resolve(&e.target);
                match (train_net.developer_id(&e.actor), train_net.project_id(project)) {
                    (Some(_), Some(p)) => {
                        truth.new_stars[p.index()] += 1;
                        truth.stars.counted += 1;
                    }
                    _ => truth.stars.dropped += 1,
                }
            }
            EventKind::Commit => {}
        }
    }
    truth
}
