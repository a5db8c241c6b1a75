use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EventKind {
    Follow,
    Commit,
    Star,
}

/// One dated record. For follows `target` is a developer id, for commits and
/// stars it is a project id. `count` is the number of commits the record
/// stands for (always 1 for follows and stars).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub kind: EventKind,
    pub actor: String,
    pub target: String,
    pub date: NaiveDate,
    pub count: u64,
}

impl Event {
    pub fn follow(follower: impl Into<String>, followee: impl Into<String>, date: NaiveDate) -> Self {
        Self { kind: EventKind::Follow, actor: follower.into(), target: followee.into(), date, count: 1 }
    }

    pub fn commit(developer: impl Into<String>, project: impl Into<String>, date: NaiveDate, count: u64) -> Self {
        Self { kind: EventKind::Commit, actor: developer.into(), target: project.into(), date, count }
    }

    pub fn star(developer: impl Into<String>, project: impl Into<String>, date: NaiveDate) -> Self {
        Self { kind: EventKind::Star, actor: developer.into(), target: project.into(), date, count: 1 }
    }
}

/// Map from a project id to its canonical id. Only non-identity entries are
/// stored, and every stored value is itself canonical, so resolution is a
/// single lookup and idempotent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AliasMap {
    canonical: BTreeMap<String, String>,
}

impl AliasMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds the map from `(project, parent)` fork edges, resolving chains
    /// to their root. Projects absent from the edge list are roots.
    pub fn from_fork_edges<'a, I>(edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let parent: BTreeMap<&str, &str> = edges.into_iter().filter(|(c, p)| c != p).collect();
        let mut canonical = BTreeMap::new();
        for &child in parent.keys() {
            let mut cur = child;
            let mut steps = 0usize;
            while let Some(&next) = parent.get(cur) {
                cur = next;
                steps += 1;
                if steps > parent.len() {
                    return Err(Error::ForkCycle(child.to_string()));
                }
            }
            canonical.insert(child.to_string(), cur.to_string());
        }
        Ok(Self { canonical })
    }

    /// Merges canonical roots that share a name, keeping the smallest id of
    /// each name group as the representative.
    pub fn merge_by_name<'a, I>(&mut self, names: I)
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut groups: BTreeMap<&str, Vec<String>> = BTreeMap::new();
        for (project, name) in names {
            if name.is_empty() {
                continue;
            }
            groups.entry(name).or_default().push(self.resolve(project).to_string());
        }
        let mut root_remap: BTreeMap<String, String> = BTreeMap::new();
        for roots in groups.values() {
            let rep = roots.iter().min().expect("non-empty group").clone();
            for r in roots {
                if *r != rep {
                    let entry = root_remap.entry(r.clone()).or_insert_with(|| rep.clone());
                    if rep < *entry {
                        *entry = rep.clone();
                    }
                }
            }
        }
        // A root may sit in several name groups; chase the remap to a fixed point.
        let chase = |start: &str| -> String {
            let mut cur = start.to_string();
            while let Some(next) = root_remap.get(&cur) {
                cur = next.clone();
            }
            cur
        };
        for value in self.canonical.values_mut() {
            *value = chase(value);
        }
        for root in root_remap.keys() {
            let target = chase(root);
            self.canonical.insert(root.clone(), target);
        }
    }

    pub fn resolve<'a>(&'a self, project: &'a str) -> &'a str {
        self.canonical.get(project).map(String::as_str).unwrap_or(project)
    }

    pub fn len(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.canonical.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// All ingested records plus the project alias table.
#[derive(Debug, Clone, Default)]
pub struct EventLog {
    pub events: Vec<Event>,
    pub project_aliases: AliasMap,
    /// Rows skipped per file when loading with `skip_malformed`.
    pub skipped_rows: BTreeMap<String, usize>,
}

impl EventLog {
    pub fn new(events: Vec<Event>) -> Self {
        Self { events, ..Self::default() }
    }

    pub fn with_aliases(mut self, aliases: AliasMap) -> Self {
        self.project_aliases = aliases;
        self
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    /// Earliest and latest event dates, if any.
    pub fn date_range(&self) -> Option<(NaiveDate, NaiveDate)> {
        let min = self.events.iter().map(|e| e.date).min()?;
        let max = self.events.iter().map(|e| e.date).max()?;
        Some((min, max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fork_chain_resolves_to_root() {
        let aliases = AliasMap::from_fork_edges([("B", "A"), ("C", "B")]).unwrap();
        assert_eq!(aliases.resolve("B"), "A");
        assert_eq!(aliases.resolve("C"), "A");
        assert_eq!(aliases.resolve("A"), "A");
        assert_eq!(aliases.resolve("Z"), "Z");
    }

    #[test]
    fn fork_cycle_is_an_error() {
        let err = AliasMap::from_fork_edges([("A", "B"), ("B", "A")]).unwrap_err();
        assert!(matches!(err, Error::ForkCycle(_)));
    }

    #[test]
    fn name_merge_joins_roots() {
        let mut aliases = AliasMap::from_fork_edges([("C", "B")]).unwrap();
        aliases.merge_by_name([("A", "rails"), ("B", "rails"), ("C", "rails-fork"), ("D", "other")]);
        assert_eq!(aliases.resolve("B"), "A");
        assert_eq!(aliases.resolve("C"), "A");
        assert_eq!(aliases.resolve("D"), "D");
    }

    #[test]
    fn resolution_is_idempotent() {
        let aliases = AliasMap::from_fork_edges([("B", "A"), ("C", "B"), ("E", "D")]).unwrap();
        for (_, canonical) in aliases.iter() {
            assert_eq!(aliases.resolve(canonical), canonical);
        }
    }
}
