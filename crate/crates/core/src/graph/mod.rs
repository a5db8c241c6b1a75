//! Heterogeneous developer–project network and its dated event log.

mod event;
mod io;
mod network;

pub use event::{AliasMap, Event, EventKind, EventLog};
pub use io::{load_event_log, write_event_log, LoadOptions, COMMITS_HEADER, FOLLOWS_HEADER, PROJECTS_HEADER, STARS_HEADER};
pub use network::{decompose, CommitView, DevId, FollowView, HeteroNetwork, NetworkBuilder, ProjectId};
