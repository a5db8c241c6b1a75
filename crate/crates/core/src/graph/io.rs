//! Flat-file ingestion and export of event logs.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::Path;

use chrono::NaiveDate;

use super::event::{AliasMap, Event, EventKind, EventLog};
use crate::error::{Error, Result};

pub const FOLLOWS_HEADER: &[&str] = &["follower_id", "followee_id", "date"];
pub const COMMITS_HEADER: &[&str] = &["developer_id", "project_id", "date"];
pub const STARS_HEADER: &[&str] = &["developer_id", "project_id", "date"];
pub const PROJECTS_HEADER: &[&str] = &["project_id", "name", "forked_from"];

const DATE_FORMAT: &str = "%Y-%m-%d";

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// Skip and count malformed rows instead of aborting.
    pub skip_malformed: bool,
    /// Additionally merge projects sharing a name.
    pub merge_by_name: bool,
}

struct Table {
    file: String,
    reader: csv::Reader<File>,
}

impl Table {
    fn open(path: &Path, expected: &[&str], optional_tail: &[&str]) -> Result<Self> {
        let file = path.display().to_string();
        let handle = File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(handle);
        let mut header = csv::StringRecord::new();
        let found = reader
            .read_record(&mut header)
            .map_err(|source| Error::Csv { file: file.clone(), source })?;
        let fields: Vec<&str> = header.iter().map(|f| f.trim_start_matches('\u{feff}')).collect();
        let ok = found
            && fields.len() >= expected.len()
            && fields.len() <= expected.len() + optional_tail.len()
            && fields[..expected.len()] == *expected
            && fields[expected.len()..] == optional_tail[..fields.len() - expected.len()];
        if !ok {
            return Err(Error::BadHeader {
                file,
                expected: expected.join(","),
                found: fields.join(","),
            });
        }
        Ok(Self { file, reader })
    }

    /// Visits each data row as `(line, fields)`. Row errors from `visit` are
    /// either propagated or counted, depending on `skip`.
    fn for_each_row<F>(&mut self, skip: bool, skipped: &mut BTreeMap<String, usize>, mut visit: F) -> Result<()>
    where
        F: FnMut(u64, &csv::StringRecord) -> std::result::Result<(), String>,
    {
        let mut record = csv::StringRecord::new();
        loop {
            let more = match self.reader.read_record(&mut record) {
                Ok(more) => more,
                Err(source) => {
                    if skip {
                        *skipped.entry(self.file.clone()).or_default() += 1;
                        continue;
                    }
                    return Err(Error::Csv { file: self.file.clone(), source });
                }
            };
            if !more {
                return Ok(());
            }
            if record.iter().all(str::is_empty) {
                continue;
            }
            let line = record.position().map(|p| p.line()).unwrap_or(0);
            if let Err(message) = visit(line, &record) {
                if skip {
                    *skipped.entry(self.file.clone()).or_default() += 1;
                } else {
                    return Err(Error::MalformedRow { file: self.file.clone(), line, message });
                }
            }
        }
    }
}

fn parse_date(field: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(field, DATE_FORMAT).map_err(|e| format!("bad date `{field}`: {e}"))
}

fn require_columns(record: &csv::StringRecord, allowed: &[usize]) -> std::result::Result<(), String> {
    if allowed.contains(&record.len()) {
        Ok(())
    } else {
        Err(format!("expected {} columns, found {}", allowed[0], record.len()))
    }
}

fn non_empty<'r>(record: &'r csv::StringRecord, idx: usize, what: &str) -> std::result::Result<&'r str, String> {
    match record.get(idx) {
        Some(v) if !v.is_empty() => Ok(v),
        _ => Err(format!("empty {what}")),
    }
}

/// Reads the follow, commit and star tables plus the optional project table.
pub fn load_event_log(
    follows: &Path,
    commits: &Path,
    stars: &Path,
    projects: Option<&Path>,
    options: LoadOptions,
) -> Result<EventLog> {
    let mut events = Vec::new();
    let mut skipped = BTreeMap::new();
    let skip = options.skip_malformed;

    Table::open(follows, FOLLOWS_HEADER, &[])?.for_each_row(skip, &mut skipped, |_, r| {
        require_columns(r, &[3])?;
        let date = parse_date(&r[2])?;
        events.push(Event::follow(non_empty(r, 0, "follower_id")?, non_empty(r, 1, "followee_id")?, date));
        Ok(())
    })?;

    Table::open(commits, COMMITS_HEADER, &["count"])?.for_each_row(skip, &mut skipped, |_, r| {
        require_columns(r, &[3, 4])?;
        let date = parse_date(&r[2])?;
        let count = match r.get(3) {
            None | Some("") => 1,
            Some(raw) => match raw.parse::<u64>() {
                Ok(0) | Err(_) => return Err(format!("commit count must be a positive integer, found `{raw}`")),
                Ok(n) => n,
            },
        };
        events.push(Event::commit(non_empty(r, 0, "developer_id")?, non_empty(r, 1, "project_id")?, date, count));
        Ok(())
    })?;

    Table::open(stars, STARS_HEADER, &[])?.for_each_row(skip, &mut skipped, |_, r| {
        require_columns(r, &[3])?;
        let date = parse_date(&r[2])?;
        events.push(Event::star(non_empty(r, 0, "developer_id")?, non_empty(r, 1, "project_id")?, date));
        Ok(())
    })?;

    let mut aliases = AliasMap::new();
    if let Some(path) = projects {
        let mut rows: Vec<(String, String, String)> = Vec::new();
        Table::open(path, PROJECTS_HEADER, &[])?.for_each_row(skip, &mut skipped, |_, r| {
            require_columns(r, &[3])?;
            rows.push((non_empty(r, 0, "project_id")?.to_string(), r[1].to_string(), r[2].to_string()));
            Ok(())
        })?;
        aliases = AliasMap::from_fork_edges(
            rows.iter().filter(|(_, _, parent)| !parent.is_empty()).map(|(id, _, parent)| (id.as_str(), parent.as_str())),
        )?;
        if options.merge_by_name {
            aliases.merge_by_name(rows.iter().map(|(id, name, _)| (id.as_str(), name.as_str())));
        }
    }

    Ok(EventLog { events, project_aliases: aliases, skipped_rows: skipped })
}

/// Writes `follows.csv`, `commits.csv` and `stars.csv` into `dir`, one row per
/// event in log order. Commit rows carry the count column only when some
/// commit event stands for more than one commit.
pub fn write_event_log(log: &EventLog, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.to_path_buf(), source })?;
    let with_counts = log.events.iter().any(|e| e.kind == EventKind::Commit && e.count != 1);
    let open = |name: &str| -> Result<(String, csv::Writer<File>)> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|source| Error::Io { path: path.clone(), source })?;
        Ok((path.display().to_string(), csv::Writer::from_writer(file)))
    };
    let (follow_name, mut follow_w) = open("follows.csv")?;
    let (commit_name, mut commit_w) = open("commits.csv")?;
    let (star_name, mut star_w) = open("stars.csv")?;

    let wrap = |file: &str| {
        let file = file.to_string();
        move |source: csv::Error| Error::Csv { file: file.clone(), source }
    };
    follow_w.write_record(FOLLOWS_HEADER).map_err(wrap(&follow_name))?;
    if with_counts {
        let mut header = COMMITS_HEADER.to_vec();
        header.push("count");
        commit_w.write_record(&header).map_err(wrap(&commit_name))?;
    } else {
        commit_w.write_record(COMMITS_HEADER).map_err(wrap(&commit_name))?;
    }
    star_w.write_record(STARS_HEADER).map_err(wrap(&star_name))?;

    for e in &log.events {
        let date = e.date.format(DATE_FORMAT).to_string();
        match e.kind {
            EventKind::Follow => follow_w.write_record([&e.actor, &e.target, &date]).map_err(wrap(&follow_name))?,
            EventKind::Star => star_w.write_record([&e.actor, &e.target, &date]).map_err(wrap(&star_name))?,
            EventKind::Commit if with_counts => commit_w
                .write_record([e.actor.as_str(), &e.target, &date, &e.count.to_string()])
                .map_err(wrap(&commit_name))?,
            EventKind::Commit => commit_w.write_record([&e.actor, &e.target, &date]).map_err(wrap(&commit_name))?,
        }
    }
    for (name, w) in [(follow_name, &mut follow_w), (commit_name, &mut commit_w), (star_name, &mut star_w)] {
        w.flush().map_err(|source| Error::Io { path: name.into(), source })?;
    }
    Ok(())
}
