#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn devrank<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_devrank")).args(args).output().expect("spawn devrank")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Writes the three event files into `dir` and returns the input flags.
pub fn write_inputs(dir: &Path, follows: &str, commits: &str, stars: &str) -> Vec<String> {
    std::fs::create_dir_all(dir).unwrap();
    let files = [("follows.csv", follows), ("commits.csv", commits), ("stars.csv", stars)];
    for (name, body) in files {
        std::fs::write(dir.join(name), body).unwrap();
    }
    input_flags(dir)
}

pub fn input_flags(dir: &Path) -> Vec<String> {
    let p = |n: &str| dir.join(n).to_string_lossy().into_owned();
    vec!["--follows".into(), p("follows.csv"), "--commits".into(), p("commits.csv"), "--stars".into(), p("stars.csv")]
}

pub fn path_arg(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

pub fn read(p: impl Into<PathBuf>) -> String {
    let p = p.into();
    std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

/// Column `name` of a CSV with a header row.
pub fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap_or_else(|| panic!("no column {name}"));
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

/// Small two-year dataset: five developers, three projects.
pub const FOLLOWS: &str = "follower_id,followee_id,date
bob,alice,2012-01-05
carol,alice,2012-02-01
dave,alice,2012-03-01
carol,bob,2012-03-10
dave,bob,2012-04-01
erin,carol,2012-05-01
erin,alice,2013-02-01
erin,bob,2013-03-01
alice,bob,2013-04-01
dave,carol,2013-05-01
";

pub const COMMITS: &str = "developer_id,project_id,date,count
alice,core,2012-01-01,9
alice,docs,2012-01-10,1
bob,core,2012-02-01,4
carol,web,2012-03-01,2
dave,web,2012-04-01,1
erin,docs,2012-05-01,1
";

pub const STARS: &str = "developer_id,project_id,date
bob,core,2012-06-01
erin,core,2013-01-10
dave,core,2013-02-10
carol,docs,2013-03-10
";
