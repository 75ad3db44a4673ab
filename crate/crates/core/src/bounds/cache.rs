//! Append-only on-disk caches for ball sizes and registered search results.
//!
//! Ball sizes are stored one per line as `n,d,value`; search results as
//! `n,d,size,method`. Malformed lines are rejected with a warning and kept
//! out of the table.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use num_bigint::BigUint;

use super::permanent::ball_size_guarded;
use super::table::{Provenance, Registered};
use crate::{PaError, Result};

pub const BALL_FILE: &str = "ball_sizes.csv";
pub const SEARCH_FILE: &str = "search_results.csv";

fn open_append(path: &Path) -> Result<File> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    Ok(OpenOptions::new().create(true).append(true).open(path)?)
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    match fs::read_to_string(path) {
        Ok(text) => Ok(text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| (i + 1, l.trim().to_string()))
            .collect()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(e.into()),
    }
}

fn parse_ball_line(line: &str) -> Option<((usize, usize), BigUint)> {
    let mut f = line.split(',');
    let n = f.next()?.trim().parse().ok()?;
    let d = f.next()?.trim().parse().ok()?;
    let v = f.next()?.trim().parse().ok()?;
    if f.next().is_some() || n == 0 {
        return None;
    }
    Some(((n, d), v))
}

/// Thread-safe `V(n, d)` cache, optionally persisted to a directory.
#[derive(Debug)]
pub struct BallTable {
    path: Option<PathBuf>,
    max_band: usize,
    entries: Mutex<HashMap<(usize, usize), BigUint>>,
    rejected: Vec<String>,
}

impl BallTable {
    pub fn in_memory(max_band: usize) -> Self {
        BallTable {
            path: None,
            max_band,
            entries: Mutex::new(HashMap::new()),
            rejected: Vec::new(),
        }
    }

    pub fn open(dir: &Path, max_band: usize) -> Result<Self> {
        let path = dir.join(BALL_FILE);
        let mut entries = HashMap::new();
        let mut rejected = Vec::new();
        for (lineno, line) in read_lines(&path)? {
            match parse_ball_line(&line) {
                Some((key, v)) => {
                    entries.insert(key, v);
                }
                None => {
                    eprintln!("warning: {}:{lineno}: rejected corrupt cache line {line:?}", path.display());
                    rejected.push(line);
                }
            }
        }
        Ok(BallTable {
            path: Some(path),
            max_band,
            entries: Mutex::new(entries),
            rejected,
        })
    }

    /// Lines dropped while loading.
    pub fn rejected(&self) -> &[String] {
        &self.rejected
    }

    pub fn len(&self) -> usize {
        self.entries.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cached(&self, n: usize, d: usize) -> Option<BigUint> {
        self.entries.lock().unwrap().get(&(n, d)).cloned()
    }

    /// Snapshot of every cached entry, sorted by `(n, d)`.
    pub fn entries(&self) -> Vec<((usize, usize), BigUint)> {
        let mut all: Vec<_> = self
            .entries
            .lock()
            .unwrap()
            .iter()
            .map(|(k, v)| (*k, v.clone()))
            .collect();
        all.sort();
        all
    }

    pub fn get(&self, n: usize, d: usize) -> Result<BigUint> {
        let d = d.min(n.saturating_sub(1));
        if let Some(v) = self.cached(n, d) {
            return Ok(v);
        }
        let v = ball_size_guarded(n, d, self.max_band)?;
        let mut entries = self.entries.lock().unwrap();
        if entries.insert((n, d), v.clone()).is_none() {
            if let Some(path) = &self.path {
                // the lock is held, so appends never interleave
                writeln!(open_append(path)?, "{n},{d},{v}")?;
            }
        }
        Ok(v)
    }
}

/// Search results registered for the bounds table.
#[derive(Debug, Clone)]
pub struct SearchRegistry {
    path: PathBuf,
}

impl SearchRegistry {
    pub fn new(dir: &Path) -> Self {
        SearchRegistry {
            path: dir.join(SEARCH_FILE),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn load(&self) -> Result<Vec<Registered>> {
        let mut out = Vec::new();
        for (lineno, line) in read_lines(&self.path)? {
            match parse_registered(&line) {
                Ok(r) => out.push(r),
                Err(e) => eprintln!(
                    "warning: {}:{lineno}: rejected corrupt line {line:?}: {e}",
                    self.path.display()
                ),
            }
        }
        Ok(out)
    }

    pub fn append(&self, r: &Registered) -> Result<()> {
        writeln!(
            open_append(&self.path)?,
            "{},{},{},{}",
            r.n,
            r.d,
            r.size,
            r.method
        )?;
        Ok(())
    }
}

fn parse_registered(line: &str) -> Result<Registered> {
    let f: Vec<&str> = line.split(',').map(str::trim).collect();
    if f.len() != 4 {
        return Err(PaError::Parse("expected n,d,size,method".into()));
    }
    let bad = || PaError::Parse("bad number".into());
    let method: Provenance = f[3].parse()?;
    if !matches!(method, Provenance::Greedy | Provenance::Exact) {
        return Err(PaError::Parse(format!("method {method} is not a search")));
    }
    Ok(Registered {
        n: f[0].parse().map_err(|_| bad())?,
        d: f[1].parse().map_err(|_| bad())?,
        size: f[2].parse().map_err(|_| bad())?,
        method,
    })
}
