//! Artifact plumbing: every file of a run lives in one directory, starts
//! with a comment header carrying the config hash, and is deleted again if
//! the run fails partway.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::json;

use crate::config::RunConfig;
use crate::Status;

/// Open output directory of one run.
pub struct RunDir {
    root: PathBuf,
    created_root: bool,
    hash: String,
    files: Vec<PathBuf>,
    t0: Instant,
}

impl RunDir {
    pub fn create(cfg: &RunConfig) -> io::Result<Self> {
        let root = cfg.out_dir();
        let created_root = !root.exists();
        fs::create_dir_all(&root)?;
        Ok(RunDir {
            root,
            created_root,
            hash: cfg.hash(),
            files: Vec::new(),
            t0: Instant::now(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn hash(&self) -> &str {
        &self.hash
    }

    /// Starts a CSV artifact: hash comment, schema comment, header row.
    pub fn csv(&mut self, name: &str, columns: &[&str]) -> io::Result<Csv> {
        let path = self.root.join(name);
        let mut out = io::BufWriter::new(fs::File::create(&path)?);
        writeln!(out, "# config-hash: {}", self.hash)?;
        writeln!(out, "# schema: {name} v1")?;
        writeln!(out, "{}", columns.join(","))?;
        self.files.push(path);
        Ok(Csv { out, width: columns.len() })
    }

    /// Writes the run summary and returns the artifact list for the caller.
    pub fn finish(
        mut self,
        cfg: &RunConfig,
        status: &Status,
        headline: serde_json::Value,
    ) -> io::Result<PathBuf> {
        let names: Vec<String> = self
            .files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect();
        let summary = json!({
            "config": cfg,
            "config_hash": self.hash,
            "rng_algorithm": schelling::rng::ALGORITHM,
            "version": env!("CARGO_PKG_VERSION"),
            "wall_time_s": self.t0.elapsed().as_secs_f64(),
            "status": match status {
                Status::Done => "done".to_string(),
                Status::Inconclusive(why) => format!("inconclusive: {why}"),
            },
            "headline": headline,
            "artifacts": names,
        });
        let path = self.root.join("run_summary.json");
        let mut out = fs::File::create(&path)?;
        writeln!(out, "{}", serde_json::to_string_pretty(&summary)?)?;
        self.files.push(path.clone());
        Ok(path)
    }

    /// Removes everything written so far (failure path).
    pub fn discard(self) {
        for file in &self.files {
            let _ = fs::remove_file(file);
        }
        if self.created_root {
            let _ = fs::remove_dir(&self.root); // only if empty
        }
    }
}

/// Width-checked CSV row writer.
pub struct Csv {
    out: io::BufWriter<fs::File>,
    width: usize,
}

impl Csv {
    pub fn row(&mut self, cells: &[Cell]) -> io::Result<()> {
        assert_eq!(cells.len(), self.width, "row width must match the header");
        let line: Vec<String> = cells.iter().map(Cell::render).collect();
        writeln!(self.out, "{}", line.join(","))
    }

    pub fn close(mut self) -> io::Result<()> {
        self.out.flush()
    }
}

/// A CSV cell; floats render in shortest round-trip form so identical runs
/// produce identical bytes.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => format!("{v}"),
            Cell::Text(s) => {
                assert!(!s.contains(','), "cell text must not need quoting: {s}");
                s.clone()
            }
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::UInt(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::UInt(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::UInt(v as u64)
    }
}

impl From<u8> for Cell {
    fn from(v: u8) -> Self {
        Cell::UInt(v as u64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}
