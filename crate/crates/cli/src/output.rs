//! Deterministic artifact writing: CSV data files, a per-experiment
//! `summary.json`, and a closing `manifest.json` that echoes every knob.
//!
//! Floats are rendered with the shortest representation that parses back to
//! the same bits, so identical runs produce byte-identical data files. Wall
//! time lives only in the manifest, never in data files.

use crate::config::Config;
use anyhow::Context;
use serde::Serialize;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

pub struct Artifacts {
    dir: PathBuf,
    files: Vec<String>,
    started: Instant,
}

impl Artifacts {
    pub fn new(dir: &Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Artifacts { dir: dir.to_path_buf(), files: Vec::new(), started: Instant::now() })
    }

    /// Opens a CSV data file and writes its header row.
    pub fn csv(&mut self, name: &str, header: &str) -> anyhow::Result<Csv> {
        let path = self.dir.join(name);
        let file = File::create(&path)
            .with_context(|| format!("cannot create {}", path.display()))?;
        self.files.push(name.to_string());
        let mut w = BufWriter::new(file);
        writeln!(w, "{header}").context("write header")?;
        Ok(Csv { w })
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value).context("serialize json")?;
        text.push('\n');
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push(name.to_string());
        Ok(())
    }

    /// Writes `manifest.json` last, closing the run.
    pub fn finish(
        mut self,
        subcommand: &str,
        cfg: &Config,
        seed: u64,
        threads: usize,
    ) -> anyhow::Result<()> {
        #[derive(Serialize)]
        struct Manifest<'a> {
            subcommand: &'a str,
            code_version: &'a str,
            /// Master seed after any command-line override.
            seed: u64,
            threads: usize,
            /// Quadrature convention for every time integral.
            endpoint_convention: &'a str,
            /// Full resolved configuration, defaults included.
            config: &'a Config,
            outputs: &'a [String],
            wall_time_s: f64,
        }
        let manifest = Manifest {
            subcommand,
            code_version: env!("CARGO_PKG_VERSION"),
            seed,
            threads,
            endpoint_convention: "left",
            config: cfg,
            outputs: &self.files,
            wall_time_s: self.started.elapsed().as_secs_f64(),
        };
        let path = self.dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&manifest).context("serialize manifest")?;
        text.push('\n');
        std::fs::write(&path, text)
            .with_context(|| format!("cannot write {}", path.display()))?;
        self.files.push("manifest.json".into());
        Ok(())
    }
}

pub struct Csv {
    w: BufWriter<File>,
}

impl Csv {
    pub fn line(&mut self, row: &str) -> std::io::Result<()> {
        writeln!(self.w, "{row}")
    }

    pub fn done(mut self) -> anyhow::Result<()> {
        self.w.flush().context("flush csv")?;
        Ok(())
    }
}
