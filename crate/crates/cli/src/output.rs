//! File emission. JSON documents carry a `meta` block; CSVs use LF endings.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliResult;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Meta {
    pub version: &'static str,
    pub command: String,
    /// SHA-256 of the canonical JSON of the command's configuration.
    pub config_hash: String,
}

impl Meta {
    pub fn new<T: Serialize>(command: &str, config: &T) -> CliResult<Self> {
        let canonical = serde_json::to_vec(&(command, config))?;
        Ok(Self {
            version: VERSION,
            command: command.to_string(),
            config_hash: hex::encode(Sha256::digest(&canonical)),
        })
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    meta: &'a Meta,
    #[serde(flatten)]
    body: &'a T,
}

/// Collects the files written by one command.
pub struct Sink {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path) -> CliResult<Self> {
        fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn subdir(&self, name: &str) -> CliResult<Sink> {
        Sink::new(&self.dir.join(name))
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn absorb(&mut self, other: Sink) {
        self.written.extend(other.written);
    }

    /// Pretty JSON with `meta` as the first key. Returns the rendered text.
    pub fn json<T: Serialize>(&mut self, name: &str, meta: &Meta, body: &T) -> CliResult<String> {
        let text = render_json(meta, body)?;
        self.text(name, &text)?;
        Ok(text)
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> CliResult<()> {
        let path = self.dir.join(name);
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(&path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        self.written.push(path);
        Ok(())
    }

    pub fn text(&mut self, name: &str, content: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        fs::write(&path, content)?;
        self.written.push(path);
        Ok(())
    }
}

pub fn render_json<T: Serialize>(meta: &Meta, body: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(&Envelope { meta, body })?;
    text.push('\n');
    Ok(text)
}
