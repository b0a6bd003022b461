use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::scenario::{sha256_hex, Scenario};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// One stage of a run and the hash of everything it consumed.
#[derive(Debug, Clone, Serialize)]
pub struct Stage {
    pub name: String,
    pub input_hash: String,
    /// `None` for stages without a pass criterion.
    pub pass: Option<bool>,
    pub result: Value,
}

/// Top-level JSON document written by every command.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema_version: String,
    pub command: String,
    pub input_hash: String,
    pub scenario: Scenario,
    pub warnings: Vec<String>,
    /// `"ok"` or `"failed"`.
    pub status: String,
    pub error: Option<String>,
    pub stages: Vec<Stage>,
    /// Pass/fail keyed by criterion id such as `"C9"`.
    pub criteria: BTreeMap<String, bool>,
    /// Wall-clock milliseconds per stage, only with `--timings`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, u128>>,
}

impl RunReport {
    pub fn new(command: &str, scenario: &Scenario, input_hash: &str, warnings: Vec<String>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            command: command.into(),
            input_hash: input_hash.into(),
            scenario: scenario.clone(),
            warnings,
            status: "ok".into(),
            error: None,
            stages: Vec::new(),
            criteria: BTreeMap::new(),
            timings_ms: None,
        }
    }

    /// Appends a stage; `params` enters the stage hash next to the run hash.
    pub fn stage<P: Serialize, R: Serialize>(&mut self, name: &str, params: &P, pass: Option<bool>, result: &R) -> Result<()> {
        let p = serde_json::to_string(params)?;
        let input_hash = sha256_hex(format!("{}\n{name}\n{p}", self.input_hash).as_bytes());
        self.stages.push(Stage {
            name: name.into(),
            input_hash,
            pass,
            result: serde_json::to_value(result)?,
        });
        Ok(())
    }

    pub fn criterion(&mut self, id: &str, pass: bool) {
        self.criteria.insert(id.into(), pass);
    }

    pub fn fail(&mut self, err: &anyhow::Error) {
        self.status = "failed".into();
        self.error = Some(format!("{err:#}"));
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// RFC 4180 CSV with a header row.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf> {
    let path = dir.join(name);
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_path(&path)
        .with_context(|| format!("writing {}", path.display()))?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(path)
}

/// Binary greyscale image, row-major, top row first.
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<()> {
    anyhow::ensure!(pixels.len() == width * height, "pgm size mismatch");
    let mut f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    write!(f, "P5\n{width} {height}\n255\n")?;
    f.write_all(pixels)?;
    Ok(())
}

/// Binary RGB image, row-major, top row first.
pub fn write_ppm(path: &Path, width: usize, height: usize, rgb: &[u8]) -> Result<()> {
    anyhow::ensure!(rgb.len() == 3 * width * height, "ppm size mismatch");
    let mut f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    write!(f, "P6\n{width} {height}\n255\n")?;
    f.write_all(rgb)?;
    Ok(())
}

/// Shortest round-trip representation, so CSV cells are reproducible.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}
