//! Artifact writing and the per-run `manifest.json`.

use std::path::{Path, PathBuf};

use burgers_qp::Profile;
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub struct Output {
    pub dir: PathBuf,
    pub files: Vec<String>,
}

impl Output {
    pub fn create(dir: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(dir)?;
        Ok(Output { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn record(&mut self, rel: &str) -> PathBuf {
        self.files.push(rel.to_string());
        self.dir.join(rel)
    }

    pub fn json<T: Serialize>(&mut self, rel: &str, value: &T) -> Result<(), CliError> {
        let path = self.record(rel);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    pub fn profile(&mut self, rel: &str, p: &Profile) -> Result<(), CliError> {
        let path = self.record(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)?;
        }
        std::fs::write(path, p.to_csv())?;
        Ok(())
    }

    pub fn table<T: Serialize>(&mut self, rel: &str, rows: &[T]) -> Result<(), CliError> {
        let path = self.record(rel);
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    version: &'a str,
    status: &'a str,
    error: Option<String>,
    config: &'a RunConfig,
    eps: Option<f64>,
    eps0: Option<f64>,
    eps_factor: Option<f64>,
    outputs: &'a [String],
    diagnostics: &'a Value,
}

pub fn write_manifest(
    out: &Output,
    command: &str,
    config: &RunConfig,
    diagnostics: &Value,
    error: Option<&CliError>,
) -> Result<(), CliError> {
    let params = config.params().ok();
    let m = Manifest {
        command,
        version: env!("CARGO_PKG_VERSION"),
        status: if error.is_some() { "error" } else { "ok" },
        error: error.map(|e| e.to_string()),
        config,
        eps: params.map(|p| p.eps),
        eps0: params.map(|p| p.eps0),
        eps_factor: params.map(|p| p.eps_factor()),
        outputs: &out.files,
        diagnostics,
    };
    let mut text = serde_json::to_string_pretty(&m)?;
    text.push('\n');
    std::fs::write(out.dir.join("manifest.json"), text)?;
    Ok(())
}
