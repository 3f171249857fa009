use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use super::config::RunConfig;
use crate::error::Result;
use crate::linalg::C64;
use crate::spectral::EigenMultiset;

pub const TOOL: &str = "swk";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run metadata. The only part of an output file that may differ between
/// two runs of the same configuration.
#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub timestamp_unix: u64,
    pub out_dir: String,
}

impl Meta {
    pub fn now(config: &RunConfig) -> Self {
        Meta {
            tool: TOOL,
            version: VERSION,
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            out_dir: config.out_dir.display().to_string(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize, V: Serialize> {
    config: &'a RunConfig,
    results: R,
    verdict: V,
    meta: Meta,
}

/// One eigenvalue with its multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EigenRecord {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

pub fn records(ms: &EigenMultiset) -> Vec<EigenRecord> {
    ms.entries()
        .iter()
        .map(|e| EigenRecord {
            re: e.value.re,
            im: e.value.im,
            multiplicity: e.multiplicity,
        })
        .collect()
}

pub fn point_records(points: &[C64]) -> Vec<EigenRecord> {
    points
        .iter()
        .map(|z| EigenRecord {
            re: z.re,
            im: z.im,
            multiplicity: 1,
        })
        .collect()
}

/// Writes output files into the configured directory and remembers them.
pub struct Writer<'a> {
    config: &'a RunConfig,
    written: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    pub fn new(config: &'a RunConfig) -> Result<Self> {
        fs::create_dir_all(&config.out_dir)?;
        Ok(Writer {
            config,
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.config.out_dir.join(name)
    }

    pub fn json<R: Serialize, V: Serialize>(&mut self, name: &str, results: R, verdict: V) -> Result<PathBuf> {
        let envelope = Envelope {
            config: self.config,
            results,
            verdict,
            meta: Meta::now(self.config),
        };
        let mut text = serde_json::to_string_pretty(&envelope)?;
        text.push('\n');
        self.raw(name, &text)
    }

    /// CSV with `#` lines carrying the tool version and the resolved config.
    pub fn csv(&mut self, name: &str, header: &str, rows: &[String]) -> Result<PathBuf> {
        let mut text = String::new();
        let _ = writeln!(text, "# {TOOL} {VERSION}");
        let _ = writeln!(text, "# config {}", serde_json::to_string(self.config)?);
        let _ = writeln!(text, "{header}");
        for r in rows {
            let _ = writeln!(text, "{r}");
        }
        self.raw(name, &text)
    }

    pub fn raw(&mut self, name: &str, text: &str) -> Result<PathBuf> {
        let path = self.path(name);
        fs::write(&path, text)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn record(&mut self, path: &Path) {
        self.written.push(path.to_path_buf());
    }
}

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_significant_digits_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 2.0f64.sqrt()] {
            let s = num(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
        }
    }
}
