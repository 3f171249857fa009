use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{Convention, DEFAULT_LOCALIZATION_FLOOR};
use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::operators::DEFAULT_DENSE_LIMIT;
use crate::spectral::Tolerances;

/// Fully resolved run parameters. Loadable from TOML; command-line flags
/// take precedence. Echoed into every output file, except the output
/// directory, which goes to the metadata block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub graphs: Vec<GraphSpec>,
    pub battery: Option<String>,
    #[serde(skip_serializing)]
    pub out_dir: PathBuf,
    pub seed: u64,
    pub dense_limit: usize,
    pub jobs: usize,
    pub plot: bool,
    pub inject_corruption: bool,
    pub tolerances: Tolerances,
    pub sierpinski: SierpinskiConfig,
    pub dynamics: DynamicsConfig,
    pub export_name: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: String::new(),
            graphs: Vec::new(),
            battery: None,
            out_dir: PathBuf::from("."),
            seed: 0,
            dense_limit: DEFAULT_DENSE_LIMIT,
            jobs: 1,
            plot: false,
            inject_corruption: false,
            tolerances: Tolerances::default(),
            sierpinski: SierpinskiConfig::default(),
            dynamics: DynamicsConfig::default(),
            export_name: "walk".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SierpinskiConfig {
    pub d: usize,
    pub depth: usize,
    pub compare_level: Option<usize>,
    pub epsilon: f64,
    /// Coverage for every level up to `compare_level` and every depth up
    /// to `depth`.
    pub sweep: bool,
}

impl Default for SierpinskiConfig {
    fn default() -> Self {
        SierpinskiConfig {
            d: 2,
            depth: 6,
            compare_level: None,
            epsilon: 0.05,
            sweep: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DynamicsConfig {
    pub steps: usize,
    pub start_arc: Option<usize>,
    pub start_vertex: Option<usize>,
    pub floor: f64,
    pub convention: Convention,
    pub thin: usize,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            steps: 200,
            start_arc: None,
            start_vertex: None,
            floor: DEFAULT_LOCALIZATION_FLOOR,
            convention: Convention::Terminus,
            thin: 1,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(0);
            Error::Parse {
                line,
                message: e.message().to_string(),
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_fields() {
        let c = RunConfig::from_toml("seed = 7\n[dynamics]\nsteps = 50\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.dynamics.steps, 50);
        assert_eq!(c.dynamics.floor, DEFAULT_LOCALIZATION_FLOOR);
        assert_eq!(c.tolerances, Tolerances::default());
    }

    #[test]
    fn graphs_parse_from_strings() {
        let c = RunConfig::from_toml("graphs = [\"cycle:5\", \"torus:d=2,side=3\"]\n").unwrap();
        assert_eq!(c.graphs[0], GraphSpec::Cycle { n: 5 });
        assert!(RunConfig::from_toml("graphs = [\"cycle:x\"]\n").is_err());
    }

    #[test]
    fn unknown_keys_report_a_line() {
        match RunConfig::from_toml("seed = 1\n\nbogus = 2\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn toml_round_trip_drops_only_the_output_directory() {
        let mut c = RunConfig::default();
        c.graphs.push(GraphSpec::Complete { n: 4 });
        c.sierpinski.compare_level = Some(2);
        let back = RunConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }
}
