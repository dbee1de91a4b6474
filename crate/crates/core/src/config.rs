//! File-based descriptions of graphs, signals, and systems.
//!
//! TOML is the primary format; files ending in `.json` are parsed as JSON.
//! The structures here mirror the constructor arguments of the core types
//! and add only numbering convenience (`one_based`) and defaults.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::graph::DirectedGraph;
use crate::hybrid::{FieldShape, HybridSystem, StateSpace, VectorFieldSpec};
use crate::signal::{Extension, SymbolicSignal};

/// Reads and parses a TOML (default) or JSON (`.json`) file into `T`.
pub fn load<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T, ConfigError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let is_json = path
        .extension()
        .map(|e| e.eq_ignore_ascii_case("json"))
        .unwrap_or(false);
    if is_json {
        serde_json::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    } else {
        toml::from_str(&text).map_err(|e| ConfigError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })
    }
}

/// A directed graph given by vertex count and edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    pub n_vertices: usize,
    pub edges: Vec<[usize; 2]>,
    /// When set, vertices in `edges` are numbered from 1 instead of 0.
    #[serde(default)]
    pub one_based: bool,
}

impl GraphConfig {
    pub fn build(&self) -> Result<DirectedGraph, ConfigError> {
        let mut edges = Vec::with_capacity(self.edges.len());
        for &[a, b] in &self.edges {
            edges.push((self.renumber(a)?, self.renumber(b)?));
        }
        Ok(DirectedGraph::new(self.n_vertices, edges)?)
    }

    fn renumber(&self, v: usize) -> Result<usize, ConfigError> {
        if self.one_based {
            v.checked_sub(1).ok_or_else(|| {
                ConfigError::Invalid("vertex 0 in a one-based edge list".into())
            })
        } else {
            Ok(v)
        }
    }
}

/// A switching-signal literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalConfig {
    pub word: Vec<usize>,
    pub h: f64,
    #[serde(default)]
    pub tau: f64,
    #[serde(default)]
    pub anchor: i64,
    pub extension: Extension,
    /// When set, `word` entries are numbered from 1 instead of 0.
    #[serde(default)]
    pub one_based: bool,
}

impl SignalConfig {
    pub fn build(&self) -> Result<SymbolicSignal, ConfigError> {
        let mut word = Vec::with_capacity(self.word.len());
        for &v in &self.word {
            if self.one_based {
                word.push(v.checked_sub(1).ok_or_else(|| {
                    ConfigError::Invalid("vertex 0 in a one-based word".into())
                })?);
            } else {
                word.push(v);
            }
        }
        Ok(SymbolicSignal::new(
            word,
            self.h,
            self.tau,
            self.anchor,
            self.extension,
        )?)
    }
}

/// A vector field attached to one vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldConfig {
    #[serde(default)]
    pub name: Option<String>,
    #[serde(flatten)]
    pub shape: FieldShape,
}

/// A full hybrid system: graph, one field per vertex, state space, dwell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub graph: GraphConfig,
    pub fields: Vec<FieldConfig>,
    pub space: StateSpace,
    pub h: f64,
}

impl SystemConfig {
    pub fn build(&self) -> Result<HybridSystem, ConfigError> {
        let graph = self.graph.build()?;
        let fields = self
            .fields
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let name = f.name.clone().unwrap_or_else(|| format!("field-{i}"));
                VectorFieldSpec::new(name, f.shape.clone())
            })
            .collect();
        Ok(HybridSystem::new(graph, fields, self.space, self.h)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_file(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let path = dir.path().join(name);
        let mut f = fs::File::create(&path).unwrap();
        f.write_all(text.as_bytes()).unwrap();
        path
    }

    #[test]
    fn loads_graph_from_toml() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            &dir,
            "g.toml",
            "n_vertices = 2\nedges = [[0, 1], [1, 0]]\n",
        );
        let cfg: GraphConfig = load(&path).unwrap();
        let g = cfg.build().unwrap();
        assert_eq!(g.n_vertices(), 2);
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));
        assert!(!g.has_edge(0, 0));
    }

    #[test]
    fn one_based_numbering_shifts_vertices() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            &dir,
            "g.toml",
            "n_vertices = 2\nedges = [[1, 2], [2, 1]]\none_based = true\n",
        );
        let cfg: GraphConfig = load(&path).unwrap();
        let g = cfg.build().unwrap();
        assert!(g.has_edge(0, 1) && g.has_edge(1, 0));

        let bad = GraphConfig {
            n_vertices: 2,
            edges: vec![[0, 1]],
            one_based: true,
        };
        assert!(matches!(bad.build(), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn loads_signal_from_json() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_file(
            &dir,
            "sig.json",
            r#"{"word": [0, 1], "h": 0.5, "tau": 0.25, "extension": "periodic"}"#,
        );
        let cfg: SignalConfig = load(&path).unwrap();
        let sig = cfg.build().unwrap();
        assert_eq!(sig.word(), &[0, 1]);
        assert_eq!(sig.h(), 0.5);
        assert_eq!(sig.tau(), 0.25);
        assert_eq!(sig.anchor(), 0);
    }

    #[test]
    fn loads_system_and_builds() {
        let dir = tempfile::tempdir().unwrap();
        let text = r#"
h = 1.0

[graph]
n_vertices = 2
edges = [[0, 1], [1, 0]]

[space]
kind = "interval"
lo = -1.0
hi = 1.0

[[fields]]
name = "toward-minus-half"
kind = "polynomial"
coeffs = [-0.5, -1.0, 0.5, 1.0]

[[fields]]
name = "toward-plus-half"
kind = "polynomial"
coeffs = [0.5, -1.0, -0.5, 1.0]
"#;
        let path = write_file(&dir, "sys.toml", text);
        let cfg: SystemConfig = load(&path).unwrap();
        let sys = cfg.build().unwrap();
        assert_eq!(sys.graph().n_vertices(), 2);
        assert_eq!(sys.field(0).name, "toward-minus-half");
        assert!((sys.field(1).eval(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn reports_missing_file_and_bad_parse() {
        let err = load::<GraphConfig>("/nonexistent/g.toml").unwrap_err();
        assert!(matches!(err, ConfigError::Io { .. }));

        let dir = tempfile::tempdir().unwrap();
        let path = write_file(&dir, "g.toml", "n_vertices = \"two\"\n");
        let err = load::<GraphConfig>(&path).unwrap_err();
        assert!(matches!(err, ConfigError::Parse { .. }));
    }

    #[test]
    fn field_count_mismatch_surfaces_as_hybrid_error() {
        let cfg = SystemConfig {
            graph: GraphConfig {
                n_vertices: 2,
                edges: vec![[0, 1], [1, 0]],
                one_based: false,
            },
            fields: vec![FieldConfig {
                name: None,
                shape: FieldShape::Polynomial {
                    coeffs: vec![0.0, -1.0],
                },
            }],
            space: StateSpace::Interval { lo: -1.0, hi: 1.0 },
            h: 1.0,
        };
        assert!(matches!(cfg.build(), Err(ConfigError::Hybrid(_))));
    }
}
