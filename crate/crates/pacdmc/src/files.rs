//! JSON channel and metric files.
//!
//! A channel file holds `{"x_labels": [...], "y_labels": [...], "p": [...],
//! "w": [[...], ...]}`; a metric file holds `{"k": [[...], ...]}`. Labels are
//! optional and default to `0, 1, ...`.

use std::fs;
use std::path::{Path, PathBuf};

use pacdmc_core::{Channel, DecodingMetric, Pmf};
use serde::{Deserialize, Serialize};

/// Name of the built-in 2 x 3 example channel with uniform input.
pub const BUILTIN_EQ16: &str = "paper-eq16";

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Syntax {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpecFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_labels: Option<Vec<String>>,
    pub p: Vec<f64>,
    pub w: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSpecFile {
    pub k: Vec<Vec<f64>>,
}

/// A parsed channel together with its symbol labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    pub p: Pmf,
    pub w: Channel,
}

impl ChannelSpec {
    pub fn eq16() -> Self {
        let w = Channel::new(vec![vec![0.86, 0.1, 0.04], vec![0.04, 0.1, 0.86]])
            .expect("rows sum to one");
        Self {
            x_labels: default_labels(2),
            y_labels: default_labels(3),
            p: Pmf::uniform(2).expect("nonempty"),
            w,
        }
    }

    pub fn to_file(&self) -> ChannelSpecFile {
        ChannelSpecFile {
            x_labels: Some(self.x_labels.clone()),
            y_labels: Some(self.y_labels.clone()),
            p: self.p.probs().to_vec(),
            w: (0..self.w.inputs()).map(|x| self.w.row(x).to_vec()).collect(),
        }
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn read(path: &Path) -> Result<String, FileError> {
    fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.to_owned(),
        source,
    })
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T, FileError> {
    serde_json::from_str(text).map_err(|e| FileError::Syntax {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn invalid(path: &Path, message: impl Into<String>) -> FileError {
    FileError::Invalid {
        path: path.to_owned(),
        message: message.into(),
    }
}

/// Parses channel JSON. `path` is only used in diagnostics.
pub fn parse_channel(path: &Path, text: &str) -> Result<ChannelSpec, FileError> {
    let raw: ChannelSpecFile = parse_json(path, text)?;
    let p = Pmf::new(raw.p).map_err(|e| invalid(path, format!("field p: {e}")))?;
    let w = Channel::new(raw.w).map_err(|e| invalid(path, format!("field w: {e}")))?;
    if p.len() != w.inputs() {
        return Err(invalid(
            path,
            format!("p has {} entries but w has {} rows", p.len(), w.inputs()),
        ));
    }
    let x_labels = raw.x_labels.unwrap_or_else(|| default_labels(w.inputs()));
    let y_labels = raw.y_labels.unwrap_or_else(|| default_labels(w.outputs()));
    if x_labels.len() != w.inputs() {
        return Err(invalid(path, "x_labels length differs from the rows of w"));
    }
    if y_labels.len() != w.outputs() {
        return Err(invalid(path, "y_labels length differs from the columns of w"));
    }
    Ok(ChannelSpec {
        x_labels,
        y_labels,
        p,
        w,
    })
}

pub fn parse_metric(path: &Path, text: &str) -> Result<DecodingMetric, FileError> {
    let raw: MetricSpecFile = parse_json(path, text)?;
    DecodingMetric::new(raw.k).map_err(|e| invalid(path, format!("field k: {e}")))
}

/// Loads a channel file, or the built-in example for [`BUILTIN_EQ16`].
pub fn load_channel(source: &str) -> Result<ChannelSpec, FileError> {
    if source == BUILTIN_EQ16 {
        return Ok(ChannelSpec::eq16());
    }
    let path = Path::new(source);
    parse_channel(path, &read(path)?)
}

pub fn load_metric(path: &Path) -> Result<DecodingMetric, FileError> {
    parse_metric(path, &read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn syntax_errors_carry_position() {
        let text = "{\n  \"p\": [0.5, 0.5],\n  \"w\": [[1, 0], [0 1]]\n}";
        match parse_channel(Path::new("c.json"), text) {
            Err(FileError::Syntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 10);
            }
            other => panic!("expected a syntax error, got {other:?}"),
        }
    }

    #[test]
    fn unnormalized_row_is_rejected() {
        let text = r#"{"p": [0.5, 0.5], "w": [[0.5, 0.4], [0.5, 0.5]]}"#;
        let err = parse_channel(Path::new("c.json"), text).unwrap_err();
        assert!(err.to_string().contains("field w"), "{err}");
    }

    #[test]
    fn builtin_round_trips_through_json() {
        let spec = ChannelSpec::eq16();
        let text = serde_json::to_string(&spec.to_file()).unwrap();
        assert_eq!(parse_channel(Path::new("x"), &text).unwrap(), spec);
    }
}
