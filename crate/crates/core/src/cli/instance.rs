use std::fmt;
use std::fs;
use std::io::Read;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::simplex::{edge_count, SquaredEdgeLengths};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    dimension: usize,
    #[serde(alias = "lengths")]
    squared_lengths: Vec<f64>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

/// A parsed instance plus what the report needs to identify it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub lengths: SquaredEdgeLengths,
    pub labels: Option<Vec<String>>,
    pub source: InputRecord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRecord {
    pub source: String,
    pub sha256: String,
    /// True when the file held plain lengths that were squared on ingest.
    pub squared_on_ingest: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub source: String,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.source, self.message)
    }
}

impl std::error::Error for ParseError {}

/// Reads an instance from a path, `-` for standard input, or inline JSON
/// (any argument starting with `{`).
pub fn load_instance(arg: &str, plain_lengths: bool) -> Result<Instance, ParseError> {
    let (source, text) = if arg.trim_start().starts_with('{') {
        ("<inline>".to_string(), arg.to_string())
    } else if arg == "-" {
        let mut text = String::new();
        std::io::stdin().read_to_string(&mut text).map_err(|e| ParseError {
            source: "<stdin>".into(),
            message: e.to_string(),
        })?;
        ("<stdin>".to_string(), text)
    } else {
        let text = fs::read_to_string(arg).map_err(|e| ParseError {
            source: arg.into(),
            message: e.to_string(),
        })?;
        (arg.to_string(), text)
    };
    parse_instance(&source, &text, plain_lengths)
}

pub fn parse_instance(source: &str, text: &str, plain_lengths: bool) -> Result<Instance, ParseError> {
    let err = |message: String| ParseError {
        source: source.to_string(),
        message,
    };
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| {
        err(format!("line {}, column {}: {e}", e.line(), e.column()))
    })?;
    let n = file.dimension;
    if n == 0 {
        return Err(err("dimension must be at least 1".into()));
    }
    let expected = edge_count(n);
    if file.squared_lengths.len() != expected {
        return Err(err(format!(
            "dimension {n} needs C({}, 2) = {expected} values in squared_lengths, got {}",
            n + 1,
            file.squared_lengths.len()
        )));
    }
    if let Some((e, v)) = file
        .squared_lengths
        .iter()
        .enumerate()
        .find(|(_, v)| !(v.is_finite() && **v > 0.0))
    {
        return Err(err(format!(
            "squared_lengths[{e}] = {v}; edge lengths must be strictly positive"
        )));
    }
    if let Some(labels) = &file.labels {
        if labels.len() != n + 1 {
            return Err(err(format!(
                "labels has {} entries, expected one per vertex ({})",
                labels.len(),
                n + 1
            )));
        }
    }
    let lengths = if plain_lengths {
        SquaredEdgeLengths::from_lengths(n, &file.squared_lengths)
    } else {
        SquaredEdgeLengths::new(n, file.squared_lengths)
    }
    .map_err(|e| err(e.to_string()))?;
    Ok(Instance {
        lengths,
        labels: file.labels,
        source: InputRecord {
            source: source.to_string(),
            sha256: hex::encode(Sha256::digest(text.as_bytes())),
            squared_on_ingest: plain_lengths,
        },
    })
}
