//! Scenario files for simulation studies.
//!
//! ```text
//! # defaults for every section
//! replications = 200
//! sizes = 1000, 10000
//! seed = 20240501
//!
//! [g1 b=0.8 c=1]
//! variant = g1
//! truth = a=3, b=0.8, c=1, d=1.5, eps=1, p=1
//! fix = a, d, eps, p
//! ```
//!
//! `fix` names parameters held at their true values (`NAME=VALUE` is also
//! accepted and must agree with the truth). `tie = NAME=K*NAME` may repeat.
//! Keys before the first section are defaults for all sections.

use std::path::Path;

use ebxii_core::{Scenario, Variant};
use thiserror::Error;

use crate::syntax::{self, TieSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Line { line: usize, msg: String },
    #[error("[{section}]: {msg}")]
    Section { section: String, msg: String },
    #[error("no scenarios defined")]
    Empty,
}

#[derive(Debug, Clone, Default)]
struct Fields {
    variant: Option<Variant>,
    truth: Option<String>,
    fix: Vec<String>,
    ties: Vec<TieSpec>,
    sizes: Option<Vec<usize>>,
    replications: Option<usize>,
    seed: Option<u64>,
}

fn line_err(line: usize, msg: impl ToString) -> ConfigError {
    ConfigError::Line {
        line,
        msg: msg.to_string(),
    }
}

fn set(fields: &mut Fields, key: &str, value: &str, line: usize) -> Result<(), ConfigError> {
    match key {
        "variant" => {
            fields.variant = Some(value.parse().map_err(|e| line_err(line, e))?);
        }
        "truth" => fields.truth = Some(value.to_string()),
        "fix" => fields.fix.extend(
            value
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from),
        ),
        "tie" => fields
            .ties
            .push(syntax::parse_tie(value).map_err(|e| line_err(line, e))?),
        "sizes" => {
            let sizes = value
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| line_err(line, format!("bad size list '{value}'")))?;
            fields.sizes = Some(sizes);
        }
        "replications" => {
            fields.replications = Some(
                value
                    .parse()
                    .map_err(|_| line_err(line, format!("bad count '{value}'")))?,
            );
        }
        "seed" => {
            fields.seed = Some(
                value
                    .parse()
                    .map_err(|_| line_err(line, format!("bad seed '{value}'")))?,
            );
        }
        other => return Err(line_err(line, format!("unknown key '{other}'"))),
    }
    Ok(())
}

fn build(
    label: &str,
    f: &Fields,
    defaults: &Fields,
    default_seed: u64,
) -> Result<Scenario, ConfigError> {
    let err = |msg: String| ConfigError::Section {
        section: label.to_string(),
        msg,
    };
    let variant = f
        .variant
        .or(defaults.variant)
        .ok_or_else(|| err("missing 'variant'".into()))?;
    let truth_text = f
        .truth
        .as_ref()
        .or(defaults.truth.as_ref())
        .ok_or_else(|| err("missing 'truth'".into()))?;
    let truth = syntax::parse_params(variant, truth_text).map_err(|e| err(e.to_string()))?;
    let mut fixes = Vec::new();
    for item in defaults.fix.iter().chain(&f.fix) {
        let (name, value) = if item.contains('=') {
            syntax::parse_assignment(item).map_err(|e| err(e.to_string()))?
        } else {
            let name = syntax::parse_name(item).map_err(|e| err(e.to_string()))?;
            (name, truth.get(name))
        };
        fixes.push((name, value));
    }
    let ties: Vec<TieSpec> = defaults.ties.iter().chain(&f.ties).copied().collect();
    let map = syntax::build_ties(variant, &fixes, &ties).map_err(|e| err(e.to_string()))?;
    let sizes = f
        .sizes
        .clone()
        .or_else(|| defaults.sizes.clone())
        .ok_or_else(|| err("missing 'sizes'".into()))?;
    let replications = f
        .replications
        .or(defaults.replications)
        .ok_or_else(|| err("missing 'replications'".into()))?;
    let seed = f.seed.or(defaults.seed).unwrap_or(default_seed);
    Scenario::new(label, truth, map, sizes, replications, seed).map_err(|e| err(e.to_string()))
}

/// Parses a scenario file. Sections without a `seed` (here or in the
/// defaults) use `default_seed`.
pub fn parse_scenarios(text: &str, default_seed: u64) -> Result<Vec<Scenario>, ConfigError> {
    let mut defaults = Fields::default();
    let mut sections: Vec<(String, Fields)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| line_err(line_no, "section header must end with ']'"))?
                .trim();
            if name.is_empty() {
                return Err(line_err(line_no, "empty section name"));
            }
            if sections.iter().any(|(n, _)| n == name) {
                return Err(line_err(line_no, format!("duplicate section [{name}]")));
            }
            sections.push((name.to_string(), Fields::default()));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| line_err(line_no, format!("expected key = value, got '{line}'")))?;
        let target = match sections.last_mut() {
            Some((_, f)) => f,
            None => &mut defaults,
        };
        set(target, key.trim(), value.trim(), line_no)?;
    }
    if sections.is_empty() {
        return Err(ConfigError::Empty);
    }
    sections
        .iter()
        .map(|(label, f)| build(label, f, &defaults, default_seed))
        .collect()
}

pub fn load_scenarios(
    path: impl AsRef<Path>,
    default_seed: u64,
) -> Result<Vec<Scenario>, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenarios(&text, default_seed)
}
