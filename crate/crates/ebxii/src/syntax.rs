//! Text forms of parameters and ties: `a=3,b=0.8`, `d=1`, `d=0.5*b`.

use ebxii_core::mle::TieMapBuilder;
use ebxii_core::{ParamName, ParamVector, TieMap, Variant};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SyntaxError {
    #[error("expected NAME=VALUE, got '{0}'")]
    Assignment(String),
    #[error("'{0}' is not a parameter name (expected a, b, c, d, eps, p)")]
    Name(String),
    #[error("'{0}' is not a number")]
    Number(String),
    #[error("expected NAME=K*NAME or NAME=NAME, got '{0}'")]
    Tie(String),
    #[error("{0} is given more than once")]
    Repeated(ParamName),
    #[error("{variant} needs {missing}")]
    Missing { variant: Variant, missing: String },
    #[error("{name} is not a parameter of {variant}")]
    Unused { name: ParamName, variant: Variant },
    #[error("{0}")]
    Model(#[from] ebxii_core::Error),
}

pub fn parse_name(s: &str) -> Result<ParamName, SyntaxError> {
    s.trim()
        .parse()
        .map_err(|_| SyntaxError::Name(s.trim().to_string()))
}

pub fn parse_number(s: &str) -> Result<f64, SyntaxError> {
    let s = s.trim();
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(SyntaxError::Number(s.to_string())),
    }
}

/// `NAME=VALUE`.
pub fn parse_assignment(s: &str) -> Result<(ParamName, f64), SyntaxError> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| SyntaxError::Assignment(s.to_string()))?;
    Ok((parse_name(name)?, parse_number(value)?))
}

/// Comma-separated assignments, each name at most once.
pub fn parse_assignments(s: &str) -> Result<Vec<(ParamName, f64)>, SyntaxError> {
    let mut out: Vec<(ParamName, f64)> = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let (name, v) = parse_assignment(part)?;
        if out.iter().any(|(n, _)| *n == name) {
            return Err(SyntaxError::Repeated(name));
        }
        out.push((name, v));
    }
    Ok(out)
}

/// A complete parameter vector for `variant` from `a=..,b=..` text.
pub fn parse_params(variant: Variant, s: &str) -> Result<ParamVector, SyntaxError> {
    let given = parse_assignments(s)?;
    let names = ParamName::for_variant(variant);
    if let Some((name, _)) = given.iter().find(|(n, _)| !names.contains(n)) {
        return Err(SyntaxError::Unused {
            name: *name,
            variant,
        });
    }
    let mut values = Vec::with_capacity(names.len());
    let mut missing = Vec::new();
    for name in names {
        match given.iter().find(|(n, _)| n == name) {
            Some((_, v)) => values.push(*v),
            None => missing.push(name.name()),
        }
    }
    if !missing.is_empty() {
        return Err(SyntaxError::Missing {
            variant,
            missing: missing.join(", "),
        });
    }
    Ok(ParamVector::new(variant, &values)?)
}

/// A tie `target = multiplier * source`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TieSpec {
    pub target: ParamName,
    pub multiplier: f64,
    pub source: ParamName,
}

/// `NAME=K*NAME` or `NAME=NAME` (multiplier 1).
pub fn parse_tie(s: &str) -> Result<TieSpec, SyntaxError> {
    let bad = || SyntaxError::Tie(s.to_string());
    let (target, rhs) = s.split_once('=').ok_or_else(bad)?;
    let target = parse_name(target)?;
    let (multiplier, source) = match rhs.split_once('*') {
        Some((k, name)) => (parse_number(k).map_err(|_| bad())?, name),
        None => (1.0, rhs),
    };
    if multiplier == 0.0 {
        return Err(bad());
    }
    Ok(TieSpec {
        target,
        multiplier,
        source: parse_name(source)?,
    })
}

/// Builds a tie map from `--fix` and `--tie` statements.
pub fn build_ties(
    variant: Variant,
    fixes: &[(ParamName, f64)],
    ties: &[TieSpec],
) -> Result<TieMap, SyntaxError> {
    let mut builder = TieMapBuilder::new(variant);
    for &(name, v) in fixes {
        builder = builder.fix(name, v);
    }
    for t in ties {
        builder = builder.tie(t.target, t.multiplier, t.source);
    }
    Ok(builder.build()?)
}
