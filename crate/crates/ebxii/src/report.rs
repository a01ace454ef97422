//! Serialized outputs: fit reports (JSON), study tables and ranked
//! comparison tables (CSV).

use std::fmt::Write as _;
use std::path::Path;

use ebxii_core::sim::COVERAGE_TAU;
use ebxii_core::{
    FitResult, ModelFitSummary, ParamName, Provenance, RankedTable, StudyReport, StudyRow,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Csv {
        path: String,
        line: usize,
        msg: String,
    },
}

/// Free-parameter estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub std_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalRow {
    pub name: String,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Everything a fit produces, in a form that survives a JSON round trip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub label: String,
    pub variant: String,
    /// Tie map, e.g. `a=1, b, c=p, d=2, eps=2, p`.
    pub ties: String,
    pub data: String,
    pub n: usize,
    /// Number of free parameters.
    pub w: usize,
    pub estimates: Vec<Estimate>,
    /// All model parameters at the estimate.
    pub model: Vec<NamedValue>,
    pub neg_loglik: f64,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    pub projected_gradient_norm: f64,
    pub singular_information: bool,
    /// Interval level complement; intervals are `1 - tau` two-sided.
    pub tau: f64,
    /// Empty when the information matrix is singular.
    pub intervals: Vec<IntervalRow>,
}

impl FitReport {
    pub fn from_fit(label: impl Into<String>, data: impl Into<String>, fit: &FitResult) -> Self {
        let summary = ModelFitSummary::from_fit("", fit);
        let estimates = fit
            .free_names
            .iter()
            .enumerate()
            .map(|(i, name)| Estimate {
                name: name.to_string(),
                value: fit.free_estimates[i],
                std_error: fit.std_errors.as_ref().map(|s| s[i]),
            })
            .collect();
        let model = ParamName::for_variant(fit.variant())
            .iter()
            .map(|&p| NamedValue {
                name: p.name().to_string(),
                value: fit.theta_hat.get(p),
            })
            .collect();
        let intervals = fit
            .ci(COVERAGE_TAU)
            .map(|ci| {
                ci.iter()
                    .zip(&fit.free_names)
                    .map(|(iv, name)| IntervalRow {
                        name: name.to_string(),
                        estimate: iv.estimate,
                        lower: iv.lower,
                        upper: iv.upper,
                    })
                    .collect()
            })
            .unwrap_or_default();
        Self {
            label: label.into(),
            variant: fit.variant().name().to_string(),
            ties: fit.ties.describe(),
            data: data.into(),
            n: fit.n,
            w: fit.w(),
            estimates,
            model,
            neg_loglik: fit.neg_loglik,
            aic: summary.aic,
            bic: summary.bic,
            converged: fit.converged,
            iterations: fit.iterations,
            projected_gradient_norm: fit.projected_gradient_norm,
            singular_information: fit.singular_information,
            tau: COVERAGE_TAU,
            intervals,
        }
    }

    pub fn summary(&self) -> ModelFitSummary {
        ModelFitSummary::computed(self.label.clone(), self.w, self.neg_loglik, self.n)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report fields are serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self, ReportError> {
        let path = path.as_ref();
        let text = read(path)?;
        Self::from_json(&text).map_err(|source| ReportError::Json {
            path: path.display().to_string(),
            source,
        })
    }

    /// Short human-readable summary.
    pub fn text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} on {} (n = {})", self.label, self.data, self.n);
        let _ = writeln!(s, "ties: {}", self.ties);
        for e in &self.estimates {
            match e.std_error {
                Some(se) => {
                    let _ = writeln!(s, "  {:<4} {:>12} ({})", e.name, sig6(e.value), sig6(se));
                }
                None => {
                    let _ = writeln!(s, "  {:<4} {:>12} (no SE)", e.name, sig6(e.value));
                }
            }
        }
        let _ = writeln!(
            s,
            "-l = {}  AIC = {}  BIC = {}  converged = {}",
            sig6(self.neg_loglik),
            sig6(self.aic),
            sig6(self.bic),
            self.converged
        );
        if self.singular_information {
            let _ = writeln!(
                s,
                "warning: observed information is singular; no standard errors"
            );
        }
        s
    }
}

fn read(path: &Path) -> Result<String, ReportError> {
    std::fs::read_to_string(path).map_err(|source| ReportError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Six significant digits, switching to exponent form for very large or
/// small magnitudes.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let e = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&e) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - e).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // trailing zeros after the point carry no information
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A published comparison row, tagged with whether it belongs to the model
/// family implemented here.
#[derive(Debug, Clone, PartialEq)]
pub struct PublishedRow {
    pub summary: ModelFitSummary,
    pub family: bool,
}

/// Reads `label,w,neg_loglik,n,aic,bic[,family]` rows. `#` lines and the
/// header are skipped; `family` is `yes` or `no` (default `no`).
pub fn parse_published(text: &str) -> Result<Vec<PublishedRow>, (usize, String)> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("label,") {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 6 && f.len() != 7 {
            return Err((i + 1, format!("expected 6 or 7 fields, got {}", f.len())));
        }
        let num = |k: usize| -> Result<f64, (usize, String)> {
            f[k].parse::<f64>()
                .map_err(|_| (i + 1, format!("'{}' is not a number", f[k])))
        };
        let int = |k: usize| -> Result<usize, (usize, String)> {
            f[k].parse::<usize>()
                .map_err(|_| (i + 1, format!("'{}' is not a count", f[k])))
        };
        let family = match f.get(6).copied() {
            None | Some("no") | Some("") => false,
            Some("yes") => true,
            Some(other) => return Err((i + 1, format!("family must be yes or no, got '{other}'"))),
        };
        out.push(PublishedRow {
            summary: ModelFitSummary::published(f[0], int(1)?, num(2)?, int(3)?, num(4)?, num(5)?),
            family,
        });
    }
    Ok(out)
}

pub fn read_published(path: impl AsRef<Path>) -> Result<Vec<PublishedRow>, ReportError> {
    let path = path.as_ref();
    parse_published(&read(path)?).map_err(|(line, msg)| ReportError::Csv {
        path: path.display().to_string(),
        line,
        msg,
    })
}

/// The ranked table as CSV; the first row carries `best = *`.
pub fn ranked_csv(table: &RankedTable) -> String {
    let mut s = String::from("rank,label,w,neg_loglik,n,aic,bic,source,best\n");
    for (i, r) in table.rows.iter().enumerate() {
        let source = match r.provenance {
            Provenance::Computed => "computed",
            Provenance::Published => "published",
        };
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{}",
            i + 1,
            r.label,
            r.w,
            sig6(r.neg_loglik),
            r.n,
            sig6(r.aic),
            sig6(r.bic),
            source,
            if i == 0 { "*" } else { "" }
        );
    }
    s
}

/// One row per (scenario, n, free parameter).
pub fn study_csv(report: &StudyReport) -> String {
    let mut s = String::from(
        "scenario,n,used,failures,param,truth,mean_estimate,sd_estimate,se_of_mean,mean_se,mean_abs_error,coverage,mean_neg_loglik\n",
    );
    for row in &report.rows {
        let sem = row.se_of_mean();
        for (i, name) in row.free_names.iter().enumerate() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                row.scenario,
                row.n,
                row.used,
                row.failures,
                name,
                sig6(row.truth[i]),
                sig6(row.mean_estimate[i]),
                sig6(row.sd_estimate[i]),
                sig6(sem[i]),
                sig6(row.mean_se[i]),
                sig6(row.mean_abs_error[i]),
                sig6(row.coverage[i]),
                sig6(row.mean_neg_loglik)
            );
        }
    }
    s
}

/// JSON mirror of a [`StudyRow`]. Non-finite values (no usable
/// replications) become `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRowRecord {
    pub scenario: String,
    pub n: usize,
    pub used: usize,
    pub failures: usize,
    pub params: Vec<String>,
    pub truth: Vec<f64>,
    pub mean_estimate: Vec<Option<f64>>,
    pub sd_estimate: Vec<Option<f64>>,
    pub mean_se: Vec<Option<f64>>,
    pub mean_abs_error: Vec<Option<f64>>,
    pub coverage: Vec<Option<f64>>,
    pub mean_neg_loglik: Option<f64>,
}

fn finite(v: &[f64]) -> Vec<Option<f64>> {
    v.iter().map(|x| x.is_finite().then_some(*x)).collect()
}

impl From<&StudyRow> for StudyRowRecord {
    fn from(r: &StudyRow) -> Self {
        Self {
            scenario: r.scenario.clone(),
            n: r.n,
            used: r.used,
            failures: r.failures,
            params: r.free_names.iter().map(|s| s.to_string()).collect(),
            truth: r.truth.clone(),
            mean_estimate: finite(&r.mean_estimate),
            sd_estimate: finite(&r.sd_estimate),
            mean_se: finite(&r.mean_se),
            mean_abs_error: finite(&r.mean_abs_error),
            coverage: finite(&r.coverage),
            mean_neg_loglik: r.mean_neg_loglik.is_finite().then_some(r.mean_neg_loglik),
        }
    }
}

pub fn study_json(report: &StudyReport) -> String {
    let rows: Vec<StudyRowRecord> = report.rows.iter().map(Into::into).collect();
    serde_json::to_string_pretty(&rows).expect("study rows are serializable")
}
