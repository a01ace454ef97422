//! Command implementations shared by the binary and the tests.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ebxii_core::mle::default_init;
use ebxii_core::{
    compare, fit, Bounds, Criterion, FitOptions, ModelFitSummary, ParamName, Tie, TieMap, Variant,
};
use thiserror::Error;

use crate::data::{self, DataError};
use crate::report::{self, sig6, FitReport, ReportError};
use crate::syntax::{self, SyntaxError, TieSpec};

/// Failures that map to exit code 1.
#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Report(#[from] ReportError),
    #[error(transparent)]
    Config(#[from] crate::config::ConfigError),
    #[error("{0}")]
    Model(#[from] ebxii_core::Error),
    #[error("{0}")]
    Usage(String),
}

/// Default seed: `EBXII_SEED` when set and numeric, else 0.
pub fn default_seed() -> Result<u64, CommandError> {
    match std::env::var("EBXII_SEED") {
        Ok(s) => s.trim().parse().map_err(|_| {
            CommandError::Usage(format!("EBXII_SEED='{s}' is not an unsigned integer"))
        }),
        Err(_) => Ok(0),
    }
}

#[derive(Debug, Clone)]
pub struct FitRequest {
    pub variant: Variant,
    pub data: PathBuf,
    pub fixes: Vec<(ParamName, f64)>,
    pub ties: Vec<TieSpec>,
    /// Starting values by free label or by any parameter linked to one.
    pub inits: Vec<(ParamName, f64)>,
    pub reflect: Option<f64>,
}

impl FitRequest {
    pub fn new(variant: Variant, data: impl Into<PathBuf>) -> Self {
        Self {
            variant,
            data: data.into(),
            fixes: Vec::new(),
            ties: Vec::new(),
            inits: Vec::new(),
            reflect: None,
        }
    }
}

/// A fit report plus any warnings worth printing.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub report: FitReport,
    pub warnings: Vec<String>,
}

fn starting_point(
    map: &TieMap,
    values: &[f64],
    inits: &[(ParamName, f64)],
) -> Result<Option<Vec<f64>>, CommandError> {
    if inits.is_empty() {
        return Ok(None);
    }
    let bounds = Bounds::default_for(map, values);
    let mut phi = default_init(map, values, &bounds);
    for &(name, v) in inits {
        match map.entries().get(name.index()) {
            Some(Tie::Linked { free, multiplier }) => phi[*free] = v / multiplier,
            Some(Tie::Fixed(_)) => {
                return Err(CommandError::Usage(format!(
                    "--init {name}: the parameter is fixed"
                )))
            }
            None => {
                return Err(CommandError::Usage(format!(
                    "--init {name}: not a parameter of {}",
                    map.variant()
                )))
            }
        }
    }
    Ok(Some(phi))
}

/// Loads the data, applies the reflection and fits.
pub fn run_fit(req: &FitRequest) -> Result<FitOutcome, CommandError> {
    let mut series = data::load_series(&req.data, None)?;
    let mut warnings = Vec::new();
    if let Some(pivot) = req.reflect {
        let r = data::reflect_transform(&series, pivot);
        if let Some(w) = r.warning() {
            warnings.push(w);
        }
        series = r.series;
    }
    let map = syntax::build_ties(req.variant, &req.fixes, &req.ties)?;
    let opts = FitOptions {
        init: starting_point(&map, &series.values, &req.inits)?,
        ..FitOptions::default()
    };
    let res = fit(&map, &series.values, &opts)?;
    if res.singular_information {
        warnings.push("observed information is singular; standard errors omitted".into());
    }
    let label = format!("EBXIID ({})", req.variant);
    Ok(FitOutcome {
        report: FitReport::from_fit(label, series.provenance, &res),
        warnings,
    })
}

/// `v,quantile` rows.
pub fn quantile_table(
    variant: Variant,
    params: &str,
    levels: &[f64],
) -> Result<String, CommandError> {
    let dist = syntax::parse_params(variant, params)?.to_dist(Default::default())?;
    let mut out = String::from("v,quantile\n");
    for &v in levels {
        let q = dist.quantile(v)?;
        let _ = writeln!(out, "{v},{}", sig6(q));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Cdf,
    Pdf,
    Hazard,
}

impl std::str::FromStr for CurveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "cdf" => Ok(CurveKind::Cdf),
            "pdf" => Ok(CurveKind::Pdf),
            "hazard" => Ok(CurveKind::Hazard),
            _ => Err(format!("expected cdf, pdf or hazard, got '{s}'")),
        }
    }
}

/// `x,value` on `k` equally spaced points of `[from, to]`. Points outside
/// the support give 0.
pub fn curve_table(
    variant: Variant,
    params: &str,
    what: CurveKind,
    from: f64,
    to: f64,
    k: usize,
) -> Result<String, CommandError> {
    if k == 0 || !(from <= to) {
        return Err(CommandError::Usage(format!(
            "need --n >= 1 and --from <= --to (got n = {k}, [{from}, {to}])"
        )));
    }
    let dist = syntax::parse_params(variant, params)?.to_dist(Default::default())?;
    let lb = dist.support_lb();
    let mut out = String::from("x,value\n");
    for i in 0..k {
        let x = if k == 1 {
            from
        } else {
            from + (to - from) * i as f64 / (k - 1) as f64
        };
        let value = match what {
            CurveKind::Cdf => dist.cdf(x),
            _ if x <= lb => 0.0,
            CurveKind::Pdf => dist.pdf(x)?,
            CurveKind::Hazard => dist.hazard(x)?,
        };
        let _ = writeln!(out, "{},{}", sig6(x), sig6(value));
    }
    Ok(out)
}

/// `n` draws, one per line at full precision.
pub fn sample_lines(
    variant: Variant,
    params: &str,
    n: usize,
    seed: u64,
) -> Result<String, CommandError> {
    let dist = syntax::parse_params(variant, params)?.to_dist(Default::default())?;
    let mut out = String::new();
    for x in dist.sample(n, seed, false)? {
        let _ = writeln!(out, "{x}");
    }
    Ok(out)
}

/// Ranks computed reports together with published rows. A published row
/// whose label matches a computed report is dropped in its favour.
pub fn compare_table(
    reports: &[PathBuf],
    published: Option<&Path>,
    by: Criterion,
) -> Result<String, CommandError> {
    let mut rows: Vec<ModelFitSummary> = Vec::new();
    for path in reports {
        rows.push(FitReport::read(path)?.summary());
    }
    if let Some(path) = published {
        for p in report::read_published(path)? {
            if !rows.iter().any(|r| r.label == p.summary.label) {
                rows.push(p.summary);
            }
        }
    }
    if rows.is_empty() {
        return Err(CommandError::Usage("nothing to compare".into()));
    }
    Ok(report::ranked_csv(&compare(&rows, by)))
}
