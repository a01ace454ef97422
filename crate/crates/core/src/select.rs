//! Information criteria and ranked comparison tables.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::math::log;
use crate::mle::FitResult;

/// `2 w - 2 l`.
pub fn aic(w: usize, neg_loglik: f64) -> f64 {
    2.0 * w as f64 + 2.0 * neg_loglik
}

/// `w ln n - 2 l`.
pub fn bic(w: usize, neg_loglik: f64, n: usize) -> f64 {
    w as f64 * log(n as f64) + 2.0 * neg_loglik
}

/// Where a summary's numbers came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Computed here from a fit.
    Computed,
    /// Copied from an external source; never recomputed.
    Published,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFitSummary {
    pub label: String,
    /// Number of free parameters.
    pub w: usize,
    pub neg_loglik: f64,
    pub n: usize,
    pub aic: f64,
    pub bic: f64,
    pub provenance: Provenance,
}

impl ModelFitSummary {
    pub fn computed(label: impl Into<String>, w: usize, neg_loglik: f64, n: usize) -> Self {
        Self {
            label: label.into(),
            w,
            neg_loglik,
            n,
            aic: aic(w, neg_loglik),
            bic: bic(w, neg_loglik, n),
            provenance: Provenance::Computed,
        }
    }

    pub fn from_fit(label: impl Into<String>, fit: &FitResult) -> Self {
        Self::computed(label, fit.w(), fit.neg_loglik, fit.n)
    }

    /// A row whose criteria are taken as printed.
    pub fn published(
        label: impl Into<String>,
        w: usize,
        neg_loglik: f64,
        n: usize,
        aic: f64,
        bic: f64,
    ) -> Self {
        Self {
            label: label.into(),
            w,
            neg_loglik,
            n,
            aic,
            bic,
            provenance: Provenance::Published,
        }
    }

    pub fn value(&self, by: Criterion) -> f64 {
        match by {
            Criterion::Aic => self.aic,
            Criterion::Bic => self.bic,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Aic,
    Bic,
}

impl core::str::FromStr for Criterion {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aic" => Ok(Criterion::Aic),
            "bic" => Ok(Criterion::Bic),
            _ => Err(crate::Error::InvalidParameter {
                name: "criterion",
                value: f64::NAN,
                reason: "expected aic or bic",
            }),
        }
    }
}

/// Summaries sorted ascending by one criterion; the first row is best.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedTable {
    pub by: Criterion,
    pub rows: Vec<ModelFitSummary>,
}

impl RankedTable {
    pub fn best(&self) -> Option<&ModelFitSummary> {
        self.rows.first()
    }
}

/// Ranks summaries by `by`, lower first; ties are ordered by label.
pub fn compare(summaries: &[ModelFitSummary], by: Criterion) -> RankedTable {
    let mut rows = summaries.to_vec();
    rows.sort_by(|x, y| {
        x.value(by)
            .partial_cmp(&y.value(by))
            .unwrap_or(Ordering::Equal)
            .then_with(|| x.label.cmp(&y.label))
    });
    RankedTable { by, rows }
}
