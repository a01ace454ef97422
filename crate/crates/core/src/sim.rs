//! Seeded Monte Carlo parameter-recovery studies.
//!
//! Each replication `r` at sample size `n` draws its data from the stream
//! seeded with `combine_seed(&[master, n, r])`, so replications can run in
//! any order or in parallel and still aggregate to the same report.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gfun::{Guard, Variant};
use crate::math::{fabs, sqrt};
use crate::mle::{fit, FitOptions, FitResult, ParamName, ParamVector, TieMap};
use crate::rng::combine_seed;

/// Coverage level used for the interval-coverage column.
pub const COVERAGE_TAU: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub truth: ParamVector,
    pub ties: TieMap,
    pub sizes: Vec<usize>,
    pub replications: usize,
    pub master_seed: u64,
}

impl Scenario {
    /// Checks that the truth is a valid proper member and the tie map belongs
    /// to the same variant.
    pub fn new(
        label: impl Into<String>,
        truth: ParamVector,
        ties: TieMap,
        sizes: Vec<usize>,
        replications: usize,
        master_seed: u64,
    ) -> Result<Self> {
        let label = label.into();
        if ties.variant() != truth.variant() {
            return Err(Error::InvalidScenario(format!(
                "{label}: tie map is for {} but the truth is {}",
                ties.variant(),
                truth.variant()
            )));
        }
        let dist = truth.to_dist(Guard::Scan)?;
        if !dist.is_proper() {
            return Err(Error::InvalidScenario(format!(
                "{label}: true parameters give a defective distribution"
            )));
        }
        if sizes.contains(&0) {
            return Err(Error::InvalidScenario(format!(
                "{label}: sample sizes must be positive"
            )));
        }
        let s = Self {
            label,
            truth,
            ties,
            sizes,
            replications,
            master_seed,
        };
        let back = s.ties.expand(&s.truth_free())?;
        if back != s.truth {
            return Err(Error::InvalidScenario(format!(
                "{}: fixed or tied values disagree with the true parameters",
                s.label
            )));
        }
        Ok(s)
    }

    /// True values of the free parameters.
    pub fn truth_free(&self) -> Vec<f64> {
        self.ties.project(&self.truth)
    }

    pub fn replication_seed(&self, n: usize, r: usize) -> u64 {
        combine_seed(&[self.master_seed, n as u64, r as u64])
    }

    /// Samples and fits replication `r` at size `n`.
    pub fn run_replication(&self, n: usize, r: usize) -> Result<FitResult> {
        let dist = self.truth.to_dist(Guard::Scan)?;
        let data = dist.sample(n, self.replication_seed(n, r), false)?;
        fit(&self.ties, &data, &FitOptions::default())
    }
}

/// Summary of all replications at one sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub scenario: String,
    pub n: usize,
    /// Replications that produced a converged fit with standard errors.
    pub used: usize,
    /// Replications excluded: fit error, non-convergence or singular information.
    pub failures: usize,
    pub free_names: Vec<&'static str>,
    pub truth: Vec<f64>,
    pub mean_estimate: Vec<f64>,
    /// Sample standard deviation of the estimates across replications.
    pub sd_estimate: Vec<f64>,
    pub mean_se: Vec<f64>,
    pub mean_abs_error: Vec<f64>,
    /// Fraction of 95% intervals containing the truth.
    pub coverage: Vec<f64>,
    pub mean_neg_loglik: f64,
}

impl StudyRow {
    /// `sd / sqrt(used)`, the Monte Carlo error of each mean estimate.
    pub fn se_of_mean(&self) -> Vec<f64> {
        let k = sqrt(self.used as f64);
        self.sd_estimate.iter().map(|s| s / k).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
}

/// Aggregates replication outcomes, given in replication order.
pub fn aggregate(scenario: &Scenario, n: usize, outcomes: &[Result<FitResult>]) -> StudyRow {
    let truth = scenario.truth_free();
    let k = truth.len();
    let good: Vec<(&FitResult, &Vec<f64>)> = outcomes
        .iter()
        .filter_map(|o| o.as_ref().ok())
        .filter(|f| f.converged)
        .filter_map(|f| f.std_errors.as_ref().map(|se| (f, se)))
        .collect();
    let used = good.len();
    let m = used as f64;
    let mut mean = vec![0.0; k];
    let mut mean_se = vec![0.0; k];
    let mut mae = vec![0.0; k];
    let mut cover = vec![0.0; k];
    let mut nll = 0.0;
    let z = crate::normal_quantile(1.0 - 0.5 * COVERAGE_TAU);
    for (f, se) in &good {
        for i in 0..k {
            let e = f.free_estimates[i];
            mean[i] += e;
            mean_se[i] += se[i];
            mae[i] += fabs(e - truth[i]);
            if fabs(e - truth[i]) <= z * se[i] {
                cover[i] += 1.0;
            }
        }
        nll += f.neg_loglik;
    }
    let avg = |v: &mut Vec<f64>| v.iter_mut().for_each(|x| *x /= m);
    let mut sd = vec![0.0; k];
    if used > 0 {
        avg(&mut mean);
        avg(&mut mean_se);
        avg(&mut mae);
        avg(&mut cover);
        nll /= m;
        if used > 1 {
            for (f, _) in &good {
                for i in 0..k {
                    let dlt = f.free_estimates[i] - mean[i];
                    sd[i] += dlt * dlt;
                }
            }
            sd.iter_mut().for_each(|s| *s = sqrt(*s / (m - 1.0)));
        }
    } else {
        for v in [&mut mean, &mut mean_se, &mut mae, &mut cover, &mut sd] {
            v.iter_mut().for_each(|x| *x = f64::NAN);
        }
        nll = f64::NAN;
    }
    StudyRow {
        scenario: scenario.label.clone(),
        n,
        used,
        failures: outcomes.len() - used,
        free_names: scenario.ties.free_labels(),
        truth,
        mean_estimate: mean,
        sd_estimate: sd,
        mean_se,
        mean_abs_error: mae,
        coverage: cover,
        mean_neg_loglik: nll,
    }
}

/// Runs every replication serially. Zero replications give an empty report.
pub fn run_study(scenario: &Scenario) -> StudyReport {
    if scenario.replications == 0 {
        return StudyReport::default();
    }
    let rows = scenario
        .sizes
        .iter()
        .map(|&n| {
            let outcomes: Vec<_> = (0..scenario.replications)
                .map(|r| scenario.run_replication(n, r))
                .collect();
            aggregate(scenario, n, &outcomes)
        })
        .collect();
    StudyReport { rows }
}

/// The twelve-cell design: g1, g2, g3 with `a = 3`, `d = 1.5`, `eps = 1`,
/// `p = 1` fixed and `(b, c)` free at `(0.8, 1)`, `(1.2, 1)`, `(0.8, 0.5)`,
/// `(1.2, 0.5)`; `n` in `{1000, 10000}`.
pub fn recovery_design(replications: usize, master_seed: u64) -> Vec<Scenario> {
    let mut out = Vec::new();
    for variant in [Variant::G1, Variant::G2, Variant::G3] {
        for (b, c) in [(0.8, 1.0), (1.2, 1.0), (0.8, 0.5), (1.2, 0.5)] {
            let full = [3.0, b, c, 1.5, 1.0, 1.0];
            let truth = ParamVector::new(variant, &full[..variant.arity()]).expect("arity matches");
            let mut builder = TieMap::builder(variant)
                .fix(ParamName::A, 3.0)
                .fix(ParamName::D, 1.5)
                .fix(ParamName::Eps, 1.0);
            if variant.uses_p() {
                builder = builder.fix(ParamName::P, 1.0);
            }
            let ties = builder.build().expect("valid tie map");
            let label = format!("{variant} b={b} c={c}");
            out.push(
                Scenario::new(
                    label,
                    truth,
                    ties,
                    vec![1000, 10000],
                    replications,
                    master_seed,
                )
                .expect("valid scenario"),
            );
        }
    }
    out
}
