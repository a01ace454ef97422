//! Acceptance checks. Prints one `PASS`, `FAIL` or `SKIP` line per
//! criterion and always exits 0, so the report is visible in the test log.

use std::time::{Duration, Instant};

use ebxii::commands::{run_fit, FitRequest};
use ebxii::{config, data, report, study, syntax};
use ebxii_core::rng::UniformStream;
use ebxii_core::testkit::{central_gradient, central_jacobian, ks_statistic, rel_err, total_mass};
use ebxii_core::{
    aic, bic, compare, fit, hessian, loglik, score, Criterion, Ebxii, FitOptions, GSpec, Guard,
    ParamName, ParamVector, TieMap, Variant,
};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};

enum Status {
    Pass,
    Fail,
    Skip,
}

struct Outcome {
    status: Status,
    detail: String,
}

impl Outcome {
    fn check(ok: bool, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Outcome {
            status,
            detail: detail.into(),
        }
    }

    fn skip(detail: impl Into<String>) -> Self {
        Outcome {
            status: Status::Skip,
            detail: detail.into(),
        }
    }
}

fn run(id: usize, name: &str, check: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let out = check();
    let secs = start.elapsed().as_secs_f64();
    let tag = match out.status {
        Status::Pass => "PASS",
        Status::Fail => "FAIL",
        Status::Skip => "SKIP",
    };
    println!("{tag} [{id}] {name}: {} ({secs:.2} s)", out.detail);
}

struct Draw(UniformStream);

impl Draw {
    fn new(seed: u64) -> Self {
        Draw(UniformStream::new(seed))
    }

    fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.next_open01()
    }
}

fn random_theta(variant: Variant, draw: &mut Draw) -> ParamVector {
    loop {
        let a = draw.uniform(0.5, 5.0);
        let b = draw.uniform(0.5, 2.0);
        let c = draw.uniform(0.3, 3.0);
        let d = match variant {
            Variant::G0 => draw.uniform(0.0, 3.0),
            _ => draw.uniform(1.2, 4.0),
        };
        let eps = draw.uniform(0.5, 2.0);
        let p = draw.uniform(0.5, 2.0);
        let all = [a, b, c, d, eps, p];
        let theta = ParamVector::new(variant, &all[..variant.arity()]).unwrap();
        if let Ok(m) = theta.to_dist(Guard::Scan) {
            if m.is_proper() {
                return theta;
            }
        }
    }
}

fn reference_g(variant: Variant, b: f64, c: f64) -> GSpec {
    match variant {
        Variant::G0 => GSpec::g0(b, c, 1.5),
        Variant::G1 => GSpec::g1(b, c, 1.5, 1.0, 1.0),
        Variant::G2 => GSpec::g2(b, c, 1.5, 1.0, 1.0),
        Variant::G3 => GSpec::g3(b, c, 1.5, 1.0),
    }
    .unwrap()
}

const BC: [(f64, f64); 4] = [(0.8, 1.0), (1.2, 1.0), (0.8, 0.5), (1.2, 0.5)];

/// Printed quantiles at v = 0.90, 0.95, 0.99 for `a = 3`, `d = 1.5`,
/// `eps = p = 1`, rows in the order of [`BC`] within each variant.
const PRINTED: [[f64; 3]; 16] = [
    [-0.30, 0.46, 3.53],
    [-0.37, 0.06, 1.43],
    [0.89, 2.42, 8.56],
    [0.75, 1.63, 4.37],
    [0.40, 0.70, 1.81],
    [0.37, 0.54, 1.07],
    [0.87, 1.43, 3.29],
    [0.81, 1.15, 2.09],
    [0.45, 0.66, 1.15],
    [0.51, 0.69, 1.11],
    [0.75, 1.01, 1.57],
    [0.92, 1.16, 1.67],
    [0.84, 1.56, 4.64],
    [0.78, 1.18, 2.53],
    [1.99, 3.52, 9.71],
    [1.85, 2.73, 5.49],
];

fn reference_rows() -> Vec<(Variant, f64, f64, Ebxii)> {
    Variant::ALL
        .iter()
        .flat_map(|&v| {
            BC.iter()
                .map(move |&(b, c)| (v, b, c, Ebxii::new(3.0, reference_g(v, b, c)).unwrap()))
        })
        .collect()
}

fn quantile_table() -> Outcome {
    let start = Instant::now();
    let mut within = 0;
    let mut truncated = 0;
    let mut worst = 0.0f64;
    for ((_, _, _, m), printed) in reference_rows().iter().zip(PRINTED) {
        for (v, want) in [0.90, 0.95, 0.99].into_iter().zip(printed) {
            let q = m.quantile(v).unwrap();
            let gap = (q - want).abs();
            worst = worst.max(gap);
            if gap <= 0.005 {
                within += 1;
            }
            if ((q * 100.0).trunc() / 100.0 - want).abs() < 1e-9 {
                truncated += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Outcome::check(
        within == 48 && elapsed < Duration::from_secs(5),
        format!(
            "{within}/48 within 0.005 (worst {worst:.4}); {truncated}/48 equal the value truncated to 2 decimals; {:.3} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn g0_closed_form() -> Outcome {
    let mut draw = Draw::new(0x90);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (a, b, c, d) = (
            draw.uniform(0.2, 8.0),
            draw.uniform(0.2, 5.0),
            draw.uniform(0.1, 5.0),
            draw.uniform(-2.0, 5.0),
        );
        let v = draw.uniform(0.0, 1.0);
        let m = Ebxii::new(a, GSpec::g0(b, c, d).unwrap()).unwrap();
        let closed = ((1.0 - v).powf(-1.0 / a) - 1.0).powf(1.0 / b) / c - d;
        worst = worst.max(rel_err(m.quantile(v).unwrap(), closed));
    }
    Outcome::check(
        worst <= 1e-9,
        format!("1000 cases, worst error {worst:.2e}"),
    )
}

/// Model draws clear of the support edge so difference steps stay inside.
fn fd_data(theta: &ParamVector, seed: u64) -> Vec<f64> {
    let m = theta.to_dist(Guard::Scan).unwrap();
    let lb = m.support_lb();
    m.sample(200, seed, false)
        .unwrap()
        .into_iter()
        .filter(|x| x - lb > 0.05)
        .take(50)
        .collect()
}

fn derivatives() -> Outcome {
    const CASES: usize = 100;
    let mut worst_score = 0.0f64;
    let mut worst_hess = 0.0f64;
    for variant in Variant::ALL {
        let mut draw = Draw::new(0xB0 + variant as u64);
        for case in 0..CASES {
            let theta = random_theta(variant, &mut draw);
            let data = fd_data(&theta, case as u64);
            let ll = |t: &[f64]| loglik(&ParamVector::new(variant, t).unwrap(), &data).unwrap();
            let fd = central_gradient(ll, theta.values(), 1e-6);
            for (g, f) in score(&theta, &data).unwrap().iter().zip(&fd) {
                worst_score = worst_score.max(rel_err(*g, *f));
            }
            let h = hessian(&theta, &data).unwrap();
            let jac = central_jacobian(
                |t| score(&ParamVector::new(variant, t).unwrap(), &data).unwrap(),
                theta.values(),
                1e-6,
            );
            for (i, row) in jac.iter().enumerate() {
                for (j, fd) in row.iter().enumerate() {
                    worst_hess = worst_hess.max(rel_err(h[(i, j)], *fd));
                }
            }
        }
    }
    Outcome::check(
        worst_score <= 1e-6 && worst_hess <= 1e-4,
        format!(
            "{CASES} cases per variant; worst score error {worst_score:.2e}, Hessian {worst_hess:.2e}"
        ),
    )
}

fn tail_realization() -> Outcome {
    let x = 1e8f64;
    let mut rows = Vec::new();
    for variant in Variant::ALL {
        for (b, c) in BC {
            let g = match variant {
                Variant::G2 => GSpec::g2(b, c, 1.5, 1.0, 0.0).unwrap(),
                v => reference_g(v, b, c),
            };
            let m = Ebxii::new(3.0, g).unwrap();
            let want = m.tail_index();
            let off = |x: f64| (-m.log_sf(x) / x.ln() - want).abs() / want;
            rows.push((variant, b, c, off(x), off(1e300)));
        }
    }
    let bad: Vec<String> = rows
        .iter()
        .filter(|r| r.3 > 0.05)
        .map(|(v, b, c, e, _)| format!("{v} b={b} c={c} off {:.1}%", 100.0 * e))
        .collect();
    let worst = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let worst_far = rows.iter().map(|r| r.4).fold(0.0, f64::max);
    let m = Ebxii::new(3.0, reference_g(Variant::G2, 0.8, 1.0)).unwrap();
    let h = m.hazard(1e6).unwrap();
    let hazard_ok = (h - 3.0).abs() <= 0.03;
    let mut detail = format!(
        "{}/16 finite-index members within 5% at x=1e8 (worst {:.1}%, {:.1}% at x=1e300); g2 p=1 hazard(1e6) = {h:.5}",
        16 - bad.len(),
        100.0 * worst,
        100.0 * worst_far
    );
    if !bad.is_empty() {
        detail.push_str(&format!("; outside: {}", bad.join(", ")));
    }
    Outcome::check(bad.is_empty() && hazard_ok, detail)
}

fn strengths_fit() -> Outcome {
    let series = match data::strengths() {
        Ok(s) => s,
        Err(e) => return Outcome::skip(format!("strengths data unavailable: {e}")),
    };
    let map = TieMap::builder(Variant::G0)
        .fix(ParamName::D, 1.0)
        .build()
        .unwrap();
    let res = match fit(&map, &series.values, &FitOptions::default()) {
        Ok(r) => r,
        Err(e) => return Outcome::check(false, format!("fit failed: {e}")),
    };
    let nll = res.neg_loglik;
    let a = aic(res.w(), nll);
    Outcome::check(
        res.converged && (nll - 12.70).abs() <= 0.05 && (a - 31.41).abs() <= 0.1,
        format!(
            "n = {}, -l = {nll:.3} (target 12.70), AIC = {a:.3} (target 31.41), estimates {:?}",
            res.n, res.free_estimates
        ),
    )
}

fn roller() -> Outcome {
    let published = match report::read_published(data::bundled_dir().join("roller_published.csv")) {
        Ok(p) => p,
        Err(e) => return Outcome::check(false, format!("published rows: {e}")),
    };
    let mut rows: Vec<_> = published.into_iter().map(|p| p.summary).collect();
    let mut notes = Vec::new();
    let mut fit_ok = None;
    match data::roller_path() {
        Some(path) => {
            let mut req = FitRequest::new(Variant::G1, path);
            req.reflect = Some(6.0);
            req.fixes = vec![
                (ParamName::A, 1.0),
                (ParamName::D, 2.0),
                (ParamName::Eps, 2.0),
            ];
            req.ties = vec![syntax::parse_tie("c=p").unwrap()];
            match run_fit(&req) {
                Ok(out) => {
                    let s = out.report.summary();
                    let ok = s.n == 1150
                        && (s.neg_loglik - 1058.08).abs() <= 0.5
                        && (s.aic - 2120.16).abs() <= 1.0
                        && (s.bic - 2130.26).abs() <= 1.0;
                    notes.push(format!(
                        "fit n = {}, -l = {:.2}, AIC = {:.2}, BIC = {:.2}",
                        s.n, s.neg_loglik, s.aic, s.bic
                    ));
                    rows.retain(|r| r.label != s.label);
                    rows.push(s);
                    fit_ok = Some(ok);
                }
                Err(e) => {
                    notes.push(format!("fit failed: {e}"));
                    fit_ok = Some(false);
                }
            }
        }
        None => notes.push("roller heights not present, fit half skipped".into()),
    }
    let table = compare(&rows, Criterion::Bic);
    let best = table.best().map(|r| r.label.clone()).unwrap_or_default();
    let compare_ok = best == "EBXIID (g1)";
    notes.push(format!(
        "best by BIC among {} rows: {best}",
        table.rows.len()
    ));
    let detail = notes.join("; ");
    match fit_ok {
        None if compare_ok => Outcome::skip(detail),
        None => Outcome::check(false, detail),
        Some(ok) => Outcome::check(ok && compare_ok, detail),
    }
}

fn study_run() -> Outcome {
    let path = data::bundled_dir().join("recovery.conf");
    let scenarios = match config::load_scenarios(&path, 20_240_501) {
        Ok(s) => s,
        Err(e) => return Outcome::check(false, format!("scenario file: {e}")),
    };
    let start = Instant::now();
    let rep = study::run_all(&scenarios, 0);
    let elapsed = start.elapsed();
    let mut worst_z = 0.0f64;
    let mut outside = Vec::new();
    let mut failures = 0;
    for row in &rep.rows {
        failures += row.failures;
        for (k, sem) in row.se_of_mean().iter().enumerate() {
            let z = (row.mean_estimate[k] - row.truth[k]).abs() / sem;
            worst_z = worst_z.max(z);
            if !(z <= 3.0) {
                outside.push(format!(
                    "{} n={} {}",
                    row.scenario, row.n, row.free_names[k]
                ));
            }
        }
    }
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for small in rep.rows.iter().filter(|r| r.n == 1000) {
        let Some(big) = rep
            .rows
            .iter()
            .find(|r| r.n == 10_000 && r.scenario == small.scenario)
        else {
            continue;
        };
        for (s, b) in small.mean_se.iter().zip(&big.mean_se) {
            lo = lo.min(s / b);
            hi = hi.max(s / b);
        }
    }
    let ratio_ok = lo >= 2.5 && hi <= 4.0;
    let time_ok = elapsed < Duration::from_secs(600);
    let mut detail = format!(
        "{} cells, worst |mean - truth| = {worst_z:.2} SEM, SE ratio in [{lo:.3}, {hi:.3}], {failures} failed replications, {:.0} s",
        rep.rows.len(),
        elapsed.as_secs_f64()
    );
    if !outside.is_empty() {
        detail.push_str(&format!("; outside 3 SEM: {}", outside.join(", ")));
    }
    Outcome::check(
        outside.is_empty() && ratio_ok && time_ok && rep.rows.len() == 24,
        detail,
    )
}

fn sampler() -> Outcome {
    let crit = 1.63 / 100.0;
    let mut worst = 0.0f64;
    for (_, _, _, m) in reference_rows() {
        let xs = m.sample(10_000, 42, false).unwrap();
        worst = worst.max(ks_statistic(&xs, |x| m.cdf(x)));
    }
    Outcome::check(
        worst < crit,
        format!("16 members, n = 10000, worst D = {worst:.5} (critical {crit:.4})"),
    )
}

fn member() -> impl Strategy<Value = Option<Ebxii>> {
    (
        prop::sample::select(Variant::ALL.to_vec()),
        0.3f64..6.0,
        0.3f64..3.0,
        0.2f64..4.0,
        0.0f64..4.0,
        0.3f64..2.5,
        0.3f64..2.5,
    )
        .prop_map(|(variant, a, b, c, d, eps, p)| {
            let d = if variant == Variant::G0 { d } else { 1.0 + d };
            let all = [a, b, c, d, eps, p];
            let theta = ParamVector::new(variant, &all[..variant.arity()]).unwrap();
            theta.to_dist(Guard::Scan).ok().filter(|m| m.is_proper())
        })
}

fn property<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn properties() -> Outcome {
    let v = 1e-6f64..0.999_999;
    let results = [
        (
            "cdf monotone",
            property(256, (member(), v.clone(), v.clone()), |(m, v1, v2)| {
                let Some(m) = m else { return Ok(()) };
                let x1 = m.quantile(v1.min(v2)).unwrap();
                let x2 = m.quantile(v1.max(v2)).unwrap();
                prop_assert!(x1 <= x2 && m.cdf(x1) <= m.cdf(x2));
                Ok(())
            }),
        ),
        (
            "pdf = hazard * sf",
            property(256, (member(), 1e-3f64..0.999), |(m, v)| {
                let Some(m) = m else { return Ok(()) };
                let x = m.quantile(v).unwrap();
                let pdf = m.pdf(x).unwrap();
                let other = m.hazard(x).unwrap() * m.sf(x);
                prop_assert!((pdf - other).abs() <= 1e-12 * pdf.abs());
                Ok(())
            }),
        ),
        (
            "quantile round trip",
            property(256, (member(), v.clone()), |(m, v)| {
                let Some(m) = m else { return Ok(()) };
                let x = m.quantile(v).unwrap();
                prop_assert!((m.cdf(x) - v).abs() <= 1e-9);
                Ok(())
            }),
        ),
        (
            "normalization",
            property(48, member(), |m| {
                let Some(m) = m else { return Ok(()) };
                prop_assert!((total_mass(&m, 1e-10) - 1.0).abs() < 1e-6);
                Ok(())
            }),
        ),
        (
            "mode dominance",
            property(48, member(), |m| {
                let Some(m) = m else { return Ok(()) };
                let mode = m.mode();
                let lb = m.support_lb();
                let hi = m.quantile(0.999).unwrap();
                let top = (1..=10_000)
                    .map(|k| m.pdf(lb + (hi - lb) * k as f64 / 10_000.0).unwrap())
                    .fold(0.0, f64::max);
                let at = if mode.at_boundary {
                    [1e-300, 1e-9]
                        .iter()
                        .map(|t| m.pdf(lb + t).unwrap_or(0.0))
                        .fold(0.0, f64::max)
                } else {
                    m.pdf(mode.x_m).unwrap()
                };
                prop_assert!(at >= top * (1.0 - 1e-9));
                Ok(())
            }),
        ),
        (
            "BIC - AIC identity",
            property(
                256,
                (0usize..20, -1e4f64..1e4, 1usize..100_000),
                |(w, nll, n)| {
                    let gap = bic(w, nll, n) - aic(w, nll);
                    let want = w as f64 * ((n as f64).ln() - 2.0);
                    prop_assert!((gap - want).abs() <= 1e-9 * (1.0 + nll.abs()));
                    Ok(())
                },
            ),
        ),
    ];
    let failed: Vec<String> = results
        .iter()
        .filter_map(|(name, r)| r.as_ref().err().map(|e| format!("{name}: {e}")))
        .collect();
    Outcome::check(
        failed.is_empty(),
        if failed.is_empty() {
            format!("{} properties green", results.len())
        } else {
            failed.join("; ")
        },
    )
}

fn main() {
    run(1, "reference quantiles", quantile_table);
    run(2, "g0 closed-form quantile", g0_closed_form);
    run(3, "score and Hessian vs finite differences", derivatives);
    run(4, "tail-index realization", tail_realization);
    run(5, "strengths g0 fit", strengths_fit);
    run(6, "roller fit and comparison", roller);
    run(7, "recovery study", study_run);
    run(8, "sampler KS", sampler);
    run(9, "property suite", properties);
}
