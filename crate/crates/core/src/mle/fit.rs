use alloc::format;
use alloc::vec::Vec;

use super::likelihood::{evaluate, restrict, Order};
use super::linalg::Matrix;
use super::optim::{self, Objective, Settings};
use super::params::{ParamName, ParamVector, Tie, TieMap};
use crate::error::{Error, Result};
use crate::gfun::{Guard, Variant};
use crate::math::sqrt;
use crate::normal_quantile;

/// Box constraints on the free parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    /// Model-parameter bounds mapped through the tie map.
    ///
    /// Model bounds are `a, b, c` in `[1e-6, 1e6]`, `eps, p` in `[0, 1e3]`,
    /// `d` in `[1, 1e6]` for g1-g3 and `[1e-9 - min(data), 1e6]` for g0.
    pub fn default_for(map: &TieMap, data: &[f64]) -> Self {
        let model = model_bounds(map.variant(), data);
        let k = map.free_count();
        let mut lower = alloc::vec![f64::NEG_INFINITY; k];
        let mut upper = alloc::vec![f64::INFINITY; k];
        for (j, t) in map.entries().iter().enumerate() {
            if let Tie::Linked { free, multiplier } = *t {
                let (a, b) = (model[j].0 / multiplier, model[j].1 / multiplier);
                let (lo, hi) = if multiplier > 0.0 { (a, b) } else { (b, a) };
                lower[free] = lower[free].max(lo);
                upper[free] = upper[free].min(hi);
            }
        }
        Self { lower, upper }
    }

    fn check(&self, k: usize) -> Result<()> {
        if self.lower.len() != k || self.upper.len() != k {
            return Err(Error::Arity {
                expected: k,
                got: self.lower.len().min(self.upper.len()),
            });
        }
        for i in 0..k {
            if !(self.lower[i] <= self.upper[i]) {
                return Err(Error::InvalidInit(format!(
                    "empty bound interval [{}, {}] for free parameter {i}",
                    self.lower[i], self.upper[i]
                )));
            }
        }
        Ok(())
    }
}

fn model_bounds(variant: Variant, data: &[f64]) -> [(f64, f64); 6] {
    let min = data.iter().copied().fold(f64::INFINITY, f64::min);
    let d_lo = if variant == Variant::G0 {
        1e-9 - min
    } else {
        1.0
    };
    [
        (1e-6, 1e6),
        (1e-6, 1e6),
        (1e-6, 1e6),
        (d_lo, 1e6),
        (0.0, 1e3),
        (0.0, 1e3),
    ]
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Default starting point in the free space.
///
/// `a = b = eps = p = 1`, `d` at its lower bound (g0) or half a unit above
/// it (g1-g3, where `d = 1` with `eps = 1` leaves an atom at the origin),
/// and `c = 1 / median(data - lb)`. Free values are clamped into `bounds`.
pub fn default_init(map: &TieMap, data: &[f64], bounds: &Bounds) -> Vec<f64> {
    let variant = map.variant();
    let model = model_bounds(variant, data);
    let d = match map.entries()[ParamName::D.index()] {
        Tie::Fixed(v) => v,
        Tie::Linked { .. } if variant == Variant::G0 => model[3].0,
        Tie::Linked { .. } => model[3].0 + 0.5,
    };
    let lb = if variant == Variant::G0 { -d } else { 0.0 };
    let mut shifted: Vec<f64> = data.iter().map(|x| x - lb).collect();
    let med = if shifted.is_empty() {
        1.0
    } else {
        median(&mut shifted)
    };
    let c = if med > 0.0 && med.is_finite() {
        1.0 / med
    } else {
        1.0
    };
    let values = [1.0, 1.0, c, d, 1.0, 1.0];
    let theta = ParamVector::new(variant, &values[..variant.arity()]).expect("arity matches");
    let mut phi = map.project(&theta);
    for (k, v) in phi.iter_mut().enumerate() {
        *v = v.max(bounds.lower[k]).min(bounds.upper[k]);
    }
    phi
}

#[derive(Debug, Clone)]
pub struct FitOptions {
    /// Starting free vector; [`default_init`] when `None`.
    pub init: Option<Vec<f64>>,
    /// Free-space bounds; [`Bounds::default_for`] when `None`.
    pub bounds: Option<Bounds>,
    /// Permit members with an atom at the support edge.
    pub allow_defective: bool,
    pub max_iter: usize,
    /// Projected-gradient tolerance (infinity norm).
    pub gtol: f64,
    /// Relative objective-change tolerance.
    pub ftol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            init: None,
            bounds: None,
            allow_defective: false,
            max_iter: 500,
            gtol: 1e-6,
            ftol: 1e-10,
        }
    }
}

/// Outcome of a maximum-likelihood fit.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub ties: TieMap,
    pub theta_hat: ParamVector,
    pub free_names: Vec<&'static str>,
    pub free_estimates: Vec<f64>,
    /// `None` when the observed information is singular.
    pub std_errors: Option<Vec<f64>>,
    /// `-l` at the estimate.
    pub neg_loglik: f64,
    /// `-l` at the starting point.
    pub init_neg_loglik: f64,
    /// Negative free-space Hessian of `l` at the estimate.
    pub observed_info: Matrix,
    /// Inverse (or pseudo-inverse when singular) of `observed_info`.
    pub covariance: Matrix,
    pub singular_information: bool,
    pub converged: bool,
    pub iterations: usize,
    /// Infinity norm of the projected free-space gradient at the estimate.
    pub projected_gradient_norm: f64,
    pub n: usize,
}

/// `estimate +/- z * se`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
}

impl FitResult {
    pub fn variant(&self) -> Variant {
        self.ties.variant()
    }

    /// Number of free parameters.
    pub fn w(&self) -> usize {
        self.free_estimates.len()
    }

    pub fn ci(&self, tau: f64) -> Result<Vec<Interval>> {
        confidence_intervals(self, tau)
    }
}

/// Two-sided `(1 - tau)` Wald intervals on the free parameters.
pub fn confidence_intervals(fit: &FitResult, tau: f64) -> Result<Vec<Interval>> {
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::InvalidProbability(tau));
    }
    let se = fit
        .std_errors
        .as_ref()
        .ok_or(Error::MissingStandardErrors)?;
    let z = normal_quantile(1.0 - 0.5 * tau);
    Ok(fit
        .free_estimates
        .iter()
        .zip(se)
        .map(|(&e, &s)| Interval {
            estimate: e,
            lower: e - z * s,
            upper: e + z * s,
        })
        .collect())
}

struct NegLogLik<'a> {
    map: &'a TieMap,
    data: &'a [f64],
    allow_defective: bool,
}

impl NegLogLik<'_> {
    fn theta(&self, phi: &[f64]) -> Option<ParamVector> {
        let theta = self.map.expand(phi).ok()?;
        let dist = theta.to_dist(Guard::Scan).ok()?;
        if !self.allow_defective && dist.lower_mass_deficit() > 0.0 {
            return None;
        }
        Some(theta)
    }
}

impl Objective for NegLogLik<'_> {
    fn value_grad(&mut self, phi: &[f64]) -> Option<(f64, Vec<f64>)> {
        let theta = self.theta(phi)?;
        let ev = evaluate(&theta, self.data, Order::Gradient).ok()?;
        let g = self.map.reduce_grad(&ev.grad);
        Some((-ev.loglik, g.into_iter().map(|v| -v).collect()))
    }

    fn hessian(&mut self, phi: &[f64]) -> Option<Matrix> {
        let theta = self.theta(phi)?;
        let ev = evaluate(&theta, self.data, Order::Hessian).ok()?;
        let h = restrict(&ev.hess, self.map.variant().arity());
        Some(self.map.reduce_hess(&h).scaled(-1.0))
    }
}

/// Maximum-likelihood fit of the free parameters of `map` to `data`.
///
/// Minimizes `-l` by projected L-BFGS inside the bounds, then polishes with
/// Newton steps using the analytic Hessian. Points giving an invalid or
/// (unless allowed) defective member score a large finite sentinel, so the
/// line search backs away from them. Non-convergence is reported through
/// `converged`, not as an error.
pub fn fit(map: &TieMap, data: &[f64], opts: &FitOptions) -> Result<FitResult> {
    if data.is_empty() {
        return Err(Error::EmptyData);
    }
    if let Some(x) = data.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidInit(format!("data value {x} is not finite")));
    }
    let k = map.free_count();
    let bounds = match &opts.bounds {
        Some(b) => b.clone(),
        None => Bounds::default_for(map, data),
    };
    bounds.check(k)?;
    let init = match &opts.init {
        Some(v) => {
            if v.len() != k {
                return Err(Error::Arity {
                    expected: k,
                    got: v.len(),
                });
            }
            for i in 0..k {
                if !(v[i] >= bounds.lower[i] && v[i] <= bounds.upper[i]) {
                    return Err(Error::InvalidInit(format!(
                        "{} = {} is outside [{}, {}]",
                        map.free_label(i),
                        v[i],
                        bounds.lower[i],
                        bounds.upper[i]
                    )));
                }
            }
            v.clone()
        }
        None => default_init(map, data, &bounds),
    };

    let theta0 = map.expand(&init)?;
    let dist0 = theta0.to_dist(Guard::Scan)?;
    let deficit = dist0.lower_mass_deficit();
    if deficit > 0.0 && !opts.allow_defective {
        return Err(Error::Defective { deficit });
    }
    let mut obj = NegLogLik {
        map,
        data,
        allow_defective: opts.allow_defective,
    };
    let Some((f0, _)) = obj.value_grad(&init) else {
        return Err(Error::InvalidInit(format!(
            "log-likelihood is not finite at the starting point {}",
            describe_theta(&theta0)
        )));
    };

    let settings = Settings {
        max_iter: opts.max_iter,
        gtol: opts.gtol,
        ftol: opts.ftol,
        ..Settings::default()
    };
    let out = optim::minimize(&mut obj, &init, &bounds.lower, &bounds.upper, &settings);

    let theta_hat = map.expand(&out.x)?;
    let observed_info = obj.hessian(&out.x).unwrap_or_else(|| {
        let mut m = Matrix::zeros(k);
        for i in 0..k {
            m[(i, i)] = f64::NAN;
        }
        m
    });
    let (covariance, singular) = match observed_info.spd_inverse() {
        Some(c) => (c, false),
        None => (observed_info.pseudo_inverse(), true),
    };
    let std_errors = if singular {
        None
    } else {
        Some(covariance.diagonal().into_iter().map(sqrt).collect())
    };

    Ok(FitResult {
        ties: map.clone(),
        theta_hat,
        free_names: map.free_labels(),
        free_estimates: out.x,
        std_errors,
        neg_loglik: out.f,
        init_neg_loglik: f0,
        observed_info,
        covariance,
        singular_information: singular,
        converged: out.converged,
        iterations: out.iterations,
        projected_gradient_norm: out.pg_norm,
        n: data.len(),
    })
}

fn describe_theta(theta: &ParamVector) -> alloc::string::String {
    let parts: Vec<_> = ParamName::for_variant(theta.variant())
        .iter()
        .map(|n| format!("{n}={}", theta.get(*n)))
        .collect();
    parts.join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Ebxii;
    use crate::gfun::GSpec;

    #[test]
    fn interval_arithmetic() {
        let map = TieMap::identity(Variant::G0);
        let fake = FitResult {
            ties: map.clone(),
            theta_hat: ParamVector::new(Variant::G0, &[1.0, 1.0, 1.0, 1.0]).unwrap(),
            free_names: map.free_labels(),
            free_estimates: alloc::vec![0.788, 2.0, 3.0, 4.0],
            std_errors: Some(alloc::vec![0.006, 0.0, 1.0, 1.0]),
            neg_loglik: 0.0,
            init_neg_loglik: 0.0,
            observed_info: Matrix::identity(4),
            covariance: Matrix::identity(4),
            singular_information: false,
            converged: true,
            iterations: 0,
            projected_gradient_norm: 0.0,
            n: 1,
        };
        let ci = confidence_intervals(&fake, 0.05).unwrap();
        assert!((ci[0].lower - 0.776).abs() < 5e-4 && (ci[0].upper - 0.800).abs() < 5e-4);
        assert!((ci[0].upper - ci[0].estimate - 1.959964 * 0.006).abs() < 1e-9);
        assert_eq!((ci[1].lower, ci[1].upper), (2.0, 2.0));
        let full = confidence_intervals(&fake, 1.0).unwrap();
        assert!(full
            .iter()
            .all(|i| i.lower == i.estimate && i.upper == i.estimate));
        assert!(confidence_intervals(&fake, 0.0).is_err());
        let mut no_se = fake.clone();
        no_se.std_errors = None;
        assert_eq!(
            confidence_intervals(&no_se, 0.05),
            Err(Error::MissingStandardErrors)
        );
    }

    #[test]
    fn default_bounds_follow_ties() {
        let map = TieMap::builder(Variant::G1)
            .tie(ParamName::D, 0.5, ParamName::B)
            .build()
            .unwrap();
        let b = Bounds::default_for(&map, &[1.0, 2.0]);
        // b must satisfy both b in [1e-6, 1e6] and b/2 in [1, 1e6]
        assert_eq!(b.lower[1], 2.0);
        assert_eq!(b.upper[1], 1e6);
        let g0 = Bounds::default_for(&TieMap::identity(Variant::G0), &[0.5, 2.0]);
        assert!((g0.lower[3] + 0.5).abs() < 1e-8);
    }

    #[test]
    fn refuses_bad_inputs() {
        let map = TieMap::identity(Variant::G0);
        assert_eq!(
            fit(&map, &[], &FitOptions::default()).unwrap_err(),
            Error::EmptyData
        );
        let opts = FitOptions {
            init: Some(alloc::vec![1.0, 1.0, 1.0, -10.0]),
            ..FitOptions::default()
        };
        assert!(matches!(
            fit(&map, &[1.0, 2.0], &opts),
            Err(Error::InvalidInit(_))
        ));
    }

    #[test]
    fn recovers_g0_parameters() {
        let truth = Ebxii::new(3.0, GSpec::g0(1.2, 0.5, 1.5).unwrap()).unwrap();
        let data = truth.sample(4000, 11, false).unwrap();
        let map = TieMap::builder(Variant::G0)
            .fix(ParamName::A, 3.0)
            .fix(ParamName::D, 1.5)
            .build()
            .unwrap();
        let r = fit(&map, &data, &FitOptions::default()).unwrap();
        assert!(r.converged);
        assert!(r.neg_loglik <= r.init_neg_loglik);
        let se = r.std_errors.clone().unwrap();
        assert!((r.free_estimates[0] - 1.2).abs() < 4.0 * se[0]);
        assert!((r.free_estimates[1] - 0.5).abs() < 4.0 * se[1]);
        assert!(r.projected_gradient_norm < 1e-5);
    }
}
