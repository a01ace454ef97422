//! Independent numerical oracles used by the test suites.
//!
//! Nothing here shares code with the analytic paths it checks: derivatives
//! are central differences, integrals are double-exponential quadrature and
//! the likelihood oracle differences the distribution function.

use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use crate::dist::Ebxii;
use crate::gfun::{GSpec, Variant};
use crate::math::{exp, fabs, log};

/// `|got - want| / max(|want|, 1)`.
pub fn rel_err(got: f64, want: f64) -> f64 {
    fabs(got - want) / fabs(want).max(1.0)
}

/// Central-difference gradient with step `rel_h * (1 + |x_i|)`.
pub fn central_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64], rel_h: f64) -> Vec<f64> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = rel_h * (1.0 + fabs(x[i]));
            xp[i] = x[i] + h;
            let fp = f(&xp);
            xp[i] = x[i] - h;
            let fm = f(&xp);
            xp[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Central-difference Jacobian of a vector function; row `i` holds the
/// derivatives of every output with respect to `x_i`.
pub fn central_jacobian(g: impl Fn(&[f64]) -> Vec<f64>, x: &[f64], rel_h: f64) -> Vec<Vec<f64>> {
    let mut xp = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = rel_h * (1.0 + fabs(x[i]));
            xp[i] = x[i] + h;
            let gp = g(&xp);
            xp[i] = x[i] - h;
            let gm = g(&xp);
            xp[i] = x[i];
            gp.iter()
                .zip(&gm)
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect()
        })
        .collect()
}

/// `int_lb^inf f(x) dx` by exp-sinh quadrature with the substitution
/// `x = lb + scale * exp(pi/2 sinh t)`. The integrand receives both `x` and
/// the offset `x - lb`, so points crushed onto `lb` by rounding can be
/// handled by the caller. Levels are halved until successive estimates agree
/// to `tol` (relative).
pub fn integrate_half_line(f: impl Fn(f64, f64) -> f64, lb: f64, scale: f64, tol: f64) -> f64 {
    const T_MAX: f64 = 6.5;
    let node = |t: f64| -> f64 {
        let (sh, ch) = (libm::sinh(t), libm::cosh(t));
        let off = scale * exp(FRAC_PI_2 * sh);
        let weight = FRAC_PI_2 * ch * off;
        if !(off > 0.0) || !off.is_finite() || !weight.is_finite() {
            return 0.0;
        }
        let v = f(lb + off, off) * weight;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = 0.0;
    let steps = (T_MAX / h) as i64;
    for k in -steps..=steps {
        sum += node(k as f64 * h);
    }
    let mut estimate = sum * h;
    for _level in 0..10 {
        h *= 0.5;
        let steps = (T_MAX / h) as i64;
        let mut k = -steps + if steps % 2 == 0 { 1 } else { 0 };
        while k <= steps {
            sum += node(k as f64 * h);
            k += 2;
        }
        let next = sum * h;
        if fabs(next - estimate) <= tol * fabs(next).max(1e-300) {
            return next;
        }
        estimate = next;
    }
    estimate
}

/// Integral of the density over the support, plus the lower-mass deficit.
///
/// `g0` is a location family in `d`, so its density is integrated at `d = 0`
/// where offsets from the support edge keep full precision.
pub fn total_mass(dist: &Ebxii, tol: f64) -> f64 {
    let g = dist.g();
    let shifted = match g.variant() {
        Variant::G0 => Ebxii::new(dist.a(), GSpec::g0(g.b(), g.c(), 0.0).unwrap()).unwrap(),
        _ => *dist,
    };
    let scale = match shifted.quantile(0.5) {
        Ok(m) if m > 0.0 => m,
        _ => 1.0,
    };
    let body = integrate_half_line(|_x, off| shifted.pdf(off).unwrap_or(0.0), 0.0, scale, tol);
    body + dist.lower_mass_deficit()
}

/// Kolmogorov-Smirnov distance between a sample and a distribution function.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs = sample.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// `sum_k ln((F(x_k + h) - F(x_k - h)) / 2h)`, using the survival function in
/// the upper half for accuracy.
pub fn loglik_from_cdf(dist: &Ebxii, data: &[f64], h: f64) -> f64 {
    data.iter()
        .map(|&x| {
            let diff = if dist.cdf(x) < 0.5 {
                dist.cdf(x + h) - dist.cdf(x - h)
            } else {
                dist.sf(x - h) - dist.sf(x + h)
            };
            log(diff / (2.0 * h))
        })
        .sum()
}
