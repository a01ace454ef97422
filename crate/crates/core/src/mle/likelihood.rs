//! Log-likelihood with analytic first and second derivatives.
//!
//! Per observation, with `u = ln g`, `w = (ln g)'` and `C = g / (1 + g)`:
//!
//! ```text
//! l      = ln a + ln w + u - (a + 1) ln(1 + g)
//! dl/da  = 1/a - ln(1 + g)
//! dl/dt  = u_t (1 - (a + 1) C) + w_t / w
//! ```
//!
//! for every generator parameter `t`, and the second derivatives follow by
//! differentiating once more (`dC/dt = C (1 - C) u_t`).

use alloc::vec::Vec;

use super::linalg::Matrix;
use super::params::ParamVector;
use crate::error::{Error, Result};
use crate::gfun::{GSpec, Guard, NG};
use crate::math::{log, sigmoid, softplus};

#[derive(Debug, Clone)]
pub(crate) struct Evaluation {
    pub loglik: f64,
    pub grad: [f64; 6],
    pub hess: [[f64; 6]; 6],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Order {
    Value,
    Gradient,
    Hessian,
}

fn check_point(g: &GSpec, x: f64) -> Result<()> {
    if g.in_domain(x) {
        Ok(())
    } else {
        Err(Error::Domain {
            x,
            lower_bound: g.support_lb(),
        })
    }
}

/// Sum over the data of the log density and, as requested, its derivatives
/// with respect to all six parameters (unused ones have zero rows).
///
/// A point where `g'` vanishes gives `loglik = -inf` at `Order::Value` and a
/// [`Error::ConditionViolated`] otherwise.
pub(crate) fn evaluate(theta: &ParamVector, data: &[f64], order: Order) -> Result<Evaluation> {
    let a = theta.all()[0];
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "a",
            value: a,
            reason: "must be positive and finite",
        });
    }
    let g = theta.gspec(Guard::Skip)?;
    let mut ev = Evaluation {
        loglik: 0.0,
        grad: [0.0; 6],
        hess: [[0.0; 6]; 6],
    };
    let ln_a = log(a);
    let n = data.len() as f64;

    if order == Order::Value {
        for &x in data {
            check_point(&g, x)?;
            let u = g.u(x);
            let w = g.w(x);
            if !(w > 0.0) {
                ev.loglik = f64::NEG_INFINITY;
                return Ok(ev);
            }
            ev.loglik += log(w) - softplus(-u) - a * softplus(u);
        }
        ev.loglik += n * ln_a;
        return Ok(ev);
    }

    let second = order == Order::Hessian;
    let mut sum_c_du = [0.0; NG];
    for &x in data {
        check_point(&g, x)?;
        let j = g.jet(x, second);
        if !(j.w > 0.0) {
            return Err(Error::ConditionViolated { x });
        }
        let s = softplus(j.u);
        let cf = sigmoid(j.u);
        let beta = 1.0 - (a + 1.0) * cf;
        let inv_w = 1.0 / j.w;
        ev.loglik += log(j.w) - softplus(-j.u) - a * s;
        ev.grad[0] -= s;
        for t in 0..NG {
            ev.grad[t + 1] += j.du[t] * beta + j.dw[t] * inv_w;
        }
        if second {
            let kappa = (a + 1.0) * cf * (1.0 - cf);
            for t in 0..NG {
                sum_c_du[t] += cf * j.du[t];
                for r in t..NG {
                    ev.hess[t + 1][r + 1] += j.d2u[t][r] * beta - kappa * j.du[t] * j.du[r]
                        + j.d2w[t][r] * inv_w
                        - j.dw[t] * j.dw[r] * inv_w * inv_w;
                }
            }
        }
    }
    ev.loglik += n * ln_a;
    ev.grad[0] += n / a;
    if second {
        ev.hess[0][0] = -n / (a * a);
        for t in 0..NG {
            ev.hess[0][t + 1] = -sum_c_du[t];
        }
        for i in 0..6 {
            for k in 0..i {
                ev.hess[i][k] = ev.hess[k][i];
            }
        }
    }
    Ok(ev)
}

/// `l(theta) = sum_k ln f(x_k)`; `-inf` when some point has zero density.
pub fn loglik(theta: &ParamVector, data: &[f64]) -> Result<f64> {
    Ok(evaluate(theta, data, Order::Value)?.loglik)
}

/// Gradient of [`loglik`] over the variant's parameters `a, b, c, d[, eps[, p]]`.
pub fn score(theta: &ParamVector, data: &[f64]) -> Result<Vec<f64>> {
    let ev = evaluate(theta, data, Order::Gradient)?;
    Ok(ev.grad[..theta.variant().arity()].to_vec())
}

/// Symmetric matrix of second partials of [`loglik`].
pub fn hessian(theta: &ParamVector, data: &[f64]) -> Result<Matrix> {
    let ev = evaluate(theta, data, Order::Hessian)?;
    Ok(restrict(&ev.hess, theta.variant().arity()))
}

pub(crate) fn restrict(h: &[[f64; 6]; 6], k: usize) -> Matrix {
    let mut m = Matrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = h[i][j];
        }
    }
    m
}
