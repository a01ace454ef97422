//! Bound-constrained minimization: projected limited-memory BFGS followed by
//! a few projected Newton steps on the inactive set.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use super::linalg::Matrix;
use crate::math::fabs;

/// Objective value returned for points where the model is invalid.
pub(crate) const SENTINEL: f64 = 1e12;

/// Memory resets allowed after stalls with a large projected gradient.
const MAX_RESTARTS: usize = 20;

pub(crate) trait Objective {
    /// Value and gradient, or `None` at an invalid point.
    fn value_grad(&mut self, x: &[f64]) -> Option<(f64, Vec<f64>)>;
    /// Hessian of the objective, or `None` when unavailable.
    fn hessian(&mut self, x: &[f64]) -> Option<Matrix>;
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Settings {
    pub memory: usize,
    pub max_iter: usize,
    pub gtol: f64,
    pub ftol: f64,
    pub newton_steps: usize,
    /// A stop on `ftol` only counts as convergence when the projected
    /// gradient is below this.
    pub stall_gtol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iter: 500,
            gtol: 1e-6,
            ftol: 1e-10,
            newton_steps: 30,
            stall_gtol: 1e-5,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub converged: bool,
    pub pg_norm: f64,
}

fn project(x: &mut [f64], lo: &[f64], hi: &[f64]) {
    for i in 0..x.len() {
        x[i] = x[i].max(lo[i]).min(hi[i]);
    }
}

/// Components whose gradient pushes against an active bound are zeroed.
pub(crate) fn projected_gradient(x: &[f64], g: &[f64], lo: &[f64], hi: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            if (x[i] <= lo[i] && g[i] > 0.0) || (x[i] >= hi[i] && g[i] < 0.0) {
                0.0
            } else {
                g[i]
            }
        })
        .collect()
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(fabs(*x)))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn eval(obj: &mut dyn Objective, x: &[f64]) -> (f64, Vec<f64>) {
    match obj.value_grad(x) {
        Some((f, g)) if f.is_finite() && g.iter().all(|v| v.is_finite()) => (f, g),
        _ => (SENTINEL, vec![0.0; x.len()]),
    }
}

struct Step {
    x: Vec<f64>,
    f: f64,
    g: Vec<f64>,
}

/// Backtracking along the projected path `P(x + t d)` with an Armijo test.
/// Trial steps shrink by quadratic interpolation, kept within `[0.1, 0.5]`
/// of the previous step.
fn line_search(
    obj: &mut dyn Objective,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    t0: f64,
    lo: &[f64],
    hi: &[f64],
) -> Option<Step> {
    let mut t = t0;
    for _ in 0..60 {
        let mut xn: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + t * di).collect();
        project(&mut xn, lo, hi);
        let moved: Vec<f64> = xn.iter().zip(x).map(|(a, b)| a - b).collect();
        if inf_norm(&moved) == 0.0 {
            return None;
        }
        let (fnew, gnew) = eval(obj, &xn);
        let decrease = dot(g, &moved);
        if fnew < SENTINEL && fnew <= f + 1e-4 * decrease && decrease < 0.0 {
            return Some(Step {
                x: xn,
                f: fnew,
                g: gnew,
            });
        }
        // minimizer of the quadratic through f, the slope and f(t)
        let slope = decrease / t;
        let shrink = if fnew < SENTINEL && slope < 0.0 {
            let curv = fnew - f - decrease;
            if curv > 0.0 {
                (-slope * t / (2.0 * curv)).clamp(0.1, 0.5)
            } else {
                0.5
            }
        } else {
            0.1
        };
        t *= shrink;
    }
    None
}

/// L-BFGS direction from the stored pairs, restricted to free coordinates.
fn two_loop(pg: &[f64], pairs: &VecDeque<(Vec<f64>, Vec<f64>, f64)>, free: &[bool]) -> Vec<f64> {
    let mut q: Vec<f64> = pg.to_vec();
    let mut alphas = Vec::with_capacity(pairs.len());
    for (s, y, rho) in pairs.iter().rev() {
        let alpha = rho * dot(s, &q);
        for i in 0..q.len() {
            q[i] -= alpha * y[i];
        }
        alphas.push(alpha);
    }
    if let Some((s, y, _)) = pairs.back() {
        let gamma = dot(s, y) / dot(y, y);
        q.iter_mut().for_each(|v| *v *= gamma);
    }
    for ((s, y, rho), alpha) in pairs.iter().zip(alphas.into_iter().rev()) {
        let beta = rho * dot(y, &q);
        for i in 0..q.len() {
            q[i] += (alpha - beta) * s[i];
        }
    }
    q.iter()
        .zip(free)
        .map(|(v, &f)| if f { -v } else { 0.0 })
        .collect()
}

/// Minimizes `obj` over the box `[lo, hi]` starting from `x0` (projected
/// into the box first).
pub(crate) fn minimize(
    obj: &mut dyn Objective,
    x0: &[f64],
    lo: &[f64],
    hi: &[f64],
    settings: &Settings,
) -> Outcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let (mut f, mut g) = eval(obj, &x);
    let mut pairs: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut iterations = 0;
    let mut converged = false;
    let mut stalled;
    let mut restarts = 0;

    if n == 0 {
        return Outcome {
            x,
            f,
            iterations: 0,
            converged: true,
            pg_norm: 0.0,
        };
    }

    // Rounds of L-BFGS followed by a Newton polish on the inactive set. A
    // round that stalls with a large projected gradient (typically on a flat
    // ridge where the curvature pairs are stale) starts over with an empty
    // memory.
    loop {
        stalled = false;
        while iterations < settings.max_iter {
            let pg = projected_gradient(&x, &g, lo, hi);
            if inf_norm(&pg) < settings.gtol {
                converged = true;
                break;
            }
            let free: Vec<bool> = pg.iter().map(|v| *v != 0.0).collect();
            let mut d = two_loop(&pg, &pairs, &free);
            if !(dot(&d, &pg) < 0.0) {
                pairs.clear();
                d = pg.iter().map(|v| -v).collect();
            }
            let t0 = if pairs.is_empty() {
                (1.0 / inf_norm(&d)).min(1.0)
            } else {
                1.0
            };
            let step = match line_search(obj, &x, f, &g, &d, t0, lo, hi) {
                Some(s) => s,
                None if !pairs.is_empty() => {
                    pairs.clear();
                    continue;
                }
                None => break,
            };
            iterations += 1;
            let s: Vec<f64> = step.x.iter().zip(&x).map(|(a, b)| a - b).collect();
            let y: Vec<f64> = step.g.iter().zip(&g).map(|(a, b)| a - b).collect();
            let sy = dot(&s, &y);
            if sy > 1e-12 * dot(&y, &y).max(f64::MIN_POSITIVE) {
                if pairs.len() == settings.memory {
                    pairs.pop_front();
                }
                pairs.push_back((s, y, 1.0 / sy));
            } else if sy < 0.0 {
                // negative curvature: the stored pairs no longer describe
                // the local shape
                pairs.clear();
            }
            let f_old = f;
            x = step.x;
            f = step.f;
            g = step.g;
            if fabs(f_old - f) <= settings.ftol * fabs(f_old).max(fabs(f)).max(1.0) {
                stalled = true;
                break;
            }
        }

        for _ in 0..settings.newton_steps {
            let pg = projected_gradient(&x, &g, lo, hi);
            if inf_norm(&pg) < 1e-3 * settings.gtol {
                break;
            }
            let free: Vec<usize> = (0..n).filter(|&i| pg[i] != 0.0).collect();
            let Some(h) = obj.hessian(&x) else { break };
            let mut hf = Matrix::zeros(free.len());
            for (a, &i) in free.iter().enumerate() {
                for (b, &j) in free.iter().enumerate() {
                    hf[(a, b)] = h[(i, j)];
                }
            }
            let Some(l) = hf.cholesky() else { break };
            let rhs: Vec<f64> = free.iter().map(|&i| -g[i]).collect();
            let df = Matrix::cholesky_solve(&l, &rhs);
            let mut d = vec![0.0; n];
            for (a, &i) in free.iter().enumerate() {
                d[i] = df[a];
            }
            // Near the optimum the decrease drops below the rounding of `f`; a
            // full step that shrinks the projected gradient is then accepted.
            let mut xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + b).collect();
            project(&mut xn, lo, hi);
            let (fnew, gnew) = eval(obj, &xn);
            let flat = fnew < SENTINEL
                && fnew <= f + 1e-11 * fabs(f).max(1.0)
                && inf_norm(&projected_gradient(&xn, &gnew, lo, hi)) < inf_norm(&pg);
            let step = if flat {
                Step {
                    x: xn,
                    f: fnew,
                    g: gnew,
                }
            } else {
                match line_search(obj, &x, f, &g, &d, 1.0, lo, hi) {
                    Some(s) => s,
                    None => break,
                }
            };
            iterations += 1;
            x = step.x;
            f = step.f;
            g = step.g;
        }

        let pg_norm = inf_norm(&projected_gradient(&x, &g, lo, hi));
        if pg_norm < settings.gtol
            || !stalled
            || restarts == MAX_RESTARTS
            || iterations >= settings.max_iter
        {
            break;
        }
        restarts += 1;
        pairs.clear();
    }

    // A stall counts as convergence only close to a stationary point.
    let pg_norm = inf_norm(&projected_gradient(&x, &g, lo, hi));
    if pg_norm < settings.gtol || (stalled && pg_norm < settings.stall_gtol) {
        converged = true;
    }
    Outcome {
        x,
        f,
        iterations,
        converged: converged && f < SENTINEL,
        pg_norm,
    }
}
