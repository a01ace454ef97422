//! The distribution object: `F(x) = 1 - (1 + g(x))^(-a)`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::gfun::{GSpec, Variant};
use crate::math::{exp, expm1, fabs, log, log1p, log_expm1, pow, sigmoid, softplus, sqrt};
use crate::rng::UniformStream;

/// One member of the family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ebxii {
    a: f64,
    g: GSpec,
}

/// Location of the density maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeResult {
    pub x_m: f64,
    /// The maximum sits at the infimum of the support.
    pub at_boundary: bool,
}

/// Upper end of the mode search.
const MODE_X_MAX: f64 = 1e12;
const MODE_GRID: usize = 400;
const MAX_DOUBLINGS: usize = 200;
/// Smallest offset from the support edge probed by the quantile bracket.
const EDGE_FLOOR: f64 = 1e-300;

impl Ebxii {
    pub fn new(a: f64, g: GSpec) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "a",
                value: a,
                reason: "must be positive and finite",
            });
        }
        Ok(Self { a, g })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn g(&self) -> &GSpec {
        &self.g
    }

    pub fn variant(&self) -> Variant {
        self.g.variant()
    }

    pub fn support_lb(&self) -> f64 {
        self.g.support_lb()
    }

    #[inline]
    fn log_sf_from_u(&self, u: f64) -> f64 {
        -self.a * softplus(u)
    }

    /// `ln(1 - F(x))`; 0 at or below the support, `ln(1 - deficit)` for
    /// defective members.
    pub fn log_sf(&self, x: f64) -> f64 {
        if self.g.in_domain(x) {
            self.log_sf_from_u(self.g.u(x))
        } else if x <= self.support_lb() {
            self.log_sf_from_u(self.g.log_at_support_edge())
        } else {
            // Inside [lb, 1 - d] for g1-g3 built without the guard.
            f64::NAN
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        -expm1(self.log_sf(x))
    }

    pub fn sf(&self, x: f64) -> f64 {
        exp(self.log_sf(x))
    }

    /// Density `a g'(x) (1 + g(x))^(-a-1)`.
    pub fn pdf(&self, x: f64) -> Result<f64> {
        Ok(exp(self.log_pdf(x)?))
    }

    /// `ln pdf(x)`; `-inf` where `g'` vanishes or the condition fails.
    pub fn log_pdf(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        let u = self.g.u(x);
        let w = self.g.w(x);
        if !(w > 0.0) {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(log(self.a) + log(w) - softplus(-u) - self.a * softplus(u))
    }

    /// Hazard `a g'(x) / (1 + g(x))`.
    pub fn hazard(&self, x: f64) -> Result<f64> {
        self.check_support(x)?;
        let u = self.g.u(x);
        let w = self.g.w(x).max(0.0);
        Ok(self.a * w * sigmoid(u))
    }

    fn check_support(&self, x: f64) -> Result<()> {
        if self.g.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                lower_bound: self.support_lb(),
            })
        }
    }

    /// Tail index `a` times the generator's; `+inf` for lighter-than-power tails.
    pub fn tail_index(&self) -> f64 {
        self.a * self.g.tail_index()
    }

    /// `F(lb+)`: probability mass the formula leaves at the support edge.
    pub fn lower_mass_deficit(&self) -> f64 {
        let u0 = self.g.log_at_support_edge();
        if u0 == f64::NEG_INFINITY {
            0.0
        } else {
            -expm1(self.log_sf_from_u(u0))
        }
    }

    pub fn is_proper(&self) -> bool {
        self.lower_mass_deficit() == 0.0
    }

    /// Quantile `q(v)` with `F(q) = v`.
    ///
    /// `F(x) = v` is equivalent to `ln g(x) = ln(expm1(-ln(1 - v) / a))`, so the
    /// root is sought on `ln g`, which keeps full precision for `v` near 1.
    /// An offset from the lower bound is scaled geometrically until it brackets
    /// the root, then a safeguarded Newton-bisection iteration closes it.
    pub fn quantile(&self, v: f64) -> Result<f64> {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidProbability(v));
        }
        let target = log_expm1(-log1p(-v) / self.a);
        let u0 = self.g.log_at_support_edge();
        if target <= u0 {
            return Err(Error::BelowDeficit {
                v,
                deficit: self.lower_mass_deficit(),
            });
        }
        // Work on the offset t = x - lb so that roots close to the edge keep
        // relative precision; `resolution` is the spacing of doubles near lb.
        let lb = self.support_lb();
        let resolution = f64::EPSILON * fabs(lb);
        let f = |t: f64| self.g.u(lb + t) - target;

        // Bracket with f(lo) < 0 <= f(hi); lo = 0 stands for the edge itself.
        let (mut lo, mut hi);
        let f1 = f(1.0);
        if f1.is_nan() {
            return Err(Error::NoBracket { v });
        }
        if f1 >= 0.0 {
            lo = 0.0;
            hi = 1.0;
            loop {
                let t = hi / 256.0;
                if t <= resolution.max(EDGE_FLOOR) {
                    break;
                }
                let ft = f(t);
                if !(ft >= 0.0) {
                    lo = t;
                    break;
                }
                hi = t;
            }
        } else {
            lo = 1.0;
            hi = 2.0;
            let mut doublings = 0;
            loop {
                let fh = f(hi);
                if fh >= 0.0 {
                    break;
                }
                if fh.is_nan() || doublings == MAX_DOUBLINGS {
                    return Err(Error::NoBracket { v });
                }
                lo = hi;
                hi *= 2.0;
                doublings += 1;
            }
        }

        // Newton safeguarded by bisection, geometric while the bracket spans
        // more than a factor of four.
        let split = |lo: f64, hi: f64| {
            if lo > 0.0 && hi > 4.0 * lo {
                sqrt(lo * hi)
            } else {
                0.5 * (lo + hi)
            }
        };
        let mut t = split(lo, hi);
        let mut dt_old = hi - lo;
        let mut dt = dt_old;
        for _ in 0..2000 {
            let ft = f(t);
            if ft == 0.0 {
                return Ok(lb + t);
            }
            if ft >= 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let slope = self.g.w(lb + t);
            let newton = t - ft / slope;
            let use_newton =
                slope > 0.0 && newton > lo && newton < hi && fabs(2.0 * ft) <= fabs(dt_old * slope);
            dt_old = dt;
            let next = if use_newton { newton } else { split(lo, hi) };
            dt = next - t;
            let tol = 4.0 * f64::EPSILON * next.max(resolution);
            if fabs(dt) <= tol || hi - lo <= tol {
                return Ok(lb + next);
            }
            t = next;
        }
        Ok(lb + t)
    }

    /// `n` draws by inverse transform from the xoshiro256++ stream seeded with
    /// `seed`. Defective members are refused unless `allow_defective`, in
    /// which case uniforms inside the deficit map to the support edge.
    pub fn sample(&self, n: usize, seed: u64, allow_defective: bool) -> Result<Vec<f64>> {
        let deficit = self.lower_mass_deficit();
        if deficit > 0.0 && !allow_defective {
            return Err(Error::Defective { deficit });
        }
        let mut stream = UniformStream::new(seed);
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let v = stream.next_open01();
            let x = match self.quantile(v) {
                Err(Error::BelowDeficit { .. }) => self.support_lb(),
                other => other?,
            };
            out.push(x);
        }
        Ok(out)
    }

    /// Density maximum.
    ///
    /// `G0` uses the closed form (boundary when `b <= 1`). Other variants report
    /// the boundary when `g'` is unbounded there, and otherwise scan
    /// `ln pdf` on a logarithmic grid of offsets from the lower bound up to
    /// `1e12`, refine by golden section, and finish with bisection on the
    /// derivative of `ln pdf`.
    pub fn mode(&self) -> ModeResult {
        let lb = self.support_lb();
        if self.variant() == Variant::G0 {
            let (a, b, c, d) = (self.a, self.g.b(), self.g.c(), self.g.d());
            if b <= 1.0 {
                return ModeResult {
                    x_m: lb,
                    at_boundary: true,
                };
            }
            return ModeResult {
                x_m: pow((b - 1.0) / (a * b + 1.0), 1.0 / b) / c - d,
                at_boundary: false,
            };
        }

        if self.g.derivative_diverges_at_edge() {
            return ModeResult {
                x_m: lb,
                at_boundary: true,
            };
        }
        let lp = |x: f64| self.log_pdf(x).unwrap_or(f64::NEG_INFINITY);
        let t_lo = log(1e-9);
        let t_hi = log(MODE_X_MAX - lb);
        let grid: Vec<f64> = (0..MODE_GRID)
            .map(|k| lb + exp(t_lo + (t_hi - t_lo) * k as f64 / (MODE_GRID - 1) as f64))
            .collect();
        let mut best = 0;
        let mut best_val = f64::NEG_INFINITY;
        for (k, &x) in grid.iter().enumerate() {
            let v = lp(x);
            if v > best_val {
                best_val = v;
                best = k;
            }
        }
        if best == 0 {
            return ModeResult {
                x_m: lb,
                at_boundary: true,
            };
        }
        let mut lo = grid[best - 1];
        let mut hi = grid[(best + 1).min(MODE_GRID - 1)];

        // Golden section on ln pdf.
        let ratio = 0.5 * (sqrt(5.0) - 1.0);
        let mut x1 = hi - ratio * (hi - lo);
        let mut x2 = lo + ratio * (hi - lo);
        let mut f1 = lp(x1);
        let mut f2 = lp(x2);
        for _ in 0..300 {
            if hi - lo <= 1e-9 * (1.0 + fabs(0.5 * (lo + hi))) {
                break;
            }
            if f1 < f2 {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + ratio * (hi - lo);
                f2 = lp(x2);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - ratio * (hi - lo);
                f1 = lp(x1);
            }
        }
        let mut x_m = 0.5 * (lo + hi);

        // Polish on the slope of ln pdf, d/dx = w + w_x / w - (a + 1) C w.
        let slope = |x: f64| {
            let u = self.g.u(x);
            let w = self.g.w(x);
            w + self.g.w_x(x) / w - (self.a + 1.0) * sigmoid(u) * w
        };
        // Golden section stalls once ln pdf differences reach rounding level,
        // so widen a bracket around its result until the slope changes sign.
        let floor = grid[best - 1];
        let ceil = grid[(best + 1).min(MODE_GRID - 1)];
        let mut half = (hi - lo).max(1e-12 * (1.0 + fabs(x_m)));
        for _ in 0..80 {
            let (mut sl, mut sh) = ((x_m - half).max(floor), (x_m + half).min(ceil));
            if slope(sl) > 0.0 && slope(sh) < 0.0 {
                for _ in 0..200 {
                    let mid = 0.5 * (sl + sh);
                    if mid <= sl || mid >= sh {
                        break;
                    }
                    if slope(mid) > 0.0 {
                        sl = mid;
                    } else {
                        sh = mid;
                    }
                }
                x_m = 0.5 * (sl + sh);
                break;
            }
            if sl == floor && sh == ceil {
                break;
            }
            half *= 2.0;
        }
        ModeResult {
            x_m,
            at_boundary: false,
        }
    }

    /// Relative residual of `(a + 1) g'(x)^2 = (1 + g(x)) g''(x)`.
    pub fn mode_identity_residual(&self, x: f64) -> f64 {
        self.g.mode_identity_residual(self.a, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfun::Guard;

    fn g0(a: f64, b: f64, c: f64, d: f64) -> Ebxii {
        Ebxii::new(a, GSpec::g0(b, c, d).unwrap()).unwrap()
    }

    #[test]
    fn rejects_bad_outer_shape() {
        let g = GSpec::g0(1.0, 1.0, 0.0).unwrap();
        assert!(Ebxii::new(0.0, g).is_err());
        assert!(Ebxii::new(f64::INFINITY, g).is_err());
    }

    #[test]
    fn cdf_pdf_hazard_simple_cases() {
        let d = g0(1.0, 1.0, 1.0, 0.0);
        assert!((d.cdf(1.0) - 0.5).abs() < 1e-15);
        assert!((d.pdf(1.0).unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(d.cdf(-1.0), 0.0);
        assert_eq!(d.sf(-1.0), 1.0);
        assert!(d.pdf(0.0).is_err());
        let d2 = g0(2.0, 1.0, 1.0, 0.0);
        assert!((d2.hazard(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cdf_reaches_one() {
        for d in [g0(3.0, 0.8, 1.0, 1.5), g0(3.0, 1.2, 0.5, 1.5)] {
            assert!(d.cdf(1e12) >= 1.0 - 1e-6);
        }
    }

    #[test]
    fn reference_quantile_round_trip() {
        let d = g0(3.0, 0.8, 1.0, 1.5);
        assert!((d.cdf(3.53) - 0.99).abs() <= 0.0015);
    }

    #[test]
    fn quantile_errors() {
        let d = g0(3.0, 0.8, 1.0, 1.5);
        assert!(matches!(d.quantile(0.0), Err(Error::InvalidProbability(_))));
        assert!(matches!(d.quantile(1.0), Err(Error::InvalidProbability(_))));
        assert!(matches!(
            d.quantile(f64::NAN),
            Err(Error::InvalidProbability(_))
        ));
        let defective = Ebxii::new(1.0, GSpec::g2(0.0, 1.0, 1.5, 1.0, 1.0).unwrap()).unwrap();
        assert!(matches!(
            defective.quantile(0.4),
            Err(Error::BelowDeficit { .. })
        ));
        assert!(defective.quantile(0.6).is_ok());
    }

    #[test]
    fn g0_reference_quantiles() {
        let d = g0(3.0, 0.8, 1.0, 1.5);
        let want = [(0.90, -0.30), (0.95, 0.46), (0.99, 3.53)];
        for (v, q) in want {
            assert!((d.quantile(v).unwrap() - q).abs() <= 0.005, "v = {v}");
        }
        let g1 = Ebxii::new(3.0, GSpec::g1(1.2, 0.5, 1.5, 1.0, 1.0).unwrap()).unwrap();
        assert!((g1.quantile(0.99).unwrap() - 2.09).abs() <= 0.005);
    }

    #[test]
    fn deficits() {
        assert_eq!(g0(3.0, 0.8, 1.0, 1.5).lower_mass_deficit(), 0.0);
        let g2 = Ebxii::new(1.0, GSpec::g2(0.0, 1.0, 1.5, 1.0, 1.0).unwrap()).unwrap();
        assert!((g2.lower_mass_deficit() - 0.5).abs() < 1e-15);
        assert!(!g2.is_proper());
        // d = 1, eps = 1: g2(0+) = c^b
        let g2 = Ebxii::new(2.0, GSpec::g2(0.8, 0.5, 1.0, 1.0, 1.0).unwrap()).unwrap();
        let g_edge = 0.5f64.powf(0.8);
        let want = 1.0 - (1.0 + g_edge).powf(-2.0);
        assert!((g2.lower_mass_deficit() - want).abs() < 1e-14);
        // cdf at and below the support edge returns the deficit
        assert!((g2.cdf(0.0) - want).abs() < 1e-14);
        assert!((g2.cdf(-3.0) - want).abs() < 1e-14);
        assert!((g2.cdf(1e-12) - want).abs() < 1e-9);
    }

    #[test]
    fn hazard_limits() {
        let g2 = Ebxii::new(3.0, GSpec::g2(0.8, 1.0, 1.5, 1.0, 1.0).unwrap()).unwrap();
        assert!((g2.hazard(1e6).unwrap() - 3.0).abs() < 0.01);
        let g3 = Ebxii::new(3.0, GSpec::g3(0.8, 1.0, 1.5, 1.0).unwrap()).unwrap();
        assert!(g3.hazard(1e8).unwrap() < 1e-5);
    }

    #[test]
    fn tail_index_products() {
        assert!((g0(3.0, 0.8, 1.0, 1.5).tail_index() - 2.4).abs() < 1e-14);
        let g1 = Ebxii::new(3.0, GSpec::g1(1.2, 1.0, 1.5, 1.0, 1.0).unwrap()).unwrap();
        assert!((g1.tail_index() - 7.2).abs() < 1e-14);
        let g2 = Ebxii::new(3.0, GSpec::g2(1.2, 1.0, 1.5, 1.0, 1.0).unwrap()).unwrap();
        assert_eq!(g2.tail_index(), f64::INFINITY);
    }

    #[test]
    fn g0_mode_boundary_and_closed_form() {
        let m = g0(3.0, 0.8, 1.0, 1.5).mode();
        assert!(m.at_boundary);
        assert_eq!(m.x_m, -1.5);
        let d = g0(3.0, 1.2, 1.0, 1.5);
        let m = d.mode();
        assert!(!m.at_boundary);
        assert!(d.mode_identity_residual(m.x_m) < 1e-10);
    }

    #[test]
    fn interior_mode_satisfies_stationarity() {
        let d = Ebxii::new(3.0, GSpec::g3(1.2, 0.5, 1.5, 1.0).unwrap()).unwrap();
        let m = d.mode();
        assert!(!m.at_boundary);
        assert!(
            d.mode_identity_residual(m.x_m) < 1e-8,
            "{}",
            d.mode_identity_residual(m.x_m)
        );
    }

    #[test]
    fn sampling_basics() {
        let d = g0(3.0, 0.8, 1.0, 1.5);
        assert!(d.sample(0, 1, false).unwrap().is_empty());
        assert_eq!(
            d.sample(50, 9, false).unwrap(),
            d.sample(50, 9, false).unwrap()
        );
        assert_ne!(
            d.sample(5, 9, false).unwrap(),
            d.sample(5, 10, false).unwrap()
        );
        let defective = Ebxii::new(1.0, GSpec::g2(0.0, 1.0, 1.5, 1.0, 1.0).unwrap()).unwrap();
        assert!(matches!(
            defective.sample(10, 1, false),
            Err(Error::Defective { .. })
        ));
        let xs = defective.sample(2000, 1, true).unwrap();
        let at_edge = xs.iter().filter(|&&x| x == 0.0).count() as f64 / 2000.0;
        assert!((at_edge - 0.5).abs() < 0.05);
    }

    #[test]
    fn unguarded_gap_below_one_minus_d() {
        // g1 with d = 0: (0, 1] is inside x > 0 but outside x + d > 1.
        let g = GSpec::new(Variant::G1, 1.0, 1.0, 0.0, 1.0, 1.0, Guard::Skip).unwrap();
        let d = Ebxii::new(1.0, g).unwrap();
        assert!(d.pdf(0.5).is_err());
        assert!(d.cdf(0.5).is_nan());
    }
}
