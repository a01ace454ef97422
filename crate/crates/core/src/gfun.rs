//! The four generator functions `g` of the family.
//!
//! | variant | `g(x)`                                           | support  |
//! |---------|--------------------------------------------------|----------|
//! | `G0`    | `(c (x + d))^b`                                  | `x > -d` |
//! | `G1`    | `(c x^eps (x + d)^p / ln(x + d))^b`              | `x > 0`  |
//! | `G2`    | `(c x^eps / ln(x + d))^b * exp(x^p)`             | `x > 0`  |
//! | `G3`    | `(c x^eps ln(x + d + 1) / ln(x + d))^b`          | `x > 0`  |
//!
//! Internally everything is computed through `u = ln g` and its derivatives,
//! which keeps the distribution functions accurate far into the tails.

use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::math::{exp, fabs, log, log1p, pow};

/// Which generator a [`GSpec`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    G0,
    G1,
    G2,
    G3,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::G0, Variant::G1, Variant::G2, Variant::G3];

    /// Number of model parameters `(a, b, c, d, eps, p)` the variant uses.
    pub fn arity(self) -> usize {
        match self {
            Variant::G0 => 4,
            Variant::G3 => 5,
            Variant::G1 | Variant::G2 => 6,
        }
    }

    pub fn uses_eps(self) -> bool {
        self != Variant::G0
    }

    pub fn uses_p(self) -> bool {
        matches!(self, Variant::G1 | Variant::G2)
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::G0 => "g0",
            Variant::G1 => "g1",
            Variant::G2 => "g2",
            Variant::G3 => "g3",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "g0" | "G0" => Ok(Variant::G0),
            "g1" | "G1" => Ok(Variant::G1),
            "g2" | "G2" => Ok(Variant::G2),
            "g3" | "G3" => Ok(Variant::G3),
            _ => Err(Error::InvalidParameter {
                name: "variant",
                value: f64::NAN,
                reason: "expected one of g0, g1, g2, g3",
            }),
        }
    }
}

/// Construction-time validation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Guard {
    /// Require `d >= 1` (g1-g3), a divergent generator, and the monotonicity
    /// condition on a 256-point logarithmic grid over `[lb + 1e-9, 1e9]`.
    #[default]
    Scan,
    /// Only check parameter ranges. Points are still validated one at a time.
    Skip,
}

const GUARD_POINTS: usize = 256;
const GUARD_LO: f64 = 1e-9;
const GUARD_HI: f64 = 1e9;

/// Number of generator parameters with derivatives: `b, c, d, eps, p`.
pub(crate) const NG: usize = 5;

/// A generator choice with its parameters.
///
/// Unused parameters (`eps` for `G0`, `p` for `G0` and `G3`) are stored as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GSpec {
    variant: Variant,
    b: f64,
    c: f64,
    d: f64,
    eps: f64,
    p: f64,
}

/// `u = ln g`, `w = du/dx` and their partials with respect to `b, c, d, eps, p`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Jet {
    pub u: f64,
    pub w: f64,
    pub du: [f64; NG],
    pub dw: [f64; NG],
    pub d2u: [[f64; NG]; NG],
    pub d2w: [[f64; NG]; NG],
}

const B: usize = 0;
const C: usize = 1;
const D: usize = 2;
const E: usize = 3;
const P: usize = 4;

/// `(l + 1) / (y^2 l^2)`, minus the derivative of `1 / (y l)` with `l = ln y`.
#[inline]
fn q(y: f64, l: f64) -> f64 {
    (l + 1.0) / (y * y * l * l)
}

/// Derivative of [`q`] with respect to `y`.
#[inline]
fn q_prime(y: f64, l: f64) -> f64 {
    let y3 = y * y * y;
    1.0 / (y3 * l * l) - 2.0 * (l + 1.0) * (l + 1.0) / (y3 * l * l * l)
}

impl GSpec {
    /// Builds a generator. Parameters a variant does not use must be 0.
    pub fn new(
        variant: Variant,
        b: f64,
        c: f64,
        d: f64,
        eps: f64,
        p: f64,
        guard: Guard,
    ) -> Result<Self> {
        let bad = |name, value, reason| {
            Err(Error::InvalidParameter {
                name,
                value,
                reason,
            })
        };
        for (name, v) in [("b", b), ("c", c), ("d", d), ("eps", eps), ("p", p)] {
            if !v.is_finite() {
                return bad(name, v, "must be finite");
            }
        }
        if c <= 0.0 {
            return bad("c", c, "must be positive");
        }
        if variant == Variant::G2 {
            if b < 0.0 {
                return bad("b", b, "must be non-negative");
            }
        } else if b <= 0.0 {
            return bad("b", b, "must be positive");
        }
        if !variant.uses_eps() && eps != 0.0 {
            return bad("eps", eps, "not used by this variant");
        }
        if !variant.uses_p() && p != 0.0 {
            return bad("p", p, "not used by this variant");
        }
        if eps < 0.0 {
            return bad("eps", eps, "must be non-negative");
        }
        if p < 0.0 {
            return bad("p", p, "must be non-negative");
        }
        let spec = GSpec {
            variant,
            b,
            c,
            d,
            eps,
            p,
        };
        if guard == Guard::Scan {
            if variant != Variant::G0 && d < 1.0 {
                return bad("d", d, "must be at least 1 so that x + d > 1 on x > 0");
            }
            spec.scan()?;
        }
        Ok(spec)
    }

    pub fn g0(b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(Variant::G0, b, c, d, 0.0, 0.0, Guard::Scan)
    }

    pub fn g1(b: f64, c: f64, d: f64, eps: f64, p: f64) -> Result<Self> {
        Self::new(Variant::G1, b, c, d, eps, p, Guard::Scan)
    }

    pub fn g2(b: f64, c: f64, d: f64, eps: f64, p: f64) -> Result<Self> {
        Self::new(Variant::G2, b, c, d, eps, p, Guard::Scan)
    }

    pub fn g3(b: f64, c: f64, d: f64, eps: f64) -> Result<Self> {
        Self::new(Variant::G3, b, c, d, eps, 0.0, Guard::Scan)
    }

    fn scan(&self) -> Result<()> {
        let diverges = match self.variant {
            Variant::G0 => true,
            Variant::G1 => self.b * (self.eps + self.p) > 0.0,
            Variant::G2 => self.p > 0.0 || self.b * self.eps > 0.0,
            Variant::G3 => self.b * self.eps > 0.0,
        };
        if !diverges {
            return Err(Error::GuardFailed { x: f64::INFINITY });
        }
        if self.variant == Variant::G0 {
            return Ok(());
        }
        let lb = self.support_lb();
        let lo = log(GUARD_LO);
        let hi = log(GUARD_HI - lb);
        for k in 0..GUARD_POINTS {
            let t = lo + (hi - lo) * k as f64 / (GUARD_POINTS - 1) as f64;
            let x = lb + exp(t);
            if !self.condition_holds(x) {
                return Err(Error::GuardFailed { x });
            }
        }
        Ok(())
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn eps(&self) -> f64 {
        self.eps
    }
    pub fn p(&self) -> f64 {
        self.p
    }

    /// `b = 0` is only admissible for `G2`; then `g(0+) = 1` and the
    /// distribution has an atom at the origin.
    pub fn has_zero_b(&self) -> bool {
        self.b == 0.0
    }

    /// Infimum of the support: `-d` for `G0`, 0 otherwise.
    pub fn support_lb(&self) -> f64 {
        match self.variant {
            Variant::G0 => -self.d,
            _ => 0.0,
        }
    }

    #[inline]
    pub(crate) fn in_domain(&self, x: f64) -> bool {
        match self.variant {
            Variant::G0 => x + self.d > 0.0,
            _ => x > 0.0 && x + (self.d - 1.0) > 0.0,
        }
    }

    fn check_domain(&self, x: f64) -> Result<()> {
        if self.in_domain(x) {
            Ok(())
        } else {
            Err(Error::Domain {
                x,
                lower_bound: self.support_lb().max(1.0 - self.d),
            })
        }
    }

    /// `ln(x + d)` computed as `log1p(x + (d - 1))` so it stays accurate near 1.
    #[inline]
    fn ln_shift(&self, x: f64) -> f64 {
        log1p(x + (self.d - 1.0))
    }

    /// `ln g(x)`, unchecked.
    #[inline]
    pub(crate) fn u(&self, x: f64) -> f64 {
        let (b, c, d, eps, p) = (self.b, self.c, self.d, self.eps, self.p);
        match self.variant {
            Variant::G0 => b * log(c * (x + d)),
            Variant::G1 => {
                let l = self.ln_shift(x);
                b * (log(c) + eps * log(x) + p * l - log(l))
            }
            Variant::G2 => {
                let l = self.ln_shift(x);
                let core = if b == 0.0 {
                    0.0
                } else {
                    b * (log(c) + eps * log(x) - log(l))
                };
                core + pow(x, p)
            }
            Variant::G3 => {
                let l = self.ln_shift(x);
                let l1 = log1p(x + d);
                b * (log(c) + eps * log(x) + log(l1) - log(l))
            }
        }
    }

    /// `d/dx ln g(x)`, unchecked. Non-negative exactly where `g' >= 0`.
    #[inline]
    pub(crate) fn w(&self, x: f64) -> f64 {
        let (b, d, eps, p) = (self.b, self.d, self.eps, self.p);
        let y = x + d;
        match self.variant {
            Variant::G0 => b / y,
            Variant::G1 => {
                let l = self.ln_shift(x);
                b * (eps / x + p / y - 1.0 / (y * l))
            }
            Variant::G2 => {
                let l = self.ln_shift(x);
                let poly = if p == 0.0 { 0.0 } else { p * pow(x, p - 1.0) };
                b * (eps / x - 1.0 / (y * l)) + poly
            }
            Variant::G3 => {
                let l = self.ln_shift(x);
                let y1 = y + 1.0;
                let l1 = log1p(y);
                b * (eps / x + 1.0 / (y1 * l1) - 1.0 / (y * l))
            }
        }
    }

    /// `d^2/dx^2 ln g(x)`, unchecked.
    #[inline]
    pub(crate) fn w_x(&self, x: f64) -> f64 {
        let (b, d, eps, p) = (self.b, self.d, self.eps, self.p);
        let y = x + d;
        match self.variant {
            Variant::G0 => -b / (y * y),
            Variant::G1 => {
                let l = self.ln_shift(x);
                b * (-eps / (x * x) - p / (y * y) + q(y, l))
            }
            Variant::G2 => {
                let l = self.ln_shift(x);
                let poly = if p == 0.0 || p == 1.0 {
                    0.0
                } else {
                    p * (p - 1.0) * pow(x, p - 2.0)
                };
                b * (-eps / (x * x) + q(y, l)) + poly
            }
            Variant::G3 => {
                let l = self.ln_shift(x);
                let y1 = y + 1.0;
                let l1 = log1p(y);
                b * (-eps / (x * x) - q(y1, l1) + q(y, l))
            }
        }
    }

    /// `ln g(x)`.
    pub fn log_eval(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(self.u(x))
    }

    /// `g(x)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        Ok(exp(self.u(x)))
    }

    /// `g'(x)`; fails where the monotonicity condition does not hold.
    pub fn d1(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if !self.condition_holds(x) {
            return Err(Error::ConditionViolated { x });
        }
        Ok(exp(self.u(x)) * self.w(x))
    }

    /// `g''(x)`.
    pub fn d2(&self, x: f64) -> Result<f64> {
        self.check_domain(x)?;
        if !self.condition_holds(x) {
            return Err(Error::ConditionViolated { x });
        }
        let w = self.w(x);
        Ok(exp(self.u(x)) * (w * w + self.w_x(x)))
    }

    /// The variant's monotonicity condition at `x`, written without divisions.
    ///
    /// For `G3` the form used is `(x+d) ln(x+d) [eps (x+d+1) ln(x+d+1) + x]
    /// >= x (x+d+1) ln(x+d+1)`, which is exactly `g3' >= 0`.
    pub fn condition_holds(&self, x: f64) -> bool {
        if !self.in_domain(x) {
            return false;
        }
        let (b, d, eps, p) = (self.b, self.d, self.eps, self.p);
        let y = x + d;
        match self.variant {
            Variant::G0 => true,
            Variant::G1 => {
                let l = self.ln_shift(x);
                l * (p * x + eps * y) >= x
            }
            Variant::G2 => {
                let l = self.ln_shift(x);
                y * l * (b * eps + p * pow(x, p)) >= b * x
            }
            Variant::G3 => {
                let l = self.ln_shift(x);
                let y1 = y + 1.0;
                let l1 = log1p(y);
                y * l * (eps * y1 * l1 + x) >= x * y1 * l1
            }
        }
    }

    /// Tail index of `g`: the limit of `ln g(x) / ln x`. Infinite for `G2`
    /// with `p > 0`.
    pub fn tail_index(&self) -> f64 {
        match self.variant {
            Variant::G0 => self.b,
            Variant::G1 => self.b * (self.eps + self.p),
            Variant::G2 => {
                if self.p > 0.0 {
                    f64::INFINITY
                } else {
                    self.b * self.eps
                }
            }
            Variant::G3 => self.b * self.eps,
        }
    }

    /// Limit of `ln g(x)` as `x` decreases to the support lower bound.
    ///
    /// `-inf` means `g(lb+) = 0`, i.e. no atom at the support edge.
    pub fn log_at_support_edge(&self) -> f64 {
        let (b, c, d, eps, p) = (self.b, self.c, self.d, self.eps, self.p);
        // Near x = 0 with d = 1 the factor 1/ln(1 + x) behaves like 1/x.
        let near_one = d == 1.0;
        let power = if near_one { eps - 1.0 } else { eps };
        let singular = |base: f64| -> f64 {
            if power > 0.0 {
                f64::NEG_INFINITY
            } else if power < 0.0 {
                f64::INFINITY
            } else {
                base
            }
        };
        match self.variant {
            Variant::G0 => f64::NEG_INFINITY,
            Variant::G1 => {
                let lnln = if near_one { 0.0 } else { log(log(d)) };
                b * singular(log(c) + p * log(d) - lnln)
            }
            Variant::G2 => {
                let xp = if p > 0.0 { 0.0 } else { 1.0 };
                if b == 0.0 {
                    return xp;
                }
                let lnln = if near_one { 0.0 } else { log(log(d)) };
                b * singular(log(c) - lnln) + xp
            }
            Variant::G3 => {
                let lnln = if near_one { 0.0 } else { log(log(d)) };
                b * singular(log(c) + log(log(d + 1.0)) - lnln)
            }
        }
    }

    /// Whether `g'` is unbounded at the support edge, i.e. `g` behaves like
    /// `K x^beta` with `0 < beta < 1` there (or `exp(x^p)` with `p < 1` for
    /// `G2` when the power part is constant).
    pub(crate) fn derivative_diverges_at_edge(&self) -> bool {
        let (b, d, eps, p) = (self.b, self.d, self.eps, self.p);
        if self.variant == Variant::G0 {
            return b < 1.0;
        }
        if d < 1.0 {
            return false;
        }
        let eps_eff = if d == 1.0 { eps - 1.0 } else { eps };
        let beta = b * eps_eff;
        match self.variant {
            Variant::G2 if beta <= 0.0 => p > 0.0 && p < 1.0,
            _ => beta > 0.0 && beta < 1.0,
        }
    }

    /// Value of `u` and `w` plus their first (and optionally second) partials
    /// with respect to `(b, c, d, eps, p)`. Unchecked.
    pub(crate) fn jet(&self, x: f64, second: bool) -> Jet {
        let (b, c, d, eps, p) = (self.b, self.c, self.d, self.eps, self.p);
        let y = x + d;
        let mut j = Jet {
            u: 0.0,
            w: 0.0,
            du: [0.0; NG],
            dw: [0.0; NG],
            d2u: [[0.0; NG]; NG],
            d2w: [[0.0; NG]; NG],
        };
        let lnc = log(c);
        match self.variant {
            Variant::G0 => {
                let k = lnc + log(y);
                j.u = b * k;
                j.w = b / y;
                j.du[B] = k;
                j.du[C] = b / c;
                j.du[D] = b / y;
                j.dw[B] = 1.0 / y;
                j.dw[D] = -b / (y * y);
                if second {
                    j.d2u[B][C] = 1.0 / c;
                    j.d2u[B][D] = 1.0 / y;
                    j.d2u[C][C] = -b / (c * c);
                    j.d2u[D][D] = -b / (y * y);
                    j.d2w[B][D] = -1.0 / (y * y);
                    j.d2w[D][D] = 2.0 * b / (y * y * y);
                }
            }
            Variant::G1 => {
                let l = self.ln_shift(x);
                let lx = log(x);
                let r = 1.0 / (y * l);
                let qy = q(y, l);
                let k = lnc + eps * lx + p * l - log(l);
                let kx = eps / x + p / y - r;
                j.u = b * k;
                j.w = b * kx;
                j.du[B] = k;
                j.du[C] = b / c;
                j.du[D] = b * (p / y - r);
                j.du[E] = b * lx;
                j.du[P] = b * l;
                let kx_d = -p / (y * y) + qy;
                j.dw[B] = kx;
                j.dw[D] = b * kx_d;
                j.dw[E] = b / x;
                j.dw[P] = b / y;
                if second {
                    j.d2u[B][C] = 1.0 / c;
                    j.d2u[B][D] = p / y - r;
                    j.d2u[B][E] = lx;
                    j.d2u[B][P] = l;
                    j.d2u[C][C] = -b / (c * c);
                    j.d2u[D][D] = b * kx_d;
                    j.d2u[D][P] = b / y;
                    j.d2w[B][D] = kx_d;
                    j.d2w[B][E] = 1.0 / x;
                    j.d2w[B][P] = 1.0 / y;
                    j.d2w[D][D] = b * (2.0 * p / (y * y * y) + q_prime(y, l));
                    j.d2w[D][P] = -b / (y * y);
                }
            }
            Variant::G2 => {
                let l = self.ln_shift(x);
                let lx = log(x);
                let r = 1.0 / (y * l);
                let qy = q(y, l);
                let xp = pow(x, p);
                // x^(p-1) as x^p / x avoids a second pow call.
                let xp1 = xp / x;
                let k = lnc + eps * lx - log(l);
                let kx = eps / x - r;
                j.u = b * k + xp;
                j.w = b * kx + p * xp1;
                j.du[B] = k;
                j.du[C] = b / c;
                j.du[D] = -b * r;
                j.du[E] = b * lx;
                j.du[P] = xp * lx;
                j.dw[B] = kx;
                j.dw[D] = b * qy;
                j.dw[E] = b / x;
                j.dw[P] = xp1 * (1.0 + p * lx);
                if second {
                    j.d2u[B][C] = 1.0 / c;
                    j.d2u[B][D] = -r;
                    j.d2u[B][E] = lx;
                    j.d2u[C][C] = -b / (c * c);
                    j.d2u[D][D] = b * qy;
                    j.d2u[P][P] = xp * lx * lx;
                    j.d2w[B][D] = qy;
                    j.d2w[B][E] = 1.0 / x;
                    j.d2w[D][D] = b * q_prime(y, l);
                    j.d2w[P][P] = xp1 * lx * (2.0 + p * lx);
                }
            }
            Variant::G3 => {
                let l = self.ln_shift(x);
                let y1 = y + 1.0;
                let l1 = log1p(y);
                let lx = log(x);
                let r_diff = 1.0 / (y1 * l1) - 1.0 / (y * l);
                let q_diff = q(y, l) - q(y1, l1);
                let k = lnc + eps * lx + log(l1) - log(l);
                let kx = eps / x + r_diff;
                j.u = b * k;
                j.w = b * kx;
                j.du[B] = k;
                j.du[C] = b / c;
                j.du[D] = b * r_diff;
                j.du[E] = b * lx;
                j.dw[B] = kx;
                j.dw[D] = b * q_diff;
                j.dw[E] = b / x;
                if second {
                    j.d2u[B][C] = 1.0 / c;
                    j.d2u[B][D] = r_diff;
                    j.d2u[B][E] = lx;
                    j.d2u[C][C] = -b / (c * c);
                    j.d2u[D][D] = b * q_diff;
                    j.d2w[B][D] = q_diff;
                    j.d2w[B][E] = 1.0 / x;
                    j.d2w[D][D] = b * (q_prime(y, l) - q_prime(y1, l1));
                }
            }
        }
        if second {
            for i in 0..NG {
                for k in 0..i {
                    j.d2u[i][k] = j.d2u[k][i];
                    j.d2w[i][k] = j.d2w[k][i];
                }
            }
        }
        j
    }

    /// Relative residual of the stationarity identity
    /// `(a + 1) g'^2 = (1 + g) g''` at `x`.
    pub(crate) fn mode_identity_residual(&self, a: f64, x: f64) -> f64 {
        let u = self.u(x);
        let w = self.w(x);
        let wx = self.w_x(x);
        let cfrac = crate::math::sigmoid(u);
        let lhs = (a + 1.0) * cfrac * w * w;
        let rhs = w * w + wx;
        fabs(lhs - rhs) / (fabs(lhs) + fabs(rhs)).max(f64::MIN_POSITIVE)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::E as EULER;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1e-300)
    }

    #[test]
    fn g0_identity_and_square() {
        let g = GSpec::g0(1.0, 1.0, 0.0).unwrap();
        assert_eq!(g.eval(2.5).unwrap(), 2.5);
        assert_eq!(g.d1(0.7).unwrap(), 1.0);
        assert!(g.d2(2.0).unwrap().abs() < 1e-15);
        let g = GSpec::g0(2.0, 1.0, 0.0).unwrap();
        assert!(close(g.d1(3.0).unwrap(), 6.0, 1e-14));
        assert!(close(g.d2(3.0).unwrap(), 2.0, 1e-14));
    }

    #[test]
    fn g1_at_e_with_zero_shift() {
        // d = 0 is below the construction guard; evaluate pointwise only.
        let g = GSpec::new(Variant::G1, 1.0, 1.0, 0.0, 1.0, 1.0, Guard::Skip).unwrap();
        assert!(close(g.eval(EULER).unwrap(), EULER * EULER, 1e-14));
        // x + d must exceed 1.
        assert!(matches!(g.eval(0.5), Err(Error::Domain { .. })));
        assert!(GSpec::g1(1.0, 1.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn g2_matches_direct_formula() {
        let g = GSpec::g2(0.8, 1.0, 1.5, 1.0, 1.0).unwrap();
        let x: f64 = 1.15;
        let direct = (x / (x + 1.5).ln()).powf(0.8) * x.exp();
        assert!(close(g.eval(x).unwrap(), direct, 1e-14));
        assert!((g.eval(x).unwrap() - 3.605).abs() < 5e-3);
    }

    #[test]
    fn support_lower_bounds() {
        assert_eq!(GSpec::g0(1.0, 1.0, 1.5).unwrap().support_lb(), -1.5);
        assert_eq!(
            GSpec::g1(1.0, 1.0, 2.0, 1.0, 1.0).unwrap().support_lb(),
            0.0
        );
        assert_eq!(GSpec::g0(1.0, 1.0, 0.0).unwrap().support_lb(), 0.0);
    }

    #[test]
    fn below_support_is_a_domain_error() {
        let g = GSpec::g0(1.0, 1.0, 1.5).unwrap();
        assert!(matches!(g.eval(-1.5), Err(Error::Domain { .. })));
        let g = GSpec::g3(0.8, 1.0, 1.5, 1.0).unwrap();
        assert!(g.eval(0.0).is_err());
        assert!(g.d1(-1.0).is_err());
    }

    #[test]
    fn conditions() {
        let g0 = GSpec::g0(0.8, 1.0, 1.5).unwrap();
        assert!(g0.condition_holds(3.0));
        let g1 = GSpec::g1(0.8, 1.0, 1.5, 1.0, 1.0).unwrap();
        // ln(2.5) * (1 + 2.5) = 3.207 >= 1
        assert!(g1.condition_holds(1.0));
        let flat = GSpec::new(Variant::G1, 0.8, 1.0, 1.5, 0.0, 0.0, Guard::Skip).unwrap();
        assert!(!flat.condition_holds(10.0));
        assert!(matches!(
            flat.d1(10.0),
            Err(Error::ConditionViolated { .. })
        ));
    }

    #[test]
    fn guard_rejects_non_monotone_or_bounded_generators() {
        assert!(matches!(
            GSpec::g1(0.8, 1.0, 1.5, 0.0, 0.0),
            Err(Error::GuardFailed { .. })
        ));
        // eps = 0 makes g3 decreasing.
        assert!(GSpec::g3(0.8, 1.0, 1.5, 0.0).is_err());
        // d = 1 with eps < 1 makes g1 decrease near the origin.
        assert!(GSpec::g1(1.0, 1.0, 1.0, 0.5, 0.0).is_err());
        assert!(GSpec::g1(1.0, 1.0, 1.0, 1.0, 0.0).is_ok());
        // g2 with b = 0 is admissible.
        assert!(GSpec::g2(0.0, 1.0, 1.5, 1.0, 1.0).is_ok());
        assert!(GSpec::g2(0.0, 1.0, 1.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn parameter_ranges() {
        assert!(GSpec::g0(0.0, 1.0, 0.0).is_err());
        assert!(GSpec::g0(1.0, -1.0, 0.0).is_err());
        assert!(GSpec::g0(1.0, 1.0, f64::NAN).is_err());
        assert!(GSpec::g1(1.0, 1.0, 1.5, -1.0, 1.0).is_err());
        assert!(GSpec::new(Variant::G0, 1.0, 1.0, 0.0, 1.0, 0.0, Guard::Skip).is_err());
        assert!(GSpec::new(Variant::G3, 1.0, 1.0, 1.5, 1.0, 2.0, Guard::Skip).is_err());
    }

    #[test]
    fn tail_indices() {
        assert_eq!(GSpec::g0(0.8, 1.0, 1.5).unwrap().tail_index(), 0.8);
        assert_eq!(
            GSpec::g2(0.8, 1.0, 1.5, 1.0, 1.0).unwrap().tail_index(),
            f64::INFINITY
        );
        assert!(close(
            GSpec::g1(1.2, 1.0, 1.5, 1.0, 1.0).unwrap().tail_index(),
            2.4,
            1e-15
        ));
        assert!(close(
            GSpec::g2(0.8, 1.0, 1.5, 2.0, 0.0).unwrap().tail_index(),
            1.6,
            1e-15
        ));
        assert_eq!(GSpec::g3(0.8, 1.0, 1.5, 1.0).unwrap().tail_index(), 0.8);
    }

    #[test]
    fn support_edge_limits() {
        assert_eq!(
            GSpec::g0(0.8, 1.0, 1.5).unwrap().log_at_support_edge(),
            f64::NEG_INFINITY
        );
        let g2 = GSpec::g2(0.0, 1.0, 1.5, 1.0, 1.0).unwrap();
        assert_eq!(g2.log_at_support_edge(), 0.0);
        // eps = 0 makes g2 decrease near the origin, so only unguarded
        let g2 = GSpec::new(Variant::G2, 0.8, 1.0, 1.5, 0.0, 1.0, Guard::Skip).unwrap();
        let want = 0.8 * (1.0 / 1.5f64.ln()).ln();
        assert!(close(g2.log_at_support_edge(), want, 1e-14));
        assert!(GSpec::g2(0.8, 1.0, 1.5, 0.0, 1.0).is_err());
        // d = 1, eps = 1: g3(0+) = (c ln 2)^b.
        let g3 = GSpec::g3(2.0, 0.5, 1.0, 1.0).unwrap();
        let want = 2.0 * (0.5 * 2f64.ln()).ln();
        assert!(close(g3.log_at_support_edge(), want, 1e-14));
        // and that agrees with evaluating very close to the edge
        assert!((g3.u(1e-12) - want).abs() < 1e-9);
    }
}
