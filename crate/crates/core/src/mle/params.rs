use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::linalg::Matrix;
use crate::dist::Ebxii;
use crate::error::{Error, Result};
use crate::gfun::{GSpec, Guard, Variant};

/// Model parameter names, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ParamName {
    A,
    B,
    C,
    D,
    Eps,
    P,
}

impl ParamName {
    pub const ALL: [ParamName; 6] = [
        ParamName::A,
        ParamName::B,
        ParamName::C,
        ParamName::D,
        ParamName::Eps,
        ParamName::P,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ParamName::A => "a",
            ParamName::B => "b",
            ParamName::C => "c",
            ParamName::D => "d",
            ParamName::Eps => "eps",
            ParamName::P => "p",
        }
    }

    /// The parameters a variant uses; always a prefix of [`ParamName::ALL`].
    pub fn for_variant(variant: Variant) -> &'static [ParamName] {
        &Self::ALL[..variant.arity()]
    }
}

impl fmt::Display for ParamName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParamName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "a" => Ok(ParamName::A),
            "b" => Ok(ParamName::B),
            "c" => Ok(ParamName::C),
            "d" => Ok(ParamName::D),
            "eps" | "epsilon" => Ok(ParamName::Eps),
            "p" => Ok(ParamName::P),
            other => Err(Error::MalformedTieMap(format!(
                "unknown parameter name '{other}' (expected a, b, c, d, eps, p)"
            ))),
        }
    }
}

/// Model parameters `(a, b, c, d, eps, p)` of one variant.
///
/// Only the first `variant.arity()` entries are meaningful; the rest are 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamVector {
    variant: Variant,
    values: [f64; 6],
}

impl ParamVector {
    /// From the variant's parameters in order `a, b, c, d[, eps[, p]]`.
    pub fn new(variant: Variant, values: &[f64]) -> Result<Self> {
        if values.len() != variant.arity() {
            return Err(Error::Arity {
                expected: variant.arity(),
                got: values.len(),
            });
        }
        let mut all = [0.0; 6];
        all[..values.len()].copy_from_slice(values);
        Ok(Self {
            variant,
            values: all,
        })
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    /// The variant's parameters, length `arity`.
    pub fn values(&self) -> &[f64] {
        &self.values[..self.variant.arity()]
    }

    pub(crate) fn all(&self) -> &[f64; 6] {
        &self.values
    }

    pub fn get(&self, name: ParamName) -> f64 {
        self.values[name.index()]
    }

    pub fn set(&mut self, name: ParamName, value: f64) -> Result<()> {
        if name.index() >= self.variant.arity() {
            return Err(Error::InvalidParameter {
                name: name.name(),
                value,
                reason: "not used by this variant",
            });
        }
        self.values[name.index()] = value;
        Ok(())
    }

    pub fn gspec(&self, guard: Guard) -> Result<GSpec> {
        let v = &self.values;
        GSpec::new(self.variant, v[1], v[2], v[3], v[4], v[5], guard)
    }

    pub fn to_dist(&self, guard: Guard) -> Result<Ebxii> {
        Ebxii::new(self.values[0], self.gspec(guard)?)
    }

    pub fn from_dist(dist: &Ebxii) -> Self {
        let g = dist.g();
        Self {
            variant: g.variant(),
            values: [dist.a(), g.b(), g.c(), g.d(), g.eps(), g.p()],
        }
    }
}

/// How one model parameter depends on the free vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tie {
    Fixed(f64),
    /// `theta = multiplier * phi[free]`.
    Linked {
        free: usize,
        multiplier: f64,
    },
}

/// Linear map from free parameters `phi` to model parameters `theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct TieMap {
    variant: Variant,
    entries: Vec<Tie>,
    free_count: usize,
    labels: Vec<&'static str>,
}

impl TieMap {
    /// Validates that every free index is referenced and multipliers are
    /// finite and nonzero.
    pub fn new(variant: Variant, entries: Vec<Tie>, free_count: usize) -> Result<Self> {
        if entries.len() != variant.arity() {
            return Err(Error::Arity {
                expected: variant.arity(),
                got: entries.len(),
            });
        }
        let mut seen = vec![false; free_count];
        for (j, t) in entries.iter().enumerate() {
            match *t {
                Tie::Fixed(v) => {
                    if !v.is_finite() {
                        return Err(Error::MalformedTieMap(format!(
                            "fixed value for {} is not finite",
                            ParamName::ALL[j]
                        )));
                    }
                }
                Tie::Linked { free, multiplier } => {
                    if free >= free_count {
                        return Err(Error::MalformedTieMap(format!(
                            "{} refers to free index {free} but there are {free_count}",
                            ParamName::ALL[j]
                        )));
                    }
                    if multiplier == 0.0 || !multiplier.is_finite() {
                        return Err(Error::MalformedTieMap(format!(
                            "multiplier for {} must be finite and nonzero",
                            ParamName::ALL[j]
                        )));
                    }
                    seen[free] = true;
                }
            }
        }
        if let Some(k) = seen.iter().position(|s| !s) {
            return Err(Error::MalformedTieMap(format!(
                "free index {k} is not referenced"
            )));
        }
        let labels = (0..free_count)
            .map(|k| default_label(&entries, k))
            .collect();
        Ok(Self {
            variant,
            entries,
            free_count,
            labels,
        })
    }

    /// Every parameter free, `theta = phi`.
    pub fn identity(variant: Variant) -> Self {
        let entries = (0..variant.arity())
            .map(|k| Tie::Linked {
                free: k,
                multiplier: 1.0,
            })
            .collect();
        Self {
            variant,
            entries,
            free_count: variant.arity(),
            labels: ParamName::for_variant(variant)
                .iter()
                .map(|n| n.name())
                .collect(),
        }
    }

    pub fn builder(variant: Variant) -> TieMapBuilder {
        TieMapBuilder::new(variant)
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn entries(&self) -> &[Tie] {
        &self.entries
    }

    pub fn free_count(&self) -> usize {
        self.free_count
    }

    pub fn expand(&self, phi: &[f64]) -> Result<ParamVector> {
        if phi.len() != self.free_count {
            return Err(Error::Arity {
                expected: self.free_count,
                got: phi.len(),
            });
        }
        let mut values = [0.0; 6];
        for (j, t) in self.entries.iter().enumerate() {
            values[j] = match *t {
                Tie::Fixed(v) => v,
                Tie::Linked { free, multiplier } => multiplier * phi[free],
            };
        }
        Ok(ParamVector {
            variant: self.variant,
            values,
        })
    }

    /// `g_k = sum_j r_j dl/dtheta_j` over parameters linked to `k`.
    pub fn reduce_grad(&self, model_grad: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.free_count];
        for (j, t) in self.entries.iter().enumerate() {
            if let Tie::Linked { free, multiplier } = *t {
                out[free] += multiplier * model_grad[j];
            }
        }
        out
    }

    /// `H_kl = sum r_j r_m d2l/dtheta_j dtheta_m`.
    pub fn reduce_hess(&self, model_hess: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.free_count);
        for (j, tj) in self.entries.iter().enumerate() {
            let Tie::Linked {
                free: k,
                multiplier: rj,
            } = *tj
            else {
                continue;
            };
            for (m, tm) in self.entries.iter().enumerate() {
                let Tie::Linked {
                    free: l,
                    multiplier: rm,
                } = *tm
                else {
                    continue;
                };
                out[(k, l)] += rj * rm * model_hess[(j, m)];
            }
        }
        out
    }

    /// Free values reproducing `theta` on its linked coordinates, read from
    /// the first parameter linked to each free index.
    pub fn project(&self, theta: &ParamVector) -> Vec<f64> {
        let mut out = vec![f64::NAN; self.free_count];
        for (j, t) in self.entries.iter().enumerate() {
            if let Tie::Linked { free, multiplier } = *t {
                if out[free].is_nan() {
                    out[free] = theta.values[j] / multiplier;
                }
            }
        }
        out
    }

    /// Name of free parameter `k`.
    pub fn free_label(&self, k: usize) -> &'static str {
        self.labels[k]
    }

    pub fn free_labels(&self) -> Vec<&'static str> {
        self.labels.clone()
    }

    /// Human-readable form, e.g. `a, b, c, d=0.5*b, eps=b, p` or `d=1`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::with_capacity(self.entries.len());
        for (j, t) in self.entries.iter().enumerate() {
            let name = ParamName::ALL[j].name();
            let part = match *t {
                Tie::Fixed(v) => format!("{name}={v}"),
                Tie::Linked { free, multiplier } => {
                    let label = self.free_label(free);
                    if label == name {
                        name.to_string()
                    } else if multiplier == 1.0 {
                        format!("{name}={label}")
                    } else {
                        format!("{name}={multiplier}*{label}")
                    }
                }
            };
            parts.push(part);
        }
        parts.join(", ")
    }
}

/// The first model parameter linked to `k` with multiplier 1, else the first
/// linked at all.
fn default_label(entries: &[Tie], k: usize) -> &'static str {
    let mut first = None;
    for (j, t) in entries.iter().enumerate() {
        if let Tie::Linked { free, multiplier } = *t {
            if free == k {
                if multiplier == 1.0 {
                    return ParamName::ALL[j].name();
                }
                first.get_or_insert(ParamName::ALL[j].name());
            }
        }
    }
    first.unwrap_or("?")
}

/// Incremental construction from `fix` and `tie` statements.
#[derive(Debug, Clone)]
pub struct TieMapBuilder {
    variant: Variant,
    fixed: [Option<f64>; 6],
    links: [Option<(ParamName, f64)>; 6],
}

impl TieMapBuilder {
    pub fn new(variant: Variant) -> Self {
        Self {
            variant,
            fixed: [None; 6],
            links: [None; 6],
        }
    }

    /// `name = value`.
    pub fn fix(mut self, name: ParamName, value: f64) -> Self {
        self.fixed[name.index()] = Some(value);
        self
    }

    /// `target = multiplier * source`.
    pub fn tie(mut self, target: ParamName, multiplier: f64, source: ParamName) -> Self {
        self.links[target.index()] = Some((source, multiplier));
        self
    }

    pub fn build(self) -> Result<TieMap> {
        let arity = self.variant.arity();
        for j in 0..6 {
            let used = j < arity;
            let name = ParamName::ALL[j];
            if !used && (self.fixed[j].is_some() || self.links[j].is_some()) {
                return Err(Error::MalformedTieMap(format!(
                    "{name} is not a parameter of {}",
                    self.variant
                )));
            }
            if self.fixed[j].is_some() && self.links[j].is_some() {
                return Err(Error::MalformedTieMap(format!(
                    "{name} is both fixed and tied"
                )));
            }
            if let Some((src, _)) = self.links[j] {
                if src.index() >= arity {
                    return Err(Error::MalformedTieMap(format!(
                        "{src} is not a parameter of {}",
                        self.variant
                    )));
                }
            }
        }

        // Resolve each parameter to (root, accumulated multiplier).
        let mut resolved: Vec<(usize, f64)> = Vec::with_capacity(arity);
        for j in 0..arity {
            let mut cur = j;
            let mut mult = 1.0;
            let mut steps = 0;
            while let Some((src, k)) = self.links[cur] {
                mult *= k;
                cur = src.index();
                steps += 1;
                if steps > arity {
                    return Err(Error::MalformedTieMap(format!(
                        "cyclic tie involving {}",
                        ParamName::ALL[j]
                    )));
                }
            }
            resolved.push((cur, mult));
        }

        let mut free_of_root = [usize::MAX; 6];
        let mut free_count = 0;
        let mut entries = Vec::with_capacity(arity);
        let mut labels = Vec::new();
        for &(root, mult) in &resolved {
            if let Some(v) = self.fixed[root] {
                entries.push(Tie::Fixed(mult * v));
                continue;
            }
            if free_of_root[root] == usize::MAX {
                free_of_root[root] = free_count;
                free_count += 1;
                labels.push(ParamName::ALL[root].name());
            }
            entries.push(Tie::Linked {
                free: free_of_root[root],
                multiplier: mult,
            });
        }
        let mut map = TieMap::new(self.variant, entries, free_count)?;
        map.labels = labels;
        Ok(map)
    }
}
