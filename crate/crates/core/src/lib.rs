//! Extended Burr Type XII distribution family.
//!
//! A member of the family has cumulative distribution function
//!
//! ```text
//! F(x) = 1 - (1 + g(x))^(-a)
//! ```
//!
//! for an outer shape `a > 0` and a non-decreasing generator `g` that diverges
//! at infinity. Four generators are provided (see [`gfun`]); the classic
//! Burr XII law is the `G0` member.
//!
//! The crate is `no_std` (it needs `alloc`) and does no IO. All transcendental
//! functions go through `libm`, so results are bit-identical across platforms.

#![no_std]

extern crate alloc;

#[cfg(any(test, feature = "testkit"))]
extern crate std;

pub mod dist;
mod error;
pub mod gfun;
pub(crate) mod math;
pub mod mle;
pub mod rng;
pub mod select;
pub mod sim;

#[cfg(any(test, feature = "testkit"))]
pub mod testkit;

pub use dist::{Ebxii, ModeResult};
pub use error::{Error, Result};
pub use gfun::{GSpec, Guard, Variant};
pub use math::normal_quantile;
pub use mle::{
    confidence_intervals, fit, hessian, loglik, score, Bounds, FitOptions, FitResult, Interval,
    Matrix, ParamName, ParamVector, Tie, TieMap,
};
pub use select::{aic, bic, compare, Criterion, ModelFitSummary, Provenance, RankedTable};
pub use sim::{run_study, Scenario, StudyReport, StudyRow};
