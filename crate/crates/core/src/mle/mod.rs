//! Maximum-likelihood estimation.

mod fit;
mod likelihood;
mod linalg;
mod optim;
mod params;

pub use fit::{confidence_intervals, default_init, fit, Bounds, FitOptions, FitResult, Interval};
pub use likelihood::{hessian, loglik, score};
pub use linalg::Matrix;
pub use params::{ParamName, ParamVector, Tie, TieMap, TieMapBuilder};
