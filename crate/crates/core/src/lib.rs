//! Monte Carlo estimation of the Fisher information matrix via simultaneous
//! perturbations.
//!
//! The Fisher information matrix of a model rarely has a closed form. This
//! crate estimates it by averaging simultaneous-perturbation Hessian
//! estimates over pseudo data drawn from the model, and implements two
//! sampling schemes:
//!
//! * the standard scheme, where one perturbation direction is shared by the
//!   whole dataset per Hessian estimate, and
//! * the independent-perturbation scheme, where each datum gets its own
//!   direction, trading extra perturbation draws for a large variance
//!   reduction in the estimated entries.
//!
//! On top of the estimators sits an experiment harness (see [`experiments`]
//! and the `spfim` binary) that measures per-entry variances, wall time,
//! spectral-norm accuracy and the inner/outer averaging trade-off for
//! benchmark models.

pub mod error;
pub mod matrix;
pub mod models;
pub mod oracle;
pub mod parallel;
pub mod perturbation;
pub mod rng;
pub mod matrix;
pub mod perturbation;
pub mod rng;

pub use error::{Error, Result};
pub use matrix::{LowerTriangularFactor, SymmetricMatrix};
