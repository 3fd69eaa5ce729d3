//! Scalar Gaussian models with closed-form information, used as ground
//! truth in oracle and estimator tests.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::models::Model;
use crate::rng::Stream;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// `N(μ, σ²)` with both parameters unknown: `θ = [μ, σ²]`, p = 2.
/// Per-datum FIM is `diag(1/σ², 1/(2σ⁴))`.
#[derive(Debug, Clone)]
pub struct ScalarGaussian {
    mu: f64,
    var: f64,
    n: usize,
}

impl ScalarGaussian {
    pub fn new(mu: f64, var: f64, n: usize) -> Result<Self> {
        check_var(var)?;
        if n == 0 {
            return Err(Error::validation("dataset size must be at least 1"));
        }
        Ok(Self { mu, var, n })
    }
}

fn check_var(var: f64) -> Result<()> {
    if !(var.is_finite() && var > 0.0) {
        return Err(Error::validation(format!(
            "variance must be positive, got {var}"
        )));
    }
    Ok(())
}

impl Model for ScalarGaussian {
    fn param_dim(&self) -> usize {
        2
    }

    fn data_len(&self) -> usize {
        self.n
    }

    fn datum_dim(&self) -> usize {
        1
    }

    fn nominal_theta(&self) -> Vec<f64> {
        vec![self.mu, self.var]
    }

    fn sample_datum(
        &self,
        theta: &[f64],
        _t: usize,
        rng: &mut Stream,
        out: &mut [f64],
    ) -> Result<()> {
        check_var(theta[1])?;
        let g: f64 = rng.sample(StandardNormal);
        out[0] = theta[0] + theta[1].sqrt() * g;
        Ok(())
    }

    fn log_density(&self, theta: &[f64], _t: usize, z: &[f64]) -> Result<f64> {
        check_var(theta[1])?;
        let d = z[0] - theta[0];
        Ok(-0.5 * (TWO_PI * theta[1]).ln() - d * d / (2.0 * theta[1]))
    }

    fn grad_datum(&self, theta: &[f64], _t: usize, z: &[f64], out: &mut [f64]) -> Result<()> {
        check_var(theta[1])?;
        let (mu, var) = (theta[0], theta[1]);
        let d = z[0] - mu;
        out[0] = d / var;
        out[1] = (d * d - var) / (2.0 * var * var);
        Ok(())
    }

    fn hessian_datum(&self, theta: &[f64], _t: usize, z: &[f64]) -> Result<SymmetricMatrix> {
        check_var(theta[1])?;
        let (mu, var) = (theta[0], theta[1]);
        let d = z[0] - mu;
        SymmetricMatrix::from_packed(
            vec![
                -1.0 / var,
                -d / (var * var),
                0.5 / (var * var) - d * d / (var * var * var),
            ],
            2,
        )
    }

    fn analytic_fim(&self, theta: &[f64]) -> Option<Result<SymmetricMatrix>> {
        if let Err(e) = check_var(theta[1]) {
            return Some(Err(e));
        }
        let var = theta[1];
        let nf = self.n as f64;
        Some(SymmetricMatrix::from_packed(
            vec![nf / var, 0.0, nf / (2.0 * var * var)],
            2,
        ))
    }
}

/// `N(μ, σ²)` with known variance: `θ = [μ]`, p = 1. The log-likelihood is
/// quadratic in μ, so the Hessian is the constant `−n/σ²` and every
/// simultaneous-perturbation estimate is exact.
#[derive(Debug, Clone)]
pub struct ScalarGaussianKnownVar {
    mu: f64,
    var: f64,
    n: usize,
}

impl ScalarGaussianKnownVar {
    pub fn new(mu: f64, var: f64, n: usize) -> Result<Self> {
        check_var(var)?;
        if n == 0 {
            return Err(Error::validation("dataset size must be at least 1"));
        }
        Ok(Self { mu, var, n })
    }
}

impl Model for ScalarGaussianKnownVar {
    fn param_dim(&self) -> usize {
        1
    }

    fn data_len(&self) -> usize {
        self.n
    }

    fn datum_dim(&self) -> usize {
        1
    }

    fn nominal_theta(&self) -> Vec<f64> {
        vec![self.mu]
    }

    fn sample_datum(
        &self,
        theta: &[f64],
        _t: usize,
        rng: &mut Stream,
        out: &mut [f64],
    ) -> Result<()> {
        let g: f64 = rng.sample(StandardNormal);
        out[0] = theta[0] + self.var.sqrt() * g;
        Ok(())
    }

    fn log_density(&self, theta: &[f64], _t: usize, z: &[f64]) -> Result<f64> {
        let d = z[0] - theta[0];
        Ok(-0.5 * (TWO_PI * self.var).ln() - d * d / (2.0 * self.var))
    }

    fn grad_datum(&self, theta: &[f64], _t: usize, z: &[f64], out: &mut [f64]) -> Result<()> {
        out[0] = (z[0] - theta[0]) / self.var;
        Ok(())
    }

    fn hessian_datum(&self, _theta: &[f64], _t: usize, _z: &[f64]) -> Result<SymmetricMatrix> {
        SymmetricMatrix::from_packed(vec![-1.0 / self.var], 1)
    }

    fn analytic_fim(&self, _theta: &[f64]) -> Option<Result<SymmetricMatrix>> {
        Some(SymmetricMatrix::from_packed(
            vec![self.n as f64 / self.var],
            1,
        ))
    }
}
