//! Quadratic log-likelihood toy model for exactness tests.
//!
//! `L(θ) = −½·θᵀAθ` for a fixed SPD matrix A, as a single-datum model whose
//! "data" carry no information: the score is −Aθ regardless of z. The
//! Hessian is the constant −A, so simultaneous-perturbation estimates have
//! no curvature remainder and identities can be checked exactly.

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::models::Model;
use crate::rng::Stream;

#[derive(Debug, Clone)]
pub struct Quadratic {
    a: SymmetricMatrix,
}

impl Quadratic {
    pub fn new(a: SymmetricMatrix) -> Result<Self> {
        a.cholesky()
            .map_err(|_| Error::validation("quadratic model matrix must be positive definite"))?;
        Ok(Self { a })
    }

    pub fn matrix(&self) -> &SymmetricMatrix {
        &self.a
    }
}

impl Model for Quadratic {
    fn param_dim(&self) -> usize {
        self.a.dim()
    }

    fn data_len(&self) -> usize {
        1
    }

    fn datum_dim(&self) -> usize {
        1
    }

    fn nominal_theta(&self) -> Vec<f64> {
        vec![0.0; self.a.dim()]
    }

    fn sample_datum(
        &self,
        _theta: &[f64],
        _t: usize,
        _rng: &mut Stream,
        out: &mut [f64],
    ) -> Result<()> {
        out[0] = 0.0;
        Ok(())
    }

    fn log_density(&self, theta: &[f64], _t: usize, _z: &[f64]) -> Result<f64> {
        let p = self.a.dim();
        let mut quad = 0.0;
        for i in 0..p {
            for j in 0..p {
                quad += theta[i] * self.a.get(i, j) * theta[j];
            }
        }
        Ok(-0.5 * quad)
    }

    fn grad_datum(&self, theta: &[f64], _t: usize, _z: &[f64], out: &mut [f64]) -> Result<()> {
        let p = self.a.dim();
        for i in 0..p {
            out[i] = -(0..p).map(|j| self.a.get(i, j) * theta[j]).sum::<f64>();
        }
        Ok(())
    }

    fn hessian_datum(&self, _theta: &[f64], _t: usize, _z: &[f64]) -> Result<SymmetricMatrix> {
        Ok(self.a.scale(-1.0))
    }

    fn analytic_fim(&self, _theta: &[f64]) -> Option<Result<SymmetricMatrix>> {
        Some(Ok(self.a.clone()))
    }
}
