//! Statistical models: pseudo-data sampling plus log-likelihood gradients.
//!
//! A model knows how to draw a dataset of `data_len` independent vectors at
//! a given parameter point and how to evaluate per-datum log-densities and
//! scores there. Data only have to be independent across the index `t`, not
//! identically distributed, which is why sampling and evaluation take the
//! datum index.

mod mixture;
mod quadratic;
mod scalar_gaussian;
mod spn;

pub use mixture::MixtureGaussian;
pub use quadratic::Quadratic;
pub use scalar_gaussian::{ScalarGaussian, ScalarGaussianKnownVar};
pub use spn::SignalPlusNoise;

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::oracle::{fd_hessian_from_gradient, FdConfig};
use crate::rng::Stream;

/// A dataset of `len` independent vectors, stored flat.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoDataset {
    datum_dim: usize,
    values: Vec<f64>,
}

impl PseudoDataset {
    pub fn new(datum_dim: usize, values: Vec<f64>) -> Result<Self> {
        if datum_dim == 0 || values.is_empty() || values.len() % datum_dim != 0 {
            return Err(Error::dimension(format!(
                "dataset of {} values cannot hold vectors of dim {}",
                values.len(),
                datum_dim
            )));
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::validation("non-finite entry in dataset"));
        }
        Ok(Self { datum_dim, values })
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.datum_dim
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn datum_dim(&self) -> usize {
        self.datum_dim
    }

    #[inline]
    pub fn datum(&self, t: usize) -> &[f64] {
        &self.values[t * self.datum_dim..(t + 1) * self.datum_dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.datum_dim)
    }
}

/// Sampling and differentiation capabilities of a statistical model.
///
/// The log-likelihood of a dataset is the sum of per-datum log-densities,
/// so the default `grad_total`/`hessian_total` sum the per-datum values in
/// index order. Models without analytic second derivatives inherit a
/// central-difference Hessian of their analytic gradient.
pub trait Model: Send + Sync {
    /// Parameter dimension p.
    fn param_dim(&self) -> usize;

    /// Number of data vectors per pseudo-dataset.
    fn data_len(&self) -> usize;

    /// Dimension of each data vector.
    fn datum_dim(&self) -> usize;

    /// The parameter point the model was configured at.
    fn nominal_theta(&self) -> Vec<f64>;

    /// Draws the `t`-th datum at `theta` into `out`.
    fn sample_datum(&self, theta: &[f64], t: usize, rng: &mut Stream, out: &mut [f64])
        -> Result<()>;

    /// Log-density of datum `t` at `z`.
    fn log_density(&self, theta: &[f64], t: usize, z: &[f64]) -> Result<f64>;

    /// Score of datum `t` at `z`, written into `out` (length p).
    fn grad_datum(&self, theta: &[f64], t: usize, z: &[f64], out: &mut [f64]) -> Result<()>;

    /// Hessian of the per-datum log-density. Defaults to a central
    /// difference of the analytic gradient.
    fn hessian_datum(&self, theta: &[f64], t: usize, z: &[f64]) -> Result<SymmetricMatrix> {
        fd_hessian_from_gradient(
            |point, out| self.grad_datum(point, t, z, out),
            theta,
            &FdConfig::default(),
        )
    }

    /// Closed-form FIM at `theta`, when the model has one.
    fn analytic_fim(&self, _theta: &[f64]) -> Option<Result<SymmetricMatrix>> {
        None
    }

    /// Draws a full pseudo-dataset at `theta`.
    fn sample_pseudo_data(&self, theta: &[f64], rng: &mut Stream) -> Result<PseudoDataset> {
        let d = self.datum_dim();
        let n = self.data_len();
        let mut values = vec![0.0; n * d];
        for t in 0..n {
            self.sample_datum(theta, t, rng, &mut values[t * d..(t + 1) * d])?;
        }
        PseudoDataset::new(d, values)
    }

    /// Total log-likelihood of `data` at `theta`.
    fn log_likelihood(&self, theta: &[f64], data: &PseudoDataset) -> Result<f64> {
        let mut sum = 0.0;
        for (t, z) in data.iter().enumerate() {
            sum += self.log_density(theta, t, z)?;
        }
        Ok(sum)
    }

    /// Total score: the sum of per-datum scores, in index order.
    fn grad_total(&self, theta: &[f64], data: &PseudoDataset, out: &mut [f64]) -> Result<()> {
        let p = self.param_dim();
        debug_assert_eq!(out.len(), p);
        out.fill(0.0);
        let mut buf = vec![0.0; p];
        for (t, z) in data.iter().enumerate() {
            self.grad_datum(theta, t, z, &mut buf)?;
            for (o, b) in out.iter_mut().zip(&buf) {
                *o += b;
            }
        }
        Ok(())
    }

    /// Total log-likelihood Hessian: the sum of per-datum Hessians.
    fn hessian_total(&self, theta: &[f64], data: &PseudoDataset) -> Result<SymmetricMatrix> {
        let mut sum = SymmetricMatrix::zeros(self.param_dim());
        for (t, z) in data.iter().enumerate() {
            let h = self.hessian_datum(theta, t, z)?;
            for (a, b) in sum.packed_mut().iter_mut().zip(h.packed()) {
                *a += b;
            }
        }
        Ok(sum)
    }
}
