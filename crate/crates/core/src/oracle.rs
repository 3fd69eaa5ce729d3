//! Independent ground truth: finite-difference derivatives and the Monte
//! Carlo true-FIM approximation.
//!
//! Everything in here deliberately avoids the analytic gradient/Hessian
//! code paths it is used to validate, except where a model only exposes a
//! gradient (then the Hessian is a central difference of that gradient).

use crate::error::{Error, Result};
use crate::matrix::SymmetricMatrix;
use crate::models::Model;
use crate::parallel::deterministic_fold;
use crate::rng::{stream, Purpose};

/// Central finite-difference settings.
#[derive(Debug, Clone, Copy)]
pub struct FdConfig {
    pub step: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        Self { step: 1e-5 }
    }
}

impl FdConfig {
    pub fn new(step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::validation(format!(
                "finite-difference step must be positive, got {step}"
            )));
        }
        Ok(Self { step })
    }
}

fn check_finite(value: f64, what: &str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::OracleFailure(format!(
            "{what} evaluated to {value}"
        )))
    }
}

/// Central-difference gradient of a scalar function, error O(step²).
pub fn fd_gradient(
    mut f: impl FnMut(&[f64]) -> Result<f64>,
    theta: &[f64],
    fd: &FdConfig,
) -> Result<Vec<f64>> {
    let h = fd.step;
    let mut point = theta.to_vec();
    let mut grad = vec![0.0; theta.len()];
    for j in 0..theta.len() {
        point[j] = theta[j] + h;
        let plus = check_finite(f(&point)?, "fd_gradient function")?;
        point[j] = theta[j] - h;
        let minus = check_finite(f(&point)?, "fd_gradient function")?;
        point[j] = theta[j];
        grad[j] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}

/// Central-difference Hessian of a scalar function, error O(step²).
/// Symmetric by construction: only the upper triangle is evaluated.
pub fn fd_hessian(
    mut f: impl FnMut(&[f64]) -> Result<f64>,
    theta: &[f64],
    fd: &FdConfig,
) -> Result<SymmetricMatrix> {
    let h = fd.step;
    let p = theta.len();
    let mut point = theta.to_vec();
    let mut eval = |pt: &[f64]| -> Result<f64> { check_finite(f(pt)?, "fd_hessian function") };

    let center = eval(&point)?;
    let mut out = SymmetricMatrix::zeros(p);
    for j in 0..p {
        point[j] = theta[j] + h;
        let plus = eval(&point)?;
        point[j] = theta[j] - h;
        let minus = eval(&point)?;
        point[j] = theta[j];
        out.set(j, j, (plus - 2.0 * center + minus) / (h * h));

        for l in (j + 1)..p {
            point[j] = theta[j] + h;
            point[l] = theta[l] + h;
            let pp = eval(&point)?;
            point[l] = theta[l] - h;
            let pm = eval(&point)?;
            point[j] = theta[j] - h;
            let mm = eval(&point)?;
            point[l] = theta[l] + h;
            let mp = eval(&point)?;
            point[j] = theta[j];
            point[l] = theta[l];
            out.set(j, l, (pp - pm - mp + mm) / (4.0 * h * h));
        }
    }
    Ok(out)
}

/// Central-difference Hessian from a gradient function, symmetrized.
/// Used where a model exposes an analytic gradient but no second
/// derivatives; error is O(step²) of the gradient.
pub fn fd_hessian_from_gradient(
    mut grad: impl FnMut(&[f64], &mut [f64]) -> Result<()>,
    theta: &[f64],
    fd: &FdConfig,
) -> Result<SymmetricMatrix> {
    let h = fd.step;
    let p = theta.len();
    let mut point = theta.to_vec();
    let mut g_plus = vec![0.0; p];
    let mut g_minus = vec![0.0; p];
    // dense column-by-column difference, then symmetrize
    let mut dense = vec![0.0; p * p];
    for j in 0..p {
        point[j] = theta[j] + h;
        grad(&point, &mut g_plus)?;
        point[j] = theta[j] - h;
        grad(&point, &mut g_minus)?;
        point[j] = theta[j];
        for i in 0..p {
            let d = (g_plus[i] - g_minus[i]) / (2.0 * h);
            check_finite(d, "fd_hessian_from_gradient column")?;
            dense[i * p + j] = d;
        }
    }
    Ok(SymmetricMatrix::from_fn(p, |j, l| {
        0.5 * (dense[j * p + l] + dense[l * p + j])
    }))
}

/// Monte Carlo approximation of the true FIM: the average of the negative
/// log-likelihood Hessian over `replicates` fresh pseudo-datasets.
///
/// Deterministic given `seed`, for any worker count.
pub fn mc_true_fim<M: Model + ?Sized>(
    model: &M,
    theta: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<SymmetricMatrix> {
    if replicates == 0 {
        return Err(Error::validation("mc_true_fim needs at least 1 replicate"));
    }
    if theta.len() != model.param_dim() {
        return Err(Error::dimension(format!(
            "theta length {} does not match model dimension {}",
            theta.len(),
            model.param_dim()
        )));
    }
    let p = model.param_dim();
    let sum = deterministic_fold(
        replicates,
        || SymmetricMatrix::zeros(p),
        |acc, r| -> Result<()> {
            let mut rng = stream(seed, Purpose::TruthReplicate, r as u64);
            let data = model
                .sample_pseudo_data(theta, &mut rng)
                .map_err(|e| Error::OracleFailure(format!("replicate {}: {e}", r + 1)))?;
            let hess = model
                .hessian_total(theta, &data)
                .map_err(|e| Error::OracleFailure(format!("replicate {}: {e}", r + 1)))?;
            for (a, h) in acc.packed_mut().iter_mut().zip(hess.packed()) {
                *a += h;
            }
            Ok(())
        },
        |a, b| {
            for (x, y) in a.packed_mut().iter_mut().zip(b.packed()) {
                *x += y;
            }
        },
    )?;
    Ok(sum.scale(-1.0 / replicates as f64))
}

/// ‖estimate − truth‖ / ‖truth‖ in the spectral norm.
pub fn relative_spectral_error(
    estimate: &SymmetricMatrix,
    truth: &SymmetricMatrix,
) -> Result<f64> {
    let diff = estimate.sub(truth)?;
    let denom = truth.spectral_norm()?;
    if denom == 0.0 {
        return Err(Error::validation(
            "relative spectral error undefined for zero truth matrix",
        ));
    }
    Ok(diff.spectral_norm()? / denom)
}
