//! Two-component scalar Gaussian mixture.
//!
//! Density `f(z, θ) = λ·N(z; μ₁, σ₁²) + (1−λ)·N(z; μ₂, σ₂²)` with
//! `θ = [λ, μ₁, σ₁², μ₂, σ₂²]`. Sampling draws an explicit component
//! indicator; no closed-form FIM exists, so the Hessian comes from the
//! trait's central difference of the analytic score.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::models::Model;
use crate::rng::Stream;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

#[derive(Debug, Clone)]
pub struct MixtureGaussian {
    theta: [f64; 5],
    n: usize,
}

fn validate(theta: &[f64]) -> Result<()> {
    let lambda = theta[0];
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::validation(format!(
            "mixture weight must lie in (0, 1), got {lambda}"
        )));
    }
    for (name, var) in [("first", theta[2]), ("second", theta[4])] {
        if !(var.is_finite() && var > 0.0) {
            return Err(Error::validation(format!(
                "{name} component variance must be positive, got {var}"
            )));
        }
    }
    Ok(())
}

#[inline]
fn normal_density(z: f64, mu: f64, var: f64) -> f64 {
    let d = z - mu;
    (-d * d / (2.0 * var)).exp() / (TWO_PI * var).sqrt()
}

impl MixtureGaussian {
    /// `theta = [λ, μ₁, σ₁², μ₂, σ₂²]`, dataset size `n`.
    pub fn new(theta: [f64; 5], n: usize) -> Result<Self> {
        validate(&theta)?;
        if n == 0 {
            return Err(Error::validation("dataset size must be at least 1"));
        }
        Ok(Self { theta, n })
    }

    /// Mixture density at `z`; errors on invalid component variances so a
    /// wildly perturbed parameter point fails loudly instead of silently
    /// producing NaN.
    fn density(theta: &[f64], z: f64) -> Result<(f64, f64, f64)> {
        validate(theta)?;
        let phi1 = normal_density(z, theta[1], theta[2]);
        let phi2 = normal_density(z, theta[3], theta[4]);
        let f = theta[0] * phi1 + (1.0 - theta[0]) * phi2;
        if f <= 0.0 || !f.is_finite() {
            return Err(Error::validation(format!(
                "mixture density underflowed at z = {z}"
            )));
        }
        Ok((f, phi1, phi2))
    }
}

impl Model for MixtureGaussian {
    fn param_dim(&self) -> usize {
        5
    }

    fn data_len(&self) -> usize {
        self.n
    }

    fn datum_dim(&self) -> usize {
        1
    }

    fn nominal_theta(&self) -> Vec<f64> {
        self.theta.to_vec()
    }

    fn sample_datum(
        &self,
        theta: &[f64],
        _t: usize,
        rng: &mut Stream,
        out: &mut [f64],
    ) -> Result<()> {
        validate(theta)?;
        let w: f64 = rng.random_range(0.0..1.0);
        let (mu, var) = if w < theta[0] {
            (theta[1], theta[2])
        } else {
            (theta[3], theta[4])
        };
        let g: f64 = rng.sample(StandardNormal);
        out[0] = mu + var.sqrt() * g;
        Ok(())
    }

    fn log_density(&self, theta: &[f64], _t: usize, z: &[f64]) -> Result<f64> {
        Ok(Self::density(theta, z[0])?.0.ln())
    }

    /// Analytic score. With responsibilities w_c = (component mass)·φ_c/f:
    /// ∂/∂λ = (φ₁−φ₂)/f, ∂/∂μ_c = w_c(z−μ_c)/σ_c²,
    /// ∂/∂σ_c² = w_c((z−μ_c)² − σ_c²)/(2σ_c⁴).
    fn grad_datum(&self, theta: &[f64], _t: usize, z: &[f64], out: &mut [f64]) -> Result<()> {
        let z = z[0];
        let (f, phi1, phi2) = Self::density(theta, z)?;
        let (lambda, mu1, var1, mu2, var2) = (theta[0], theta[1], theta[2], theta[3], theta[4]);
        let w1 = lambda * phi1 / f;
        let w2 = (1.0 - lambda) * phi2 / f;
        let (d1, d2) = (z - mu1, z - mu2);
        out[0] = (phi1 - phi2) / f;
        out[1] = w1 * d1 / var1;
        out[2] = w1 * (d1 * d1 - var1) / (2.0 * var1 * var1);
        out[3] = w2 * d2 / var2;
        out[4] = w2 * (d2 * d2 - var2) / (2.0 * var2 * var2);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::test_support;
    use crate::oracle::{fd_hessian, FdConfig};
    use crate::rng::{stream, Purpose};

    const BENCH_THETA: [f64; 5] = [0.2, 0.0, 4.0, 1.0, 9.0];

    #[test]
    fn rejects_invalid_parameters() {
        assert!(MixtureGaussian::new([0.0, 0.0, 1.0, 1.0, 1.0], 5).is_err());
        assert!(MixtureGaussian::new([1.0, 0.0, 1.0, 1.0, 1.0], 5).is_err());
        assert!(MixtureGaussian::new([0.5, 0.0, -1.0, 1.0, 1.0], 5).is_err());
        assert!(MixtureGaussian::new([0.5, 0.0, 1.0, 1.0, 0.0], 5).is_err());
        assert!(MixtureGaussian::new([0.5, 0.0, 1.0, 1.0, 1.0], 0).is_err());
    }

    /// When the two components coincide, the density no longer depends on
    /// the weight, so ∂/∂λ vanishes identically.
    #[test]
    fn coinciding_components_kill_weight_gradient() {
        let model = MixtureGaussian::new([0.3, 1.0, 2.0, 1.0, 2.0], 1).unwrap();
        let mut g = vec![0.0; 5];
        for z in [-3.0, -0.5, 1.0, 2.5, 8.0] {
            model
                .grad_datum(&model.nominal_theta(), 0, &[z], &mut g)
                .unwrap();
            assert_eq!(g[0], 0.0, "z = {z}");
        }
    }

    #[test]
    fn score_matches_finite_differences() {
        let model = MixtureGaussian::new(BENCH_THETA, 12).unwrap();
        let err = test_support::score_vs_fd_error(&model, &BENCH_THETA, 31);
        assert!(err < 1e-6, "relative error {err}");
    }

    #[test]
    fn grad_total_is_sum_of_per_datum_scores() {
        let model = MixtureGaussian::new(BENCH_THETA, 20).unwrap();
        test_support::total_is_sum_of_data(&model, &BENCH_THETA, 32);
    }

    #[test]
    fn score_mean_is_zero_at_true_theta() {
        let model = MixtureGaussian::new(BENCH_THETA, 1).unwrap();
        test_support::score_mean_is_zero(&model, &BENCH_THETA, 1_000_000, 33);
    }

    /// Sample mean over many draws approaches λμ₁ + (1−λ)μ₂ = 0.8.
    #[test]
    fn sample_mean_matches_mixture_mean() {
        let model = MixtureGaussian::new(BENCH_THETA, 1).unwrap();
        let mut rng = stream(35, Purpose::Setup, 0);
        let draws = 1_000_000usize;
        let mut z = [0.0];
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..draws {
            model
                .sample_datum(&BENCH_THETA, 0, &mut rng, &mut z)
                .unwrap();
            sum += z[0];
            sum_sq += z[0] * z[0];
        }
        let nf = draws as f64;
        let mean = sum / nf;
        let var = sum_sq / nf - mean * mean;
        let se = (var / nf).sqrt();
        assert!(
            (mean - 0.8).abs() < 3.0 * se,
            "sample mean {mean} vs 0.8 ± 3·{se}"
        );
    }

    /// The default (difference-of-score) Hessian agrees with a second
    /// difference of the log-density itself.
    #[test]
    fn default_hessian_is_consistent_with_log_density() {
        let model = MixtureGaussian::new(BENCH_THETA, 1).unwrap();
        let z = [1.7];
        let from_grad = model.hessian_datum(&BENCH_THETA, 0, &z).unwrap();
        let from_density = fd_hessian(
            |point| model.log_density(point, 0, &z),
            &BENCH_THETA,
            &FdConfig::default(),
        )
        .unwrap();
        let scale = from_density.spectral_norm().unwrap().max(1.0);
        for j in 0..5 {
            for l in j..5 {
                assert!(
                    (from_grad.get(j, l) - from_density.get(j, l)).abs() < 1e-4 * scale,
                    "entry ({j},{l})"
                );
            }
        }
    }
}
