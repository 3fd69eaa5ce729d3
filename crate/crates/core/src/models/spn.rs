//! Multivariate normal signal-plus-noise model.
//!
//! Datum `t` is an observation of a `N(μ, Σ)` signal through independent
//! `N(0, P_t)` noise, so `z_t ~ N(μ, Σ + P_t)` with a different covariance
//! per index. The unknowns are μ and the unique entries of Σ, packed as
//!
//! ```text
//! θ = [μ_1 .. μ_d, Σ_11, Σ_12, .., Σ_1d, Σ_22, .., Σ_dd]
//! ```
//!
//! (mean first, then the upper triangle of Σ row-major — the same packed
//! order `SymmetricMatrix` uses). Derivatives with respect to an
//! off-diagonal coordinate Σ_ab move both mirrored entries at once.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{packed_len, SymmetricMatrix};
use crate::models::{Model, PseudoDataset};
use crate::rng::Stream;

/// Signal-plus-noise Gaussian model with per-datum noise covariances.
#[derive(Debug, Clone)]
pub struct SignalPlusNoise {
    mean: Vec<f64>,
    sigma: SymmetricMatrix,
    noise: Vec<SymmetricMatrix>,
}

impl SignalPlusNoise {
    /// Builds the model and checks that every total covariance Σ + P_t is
    /// positive definite. The noise covariances themselves may be singular
    /// (zero noise is allowed).
    pub fn new(
        mean: Vec<f64>,
        sigma: SymmetricMatrix,
        noise: Vec<SymmetricMatrix>,
    ) -> Result<Self> {
        let d = mean.len();
        if d == 0 || sigma.dim() != d {
            return Err(Error::dimension(format!(
                "mean dim {} and signal covariance dim {} disagree",
                d,
                sigma.dim()
            )));
        }
        if noise.is_empty() {
            return Err(Error::dimension("at least one noise covariance required"));
        }
        for (t, p) in noise.iter().enumerate() {
            if p.dim() != d {
                return Err(Error::dimension(format!(
                    "noise covariance {t} has dim {}, expected {d}",
                    p.dim()
                )));
            }
            sigma.add(p)?.cholesky().map_err(|_| {
                Error::validation(format!("total covariance Σ + P_{t} is not positive definite"))
            })?;
        }
        Ok(Self { mean, sigma, noise })
    }

    /// The 3-dimensional benchmark configuration: zero mean, signal
    /// covariance with 2's on the diagonal and 0.5 elsewhere, and noise
    /// covariances `P_t = √t · UᵀU` (t = 1..n) built from a single 3x3
    /// matrix U with uniform(0,1) entries drawn from `rng`.
    pub fn benchmark(n: usize, rng: &mut impl Rng) -> Result<Self> {
        let d = 3;
        let sigma = SymmetricMatrix::from_fn(d, |j, l| if j == l { 2.0 } else { 0.5 });
        let u: Vec<f64> = (0..d * d).map(|_| rng.random_range(0.0..1.0)).collect();
        let utu = SymmetricMatrix::from_fn(d, |j, l| {
            (0..d).map(|k| u[k * d + j] * u[k * d + l]).sum()
        });
        let noise = (1..=n)
            .map(|t| utu.scale((t as f64).sqrt()))
            .collect();
        Self::new(vec![0.0; d], sigma, noise)
    }

    pub fn datum_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn noise_cov(&self, t: usize) -> &SymmetricMatrix {
        &self.noise[t]
    }

    /// Total covariance Σ(θ) + P_t at the packed parameter point.
    fn total_cov(&self, theta: &[f64], t: usize) -> SymmetricMatrix {
        let d = self.datum_dim();
        let sigma_part = &theta[d..];
        let mut s = self.noise[t].clone();
        for (sv, tv) in s.packed_mut().iter_mut().zip(sigma_part) {
            *sv += tv;
        }
        s
    }

    /// tr(W·E_ab·W·E_cd) for symmetric W and symmetric one-entry bases.
    #[inline]
    fn basis_trace(w: &SymmetricMatrix, a: usize, b: usize, c: usize, d: usize) -> f64 {
        match (a == b, c == d) {
            (true, true) => w.get(a, c) * w.get(a, c),
            (true, false) => 2.0 * w.get(a, c) * w.get(a, d),
            (false, true) => 2.0 * w.get(a, c) * w.get(b, c),
            (false, false) => {
                2.0 * (w.get(a, c) * w.get(b, d) + w.get(a, d) * w.get(b, c))
            }
        }
    }

    /// Closed-form FIM: mean block Σ_t S_t⁻¹, covariance block
    /// ½·Σ_t tr(S_t⁻¹ E_ab S_t⁻¹ E_cd), zero cross block.
    pub fn fim(&self, theta: &[f64]) -> Result<SymmetricMatrix> {
        let d = self.datum_dim();
        let p = self.param_dim();
        self.check_theta(theta)?;
        let mut fim = SymmetricMatrix::zeros(p);
        for t in 0..self.noise.len() {
            let w = self.total_cov(theta, t).cholesky()?.inverse_spd();
            for i in 0..d {
                for j in i..d {
                    fim.add_to(i, j, w.get(i, j));
                }
            }
            let mut m1 = 0;
            for a in 0..d {
                for b in a..d {
                    let mut m2 = m1;
                    for (c, e) in basis_pairs_from(d, a, b) {
                        fim.add_to(d + m1, d + m2, 0.5 * Self::basis_trace(&w, a, b, c, e));
                        m2 += 1;
                    }
                    m1 += 1;
                }
            }
        }
        Ok(fim)
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.param_dim() {
            return Err(Error::dimension(format!(
                "theta length {} does not match model dimension {}",
                theta.len(),
                self.param_dim()
            )));
        }
        Ok(())
    }
}

/// Iterates packed (c, d) coordinate pairs starting at (a, b) inclusive, in
/// the upper-triangle row-major order.
fn basis_pairs_from(dim: usize, a: usize, b: usize) -> impl Iterator<Item = (usize, usize)> {
    (a..dim).flat_map(move |c| {
        let start = if c == a { b } else { c };
        (start..dim).map(move |e| (c, e))
    })
}

impl Model for SignalPlusNoise {
    fn param_dim(&self) -> usize {
        let d = self.datum_dim();
        d + packed_len(d)
    }

    fn data_len(&self) -> usize {
        self.noise.len()
    }

    fn datum_dim(&self) -> usize {
        self.mean.len()
    }

    fn nominal_theta(&self) -> Vec<f64> {
        let mut theta = self.mean.clone();
        theta.extend_from_slice(self.sigma.packed());
        theta
    }

    fn sample_datum(
        &self,
        theta: &[f64],
        t: usize,
        rng: &mut Stream,
        out: &mut [f64],
    ) -> Result<()> {
        self.check_theta(theta)?;
        let d = self.datum_dim();
        let chol = self.total_cov(theta, t).cholesky()?;
        chol.mvn_sample_into(&theta[..d], rng, out)
    }

    fn log_density(&self, theta: &[f64], t: usize, z: &[f64]) -> Result<f64> {
        self.check_theta(theta)?;
        let d = self.datum_dim();
        let chol = self.total_cov(theta, t).cholesky()?;
        let w = chol.inverse_spd();
        let mut quad = 0.0;
        for i in 0..d {
            for j in 0..d {
                quad += (z[i] - theta[i]) * w.get(i, j) * (z[j] - theta[j]);
            }
        }
        Ok(-0.5 * (d as f64 * (2.0 * std::f64::consts::PI).ln() + chol.log_det_spd() + quad))
    }

    fn grad_datum(&self, theta: &[f64], t: usize, z: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_theta(theta)?;
        let d = self.datum_dim();
        let w = self.total_cov(theta, t).cholesky()?.inverse_spd();
        // q = S⁻¹ (z − μ)
        let mut q = [0.0; 8];
        let q = &mut q[..d];
        for i in 0..d {
            q[i] = (0..d).map(|j| w.get(i, j) * (z[j] - theta[j])).sum();
        }
        out[..d].copy_from_slice(q);
        // ∂l/∂Σ_ab = ½(qᵀE_ab q − tr(S⁻¹E_ab))
        let mut m = d;
        for a in 0..d {
            for b in a..d {
                out[m] = if a == b {
                    0.5 * (q[a] * q[a] - w.get(a, a))
                } else {
                    q[a] * q[b] - w.get(a, b)
                };
                m += 1;
            }
        }
        Ok(())
    }

    /// Analytic per-datum Hessian. With W = S_t⁻¹ and q = W(z − μ):
    /// the μμ block is −W, the μΣ block is −W·E_ab·q, and the ΣΣ block is
    /// ½·tr(W·E_cd·W·E_ab) − (E_cd·q)ᵀ·W·(E_ab·q).
    fn hessian_datum(&self, theta: &[f64], t: usize, z: &[f64]) -> Result<SymmetricMatrix> {
        self.check_theta(theta)?;
        let d = self.datum_dim();
        let s = packed_len(d);
        let w = self.total_cov(theta, t).cholesky()?.inverse_spd();
        let mut q = vec![0.0; d];
        for i in 0..d {
            q[i] = (0..d).map(|j| w.get(i, j) * (z[j] - theta[j])).sum();
        }
        // u_m = E_m q and r_m = W u_m for each packed Σ coordinate
        let mut u = vec![vec![0.0; d]; s];
        let mut r = vec![vec![0.0; d]; s];
        let mut m = 0;
        for a in 0..d {
            for b in a..d {
                if a == b {
                    u[m][a] = q[a];
                } else {
                    u[m][a] = q[b];
                    u[m][b] = q[a];
                }
                for i in 0..d {
                    r[m][i] = (0..d).map(|j| w.get(i, j) * u[m][j]).sum();
                }
                m += 1;
            }
        }

        let mut h = SymmetricMatrix::zeros(d + s);
        for i in 0..d {
            for j in i..d {
                h.set(i, j, -w.get(i, j));
            }
            for m in 0..s {
                h.set(i, d + m, -r[m][i]);
            }
        }
        let mut m1 = 0;
        for a in 0..d {
            for b in a..d {
                let mut m2 = m1;
                for (c, e) in basis_pairs_from(d, a, b) {
                    let quad: f64 = (0..d).map(|i| u[m2][i] * r[m1][i]).sum();
                    h.set(
                        d + m1,
                        d + m2,
                        0.5 * Self::basis_trace(&w, a, b, c, e) - quad,
                    );
                    m2 += 1;
                }
                m1 += 1;
            }
        }
        Ok(h)
    }

    fn analytic_fim(&self, theta: &[f64]) -> Option<Result<SymmetricMatrix>> {
        Some(self.fim(theta))
    }

    fn sample_pseudo_data(&self, theta: &[f64], rng: &mut Stream) -> Result<PseudoDataset> {
        self.check_theta(theta)?;
        let d = self.datum_dim();
        let n = self.data_len();
        let mut values = vec![0.0; n * d];
        for t in 0..n {
            let chol = self.total_cov(theta, t).cholesky()?;
            chol.mvn_sample_into(&theta[..d], rng, &mut values[t * d..(t + 1) * d])?;
        }
        PseudoDataset::new(d, values)
    }
}
