//! Simultaneous-perturbation direction vectors.
//!
//! A valid perturbation distribution is symmetric about zero, mean-zero,
//! uniformly bounded, and has finite mean absolute inverse, so that the
//! elementwise ratio Δ_l/Δ_j has zero mean and finite variance `v`. Both
//! kinds here qualify; Bernoulli ±1 (with v = 1) is the default everywhere.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Supported perturbation distributions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationKind {
    /// ±1 with equal probability.
    BernoulliPm1,
    /// Uniform on ±[a, b] with 0 < a < b, sign chosen by a fair coin.
    /// Keeping the magnitude away from zero is what bounds E|1/Δ|.
    SegmentedUniform { a: f64, b: f64 },
}

/// A perturbation distribution together with the constants that enter the
/// variance formulas of the estimator reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationSpec {
    #[serde(flatten)]
    pub kind: PerturbationKind,
    /// var(Δ_l/Δ_j) for independent coordinates, computed analytically.
    #[serde(skip)]
    pub ratio_variance_v: f64,
    /// Uniform bound on |Δ_j|.
    #[serde(skip)]
    pub magnitude_bound: f64,
}

impl PerturbationSpec {
    /// Bernoulli ±1 directions; Δ is its own elementwise inverse and v = 1.
    pub fn bernoulli() -> Self {
        Self {
            kind: PerturbationKind::BernoulliPm1,
            ratio_variance_v: 1.0,
            magnitude_bound: 1.0,
        }
    }

    /// Uniform magnitude on [a, b] with a random sign.
    ///
    /// v = E[Δ²]·E[1/Δ²] = (a² + ab + b²) / (3ab).
    pub fn segmented_uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) || a <= 0.0 || b <= a {
            return Err(Error::validation(format!(
                "segmented uniform needs 0 < a < b, got a={a}, b={b}"
            )));
        }
        Ok(Self {
            kind: PerturbationKind::SegmentedUniform { a, b },
            ratio_variance_v: (a * a + a * b + b * b) / (3.0 * a * b),
            magnitude_bound: b,
        })
    }

    /// Rebuilds the derived constants after deserializing the kind alone.
    pub fn from_kind(kind: PerturbationKind) -> Result<Self> {
        match kind {
            PerturbationKind::BernoulliPm1 => Ok(Self::bernoulli()),
            PerturbationKind::SegmentedUniform { a, b } => Self::segmented_uniform(a, b),
        }
    }
}

/// One sampled direction Δ with its elementwise inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationVector {
    delta: Vec<f64>,
    delta_inv: Vec<f64>,
}

impl PerturbationVector {
    pub fn dim(&self) -> usize {
        self.delta.len()
    }

    pub fn delta(&self) -> &[f64] {
        &self.delta
    }

    pub fn delta_inv(&self) -> &[f64] {
        &self.delta_inv
    }
}

/// Draws one p-dimensional perturbation vector from `spec`.
pub fn sample_perturbation(
    spec: &PerturbationSpec,
    p: usize,
    rng: &mut impl Rng,
) -> PerturbationVector {
    let mut delta = Vec::with_capacity(p);
    let mut delta_inv = Vec::with_capacity(p);
    match spec.kind {
        PerturbationKind::BernoulliPm1 => {
            for _ in 0..p {
                let d = if rng.random::<bool>() { 1.0 } else { -1.0 };
                delta.push(d);
                delta_inv.push(d); // ±1 is its own inverse, exactly
            }
        }
        PerturbationKind::SegmentedUniform { a, b } => {
            for _ in 0..p {
                let magnitude = rng.random_range(a..b);
                let d = if rng.random::<bool>() {
                    magnitude
                } else {
                    -magnitude
                };
                delta.push(d);
                delta_inv.push(1.0 / d);
            }
        }
    }
    PerturbationVector { delta, delta_inv }
}

/// Draws `n` mutually independent perturbation vectors, one per datum.
pub fn sample_independent_perturbations(
    spec: &PerturbationSpec,
    p: usize,
    n: usize,
    rng: &mut impl Rng,
) -> Vec<PerturbationVector> {
    (0..n).map(|_| sample_perturbation(spec, p, rng)).collect()
}
