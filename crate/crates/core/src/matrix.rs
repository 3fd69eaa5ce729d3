//! Minimal dense symmetric linear algebra.
//!
//! Matrices here are small (p ≤ ~50) and always symmetric, so we store the
//! upper triangle in row-major packed form and get symmetry structurally
//! instead of checking it after the fact. The same row-major unique-entry
//! convention is used for packing covariance parameters into θ, so one
//! ordering serves both purposes.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Symmetric `dim × dim` matrix, upper triangle stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    packed: Vec<f64>,
}

/// Number of unique entries of a symmetric `dim × dim` matrix.
pub fn packed_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Packed offset of entry `(j, l)` with `j <= l`.
#[inline]
fn offset(dim: usize, j: usize, l: usize) -> usize {
    debug_assert!(j <= l && l < dim);
    j * (2 * dim + 1 - j) / 2 + (l - j)
}

impl SymmetricMatrix {
    /// Builds a matrix from its packed upper triangle (row-major).
    pub fn from_packed(packed: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::dimension("matrix dimension must be positive"));
        }
        if packed.len() != packed_len(dim) {
            return Err(Error::dimension(format!(
                "packed length {} does not match dim {} (expected {})",
                packed.len(),
                dim,
                packed_len(dim)
            )));
        }
        if let Some(bad) = packed.iter().position(|x| !x.is_finite()) {
            return Err(Error::validation(format!(
                "non-finite entry {} at packed offset {}",
                packed[bad], bad
            )));
        }
        Ok(Self { dim, packed })
    }

    /// Packed construction without the finiteness scan, for internally
    /// computed values.
    pub(crate) fn from_packed_unchecked(packed: Vec<f64>, dim: usize) -> Self {
        debug_assert_eq!(packed.len(), packed_len(dim));
        Self { dim, packed }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            packed: vec![0.0; packed_len(dim)],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m.set(j, j, 1.0);
        }
        m
    }

    /// Builds from an entry function; `f` is called once per unique `(j, l)`
    /// with `j <= l`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut packed = Vec::with_capacity(packed_len(dim));
        for j in 0..dim {
            for l in j..dim {
                packed.push(f(j, l));
            }
        }
        Self { dim, packed }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn packed(&self) -> &[f64] {
        &self.packed
    }

    pub(crate) fn packed_mut(&mut self) -> &mut [f64] {
        &mut self.packed
    }

    #[inline]
    pub fn get(&self, j: usize, l: usize) -> f64 {
        let (a, b) = if j <= l { (j, l) } else { (l, j) };
        self.packed[offset(self.dim, a, b)]
    }

    /// Sets the `(j, l)` and `(l, j)` entry (one packed slot).
    #[inline]
    pub fn set(&mut self, j: usize, l: usize, value: f64) {
        let (a, b) = if j <= l { (j, l) } else { (l, j) };
        self.packed[offset(self.dim, a, b)] = value;
    }

    #[inline]
    pub fn add_to(&mut self, j: usize, l: usize, value: f64) {
        let (a, b) = if j <= l { (j, l) } else { (l, j) };
        self.packed[offset(self.dim, a, b)] += value;
    }

    pub fn is_finite(&self) -> bool {
        self.packed.iter().all(|x| x.is_finite())
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::dimension(format!(
                "matrix dims {} and {} differ",
                self.dim, other.dim
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let packed = self
            .packed
            .iter()
            .zip(&other.packed)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_packed_unchecked(packed, self.dim))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let packed = self
            .packed
            .iter()
            .zip(&other.packed)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self::from_packed_unchecked(packed, self.dim))
    }

    pub fn scale(&self, factor: f64) -> Self {
        let packed = self.packed.iter().map(|a| a * factor).collect();
        Self::from_packed_unchecked(packed, self.dim)
    }

    /// Frobenius norm; off-diagonal packed slots count twice.
    pub fn frobenius_norm(&self) -> f64 {
        let mut sum = 0.0;
        for j in 0..self.dim {
            for l in j..self.dim {
                let v = self.packed[offset(self.dim, j, l)];
                sum += if j == l { v * v } else { 2.0 * v * v };
            }
        }
        sum.sqrt()
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim;
        let mut a = vec![0.0; n * n];
        for j in 0..n {
            for l in j..n {
                let v = self.packed[offset(n, j, l)];
                a[j * n + l] = v;
                a[l * n + j] = v;
            }
        }
        a
    }

    /// All eigenvalues, ascending, via cyclic Jacobi rotations.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_finite() {
            return Err(Error::validation("non-finite entry in eigenvalue input"));
        }
        Ok(jacobi_eigenvalues(&mut self.to_dense(), self.dim))
    }

    /// Largest eigenvalue magnitude.
    pub fn spectral_norm(&self) -> Result<f64> {
        let eigs = self.eigenvalues()?;
        Ok(eigs.iter().fold(0.0f64, |m, &e| m.max(e.abs())))
    }

    /// Lower-triangular Cholesky factor `L` with `L·Lᵀ == self`.
    pub fn cholesky(&self) -> Result<LowerTriangularFactor> {
        let n = self.dim;
        let mut entries = vec![0.0; packed_len(n)];
        // lower triangle row-major: row i starts at i(i+1)/2
        let lo = |i: usize, j: usize| i * (i + 1) / 2 + j;
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self.get(i, j);
                for k in 0..j {
                    sum -= entries[lo(i, k)] * entries[lo(j, k)];
                }
                if i == j {
                    if sum <= 0.0 || !sum.is_finite() {
                        return Err(Error::NotPositiveDefinite {
                            column: j,
                            pivot: sum,
                        });
                    }
                    entries[lo(i, j)] = sum.sqrt();
                } else {
                    entries[lo(i, j)] = sum / entries[lo(j, j)];
                }
            }
        }
        Ok(LowerTriangularFactor { dim: n, entries })
    }
}

/// Cyclic Jacobi eigenvalue iteration on a dense row-major symmetric matrix.
/// Quadratically convergent; p ≤ 9 in all experiments, so a 100-sweep cap is
/// never close to binding.
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 100;
    const REL_TOL: f64 = 1e-10;

    if n == 1 {
        return vec![a[0]];
    }
    let norm: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = REL_TOL * norm.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    s += 2.0 * a[p * n + q] * a[p * n + q];
                }
            }
            s.sqrt()
        };
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.abs() < 1e150 {
                    theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt())
                } else {
                    0.5 / theta
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                for k in 0..n {
                    if k == p || k == q {
                        continue;
                    }
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    let new_kp = c * akp - s * akq;
                    let new_kq = s * akp + c * akq;
                    a[k * n + p] = new_kp;
                    a[p * n + k] = new_kp;
                    a[k * n + q] = new_kq;
                    a[q * n + k] = new_kq;
                }
                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|k| a[k * n + k]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    eigs
}

/// Lower-triangular Cholesky factor, lower triangle stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangularFactor {
    dim: usize,
    entries: Vec<f64>,
}

impl LowerTriangularFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i {
            0.0
        } else {
            self.entries[i * (i + 1) / 2 + j]
        }
    }

    /// `L·Lᵀ`, the matrix this factor came from.
    pub fn reconstruct(&self) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(self.dim, |j, l| {
            let mut sum = 0.0;
            for k in 0..=j.min(l) {
                sum += self.get(j, k) * self.get(l, k);
            }
            sum
        })
    }

    /// Inverse of the factored matrix: `(L·Lᵀ)⁻¹ = L⁻ᵀ·L⁻¹`.
    pub fn inverse_spd(&self) -> SymmetricMatrix {
        let n = self.dim;
        let lo = |i: usize, j: usize| i * (i + 1) / 2 + j;
        // forward-substitute L⁻¹ (lower triangular)
        let mut inv = vec![0.0; packed_len(n)];
        for j in 0..n {
            inv[lo(j, j)] = 1.0 / self.entries[lo(j, j)];
            for i in (j + 1)..n {
                let mut sum = 0.0;
                for k in j..i {
                    sum += self.entries[lo(i, k)] * inv[lo(k, j)];
                }
                inv[lo(i, j)] = -sum / self.entries[lo(i, i)];
            }
        }
        SymmetricMatrix::from_fn(n, |j, l| {
            let mut sum = 0.0;
            for k in l..n {
                // l >= j here, and (L⁻¹)ᵀ(L⁻¹) sums over rows k ≥ max(j, l)
                sum += inv[lo(k, j)] * inv[lo(k, l)];
            }
            sum
        })
    }

    /// log det of the factored matrix, `2·Σ ln L_ii`.
    pub fn log_det_spd(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.entries[i * (i + 1) / 2 + i].ln())
            .sum::<f64>()
            * 2.0
    }

    /// In-place `y = L·w`.
    fn apply(&self, w: &[f64], y: &mut [f64]) {
        for i in 0..self.dim {
            let mut sum = 0.0;
            for j in 0..=i {
                sum += self.entries[i * (i + 1) / 2 + j] * w[j];
            }
            y[i] = sum;
        }
    }

    /// Draws `mean + L·w` with `w` i.i.d. standard normal from `rng`.
    pub fn mvn_sample(&self, mean: &[f64], rng: &mut impl Rng) -> Result<Vec<f64>> {
        if mean.len() != self.dim {
            return Err(Error::dimension(format!(
                "mean length {} does not match factor dim {}",
                mean.len(),
                self.dim
            )));
        }
        let mut out = vec![0.0; self.dim];
        self.mvn_sample_into(mean, rng, &mut out)?;
        Ok(out)
    }

    /// Allocation-free variant of [`mvn_sample`](Self::mvn_sample).
    pub fn mvn_sample_into(&self, mean: &[f64], rng: &mut impl Rng, out: &mut [f64]) -> Result<()> {
        if mean.len() != self.dim || out.len() != self.dim {
            return Err(Error::dimension(format!(
                "mvn_sample dims disagree: mean {}, out {}, factor {}",
                mean.len(),
                out.len(),
                self.dim
            )));
        }
        let w: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
        self.apply(&w, out);
        for (o, m) in out.iter_mut().zip(mean) {
            *o += m;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Purpose};
    use proptest::prelude::*;

    fn rel_frobenius_err(a: &SymmetricMatrix, b: &SymmetricMatrix) -> f64 {
        a.sub(b).unwrap().frobenius_norm() / b.frobenius_norm()
    }

    #[test]
    fn from_packed_rejects_bad_length() {
        let err = SymmetricMatrix::from_packed(vec![1.0, 0.0, 0.0, 1.0], 2).unwrap_err();
        assert!(matches!(err, Error::Dimension(_)));
    }

    #[test]
    fn from_packed_rejects_non_finite() {
        let err = SymmetricMatrix::from_packed(vec![1.0, f64::NAN, 1.0], 2).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
    }

    #[test]
    fn from_packed_identity() {
        let m = SymmetricMatrix::from_packed(vec![1.0, 0.0, 1.0], 2).unwrap();
        assert_eq!(m.get(0, 0), 1.0);
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.get(1, 1), 1.0);
    }

    #[test]
    fn packing_is_upper_triangle_row_major() {
        // 3x3 covariance with 2's on the diagonal and 0.5 elsewhere
        let m =
            SymmetricMatrix::from_packed(vec![2.0, 0.5, 0.5, 2.0, 0.5, 2.0], 3).unwrap();
        for j in 0..3 {
            for l in 0..3 {
                let expect = if j == l { 2.0 } else { 0.5 };
                assert_eq!(m.get(j, l), expect);
                assert_eq!(m.get(j, l), m.get(l, j));
            }
        }
    }

    #[test]
    fn spectral_norm_identity_and_diagonal() {
        assert!((SymmetricMatrix::identity(3).spectral_norm().unwrap() - 1.0).abs() < 1e-14);
        let d = SymmetricMatrix::from_packed(vec![2.0, 0.0, -5.0], 2).unwrap();
        assert!((d.spectral_norm().unwrap() - 5.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_norm_rejects_non_finite() {
        let mut m = SymmetricMatrix::identity(2);
        m.set(0, 1, f64::INFINITY);
        assert!(matches!(m.spectral_norm(), Err(Error::Validation(_))));
    }

    /// 5x5 block-diagonal case where the answer is forced: one decoupled
    /// large diagonal entry plus two 2x2 blocks checked against the
    /// closed-form 2x2 eigenvalue formula.
    #[test]
    fn spectral_norm_block_diagonal() {
        let packed = vec![
            796.8750, 0.0, 0.0, 0.0, 0.0, //
            7.5, 1.5, 0.0, 0.0, //
            3.1876, 0.0, 0.0, //
            3.3333, -0.0741, //
            0.1523,
        ];
        let m = SymmetricMatrix::from_packed(packed, 5).unwrap();

        // closed-form |λ|max for [[a,b],[b,d]]
        let two_by_two = |a: f64, b: f64, d: f64| -> f64 {
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            (mid + rad).abs().max((mid - rad).abs())
        };
        let oracle = [
            796.8750,
            two_by_two(7.5, 1.5, 3.1876),
            two_by_two(3.3333, -0.0741, 0.1523),
        ]
        .into_iter()
        .fold(0.0f64, f64::max);
        assert!((oracle - 796.8750).abs() < 1e-12);

        let norm = m.spectral_norm().unwrap();
        assert!(
            (norm - oracle).abs() / oracle < 1e-10,
            "norm {norm} vs oracle {oracle}"
        );
    }

    #[test]
    fn cholesky_identity_and_diagonal() {
        let l = SymmetricMatrix::identity(3).cholesky().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(l.get(i, j), if i == j { 1.0 } else { 0.0 });
            }
        }
        let d = SymmetricMatrix::from_packed(vec![4.0, 0.0, 9.0], 2).unwrap();
        let l = d.cholesky().unwrap();
        assert_eq!(l.get(0, 0), 2.0);
        assert_eq!(l.get(1, 1), 3.0);
        assert_eq!(l.get(1, 0), 0.0);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SymmetricMatrix::from_packed(vec![1.0, 2.0, 1.0], 2).unwrap();
        let err = m.cholesky().unwrap_err();
        assert!(matches!(err, Error::NotPositiveDefinite { .. }));
    }

    #[test]
    fn inverse_spd_multiplies_to_identity() {
        let m = SymmetricMatrix::from_packed(vec![4.0, 1.0, 0.5, 3.0, 0.2, 2.0], 3).unwrap();
        let w = m.cholesky().unwrap().inverse_spd();
        // M·W == I
        for i in 0..3 {
            for j in 0..3 {
                let prod: f64 = (0..3).map(|k| m.get(i, k) * w.get(k, j)).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod - expect).abs() < 1e-12, "entry ({i},{j}) = {prod}");
            }
        }
    }

    #[test]
    fn log_det_matches_diagonal_case() {
        let m = SymmetricMatrix::from_packed(vec![4.0, 0.0, 9.0], 2).unwrap();
        let ld = m.cholesky().unwrap().log_det_spd();
        assert!((ld - 36.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn mvn_sample_is_deterministic_per_stream() {
        let cov = SymmetricMatrix::from_packed(vec![4.0, 1.0, 2.0], 2).unwrap();
        let l = cov.cholesky().unwrap();
        let mean = [1.0, -2.0];
        let a = l
            .mvn_sample(&mean, &mut stream(9, Purpose::Setup, 0))
            .unwrap();
        let b = l
            .mvn_sample(&mean, &mut stream(9, Purpose::Setup, 0))
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn mvn_identity_factor_shifts_by_mean() {
        let l = SymmetricMatrix::identity(3).cholesky().unwrap();
        let mut rng = stream(11, Purpose::Setup, 0);
        let mu = [10.0, -10.0, 0.5];
        let z = l.mvn_sample(&mu, &mut rng).unwrap();
        // standard normal draws live within ±6 essentially always
        for (zi, mi) in z.iter().zip(mu) {
            assert!((zi - mi).abs() < 6.0);
        }
    }

    /// Law-of-large-numbers check: the sample covariance of many draws
    /// reproduces the factored covariance.
    #[test]
    fn mvn_sample_covariance_matches() {
        let cov = SymmetricMatrix::from_packed(vec![4.0, 1.0, 2.0], 2).unwrap();
        let l = cov.cholesky().unwrap();
        let mut rng = stream(13, Purpose::Setup, 0);
        let n = 100_000usize;
        let mean = [0.0, 0.0];
        let (mut s11, mut s12, mut s22) = (0.0, 0.0, 0.0);
        let (mut m1, mut m2) = (0.0, 0.0);
        let mut buf = [0.0; 2];
        for _ in 0..n {
            l.mvn_sample_into(&mean, &mut rng, &mut buf).unwrap();
            m1 += buf[0];
            m2 += buf[1];
            s11 += buf[0] * buf[0];
            s12 += buf[0] * buf[1];
            s22 += buf[1] * buf[1];
        }
        let nf = n as f64;
        let (m1, m2) = (m1 / nf, m2 / nf);
        let sample = SymmetricMatrix::from_packed(
            vec![s11 / nf - m1 * m1, s12 / nf - m1 * m2, s22 / nf - m2 * m2],
            2,
        )
        .unwrap();
        assert!(
            rel_frobenius_err(&sample, &cov) < 0.05,
            "sample covariance off by {}",
            rel_frobenius_err(&sample, &cov)
        );
    }

    #[test]
    fn mvn_sample_rejects_dim_mismatch() {
        let l = SymmetricMatrix::identity(3).cholesky().unwrap();
        let mut rng = stream(1, Purpose::Setup, 0);
        assert!(matches!(
            l.mvn_sample(&[0.0; 2], &mut rng),
            Err(Error::Dimension(_))
        ));
    }

    proptest! {
        /// spectral norm dominates every entry of a symmetric matrix
        #[test]
        fn spectral_norm_bounds_entries(vals in proptest::collection::vec(-50.0f64..50.0, 6)) {
            let m = SymmetricMatrix::from_packed(vals, 3).unwrap();
            let norm = m.spectral_norm().unwrap();
            for j in 0..3 {
                for l in 0..3 {
                    prop_assert!(norm >= m.get(j, l).abs() - 1e-9 * norm.max(1.0));
                }
            }
        }

        #[test]
        fn spectral_norm_is_homogeneous(
            vals in proptest::collection::vec(-10.0f64..10.0, 10),
            c in -8.0f64..8.0,
        ) {
            let m = SymmetricMatrix::from_packed(vals, 4).unwrap();
            let base = m.spectral_norm().unwrap();
            let scaled = m.scale(c).spectral_norm().unwrap();
            let expect = c.abs() * base;
            prop_assert!((scaled - expect).abs() <= 1e-12 * expect.max(1e-300) + 1e-13);
        }

        /// random SPD matrices (BᵀB + I) round-trip through Cholesky
        #[test]
        fn cholesky_reconstructs(vals in proptest::collection::vec(-3.0f64..3.0, 16)) {
            let n = 4;
            let spd = SymmetricMatrix::from_fn(n, |j, l| {
                let mut sum = if j == l { 1.0 } else { 0.0 };
                for k in 0..n {
                    sum += vals[k * n + j] * vals[k * n + l];
                }
                sum
            });
            let l = spd.cholesky().unwrap();
            let back = l.reconstruct();
            prop_assert!(rel_frobenius_err(&back, &spd) < 1e-10);
        }
    }
}
