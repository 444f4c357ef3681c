//! Dense symmetric linear algebra for desk-scale dimensions.
//!
//! Everything here is written for `p` up to a few dozen: matrices are stored
//! row-major in a flat `Vec<f64>` and the eigensolver is a cyclic Jacobi
//! method.

use crate::error::{Error, Result};
use crate::sets::SupportSet;

/// Maximum number of Jacobi sweeps before `sym_eig` gives up.
pub const MAX_SWEEPS: usize = 100;

const SYMMETRY_TOL: f64 = 1e-12;

/// A real symmetric `p × p` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    /// Builds a matrix from rows. Rejects non-square input and asymmetry above
    /// `1e-12` (absolute); the stored matrix is the exact symmetric part.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::arg("matrix must have at least one row"));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::arg(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::arg(format!("entry ({i},{j}) is not finite")));
            }
        }
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let (a, b) = (rows[i][j], rows[j][i]);
                if (a - b).abs() > SYMMETRY_TOL {
                    return Err(Error::arg(format!(
                        "matrix is not symmetric: entry ({i},{j}) = {a} but ({j},{i}) = {b}"
                    )));
                }
                let v = 0.5 * (a + b);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from the upper triangle produced by `f(i, j)`, `i <= j`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        assert!(dim >= 1, "dimension must be positive");
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                data[i * dim + j] = v;
                data[j * dim + i] = v;
            }
        }
        Self { dim, data }
    }

    pub fn diag(d: &[f64]) -> Self {
        Self::from_fn(d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_fn(dim, |_, _| 0.0)
    }

    pub fn scaled_identity(dim: usize, gamma: f64) -> Self {
        Self::from_fn(dim, |i, j| if i == j { gamma } else { 0.0 })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j) == 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.dim);
        (0..self.dim).map(|i| dot(self.row(i), x)).collect()
    }

    /// `xᵀ M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        dot(x, &self.mul_vec(x))
    }

    /// `uᵀ M v`.
    pub fn bilinear(&self, u: &[f64], v: &[f64]) -> f64 {
        dot(u, &self.mul_vec(v))
    }

    /// Principal submatrix `M_JJ` on the given (ordered) indices.
    pub fn submatrix(&self, idx: &[usize]) -> SymMatrix {
        assert!(!idx.is_empty(), "principal submatrix needs at least one index");
        Self::from_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    /// `B[i][j] = M[perm[i]][perm[j]]`, i.e. `PᵀMP` for the permutation that
    /// sends coordinate `perm[i]` to position `i`.
    pub fn permuted(&self, perm: &[usize]) -> SymMatrix {
        assert_eq!(perm.len(), self.dim);
        Self::from_fn(self.dim, |i, j| self.get(perm[i], perm[j]))
    }

    /// `Q M Qᵀ` for a square matrix `Q` given by rows.
    pub fn conjugate(&self, q: &[Vec<f64>]) -> SymMatrix {
        let n = self.dim;
        // t = M Qᵀ
        let mut t = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                t[i * n + j] = (0..n).map(|k| self.get(i, k) * q[j][k]).sum();
            }
        }
        Self::from_fn(n, |i, j| (0..n).map(|k| q[i][k] * t[k * n + j]).sum())
    }
}

/// Eigen-decomposition `M = P diag(λ) Pᵀ` with `λ` sorted non-increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Row-major `p × p`; column `k` is the eigenvector for `eigenvalues[k]`.
    pub basis: Vec<f64>,
}

impl EigDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|i| self.basis[i * n + k]).collect()
    }

    pub fn basis_entry(&self, i: usize, k: usize) -> f64 {
        self.basis[i * self.dim() + k]
    }

    /// `P diag(λ) Pᵀ`, row-major.
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = (0..n)
                    .map(|k| self.basis_entry(i, k) * self.eigenvalues[k] * self.basis_entry(j, k))
                    .sum();
            }
        }
        out
    }

    /// `max |(PᵀP − I)_ij|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for a in 0..n {
            for b in 0..n {
                let s: f64 = (0..n).map(|i| self.basis_entry(i, a) * self.basis_entry(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }

    /// `max |(P diag(λ) Pᵀ − M)_ij|`.
    pub fn reconstruction_residual(&self, m: &SymMatrix) -> f64 {
        let n = self.dim();
        let r = self.reconstruct();
        (0..n * n).fold(0.0, |w, k| w.max((r[k] - m.data[k]).abs()))
    }
}

/// Symmetric eigen-decomposition by cyclic Jacobi rotations.
///
/// The first three sweeps only rotate entries above a threshold of
/// `0.2·Σ|offdiag| / p²`; later sweeps rotate everything. Eigenvalues are
/// returned sorted non-increasing and every eigenvector has its first
/// component of magnitude above `1e-12` positive.
///
/// Panics if the off-diagonal mass has not vanished after [`MAX_SWEEPS`].
pub fn sym_eig(m: &SymMatrix) -> EigDecomposition {
    let n = m.dim;
    let mut a = m.data.clone();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut converged = false;
    for sweep in 0..MAX_SWEEPS {
        let mut off_sq = 0.0;
        let mut off_abs = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off_sq += a[p * n + q] * a[p * n + q];
                off_abs += a[p * n + q].abs();
            }
        }
        if off_sq == 0.0 || off_sq.sqrt() <= 1e-15 * frob {
            converged = true;
            break;
        }
        let threshold = if sweep < 3 {
            0.2 * off_abs / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 || apq.abs() <= threshold {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                // negligible relative to both diagonal entries
                if sweep > 3 && app.abs() + 100.0 * apq.abs() == app.abs()
                    && aqq.abs() + 100.0 * apq.abs() == aqq.abs()
                {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        panic!(
            "sym_eig: Jacobi iteration did not converge within {MAX_SWEEPS} sweeps (dim {n}, ‖M‖_max = {})",
            m.max_abs()
        );
    }

    let mut order: Vec<usize> = (0..n).collect();
    // stable: equal eigenvalues keep their column order
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| a[k * n + k]).collect();
    let mut basis = vec![0.0; n * n];
    for (col, &k) in order.iter().enumerate() {
        let lead = (0..n).map(|i| v[i * n + k]).find(|x| x.abs() > 1e-12).unwrap_or(1.0);
        let sign = if lead < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            basis[i * n + col] = sign * v[i * n + k];
        }
    }
    EigDecomposition { eigenvalues, basis }
}

/// `max_i |λ_i(M)|`.
pub fn spectral_norm(m: &SymMatrix) -> f64 {
    let eig = sym_eig(m);
    eig.eigenvalues.iter().fold(0.0, |acc, l| acc.max(l.abs()))
}

/// Indices of the `k` largest `|v_i|`, ties going to the smaller index,
/// returned in ascending order.
pub fn top_k_indices(v: &[f64], k: usize) -> Result<SupportSet> {
    if k == 0 || k > v.len() {
        return Err(Error::arg(format!("k = {k} must lie in 1..={}", v.len())));
    }
    let mut idx = ranked_by(v, |x| x.abs());
    idx.truncate(k);
    SupportSet::new(idx, v.len())
}

/// All indices sorted by decreasing `key(v_i)`, ties by smaller index.
pub(crate) fn ranked_by(v: &[f64], key: impl Fn(f64) -> f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_by(|&i, &j| key(v[j]).total_cmp(&key(v[i])).then(i.cmp(&j)));
    idx
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|x| x * s).collect()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Solves `M y = b` for a symmetric `M` through its eigen-decomposition.
/// Returns `None` unless every eigenvalue exceeds `min_eig`.
pub(crate) fn solve_spd(m: &SymMatrix, b: &[f64], min_eig: f64) -> Option<Vec<f64>> {
    let eig = sym_eig(m);
    if eig.eigenvalues.iter().any(|&l| l <= min_eig) {
        return None;
    }
    let n = m.dim();
    let mut y = vec![0.0; n];
    for k in 0..n {
        let pk = eig.eigenvector(k);
        let coef = dot(&pk, b) / eig.eigenvalues[k];
        for i in 0..n {
            y[i] += coef * pk[i];
        }
    }
    Some(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_sym(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix {
        SymMatrix::from_fn(n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn diagonal_input_is_returned_as_is() {
        let e = sym_eig(&SymMatrix::diag(&[3.0, 1.0]));
        assert_eq!(e.eigenvalues, vec![3.0, 1.0]);
        assert_eq!(e.basis, vec![1.0, 0.0, 0.0, 1.0]);
    }

    #[test]
    fn swap_matrix_eigenpairs() {
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = sym_eig(&m);
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] + 1.0).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v0 = e.eigenvector(0);
        let v1 = e.eigenvector(1);
        assert!((v0[0] - h).abs() < 1e-15 && (v0[1] - h).abs() < 1e-15);
        assert!((v1[0] - h).abs() < 1e-15 && (v1[1] + h).abs() < 1e-15);
        // M v = λ v
        for k in 0..2 {
            let v = e.eigenvector(k);
            let mv = m.mul_vec(&v);
            for i in 0..2 {
                assert!((mv[i] - e.eigenvalues[k] * v[i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn random_5x5_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = random_sym(&mut rng, 5);
        let e = sym_eig(&m);
        assert!(e.reconstruction_residual(&m) <= 1e-9 * m.max_abs().max(1.0));
    }

    #[test]
    fn eig_invariants_over_many_seeds() {
        for seed in 0..1000u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 1 + (seed as usize % 16);
            let m = random_sym(&mut rng, n);
            let e = sym_eig(&m);
            assert!(e.orthogonality_residual() <= 1e-10, "seed {seed}");
            assert!(
                e.reconstruction_residual(&m) <= 1e-9 * m.max_abs().max(1.0),
                "seed {seed}"
            );
            assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1]), "seed {seed}");
        }
    }

    #[test]
    fn eig_is_deterministic_and_sign_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let m = random_sym(&mut rng, 7);
        let a = sym_eig(&m);
        let b = sym_eig(&m.clone());
        assert_eq!(a, b);
        for k in 0..7 {
            let lead = a.eigenvector(k).into_iter().find(|x| x.abs() > 1e-12).unwrap();
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn spectral_norm_examples() {
        assert_eq!(spectral_norm(&SymMatrix::diag(&[3.0, -5.0])), 5.0);
        assert_eq!(spectral_norm(&SymMatrix::zeros(3)), 0.0);
        let m = SymMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!((spectral_norm(&m) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn top_k_examples() {
        assert_eq!(top_k_indices(&[3.0, -1.0, 2.0], 2).unwrap().indices(), &[0, 2]);
        assert_eq!(top_k_indices(&[1.0, 1.0, 1.0], 2).unwrap().indices(), &[0, 1]);
        assert_eq!(top_k_indices(&[0.0, -4.0, 4.0], 1).unwrap().indices(), &[1]);
        assert!(top_k_indices(&[1.0], 0).is_err());
        assert!(top_k_indices(&[1.0], 2).is_err());
    }

    #[test]
    fn top_k_maximizes_captured_energy() {
        // exhaustive enumeration of all k-subsets
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..300 {
            let p = 1 + trial % 10;
            // coarse values produce frequent ties
            let v: Vec<f64> = (0..p).map(|_| rng.random_range(-3i32..=3) as f64).collect();
            for k in 1..=p {
                let got = top_k_indices(&v, k).unwrap();
                let energy = |s: &[usize]| s.iter().map(|&i| v[i] * v[i]).sum::<f64>();
                let mut best = f64::NEG_INFINITY;
                for mask in 0u32..(1 << p) {
                    if mask.count_ones() as usize != k {
                        continue;
                    }
                    let s: Vec<usize> = (0..p).filter(|i| mask >> i & 1 == 1).collect();
                    best = best.max(energy(&s));
                }
                assert_eq!(energy(got.indices()), best);
            }
        }
    }

    #[test]
    fn rejects_asymmetric_input() {
        let err = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.1, 1.0]]).unwrap_err();
        assert!(matches!(err, Error::Argument(ref m) if m.contains("symmetric")));
        assert!(SymMatrix::from_rows(&[vec![1.0, 2.0]]).is_err());
        assert!(SymMatrix::from_rows(&[]).is_err());
    }
}
