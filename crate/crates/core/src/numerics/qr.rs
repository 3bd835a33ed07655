//! Column-pivoted Householder QR: rank estimation, orthonormal nullspace
//! bases (manifold tangents), and rank-truncated least squares for the
//! NNLS inner loop.

use super::Matrix;
use crate::Float;
use alloc::vec;
use alloc::vec::Vec;

// Storage layout after factor():
// - w: R on and above the diagonal, unit Householder tails below it.
// - heads[k]: first component of the k-th unit Householder vector.
// - perm[j]: input column that ended up in factored position j.
struct Cpqr {
    w: Matrix,
    heads: Vec<f64>,
    perm: Vec<usize>,
    rank: usize,
    m: usize,
}

impl Cpqr {
    fn factor(a: &Matrix, rank_tol: f64) -> Cpqr {
        let (m, n) = (a.rows(), a.cols());
        let kmax = m.min(n);
        let mut f = Cpqr {
            w: a.clone(),
            heads: vec![0.0; kmax],
            perm: (0..n).collect(),
            rank: 0,
            m,
        };
        let mut r11 = 0.0f64;
        for k in 0..kmax {
            // Pivot on the remaining column of largest norm, recomputed
            // fresh each step (cheap at this scale, immune to downdating
            // cancellation).
            let mut best = -1.0f64;
            let mut best_j = k;
            for j in k..n {
                let s: f64 = (k..m).map(|i| f.w[(i, j)] * f.w[(i, j)]).sum();
                if s > best {
                    best = s;
                    best_j = j;
                }
            }
            if best_j != k {
                for i in 0..m {
                    let (x, y) = (f.w[(i, k)], f.w[(i, best_j)]);
                    f.w[(i, k)] = y;
                    f.w[(i, best_j)] = x;
                }
                f.perm.swap(k, best_j);
            }
            let alpha = Float::sqrt(best.max(0.0));
            if k == 0 {
                r11 = alpha;
            }
            if alpha == 0.0 || alpha <= rank_tol * r11 {
                break;
            }
            f.rank += 1;

            let beta = if f.w[(k, k)] >= 0.0 { -alpha } else { alpha };
            let mut v = vec![0.0; m - k];
            v[0] = f.w[(k, k)] - beta;
            for i in (k + 1)..m {
                v[i - k] = f.w[(i, k)];
            }
            let vnorm = Float::sqrt(v.iter().map(|x| x * x).sum::<f64>());
            if vnorm > 0.0 {
                for vi in v.iter_mut() {
                    *vi /= vnorm;
                }
                for j in (k + 1)..n {
                    let mut s = 0.0;
                    for i in k..m {
                        s += v[i - k] * f.w[(i, j)];
                    }
                    let t = 2.0 * s;
                    for i in k..m {
                        f.w[(i, j)] -= t * v[i - k];
                    }
                }
            }
            f.w[(k, k)] = beta;
            f.heads[k] = v[0];
            for i in (k + 1)..m {
                f.w[(i, k)] = v[i - k];
            }
        }
        f
    }

    /// Q x = H_0 H_1 ··· H_{r−1} x, in place.
    fn apply_q(&self, x: &mut [f64]) {
        for k in (0..self.rank).rev() {
            self.apply_reflector(k, x);
        }
    }

    /// Qᵀ x = H_{r−1} ··· H_0 x, in place.
    fn apply_qt(&self, x: &mut [f64]) {
        for k in 0..self.rank {
            self.apply_reflector(k, x);
        }
    }

    fn apply_reflector(&self, k: usize, x: &mut [f64]) {
        let mut s = self.heads[k] * x[k];
        for i in (k + 1)..self.m {
            s += self.w[(i, k)] * x[i];
        }
        let t = 2.0 * s;
        x[k] -= t * self.heads[k];
        for i in (k + 1)..self.m {
            x[i] -= t * self.w[(i, k)];
        }
    }
}

/// Number of diagonal entries of the pivoted R with `|R_kk| > rank_tol·|R_11|`.
/// Zero for empty or all-zero matrices.
pub fn rank_estimate(a: &Matrix, rank_tol: f64) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    Cpqr::factor(a, rank_tol).rank
}

/// Orthonormal basis of the nullspace of `a` (m×n), returned as the columns
/// of an n×(n−r) matrix. Zero columns when `a` has full column rank.
pub fn nullspace_basis(a: &Matrix, rank_tol: f64) -> Matrix {
    let n = a.cols();
    let f = Cpqr::factor(&a.transpose(), rank_tol);
    let r = f.rank;
    let mut basis = Matrix::zeros(n, n - r);
    for (jj, j) in (r..n).enumerate() {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        f.apply_q(&mut e);
        for i in 0..n {
            basis[(i, jj)] = e[i];
        }
    }
    basis
}

/// Rank-truncated least squares: minimizes ‖a·x − b‖ with the dependent
/// pivot columns forced to zero (basic solution).
pub(crate) fn least_squares(a: &Matrix, b: &[f64], rank_tol: f64) -> Vec<f64> {
    let n = a.cols();
    if n == 0 {
        return Vec::new();
    }
    let f = Cpqr::factor(a, rank_tol);
    let r = f.rank;
    let mut y = b.to_vec();
    f.apply_qt(&mut y);
    let mut z = vec![0.0; r];
    for i in (0..r).rev() {
        let mut s = y[i];
        for j in (i + 1)..r {
            s -= f.w[(i, j)] * z[j];
        }
        z[i] = s / f.w[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in 0..r {
        x[f.perm[i]] = z[i];
    }
    x
}
