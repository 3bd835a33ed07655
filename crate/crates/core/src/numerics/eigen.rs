//! Jacobi eigenvalues for small symmetric matrices (the convexity probe).

use super::Matrix;
use crate::Float;
use alloc::vec::Vec;

/// Eigenvalues of a symmetric matrix, ascending. Cyclic Jacobi sweeps;
/// plenty for the n ≤ 8 Hessians this crate meets.
pub fn symmetric_eigenvalues(a: &Matrix) -> Vec<f64> {
    let n = a.rows();
    debug_assert_eq!(a.cols(), n);
    let mut w = a.clone();
    let scale = w.max_abs().max(f64::MIN_POSITIVE);
    let tol = 1e-14 * scale;

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(w[(p, q)].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (theta.abs() + Float::sqrt(theta * theta + 1.0))
                };
                let c = 1.0 / Float::sqrt(t * t + 1.0);
                let s = t * c;
                for i in 0..n {
                    let (wip, wiq) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = c * wip - s * wiq;
                    w[(i, q)] = s * wip + c * wiq;
                }
                for i in 0..n {
                    let (wpi, wqi) = (w[(p, i)], w[(q, i)]);
                    w[(p, i)] = c * wpi - s * wqi;
                    w[(q, i)] = s * wpi + c * wqi;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| w[(i, i)]).collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    eigs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let mut a = Matrix::zeros(3, 3);
        a[(0, 0)] = 2.0;
        a[(1, 1)] = -1.0;
        let e = symmetric_eigenvalues(&a);
        assert!((e[0] + 1.0).abs() < 1e-12);
        assert!(e[1].abs() < 1e-12);
        assert!((e[2] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn known_two_by_two() {
        // [[0, 1], [1, 0]] has eigenvalues ±1.
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = symmetric_eigenvalues(&a);
        assert!((e[0] + 1.0).abs() < 1e-12 && (e[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concave_witness_eigenvalue() {
        // Hessian of −u² + v is diag(−2, 0): minimum eigenvalue −2.
        let mut a = Matrix::zeros(2, 2);
        a[(0, 0)] = -2.0;
        let e = symmetric_eigenvalues(&a);
        assert!((e[0] + 2.0).abs() < 1e-12);
    }
}
