//! Nonnegative least squares (Lawson–Hanson active set) and Euclidean
//! projection onto a finitely generated cone.

use super::{qr::least_squares, sub, Matrix};
use crate::tol::RANK_TOL;
use alloc::vec;
use alloc::vec::Vec;

/// Minimizes `‖v·λ − p‖` over `λ ≥ 0` and returns `λ`.
///
/// The inner unconstrained solves use rank-truncated column-pivoted QR, so
/// duplicated or dependent generator columns are harmless: a dependent
/// column has zero correlation with the residual and never enters the
/// passive set.
pub fn nnls(v: &Matrix, p: &[f64]) -> Vec<f64> {
    let k = v.cols();
    debug_assert_eq!(v.rows(), p.len());
    let mut x = vec![0.0; k];
    if k == 0 {
        return x;
    }
    let mut passive = vec![false; k];
    let w_scale: f64 = {
        let w0 = v.tmatvec(p);
        1.0f64.max(super::norm_inf(&w0))
    };
    let w_tol = 1e-11 * w_scale;

    for _outer in 0..(3 * k + 10) {
        let r = sub(p, &v.matvec(&x));
        let w = v.tmatvec(&r);
        let mut best: Option<(usize, f64)> = None;
        for j in 0..k {
            if !passive[j] && w[j] > w_tol && best.is_none_or(|(_, bw)| w[j] > bw) {
                best = Some((j, w[j]));
            }
        }
        let Some((enter, _)) = best else {
            break;
        };
        passive[enter] = true;

        // Inner loop: restore nonnegativity on the passive set.
        loop {
            let idx: Vec<usize> = (0..k).filter(|j| passive[*j]).collect();
            let cols: Vec<Vec<f64>> = idx.iter().map(|&j| v.col(j)).collect();
            let vp = Matrix::from_cols(&cols).expect("consistent column lengths");
            let z = least_squares(&vp, p, RANK_TOL);
            if z.iter().all(|&zi| zi > 1e-14) {
                for (pos, &j) in idx.iter().enumerate() {
                    x[j] = z[pos];
                }
                break;
            }
            // Step toward z until the first passive variable hits zero.
            let mut alpha = 1.0f64;
            for (pos, &j) in idx.iter().enumerate() {
                if z[pos] <= 1e-14 {
                    let denom = x[j] - z[pos];
                    if denom > 0.0 {
                        alpha = alpha.min(x[j] / denom);
                    } else {
                        alpha = 0.0;
                    }
                }
            }
            for (pos, &j) in idx.iter().enumerate() {
                x[j] += alpha * (z[pos] - x[j]);
            }
            for &j in &idx {
                if x[j] <= 1e-14 {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&b| b) {
                break;
            }
        }
    }
    x
}

/// Euclidean projection of `p` onto `cone(v)` (columns are generators):
/// returns `q = v·λ*` with `λ* ≥ 0` minimizing `‖p − v·λ‖`.
pub fn cone_project(v: &Matrix, p: &[f64]) -> Vec<f64> {
    v.matvec(&nnls(v, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{add_scaled, dot, norm};

    fn example_cone() -> Matrix {
        Matrix::from_cols(&[vec![0.0, 0.0, -1.0], vec![0.0, -1.0, -1.0]]).unwrap()
    }

    // Brute-force oracle: grid search over λ ∈ [0, 3]² at step 1e−3.
    fn brute_force(v: &Matrix, p: &[f64]) -> Vec<f64> {
        let mut best = (f64::INFINITY, vec![0.0, 0.0]);
        let steps = 3000usize;
        for i in 0..=steps {
            for j in 0..=steps / 10 {
                // Coarse in the second coordinate first, refined below.
                let l = [i as f64 * 1e-3, j as f64 * 1e-2];
                let q = v.matvec(&l);
                let d = norm(&sub(p, &q));
                if d < best.0 {
                    best = (d, l.to_vec());
                }
            }
        }
        // Refine the second coordinate at the winning first coordinate.
        let l1 = best.1[0];
        for j in 0..=steps {
            let l = [l1, j as f64 * 1e-3];
            let q = v.matvec(&l);
            let d = norm(&sub(p, &q));
            if d < best.0 {
                best = (d, l.to_vec());
            }
        }
        v.matvec(&best.1)
    }

    #[test]
    fn projection_matches_brute_force_oracle() {
        let v = example_cone();
        let p = [0.0, -1.0, 0.0];
        let q = cone_project(&v, &p);
        let oracle = brute_force(&v, &p);
        for (a, b) in q.iter().zip(&oracle) {
            assert!((a - b).abs() < 2e-3, "nnls {q:?} vs oracle {oracle:?}");
        }
        // The exact projection is (0, −1/2, −1/2).
        let exact = [0.0, -0.5, -0.5];
        for (a, b) in q.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-9, "{q:?}");
        }
    }

    #[test]
    fn kkt_conditions_hold() {
        let v = example_cone();
        let p = [0.0, -1.0, 0.0];
        let q = cone_project(&v, &p);
        let r = sub(&p, &q);
        assert!(dot(&r, &q).abs() <= 1e-9);
        for j in 0..v.cols() {
            assert!(dot(&r, &v.col(j)) <= 1e-9);
        }
    }

    #[test]
    fn fixes_points_already_in_the_cone() {
        let v = example_cone();
        let p = add_scaled(&scalev(&v.col(0), 0.7), 1.3, &v.col(1));
        let q = cone_project(&v, &p);
        for (a, b) in q.iter().zip(&p) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn orthogonal_point_projects_to_zero() {
        let v = example_cone();
        let q = cone_project(&v, &[1.0, 0.0, 0.0]);
        assert!(norm(&q) < 1e-12);
    }

    #[test]
    fn duplicate_generators_are_harmless() {
        let v = Matrix::from_cols(&[vec![0.0, 0.0, -1.0], vec![0.0, 0.0, -1.0]]).unwrap();
        let q = cone_project(&v, &[0.0, -1.0, -1.0]);
        assert!((q[2] + 1.0).abs() < 1e-9 && q[1].abs() < 1e-12);
    }

    fn scalev(a: &[f64], s: f64) -> Vec<f64> {
        super::super::scaled(a, s)
    }

    proptest::proptest! {
        #[test]
        fn nnls_optimality_on_random_cones(seed in 0u64..200) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let n = rng.gen_range(2..5usize);
            let k = rng.gen_range(1..5usize);
            let cols: alloc::vec::Vec<alloc::vec::Vec<f64>> = (0..k)
                .map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect();
            let v = Matrix::from_cols(&cols).unwrap();
            let p: alloc::vec::Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let q = cone_project(&v, &p);
            let r = sub(&p, &q);
            proptest::prop_assert!(dot(&r, &q).abs() <= 1e-9 * (1.0 + norm(&p)));
            for j in 0..k {
                proptest::prop_assert!(dot(&r, &v.col(j)) <= 1e-9 * (1.0 + norm(&p)));
            }
        }
    }
}
