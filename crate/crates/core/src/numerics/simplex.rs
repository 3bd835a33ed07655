//! Dense two-phase simplex with Bland's rule, and the relative-interior
//! membership LP built on it.
//!
//! The LP decides where a vector sits relative to a finitely generated cone:
//! `max t  s.t.  Vλ = c, λ_i ≥ t` via the substitution `λ = s + t·1`,
//! `s ≥ 0`, `t` free. A strictly positive optimum certifies
//! `c ∈ ri cone(V)` (an all-positive combination exists), zero means
//! boundary, and an infeasible equality system means `c` is outside the
//! span, hence outside the cone.

use super::{norm, norm_inf, Matrix};
use crate::error::{Error, Result};
use crate::tol;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

const EPS: f64 = 1e-11;
const MAX_PIVOTS: usize = 50_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum LpStatus {
    Optimal,
    Infeasible,
}

/// Result of the relative-interior membership LP.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal `max_λ min_i λ_i` (capped at `‖c‖ / min_i ‖v_i‖`); NaN when
    /// infeasible.
    pub t_star: f64,
    /// Multipliers with `Vλ = c` and `λ_i ≥ t_star`; empty when infeasible.
    pub lambda: Vec<f64>,
    /// `‖Vλ − c‖∞` of the returned multipliers.
    pub residual: f64,
}

/// Decides membership of `c` in `cone(v)` (columns are generators) and in
/// its relative interior. Errors on a zero generator column.
pub fn ri_membership_lp(v: &Matrix, c: &[f64]) -> Result<LpResult> {
    let n = v.rows();
    let k = v.cols();
    if k == 0 {
        return Err(Error::InvalidInput("cone has no generators".into()));
    }
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    let mut min_gen_norm = f64::INFINITY;
    for j in 0..k {
        let gn = norm(&v.col(j));
        if gn < tol::GRAD_MIN_NORM {
            return Err(Error::InvalidInput(format!("generator {j} is zero")));
        }
        min_gen_norm = min_gen_norm.min(gn);
    }
    let cap = norm(c) / min_gen_norm;

    // Columns: s_1..s_k, t+, t-, cap slack.
    let ncols = k + 3;
    let mut a = Matrix::zeros(n + 1, ncols);
    let mut b = vec![0.0; n + 1];
    let vsum: Vec<f64> = (0..n).map(|i| v.row(i).iter().sum()).collect();
    for i in 0..n {
        for j in 0..k {
            a[(i, j)] = v[(i, j)];
        }
        a[(i, k)] = vsum[i];
        a[(i, k + 1)] = -vsum[i];
        b[i] = c[i];
    }
    a[(n, k)] = 1.0;
    a[(n, k + 1)] = -1.0;
    a[(n, k + 2)] = 1.0;
    b[n] = cap;

    let mut obj = vec![0.0; ncols];
    obj[k] = 1.0;
    obj[k + 1] = -1.0;

    match simplex(&a, &b, &obj)? {
        SimplexOutcome::Infeasible => Ok(LpResult {
            status: LpStatus::Infeasible,
            t_star: f64::NAN,
            lambda: Vec::new(),
            residual: f64::INFINITY,
        }),
        SimplexOutcome::Unbounded => Err(Error::InvalidInput(
            "membership LP unbounded despite cap".into(),
        )),
        SimplexOutcome::Optimal { x, value } => {
            let t_star = value;
            let lambda: Vec<f64> = (0..k).map(|j| x[j] + t_star).collect();
            let residual = norm_inf(&super::sub(&v.matvec(&lambda), c));
            Ok(LpResult {
                status: LpStatus::Optimal,
                t_star,
                lambda,
                residual,
            })
        }
    }
}

pub(crate) enum SimplexOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// Maximizes `objᵀx` subject to `a·x = b`, `x ≥ 0` by a dense two-phase
/// tableau simplex. Degenerate ties are broken by Bland's rule, which
/// guarantees termination.
pub(crate) fn simplex(a: &Matrix, b: &[f64], obj: &[f64]) -> Result<SimplexOutcome> {
    let m = a.rows();
    let n = a.cols();
    debug_assert_eq!(b.len(), m);
    debug_assert_eq!(obj.len(), n);

    // Tableau [A | I_art | b] with b forced nonnegative.
    let total = n + m;
    let mut t = Matrix::zeros(m, total + 1);
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[(i, j)] = flip * a[(i, j)];
        }
        t[(i, n + i)] = 1.0;
        t[(i, total)] = flip * b[i];
    }
    let mut basis: Vec<usize> = (n..total).collect();

    // Phase 1: maximize −Σ artificials.
    let mut cost = vec![0.0; total];
    for c in cost.iter_mut().skip(n) {
        *c = -1.0;
    }
    pivot_loop(&mut t, &mut basis, &cost, n + m)?;
    let phase1: f64 = basis
        .iter()
        .enumerate()
        .filter(|(_, v)| **v >= n)
        .map(|(i, _)| t[(i, total)])
        .sum();
    let scale = 1.0 + norm_inf(b);
    if phase1 > 1e-9 * scale {
        return Ok(SimplexOutcome::Infeasible);
    }

    // Drive residual artificials out of the basis; rows that cannot pivot
    // on a structural column are redundant and get dropped.
    let mut drop_rows: Vec<usize> = Vec::new();
    for i in 0..m {
        if basis[i] < n {
            continue;
        }
        let mut pivoted = false;
        for j in 0..n {
            if t[(i, j)].abs() > EPS {
                pivot(&mut t, &mut basis, i, j);
                pivoted = true;
                break;
            }
        }
        if !pivoted {
            drop_rows.push(i);
        }
    }
    if !drop_rows.is_empty() {
        let keep: Vec<usize> = (0..m).filter(|i| !drop_rows.contains(i)).collect();
        let mut t2 = Matrix::zeros(keep.len(), total + 1);
        let mut basis2 = Vec::with_capacity(keep.len());
        for (ii, &i) in keep.iter().enumerate() {
            for j in 0..=total {
                t2[(ii, j)] = t[(i, j)];
            }
            basis2.push(basis[i]);
        }
        t = t2;
        basis = basis2;
    }

    // Phase 2 on structural columns only (artificials keep cost −1 so they
    // never re-enter).
    let mut cost2 = vec![-1.0; total];
    cost2[..n].copy_from_slice(obj);
    match pivot_loop(&mut t, &mut basis, &cost2, n) {
        Ok(()) => {}
        Err(Error::InvalidInput(msg)) if msg == "unbounded" => {
            return Ok(SimplexOutcome::Unbounded)
        }
        Err(e) => return Err(e),
    }

    let rows = t.rows();
    let mut x = vec![0.0; n];
    let mut value = 0.0;
    for i in 0..rows {
        if basis[i] < n {
            x[basis[i]] = t[(i, total)];
            value += obj[basis[i]] * t[(i, total)];
        }
    }
    Ok(SimplexOutcome::Optimal { x, value })
}

// Bland's rule pivoting until no improving column with index < allowed
// remains. Signals unboundedness through a sentinel error.
fn pivot_loop(t: &mut Matrix, basis: &mut [usize], cost: &[f64], allowed: usize) -> Result<()> {
    let m = t.rows();
    let total = cost.len();
    for _ in 0..MAX_PIVOTS {
        // Reduced costs: c_j − c_Bᵀ T_j; entering = smallest improving index.
        let mut entering = None;
        for j in 0..allowed.min(total) {
            if basis.contains(&j) {
                continue;
            }
            let mut red = cost[j];
            for i in 0..m {
                red -= cost[basis[i]] * t[(i, j)];
            }
            if red > EPS {
                entering = Some(j);
                break;
            }
        }
        let Some(j) = entering else {
            return Ok(());
        };
        // Ratio test; Bland tie-break on the smallest basis variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            let tij = t[(i, j)];
            if tij > EPS {
                let ratio = t[(i, total)] / tij;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-15
                            || ((ratio - lr).abs() <= 1e-15 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((i, _)) = leave else {
            return Err(Error::InvalidInput("unbounded".into()));
        };
        pivot(t, basis, i, j);
    }
    Err(Error::InvalidInput("simplex pivot cap exceeded".into()))
}

fn pivot(t: &mut Matrix, basis: &mut [usize], row: usize, col: usize) {
    let m = t.rows();
    let w = t.cols();
    let piv = t[(row, col)];
    for j in 0..w {
        t[(row, j)] /= piv;
    }
    for i in 0..m {
        if i == row {
            continue;
        }
        let f = t[(i, col)];
        if f == 0.0 {
            continue;
        }
        for j in 0..w {
            t[(i, j)] -= f * t[(row, j)];
        }
    }
    basis[row] = col;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ridge_cone() -> Matrix {
        Matrix::from_cols(&[vec![0.0, 1.0, -1.0], vec![0.0, -1.0, -1.0]]).unwrap()
    }

    #[test]
    fn interior_membership() {
        let r = ri_membership_lp(&ridge_cone(), &[0.0, 0.0, -1.0]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.t_star - 0.5).abs() < 1e-9, "t* = {}", r.t_star);
        assert!((r.lambda[0] - 0.5).abs() < 1e-9);
        assert!((r.lambda[1] - 0.5).abs() < 1e-9);
        assert!(r.residual <= tol::LP_TOL);
    }

    #[test]
    fn ray_membership_is_interior() {
        let v = Matrix::from_cols(&[vec![0.0, 0.0, -1.0]]).unwrap();
        let r = ri_membership_lp(&v, &[0.0, 0.0, -1.0]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!((r.t_star - 1.0).abs() < 1e-9);
    }

    #[test]
    fn off_span_is_infeasible() {
        let r = ri_membership_lp(&ridge_cone(), &[1.0, 0.0, -1.0]).unwrap();
        assert_eq!(r.status, LpStatus::Infeasible);
    }

    #[test]
    fn boundary_generator() {
        // c equal to the first generator forces λ2 = 0, so t* = 0.
        let r = ri_membership_lp(&ridge_cone(), &[0.0, 1.0, -1.0]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!(r.t_star.abs() <= 1e-9, "t* = {}", r.t_star);
    }

    #[test]
    fn homogeneity_under_scaling() {
        let c = [0.0, 0.3, -0.9];
        let r1 = ri_membership_lp(&ridge_cone(), &c).unwrap();
        let r2 = ri_membership_lp(&ridge_cone(), &super::super::scaled(&c, 2.0)).unwrap();
        // Power-of-two scaling commutes exactly with every pivot.
        assert_eq!(r2.t_star, 2.0 * r1.t_star);
        let r3 = ri_membership_lp(&ridge_cone(), &super::super::scaled(&c, 3.0)).unwrap();
        assert!((r3.t_star - 3.0 * r1.t_star).abs() <= 1e-12 * (1.0 + r1.t_star.abs()));
    }

    #[test]
    fn zero_generator_rejected() {
        let v = Matrix::from_cols(&[vec![0.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(
            ri_membership_lp(&v, &[0.0, 0.0, -1.0]),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn opposite_generators_capped() {
        // cone{v, −v} is a line; its ri is the whole line, and the safeguard
        // cap keeps the LP bounded.
        let v = Matrix::from_cols(&[vec![1.0, 0.0], vec![-1.0, 0.0]]).unwrap();
        let r = ri_membership_lp(&v, &[1.0, 0.0]).unwrap();
        assert_eq!(r.status, LpStatus::Optimal);
        assert!(r.t_star > tol::RI_TOL);
        assert!(r.residual <= tol::LP_TOL);
    }
}
