//! Symmetric indefinite solve via Bunch–Kaufman LDLᵀ with partial pivoting.
//!
//! Handles the indefinite bordered KKT systems (zero diagonal blocks) that
//! plain Cholesky or diagonal pivoting cannot. One step of iterative
//! refinement keeps residuals comfortably inside the contract
//! `‖Ax − b‖ ≤ 1e−8 · (1 + ‖b‖)`.

use super::{dot, norm, sub, Matrix};
use crate::error::{Error, Result};
use crate::tol;
use alloc::vec;
use alloc::vec::Vec;

// Bunch–Kaufman pivot constant (1 + sqrt(17)) / 8.
const ALPHA: f64 = 0.640_388_203_202_208_4;

enum Block {
    One(f64),
    // 2x2 block [[a, b], [b, c]] stored with its inverse applied on solve.
    Two { a: f64, b: f64, c: f64 },
}

struct Factors {
    n: usize,
    lower: Matrix,
    blocks: Vec<(usize, Block)>,
    perm: Vec<usize>,
}

/// Solves `A x = b` for symmetric `A` (checked within `SYMMETRY_TOL` relative
/// to the matrix scale). Fails with the pivot index when a pivot falls below
/// `PIVOT_TOL · scale`.
pub fn solve_symmetric(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: a.cols(),
        });
    }
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let scale = a.max_abs();
    if !a.is_symmetric(tol::SYMMETRY_TOL * (1.0 + scale)) {
        return Err(Error::InvalidInput(alloc::format!(
            "matrix is not symmetric within {:.1e}",
            tol::SYMMETRY_TOL
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let f = factorize(a, scale)?;
    let mut x = f.solve(b);
    // One refinement pass.
    let r = sub(b, &a.matvec(&x));
    if norm(&r) > 1e-14 * (1.0 + norm(b)) {
        let dx = f.solve(&r);
        for (xi, di) in x.iter_mut().zip(&dx) {
            *xi += di;
        }
    }
    Ok(x)
}

fn factorize(a: &Matrix, scale: f64) -> Result<Factors> {
    let n = a.rows();
    let pivot_floor = tol::PIVOT_TOL * scale.max(f64::MIN_POSITIVE);
    let mut w = a.clone();
    let mut lower = Matrix::identity(n);
    let mut blocks = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();

    let mut k = 0;
    while k < n {
        let absakk = w[(k, k)].abs();
        let (mut colmax, mut imax) = (0.0f64, k);
        for i in (k + 1)..n {
            let v = w[(i, k)].abs();
            if v > colmax {
                colmax = v;
                imax = i;
            }
        }

        let use_two;
        if absakk >= ALPHA * colmax {
            // 1x1 pivot at k, no swap.
            use_two = false;
        } else {
            let mut rowmax = 0.0f64;
            for j in k..n {
                if j != imax {
                    rowmax = rowmax.max(w[(imax, j)].abs());
                }
            }
            if absakk * rowmax >= ALPHA * colmax * colmax {
                use_two = false;
            } else if w[(imax, imax)].abs() >= ALPHA * rowmax {
                swap_sym(&mut w, &mut lower, &mut perm, k, imax);
                use_two = false;
            } else {
                swap_sym(&mut w, &mut lower, &mut perm, k + 1, imax);
                use_two = true;
            }
        }

        if !use_two {
            let d = w[(k, k)];
            if d.abs() <= pivot_floor {
                return Err(Error::Singular {
                    pivot_index: perm[k],
                });
            }
            for i in (k + 1)..n {
                lower[(i, k)] = w[(i, k)] / d;
            }
            for i in (k + 1)..n {
                let lik = lower[(i, k)];
                for j in (k + 1)..n {
                    w[(i, j)] -= lik * w[(k, j)];
                }
            }
            blocks.push((k, Block::One(d)));
            k += 1;
        } else {
            let (pa, pb, pc) = (w[(k, k)], w[(k + 1, k)], w[(k + 1, k + 1)]);
            let det = pa * pc - pb * pb;
            if det.abs() <= pivot_floor * pivot_floor.max(1e-300) {
                return Err(Error::Singular {
                    pivot_index: perm[k],
                });
            }
            for i in (k + 2)..n {
                let (w1, w2) = (w[(i, k)], w[(i, k + 1)]);
                lower[(i, k)] = (pc * w1 - pb * w2) / det;
                lower[(i, k + 1)] = (pa * w2 - pb * w1) / det;
            }
            for i in (k + 2)..n {
                let (l1, l2) = (lower[(i, k)], lower[(i, k + 1)]);
                for j in (k + 2)..n {
                    w[(i, j)] -= l1 * w[(k, j)] + l2 * w[(k + 1, j)];
                }
            }
            blocks.push((
                k,
                Block::Two {
                    a: pa,
                    b: pb,
                    c: pc,
                },
            ));
            k += 2;
        }
    }

    Ok(Factors {
        n,
        lower,
        blocks,
        perm,
    })
}

// Symmetric row/column swap of the trailing submatrix plus the already
// computed part of L and the permutation record.
fn swap_sym(w: &mut Matrix, lower: &mut Matrix, perm: &mut [usize], p: usize, q: usize) {
    if p == q {
        return;
    }
    let n = w.rows();
    for j in 0..n {
        let (a, b) = (w[(p, j)], w[(q, j)]);
        w[(p, j)] = b;
        w[(q, j)] = a;
    }
    for i in 0..n {
        let (a, b) = (w[(i, p)], w[(i, q)]);
        w[(i, p)] = b;
        w[(i, q)] = a;
    }
    for j in 0..p.min(q) {
        let (a, b) = (lower[(p, j)], lower[(q, j)]);
        lower[(p, j)] = b;
        lower[(q, j)] = a;
    }
    perm.swap(p, q);
}

impl Factors {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        // y = P b
        let mut y: Vec<f64> = (0..n).map(|i| b[self.perm[i]]).collect();
        // Forward: L z = y (unit lower triangular).
        for i in 0..n {
            let s = dot(&self.lower.row(i)[..i], &y[..i]);
            y[i] -= s;
        }
        // Block diagonal: D w = z.
        for (k, blk) in &self.blocks {
            match blk {
                Block::One(d) => y[*k] /= d,
                Block::Two { a, b, c } => {
                    let det = a * c - b * b;
                    let (z1, z2) = (y[*k], y[*k + 1]);
                    y[*k] = (c * z1 - b * z2) / det;
                    y[*k + 1] = (a * z2 - b * z1) / det;
                }
            }
        }
        // Backward: Lᵀ v = w.
        for i in (0..n).rev() {
            let mut s = 0.0;
            for j in (i + 1)..n {
                s += self.lower[(j, i)] * y[j];
            }
            y[i] -= s;
        }
        // x = Pᵀ v
        let mut x = vec![0.0; n];
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
        x
    }
}
