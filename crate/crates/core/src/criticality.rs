//! Strong-criticality verification and second-order sensitivity checks:
//! sampled quadratic-decay constants (globally over the body and restricted
//! to the active manifold), strict complementarity, and the two-route
//! Jacobian comparison of the solution map `c ↦ x_c` (finite differences of
//! re-solves against the implicit-function prediction from the bordered
//! KKT system).

use crate::body::ConvexBody;
use crate::cones::{normal_cone, strict_complementarity, RiVerdict, StrictComplementarity};
use crate::error::{Error, Result};
use crate::identify::{walk_manifold, ActiveManifold};
use crate::numerics::{self, dist, dot, norm, norm_inf, nullspace_basis, rank_estimate, Matrix};
use crate::rng;
use crate::solver::{maximize_linear, SolveResult, SolverOptions};
use crate::tol;
use alloc::vec;
use alloc::vec::Vec;

/// Sampled lower estimate of the quadratic-decay constant:
/// `delta_hat = min (⟨c, x_c − x⟩) / ‖x − x_c‖²` over kept samples.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DecayEstimate {
    pub delta_hat: f64,
    pub radius: f64,
    pub samples_used: usize,
    /// The sample achieving the minimum ratio.
    pub witness: Vec<f64>,
    /// Samples where maximality itself failed beyond tolerance; always 0
    /// on a converged solve.
    pub violations: usize,
}

/// Estimates the decay constant over `F ∩ B(x_c, radius)` by seeded
/// sampling. Infeasible draws are replaced by the farthest feasible point
/// on the segment from a slightly interior-shifted `x_c` to the draw
/// (bisection, 12 iterations). The unit deviates are radius-independent,
/// so doubling the radius rescales the same sample cloud outward and the
/// worst ratio cannot improve beyond pullback noise.
pub fn quadratic_decay(
    body: &ConvexBody,
    c: &[f64],
    result: &SolveResult,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<DecayEstimate> {
    let n = body.n();
    if !(radius > 0.0 && radius <= body.radius()) {
        return Err(Error::InvalidInput(
            "decay radius must lie in (0, R]".into(),
        ));
    }
    if count < 100 {
        return Err(Error::InvalidInput(
            "decay sampling needs count ≥ 100".into(),
        ));
    }
    let x_c = &result.x;
    let interior = match body.slater() {
        Some(s) => s.to_vec(),
        None => crate::solver::find_interior_point(body, &SolverOptions::default())?,
    };
    // Slater-shifted anchor: strictly feasible by convexity.
    let anchor = numerics::add_scaled(x_c, 1e-3, &numerics::sub(&interior, x_c));

    let mut ratios: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut violations = 0usize;
    let viol_tol = 1e-7 * (1.0 + norm(c));
    for k in 0..count {
        let mut stream = rng::substream(seed, k as u64);
        let xi = rng::unit_ball_point(&mut stream, n);
        let y = numerics::add_scaled(x_c, radius, &xi);
        let x = if body.contains(&y, 0.0)? {
            y
        } else {
            // Farthest feasible point on [anchor, y].
            let mut lo = 0.0f64;
            let mut hi = 1.0f64;
            for _ in 0..tol::DECAY_BISECT_ITERS {
                let mid = 0.5 * (lo + hi);
                let p = lerp(&anchor, &y, mid);
                if body.contains(&p, 0.0)? {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lerp(&anchor, &y, lo)
        };
        let d = dist(&x, x_c);
        if d <= 1e-12 {
            continue;
        }
        let drop = dot(c, x_c) - dot(c, &x);
        if drop < -viol_tol {
            violations += 1;
        }
        ratios.push((drop / (d * d), x));
    }
    if ratios.len() < 10 {
        return Err(Error::Sampling {
            usable: ratios.len(),
            needed: 10,
        });
    }
    let (delta_hat, witness) = ratios
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .expect("nonempty ratios");
    Ok(DecayEstimate {
        delta_hat,
        radius,
        samples_used: count,
        witness,
        violations,
    })
}

fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Knobs for the manifold-restricted decay sampling.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CritOptions {
    /// Largest walk radius; halved `levels` times.
    pub radius: f64,
    pub levels: usize,
    /// Tangent directions (deterministic ± frame first, seeded random
    /// after).
    pub dirs: usize,
    pub seed: u64,
}

impl Default for CritOptions {
    fn default() -> Self {
        CritOptions {
            radius: 0.1,
            levels: 4,
            dirs: 6,
            seed: 0,
        }
    }
}

/// Strong-criticality verdict: strict complementarity plus quadratic decay
/// restricted to walked manifold points. A zero-dimensional manifold has no
/// nearby manifold points, so its decay condition holds vacuously
/// (`manifold_decay = None`).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CriticalityReport {
    pub strict_comp: StrictComplementarity,
    pub manifold_decay: Option<DecayEstimate>,
    pub strong: bool,
}

pub fn strong_criticality(
    body: &ConvexBody,
    c: &[f64],
    result: &SolveResult,
    m: &ActiveManifold,
    opts: &CritOptions,
) -> Result<CriticalityReport> {
    if !m.licq {
        return Err(Error::InvalidInput(
            "strong criticality needs a valid (LICQ) manifold".into(),
        ));
    }
    let cone = normal_cone(body, &result.x, &result.active)?;
    let strict_comp = strict_complementarity(&cone, c)?;

    let manifold_decay = if m.dim == Some(0) {
        None
    } else {
        Some(manifold_decay(body, c, result, m, opts)?)
    };

    let decay_ok = manifold_decay
        .as_ref()
        .is_none_or(|d| d.delta_hat > tol::DELTA_TOL);
    Ok(CriticalityReport {
        strong: strict_comp.verdict == RiVerdict::Interior && decay_ok,
        strict_comp,
        manifold_decay,
    })
}

fn manifold_decay(
    body: &ConvexBody,
    c: &[f64],
    result: &SolveResult,
    m: &ActiveManifold,
    opts: &CritOptions,
) -> Result<DecayEstimate> {
    let radius_cap = 0.1 * body.radius();
    let top_radius = opts.radius.min(radius_cap);
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for t in m.tangent_dirs() {
        dirs.push(t.clone());
        dirs.push(numerics::scaled(&t, -1.0));
    }
    let basis = m.tangent_dirs();
    let mut stream = rng::substream(opts.seed, 0x64656361);
    while dirs.len() < opts.dirs && !basis.is_empty() {
        let mut d = vec![0.0; body.n()];
        for t in &basis {
            let w = rng::gaussian(&mut stream);
            for (di, ti) in d.iter_mut().zip(t) {
                *di += w * ti;
            }
        }
        if let Some(d) = numerics::normalized(&d) {
            dirs.push(d);
        }
    }

    let x_c = &result.x;
    let viol_tol = 1e-7 * (1.0 + norm(c));
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut used = 0usize;
    let mut violations = 0usize;
    for dir in &dirs {
        let mut radius = top_radius;
        for _ in 0..opts.levels {
            if let Ok(x) = walk_manifold(body, m, dir, radius) {
                let d = dist(&x, x_c);
                if d > 1e-12 {
                    used += 1;
                    let drop = dot(c, x_c) - dot(c, &x);
                    if drop < -viol_tol {
                        violations += 1;
                    }
                    let ratio = drop / (d * d);
                    if best.as_ref().is_none_or(|(r, _)| ratio < *r) {
                        best = Some((ratio, x));
                    }
                }
            }
            radius *= 0.5;
        }
    }
    let Some((delta_hat, witness)) = best else {
        return Err(Error::Sampling {
            usable: 0,
            needed: 1,
        });
    };
    Ok(DecayEstimate {
        delta_hat,
        radius: top_radius,
        samples_used: used,
        witness,
        violations,
    })
}

/// Two-route Jacobian of the solution map at `c`: finite differences of
/// re-solves and the implicit-function prediction from the bordered KKT
/// system of the equality-constrained problem on the active set. The
/// discrepancy is measured on the block tangent to the sphere at `c`
/// (along the ray the map is constant by homogeneity).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SensitivityReport {
    pub jac_fd: Matrix,
    pub jac_kkt: Matrix,
    pub discrepancy: f64,
    pub jac_rank: usize,
    pub manifold_dim: Option<usize>,
    /// Whether strong criticality was verified at `c`; reports without it
    /// are unsupported by the second-order theory.
    pub supported: bool,
    pub fd_step: f64,
}

pub fn sensitivity(
    body: &ConvexBody,
    c: &[f64],
    result: &SolveResult,
    m: &ActiveManifold,
    h: f64,
    solver_opts: &SolverOptions,
    supported: bool,
) -> Result<SensitivityReport> {
    let n = body.n();
    if !m.licq {
        return Err(Error::InvalidInput(
            "sensitivity needs a valid (LICQ) manifold".into(),
        ));
    }
    if !(h > 0.0) {
        return Err(Error::InvalidInput("fd step must be positive".into()));
    }

    // Finite differences of re-solves.
    let mut opts = solver_opts.clone();
    opts.warm_start = None;
    let mut jac_fd = Matrix::zeros(n, n);
    for j in 0..n {
        let mut cp = c.to_vec();
        cp[j] += h;
        let xp = maximize_linear(body, &cp, &opts)?.x;
        cp[j] -= 2.0 * h;
        let xm = maximize_linear(body, &cp, &opts)?.x;
        for i in 0..n {
            jac_fd[(i, j)] = (xp[i] - xm[i]) / (2.0 * h);
        }
    }

    // Bordered KKT prediction on the active set.
    let a = &m.active;
    let k = a.len();
    let mut kkt = Matrix::zeros(n + k, n + k);
    for &i in a.iter() {
        let (_, _, hess) = body.constraints()[i].jet2(&result.x)?;
        for p in 0..n {
            for q in 0..n {
                kkt[(p, q)] += result.lambda[i] * hess[(p, q)];
            }
        }
    }
    for (row, &i) in a.iter().enumerate() {
        let grad = body.constraints()[i].grad(&result.x)?;
        for p in 0..n {
            kkt[(n + row, p)] = grad[p];
            kkt[(p, n + row)] = grad[p];
        }
    }
    let mut jac_kkt = Matrix::zeros(n, n);
    for j in 0..n {
        let mut rhs = vec![0.0; n + k];
        rhs[j] = 1.0;
        let sol = match crate::numerics::solve_symmetric(&kkt, &rhs) {
            Ok(s) => s,
            Err(Error::Singular { pivot_index }) => {
                return Err(Error::SecondOrderDegenerate { pivot_index })
            }
            Err(e) => return Err(e),
        };
        for i in 0..n {
            jac_kkt[(i, j)] = sol[i];
        }
    }

    // Compare on directions orthogonal to c.
    let tangent = nullspace_basis(&Matrix::from_rows(&[c.to_vec()])?, tol::RANK_TOL);
    let mut discrepancy = 0.0f64;
    for j in 0..tangent.cols() {
        let t = tangent.col(j);
        let df = jac_fd.matvec(&t);
        let dk = jac_kkt.matvec(&t);
        discrepancy = discrepancy.max(norm_inf(&numerics::sub(&df, &dk)));
    }

    Ok(SensitivityReport {
        jac_rank: rank_estimate(&jac_kkt, tol::RANK_TOL),
        jac_fd,
        jac_kkt,
        discrepancy,
        manifold_dim: m.dim,
        supported,
        fd_step: h,
    })
}
