//! Normal cone objects at solution points: generator representations,
//! relative-interior membership (strict complementarity), and sampled
//! directed distances between cones on the unit sphere.
//!
//! Under the Slater condition the normal cone of the body at a boundary
//! point is the cone of active constraint gradients; that representation is
//! what lives here. Distances between cones are measured between their
//! unit-sphere slices: probe directions of one cone are projected onto the
//! other and the worst mismatch is reported, so a failure of inner
//! semicontinuity (the base cone not being covered by nearby cones) shows
//! up as an O(1) gap.

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::numerics::{
    cone_project, dist, norm, normalized, rank_estimate, ri_membership_lp, Matrix,
};
use crate::rng;
use crate::tol;
use alloc::format;
use alloc::vec::Vec;

/// Finitely generated cone anchored at a point.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConeRep {
    generators: Vec<Vec<f64>>,
    span_rank: usize,
    base_point: Vec<f64>,
}

impl ConeRep {
    /// Builds a cone from explicit generators; rejects zero generators.
    pub fn new(generators: Vec<Vec<f64>>, base_point: Vec<f64>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if norm(g) < tol::GRAD_MIN_NORM {
                return Err(Error::DegenerateGradient {
                    constraint: i,
                    norm: norm(g),
                });
            }
        }
        let span_rank = rank_estimate(&Matrix::from_cols(&generators)?, tol::RANK_TOL);
        Ok(ConeRep {
            generators,
            span_rank,
            base_point,
        })
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn span_rank(&self) -> usize {
        self.span_rank
    }

    pub fn base_point(&self) -> &[f64] {
        &self.base_point
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Generators as the columns of an n×k matrix.
    pub fn generator_matrix(&self) -> Matrix {
        Matrix::from_cols(&self.generators).expect("generators share a dimension")
    }
}

/// The normal cone of the body at `x`, represented by the gradients of the
/// listed active constraints. Every listed constraint must actually be
/// active at `x` (within the body's activity tolerance) and have a
/// non-degenerate gradient.
pub fn normal_cone(body: &ConvexBody, x: &[f64], active: &[usize]) -> Result<ConeRep> {
    if !body.contains(x, tol::FEAS_TOL)? {
        return Err(Error::InvalidInput("base point is infeasible".into()));
    }
    let g_tol = tol::ACT_ACCEPT_TOL;
    let vals = body.eval_all(x)?;
    let mut generators = Vec::with_capacity(active.len());
    for &i in active {
        let Some(g) = body.constraints().get(i) else {
            return Err(Error::InvalidInput(format!(
                "constraint index {i} out of range"
            )));
        };
        if vals[i].abs() > g_tol {
            return Err(Error::InvalidInput(format!(
                "constraint {i} is not active at the base point (g = {:.3e})",
                vals[i]
            )));
        }
        let grad = g.grad(x)?;
        let gn = norm(&grad);
        if gn < tol::GRAD_MIN_NORM {
            return Err(Error::DegenerateGradient {
                constraint: i,
                norm: gn,
            });
        }
        generators.push(grad);
    }
    ConeRep::new(generators, x.to_vec())
}

/// Where the objective sits relative to the cone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum RiVerdict {
    Interior,
    Boundary,
    Outside,
}

/// Strict-complementarity test result: verdict plus the membership LP
/// optimum (`None` when the equality system is infeasible, i.e. the vector
/// is off the cone's span).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StrictComplementarity {
    pub verdict: RiVerdict,
    pub t_star: Option<f64>,
    pub lambda: Vec<f64>,
}

// Objectives handed to the strict-complementarity test come from a solve,
// so they sit off the active cone's span by KKT-residual-sized noise.
// Directions farther off than this (relative to ‖c‖) are genuinely outside.
const OFF_SPAN_TOL: f64 = 1e-6;

/// Tests `c ∈ ri cone` / boundary / outside. The threshold is scale-aware:
/// `t*` is compared against `RI_TOL · ‖c‖`, so the verdict is invariant
/// under positive rescaling of `c`.
///
/// The test operates at KKT tolerance: `c` is first projected onto the
/// span of the generators, and only an off-span component above
/// `1e−6 · ‖c‖` is reported as outside. Without the projection, the
/// O(gap)-sized noise in a converged solve's gradients would make the
/// membership LP's exact equality system infeasible.
pub fn strict_complementarity(cone: &ConeRep, c: &[f64]) -> Result<StrictComplementarity> {
    let c_norm = norm(c);
    if !(c_norm > 0.0) || !c_norm.is_finite() {
        return Err(Error::InvalidInput("objective must be nonzero and finite".into()));
    }
    let v = cone.generator_matrix();
    let c_span = v.matvec(&crate::numerics::least_squares(&v, c, tol::RANK_TOL));
    if dist(c, &c_span) > OFF_SPAN_TOL * c_norm {
        return Ok(StrictComplementarity {
            verdict: RiVerdict::Outside,
            t_star: None,
            lambda: Vec::new(),
        });
    }
    let lp = ri_membership_lp(&cone.generator_matrix(), &c_span)?;
    match lp.status {
        crate::numerics::LpStatus::Infeasible => Ok(StrictComplementarity {
            verdict: RiVerdict::Outside,
            t_star: None,
            lambda: Vec::new(),
        }),
        crate::numerics::LpStatus::Optimal => {
            let thresh = tol::RI_TOL * c_norm;
            let verdict = if lp.t_star > thresh {
                RiVerdict::Interior
            } else if lp.t_star >= -thresh {
                RiVerdict::Boundary
            } else {
                RiVerdict::Outside
            };
            Ok(StrictComplementarity {
                verdict,
                t_star: Some(lp.t_star),
                lambda: lp.lambda,
            })
        }
    }
}

/// Directed distance from cone `a` to cone `b`, sampled on the unit sphere:
/// the worst, over probe directions of `a`, of the distance between the
/// probe and the normalized projection of the probe onto `b` (distance 1
/// when the projection vanishes).
///
/// The probe set always contains the normalized generators of `a` and all
/// pairwise normalized generator midpoints, then seeded random positive
/// combinations up to `samples` probes, so witness directions sitting on a
/// generator or between two generators are hit deterministically.
pub fn cone_sphere_distance(a: &ConeRep, b: &ConeRep, samples: usize, seed: u64) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() { 0.0 } else { 1.0 };
    }
    let vb = b.generator_matrix();
    let mut probes: Vec<Vec<f64>> = Vec::new();
    let hats: Vec<Vec<f64>> = a.generators.iter().filter_map(|g| normalized(g)).collect();
    for h in &hats {
        probes.push(h.clone());
    }
    for i in 0..hats.len() {
        for j in (i + 1)..hats.len() {
            if let Some(m) = normalized(&crate::numerics::add(&hats[i], &hats[j])) {
                probes.push(m);
            }
        }
    }
    let mut stream = rng::substream(seed, 0x636f6e65);
    while probes.len() < samples.max(a.generators.len()) {
        // Random positive combination of the generators.
        let mut p = alloc::vec![0.0; a.base_point.len()];
        for h in &hats {
            let w: f64 = rand::Rng::gen::<f64>(&mut stream);
            for (pi, hi) in p.iter_mut().zip(h) {
                *pi += w * hi;
            }
        }
        match normalized(&p) {
            Some(p) => probes.push(p),
            None => probes.push(hats[0].clone()),
        }
    }

    let mut worst = 0.0f64;
    for p in &probes {
        let q = cone_project(&vb, p);
        let d = match normalized(&q) {
            Some(qh) => dist(p, &qh),
            None => norm(p),
        };
        worst = worst.max(d);
    }
    worst
}
