//! Active-manifold extraction and the three-condition partial-smoothness
//! verdict: (i) the equality-active variety is a manifold (LICQ), (ii) the
//! normal cone map is continuous along it at the base point, (iii)
//! sharpness — the span of the normal cone matches the manifold's normal
//! space by dimension count.
//!
//! The candidate manifold is always the equality-active variety
//! `{x : g_i(x) = 0, i ∈ A}`; for polynomial-inequality bodies under Slater
//! plus LICQ this is the canonical local realization. A user-supplied
//! active set is first-class: the interesting manifold is not always the
//! solver's equality-active set at the base point.

use crate::body::ConvexBody;
use crate::cones::{cone_sphere_distance, normal_cone, ConeRep};
use crate::error::{Error, Result};
use crate::numerics::{self, norm, norm_inf, nullspace_basis, rank_estimate, Matrix};
use crate::rng;
use crate::solver::SolveResult;
use crate::tol;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

/// The equality-active variety at a point, with LICQ status and an
/// orthonormal tangent frame when it is a manifold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ActiveManifold {
    pub active: Vec<usize>,
    pub base_point: Vec<f64>,
    /// `n − |A|` under LICQ; `None` when LICQ fails (the variety need not
    /// be a manifold there).
    pub dim: Option<usize>,
    pub licq: bool,
    /// Orthonormal basis of the tangent space (columns); empty without
    /// LICQ.
    pub tangent_basis: Matrix,
}

impl ActiveManifold {
    pub fn tangent_dirs(&self) -> Vec<Vec<f64>> {
        (0..self.tangent_basis.cols())
            .map(|j| self.tangent_basis.col(j))
            .collect()
    }
}

/// Builds the manifold data for an explicit active set at `x`.
pub fn manifold_from_active(
    body: &ConvexBody,
    x: &[f64],
    active: &[usize],
) -> Result<ActiveManifold> {
    let n = body.n();
    let cone = normal_cone(body, x, active)?;
    let rank = cone.span_rank();
    let licq = rank == active.len();
    let grads = Matrix::from_rows(cone.generators())?;
    let (dim, tangent) = if licq {
        let t = nullspace_basis(&grads, tol::RANK_TOL);
        (Some(n - active.len()), t)
    } else {
        (None, Matrix::zeros(n, 0))
    };
    Ok(ActiveManifold {
        active: active.to_vec(),
        base_point: x.to_vec(),
        dim,
        licq,
        tangent_basis: tangent,
    })
}

/// Manifold candidate from a solve: the solver's detected active set.
pub fn extract_manifold(body: &ConvexBody, result: &SolveResult) -> Result<ActiveManifold> {
    manifold_from_active(body, &result.x, &result.active)
}

/// Gauss–Newton walk: corrects `x̄ + radius·direction` back onto the
/// equality system `{g_i = 0, i ∈ A}`. The returned point satisfies
/// `‖g_A‖∞ ≤ 1e−11` and lies within `2·radius` of the base point.
pub fn walk_manifold(
    body: &ConvexBody,
    m: &ActiveManifold,
    direction: &[f64],
    radius: f64,
) -> Result<Vec<f64>> {
    if !m.licq {
        return Err(Error::InvalidInput(
            "cannot walk a manifold without LICQ".into(),
        ));
    }
    if (norm(direction) - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidInput(
            "direction must be a unit vector".into(),
        ));
    }
    if radius > 0.1 * body.radius() {
        return Err(Error::InvalidInput(format!(
            "walk radius {radius} exceeds 0.1·R = {}",
            0.1 * body.radius()
        )));
    }
    let target = 1e-11;
    let mut y = numerics::add_scaled(&m.base_point, radius, direction);
    let mut last = f64::INFINITY;
    for _ in 0..60 {
        let g: Vec<f64> = m
            .active
            .iter()
            .map(|&i| body.constraints()[i].eval(&y))
            .collect::<Result<_>>()?;
        let res = norm_inf(&g);
        if res <= target {
            if numerics::dist(&y, &m.base_point) > 2.0 * radius {
                return Err(Error::WalkDiverged { residual: res });
            }
            return Ok(y);
        }
        if res >= last {
            return Err(Error::WalkDiverged { residual: res });
        }
        last = res;
        let rows: Vec<Vec<f64>> = m
            .active
            .iter()
            .map(|&i| body.constraints()[i].grad(&y))
            .collect::<Result<_>>()?;
        let gmat = Matrix::from_rows(&rows)?;
        // y ← y − Gᵀ (G Gᵀ)⁻¹ g
        let gram = gmat.matmul(&gmat.transpose());
        let delta = crate::numerics::solve_symmetric(&gram, &g)
            .map_err(|_| Error::WalkDiverged { residual: res })?;
        let correction = gmat.tmatvec(&delta);
        y = numerics::sub(&y, &correction);
    }
    Err(Error::WalkDiverged { residual: last })
}

/// Continuity-probe knobs for condition (ii).
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeOptions {
    /// Total tangent directions (deterministic ± basis first, seeded random
    /// combinations after).
    pub count: usize,
    /// Probe budget per cone-distance evaluation.
    pub cone_samples: usize,
    pub seed: u64,
    /// Distance threshold at the smaller radius.
    pub cont_tol: f64,
    /// Probe radii, largest first.
    pub radii: [f64; 2],
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            count: 6,
            cone_samples: 32,
            seed: 0,
            cont_tol: tol::CONT_TOL,
            radii: tol::PROBE_RADII,
        }
    }
}

/// One continuity probe: walk out along a tangent direction at one radius,
/// recompute the full active set there, and measure the directed cone
/// distance from the base cone.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ProbeRecord {
    pub direction: Vec<f64>,
    pub radius: f64,
    pub distance: Option<f64>,
    pub active_at_probe: Option<Vec<usize>>,
    pub active_matches: Option<bool>,
    pub error: Option<String>,
}

/// Numeric evidence backing the three conditions.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PsDetails {
    pub active: Vec<usize>,
    pub active_rank: usize,
    pub manifold_dim: Option<usize>,
    /// Full active set at the base point (may exceed the manifold's set).
    pub base_active: Vec<usize>,
    pub base_span_rank: usize,
    pub probes: Vec<ProbeRecord>,
    /// Worst distance per radius (largest first), over successful probes.
    pub max_distance: [Option<f64>; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PsOutcome {
    Pass,
    Fail,
    Inconclusive,
}

/// The three-condition verdict. `cond_ii` is `None` when every probe
/// direction failed to walk — numerical failure is never reported as a
/// geometric one.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PartialSmoothnessVerdict {
    pub cond_i: bool,
    pub cond_ii: Option<bool>,
    pub cond_iii: bool,
    pub details: PsDetails,
}

impl PartialSmoothnessVerdict {
    pub fn outcome(&self) -> PsOutcome {
        if !self.cond_i || self.cond_ii == Some(false) || !self.cond_iii {
            PsOutcome::Fail
        } else if self.cond_ii.is_none() {
            PsOutcome::Inconclusive
        } else {
            PsOutcome::Pass
        }
    }

    pub fn passes(&self) -> bool {
        self.outcome() == PsOutcome::Pass
    }
}

/// Full active set at `x` by the primal activity test.
pub fn full_active_set(body: &ConvexBody, x: &[f64]) -> Result<Vec<usize>> {
    let g_tol = tol::act_g_tol(body.radius());
    Ok(body
        .eval_all(x)?
        .iter()
        .enumerate()
        .filter(|(_, &g)| g >= -g_tol)
        .map(|(i, _)| i)
        .collect())
}

/// Checks Definition-style partial smoothness of the body at the
/// manifold's base point.
///
/// (i) is LICQ (polynomial constraints are C², so LICQ makes the
/// equality-active variety a local C² manifold). (ii) walks tangent
/// directions at two radii, recomputes the full active set at each walked
/// point, and requires both active-set constancy and a small directed cone
/// distance from the base cone `N_F(x̄)` at the smaller radius — outer
/// semicontinuity always holds and is not probed. (iii) compares the span
/// rank of the base cone against `n − dim M`. Zero-dimensional manifolds
/// have no tangent directions and satisfy (ii) vacuously.
pub fn check_partial_smoothness(
    body: &ConvexBody,
    m: &ActiveManifold,
    probe: &ProbeOptions,
) -> Result<PartialSmoothnessVerdict> {
    let n = body.n();
    let base_active = full_active_set(body, &m.base_point)?;
    let base_cone = normal_cone(body, &m.base_point, &base_active)?;

    let cond_i = m.licq;
    let cond_iii = match m.dim {
        Some(d) => base_cone.span_rank() == n - d,
        None => false,
    };

    let mut probes: Vec<ProbeRecord> = Vec::new();
    let mut max_distance: [Option<f64>; 2] = [None, None];
    let cond_ii = if !m.licq {
        None
    } else if m.dim == Some(0) {
        Some(true)
    } else {
        let dirs = probe_directions(m, probe);
        let mut any_success = false;
        let mut ok = true;
        for (di, dir) in dirs.iter().enumerate() {
            for (ri, &radius) in probe.radii.iter().enumerate() {
                let mut rec = ProbeRecord {
                    direction: dir.clone(),
                    radius,
                    distance: None,
                    active_at_probe: None,
                    active_matches: None,
                    error: None,
                };
                match probe_once(body, m, &base_cone, dir, radius, probe, di, ri) {
                    Ok((distance, active, matches)) => {
                        any_success = true;
                        rec.distance = Some(distance);
                        rec.active_at_probe = Some(active);
                        rec.active_matches = Some(matches);
                        max_distance[ri] =
                            Some(max_distance[ri].map_or(distance, |d: f64| d.max(distance)));
                        if !matches {
                            ok = false;
                        }
                    }
                    Err(e) => rec.error = Some(e.to_string()),
                }
                probes.push(rec);
            }
        }
        if !any_success {
            None
        } else {
            let small_ok = max_distance[1].is_some_and(|d| d <= probe.cont_tol);
            Some(ok && small_ok)
        }
    };

    Ok(PartialSmoothnessVerdict {
        cond_i,
        cond_ii,
        cond_iii,
        details: PsDetails {
            active: m.active.clone(),
            active_rank: rank_estimate(&base_gradients(body, m)?, tol::RANK_TOL),
            manifold_dim: m.dim,
            base_active,
            base_span_rank: base_cone.span_rank(),
            probes,
            max_distance,
        },
    })
}

fn base_gradients(body: &ConvexBody, m: &ActiveManifold) -> Result<Matrix> {
    let rows: Vec<Vec<f64>> = m
        .active
        .iter()
        .map(|&i| body.constraints()[i].grad(&m.base_point))
        .collect::<Result<_>>()?;
    Matrix::from_rows(&rows)
}

fn probe_directions(m: &ActiveManifold, probe: &ProbeOptions) -> Vec<Vec<f64>> {
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for t in m.tangent_dirs() {
        dirs.push(t.clone());
        dirs.push(numerics::scaled(&t, -1.0));
    }
    let basis = m.tangent_dirs();
    let mut stream = rng::substream(probe.seed, 0x70726f62);
    while dirs.len() < probe.count && !basis.is_empty() {
        let mut d = vec![0.0; m.base_point.len()];
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
    dirs
}

#[allow(clippy::too_many_arguments)]
fn probe_once(
    body: &ConvexBody,
    m: &ActiveManifold,
    base_cone: &ConeRep,
    dir: &[f64],
    radius: f64,
    probe: &ProbeOptions,
    dir_index: usize,
    radius_index: usize,
) -> Result<(f64, Vec<usize>, bool)> {
    let x_r = walk_manifold(body, m, dir, radius)?;
    let active_r = full_active_set(body, &x_r)?;
    let cone_r = normal_cone(body, &x_r, &active_r)?;
    let seed = probe
        .seed
        .wrapping_add((dir_index as u64) << 8)
        .wrapping_add(radius_index as u64);
    let d = cone_sphere_distance(base_cone, &cone_r, probe.cone_samples, seed);
    let matches = active_r == m.active;
    Ok((d, active_r, matches))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{fixture, FixtureId};
    use crate::solver::{maximize_linear, SolverOptions};

    fn solve(id: FixtureId, c: [f64; 3]) -> (crate::body::ConvexBody, SolveResult) {
        let b = fixture(id);
        let r = maximize_linear(&b, &c, &SolverOptions::default()).unwrap();
        (b, r)
    }

    #[test]
    fn ridge_extraction() {
        let (b, r) = solve(FixtureId::Ridge, [0.0, 0.0, -1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        assert_eq!(m.active, vec![0, 1]);
        assert!(m.licq);
        assert_eq!(m.dim, Some(1));
        let t = m.tangent_basis.col(0);
        assert!((t[0].abs() - 1.0).abs() < 1e-6, "{t:?}");
        assert!(t[1].abs() < 1e-6 && t[2].abs() < 1e-6);
    }

    #[test]
    fn ball_boundary_manifold() {
        let (b, r) = solve(FixtureId::Ball, [0.3, -0.5, 0.8]);
        let m = extract_manifold(&b, &r).unwrap();
        assert_eq!(m.active, vec![0]);
        assert!(m.licq);
        assert_eq!(m.dim, Some(2));
        // Tangent frame orthogonal to the active gradient.
        let grad = b.constraints()[0].grad(&r.x).unwrap();
        for t in m.tangent_dirs() {
            assert!(numerics::dot(&grad, &t).abs() < 1e-9);
        }
    }

    #[test]
    fn bad_square_licq_failure_at_origin() {
        let (b, r) = solve(FixtureId::BadSquare, [0.0, 0.0, -1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        assert_eq!(m.active, vec![0, 1]);
        assert!(!m.licq);
        assert_eq!(m.dim, None);
    }

    #[test]
    fn ridge_walk_follows_the_valley() {
        let (b, r) = solve(FixtureId::Ridge, [0.0, 0.0, -1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        let p = walk_manifold(&b, &m, &[1.0, 0.0, 0.0], 0.01).unwrap();
        assert!((p[0] - 0.01).abs() < 1e-4);
        assert!(p[1].abs() < 1e-9);
        assert!((p[2] - 1e-4).abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn ball_walk_stays_on_sphere() {
        let (b, r) = solve(FixtureId::Ball, [0.0, 0.0, 1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        for dir in m.tangent_dirs() {
            let p = walk_manifold(&b, &m, &dir, 0.01).unwrap();
            assert!((norm(&p) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn nc_fail_supplied_active_set_walks_the_parabola() {
        let b = fixture(FixtureId::NcFail);
        let m = manifold_from_active(&b, &[0.0; 3], &[1, 2]).unwrap();
        assert!(m.licq);
        assert_eq!(m.dim, Some(1));
        for t in [0.01f64, -0.01] {
            let dir = [t.signum(), 0.0, 0.0];
            let p = walk_manifold(&b, &m, &dir, t.abs()).unwrap();
            assert!((p[0] - t).abs() < 1e-4);
            assert!((p[1] - t * t).abs() < 1e-6);
            assert!(p[2].abs() < 1e-9, "{p:?}");
        }
    }

    #[test]
    fn walk_radius_cap_enforced() {
        let (b, r) = solve(FixtureId::Ridge, [0.0, 0.0, -1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        assert!(matches!(
            walk_manifold(&b, &m, &[1.0, 0.0, 0.0], 0.5),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn ridge_is_partly_smooth_at_origin() {
        let (b, r) = solve(FixtureId::Ridge, [0.0, 0.0, -1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        let v = check_partial_smoothness(&b, &m, &ProbeOptions::default()).unwrap();
        assert!(v.cond_i);
        assert_eq!(v.cond_ii, Some(true));
        assert!(v.cond_iii);
        assert!(v.passes());
        // Distances shrink with radius.
        let d_large = v.details.max_distance[0].unwrap();
        let d_small = v.details.max_distance[1].unwrap();
        assert!(d_small <= 0.6 * d_large + 1e-9, "{d_small} vs {d_large}");
    }

    #[test]
    fn nc_fail_condition_two_fails() {
        let b = fixture(FixtureId::NcFail);
        let m = manifold_from_active(&b, &[0.0; 3], &[1, 2]).unwrap();
        let v = check_partial_smoothness(&b, &m, &ProbeOptions::default()).unwrap();
        assert!(v.cond_i);
        assert!(v.cond_iii, "span of all active gradients is 2 = 3 − 1");
        assert_eq!(v.cond_ii, Some(false));
        // The witness probe (0,−1,0) gives an O(1) distance at both radii.
        assert!(v.details.max_distance[1].unwrap() >= 0.5);
        assert_eq!(v.outcome(), PsOutcome::Fail);
    }

    #[test]
    fn bad_square_fails_via_licq() {
        let (b, r) = solve(FixtureId::BadSquare, [0.0, 0.0, -1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        let v = check_partial_smoothness(&b, &m, &ProbeOptions::default()).unwrap();
        assert!(!v.cond_i);
        assert_eq!(v.outcome(), PsOutcome::Fail);
    }

    #[test]
    fn box_facet_manifold_dims() {
        let (b, r) = solve(FixtureId::Box, [0.0, 0.0, -1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        // Bottom facet: single active constraint −w − 1 ≤ 0.
        assert_eq!(m.active, vec![5]);
        assert_eq!(m.dim, Some(2));
        let v = check_partial_smoothness(&b, &m, &ProbeOptions::default()).unwrap();
        assert!(v.passes());
    }

    #[test]
    fn box_vertex_is_vacuously_continuous() {
        let (b, r) = solve(FixtureId::Box, [0.4, 0.5, -0.77]);
        let m = extract_manifold(&b, &r).unwrap();
        assert_eq!(m.dim, Some(0));
        let v = check_partial_smoothness(&b, &m, &ProbeOptions::default()).unwrap();
        assert_eq!(v.cond_ii, Some(true));
        assert!(v.passes());
    }

    #[test]
    fn verdict_invariant_under_constraint_rescaling() {
        // Same set F with every constraint scaled by 2.
        let base = fixture(FixtureId::Ridge);
        let scaled_constraints: Vec<_> = base.constraints()[..2]
            .iter()
            .map(|g| g.scale(2.0))
            .collect();
        let b2 =
            crate::body::ConvexBody::new(3, scaled_constraints, 2.0, Some(vec![0.0, 0.0, 1.0]))
                .unwrap();
        let r1 = maximize_linear(&base, &[0.0, 0.0, -1.0], &SolverOptions::default()).unwrap();
        let r2 = maximize_linear(&b2, &[0.0, 0.0, -1.0], &SolverOptions::default()).unwrap();
        let m1 = extract_manifold(&base, &r1).unwrap();
        let m2 = extract_manifold(&b2, &r2).unwrap();
        let v1 = check_partial_smoothness(&base, &m1, &ProbeOptions::default()).unwrap();
        let v2 = check_partial_smoothness(&b2, &m2, &ProbeOptions::default()).unwrap();
        assert_eq!(v1.passes(), v2.passes());
        assert_eq!(v1.cond_i, v2.cond_i);
        assert_eq!(v1.cond_iii, v2.cond_iii);
    }

    #[test]
    fn rank_arithmetic_invariant_along_walks() {
        let (b, r) = solve(FixtureId::Ridge, [0.0, 0.0, -1.0]);
        let m = extract_manifold(&b, &r).unwrap();
        let base = normal_cone(
            &b,
            &m.base_point,
            &full_active_set(&b, &m.base_point).unwrap(),
        )
        .unwrap();
        for radius in tol::PROBE_RADII {
            let p = walk_manifold(&b, &m, &[1.0, 0.0, 0.0], radius).unwrap();
            let act = full_active_set(&b, &p).unwrap();
            if act == m.active {
                let cone = normal_cone(&b, &p, &act).unwrap();
                assert_eq!(cone.span_rank(), base.span_rank());
            }
        }
    }
}
