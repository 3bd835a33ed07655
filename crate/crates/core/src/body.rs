//! The feasible region: a compact convex basic semi-algebraic set given by
//! convex polynomial inequalities `g_i(x) ≤ 0` plus a bounding ball
//! `‖x‖² − R² ≤ 0` that is always appended as the last constraint, making
//! compactness mechanical. Includes the fixture library used throughout the
//! tests and the CLI.
//!
//! Convexity of each `g_i` is probed by sampling Hessian eigenvalues at 200
//! seeded points in `B(0, R)` — a probe failure is a hard error, a pass
//! means "probed, not proven".

use crate::error::{Error, Result};
use crate::numerics::symmetric_eigenvalues;
use crate::poly::Polynomial;
use crate::rng;
use crate::tol;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

// Seed for the convexity probe's sample points; fixed so validation is
// reproducible.
const PROBE_SEED: u64 = 0x636f_6e76;

/// Validated compact convex feasible region.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvexBody {
    n: usize,
    /// User constraints followed by the appended ball constraint.
    constraints: Vec<Polynomial>,
    radius: f64,
    slater: Option<Vec<f64>>,
}

impl ConvexBody {
    /// Builds and validates a body from user constraints. Appends the ball
    /// constraint, probes convexity of every constraint, and verifies the
    /// Slater point when one is given.
    pub fn new(
        n: usize,
        user_constraints: Vec<Polynomial>,
        radius: f64,
        slater: Option<Vec<f64>>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("ambient dimension must be ≥ 1".into()));
        }
        if !(radius > 0.0) {
            return Err(Error::InvalidInput("radius must be > 0".into()));
        }
        for g in &user_constraints {
            if g.nvars() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: g.nvars(),
                });
            }
        }
        if let Some(x0) = &slater {
            if x0.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: x0.len(),
                });
            }
        }

        let mut constraints = user_constraints;
        constraints.push(ball_constraint(n, radius));
        let body = ConvexBody {
            n,
            constraints,
            radius,
            slater,
        };
        body.probe_convexity()?;
        if let Some(x0) = body.slater.clone() {
            body.verify_slater(&x0)?;
        }
        Ok(body)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// All constraints, the appended ball last.
    pub fn constraints(&self) -> &[Polynomial] {
        &self.constraints
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    /// Index of the appended ball constraint (always the last one).
    pub fn ball_index(&self) -> usize {
        self.constraints.len() - 1
    }

    /// The constraints as loaded, without the appended ball.
    pub fn user_constraints(&self) -> &[Polynomial] {
        &self.constraints[..self.constraints.len() - 1]
    }

    pub fn slater(&self) -> Option<&[f64]> {
        self.slater.as_deref()
    }

    /// `g_i(x)` for all constraints, ball included.
    pub fn eval_all(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.constraints.iter().map(|g| g.eval(x)).collect()
    }

    /// True iff `g_i(x) ≤ tol` for every constraint.
    pub fn contains(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.eval_all(x)?.iter().all(|&g| g <= tol))
    }

    /// Checks `g_i(x0) ≤ −SLATER_MARGIN` for all constraints.
    pub fn verify_slater(&self, x0: &[f64]) -> Result<()> {
        let vals = self.eval_all(x0)?;
        for (i, &g) in vals.iter().enumerate() {
            if g > -tol::SLATER_MARGIN {
                return Err(Error::SlaterInfeasible {
                    constraint: i,
                    value: g,
                });
            }
        }
        Ok(())
    }

    fn probe_convexity(&self) -> Result<()> {
        let mut stream = rng::substream(PROBE_SEED, self.n as u64);
        let points: Vec<Vec<f64>> = (0..tol::CONVEXITY_PROBE_POINTS)
            .map(|_| {
                crate::numerics::scaled(&rng::unit_ball_point(&mut stream, self.n), self.radius)
            })
            .collect();
        for (i, g) in self.constraints.iter().enumerate() {
            for x in &points {
                let (_, _, hess) = g.jet2(x)?;
                let eigs = symmetric_eigenvalues(&hess);
                let min_eig = eigs[0];
                if min_eig < tol::CONVEXITY_EIG_TOL {
                    return Err(Error::ConvexityProbe {
                        constraint: i,
                        witness: x.clone(),
                        eigenvalue: min_eig,
                    });
                }
            }
        }
        Ok(())
    }
}

fn ball_constraint(n: usize, radius: f64) -> Polynomial {
    let mut terms = Vec::with_capacity(n + 1);
    for j in 0..n {
        let mut e = vec![0u32; n];
        e[j] = 2;
        terms.push(crate::poly::Term { exps: e, coef: 1.0 });
    }
    terms.push(crate::poly::Term {
        exps: vec![0; n],
        coef: -radius * radius,
    });
    Polynomial::new(n, terms).expect("ball constraint is well-formed")
}

/// Names of the built-in bodies reproducing the geometry this crate is
/// designed to probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum FixtureId {
    /// Unit ball in R³ (no user constraints).
    Ball,
    /// Cube [−1, 1]³.
    Box,
    /// Standard simplex {x ≥ 0, Σx ≤ 1}.
    Simplex,
    /// `w ≥ u² + |v|`, split as u²+v−w ≤ 0 and u²−v−w ≤ 0. Partly smooth
    /// at the origin relative to the valley {(t, 0, t²)}.
    Ridge,
    /// `v ≥ 0, w ≥ 0, v+w ≥ u²`: the normal cone map is discontinuous at
    /// the origin along the manifold {(t, t², 0)}.
    NcFail,
    /// `w ≥ (|u|+|v|)²`, split as (u+v)²−w ≤ 0 and (u−v)²−w ≤ 0. Perturbed
    /// optima describe two distinct manifolds meeting at the origin.
    BadSquare,
}

impl FixtureId {
    pub const ALL: [FixtureId; 6] = [
        FixtureId::Ball,
        FixtureId::Box,
        FixtureId::Simplex,
        FixtureId::Ridge,
        FixtureId::NcFail,
        FixtureId::BadSquare,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FixtureId::Ball => "ball",
            FixtureId::Box => "box",
            FixtureId::Simplex => "simplex",
            FixtureId::Ridge => "ridge",
            FixtureId::NcFail => "nc_fail",
            FixtureId::BadSquare => "bad_square",
        }
    }

    pub fn parse(name: &str) -> Result<FixtureId> {
        FixtureId::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::UnknownFixture(String::from(name)))
    }
}

/// Builds the named fixture body. Constraint orders and coefficients are
/// documented bit-exactly in the README.
pub fn fixture(id: FixtureId) -> ConvexBody {
    let p = |pairs: &[(&[u32], f64)]| Polynomial::from_pairs(3, pairs).expect("fixture polynomial");
    let (constraints, radius, slater) = match id {
        FixtureId::Ball => (vec![], 1.0, vec![0.0, 0.0, 0.0]),
        FixtureId::Box => {
            let mut cs = Vec::new();
            for j in 0..3usize {
                let mut e = [0u32; 3];
                e[j] = 1;
                cs.push(p(&[(&e, 1.0), (&[0, 0, 0], -1.0)]));
                cs.push(p(&[(&e, -1.0), (&[0, 0, 0], -1.0)]));
            }
            (cs, 2.0, vec![0.0, 0.0, 0.0])
        }
        FixtureId::Simplex => (
            vec![
                p(&[(&[1, 0, 0], -1.0)]),
                p(&[(&[0, 1, 0], -1.0)]),
                p(&[(&[0, 0, 1], -1.0)]),
                p(&[
                    (&[1, 0, 0], 1.0),
                    (&[0, 1, 0], 1.0),
                    (&[0, 0, 1], 1.0),
                    (&[0, 0, 0], -1.0),
                ]),
            ],
            2.0,
            vec![0.2, 0.2, 0.2],
        ),
        FixtureId::Ridge => (
            vec![
                p(&[(&[2, 0, 0], 1.0), (&[0, 1, 0], 1.0), (&[0, 0, 1], -1.0)]),
                p(&[(&[2, 0, 0], 1.0), (&[0, 1, 0], -1.0), (&[0, 0, 1], -1.0)]),
            ],
            2.0,
            vec![0.0, 0.0, 1.0],
        ),
        FixtureId::NcFail => (
            vec![
                p(&[(&[0, 1, 0], -1.0)]),
                p(&[(&[0, 0, 1], -1.0)]),
                p(&[(&[2, 0, 0], 1.0), (&[0, 1, 0], -1.0), (&[0, 0, 1], -1.0)]),
            ],
            2.0,
            vec![0.0, 0.5, 0.5],
        ),
        FixtureId::BadSquare => (
            vec![
                p(&[
                    (&[2, 0, 0], 1.0),
                    (&[1, 1, 0], 2.0),
                    (&[0, 2, 0], 1.0),
                    (&[0, 0, 1], -1.0),
                ]),
                p(&[
                    (&[2, 0, 0], 1.0),
                    (&[1, 1, 0], -2.0),
                    (&[0, 2, 0], 1.0),
                    (&[0, 0, 1], -1.0),
                ]),
            ],
            2.0,
            vec![0.0, 0.0, 1.0],
        ),
    };
    ConvexBody::new(3, constraints, radius, Some(slater)).expect("fixtures validate")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_validate() {
        for id in FixtureId::ALL {
            let b = fixture(id);
            assert_eq!(b.n(), 3);
            assert!(b.contains(b.slater().unwrap(), 0.0).unwrap());
        }
    }

    #[test]
    fn ridge_feasibility_hand_values() {
        let b = fixture(FixtureId::Ridge);
        // (0.1, 0.1, 0.2): g1 = 0.01 + 0.1 − 0.2 < 0, g2 < 0.
        assert!(b.contains(&[0.1, 0.1, 0.2], 0.0).unwrap());
        // (0, 0, −0.1): g1 = 0.1 > 0.
        assert!(!b.contains(&[0.0, 0.0, -0.1], 0.0).unwrap());
        // The valley (t, 0, t²) is feasible with both g's equal to zero.
        let t = 0.3;
        assert!(b.contains(&[t, 0.0, t * t], 1e-12).unwrap());
        let vals = b.eval_all(&[t, 0.0, t * t]).unwrap();
        assert_eq!(vals[0], 0.0);
        assert_eq!(vals[1], 0.0);
    }

    #[test]
    fn bad_square_matches_absolute_value_form() {
        let b = fixture(FixtureId::BadSquare);
        // (1,1,3): (|1|+|1|)² = 4 > 3, and indeed g1 = (u+v)²−w = 1 > 0.
        assert!(!b.contains(&[1.0, 1.0, 3.0], 0.0).unwrap());
        assert_eq!(b.eval_all(&[1.0, 1.0, 3.0]).unwrap()[0], 1.0);
        // Generic agreement of max(g1, g2) with (|u|+|v|)² − w.
        for &(u, v, w) in &[(0.3, -0.2, 0.5), (-0.4, -0.1, 0.2), (0.0, 0.7, 0.49)] {
            let vals = b.eval_all(&[u, v, w]).unwrap();
            let abs_form = (u.abs() + v.abs()).powi(2) - w;
            assert!((vals[0].max(vals[1]) - abs_form).abs() < 1e-12);
        }
    }

    #[test]
    fn ball_contains_center() {
        let b = fixture(FixtureId::Ball);
        assert!(b.contains(&[0.0, 0.0, 0.0], 0.0).unwrap());
        assert!(!b.contains(&[1.1, 0.0, 0.0], 0.0).unwrap());
    }

    #[test]
    fn empty_constraint_list_is_the_ball() {
        let b = ConvexBody::new(2, vec![], 1.0, None).unwrap();
        assert_eq!(b.num_constraints(), 1);
        assert!(b.contains(&[0.6, 0.6], 0.0).unwrap());
        assert!(!b.contains(&[0.8, 0.8], 0.0).unwrap());
    }

    #[test]
    fn concave_constraint_fails_probe_with_witness() {
        // −u² + v has Hessian diag(−2, 0).
        let g = Polynomial::from_pairs(2, &[(&[2, 0], -1.0), (&[0, 1], 1.0)]).unwrap();
        match ConvexBody::new(2, vec![g], 1.0, None) {
            Err(Error::ConvexityProbe {
                constraint,
                eigenvalue,
                witness,
            }) => {
                assert_eq!(constraint, 0);
                assert!((eigenvalue + 2.0).abs() < 1e-9);
                assert_eq!(witness.len(), 2);
            }
            other => panic!("expected convexity probe failure, got {other:?}"),
        }
    }

    #[test]
    fn infeasible_slater_rejected() {
        let g = Polynomial::from_pairs(2, &[(&[1, 0], 1.0)]).unwrap(); // u ≤ 0
        match ConvexBody::new(2, vec![g], 1.0, Some(vec![0.5, 0.0])) {
            Err(Error::SlaterInfeasible {
                constraint: 0,
                value,
            }) => {
                assert!((value - 0.5).abs() < 1e-12);
            }
            other => panic!("expected Slater failure, got {other:?}"),
        }
    }

    #[test]
    fn contains_monotone_in_tol() {
        let b = fixture(FixtureId::Ridge);
        let x = [0.5, 0.1, 0.3]; // slightly infeasible: g1 = 0.05
        assert!(!b.contains(&x, 0.0).unwrap());
        assert!(b.contains(&x, 0.1).unwrap());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let b = fixture(FixtureId::Ball);
        assert!(matches!(
            b.contains(&[0.0, 0.0], 0.0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn feasible_midpoints_stay_feasible() {
        // Convexity spot check on seeded feasible pairs.
        for id in [FixtureId::Ridge, FixtureId::BadSquare, FixtureId::Simplex] {
            let b = fixture(id);
            let mut stream = rng::stream(99);
            let draw_feasible = |stream: &mut rng::Stream| loop {
                let x = crate::numerics::scaled(&rng::unit_ball_point(stream, 3), b.radius());
                if b.contains(&x, 0.0).unwrap() {
                    return x;
                }
            };
            for _ in 0..100 {
                let x = draw_feasible(&mut stream);
                let y = draw_feasible(&mut stream);
                let mid: Vec<f64> = x.iter().zip(&y).map(|(a, c)| 0.5 * (a + c)).collect();
                assert!(b.contains(&mid, 1e-9).unwrap());
            }
        }
    }
}
