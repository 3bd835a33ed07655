//! Documented exceptional sets for the built-in fixtures.
//!
//! The directions where the identifiability package fails lie, for these
//! bodies, on finitely many great circles (objective ties between faces or
//! branches, and transition circles where the optimal face changes)
//! together with the strict-complementarity boundaries — directions on a
//! face of the normal cone at their own solution, where some active
//! multiplier vanishes. Both parts are unions of planes through the
//! origin, so the angular distance from a unit direction `c` to the set is
//! `min arcsin |⟨c, n̂⟩|` over the plane normals.

use tame_opt_core::body::{ConvexBody, FixtureId};
use tame_opt_core::numerics::{dot, norm, normalized};
use tame_opt_core::solver::SolveResult;

/// Positive root of `t² + t⁴ = 4`: the valley of the ridge (and of
/// bad_square) meets the bounding sphere at `u = ±T_CORNER`.
pub fn t_corner() -> f64 {
    ((-1.0 + 17.0f64.sqrt()) / 2.0).sqrt()
}

/// Unit normals of the documented exceptional great circles.
pub fn circle_normals(id: FixtureId) -> Vec<[f64; 3]> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let t = t_corner();
    let scale = (1.0 + 4.0 * t * t).sqrt();
    match id {
        // Every direction is generic for the ball.
        FixtureId::Ball => vec![],
        // Facet ties: some coordinate vanishes.
        FixtureId::Box => vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        // Vertex ties with the origin ({c_i = 0}) and between unit vertices
        // ({c_i = c_j}).
        FixtureId::Simplex => vec![
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [s, -s, 0.0],
            [s, 0.0, -s],
            [0.0, s, -s],
        ],
        // Valley ↔ sheet ties ({c2 = ±c3}), horizontal directions
        // ({c3 = 0}), and the valley ↔ sphere corner circles
        // ({c1 = ∓2T·c3}).
        FixtureId::Ridge => vec![
            [0.0, s, s],
            [0.0, s, -s],
            [0.0, 0.0, 1.0],
            [1.0 / scale, 0.0, 2.0 * t / scale],
            [1.0 / scale, 0.0, -2.0 * t / scale],
        ],
        // Branch tie between the two manifolds ({c2 = c3}), slide-off
        // circles ({c2 = 0}, {c3 = 0}) and the Example-2 circle {c1 = 0}
        // where the solution sits at the origin corner.
        FixtureId::NcFail => vec![
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, s, -s],
        ],
        // Branch ties ({|c1| = |c2|}), horizontal directions, and the
        // valley ↔ sphere corner circles (same corner parameter as the
        // ridge, by the (u±v) substitution).
        FixtureId::BadSquare => vec![
            [s, s, 0.0],
            [s, -s, 0.0],
            [0.0, 0.0, 1.0],
            [1.0 / scale, 0.0, 2.0 * t / scale],
            [1.0 / scale, 0.0, -2.0 * t / scale],
            [0.0, 1.0 / scale, 2.0 * t / scale],
            [0.0, 1.0 / scale, -2.0 * t / scale],
        ],
    }
}

/// Angular distance (radians) from `c` to the fixture's documented
/// exceptional set: the explicit circles plus, when a solution is given,
/// the normal-cone face planes spanned by pairs of active gradients at the
/// solution (strict-complementarity boundaries).
pub fn distance_to_exceptional(
    id: FixtureId,
    body: &ConvexBody,
    c: &[f64],
    solution: Option<&SolveResult>,
) -> f64 {
    let Some(chat) = normalized(c) else {
        return 0.0;
    };
    let mut best = f64::INFINITY;
    for n in circle_normals(id) {
        best = best.min(dot(&chat, &n).abs().asin());
    }
    if let Some(r) = solution {
        if body.n() == 3 {
            let grads: Vec<Vec<f64>> = r
                .active
                .iter()
                .filter_map(|&i| body.constraints()[i].grad(&r.x).ok())
                .collect();
            for i in 0..grads.len() {
                for j in (i + 1)..grads.len() {
                    let n = cross(&grads[i], &grads[j]);
                    if norm(&n) > 1e-9 {
                        let nh = normalized(&n).expect("nonzero cross product");
                        best = best.min(dot(&chat, &nh).abs().asin());
                    }
                }
            }
        }
    }
    best
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use tame_opt_core::body::fixture;

    #[test]
    fn normals_are_unit() {
        for id in FixtureId::ALL {
            for n in circle_normals(id) {
                assert!((norm(&n) - 1.0).abs() < 1e-12, "{id:?} {n:?}");
            }
        }
    }

    #[test]
    fn tie_directions_have_zero_distance() {
        let b = fixture(FixtureId::BadSquare);
        // |c1| = |c2| is the branch tie.
        let d = distance_to_exceptional(FixtureId::BadSquare, &b, &[0.3, 0.3, -0.9], None);
        assert!(d < 1e-12, "distance {d}");
        let far = distance_to_exceptional(FixtureId::BadSquare, &b, &[0.5, 0.1, -0.88], None);
        assert!(far > 0.05, "distance {far}");
    }

    #[test]
    fn box_distance_is_smallest_coordinate_angle() {
        let b = fixture(FixtureId::Box);
        let c = [0.03f64, 0.6, -0.79];
        let d = distance_to_exceptional(FixtureId::Box, &b, &c, None);
        let expect = (0.03f64 / norm(&c)).asin();
        assert!((d - expect).abs() < 1e-12);
    }
}
