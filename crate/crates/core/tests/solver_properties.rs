//! Solver-wide properties over seeded direction sweeps: feasibility and
//! KKT stationarity everywhere, the support-function subgradient identity
//! via central finite differences, and dominance of the support value over
//! feasible sample points.

use tame_opt_core::body::{fixture, ConvexBody, FixtureId};
use tame_opt_core::cones::{normal_cone, strict_complementarity, RiVerdict};
use tame_opt_core::harness::{diagnose, DiagnoseOptions, Overall};
use tame_opt_core::numerics::norm;
use tame_opt_core::rng;
use tame_opt_core::solver::{maximize_linear, support_value, SolverOptions};

fn unit_dirs(count: usize, seed: u64) -> Vec<Vec<f64>> {
    (0..count)
        .map(|i| rng::unit_sphere_point(&mut rng::substream(seed, i as u64), 3))
        .collect()
}

#[test]
fn feasibility_and_kkt_stationarity_on_all_fixtures() {
    let opts = SolverOptions::default();
    for id in FixtureId::ALL {
        let body = fixture(id);
        for (i, c) in unit_dirs(100, 0xfeed).iter().enumerate() {
            let r = maximize_linear(&body, c, &opts)
                .unwrap_or_else(|e| panic!("{id:?} sample {i}: {e}"));
            assert!(
                body.contains(&r.x, 1e-7).unwrap(),
                "{id:?} sample {i}: infeasible solution"
            );
            assert!(
                r.kkt_residual <= 1e-6 * (1.0 + norm(c)),
                "{id:?} sample {i}: kkt residual {}",
                r.kkt_residual
            );
            assert!(r.gap <= opts.gap_target);
            // The objective always sits in (or on) its own active cone.
            let cone = normal_cone(&body, &r.x, &r.active)
                .unwrap_or_else(|e| panic!("{id:?} sample {i}: {e}"));
            let sc = strict_complementarity(&cone, c).unwrap();
            assert_ne!(
                sc.verdict,
                RiVerdict::Outside,
                "{id:?} sample {i}: objective outside its active cone"
            );
        }
    }
}

// Seeded directions filtered down to clearly generic ones: identifiable
// with comfortable decay and strict-complementarity margins, so the
// support function is smooth across the finite-difference stencil.
fn generic_dirs(body: &ConvexBody, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut opts = DiagnoseOptions::default();
    opts.decay_count = 150;
    let mut out = Vec::new();
    let mut index = 0u64;
    while out.len() < count && index < 400 {
        let c = rng::unit_sphere_point(&mut rng::substream(seed, index), body.n());
        index += 1;
        opts.seed = seed ^ index;
        let rep = diagnose(body, &c, &opts);
        let generic = rep.overall == Overall::Identifiable
            && rep.delta_global().is_some_and(|d| d >= 0.02)
            && rep.t_star().is_some_and(|t| t >= 0.02);
        if generic {
            out.push(c);
        }
    }
    assert!(
        out.len() == count,
        "only {} of {count} generic directions found",
        out.len()
    );
    out
}

#[test]
fn support_function_subgradient_identity() {
    let opts = SolverOptions::default();
    let h = 1e-3;
    for id in FixtureId::ALL {
        let body = fixture(id);
        for c in generic_dirs(&body, 20, 0x51ee) {
            let base = maximize_linear(&body, &c, &opts).unwrap();
            for j in 0..3 {
                let mut cp = c.clone();
                cp[j] += h;
                let plus = support_value(&body, &cp, &opts).unwrap();
                cp[j] -= 2.0 * h;
                let minus = support_value(&body, &cp, &opts).unwrap();
                let lhs = (plus - minus - 2.0 * h * base.x[j]).abs();
                assert!(
                    lhs <= 5e-4 * h,
                    "{id:?}: coordinate {j} identity residual {lhs:.3e} at c = {c:?}"
                );
            }
        }
    }
}

#[test]
fn support_value_dominates_feasible_points() {
    let opts = SolverOptions::default();
    for id in FixtureId::ALL {
        let body = fixture(id);
        for (k, c) in unit_dirs(3, 0xd0).iter().enumerate() {
            let sigma = support_value(&body, c, &opts).unwrap();
            let mut stream = rng::substream(0xfea5, k as u64);
            let mut kept = 0;
            let mut draws = 0;
            while kept < 1000 {
                draws += 1;
                assert!(draws < 2_000_000, "{id:?}: feasible sampling starved");
                let y = tame_opt_core::numerics::scaled(
                    &rng::unit_ball_point(&mut stream, 3),
                    body.radius(),
                );
                if body.contains(&y, 0.0).unwrap() {
                    kept += 1;
                    let val = tame_opt_core::numerics::dot(c, &y);
                    assert!(
                        sigma >= val - 1e-7,
                        "{id:?}: sigma {sigma} < objective {val} at feasible point"
                    );
                }
            }
        }
    }
}
