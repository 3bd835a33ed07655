//! Log-barrier interior-point maximization of a linear functional over a
//! [`ConvexBody`], with multiplier recovery and active-set detection.
//!
//! The path follower repeatedly minimizes
//! `−⟨c,x⟩ − μ Σ_i log(−g_i(x))` by damped Newton (Armijo backtracking on
//! the barrier merit), shrinking `μ` until the duality-gap bound
//! `m·μ` reaches the target. Multipliers come out as `λ_i = μ / (−g_i(x))`.
//! Phase-I runs the same machinery on the lifted problem
//! `min s  s.t.  g_i(x) ≤ s`, so a body without a declared Slater point
//! still gets a verified strictly interior start (or a hard error when the
//! body has empty interior).

use crate::body::ConvexBody;
use crate::error::{ConvergenceTrace, Error, Result};
use crate::numerics::{self, dot, norm, solve_symmetric, Matrix};
use crate::poly::{Polynomial, Term};
use crate::tol;
use crate::Float;
use alloc::vec;
use alloc::vec::Vec;

/// Barrier/Newton knobs. Defaults are robust for small smooth problems; all
/// of them surface as CLI flags in the companion crate.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverOptions {
    pub mu0: f64,
    pub mu_shrink: f64,
    pub gap_target: f64,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub max_backtracks: usize,
    pub armijo_factor: f64,
    pub armijo_slope: f64,
    /// Optional starting point (e.g. the previous solution on a path
    /// probe); blended toward the interior if it is not strictly feasible.
    pub warm_start: Option<Vec<f64>>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            mu0: 1.0,
            mu_shrink: 0.2,
            gap_target: 1e-9,
            newton_tol: 1e-10,
            max_newton_iters: 100,
            max_backtracks: 50,
            armijo_factor: 0.5,
            armijo_slope: 0.25,
            warm_start: None,
        }
    }
}

/// Converged solve: maximizer, optimal value (the support function at `c`),
/// multipliers, detected active set, duality-gap bound and KKT residual.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolveResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub lambda: Vec<f64>,
    /// Sorted constraint indices with `λ_i ≥ act_lambda_tol(‖c‖)` or
    /// `g_i(x) ≥ −act_g_tol(R)`; the appended ball is the last index.
    pub active: Vec<usize>,
    /// Final `m·μ` bound on the duality gap.
    pub gap: f64,
    /// `‖c − Σ λ_i ∇g_i(x)‖`.
    pub kkt_residual: f64,
}

/// Maximizes `⟨c, x⟩` over the body. Deterministic given `opts`.
pub fn maximize_linear(body: &ConvexBody, c: &[f64], opts: &SolverOptions) -> Result<SolveResult> {
    let n = body.n();
    if c.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: c.len(),
        });
    }
    let c_norm = norm(c);
    if !(c_norm > 0.0) || !c_norm.is_finite() {
        return Err(Error::InvalidInput("objective must be nonzero and finite".into()));
    }

    let x0 = starting_point(body, opts)?;
    let lin = numerics::scaled(c, -1.0);
    let (x, mu) = barrier_minimize(body.constraints(), &lin, x0, opts, None)?;

    let g = body.eval_all(&x)?;
    let m = body.num_constraints();
    let lambda: Vec<f64> = g.iter().map(|gi| mu / (-gi)).collect();
    let value = dot(c, &x);
    let gap = m as f64 * mu;

    let lam_tol = tol::act_lambda_tol(c_norm);
    let g_tol = tol::act_g_tol(body.radius());
    let active: Vec<usize> = (0..m)
        .filter(|&i| lambda[i] >= lam_tol || g[i] >= -g_tol)
        .collect();

    // Stationarity residual c − Σ λ_i ∇g_i(x).
    let mut res = c.to_vec();
    for (i, gi) in body.constraints().iter().enumerate() {
        let grad = gi.grad(&x)?;
        for (r, d) in res.iter_mut().zip(&grad) {
            *r -= lambda[i] * d;
        }
    }

    Ok(SolveResult {
        x,
        value,
        lambda,
        active,
        gap,
        kkt_residual: norm(&res),
    })
}

/// The support function `σ_F(c)`: the optimal value of `maximize_linear`.
pub fn support_value(body: &ConvexBody, c: &[f64], opts: &SolverOptions) -> Result<f64> {
    Ok(maximize_linear(body, c, opts)?.value)
}

/// Returns a point with `g_i(x0) ≤ −SLATER_MARGIN` for every constraint.
///
/// A declared Slater point is verified and returned as-is. Otherwise
/// phase-I minimizes `s` over `{(x, s) : g_i(x) ≤ s}` (ball constraint
/// lifted the same way, `s` boxed) with the same barrier machinery, and
/// fails with [`Error::NoInterior`] when the optimum cannot be driven below
/// the margin — the body may be lower-dimensional.
pub fn find_interior_point(body: &ConvexBody, opts: &SolverOptions) -> Result<Vec<f64>> {
    if let Some(x0) = body.slater() {
        body.verify_slater(x0)?;
        return Ok(x0.to_vec());
    }
    let n = body.n();
    let origin = vec![0.0; n];
    let g0 = body.eval_all(&origin)?;
    if g0.iter().all(|&g| g <= -tol::SLATER_MARGIN) {
        return Ok(origin);
    }

    // Lifted constraints in (x, s).
    let s_hi = g0.iter().fold(0.0f64, |m, &g| m.max(g)) + 2.0;
    let mut lifted: Vec<Polynomial> = Vec::with_capacity(body.num_constraints() + 2);
    for g in body.constraints() {
        lifted.push(lift_minus_s(g));
    }
    let zeros = vec![0u32; n + 1];
    lifted.push(
        Polynomial::from_pairs(n + 1, &[(&s_var(n), 1.0), (&zeros, -s_hi)]).expect("s upper bound"),
    );
    lifted.push(
        Polynomial::from_pairs(n + 1, &[(&s_var(n), -1.0), (&zeros, -s_hi)])
            .expect("s lower bound"),
    );

    let mut z0 = vec![0.0; n + 1];
    z0[n] = s_hi - 1.0;
    let mut lin = vec![0.0; n + 1];
    lin[n] = 1.0; // minimize s

    let margin = tol::SLATER_MARGIN;
    let stop = move |z: &[f64]| z[z.len() - 1] <= -8.0 * margin;
    // Deciding s* against the margin only needs ~1e−8 accuracy; a tighter
    // gap drags the degenerate (empty-interior) endgame through needlessly
    // ill-conditioned Newton systems.
    let mut phase1_opts = opts.clone();
    phase1_opts.gap_target = opts.gap_target.max(1e-8);
    phase1_opts.warm_start = None;
    let z = match barrier_minimize(&lifted, &lin, z0, &phase1_opts, Some(&stop)) {
        Ok((z, _mu)) => z,
        // A stalled phase-I endgame with s still above the margin IS the
        // empty-interior evidence.
        Err(Error::Convergence(trace)) if trace.x[n] > -tol::SLATER_MARGIN => {
            return Err(Error::NoInterior {
                best_slack: trace.x[n],
            })
        }
        Err(e) => return Err(e),
    };

    let s_star = z[n];
    if s_star > -tol::SLATER_MARGIN {
        return Err(Error::NoInterior { best_slack: s_star });
    }
    let x: Vec<f64> = z[..n].to_vec();
    body.verify_slater(&x)
        .map_err(|_| Error::NoInterior { best_slack: s_star })?;
    Ok(x)
}

fn s_var(n: usize) -> Vec<u32> {
    let mut e = vec![0u32; n + 1];
    e[n] = 1;
    e
}

// g(x) − s as a polynomial in (x, s).
fn lift_minus_s(g: &Polynomial) -> Polynomial {
    let n = g.nvars();
    let mut terms: Vec<Term> = g
        .terms()
        .iter()
        .map(|t| {
            let mut e = t.exps.clone();
            e.push(0);
            Term {
                exps: e,
                coef: t.coef,
            }
        })
        .collect();
    terms.push(Term {
        exps: s_var(n),
        coef: -1.0,
    });
    Polynomial::new(n + 1, terms).expect("lifted constraint is well-formed")
}

fn starting_point(body: &ConvexBody, opts: &SolverOptions) -> Result<Vec<f64>> {
    if let Some(w) = &opts.warm_start {
        if w.len() != body.n() {
            return Err(Error::DimensionMismatch {
                expected: body.n(),
                got: w.len(),
            });
        }
        if strictly_feasible(body, w)? {
            return Ok(w.clone());
        }
        // Blend toward the interior until strictly feasible.
        let interior = find_interior_point(body, opts)?;
        for &theta in &[1e-3, 1e-2, 0.1, 0.5, 1.0] {
            let blended = numerics::add_scaled(&numerics::scaled(w, 1.0 - theta), theta, &interior);
            if strictly_feasible(body, &blended)? {
                return Ok(blended);
            }
        }
        return Ok(interior);
    }
    find_interior_point(body, opts)
}

fn strictly_feasible(body: &ConvexBody, x: &[f64]) -> Result<bool> {
    Ok(body
        .eval_all(x)?
        .iter()
        .all(|&g| g <= -0.1 * tol::SLATER_MARGIN))
}

/// Damped-Newton log-barrier minimization of `⟨lin, x⟩` over
/// `{g_i(x) < 0}`. Returns the final iterate and the final `μ`.
fn barrier_minimize(
    constraints: &[Polynomial],
    lin: &[f64],
    x0: Vec<f64>,
    opts: &SolverOptions,
    stop_when: Option<&dyn Fn(&[f64]) -> bool>,
) -> Result<(Vec<f64>, f64)> {
    let n = lin.len();
    let m = constraints.len();
    let mut x = x0;
    let mut mu = opts.mu0;
    let mut total_newton = 0usize;

    let merit = |x: &[f64], mu: f64| -> Result<f64> {
        let mut f = dot(lin, x);
        for g in constraints {
            let gv = g.eval(x)?;
            if gv >= 0.0 {
                return Ok(f64::INFINITY);
            }
            f -= mu * Float::ln(-gv);
        }
        Ok(f)
    };

    loop {
        // Newton stage at fixed mu. The stage exit is the affine-invariant
        // Newton decrement −⟨grad, Δx⟩ rather than a raw step norm: at the
        // final stages the slack coordinates live at μ scale, and an
        // absolute step tolerance would leave O(1) relative error in the
        // recovered multipliers λ_i = μ/(−g_i).
        let dec_exit = (1e-2 * opts.newton_tol) * (1e-2 * opts.newton_tol);
        let mut stalls = 0usize;
        for iter in 0.. {
            if iter >= opts.max_newton_iters {
                return Err(Error::Convergence(ConvergenceTrace {
                    mu,
                    newton_iters: total_newton,
                    backtracks: 0,
                    x,
                    merit: f64::NAN,
                }));
            }
            let mut grad = lin.to_vec();
            let mut hess = Matrix::zeros(n, n);
            for g in constraints {
                let (gv, gg, gh) = g.jet2(&x)?;
                let inv = 1.0 / (-gv);
                for j in 0..n {
                    grad[j] += mu * gg[j] * inv;
                }
                for j in 0..n {
                    for k in 0..n {
                        hess[(j, k)] += mu * (gg[j] * gg[k] * inv * inv + gh[(j, k)] * inv);
                    }
                }
            }

            let neg_grad = numerics::scaled(&grad, -1.0);
            let step = match solve_symmetric(&hess, &neg_grad) {
                Ok(s) => s,
                Err(Error::Singular { .. }) => {
                    // Polynomial barriers can be flat along faces: Tikhonov
                    // shift scaled to the Hessian, one retry.
                    let shift = 1e-12 * (1.0 + hess.max_abs());
                    let mut shifted = hess.clone();
                    for j in 0..n {
                        shifted[(j, j)] += shift;
                    }
                    match solve_symmetric(&shifted, &neg_grad) {
                        Ok(s) => s,
                        Err(_) => {
                            return Err(Error::Convergence(ConvergenceTrace {
                                mu,
                                newton_iters: total_newton,
                                backtracks: 0,
                                x: x.clone(),
                                merit: merit(&x, mu)?,
                            }))
                        }
                    }
                }
                Err(e) => return Err(e),
            };
            total_newton += 1;

            let decrement = -dot(&grad, &step);
            let f0 = merit(&x, mu)?;
            if decrement <= dec_exit * (1.0 + f0.abs()) {
                break;
            }

            // Armijo backtracking with a floating-point floor; infeasible
            // trial points have infinite merit and are rejected the same
            // way.
            let slope = dot(&grad, &step);
            let floor = 1e-15 * (1.0 + f0.abs());
            let mut t = 1.0;
            let mut f_new = f0;
            for bt in 0..opts.max_backtracks {
                let trial = numerics::add_scaled(&x, t, &step);
                let ft = merit(&trial, mu)?;
                if ft <= f0 + opts.armijo_slope * t * slope + floor {
                    x = trial;
                    f_new = ft;
                    break;
                }
                t *= opts.armijo_factor;
                if bt + 1 == opts.max_backtracks {
                    return Err(Error::Convergence(ConvergenceTrace {
                        mu,
                        newton_iters: total_newton,
                        backtracks: bt + 1,
                        x,
                        merit: f0,
                    }));
                }
            }
            // Two consecutive steps without representable merit progress
            // mean the stage has hit the floating-point floor.
            if f0 - f_new <= 4.0 * f64::EPSILON * (1.0 + f0.abs()) {
                stalls += 1;
                if stalls >= 2 {
                    break;
                }
            } else {
                stalls = 0;
            }
            if let Some(stop) = stop_when {
                if stop(&x) {
                    return Ok((x, mu));
                }
            }
        }

        if let Some(stop) = stop_when {
            if stop(&x) {
                return Ok((x, mu));
            }
        }
        if m as f64 * mu <= opts.gap_target {
            return Ok((x, mu));
        }
        mu *= opts.mu_shrink;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::{fixture, FixtureId};

    fn defaults() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn ball_maximizer_is_scaled_direction() {
        let b = fixture(FixtureId::Ball);
        let r = maximize_linear(&b, &[0.0, 0.0, -1.0], &defaults()).unwrap();
        assert!((r.x[2] + 1.0).abs() < 1e-6, "{:?}", r.x);
        assert!(r.x[0].abs() < 1e-6 && r.x[1].abs() < 1e-6);
        assert!((r.value - 1.0).abs() < 1e-6);
        assert_eq!(r.active, vec![b.ball_index()]);
        assert!(r.gap <= defaults().gap_target);
    }

    #[test]
    fn ridge_downward_objective_finds_the_origin() {
        let b = fixture(FixtureId::Ridge);
        let r = maximize_linear(&b, &[0.0, 0.0, -1.0], &defaults()).unwrap();
        assert!(norm(&r.x) < 1e-6, "{:?}", r.x);
        assert_eq!(r.active, vec![0, 1]);
        assert!((r.lambda[0] - 0.5).abs() < 1e-6);
        assert!((r.lambda[1] - 0.5).abs() < 1e-6);
        assert!(r.kkt_residual <= 1e-6 * 2.0);
    }

    #[test]
    fn bad_square_tilted_objective_matches_closed_form() {
        let b = fixture(FixtureId::BadSquare);
        // maximizer of ε1·u + ε2·v − w with ε1 = 0.2 > ε2 = 0.1 is
        // (ε1/2, 0, ε1²/4) = (0.1, 0, 0.01); cross-checked by grid brute
        // force over the boundary surface below.
        let c = [0.2, 0.1, -1.0];
        let r = maximize_linear(&b, &c, &defaults()).unwrap();

        let mut best = (f64::NEG_INFINITY, [0.0f64, 0.0]);
        let steps = 600i64;
        for iu in -steps..=steps {
            for iv in -steps..=steps {
                let (u, v) = (iu as f64 * 1e-3, iv as f64 * 1e-3);
                let w = (u.abs() + v.abs()).powi(2);
                let val = c[0] * u + c[1] * v + c[2] * w;
                if val > best.0 {
                    best = (val, [u, v]);
                }
            }
        }
        assert!((best.1[0] - 0.1).abs() < 1e-9 && best.1[1].abs() < 1e-9);

        assert!((r.x[0] - 0.1).abs() < 1e-5, "{:?}", r.x);
        assert!(r.x[1].abs() < 1e-5);
        assert!((r.x[2] - 0.01).abs() < 1e-5);
        // Both split constraints are active on the branch v = 0.
        assert_eq!(r.active, vec![0, 1]);
    }

    #[test]
    fn support_value_of_radius_two_ball() {
        let b = ConvexBody::new(3, vec![], 2.0, Some(vec![0.0; 3])).unwrap();
        for c in [[1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.6, 0.0, 0.8]] {
            let s = support_value(&b, &c, &defaults()).unwrap();
            assert!((s - 2.0).abs() < 1e-6, "sigma = {s}");
        }
    }

    #[test]
    fn support_value_positive_homogeneity() {
        let b = fixture(FixtureId::Ridge);
        let c = [0.05, -0.03, -1.0];
        let s1 = support_value(&b, &c, &defaults()).unwrap();
        let s2 = support_value(&b, &numerics::scaled(&c, 2.0), &defaults()).unwrap();
        assert!((s2 - 2.0 * s1).abs() < 1e-8);
    }

    #[test]
    fn ridge_support_at_straight_down_is_zero() {
        let b = fixture(FixtureId::Ridge);
        let s = support_value(&b, &[0.0, 0.0, -1.0], &defaults()).unwrap();
        assert!(s.abs() < 1e-7, "sigma = {s}");
    }

    #[test]
    fn phase_one_finds_ridge_interior() {
        let b = ConvexBody::new(
            3,
            fixture(FixtureId::Ridge).constraints()[..2].to_vec(),
            2.0,
            None,
        )
        .unwrap();
        let opts = defaults();
        let x0 = find_interior_point(&b, &opts).unwrap();
        for g in b.eval_all(&x0).unwrap() {
            assert!(g <= -tol::SLATER_MARGIN);
        }
    }

    #[test]
    fn empty_interior_is_detected() {
        // The slab {u ≤ 0, −u ≤ 0} is the hyperplane u = 0 inside the ball.
        let g1 = Polynomial::from_pairs(2, &[(&[1, 0], 1.0)]).unwrap();
        let g2 = Polynomial::from_pairs(2, &[(&[1, 0], -1.0)]).unwrap();
        let b = ConvexBody::new(2, vec![g1, g2], 1.0, None).unwrap();
        match find_interior_point(&b, &defaults()) {
            Err(Error::NoInterior { best_slack }) => {
                assert!(best_slack > -tol::SLATER_MARGIN);
            }
            other => panic!("expected NoInterior, got {other:?}"),
        }
    }

    #[test]
    fn zero_objective_rejected() {
        let b = fixture(FixtureId::Ball);
        assert!(matches!(
            maximize_linear(&b, &[0.0, 0.0, 0.0], &defaults()),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn maximizer_invariant_under_objective_scaling() {
        let b = fixture(FixtureId::Ridge);
        let c = [0.03, 0.02, -1.0];
        let base = maximize_linear(&b, &c, &defaults()).unwrap();
        for s in [0.5, 3.0] {
            let r = maximize_linear(&b, &numerics::scaled(&c, s), &defaults()).unwrap();
            assert!(numerics::dist(&r.x, &base.x) < 1e-7);
            assert!((r.value - s * base.value).abs() < 1e-7 * (1.0 + s));
        }
    }

    #[test]
    fn warm_start_from_boundary_is_recovered() {
        let b = fixture(FixtureId::Ridge);
        let mut opts = defaults();
        let cold = maximize_linear(&b, &[0.0, 0.0, -1.0], &opts).unwrap();
        opts.warm_start = Some(cold.x.clone());
        let warm = maximize_linear(&b, &[0.01, 0.0, -1.0], &opts).unwrap();
        assert!(b.contains(&warm.x, tol::FEAS_TOL).unwrap());
        // Valley solution u = ε1/2 with ε1 = 0.01.
        assert!((warm.x[0] - 0.005).abs() < 1e-5, "{:?}", warm.x);
    }
}
