//! Centralized tolerances. Every verdict downstream (activity, relative
//! interior, rank, decay, continuity) reads from this one page.

/// Equality-solve residual bound scale for the mini-LP: an `optimal` result
/// satisfies `‖Vλ − c‖∞ ≤ LP_TOL`.
pub const LP_TOL: f64 = 1e-9;

/// Relative-interior margin: `t* > RI_TOL · ‖c‖` certifies interior,
/// `|t*| ≤ RI_TOL · ‖c‖` is boundary.
pub const RI_TOL: f64 = 1e-7;

/// Rank cutoff for column-pivoted QR: keep `|R_kk| > RANK_TOL · |R_11|`.
pub const RANK_TOL: f64 = 1e-8;

/// A Slater point must satisfy `g_i(x0) ≤ −SLATER_MARGIN` for every
/// constraint, the appended ball included.
pub const SLATER_MARGIN: f64 = 1e-6;

/// Feasibility slack for membership checks on solver output.
pub const FEAS_TOL: f64 = 1e-7;

/// Convexity probe: minimum sampled Hessian eigenvalue must stay above this.
pub const CONVEXITY_EIG_TOL: f64 = -1e-9;

/// Number of seeded sample points used by the convexity probe.
pub const CONVEXITY_PROBE_POINTS: usize = 200;

/// Generators (active-constraint gradients) below this norm are degenerate.
pub const GRAD_MIN_NORM: f64 = 1e-12;

/// Quadratic-decay constant threshold: `delta_hat > DELTA_TOL` certifies a
/// strong maximizer at sampling scale.
pub const DELTA_TOL: f64 = 1e-4;

/// Normal-cone continuity threshold at probe radius 1e−3.
pub const CONT_TOL: f64 = 0.05;

/// Probe radii for the normal-cone continuity check, largest first.
pub const PROBE_RADII: [f64; 2] = [1e-2, 1e-3];

/// Bisection iterations used when pulling an infeasible decay sample back
/// onto the feasible segment.
pub const DECAY_BISECT_ITERS: usize = 12;

/// Symmetry requirement on inputs to the symmetric solver.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Pivot cutoff (relative to matrix scale) for the symmetric factorization.
pub const PIVOT_TOL: f64 = 1e-12;

/// Validation band for *claimed* active sets: a constraint handed to the
/// normal-cone builder is accepted as active when `|g_i(x)| ≤ ACT_ACCEPT_TOL`.
/// Wider than the primal detection band because multiplier-based detection
/// at the duality-gap target can flag constraints whose primal residual is
/// still `μ/λ ≈ gap/(m·act_lambda_tol)`, a few units of 1e−4.
pub const ACT_ACCEPT_TOL: f64 = 1e-3;

/// Multiplier threshold for active-set detection, scaled by `‖c‖`.
pub fn act_lambda_tol(c_norm: f64) -> f64 {
    1e-6 * c_norm
}

/// Primal threshold for active-set detection, scaled by the body size:
/// constraint `i` is primal-active when `g_i(x) ≥ −act_g_tol(R)`.
pub fn act_g_tol(radius: f64) -> f64 {
    1e-7 * (1.0 + radius * radius)
}
