//! Crate error type. Hand-rolled so the core stays dependency-free on
//! `no_std` builds.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Snapshot of the barrier state attached to convergence failures.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConvergenceTrace {
    pub mu: f64,
    pub newton_iters: usize,
    pub backtracks: usize,
    pub x: Vec<f64>,
    pub merit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Vector/matrix dimensions disagree with the ambient dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// A precondition on an argument failed.
    InvalidInput(String),
    /// A constraint failed the sampled-Hessian convexity probe; carries the
    /// witness point and the offending eigenvalue.
    ConvexityProbe {
        constraint: usize,
        witness: Vec<f64>,
        eigenvalue: f64,
    },
    /// The declared Slater point violates a constraint.
    SlaterInfeasible { constraint: usize, value: f64 },
    /// Symmetric factorization hit a pivot below tolerance.
    Singular { pivot_index: usize },
    /// Phase-I could not certify a strictly feasible point; `best_slack` is
    /// the smallest constraint slack achieved.
    NoInterior { best_slack: f64 },
    /// Newton stagnated on the barrier merit function.
    Convergence(ConvergenceTrace),
    /// An "active" constraint has a numerically zero gradient, so the
    /// gradient representation of the normal cone is invalid there.
    DegenerateGradient { constraint: usize, norm: f64 },
    /// Gauss–Newton walk on the equality-active variety diverged.
    WalkDiverged { residual: f64 },
    /// Too few usable samples for a decay estimate.
    Sampling { usable: usize, needed: usize },
    /// The bordered KKT system is singular: second-order sufficiency fails
    /// numerically at this point.
    SecondOrderDegenerate { pivot_index: usize },
    /// Fixture name is not one of the known identifiers.
    UnknownFixture(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::ConvexityProbe {
                constraint,
                witness,
                eigenvalue,
            } => write!(
                f,
                "constraint {constraint} failed the convexity probe: Hessian eigenvalue {eigenvalue:.3e} at {witness:?}"
            ),
            Error::SlaterInfeasible { constraint, value } => write!(
                f,
                "Slater point infeasible: constraint {constraint} evaluates to {value:.3e}"
            ),
            Error::Singular { pivot_index } => {
                write!(f, "numerically singular system at pivot {pivot_index}")
            }
            Error::NoInterior { best_slack } => write!(
                f,
                "no verified interior point (best slack {best_slack:.3e}); the body may be lower-dimensional"
            ),
            Error::Convergence(t) => write!(
                f,
                "barrier Newton stagnated at mu={:.3e} after {} iterations ({} backtracks)",
                t.mu, t.newton_iters, t.backtracks
            ),
            Error::DegenerateGradient { constraint, norm } => write!(
                f,
                "active constraint {constraint} has degenerate gradient (norm {norm:.3e})"
            ),
            Error::WalkDiverged { residual } => write!(
                f,
                "manifold walk diverged (equality residual {residual:.3e})"
            ),
            Error::Sampling { usable, needed } => write!(
                f,
                "only {usable} usable samples (need {needed}); radius too small relative to the body"
            ),
            Error::SecondOrderDegenerate { pivot_index } => write!(
                f,
                "bordered KKT system singular at pivot {pivot_index}: second-order sufficiency fails numerically"
            ),
            Error::UnknownFixture(name) => write!(f, "unknown fixture `{name}`"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
