//! Linear optimization over compact convex basic semi-algebraic sets, with
//! numerical diagnostics for the identifiability package: unique maximizer,
//! partial smoothness around an active manifold, strong criticality, and C¹
//! sensitivity of the solution map.
//!
//! The feasible region is a [`body::ConvexBody`]: finitely many convex
//! polynomial inequalities `g_i(x) <= 0` intersected with a bounding ball.
//! [`solver`] maximizes a linear functional over it by log-barrier path
//! following; [`cones`], [`identify`] and [`criticality`] inspect the
//! solution's normal cone, active manifold and second-order behavior; and
//! [`harness`] runs whole-sphere surveys and great-circle path probes to
//! measure how rarely the package fails.
//!
//! The crate is `no_std`-compatible (`default-features = false`); it needs
//! only `alloc`. All randomized routines take explicit seeds and derive
//! per-sample substreams from a counter-based generator (ChaCha), so every
//! result is reproducible bit for bit.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod body;
pub mod cones;
pub mod criticality;
pub mod error;
pub mod harness;
pub mod identify;
pub mod numerics;
pub mod poly;
pub mod rng;
pub mod solver;
pub mod tol;

pub use body::{ConvexBody, FixtureId};
pub use error::{Error, Result};
pub use numerics::Matrix;
pub use poly::Polynomial;
pub use solver::{SolveResult, SolverOptions};

// `Float` brings sqrt/ln/abs/... into scope on no_std builds (via libm);
// on std builds the inherent f64 methods shadow it.
#[allow(unused_imports)]
pub(crate) use num_traits::Float;
