//! Numerical laboratory for inductive-limit systems of matrix-valued
//! function algebras: exact dyadic contraction paths, piecewise-linear
//! matrix functions with tracked Lipschitz constants, the AF embedding of
//! the limit, truncated GNS spaces with their orthogonal decomposition,
//! Dirac operators D = Σ αₙQₙ with certified commutator estimates, and
//! summability diagnostics on dimension sequences.

pub mod commands;
pub mod config;
pub mod dirac;
pub mod dyadic;
pub mod error;
pub mod gns;
pub mod matfun;
pub mod numerics;
pub mod paths;
pub mod report;
pub mod summability;
pub mod system;

pub use error::{Error, Result};
