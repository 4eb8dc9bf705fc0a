//! Numerical laboratory for finite-capacity quantum state spaces.
//!
//! Every computable structure lives here as a plain function over small dense
//! complex matrices: the distinguishability kernel and its mixed extension,
//! the cyclic generator and its band-limited interpolation, mutually unbiased
//! bases, Fubini-Study / Fisher-Rao geometry and the selection of the Born
//! exponent, bit budgets for deterministic assignments, tensor composition,
//! and the finite-N sampling floors.
//!
//! Dimensions are desk-scale: `1 <= N <= MAX_DIM`.

#![forbid(unsafe_code)]

pub mod capacity;
pub mod composition;
pub mod dynamics;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod mub;
pub mod random;
pub mod report;
pub mod sampling;
pub mod state;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use random::RandomSource;
pub use report::{CheckReport, Comparator, ParamValue, Params};
pub use state::{Basis, DensityOperator, PureState, Unitary};

/// Tolerance for closed-form algebraic identities.
pub const TOL_ALG: f64 = 1e-12;

/// Tolerance for iterative or optimized results.
pub const TOL_ITER: f64 = 1e-8;

/// Largest supported state-space dimension.
pub const MAX_DIM: usize = 64;
