//! Analysis of quotients of Euclidean space by orthogonal torus actions and
//! their finite extensions.
//!
//! * [`lattice`]: exact Hermite/Smith forms and integer kernels.
//! * [`actions`]: torus actions by weight matrix, finite orthogonal groups.
//! * [`split`]: split detection with integer circle certificates.
//! * [`curvature`]: quotient sectional curvature on the principal stratum.
//! * [`strata`]: isotropy strata, orbifold classification, local reductions
//!   and quotient distances.
//! * [`reflection`]: reflection subgroups, chambers, chamber-map extension
//!   and conjugacy of finite orthogonal groups.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod actions;
pub mod curvature;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod reflection;
pub mod split;
pub mod strata;

pub use actions::{ExtendedAction, FiniteOrthGroup, TorusAction};
pub use error::{Error, Result};
pub use lattice::IntMatrix;
