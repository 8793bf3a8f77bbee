//! Isotropy strata of a torus action and their orbifold classification.
//!
//! Strata are indexed by the set `N` of planes on which a point vanishes. On the
//! remaining (active) planes the effective torus acts through the active columns
//! of its weight matrix; the isotropy group there is `T^{k−r} × ⊕ Z/dᵢ` with
//! `dᵢ` the invariant factors of those columns. The identity component acts on
//! the slice (the planes in `N`) with weights `C·W_N`, `C` a basis of the
//! integer kernel of the active columns. A stratum is an orbifold stratum
//! exactly when that slice action is split.

mod distance;
mod reduction;

pub use distance::{
    quotient_distance_finite, quotient_distance_torus, TorusDistance, TorusDistanceOptions,
};
pub use reduction::{
    local_reduction, reduction_deviation, reduction_isometry_check, IsometryReport,
    ReductionPair,
};

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::One;

use crate::actions::TorusAction;
use crate::error::{Error, Result};
use crate::lattice::{rational_kernel, smith_normal_form, IntMatrix};
use crate::split::split_verdict;

/// Default cap on the number of planes for exhaustive stratum enumeration.
pub const DEFAULT_MAX_PLANES: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsotropyDescriptor {
    /// Dimension of the identity component.
    pub dim: usize,
    /// Invariant factors `> 1` of the component group.
    pub invariant_factors: Vec<BigInt>,
    /// Weights of the identity component on the vanishing planes
    /// (`dim × |pattern|`, columns in pattern order).
    pub slice_weights: IntMatrix,
}

impl IsotropyDescriptor {
    pub fn finite_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    /// Planes on which points of the stratum vanish, ascending.
    pub pattern: Vec<usize>,
    pub dim_in_total: usize,
    pub dim_in_quotient: usize,
    pub isotropy: IsotropyDescriptor,
}

impl Stratum {
    pub fn is_principal(&self) -> bool {
        self.pattern.is_empty()
    }
}

/// Stratum of points vanishing exactly on `pattern`.
pub fn stratum_for_pattern(action: &TorusAction, pattern: &[usize]) -> Stratum {
    let mut pattern = pattern.to_vec();
    pattern.sort_unstable();
    pattern.dedup();
    let eff = action.effective_weights();
    let active: Vec<usize> = (0..action.n()).filter(|i| !pattern.contains(i)).collect();
    let active_w = eff.select_columns(&active);
    let snf = smith_normal_form(&active_w);
    let rank = snf.rank();
    let invariant_factors: Vec<BigInt> = snf
        .invariant_factors()
        .into_iter()
        .filter(|d| !d.is_one())
        .collect();
    let algebra = rational_kernel(&active_w);
    let slice_weights = algebra.mul(&eff.select_columns(&pattern));
    let k = action.k();
    let dim_in_total = action.ambient_dim() - 2 * pattern.len();
    Stratum {
        dim_in_total,
        dim_in_quotient: dim_in_total - rank,
        isotropy: IsotropyDescriptor {
            dim: k - rank,
            invariant_factors,
            slice_weights,
        },
        pattern,
    }
}

/// All `2ⁿ` strata, ordered by the bitmask of the vanishing pattern.
pub fn enumerate_strata(action: &TorusAction, max_planes: usize) -> Result<Vec<Stratum>> {
    let n = action.n();
    if n > max_planes {
        return Err(Error::TooManyPlanes { n, max: max_planes });
    }
    Ok((0u32..(1u32 << n))
        .map(|mask| {
            let pattern: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            stratum_for_pattern(action, &pattern)
        })
        .collect())
}

pub fn origin_stratum(action: &TorusAction) -> Stratum {
    let all: Vec<usize> = (0..action.n()).collect();
    stratum_for_pattern(action, &all)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StratumClass {
    Orbifold,
    /// The slice action has no circle decoupling `plane` (an ambient plane index).
    NonOrbifold { plane: usize },
}

impl StratumClass {
    pub fn is_orbifold(self) -> bool {
        self == StratumClass::Orbifold
    }
}

pub fn classify_stratum(stratum: &Stratum) -> StratumClass {
    let verdict = split_verdict(&stratum.isotropy.slice_weights);
    match verdict.failing_plane() {
        None => StratumClass::Orbifold,
        Some(j) => StratumClass::NonOrbifold {
            plane: stratum.pattern[j],
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SingularSetDimension {
    /// Largest quotient dimension of a non-orbifold stratum.
    pub dim: Option<usize>,
    /// `min(m − 4, (m − k) − 3)`.
    pub bound: i64,
    pub satisfied: bool,
}

pub fn singular_set_dimension(
    action: &TorusAction,
    max_planes: usize,
) -> Result<SingularSetDimension> {
    let strata = enumerate_strata(action, max_planes)?;
    Ok(singular_set_from_strata(action, &strata))
}

pub fn singular_set_from_strata(action: &TorusAction, strata: &[Stratum]) -> SingularSetDimension {
    let dim = strata
        .iter()
        .filter(|s| !classify_stratum(s).is_orbifold())
        .map(|s| s.dim_in_quotient)
        .max();
    let m = action.ambient_dim() as i64;
    let k = action.k() as i64;
    let bound = (m - 4).min(m - k - 3);
    SingularSetDimension {
        dim,
        bound,
        satisfied: dim.is_none_or(|d| d as i64 <= bound),
    }
}
