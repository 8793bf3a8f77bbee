//! Local Riemannian reductions of split torus actions.
//!
//! For a split action, the slice `S` keeps the `x`-axis of every rotated plane
//! together with every coordinate the torus fixes, and `Γ` is generated by the
//! half-turn of each rotated plane, realized by the circle that rotates that
//! plane alone.

use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::distance::{quotient_distance_finite, quotient_distance_torus, TorusDistanceOptions};
use crate::actions::{bigint_to_f64, FiniteOrthGroup, TorusAction, DEFAULT_GROUP_TOL};
use crate::curvature::gaussian_vector;
use crate::error::{Error, Result};
use crate::split::{canonical_split_form, CanonicalSplit};

#[derive(Clone, Debug)]
pub struct ReductionPair {
    /// Orthonormal coordinate vectors spanning `S`.
    pub subspace_basis: Vec<DVector<f64>>,
    pub gamma: FiniteOrthGroup,
    /// Rotated planes, each contributing one `Z/2` factor.
    pub rotated_planes: Vec<usize>,
}

impl ReductionPair {
    pub fn basis_matrix(&self, m: usize) -> DMatrix<f64> {
        DMatrix::from_fn(m, self.subspace_basis.len(), |r, c| self.subspace_basis[c][r])
    }

    /// Checks that every element of `Γ` maps `S` into itself.
    pub fn gamma_preserves_subspace(&self, tol: f64) -> bool {
        let m = self.gamma.dim();
        let b = self.basis_matrix(m);
        let proj = &b * b.transpose();
        self.gamma.elements().iter().all(|g| {
            let img = g * &b;
            (&img - &proj * &img).norm() <= tol
        })
    }
}

pub fn local_reduction(action: &TorusAction) -> Result<ReductionPair> {
    let (transform, decoupled, planes) = match canonical_split_form(action.weights()) {
        CanonicalSplit::NonSplit { .. } => return Err(Error::NotSplit),
        CanonicalSplit::Split {
            transform,
            decoupled,
            planes,
        } => (transform, decoupled, planes),
    };
    let m = action.ambient_dim();
    let axis = |j: usize| {
        let mut e = DVector::zeros(m);
        e[j] = 1.0;
        e
    };
    let mut basis = Vec::new();
    for i in 0..action.n() {
        basis.push(axis(action.x_axis(i)));
        if !planes.contains(&i) {
            basis.push(axis(action.y_axis(i)));
        }
    }
    for j in 0..action.fixed_dim() {
        basis.push(axis(action.fixed_axis(j)));
    }
    let generators: Vec<DMatrix<f64>> = planes
        .iter()
        .enumerate()
        .map(|(row, &i)| {
            let speed = bigint_to_f64(&decoupled[(row, i)]);
            let theta: Vec<f64> = transform
                .row(row)
                .iter()
                .map(|c| PI * bigint_to_f64(c) / speed)
                .collect();
            action.rotation(&theta)
        })
        .collect();
    let gamma = FiniteOrthGroup::close(m, &generators, DEFAULT_GROUP_TOL, 1usize << planes.len())?;
    Ok(ReductionPair {
        subspace_basis: basis,
        gamma,
        rotated_planes: planes,
    })
}

/// `|d_{S/Γ}(x, y) − d_{Rᵐ/T}(x, y)|` for points of `S`, and the torus gap.
pub fn reduction_deviation(
    action: &TorusAction,
    pair: &ReductionPair,
    x: &DVector<f64>,
    y: &DVector<f64>,
    opts: &TorusDistanceOptions,
) -> Result<(f64, f64)> {
    let finite = quotient_distance_finite(&pair.gamma, x, y);
    let torus = quotient_distance_torus(action, x, y, opts)?;
    Ok(((finite - torus.value).abs(), torus.gap))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IsometryReport {
    pub pairs: usize,
    pub max_deviation: f64,
    pub max_gap: f64,
}

/// Compares both quotient distances on `pairs` Gaussian point pairs in `S`.
pub fn reduction_isometry_check(
    action: &TorusAction,
    pairs: usize,
    seed: u64,
    opts: &TorusDistanceOptions,
) -> Result<IsometryReport> {
    let pair = local_reduction(action)?;
    let m = action.ambient_dim();
    let b = pair.basis_matrix(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = IsometryReport {
        pairs,
        max_deviation: 0.0,
        max_gap: 0.0,
    };
    for _ in 0..pairs {
        let x = &b * gaussian_vector(&mut rng, b.ncols());
        let y = &b * gaussian_vector(&mut rng, b.ncols());
        let (dev, gap) = reduction_deviation(action, &pair, &x, &y, opts)?;
        report.max_deviation = report.max_deviation.max(dev);
        report.max_gap = report.max_gap.max(gap);
    }
    Ok(report)
}
