//! Orthogonal torus actions given by integer weights, and finite orthogonal groups.
//!
//! Coordinates are ordered `(x₀, y₀, …, x_{n-1}, y_{n-1}, z₀, …, z_{f-1})`: plane `i`
//! is spanned by coordinates `2i, 2i+1`, and the `z` block is fixed by the torus.
//! Angle `a` of the torus rotates plane `i` by `Σ_a θ_a·W[a,i]` radians.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::lattice::{saturate_rows, smith_normal_form, IntMatrix};
use crate::linalg;

/// Frobenius tolerance used to identify group elements.
pub const DEFAULT_GROUP_TOL: f64 = 1e-9;

/// A torus `Tᵏ ≤ O(2n + f)` acting through the standard block maximal torus.
#[derive(Clone, Debug)]
pub struct TorusAction {
    weights: IntMatrix,
    fixed: usize,
    effective: IntMatrix,
    kernel_factors: Vec<BigInt>,
    weights_f: DMatrix<f64>,
}

impl TorusAction {
    /// Validates `weights` (`k × n`) and records the finite acting kernel.
    pub fn new(weights: IntMatrix, fixed: usize) -> Result<Self> {
        let k = weights.rows();
        if let Some(row) = (0..k).find(|&i| weights.row_is_zero(i)) {
            return Err(Error::ZeroRow(row));
        }
        let snf = smith_normal_form(&weights);
        let rank = snf.rank();
        if rank != k {
            return Err(Error::RankDeficient { rows: k, rank });
        }
        let kernel_factors = snf
            .invariant_factors()
            .into_iter()
            .filter(|d| !d.is_one())
            .collect();
        let effective = saturate_rows(&weights);
        let rows = weights.to_f64_rows();
        let n = weights.cols();
        let weights_f = DMatrix::from_fn(k, n, |a, i| rows[a][i]);
        Ok(TorusAction {
            weights,
            fixed,
            effective,
            kernel_factors,
            weights_f,
        })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R], fixed: usize) -> Result<Self> {
        Self::new(IntMatrix::from_rows(rows), fixed)
    }

    /// Torus dimension `k`.
    pub fn k(&self) -> usize {
        self.weights.rows()
    }

    /// Number of invariant 2-planes `n`.
    pub fn n(&self) -> usize {
        self.weights.cols()
    }

    pub fn fixed_dim(&self) -> usize {
        self.fixed
    }

    /// `m = 2n + f`.
    pub fn ambient_dim(&self) -> usize {
        2 * self.n() + self.fixed
    }

    pub fn weights(&self) -> &IntMatrix {
        &self.weights
    }

    pub fn weights_f64(&self) -> &DMatrix<f64> {
        &self.weights_f
    }

    /// Weights of the effective quotient torus `Tᵏ / ker`: a basis of the
    /// saturated row lattice.
    pub fn effective_weights(&self) -> &IntMatrix {
        &self.effective
    }

    /// Invariant factors `> 1` of `W`; their product is the order of the acting kernel.
    pub fn kernel_factors(&self) -> &[BigInt] {
        &self.kernel_factors
    }

    pub fn is_faithful(&self) -> bool {
        self.kernel_factors.is_empty()
    }

    /// Rotation angle of each plane for torus angles `theta`.
    pub fn plane_angles(&self, theta: &[f64]) -> Vec<f64> {
        assert_eq!(theta.len(), self.k(), "angle vector length");
        (0..self.n())
            .map(|i| (0..self.k()).map(|a| theta[a] * self.weights_f[(a, i)]).sum())
            .collect()
    }

    pub fn rotation(&self, theta: &[f64]) -> DMatrix<f64> {
        let m = self.ambient_dim();
        let mut r = DMatrix::identity(m, m);
        for (i, angle) in self.plane_angles(theta).into_iter().enumerate() {
            let (s, c) = libm::sincos(angle);
            r[(2 * i, 2 * i)] = c;
            r[(2 * i, 2 * i + 1)] = -s;
            r[(2 * i + 1, 2 * i)] = s;
            r[(2 * i + 1, 2 * i + 1)] = c;
        }
        r
    }

    /// Skew generator `S_c`: plane `i` carries `(c·W)_i · J` with `J = [[0,-1],[1,0]]`.
    pub fn generator(&self, c: &[f64]) -> DMatrix<f64> {
        let m = self.ambient_dim();
        let mut s = DMatrix::zeros(m, m);
        for (i, speed) in self.plane_angles(c).into_iter().enumerate() {
            s[(2 * i, 2 * i + 1)] = -speed;
            s[(2 * i + 1, 2 * i)] = speed;
        }
        s
    }

    /// Killing field `S_c·x` of the Lie algebra direction `c`.
    pub fn killing_field(&self, c: &[f64], x: &DVector<f64>) -> DVector<f64> {
        self.check_point(x);
        let mut out = DVector::zeros(self.ambient_dim());
        for (i, speed) in self.plane_angles(c).into_iter().enumerate() {
            out[2 * i] = -speed * x[2 * i + 1];
            out[2 * i + 1] = speed * x[2 * i];
        }
        out
    }

    /// `m × k` matrix whose column `a` is the killing field of the `a`-th circle factor at `x`.
    pub fn killing_matrix(&self, x: &DVector<f64>) -> DMatrix<f64> {
        self.check_point(x);
        let (k, m) = (self.k(), self.ambient_dim());
        let mut km = DMatrix::zeros(m, k);
        for a in 0..k {
            for i in 0..self.n() {
                let w = self.weights_f[(a, i)];
                km[(2 * i, a)] = -w * x[2 * i + 1];
                km[(2 * i + 1, a)] = w * x[2 * i];
            }
        }
        km
    }

    /// Orthonormal basis (as columns) of the tangent space to the orbit through `x`.
    pub fn vertical_space(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let km = self.killing_matrix(x);
        let tol = 1e-10 * (1.0 + x.norm()) * (1.0 + self.weights_f.norm());
        linalg::column_space(&km, tol)
    }

    /// Planes with a nonzero component at `x`.
    pub fn active_planes(&self, x: &DVector<f64>, tol: f64) -> Vec<usize> {
        (0..self.n())
            .filter(|&i| libm::hypot(x[2 * i], x[2 * i + 1]) > tol)
            .collect()
    }

    /// Dimension of the isotropy Lie algebra at `x`, computed exactly from the
    /// vanishing pattern of `x`.
    pub fn isotropy_algebra_dim(&self, x: &DVector<f64>, tol: f64) -> usize {
        let active = self.active_planes(x, tol);
        self.k() - self.weights.select_columns(&active).rank()
    }

    /// Embedding of plane/fixed coordinates: basis vector index of `x_i`.
    pub fn x_axis(&self, plane: usize) -> usize {
        2 * plane
    }

    pub fn y_axis(&self, plane: usize) -> usize {
        2 * plane + 1
    }

    pub fn fixed_axis(&self, j: usize) -> usize {
        2 * self.n() + j
    }

    fn check_point(&self, x: &DVector<f64>) {
        assert_eq!(x.len(), self.ambient_dim(), "point dimension");
    }
}

/// A finite subgroup of `O(m)`, stored as its full element list (identity first).
#[derive(Clone, Debug)]
pub struct FiniteOrthGroup {
    dim: usize,
    elements: Vec<DMatrix<f64>>,
    tol: f64,
}

impl FiniteOrthGroup {
    pub fn trivial(dim: usize) -> Self {
        FiniteOrthGroup {
            dim,
            elements: vec![DMatrix::identity(dim, dim)],
            tol: DEFAULT_GROUP_TOL,
        }
    }

    /// Closes `generators` under products. Fails with [`Error::NotClosed`] once
    /// more than `max_order` distinct elements appear.
    pub fn close(
        dim: usize,
        generators: &[DMatrix<f64>],
        tol: f64,
        max_order: usize,
    ) -> Result<Self> {
        for (index, g) in generators.iter().enumerate() {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: g.nrows(),
                });
            }
            let residual = orthogonality_residual(g);
            if residual > tol {
                return Err(Error::NotOrthogonal { index, residual });
            }
        }
        let mut group = FiniteOrthGroup::trivial(dim);
        group.tol = tol;
        let mut frontier = 0;
        while frontier < group.elements.len() {
            for g in generators {
                let p = g * &group.elements[frontier];
                if group.index_of(&p).is_none() {
                    if group.elements.len() == max_order {
                        return Err(Error::NotClosed { max_order });
                    }
                    group.elements.push(p);
                }
            }
            frontier += 1;
        }
        Ok(group)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn elements(&self) -> &[DMatrix<f64>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &DMatrix<f64> {
        &self.elements[i]
    }

    /// Index of the element within Frobenius distance `tol` of `g`.
    pub fn index_of(&self, g: &DMatrix<f64>) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| linalg::frobenius_within(e, g, self.tol))
    }

    pub fn contains(&self, g: &DMatrix<f64>) -> bool {
        self.index_of(g).is_some()
    }

    /// `table[i][j]` is the index of `elements[i] · elements[j]`.
    pub fn cayley_table(&self) -> Option<Vec<Vec<usize>>> {
        self.elements
            .iter()
            .map(|a| {
                self.elements
                    .iter()
                    .map(|b| self.index_of(&(a * b)))
                    .collect::<Option<Vec<_>>>()
            })
            .collect()
    }

    /// Multiplicative order of element `i`.
    pub fn element_order(&self, i: usize) -> usize {
        let g = &self.elements[i];
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        let mut p = g.clone();
        let mut n = 1;
        while !linalg::frobenius_within(&p, &id, self.tol) && n <= self.order() {
            p = g * p;
            n += 1;
        }
        n
    }

    /// Checks the group axioms within tolerance.
    pub fn verify(&self) -> bool {
        let id = DMatrix::<f64>::identity(self.dim, self.dim);
        self.contains(&id)
            && self
                .elements
                .iter()
                .all(|g| orthogonality_residual(g) <= self.tol && self.contains(&g.transpose()))
            && self.cayley_table().is_some()
    }

    /// Element images under conjugation `g ↦ q·g·qᵀ`.
    pub fn conjugated(&self, q: &DMatrix<f64>) -> Self {
        let qt = q.transpose();
        FiniteOrthGroup {
            dim: self.dim,
            elements: self.elements.iter().map(|g| q * g * &qt).collect(),
            tol: self.tol,
        }
    }
}

/// `‖gᵀg − I‖_F`.
pub fn orthogonality_residual(g: &DMatrix<f64>) -> f64 {
    let n = g.nrows();
    (g.transpose() * g - DMatrix::<f64>::identity(n, n)).norm()
}

/// A torus together with a finite group normalizing its image.
#[derive(Clone, Debug)]
pub struct ExtendedAction {
    torus: TorusAction,
    finite: FiniteOrthGroup,
}

impl ExtendedAction {
    /// Checks that every finite element conjugates the torus Lie algebra into itself.
    pub fn new(torus: TorusAction, finite: FiniteOrthGroup) -> Result<Self> {
        let m = torus.ambient_dim();
        if finite.dim() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: finite.dim(),
            });
        }
        let k = torus.k();
        let gens: Vec<DMatrix<f64>> = (0..k)
            .map(|a| {
                let mut e = vec![0.0; k];
                e[a] = 1.0;
                torus.generator(&e)
            })
            .collect();
        // Columns: vectorized generators; solve least squares for the conjugate.
        let basis = DMatrix::from_fn(m * m, k, |r, a| gens[a].as_slice()[r]);
        for (index, g) in finite.elements().iter().enumerate() {
            for s in &gens {
                let conj = g * s * g.transpose();
                let target = DVector::from_column_slice(conj.as_slice());
                let residual = linalg::least_squares_residual(&basis, &target);
                if residual > 1e-8 * (1.0 + s.norm()) {
                    return Err(Error::NotNormalizing { index, residual });
                }
            }
        }
        Ok(ExtendedAction { torus, finite })
    }

    pub fn torus(&self) -> &TorusAction {
        &self.torus
    }

    pub fn finite_part(&self) -> &FiniteOrthGroup {
        &self.finite
    }
}

/// Block-diagonal rotation by `angle` in plane `i` only.
pub fn plane_rotation(m: usize, plane: usize, angle: f64) -> DMatrix<f64> {
    let mut r = DMatrix::identity(m, m);
    let (s, c) = libm::sincos(angle);
    r[(2 * plane, 2 * plane)] = c;
    r[(2 * plane, 2 * plane + 1)] = -s;
    r[(2 * plane + 1, 2 * plane)] = s;
    r[(2 * plane + 1, 2 * plane + 1)] = c;
    r
}

pub(crate) fn bigint_to_f64(x: &BigInt) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
