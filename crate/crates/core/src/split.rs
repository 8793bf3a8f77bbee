//! Split detection.
//!
//! A torus action is split when every rotated coordinate plane `i` admits a
//! circle `c ∈ Zᵏ` whose weights `c·W` vanish on every other plane. Such a
//! circle exists iff the lattice `{c : c·W_j = 0 for j ≠ i}` is not annihilated
//! by column `i`, so the test is exact integer arithmetic.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::actions::TorusAction;
use crate::error::{Error, Result};
use crate::lattice::{make_primitive, rational_kernel, IntMatrix};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlaneCertificate {
    /// Column is zero: the plane is fixed by the whole torus.
    FixedPlane,
    /// Primitive `c` with `(c·W)_j = 0` for `j ≠ i` and `(c·W)_i ≠ 0`.
    Circle(Vec<BigInt>),
    NoCircle,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitVerdict {
    pub is_split: bool,
    pub per_plane: Vec<PlaneCertificate>,
}

impl SplitVerdict {
    /// First plane without a decoupling circle.
    pub fn failing_plane(&self) -> Option<usize> {
        self.per_plane
            .iter()
            .position(|c| *c == PlaneCertificate::NoCircle)
    }
}

/// Finds a circle rotating only plane `i`.
pub fn circle_for_plane(w: &IntMatrix, i: usize) -> Result<PlaneCertificate> {
    if w.column_is_zero(i) {
        return Err(Error::FixedColumn(i));
    }
    let others = w.remove_column(i);
    let lattice = rational_kernel(&others);
    let column = w.column(i);
    let values: Vec<BigInt> = (0..lattice.rows())
        .map(|r| dot(lattice.row(r), &column))
        .collect();
    if values.iter().all(Zero::is_zero) {
        return Ok(PlaneCertificate::NoCircle);
    }
    // Combine basis vectors so that c·column equals the gcd of the values.
    let mut coeffs: Vec<BigInt> = values.iter().map(|_| BigInt::zero()).collect();
    let mut g = BigInt::zero();
    for (j, t) in values.iter().enumerate() {
        if t.is_zero() {
            continue;
        }
        if g.is_zero() {
            g = t.clone();
            coeffs[j] = BigInt::from(1);
            continue;
        }
        let e = g.extended_gcd(t);
        for c in coeffs.iter_mut() {
            *c *= &e.x;
        }
        coeffs[j] = e.y;
        g = e.gcd;
    }
    let k = w.rows();
    let mut c: Vec<BigInt> = (0..k).map(|_| BigInt::zero()).collect();
    for (r, a) in coeffs.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (ci, b) in c.iter_mut().zip(lattice.row(r)) {
            *ci += a * b;
        }
    }
    Ok(PlaneCertificate::Circle(make_primitive(&c)))
}

/// Split verdict for an arbitrary integer weight matrix.
pub fn split_verdict(w: &IntMatrix) -> SplitVerdict {
    let per_plane: Vec<PlaneCertificate> = (0..w.cols())
        .map(|i| circle_for_plane(w, i).unwrap_or(PlaneCertificate::FixedPlane))
        .collect();
    let is_split = !per_plane.contains(&PlaneCertificate::NoCircle);
    SplitVerdict {
        is_split,
        per_plane,
    }
}

pub fn is_split(action: &TorusAction) -> SplitVerdict {
    split_verdict(action.weights())
}

/// Re-checks a certificate with integer arithmetic.
pub fn certificate_holds(w: &IntMatrix, i: usize, c: &[BigInt]) -> bool {
    let weights = w.left_apply(c);
    weights
        .iter()
        .enumerate()
        .all(|(j, x)| (j == i) != x.is_zero())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CanonicalSplit {
    /// Rows of `transform` are the circle certificates of the rotated planes
    /// (in plane order); `transform · W` has one nonzero entry per rotated plane,
    /// each in its own row. `|det transform|` is the index of the product of
    /// these circles in the torus.
    Split {
        transform: IntMatrix,
        decoupled: IntMatrix,
        planes: Vec<usize>,
    },
    NonSplit { plane: usize },
}

pub fn canonical_split_form(w: &IntMatrix) -> CanonicalSplit {
    let verdict = split_verdict(w);
    let mut rows = Vec::new();
    let mut planes = Vec::new();
    for (i, cert) in verdict.per_plane.iter().enumerate() {
        match cert {
            PlaneCertificate::FixedPlane => {}
            PlaneCertificate::Circle(c) => {
                rows.push(c.clone());
                planes.push(i);
            }
            PlaneCertificate::NoCircle => return CanonicalSplit::NonSplit { plane: i },
        }
    }
    let transform = IntMatrix::from_row_vectors(w.rows(), &rows);
    let decoupled = transform.mul(w);
    CanonicalSplit::Split {
        transform,
        decoupled,
        planes,
    }
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
