//! Reflections, chambers and conjugacy for finite orthogonal groups.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::actions::{orthogonality_residual, ExtendedAction, FiniteOrthGroup};
use crate::curvature::gaussian_vector;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_within, null_space, polar_orthogonal};
use crate::strata::{classify_stratum, origin_stratum, StratumClass};

/// Eigenvalue tolerance for the reflection test.
pub const REFLECTION_EIG_TOL: f64 = 1e-8;
/// Minimum distance of a chamber representative from every mirror.
pub const CHAMBER_MARGIN: f64 = 1e-6;
/// Default number of candidate generator images tried by [`conjugacy_test`].
pub const DEFAULT_CONJUGACY_BUDGET: usize = 1_000_000;
/// Residual accepted when verifying a conjugator.
pub const CONJUGACY_VERIFY_TOL: f64 = 1e-8;

const GENERIC_RETRIES: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct Reflection {
    /// Index of the element in its group.
    pub index: usize,
    /// Unit normal, first significant entry positive.
    pub normal: DVector<f64>,
}

/// Unit normal of `g` when `g` is a reflection.
pub fn reflection_normal(g: &DMatrix<f64>, tol: f64) -> Option<DVector<f64>> {
    let m = g.nrows();
    if m == 0 {
        return None;
    }
    let sym = (g + g.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut minus = None;
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if (l + 1.0).abs() <= tol {
            if minus.is_some() {
                return None;
            }
            minus = Some(i);
        } else if (l - 1.0).abs() > tol {
            return None;
        }
    }
    let i = minus?;
    let mut n: DVector<f64> = eig.eigenvectors.column(i).into_owned();
    n /= n.norm();
    if let Some(&lead) = n.iter().find(|x| x.abs() > 1e-9) {
        if lead < 0.0 {
            n = -n;
        }
    }
    Some(n)
}

pub fn find_reflections(group: &FiniteOrthGroup) -> Vec<Reflection> {
    group
        .elements()
        .iter()
        .enumerate()
        .filter_map(|(index, g)| {
            reflection_normal(g, REFLECTION_EIG_TOL).map(|normal| Reflection { index, normal })
        })
        .collect()
}

/// Subgroup generated by the reflections of `group`.
pub fn reflection_subgroup(group: &FiniteOrthGroup) -> Result<FiniteOrthGroup> {
    let gens: Vec<DMatrix<f64>> = find_reflections(group)
        .iter()
        .map(|r| group.element(r.index).clone())
        .collect();
    FiniteOrthGroup::close(group.dim(), &gens, group.tol(), group.order())
}

/// `g·H·g⁻¹ ⊆ H` for every `g` in `group`.
pub fn is_normal_subgroup(sub: &FiniteOrthGroup, group: &FiniteOrthGroup) -> bool {
    group.elements().iter().all(|g| {
        let gt = g.transpose();
        sub.elements().iter().all(|h| sub.contains(&(g * h * &gt)))
    })
}

#[derive(Clone, Debug)]
pub struct ChamberComplex {
    pub group: FiniteOrthGroup,
    pub reflections: Vec<Reflection>,
    pub reflection_group: FiniteOrthGroup,
    pub mirror_normals: Vec<DVector<f64>>,
    /// Interior point of the base chamber, at least [`CHAMBER_MARGIN`] from every mirror.
    pub chamber_rep: DVector<f64>,
    pub chamber_count: usize,
    /// Distinct codimension-2 fixed subspaces of elements stabilizing the base chamber.
    pub codim2_count: usize,
}

impl ChamberComplex {
    /// `|G / R|`, the group acting on the base chamber.
    pub fn quotient_order(&self) -> usize {
        self.group.order() / self.reflection_group.order()
    }

    /// Sign pattern of `x` against the mirrors.
    pub fn chamber_signature(&self, x: &DVector<f64>) -> Vec<bool> {
        self.mirror_normals.iter().map(|n| n.dot(x) > 0.0).collect()
    }
}

pub fn chamber_complex(group: &FiniteOrthGroup, seed: u64) -> Result<ChamberComplex> {
    let m = group.dim();
    let reflections = find_reflections(group);
    let reflection_group = reflection_subgroup(group)?;
    if !is_normal_subgroup(&reflection_group, group) {
        return Err(Error::NotNormal);
    }
    let mirror_normals: Vec<DVector<f64>> = reflections.iter().map(|r| r.normal.clone()).collect();

    // Generic means: off every mirror and off every proper fixed subspace.
    let fixed_spaces: Vec<DMatrix<f64>> = group
        .elements()
        .iter()
        .skip(1)
        .map(|g| null_space(&(g - DMatrix::identity(m, m)), 1e-12))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chamber_rep = None;
    if m > 0 {
        for _ in 0..GENERIC_RETRIES {
            let mut p = gaussian_vector(&mut rng, m);
            p /= p.norm();
            let off_mirrors = mirror_normals.iter().all(|n| n.dot(&p).abs() > CHAMBER_MARGIN);
            let off_fixed = fixed_spaces.iter().all(|f| {
                let q = if f.ncols() == 0 { p.clone() } else { &p - f * (f.transpose() * &p) };
                q.norm() > CHAMBER_MARGIN
            });
            if off_mirrors && off_fixed {
                chamber_rep = Some(p);
                break;
            }
        }
    } else {
        chamber_rep = Some(DVector::zeros(0));
    }
    let chamber_rep = chamber_rep.ok_or(Error::DegenerateArrangement)?;

    let signature = |x: &DVector<f64>| -> Vec<bool> { mirror_normals.iter().map(|n| n.dot(x) > 0.0).collect() };
    let chambers: BTreeSet<Vec<bool>> = reflection_group
        .elements()
        .iter()
        .map(|r| signature(&(r * &chamber_rep)))
        .collect();

    let base = signature(&chamber_rep);
    let mut planes: Vec<DMatrix<f64>> = Vec::new();
    for (g, fix) in group.elements().iter().zip(core::iter::once(None).chain(fixed_spaces.iter().map(Some))) {
        let Some(fix) = fix else { continue };
        if m < 2 || fix.ncols() != m - 2 || signature(&(g * &chamber_rep)) != base {
            continue;
        }
        let proj = fix * fix.transpose();
        if !planes.iter().any(|p| frobenius_within(p, &proj, 1e-7)) {
            planes.push(proj);
        }
    }

    Ok(ChamberComplex {
        group: group.clone(),
        reflections,
        reflection_group,
        mirror_normals,
        chamber_rep,
        chamber_count: chambers.len(),
        codim2_count: planes.len(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChamberMapFailure {
    /// `A·r·A⁻¹ ∉ R₂` for the reflection of `R₁` at this index.
    WallMismatch { reflection: usize },
    /// The reflection of `R₂` at this index moves `b`.
    BNotFixed { reflection: usize },
    NotIsomorphism,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChamberMap {
    /// `table[i]` is the index in `R₂` of `A·R₁[i]·A⁻¹`.
    Valid { table: Vec<usize> },
    Invalid(ChamberMapFailure),
}

/// Checks that `x ↦ A·x + b` extends equivariantly from `R₁` to `R₂`.
pub fn extend_chamber_map(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    r1: &FiniteOrthGroup,
    r2: &FiniteOrthGroup,
    tol: f64,
) -> Result<ChamberMap> {
    let m = r1.dim();
    for got in [r2.dim(), a.nrows(), a.ncols(), b.len()] {
        if got != m {
            return Err(Error::DimensionMismatch { expected: m, got });
        }
    }
    let residual = orthogonality_residual(a);
    if residual > tol {
        return Err(Error::NotOrthogonal { index: 0, residual });
    }
    let at = a.transpose();
    for r in find_reflections(r1) {
        if !r2.contains(&(a * r1.element(r.index) * &at)) {
            return Ok(ChamberMap::Invalid(ChamberMapFailure::WallMismatch {
                reflection: r.index,
            }));
        }
    }
    for r in find_reflections(r2) {
        if (r2.element(r.index) * b - b).norm() > tol {
            return Ok(ChamberMap::Invalid(ChamberMapFailure::BNotFixed {
                reflection: r.index,
            }));
        }
    }
    let table: Option<Vec<usize>> = r1
        .elements()
        .iter()
        .map(|g| r2.index_of(&(a * g * &at)))
        .collect();
    match table {
        Some(t) if r1.order() == r2.order() && is_permutation(&t) => Ok(ChamberMap::Valid { table: t }),
        _ => Ok(ChamberMap::Invalid(ChamberMapFailure::NotIsomorphism)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NonConjugacyReason {
    Dimension,
    Order,
    /// Multisets of (element order, power traces) differ.
    ClassInvariants,
    /// Every isomorphism was tried and none preserves the character.
    NoCharacterIsomorphism,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Conjugacy {
    /// `conjugator · G₁[i] · conjugatorᵀ ≈ G₂[pairing[i]]`.
    Conjugate {
        conjugator: DMatrix<f64>,
        pairing: Vec<usize>,
        residual: f64,
    },
    NotConjugate(NonConjugacyReason),
    Inconclusive { explored: usize },
}

/// Searches for an orthogonal `A` with `A·G₁·A⁻¹ = G₂`.
///
/// Candidate isomorphisms are enumerated by the images of a generating set,
/// restricted to elements with matching class invariants; each candidate that
/// preserves traces is realized by averaging an intertwiner and taking its
/// orthogonal polar factor.
pub fn conjugacy_test(g1: &FiniteOrthGroup, g2: &FiniteOrthGroup, budget: usize) -> Conjugacy {
    if g1.dim() != g2.dim() {
        return Conjugacy::NotConjugate(NonConjugacyReason::Dimension);
    }
    if g1.order() != g2.order() {
        return Conjugacy::NotConjugate(NonConjugacyReason::Order);
    }
    let keys1 = class_keys(g1);
    let keys2 = class_keys(g2);
    let mut s1 = keys1.clone();
    let mut s2 = keys2.clone();
    s1.sort();
    s2.sort();
    if s1 != s2 {
        return Conjugacy::NotConjugate(NonConjugacyReason::ClassInvariants);
    }
    let (Some(t1), Some(t2)) = (g1.cayley_table(), g2.cayley_table()) else {
        return Conjugacy::Inconclusive { explored: 0 };
    };

    let gens = generating_set(g1, &t1, &keys1);
    let candidates: Vec<Vec<usize>> = gens
        .iter()
        .map(|&s| (0..g2.order()).filter(|&h| keys2[h] == keys1[s]).collect())
        .collect();
    let traces1: Vec<f64> = g1.elements().iter().map(|g| g.trace()).collect();
    let traces2: Vec<f64> = g2.elements().iter().map(|g| g.trace()).collect();

    let mut odometer = vec![0usize; gens.len()];
    let mut explored = 0;
    loop {
        if explored == budget {
            return Conjugacy::Inconclusive { explored };
        }
        explored += 1;
        let images: Vec<usize> = odometer.iter().zip(&candidates).map(|(&j, c)| c[j]).collect();
        if let Some(pairing) = extend_homomorphism(&gens, &images, &t1, &t2) {
            let characters_agree = pairing
                .iter()
                .enumerate()
                .all(|(i, &j)| (traces1[i] - traces2[j]).abs() <= 1e-6);
            if characters_agree {
                if let Some((conjugator, residual)) = realize(g1, g2, &pairing) {
                    return Conjugacy::Conjugate {
                        conjugator,
                        pairing,
                        residual,
                    };
                }
            }
        }
        // Advance the lexicographic odometer (last position fastest).
        let mut pos = gens.len();
        loop {
            if pos == 0 {
                return Conjugacy::NotConjugate(NonConjugacyReason::NoCharacterIsomorphism);
            }
            pos -= 1;
            odometer[pos] += 1;
            if odometer[pos] < candidates[pos].len() {
                break;
            }
            odometer[pos] = 0;
        }
    }
}

/// `max_g ‖A·g·Aᵀ − pairing(g)‖_F`.
pub fn conjugation_residual(a: &DMatrix<f64>, g1: &FiniteOrthGroup, g2: &FiniteOrthGroup, pairing: &[usize]) -> f64 {
    let at = a.transpose();
    g1.elements()
        .iter()
        .zip(pairing)
        .map(|(g, &j)| (a * g * &at - g2.element(j)).norm())
        .fold(0.0, f64::max)
}

/// Orbifold verdict of the origin for a torus extended by a finite group; the
/// finite part neither creates nor removes non-orbifold points.
pub fn finite_extension_classify(extended: &ExtendedAction) -> StratumClass {
    classify_stratum(&origin_stratum(extended.torus()))
}

/// Element order plus quantized traces of its powers.
fn class_keys(g: &FiniteOrthGroup) -> Vec<(usize, Vec<i64>)> {
    (0..g.order())
        .map(|i| {
            let order = g.element_order(i);
            let e = g.element(i);
            let mut p = e.clone();
            let mut traces = Vec::with_capacity(order);
            for _ in 0..order {
                traces.push(libm::round(p.trace() * 1e6) as i64);
                p = e * p;
            }
            (order, traces)
        })
        .collect()
}

/// Greedy generators, largest element order first.
fn generating_set(g: &FiniteOrthGroup, table: &[Vec<usize>], keys: &[(usize, Vec<i64>)]) -> Vec<usize> {
    let n = g.order();
    let mut by_order: Vec<usize> = (1..n).collect();
    by_order.sort_by(|&a, &b| keys[b].0.cmp(&keys[a].0).then(a.cmp(&b)));
    let mut gens = Vec::new();
    let mut member = vec![false; n];
    member[0] = true;
    for s in by_order {
        if member[s] {
            continue;
        }
        gens.push(s);
        // Recompute the generated subgroup by left multiplication.
        let mut stack: Vec<usize> = (0..n).filter(|&i| member[i]).collect();
        while let Some(h) = stack.pop() {
            for &t in &gens {
                let p = table[t][h];
                if !member[p] {
                    member[p] = true;
                    stack.push(p);
                }
            }
        }
        if member.iter().all(|&x| x) {
            break;
        }
    }
    gens
}

/// Extends generator images to a bijective homomorphism, if consistent.
fn extend_homomorphism(gens: &[usize], images: &[usize], t1: &[Vec<usize>], t2: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = t1.len();
    let mut phi = vec![usize::MAX; n];
    phi[0] = 0;
    let mut queue = vec![0usize];
    let mut head = 0;
    while head < queue.len() {
        let h = queue[head];
        head += 1;
        for (&s, &img) in gens.iter().zip(images) {
            let p = t1[s][h];
            let q = t2[img][phi[h]];
            if phi[p] == usize::MAX {
                phi[p] = q;
                queue.push(p);
            } else if phi[p] != q {
                return None;
            }
        }
    }
    if queue.len() != n || !is_permutation(&phi) {
        return None;
    }
    Some(phi)
}

fn realize(g1: &FiniteOrthGroup, g2: &FiniteOrthGroup, pairing: &[usize]) -> Option<(DMatrix<f64>, f64)> {
    let m = g1.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for attempt in 0..8 {
        let x = if attempt == 0 {
            DMatrix::identity(m, m)
        } else {
            DMatrix::from_fn(m, m, |_, _| gaussian_vector(&mut rng, 1)[0])
        };
        let mut t = DMatrix::zeros(m, m);
        for (g, &j) in g1.elements().iter().zip(pairing) {
            t += g2.element(j) * &x * g.transpose();
        }
        t /= g1.order() as f64;
        let (q, smin) = polar_orthogonal(&t);
        if smin <= 1e-6 * (1.0 + t.norm()) {
            continue;
        }
        let residual = conjugation_residual(&q, g1, g2, pairing);
        if residual < CONJUGACY_VERIFY_TOL {
            return Some((q, residual));
        }
    }
    None
}

fn is_permutation(t: &[usize]) -> bool {
    let mut seen = vec![false; t.len()];
    for &j in t {
        if j >= t.len() || seen[j] {
            return false;
        }
        seen[j] = true;
    }
    true
}
