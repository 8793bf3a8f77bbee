//! Sectional curvature of `(flat Rᵐ)/Tᵏ` on the principal stratum.
//!
//! For a Riemannian submersion from flat space the quotient curvature of a
//! horizontal plane `(v, w)` is `¾·|P_V[ṽ, w̃]|² / (|v|²|w|² − ⟨v,w⟩²)`, where
//! `ṽ(y) = (I − P_V(y))·v` are horizontal extensions and `P_V` is the
//! orthogonal projector onto the orbit tangent space. `P_V(x) = K (KᵀK)⁻¹ Kᵀ`
//! with `K(x)` the killing matrix, which is linear in `x`, so every derivative
//! here is closed form.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::actions::TorusAction;
use crate::error::{Error, Result};
use crate::linalg;
use crate::split::is_split;

/// Condition bound on the killing Gram matrix before a point counts as singular.
const GRAM_RCOND: f64 = 1e-12;

/// Default finite-difference step for [`finite_difference_oracle`].
pub const DEFAULT_FD_STEP: f64 = 1e-4;

/// `|sec·r²|` below this on every sample means the scan saw a flat quotient.
pub const FLAT_SCALED_TOL: f64 = 1e-9;

/// Projector onto the vertical space at a principal point, with its derivatives.
#[derive(Clone, Debug)]
pub struct VerticalProjector<'a> {
    action: &'a TorusAction,
    killing: DMatrix<f64>,
    gram_inv: DMatrix<f64>,
    projector: DMatrix<f64>,
}

pub fn vertical_projection_field<'a>(
    action: &'a TorusAction,
    x: &DVector<f64>,
) -> Result<VerticalProjector<'a>> {
    let killing = action.killing_matrix(x);
    let gram = killing.transpose() * &killing;
    let k = action.k();
    let gram_inv = if k == 0 {
        DMatrix::zeros(0, 0)
    } else {
        let eig = gram.clone().symmetric_eigen();
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if max <= 0.0 || min <= GRAM_RCOND * max {
            return Err(Error::SingularGram);
        }
        gram.try_inverse().ok_or(Error::SingularGram)?
    };
    let projector = &killing * &gram_inv * killing.transpose();
    Ok(VerticalProjector {
        action,
        killing,
        gram_inv,
        projector,
    })
}

impl VerticalProjector<'_> {
    pub fn projector(&self) -> &DMatrix<f64> {
        &self.projector
    }

    pub fn horizontal_projector(&self) -> DMatrix<f64> {
        let m = self.projector.nrows();
        DMatrix::identity(m, m) - &self.projector
    }

    /// Directional derivative `D_u P_V`.
    pub fn derivative(&self, u: &DVector<f64>) -> DMatrix<f64> {
        let dk = self.action.killing_matrix(u);
        let k = &self.killing;
        let gi = &self.gram_inv;
        let dgram = dk.transpose() * k + k.transpose() * &dk;
        let a = &dk * gi * k.transpose();
        let b = k * gi * &dgram * gi * k.transpose();
        &a + a.transpose() - b
    }

    /// `P_V[ṽ, w̃]` for the horizontal extensions `ṽ = (I − P_V)·v`, `w̃ = (I − P_V)·w`.
    pub fn horizontal_bracket(&self, v: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        let bracket = self.derivative(w) * v - self.derivative(v) * w;
        &self.projector * bracket
    }
}

/// Quotient sectional curvature of the horizontal plane spanned by `v`, `w` at `x`.
pub fn sec_quotient(
    action: &TorusAction,
    x: &DVector<f64>,
    v: &DVector<f64>,
    w: &DVector<f64>,
) -> Result<f64> {
    let proj = vertical_projection_field(action, x)?;
    for u in [v, w] {
        let vert = (proj.projector() * u).norm();
        if vert > 1e-8 * (1.0 + u.norm()) {
            return Err(Error::NotHorizontal(vert));
        }
    }
    let area = v.norm_squared() * w.norm_squared() - v.dot(w) * v.dot(w);
    if area <= 1e-14 * v.norm_squared() * w.norm_squared() || area <= 0.0 {
        return Err(Error::DegeneratePlane);
    }
    let vb = proj.horizontal_bracket(v, w);
    Ok(0.75 * vb.norm_squared() / area)
}

/// Which auxiliary field produced the bracket witness.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessField {
    /// `w̄ = (−x₂, 0, x₁, 0, …)`.
    XPair,
    /// `w̄_y = (0, −y₂, 0, y₁, …)`.
    YPair,
}

/// Explicit horizontal vectors with non-vanishing vertical bracket.
#[derive(Clone, Debug)]
pub struct BracketWitness {
    pub point: DVector<f64>,
    /// Plane with no decoupling circle.
    pub plane: usize,
    /// Second plane carrying a component of the projected rotation field.
    pub partner: usize,
    pub field: WitnessField,
    pub v: DVector<f64>,
    pub w: DVector<f64>,
    /// Speeds `λᵢ` of the torus field closest to the rotation of `plane`.
    pub lambda: Vec<f64>,
    /// `|P_V[v, w]|` with the killing-difference extensions.
    pub value: f64,
    /// `⟨[v, w], v̄_T⟩` for the chosen field.
    pub inner_product: f64,
    /// The same inner product from the closed-form `λ` expression.
    pub closed_form: f64,
    /// Inner products for both auxiliary fields, `[XPair, YPair]`.
    pub candidates: [f64; 2],
    /// `|P_V[ṽ, w̃]|` with horizontal-projection extensions of the same vectors.
    pub projection_extension_value: f64,
}

impl BracketWitness {
    /// `λ` of the failing plane lies strictly inside `(0, 1)`.
    pub fn lambda_in_unit_interval(&self) -> bool {
        let l = self.lambda[self.plane];
        l > 0.0 && l < 1.0
    }

    /// Quotient curvature of the witness plane.
    pub fn sectional_curvature(&self, action: &TorusAction) -> Result<f64> {
        sec_quotient(action, &self.point, &self.v, &self.w)
    }
}

/// Builds the non-split curvature witness: rotation field of a failing plane minus
/// its vertical projection, paired with a field mixing two planes.
pub fn bracket_witness(action: &TorusAction) -> Result<BracketWitness> {
    let verdict = is_split(action);
    let Some(plane) = verdict.failing_plane() else {
        return Err(Error::IsSplit);
    };
    let n = action.n();
    let m = action.ambient_dim();
    let mut best: Option<BracketWitness> = None;
    for scale in [1.0, 3.0, 0.37, 5.3] {
        let mut x = DVector::zeros(m);
        for i in 0..n {
            x[2 * i] = 1.0;
            x[2 * i + 1] = scale * libm::ldexp(1.0, -(i as i32 + 1));
        }
        let proj = match vertical_projection_field(action, &x) {
            Ok(p) => p,
            Err(_) => continue,
        };
        let rot = plane_generator(m, plane);
        let vbar = &rot * &x;
        let lambda = projected_speeds(action, &proj, &vbar);
        let mut partners: Vec<usize> = (0..n).filter(|&i| i != plane).collect();
        partners.sort_by(|&a, &b| {
            let wa = lambda[a].abs();
            let wb = lambda[b].abs();
            wb.partial_cmp(&wa).unwrap_or(core::cmp::Ordering::Equal)
        });
        for &partner in &partners {
            if lambda[partner].abs() < 1e-12 {
                continue;
            }
            let cand = witness_at(action, &proj, &x, plane, partner, &lambda);
            let better = best.as_ref().is_none_or(|b| cand.value > b.value);
            if better {
                best = Some(cand);
            }
            if best.as_ref().is_some_and(|b| b.value > 1e-9) {
                return Ok(best.unwrap());
            }
        }
    }
    best.ok_or(Error::SingularGram)
}

fn witness_at(
    action: &TorusAction,
    proj: &VerticalProjector<'_>,
    x: &DVector<f64>,
    plane: usize,
    partner: usize,
    lambda: &[f64],
) -> BracketWitness {
    let m = action.ambient_dim();
    let n = action.n();
    // v = v̄ − v̄_T as the linear field (J_plane − Σ λᵢ Jᵢ)·x.
    let mut a = plane_generator(m, plane);
    for (i, l) in lambda.iter().enumerate() {
        a -= plane_generator(m, i) * *l;
    }
    let v = &a * x;
    let vbar_t = proj.projector() * (plane_generator(m, plane) * x);

    let (p1, p2) = (plane, partner);
    let mut results = Vec::with_capacity(2);
    for field in [WitnessField::XPair, WitnessField::YPair] {
        let off = match field {
            WitnessField::XPair => 0,
            WitnessField::YPair => 1,
        };
        let mut b = DMatrix::zeros(m, m);
        b[(2 * p1 + off, 2 * p2 + off)] = -1.0;
        b[(2 * p2 + off, 2 * p1 + off)] = 1.0;
        // Subtract the maximal-torus vertical part of w̄ with constant coefficients.
        let wbar = &b * x;
        let mut c = b.clone();
        for i in 0..n {
            let r2 = x[2 * i] * x[2 * i] + x[2 * i + 1] * x[2 * i + 1];
            let ji = plane_generator(m, i);
            let mu = wbar.dot(&(&ji * x)) / r2;
            c -= ji * mu;
        }
        let w = &c * x;
        // Bracket of linear fields: [Ax, Cx] = (CA − AC)x.
        let bracket = (&c * &a - &a * &c) * x;
        let inner = bracket.dot(&vbar_t);
        let value = (proj.projector() * &bracket).norm();
        results.push((field, w, inner, value));
    }
    let (x1, y1, x2, y2) = (x[2 * p1], x[2 * p1 + 1], x[2 * p2], x[2 * p2 + 1]);
    let (l1, l2) = (lambda[p1], lambda[p2]);
    let mixed = l1 * l2 + l2 * (1.0 - l1);
    let pure = l2 * l2 + l1 * (1.0 - l1);
    let closed = [y1 * y2 * mixed + x1 * x2 * pure, x1 * x2 * mixed + y1 * y2 * pure];
    let candidates = [results[0].2, results[1].2];
    let pick = if candidates[0].abs() >= candidates[1].abs() { 0 } else { 1 };
    let (field, w, inner, value) = results.swap_remove(pick);
    let projection_extension_value = proj.horizontal_bracket(&v, &w).norm();
    BracketWitness {
        point: x.clone(),
        plane,
        partner,
        field,
        v,
        w,
        lambda: lambda.to_vec(),
        value,
        inner_product: inner,
        closed_form: closed[pick],
        candidates,
        projection_extension_value,
    }
}

/// Plane speeds `λ = c*·W` of the torus direction whose killing field at the
/// projector's base point is the vertical projection of `field`.
fn projected_speeds(
    action: &TorusAction,
    proj: &VerticalProjector<'_>,
    field: &DVector<f64>,
) -> Vec<f64> {
    let coeffs = &proj.gram_inv * (proj.killing.transpose() * field);
    let c: Vec<f64> = coeffs.iter().cloned().collect();
    if c.is_empty() {
        return vec![0.0; action.n()];
    }
    action.plane_angles(&c)
}

/// Unit-speed rotation generator of a single plane.
fn plane_generator(m: usize, plane: usize) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(m, m);
    j[(2 * plane, 2 * plane + 1)] = -1.0;
    j[(2 * plane + 1, 2 * plane)] = 1.0;
    j
}

/// One curvature evaluation along a ray.
#[derive(Clone, Debug)]
pub struct CurvatureSample {
    pub radius: f64,
    pub plane_index: usize,
    pub point: DVector<f64>,
    pub v: DVector<f64>,
    pub w: DVector<f64>,
    pub sec: f64,
}

impl CurvatureSample {
    pub fn sec_times_r2(&self) -> f64 {
        self.sec * self.radius * self.radius
    }
}

/// Samples quotient curvature at `r·direction` for each radius on the same set of
/// random horizontal planes (horizontal spaces are constant along rays).
pub fn ray_scan(
    action: &TorusAction,
    direction: &DVector<f64>,
    radii: &[f64],
    planes_per_point: usize,
    seed: u64,
) -> Result<Vec<CurvatureSample>> {
    let planes = random_horizontal_planes(action, direction, planes_per_point, seed)?;
    ray_scan_planes(action, direction, radii, &planes)
}

/// [`ray_scan`] on caller-supplied horizontal planes.
pub fn ray_scan_planes(
    action: &TorusAction,
    direction: &DVector<f64>,
    radii: &[f64],
    planes: &[(DVector<f64>, DVector<f64>)],
) -> Result<Vec<CurvatureSample>> {
    let norm = direction.norm();
    if norm == 0.0 {
        return Err(Error::SingularGram);
    }
    let unit = direction / norm;
    let mut out = Vec::with_capacity(radii.len() * planes.len());
    for &radius in radii {
        let point = &unit * radius;
        for (plane_index, (v, w)) in planes.iter().enumerate() {
            let sec = sec_quotient(action, &point, v, w)?;
            out.push(CurvatureSample {
                radius,
                plane_index,
                point: point.clone(),
                v: v.clone(),
                w: w.clone(),
                sec,
            });
        }
    }
    Ok(out)
}

/// Orthonormal horizontal pairs drawn from a seeded Gaussian.
pub fn random_horizontal_planes(
    action: &TorusAction,
    x: &DVector<f64>,
    count: usize,
    seed: u64,
) -> Result<Vec<(DVector<f64>, DVector<f64>)>> {
    let proj = vertical_projection_field(action, x)?;
    let h = proj.horizontal_projector();
    let m = action.ambient_dim();
    if m < action.k() + 2 {
        return Err(Error::DegeneratePlane);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut planes = Vec::with_capacity(count);
    while planes.len() < count {
        let a = &h * gaussian_vector(&mut rng, m);
        let b = &h * gaussian_vector(&mut rng, m);
        let Some(v) = a.try_normalize(1e-9) else { continue };
        let b = &b - &v * v.dot(&b);
        let Some(w) = b.try_normalize(1e-9) else { continue };
        planes.push((v, w));
    }
    Ok(planes)
}

pub(crate) fn gaussian_vector(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |_, _| StandardNormal.sample(rng))
}

/// Largest `|sec|` per distinct radius, in scan order.
pub fn max_abs_by_radius(samples: &[CurvatureSample]) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for s in samples {
        match out.iter_mut().find(|(r, _)| *r == s.radius) {
            Some(entry) => entry.1 = entry.1.max(s.sec.abs()),
            None => out.push((s.radius, s.sec.abs())),
        }
    }
    out
}

/// Least-squares slope of `ln max|sec|` against `ln r`; `None` when the scan is
/// flat or has fewer than two usable radii.
pub fn fit_radial_exponent(samples: &[CurvatureSample]) -> Option<f64> {
    if samples
        .iter()
        .all(|s| s.sec_times_r2().abs() < FLAT_SCALED_TOL)
    {
        return None;
    }
    let pts: Vec<(f64, f64)> = max_abs_by_radius(samples)
        .into_iter()
        .filter(|&(r, s)| r > 0.0 && s > 0.0)
        .map(|(r, s)| (libm::log(r), libm::log(s)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(sxy / sxx)
}

/// Riemann tensor of the quotient metric in affine transversal coordinates.
///
/// `riemann[((i·d + j)·d + k)·d + l] = R_{ijkl}`, with sectional curvature
/// `R(a,b,a,b) / (|a|²|b|² − ⟨a,b⟩²)`.
#[derive(Clone, Debug)]
pub struct QuotientCurvatureTensor {
    /// Orthonormal horizontal basis at the base point (columns); coordinate `i`
    /// moves along column `i`.
    pub basis: DMatrix<f64>,
    pub dim: usize,
    pub riemann: Vec<f64>,
}

impl QuotientCurvatureTensor {
    pub fn component(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let d = self.dim;
        self.riemann[((i * d + j) * d + k) * d + l]
    }

    /// Sectional curvature of the plane spanned by two horizontal ambient vectors.
    pub fn sectional(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let a = self.basis.transpose() * v;
        let b = self.basis.transpose() * w;
        let d = self.dim;
        let mut r = 0.0;
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        r += self.component(i, j, k, l) * a[i] * b[j] * a[k] * b[l];
                    }
                }
            }
        }
        let area = a.norm_squared() * b.norm_squared() - a.dot(&b) * a.dot(&b);
        r / area
    }

    /// Largest absolute component.
    pub fn max_abs(&self) -> f64 {
        self.riemann.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Quotient curvature by central differences of the induced metric on the
/// affine transversal `x + span(horizontal space at x)`, with one Richardson step.
///
/// The horizontal projector here comes from an SVD of the killing matrix, not the
/// Gram-inverse route used by [`sec_quotient`].
pub fn finite_difference_oracle(
    action: &TorusAction,
    x: &DVector<f64>,
    step: f64,
) -> Result<QuotientCurvatureTensor> {
    let k = action.k();
    let m = action.ambient_dim();
    let vertical = vertical_basis(action, x);
    if vertical.ncols() < k {
        return Err(Error::SingularGram);
    }
    let basis = linalg::null_space(&vertical.transpose(), 1e-9);
    let d = basis.ncols();
    debug_assert_eq!(d, m - k);
    let metric = |u: &DVector<f64>| -> Result<DMatrix<f64>> {
        let y = x + &basis * u;
        let q = vertical_basis(action, &y);
        if q.ncols() < k {
            return Err(Error::StepTooLarge);
        }
        let hb = &basis - &q * (q.transpose() * &basis);
        Ok(hb.transpose() * hb)
    };
    let coarse = riemann_from_metric(&metric, d, step)?;
    let fine = riemann_from_metric(&metric, d, step / 2.0)?;
    let riemann = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| (4.0 * f - c) / 3.0)
        .collect();
    Ok(QuotientCurvatureTensor {
        basis,
        dim: d,
        riemann,
    })
}

/// Orthonormal basis of the killing span with a rank cut far above rounding, so
/// stencil points that drift toward a singular stratum are reported.
fn vertical_basis(action: &TorusAction, y: &DVector<f64>) -> DMatrix<f64> {
    let km = action.killing_matrix(y);
    let scale = km.norm();
    linalg::column_space(&km, 1e-7 * scale.max(f64::MIN_POSITIVE))
}

/// Coordinate Riemann tensor of a metric field sampled through `metric(u)`,
/// from second-order central differences at `u = 0`.
pub(crate) fn riemann_from_metric<F>(metric: &F, d: usize, h: f64) -> Result<Vec<f64>>
where
    F: Fn(&DVector<f64>) -> Result<DMatrix<f64>>,
{
    let e = |i: usize| {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    };
    let zero = DVector::zeros(d);
    let g0 = metric(&zero)?;
    let mut dg = Vec::with_capacity(d);
    let mut plus = Vec::with_capacity(d);
    let mut minus = Vec::with_capacity(d);
    for c in 0..d {
        let gp = metric(&(e(c) * h))?;
        let gm = metric(&(e(c) * -h))?;
        dg.push((&gp - &gm) / (2.0 * h));
        plus.push(gp);
        minus.push(gm);
    }
    // ddg[c * d + e] = ∂_c ∂_e g
    let mut ddg = vec![DMatrix::zeros(d, d); d * d];
    for c in 0..d {
        ddg[c * d + c] = (&plus[c] - &g0 * 2.0 + &minus[c]) / (h * h);
        for f in c + 1..d {
            let pp = metric(&((e(c) + e(f)) * h))?;
            let pm = metric(&((e(c) - e(f)) * h))?;
            let mp = metric(&((e(f) - e(c)) * h))?;
            let mm = metric(&((e(c) + e(f)) * -h))?;
            let val = (pp - pm - mp + mm) / (4.0 * h * h);
            ddg[c * d + f] = val.clone();
            ddg[f * d + c] = val;
        }
    }
    let ginv = g0.clone().try_inverse().ok_or(Error::SingularGram)?;
    // Γ^p_{ab} = ½ g^{pq} (∂_a g_{qb} + ∂_b g_{qa} − ∂_q g_{ab})
    let mut gamma = vec![0.0; d * d * d];
    for p in 0..d {
        for a in 0..d {
            for b in 0..d {
                let mut s = 0.0;
                for q in 0..d {
                    s += ginv[(p, q)] * (dg[a][(q, b)] + dg[b][(q, a)] - dg[q][(a, b)]);
                }
                gamma[(p * d + a) * d + b] = 0.5 * s;
            }
        }
    }
    let gam = |p: usize, a: usize, b: usize| gamma[(p * d + a) * d + b];
    let dd = |a: usize, b: usize, r: usize, s: usize| ddg[a * d + b][(r, s)];
    let mut riemann = vec![0.0; d * d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut r = 0.5
                        * (dd(j, k, i, l) + dd(i, l, j, k) - dd(j, l, i, k) - dd(i, k, j, l));
                    for p in 0..d {
                        for q in 0..d {
                            r += g0[(p, q)]
                                * (gam(p, j, k) * gam(q, i, l) - gam(p, j, l) * gam(q, i, k));
                        }
                    }
                    riemann[((i * d + j) * d + k) * d + l] = r;
                }
            }
        }
    }
    Ok(riemann)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[f64]) -> DVector<f64> {
        DVector::from_column_slice(xs)
    }

    #[test]
    fn projector_examples() {
        let act = TorusAction::from_rows(&[[1]], 0).unwrap();
        let p = vertical_projection_field(&act, &v(&[1.0, 0.0])).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        assert!((p.projector() - expect).norm() < 1e-15);

        assert!(matches!(
            vertical_projection_field(&act, &v(&[0.0, 0.0])),
            Err(Error::SingularGram)
        ));

        let act = TorusAction::from_rows(&[[1, 2]], 0).unwrap();
        let p = vertical_projection_field(&act, &v(&[1.0, 0.0, 1.0, 0.0])).unwrap();
        let u = v(&[0.0, 1.0, 0.0, 2.0]) / 5f64.sqrt();
        assert!((p.projector() - &u * u.transpose()).norm() < 1e-14);
    }

    #[test]
    fn projector_derivative_matches_difference() {
        let act = TorusAction::from_rows(&[[1, 2, 0], [0, 1, -1]], 1).unwrap();
        let x = v(&[0.4, -0.7, 1.1, 0.2, -0.5, 0.9, 0.3]);
        let u = v(&[0.2, 0.1, -0.3, 0.5, 0.7, -0.1, 0.4]);
        let h = 1e-5;
        let pp = vertical_projection_field(&act, &(&x + &u * h)).unwrap();
        let pm = vertical_projection_field(&act, &(&x - &u * h)).unwrap();
        let fd = (pp.projector() - pm.projector()) / (2.0 * h);
        let exact = vertical_projection_field(&act, &x).unwrap().derivative(&u);
        assert!((fd - exact).norm() < 1e-8);
    }

    #[test]
    fn riemann_of_round_sphere() {
        // Stereographic chart of the unit sphere, evaluated off the origin so the
        // Christoffel terms matter.
        let base = v(&[0.3, -0.2]);
        let metric = |u: &DVector<f64>| -> Result<DMatrix<f64>> {
            let p = &base + u;
            let c = 4.0 / (1.0 + p.norm_squared()).powi(2);
            Ok(DMatrix::identity(2, 2) * c)
        };
        let r = riemann_from_metric(&metric, 2, 1e-4).unwrap();
        let g = metric(&DVector::zeros(2)).unwrap();
        let k = r[((0 * 2 + 1) * 2 + 0) * 2 + 1] / (g[(0, 0)] * g[(1, 1)]);
        assert!((k - 1.0).abs() < 1e-5, "K = {k}");
    }

    #[test]
    fn half_plane_quotient_is_flat() {
        let act = TorusAction::from_rows(&[[1]], 1).unwrap();
        let t = finite_difference_oracle(&act, &v(&[0.8, 0.3, -0.4]), DEFAULT_FD_STEP).unwrap();
        assert_eq!(t.dim, 2);
        assert!(t.max_abs() < 1e-6);
    }

    #[test]
    fn teardrop_cone_positive_and_scaling() {
        let act = TorusAction::from_rows(&[[1, 2]], 0).unwrap();
        let x = v(&[1.0, 0.0, 1.0, 0.0]);
        let planes = random_horizontal_planes(&act, &x, 3, 7).unwrap();
        for (a, b) in &planes {
            let s1 = sec_quotient(&act, &x, a, b).unwrap();
            assert!(s1 > 0.0);
            let s2 = sec_quotient(&act, &(&x * 2.0), a, b).unwrap();
            assert!((s2 * 4.0 - s1).abs() <= 1e-10 * s1);
        }
    }

    #[test]
    fn sec_errors() {
        let act = TorusAction::from_rows(&[[1, 2]], 0).unwrap();
        let x = v(&[1.0, 0.0, 1.0, 0.0]);
        let (a, _) = random_horizontal_planes(&act, &x, 1, 1).unwrap().remove(0);
        assert!(matches!(
            sec_quotient(&act, &x, &a, &(&a * 2.0)),
            Err(Error::DegeneratePlane)
        ));
        let vert = v(&[0.0, 1.0, 0.0, 2.0]);
        assert!(matches!(
            sec_quotient(&act, &x, &a, &vert),
            Err(Error::NotHorizontal(_))
        ));
    }

    #[test]
    fn witness_for_teardrop() {
        let act = TorusAction::from_rows(&[[1, 2]], 0).unwrap();
        let w = bracket_witness(&act).unwrap();
        assert_eq!(w.point.as_slice(), &[1.0, 0.5, 1.0, 0.25]);
        assert!(w.value > 0.0);
        assert!(w.lambda_in_unit_interval());
        assert!((w.inner_product - w.closed_form).abs() < 1e-12);
        assert!(w.sectional_curvature(&act).unwrap() > 0.0);
        assert!(w.v.dot(&w.w).abs() < 1e-12);

        let split = TorusAction::from_rows(&[[1, 0], [0, 1]], 0).unwrap();
        assert!(matches!(bracket_witness(&split), Err(Error::IsSplit)));
    }

    #[test]
    fn fitted_exponent_of_cone() {
        let act = TorusAction::from_rows(&[[1, 2]], 0).unwrap();
        let dir = v(&[1.0, 0.5, 1.0, 0.25]);
        let radii: Vec<f64> = (0..7).map(|i| libm::ldexp(1.0, -i)).collect();
        let samples = ray_scan(&act, &dir, &radii, 4, 11).unwrap();
        let e = fit_radial_exponent(&samples).unwrap();
        assert!((e + 2.0).abs() < 1e-9, "{e}");
    }
}
