use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use orbicone_core::actions::plane_rotation;
use orbicone_core::reflection::{
    chamber_complex, conjugacy_test, conjugation_residual, extend_chamber_map, find_reflections,
    is_normal_subgroup, reflection_subgroup, ChamberMap, Conjugacy, CONJUGACY_VERIFY_TOL,
    DEFAULT_CONJUGACY_BUDGET,
};
use orbicone_core::FiniteOrthGroup;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_orthogonal(rng: &mut ChaCha8Rng, m: usize) -> DMatrix<f64> {
    let a = DMatrix::from_fn(m, m, |_, _| rng.random_range(-1.0..1.0));
    a.qr().q()
}

fn mirror2(angle: f64) -> DMatrix<f64> {
    let (s, c) = (2.0 * angle).sin_cos();
    DMatrix::from_row_slice(2, 2, &[c, s, s, -c])
}

fn perm3(p: [usize; 3]) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |r, c| if p[r] == c { 1.0 } else { 0.0 })
}

fn diag3(d: [f64; 3]) -> DMatrix<f64> {
    DMatrix::from_diagonal(&DVector::from_column_slice(&d))
}

fn close(dim: usize, gens: &[DMatrix<f64>]) -> FiniteOrthGroup {
    FiniteOrthGroup::close(dim, gens, 1e-9, 200).unwrap()
}

/// A catalogue of finite subgroups of O(2) and O(3) with order at most 48.
fn catalogue() -> Vec<(&'static str, FiniteOrthGroup)> {
    let cyc = perm3([1, 2, 0]);
    let swap = perm3([1, 0, 2]);
    let flip = diag3([-1.0, 1.0, 1.0]);
    let minus = -DMatrix::<f64>::identity(3, 3);
    let half = diag3([-1.0, -1.0, 1.0]);
    vec![
        ("C5", close(2, &[plane_rotation(2, 0, 2.0 * PI / 5.0)])),
        ("D3", close(2, &[mirror2(0.0), mirror2(PI / 3.0)])),
        ("D4", close(2, &[mirror2(0.0), mirror2(PI / 4.0)])),
        ("D12", close(2, &[mirror2(0.0), mirror2(PI / 12.0)])),
        ("B3", close(3, &[cyc.clone(), swap.clone(), flip.clone()])),
        ("Td", close(3, &[cyc.clone(), swap.clone(), half.clone()])),
        ("O", close(3, &[cyc.clone(), &swap * &flip])),
        ("Th", close(3, &[cyc.clone(), half.clone(), minus.clone()])),
        ("D6h", close(3, &[plane_rotation(3, 0, PI / 3.0), swap.clone(), diag3([1.0, 1.0, -1.0])])),
        ("C4xZ2", close(3, &[plane_rotation(3, 0, PI / 2.0), minus])),
    ]
}

#[test]
fn catalogue_orders() {
    let orders: Vec<usize> = catalogue().iter().map(|(_, g)| g.order()).collect();
    assert_eq!(orders, [5, 6, 8, 24, 48, 24, 24, 24, 24, 8]);
}

#[test]
fn o2_partition_into_rotations_and_reflections() {
    for (name, g) in catalogue().into_iter().filter(|(_, g)| g.dim() == 2) {
        let refl = find_reflections(&g).len();
        let rot = g.elements().iter().filter(|e| e.determinant() > 0.0).count();
        assert_eq!(refl + rot, g.order(), "{name}");
    }
}

#[test]
fn chambers_are_a_torsor_and_reflections_normal() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (name, g) in catalogue() {
        let q = random_orthogonal(&mut rng, g.dim());
        let g = g.conjugated(&q);
        let c = chamber_complex(&g, 3).unwrap();
        assert_eq!(c.chamber_count, c.reflection_group.order(), "{name}");
        assert!(is_normal_subgroup(&c.reflection_group, &g), "{name}");
        assert_eq!(c.group.order() % c.reflection_group.order(), 0);
    }
    let d4 = &catalogue()[2].1;
    assert_eq!(chamber_complex(d4, 0).unwrap().chamber_count, 8);
    let b3 = &catalogue()[4].1;
    assert_eq!(chamber_complex(b3, 0).unwrap().chamber_count, 48);
    // Rotations about the coordinate axes and diagonals fix lines in the chamber.
    let rotations = &catalogue()[6].1;
    let c = chamber_complex(rotations, 0).unwrap();
    assert_eq!((c.chamber_count, c.quotient_order()), (1, 24));
    assert_eq!(c.codim2_count, 13);
}

#[test]
fn conjugators_are_recovered() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for (name, g) in catalogue() {
        let q = random_orthogonal(&mut rng, g.dim());
        let h = g.conjugated(&q);
        match conjugacy_test(&g, &h, DEFAULT_CONJUGACY_BUDGET) {
            Conjugacy::Conjugate { conjugator, pairing, residual } => {
                assert!(residual < CONJUGACY_VERIFY_TOL, "{name}");
                assert!((conjugator.transpose() * &conjugator - DMatrix::identity(g.dim(), g.dim())).norm() < 1e-10);
                let mut seen = pairing.clone();
                seen.sort_unstable();
                assert_eq!(seen, (0..g.order()).collect::<Vec<_>>());
                assert!(conjugation_residual(&conjugator, &g, &h, &pairing) < CONJUGACY_VERIFY_TOL);
            }
            other => panic!("{name}: {other:?}"),
        }
    }
}

#[test]
fn non_conjugate_pairs_are_separated() {
    let groups = catalogue();
    let find = |n: &str| groups.iter().find(|(name, _)| *name == n).unwrap().1.clone();
    // Same order and isomorphic abstract groups, different embeddings.
    for (a, b) in [("Td", "O"), ("Td", "Th"), ("O", "D6h")] {
        assert!(
            matches!(conjugacy_test(&find(a), &find(b), DEFAULT_CONJUGACY_BUDGET), Conjugacy::NotConjugate(_)),
            "{a} vs {b}"
        );
    }
}

#[test]
fn chamber_map_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let b3 = close(3, &[perm3([1, 2, 0]), perm3([1, 0, 2]), diag3([-1.0, 1.0, 1.0])]);
    let r = reflection_subgroup(&b3).unwrap();
    // Any element of the normalizer works as A; b = 0 is fixed by every mirror.
    let a = perm3([2, 0, 1]);
    let b = DVector::zeros(3);
    let ChamberMap::Valid { table } = extend_chamber_map(&a, &b, &r, &r, 1e-9).unwrap() else {
        panic!("expected a valid extension");
    };
    for _ in 0..100 {
        let i = rng.random_range(0..r.order());
        let x = DVector::from_fn(3, |_, _| rng.random_range(-3.0..3.0));
        let lhs = &a * (r.element(i) * &x) + &b;
        let rhs = r.element(table[i]) * (&a * &x + &b);
        assert!((lhs - rhs).norm() < 1e-9);
    }

    // Translation along the single mirror of a reflection in R² (plus a fixed axis).
    let refl = close(2, &[mirror2(0.0)]);
    let id = DMatrix::identity(2, 2);
    let b = DVector::from_column_slice(&[3.0, 0.0]);
    let ChamberMap::Valid { table } = extend_chamber_map(&id, &b, &refl, &refl, 1e-9).unwrap() else {
        panic!("expected a valid extension");
    };
    for _ in 0..100 {
        let i = rng.random_range(0..2);
        let x = DVector::from_fn(2, |_, _| rng.random_range(-3.0..3.0));
        let lhs = refl.element(i) * &x + &b;
        let rhs = refl.element(table[i]) * (&x + &b);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}
