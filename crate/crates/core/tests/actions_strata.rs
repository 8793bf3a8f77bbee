use core::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use orbicone_core::actions::plane_rotation;
use orbicone_core::split::is_split;
use orbicone_core::strata::{
    classify_stratum, enumerate_strata, origin_stratum, quotient_distance_finite,
    quotient_distance_torus, reduction_isometry_check, singular_set_dimension,
    stratum_for_pattern, TorusDistanceOptions, DEFAULT_MAX_PLANES,
};
use orbicone_core::{FiniteOrthGroup, IntMatrix, TorusAction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_action(rng: &mut ChaCha8Rng, k_max: usize, n_max: usize, lo: i64, hi: i64) -> TorusAction {
    loop {
        let k = rng.random_range(1..=k_max);
        let n = rng.random_range(1..=n_max);
        let f = rng.random_range(0..=2);
        let rows: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..n).map(|_| rng.random_range(lo..=hi)).collect())
            .collect();
        if let Ok(a) = TorusAction::from_rows(&rows, f) {
            return a;
        }
    }
}

fn gaussian(rng: &mut ChaCha8Rng, m: usize) -> DVector<f64> {
    DVector::from_fn(m, |_, _| rng.random_range(-2.0..2.0))
}

#[test]
fn rotation_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let act = random_action(&mut rng, 3, 4, -3, 3);
        let k = act.k();
        let a: Vec<f64> = (0..k).map(|_| rng.random_range(-7.0..7.0)).collect();
        let b: Vec<f64> = (0..k).map(|_| rng.random_range(-7.0..7.0)).collect();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = act.rotation(&sum);
        let rhs = act.rotation(&a) * act.rotation(&b);
        assert!((lhs - rhs).norm() < 1e-12);
    }
}

#[test]
fn killing_field_is_the_orbit_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..30 {
        let act = random_action(&mut rng, 3, 4, -3, 3);
        let m = act.ambient_dim();
        let c: Vec<f64> = (0..act.k()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let x = gaussian(&mut rng, m);
        let errs: Vec<f64> = [1e-2, 5e-3]
            .iter()
            .map(|&h| {
                let tp: Vec<f64> = c.iter().map(|t| t * h).collect();
                let tm: Vec<f64> = c.iter().map(|t| -t * h).collect();
                let fd = (act.rotation(&tp) * &x - act.rotation(&tm) * &x) / (2.0 * h);
                (fd - act.killing_field(&c, &x)).norm()
            })
            .collect();
        // Central differences: halving the step quarters the error.
        assert!(errs[1] <= errs[0] / 3.5 + 1e-12, "{errs:?}");
        assert!(errs[1] < 1e-3);
    }
}

#[test]
fn vertical_dimension_matches_isotropy() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..40 {
        let act = random_action(&mut rng, 3, 4, -3, 3);
        let m = act.ambient_dim();
        let mut x = gaussian(&mut rng, m);
        let pattern: Vec<usize> = (0..act.n()).filter(|_| rng.random_bool(0.4)).collect();
        for &i in &pattern {
            x[2 * i] = 0.0;
            x[2 * i + 1] = 0.0;
        }
        let s = stratum_for_pattern(&act, &pattern);
        assert_eq!(act.vertical_space(&x).ncols(), act.k() - s.isotropy.dim);
        assert_eq!(s.dim_in_quotient, s.dim_in_total - (act.k() - s.isotropy.dim));
    }
}

/// gcd of all `k × k` minors of a `k × n` matrix.
fn gcd_maximal_minors(rows: &[Vec<i64>]) -> BigInt {
    let k = rows.len();
    let n = rows[0].len();
    let mut g = BigInt::zero();
    let mut cols = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cols: &mut Vec<usize>, rows: &[Vec<i64>], g: &mut BigInt) {
        if cols.len() == k {
            let sub: Vec<Vec<i64>> = rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
            *g = g.gcd(&IntMatrix::from_rows(&sub).determinant());
            return;
        }
        for c in start..n {
            cols.push(c);
            rec(c + 1, n, k, cols, rows, g);
            cols.pop();
        }
    }
    rec(0, n, k, &mut cols, rows, &mut g);
    g
}

/// Number of `t ∈ (Z/D)ᵏ` with `(t/D)·W` integral.
fn count_torsion_solutions(rows: &[Vec<i64>], d: i64) -> i64 {
    let k = rows.len();
    let n = rows[0].len();
    let total = d.pow(k as u32);
    (0..total)
        .filter(|&idx| {
            let mut rem = idx;
            let t: Vec<i64> = (0..k)
                .map(|_| {
                    let v = rem % d;
                    rem /= d;
                    v
                })
                .collect();
            (0..n).all(|j| (0..k).map(|a| t[a] * rows[a][j]).sum::<i64>() % d == 0)
        })
        .count() as i64
}

#[test]
fn isotropy_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut checked = 0;
    while checked < 60 {
        let act = random_action(&mut rng, 2, 4, -3, 3);
        let w = act.weights().to_i64_rows().unwrap();
        let k = act.k();
        let kernel_order = gcd_maximal_minors(&w);
        let d_w: i64 = kernel_order.clone().try_into().unwrap();
        assert_eq!(count_torsion_solutions(&w, d_w), d_w);
        let kernel_product: BigInt = act.kernel_factors().iter().product();
        assert_eq!(kernel_product, kernel_order);

        for s in enumerate_strata(&act, DEFAULT_MAX_PLANES).unwrap() {
            let active: Vec<usize> = (0..act.n()).filter(|i| !s.pattern.contains(i)).collect();
            let wa: Vec<Vec<i64>> = w.iter().map(|r| active.iter().map(|&j| r[j]).collect()).collect();
            let rank = if active.is_empty() { 0 } else { IntMatrix::from_rows(&wa).rank() };
            assert_eq!(s.isotropy.dim, k - rank);
            if rank == k {
                let d_a = gcd_maximal_minors(&wa);
                let d: i64 = d_a.clone().try_into().unwrap();
                assert_eq!(count_torsion_solutions(&wa, d), d);
                // Stabilizer in the effective torus = stabilizer in Tᵏ modulo the kernel.
                assert_eq!(s.isotropy.finite_order() * &kernel_order, d_a);
                checked += 1;
            } else if rank == 0 {
                assert!(s.isotropy.invariant_factors.is_empty());
            }
        }
    }
}

#[test]
fn dimension_bound_on_random_actions() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..200 {
        let act = random_action(&mut rng, 3, 5, -3, 3);
        let b = singular_set_dimension(&act, DEFAULT_MAX_PLANES).unwrap();
        assert!(b.satisfied, "W={:?} f={} {b:?}", act.weights(), act.fixed_dim());
    }
    let sharp = TorusAction::from_rows(&[[1, 0, 1], [0, 1, 1]], 0).unwrap();
    let b = singular_set_dimension(&sharp, DEFAULT_MAX_PLANES).unwrap();
    assert_eq!((b.dim, b.bound), (Some(1), 1));
}

#[test]
fn origin_verdict_matches_split_when_only_origin_is_fixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut checked = 0;
    while checked < 100 {
        let act = random_action(&mut rng, 3, 4, -3, 3);
        if act.fixed_dim() > 0 || (0..act.n()).any(|j| act.weights().column_is_zero(j)) {
            continue;
        }
        let origin = classify_stratum(&origin_stratum(&act));
        assert_eq!(origin.is_orbifold(), is_split(&act).is_split);
        checked += 1;
    }
}

#[test]
fn principal_stratum_bookkeeping() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let act = random_action(&mut rng, 3, 4, -3, 3);
        let strata = enumerate_strata(&act, DEFAULT_MAX_PLANES).unwrap();
        assert_eq!(strata.len(), 1 << act.n());
        let principal = &strata[0];
        assert!(principal.is_principal());
        // Weights with a zero active column still leave a full-rank principal stratum.
        assert_eq!(principal.isotropy.dim, 0);
        assert!(principal.isotropy.invariant_factors.is_empty());
        assert_eq!(principal.dim_in_quotient, act.ambient_dim() - act.k());
        for s in &strata {
            assert!(s.isotropy.invariant_factors.iter().all(|d| d > &BigInt::one()));
            assert_eq!(s.dim_in_total, act.ambient_dim() - 2 * s.pattern.len());
        }
    }
}

#[test]
fn finite_distance_is_a_metric_on_orbits() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mirror = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 1.0]);
    let group = FiniteOrthGroup::close(3, &[plane_rotation(3, 0, PI / 3.0), mirror], 1e-9, 100).unwrap();
    assert_eq!(group.order(), 12);
    for _ in 0..200 {
        let (x, y, z) = (gaussian(&mut rng, 3), gaussian(&mut rng, 3), gaussian(&mut rng, 3));
        let dxy = quotient_distance_finite(&group, &x, &y);
        let dyx = quotient_distance_finite(&group, &y, &x);
        assert!((dxy - dyx).abs() < 1e-12);
        let dxz = quotient_distance_finite(&group, &x, &z);
        let dzy = quotient_distance_finite(&group, &z, &y);
        assert!(dxy <= dxz + dzy + 1e-12);
        let g = group.element(rng.random_range(0..group.order()));
        assert!((quotient_distance_finite(&group, &x, &(g * &y)) - dxy).abs() < 1e-12);
    }
}

#[test]
fn torus_distance_invariance_and_circle_case() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let opts = TorusDistanceOptions::default();
    let circle = TorusAction::from_rows(&[[1]], 0).unwrap();
    for _ in 0..20 {
        let (x, y) = (gaussian(&mut rng, 2), gaussian(&mut rng, 2));
        let d = quotient_distance_torus(&circle, &x, &y, &opts).unwrap();
        assert!((d.value - (x.norm() - y.norm()).abs()).abs() < 1e-9);
    }
    for _ in 0..20 {
        let act = random_action(&mut rng, 2, 3, -3, 3);
        let m = act.ambient_dim();
        let (x, y) = (gaussian(&mut rng, m), gaussian(&mut rng, m));
        let theta: Vec<f64> = (0..act.k()).map(|_| rng.random_range(0.0..2.0 * PI)).collect();
        let gy = act.rotation(&theta) * &y;
        let d1 = quotient_distance_torus(&act, &x, &y, &opts).unwrap();
        let d2 = quotient_distance_torus(&act, &x, &gy, &opts).unwrap();
        assert!((d1.value - d2.value).abs() < 1e-6, "{} vs {}", d1.value, d2.value);
        assert!(d1.value <= (&x - &y).norm() + 1e-12);
    }
}

#[test]
fn teardrop_distance_matches_dense_reference_grid() {
    let act = TorusAction::from_rows(&[[1, 2]], 0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..5 {
        let (x, y) = (gaussian(&mut rng, 4), gaussian(&mut rng, 4));
        let d = quotient_distance_torus(&act, &x, &y, &TorusDistanceOptions::default()).unwrap();
        let dense = (0..10_000)
            .map(|j| (&x - act.rotation(&[2.0 * PI * j as f64 / 1e4]) * &y).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((d.value - dense).abs() < 1e-5, "{} vs {dense}", d.value);
    }
}

#[test]
fn reductions_are_isometric() {
    let opts = TorusDistanceOptions::default();
    for rows in [vec![vec![1i64]], vec![vec![1, 0], vec![0, 1]], vec![vec![2, 0, 0], vec![0, 3, 0]]] {
        for f in [0, 1] {
            let act = TorusAction::from_rows(&rows, f).unwrap();
            if !is_split(&act).is_split {
                continue;
            }
            let r = reduction_isometry_check(&act, 40, 12, &opts).unwrap();
            assert!(r.max_deviation < 1e-5, "{rows:?} {r:?}");
        }
    }
}
