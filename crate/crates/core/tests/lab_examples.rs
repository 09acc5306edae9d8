use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eigensum::lab::sampling::{
    random_column_orthogonal, random_orthogonal, random_transform, random_transform_with_condition, LOG_SPREAD,
};
use eigensum::lab::{
    conjecture_explorer, dn_check, maximizer_search, naive_functional, naive_functional_closed_form, normalized_functional,
    regular_check, robin_check, robin_normalized_check, stretch_check, torus_check, torus_normalized_sum, Domain,
    ExplorerConfig, SearchObjective,
};
use eigensum::{BoundaryCondition, Error, SquareMatrix};

const DIRICHLET: BoundaryCondition = BoundaryCondition::Dirichlet;
const NEUMANN: BoundaryCondition = BoundaryCondition::Neumann;
const CUBE: Domain = Domain::Hypercube { d: 3 };

#[test]
fn stretched_cube_example() {
    let r = dn_check(CUBE, &SquareMatrix::diagonal(&[2.0, 1.0, 1.0]), 3, DIRICHLET, None).unwrap();
    assert!((r.lhs - 9.5 * PI * PI).abs() < 1e-12);
    assert!((r.rhs - 11.25 * PI * PI).abs() < 1e-12);
    assert!(r.pass && r.margin > 0.0);
}

#[test]
fn orthogonal_transforms_give_equality() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let u3 = random_orthogonal(3, &mut rng);
    for bc in [DIRICHLET, NEUMANN] {
        let r = dn_check(CUBE, &u3, 6, bc, None).unwrap();
        assert!(r.pass && r.margin.abs() <= 1e-10 && r.equality_case == Some(true));
    }
    let u2 = random_orthogonal(2, &mut rng);
    let disk = dn_check(Domain::Ball { d: 2 }, &u2.scale(1.7), 4, DIRICHLET, None).unwrap();
    assert!(disk.pass && disk.margin.abs() <= 1e-10);
    // finite elements: two-sided check against twice the error estimate
    let tri = dn_check(Domain::RegularSimplex { d: 2 }, &u2, 3, DIRICHLET, None).unwrap();
    assert!(tri.pass && tri.discretization_error.is_some() && tri.equality_case == Some(true));
    let r = robin_check(CUBE, &u3, 4, 1.0, None).unwrap();
    assert!(r.pass && r.margin.abs() <= 1e-9);
    let t = torus_check(&u2.scale(0.6), 9).unwrap();
    assert!(t.pass && t.margin.abs() <= 1e-10);
}

#[test]
fn cube_scaling_is_equality() {
    let r = dn_check(CUBE, &SquareMatrix::identity(3).scale(2.5), 10, DIRICHLET, None).unwrap();
    assert!(r.margin.abs() <= 1e-10 && r.pass);
}

#[test]
fn stretch_examples() {
    let unit = stretch_check(CUBE, &[1.0; 3], 5, DIRICHLET, None).unwrap();
    assert!(unit.pass && unit.margin.abs() <= 1e-12);
    let base = eigensum::spectra::box_spectrum(&[1.0; 3], NEUMANN, 5).unwrap().sum(5);
    let double = stretch_check(CUBE, &[2.0; 3], 5, NEUMANN, None).unwrap();
    assert!((double.lhs - base / 4.0).abs() < 1e-12 && double.pass);
    let mixed = stretch_check(CUBE, &[1.5, 1.2, 1.1], 10, DIRICHLET, None).unwrap();
    assert!(mixed.pass && mixed.margin > 0.0);
    assert_eq!(mixed.subchecks.len(), 1);
}

#[test]
fn normalized_functional_examples() {
    let twelve = 12.0 * PI * PI;
    for t in [SquareMatrix::identity(3), SquareMatrix::diagonal(&[0.3, 2.0, 1.1])] {
        let f = normalized_functional(CUBE, &t, 1, DIRICHLET, None, false).unwrap();
        assert!((f.value - twelve).abs() <= 1e-10 * twelve);
    }
    // 39 pi^2 times V^{2/3} V^{5/3} / I = 4 for the unit cube
    let six = normalized_functional(CUBE, &SquareMatrix::identity(3), 6, DIRICHLET, None, false).unwrap();
    assert!((six.value - 156.0 * PI * PI).abs() < 1e-10);
}

#[test]
fn regular_triangle_maximizes_under_fem_policy() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let t = random_transform_with_condition(2, 2.5, &mut rng).matrix;
    let r = regular_check(Domain::RegularSimplex { d: 2 }, &t, 3, DIRICHLET, None).unwrap();
    assert!(r.pass, "{}", r.to_json());
    assert!(r.discretization_error.is_some());
}

#[test]
fn naive_functional_examples() {
    assert!((naive_functional(1.0).unwrap() - 12.0 * PI * PI).abs() < 1e-10);
    let expect = 12.0 * PI * PI * 102.0 * 0.1f64.powf(4.0 / 3.0) / 2.01;
    assert!((naive_functional(0.1).unwrap() - expect).abs() <= 1e-10 * expect);
    assert!((naive_functional_closed_form(0.1) - expect).abs() <= 1e-13 * expect);
}

#[test]
fn robin_examples() {
    let r = robin_check(CUBE, &SquareMatrix::diagonal(&[2.0, 1.0, 1.0]), 4, 1.0, None).unwrap();
    assert!(r.pass && r.margin > 0.0);
    // small sigma reproduces the Neumann comparison
    let t = SquareMatrix::diagonal(&[1.3, 0.8, 1.1]);
    let robin = robin_check(CUBE, &t, 5, 1e-9, None).unwrap();
    let neumann = dn_check(CUBE, &t, 5, NEUMANN, None).unwrap();
    assert!((robin.lhs - neumann.lhs).abs() < 1e-6 && (robin.rhs - neumann.rhs).abs() < 1e-6);
}

#[test]
fn robin_on_a_polygon_via_finite_elements() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let t = random_transform_with_condition(2, 2.5, &mut rng).matrix;
    let r = robin_check(Domain::RegularPolygon { n: 5 }, &t, 3, 1.0, None).unwrap();
    assert!(r.pass, "{}", r.to_json());
    assert!(r.discretization_error.is_some());
}

#[test]
fn robin_normalized_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for _ in 0..1000 {
        let d = 2 + rng.random_range(0..3usize);
        let t = random_transform(d, LOG_SPREAD, true, &mut rng).matrix;
        assert!(t.invert().unwrap().hs_norm() / (d as f64).sqrt() >= 1.0 - 1e-12);
    }
    let t = random_column_orthogonal(3, LOG_SPREAD, true, &mut rng).matrix;
    let r = robin_normalized_check(CUBE, &t, 3, 1.0, None).unwrap();
    assert!(r.pass && r.subchecks[0].pass);
    let u = random_orthogonal(3, &mut rng);
    let at_u = robin_normalized_check(CUBE, &u, 3, 1.0, None).unwrap();
    assert!(at_u.pass && at_u.margin.abs() <= 1e-9);
    let not_unimodular = robin_normalized_check(CUBE, &SquareMatrix::identity(3).scale(2.0), 3, 1.0, None);
    assert!(matches!(not_unimodular, Err(Error::InvalidInput(_))));
}

#[test]
fn hexagonal_torus_ties_the_square_one() {
    // with n = 5 the hexagonal lattice reaches the same normalized value 8 pi^2
    let s3 = 3f64.sqrt();
    let hex = SquareMatrix::from_columns(&[vec![1.0, 0.0], vec![0.5, s3 / 2.0]]).unwrap();
    let v = torus_normalized_sum(&hex, 5).unwrap();
    assert!((v - 8.0 * PI * PI).abs() < 1e-10);
    assert!((torus_normalized_sum(&SquareMatrix::identity(2), 5).unwrap() - 8.0 * PI * PI).abs() < 1e-12);
    let r = torus_check(&hex, 5).unwrap();
    assert!(r.pass && r.equality_case == Some(false) && r.near_equality);
}

#[test]
fn search_examples() {
    let b = maximizer_search(SearchObjective::BoxFamily { d: 2 }, 4, 3).unwrap();
    assert!(b.never_exceeds && b.reaches_reference(1e-10));
    let t = maximizer_search(SearchObjective::Torus { d: 2, n: 5 }, 6, 3).unwrap();
    assert!(t.never_exceeds && t.reaches_reference(1e-6));
    let c = maximizer_search(SearchObjective::Cube { d: 3, n: 6, bc: DIRICHLET }, 6, 3).unwrap();
    assert!(c.never_exceeds && c.reaches_reference(1e-6));
    let json: serde_json::Value = serde_json::from_str(&c.to_json()).unwrap();
    assert!(json["best_transform"].is_array());
}

#[test]
fn explorer_is_deterministic() {
    let config = ExplorerConfig { samples: 3, ns: vec![2], seed: 5, level: 3, control: false };
    let (a, sa) = conjecture_explorer(&config).unwrap();
    let (b, _) = conjecture_explorer(&config).unwrap();
    assert_eq!(a.len(), 3);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.polygon_vertices, y.polygon_vertices);
        assert_eq!(x.functional_dual.to_bits(), y.functional_dual.to_bits());
    }
    assert!(sa.all_below_disk_with_margin);
}

#[test]
fn error_paths() {
    let singular = SquareMatrix::diagonal(&[1.0, 0.0, 1.0]);
    assert!(matches!(dn_check(CUBE, &singular, 1, DIRICHLET, None), Err(Error::Singular { .. })));
    let robin = BoundaryCondition::robin(1.0).unwrap();
    assert!(matches!(dn_check(CUBE, &SquareMatrix::identity(3), 1, robin, None), Err(Error::InvalidBoundaryCondition(_))));
    assert!(dn_check(Domain::RegularPolygon { n: 2 }, &SquareMatrix::identity(2), 1, DIRICHLET, None).is_err());
    assert!(torus_check(&SquareMatrix::identity(2), 1).is_err());
    // a sheared 4-cube has no closed form and no finite-element path
    assert!(dn_check(Domain::Hypercube { d: 4 }, &SquareMatrix::identity(4), 2, DIRICHLET, None).is_ok());
    let mut four = SquareMatrix::identity(4);
    four[(0, 1)] = 0.3;
    assert!(matches!(dn_check(Domain::Hypercube { d: 4 }, &four, 2, DIRICHLET, None), Err(Error::Unsupported(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn dn_margin_is_left_orthogonal_invariant(seed in any::<u64>(), n in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_column_orthogonal(3, LOG_SPREAD, false, &mut rng).matrix;
        let u = random_orthogonal(3, &mut rng);
        for bc in [DIRICHLET, NEUMANN] {
            let a = dn_check(CUBE, &t, n, bc, None).unwrap();
            let b = dn_check(CUBE, &u.matmul(&t), n, bc, None).unwrap();
            prop_assert!((a.lhs - b.lhs).abs() <= 1e-10 && (a.rhs - b.rhs).abs() <= 1e-10);
            prop_assert!((a.margin - b.margin).abs() <= 1e-10);
        }
    }

    #[test]
    fn normalized_functional_is_scale_invariant(seed in any::<u64>(), c in 0.2f64..5.0, n in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_column_orthogonal(3, LOG_SPREAD, false, &mut rng).matrix;
        let a = normalized_functional(CUBE, &t, n, DIRICHLET, None, false).unwrap().value;
        let b = normalized_functional(CUBE, &t.scale(c), n, DIRICHLET, None, false).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-10 * a);
    }

    #[test]
    fn both_formulations_agree(seed in any::<u64>(), n in 1usize..12, neumann in any::<bool>()) {
        // lhs/rhs of the sum bound equals F(T)/F(Id) of the normalized functional
        let bc = if neumann { NEUMANN } else { DIRICHLET };
        let n = if neumann { n + 1 } else { n };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_column_orthogonal(3, LOG_SPREAD, false, &mut rng).matrix;
        let dn = dn_check(CUBE, &t, n, bc, None).unwrap();
        let reg = regular_check(CUBE, &t, n, bc, None).unwrap();
        prop_assert!((dn.lhs / dn.rhs - reg.lhs / reg.rhs).abs() <= 1e-9);
        prop_assert_eq!(dn.pass, reg.pass);
    }

    #[test]
    fn torus_sum_depends_on_lattice_not_basis(seed in any::<u64>(), n in 2usize..30, k in -3i32..=3) {
        // the eigenvalue sum is a lattice invariant; the normalizing norm is not,
        // so the normalized value changes by exactly the ratio of the norms
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = random_transform(2, LOG_SPREAD, false, &mut rng).matrix;
        let w = SquareMatrix::from_rows(&[vec![1.0, k as f64], vec![0.0, 1.0]]).unwrap();
        let tw = t.matmul(&w);
        let a = torus_normalized_sum(&t, n).unwrap() * t.inverse_transpose().unwrap().hs_norm_squared();
        let b = torus_normalized_sum(&tw, n).unwrap() * tw.inverse_transpose().unwrap().hs_norm_squared();
        prop_assert!((a - b).abs() <= 1e-10 * a);
        let u = random_orthogonal(2, &mut rng);
        let c = torus_normalized_sum(&u.matmul(&t), n).unwrap();
        prop_assert!((c - torus_normalized_sum(&t, n).unwrap()).abs() <= 1e-10 * c);
    }

    #[test]
    fn orthogonal_margins_vanish(seed in any::<u64>(), n in 1usize..10, sigma in 0.1f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_orthogonal(3, &mut rng);
        let dn = dn_check(CUBE, &u, n, DIRICHLET, None).unwrap();
        prop_assert!(dn.margin.abs() <= dn.tolerance);
        let robin = robin_check(CUBE, &u, n, sigma, None).unwrap();
        prop_assert!(robin.margin.abs() <= robin.tolerance);
        let reg = regular_check(CUBE, &u, n, DIRICHLET, None).unwrap();
        prop_assert!(reg.margin.abs() <= reg.tolerance);
        let torus = torus_check(&u, n + 1).unwrap();
        prop_assert!(torus.margin.abs() <= torus.tolerance);
    }
}
