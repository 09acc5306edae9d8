use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use eigensum::fem::{eigen_sum, level_sequence, mesh_domain, mesh_eigenvalues};
use eigensum::lab::sampling::random_orthogonal;
use eigensum::spectra::{box_spectrum, lame_triangle_spectrum};
use eigensum::{BoundaryCondition, Polytope};

const DIRICHLET: BoundaryCondition = BoundaryCondition::Dirichlet;
const NEUMANN: BoundaryCondition = BoundaryCondition::Neumann;

fn above(fem: &[f64], exact: &[f64]) -> bool {
    fem.iter().zip(exact).all(|(f, e)| *f >= e - 1e-10 * e.abs().max(1.0))
}

#[test]
fn upper_bounds_at_every_level() {
    let n = 6;
    let cases: Vec<(Polytope, BoundaryCondition, Vec<f64>, std::ops::RangeInclusive<usize>)> = vec![
        (Polytope::unit_cube(2).unwrap(), DIRICHLET, box_spectrum(&[1.0, 1.0], DIRICHLET, n).unwrap().values().to_vec(), 2..=5),
        (Polytope::unit_cube(2).unwrap(), NEUMANN, box_spectrum(&[1.0, 1.0], NEUMANN, n).unwrap().values().to_vec(), 2..=5),
        (
            Polytope::centered_box(&[2.0, 0.7]).unwrap(),
            DIRICHLET,
            box_spectrum(&[2.0, 0.7], DIRICHLET, n).unwrap().values().to_vec(),
            2..=5,
        ),
        (
            Polytope::regular_simplex(2).unwrap(),
            DIRICHLET,
            lame_triangle_spectrum(1.0, DIRICHLET, n).unwrap().values().to_vec(),
            3..=6,
        ),
        (
            Polytope::regular_simplex(2).unwrap(),
            NEUMANN,
            lame_triangle_spectrum(1.0, NEUMANN, n).unwrap().values().to_vec(),
            3..=6,
        ),
        (Polytope::unit_cube(3).unwrap(), DIRICHLET, box_spectrum(&[1.0; 3], DIRICHLET, n).unwrap().values().to_vec(), 1..=3),
    ];
    for (body, bc, exact, levels) in cases {
        let seq = level_sequence(&body, bc, n, *levels.start(), *levels.end()).unwrap();
        for (level, s) in seq.levels.iter().zip(&seq.spectra) {
            assert!(above(s.values(), &exact), "level {level} {bc}: {:?} vs {exact:?}", s.values());
        }
        // monotone refinement per index
        for k in 0..n {
            let v = seq.value_at(k);
            assert!(v.windows(2).all(|w| w[1] <= w[0] + 1e-10 * w[0].abs().max(1.0)), "{bc} index {k}: {v:?}");
        }
    }
}

#[test]
fn richardson_improves_the_square() {
    let seq = level_sequence(&Polytope::unit_cube(2).unwrap(), DIRICHLET, 4, 3, 5).unwrap();
    let exact = box_spectrum(&[1.0, 1.0], DIRICHLET, 4).unwrap().sum(4);
    let est = seq.sum_estimate(4).unwrap();
    let raw = seq.finest().sum(4);
    assert!((est.extrapolated - exact).abs() < 0.1 * (raw - exact));
    assert!((est.extrapolated - exact).abs() < 10.0 * est.error_estimate.max(1e-12));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn orthogonal_images_have_the_same_spectrum(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_orthogonal(2, &mut rng);
        let tri = Polytope::regular_simplex(2).unwrap();
        let a = eigen_sum(&tri, DIRICHLET, 5, 4).unwrap();
        let b = eigen_sum(&tri.map(&u).unwrap(), DIRICHLET, 5, 4).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-9 * x);
        }
    }

    #[test]
    fn orthogonal_images_in_three_dimensions(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_orthogonal(3, &mut rng);
        let tet = Polytope::regular_simplex(3).unwrap();
        let a = eigen_sum(&tet, NEUMANN, 4, 3).unwrap();
        let b = eigen_sum(&tet.map(&u).unwrap(), NEUMANN, 4, 3).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }
}

#[test]
fn robin_sits_between_neumann_and_dirichlet() {
    let body = Polytope::regular_simplex(2).unwrap();
    let mesh = mesh_domain(&body, 4).unwrap();
    let n = 5;
    let neu = mesh_eigenvalues(&mesh, NEUMANN, n).unwrap();
    let dir = mesh_eigenvalues(&mesh, DIRICHLET, n).unwrap();
    let tiny = mesh_eigenvalues(&mesh, BoundaryCondition::robin(1e-8).unwrap(), n).unwrap();
    for (a, b) in tiny.values().iter().zip(neu.values()) {
        assert!((a - b).abs() <= 1e-6 * b.max(1.0), "{a} vs {b}");
    }
    let mut prev = tiny.values().to_vec();
    for sigma in [0.5, 5.0, 50.0, 5e3] {
        let r = mesh_eigenvalues(&mesh, BoundaryCondition::robin(sigma).unwrap(), n).unwrap();
        for k in 0..n {
            assert!(r.values()[k] >= prev[k] - 1e-9 * prev[k].max(1.0), "sigma {sigma} index {k}");
            // the discrete Dirichlet space is a subspace of the Robin one
            assert!(r.values()[k] <= dir.values()[k] * (1.0 + 1e-9), "sigma {sigma} index {k}");
        }
        prev = r.values().to_vec();
    }
    let big = prev;
    assert!((big[0] - dir.values()[0]) / dir.values()[0] > -0.01);
}

#[test]
fn robin_rectangle_matches_tensor_spectrum() {
    let sides = [1.5, 1.0];
    let bc = BoundaryCondition::robin(2.0).unwrap();
    let exact = box_spectrum(&sides, bc, 4).unwrap();
    let seq = level_sequence(&Polytope::centered_box(&sides).unwrap(), bc, 4, 3, 5).unwrap();
    assert!(above(seq.finest().values(), exact.values()));
    let est = seq.sum_estimate(4).unwrap();
    assert!((est.extrapolated - exact.sum(4)).abs() <= 1e-3 * exact.sum(4));
}

#[test]
fn budget_is_enforced() {
    let cube = Polytope::unit_cube(3).unwrap();
    assert!(matches!(mesh_domain(&cube, 9), Err(eigensum::Error::BudgetExceeded(_))));
    let too_many = eigen_sum(&cube, DIRICHLET, 10_000, 0);
    assert!(too_many.is_err());
}
