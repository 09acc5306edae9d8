use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use eigensum::fem::{eigen_sum, mesh_domain};
use eigensum::lab::{dn_check, hsnorm_check, torus_normalized_sum, Domain};
use eigensum::spectra::{ball_spectrum, box_spectrum, torus_spectrum, Lattice};
use eigensum::symmetry::hypercube_group;
use eigensum::{BoundaryCondition, RectMatrix, SquareMatrix};
use eigensum_bench::{planar_transform, sheared_pentagon, sheared_tetrahedron, spatial_transform};

fn exact_spectra(c: &mut Criterion) {
    c.bench_function("box_spectrum_3d_n200", |b| {
        b.iter(|| box_spectrum(black_box(&[1.0, 1.3, 0.7]), BoundaryCondition::Dirichlet, 200).unwrap())
    });
    c.bench_function("box_spectrum_robin_3d_n50", |b| {
        b.iter(|| box_spectrum(black_box(&[1.0, 1.3, 0.7]), BoundaryCondition::Robin { sigma: 2.0 }, 50).unwrap())
    });
    c.bench_function("ball_spectrum_3d_neumann_n30", |b| {
        b.iter(|| ball_spectrum(black_box(1.0), 3, BoundaryCondition::Neumann, 30).unwrap())
    });
    let lat = Lattice::new(spatial_transform()).unwrap();
    c.bench_function("torus_spectrum_3d_n100", |b| b.iter(|| torus_spectrum(black_box(&lat), 100).unwrap()));
    c.bench_function("torus_normalized_sum_2d_n5", |b| {
        b.iter(|| torus_normalized_sum(black_box(&planar_transform()), 5).unwrap())
    });
}

fn finite_elements(c: &mut Criterion) {
    let pent = sheared_pentagon();
    let tet = sheared_tetrahedron();
    let mut g = c.benchmark_group("fem");
    g.sample_size(10);
    g.bench_function("mesh_pentagon_level5", |b| b.iter(|| mesh_domain(black_box(&pent), 5).unwrap()));
    g.bench_function("pentagon_dirichlet_n5_level4", |b| {
        b.iter(|| eigen_sum(black_box(&pent), BoundaryCondition::Dirichlet, 5, 4).unwrap())
    });
    g.bench_function("tetrahedron_neumann_n4_level2", |b| {
        b.iter(|| eigen_sum(black_box(&tet), BoundaryCondition::Neumann, 4, 2).unwrap())
    });
    g.finish();
}

fn lab(c: &mut Criterion) {
    let cube = Domain::Hypercube { d: 3 };
    let t = SquareMatrix::diagonal(&[1.7, 0.8, 1.1]);
    c.bench_function("dn_check_cube_n10", |b| {
        b.iter(|| dn_check(cube, black_box(&t), 10, BoundaryCondition::Dirichlet, None).unwrap())
    });
    c.bench_function("hsnorm_check_cube", |b| b.iter(|| hsnorm_check(cube, black_box(&spatial_transform())).unwrap()));
    let g = hypercube_group(4).unwrap();
    let y = RectMatrix::from_row_major(4, 3, (0..12).map(|k| (k as f64 * 0.37).sin()).collect()).unwrap();
    let z = [0.3, -1.2, 0.5, 0.9];
    c.bench_function("frame_average_hypercube4", |b| b.iter(|| g.frame_average(black_box(&z), black_box(&y))));
}

criterion_group!(benches, exact_spectra, finite_elements, lab);
criterion_main!(benches);
