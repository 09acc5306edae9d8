use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assemble::{assemble, AssembledSystem};
use super::mesh::{mesh_domain, SimplicialMesh};
use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::linalg::sparse::{CsrMatrix, SkylineCholesky};
use crate::linalg::SquareMatrix;
use crate::spectra::{check_count, BoundaryCondition, Provenance, Spectrum};

/// Systems up to this many unknowns are solved densely.
pub const DENSE_LIMIT: usize = 200;
const MAX_ITERATIONS: usize = 1000;
const RITZ_TOL: f64 = 1e-13;
const START_SEED: u64 = 0x5eed_f00d;

fn dense(a: &CsrMatrix) -> SquareMatrix {
    let n = a.n();
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        for (j, v) in a.row(i) {
            m[(i, j)] = v;
        }
    }
    m
}

/// Smallest `n` eigenvalues of `K x = lambda M x`.
///
/// Small systems use the dense Jacobi path. Larger ones use block inverse
/// iteration with the shifted matrix `K - shift M` factored once, and a
/// Rayleigh-Ritz step on the original pencil after every block solve.
pub fn lowest_eigenvalues(k: &CsrMatrix, m: &CsrMatrix, n: usize, shift: f64) -> Result<Vec<f64>> {
    let size = k.n();
    if n > size {
        return Err(Error::InsufficientUnknowns {
            requested: n,
            available: size,
        });
    }
    let block = n + n.max(8);
    if size <= DENSE_LIMIT || block >= size {
        let eig = dense(k).sym_eigen_generalized(&dense(m))?;
        return Ok(eig.eigenvalues[..n].to_vec());
    }
    let a = k.add_scaled(-shift, m);
    let chol = SkylineCholesky::factor(&a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|j| {
            (0..size)
                .map(|_| if j == 0 { 1.0 } else { rng.random_range(-1.0..1.0) })
                .collect()
        })
        .collect();
    let mut prev: Option<Vec<f64>> = None;
    for _ in 0..MAX_ITERATIONS {
        let y: Vec<Vec<f64>> = x.iter().map(|col| chol.solve(&m.mul_vec(col))).collect();
        let ky: Vec<Vec<f64>> = y.iter().map(|c| k.mul_vec(c)).collect();
        let my: Vec<Vec<f64>> = y.iter().map(|c| m.mul_vec(c)).collect();
        let mut kr = SquareMatrix::zeros(block);
        let mut mr = SquareMatrix::zeros(block);
        for i in 0..block {
            for j in 0..=i {
                let kij = 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i]));
                let mij = 0.5 * (dot(&y[i], &my[j]) + dot(&y[j], &my[i]));
                kr[(i, j)] = kij;
                kr[(j, i)] = kij;
                mr[(i, j)] = mij;
                mr[(j, i)] = mij;
            }
        }
        let eig = kr.sym_eigen_generalized(&mr)?;
        x = eig
            .eigenvectors
            .iter()
            .map(|v| {
                let mut col = vec![0.0; size];
                for (yj, &c) in y.iter().zip(v) {
                    for (a, b) in col.iter_mut().zip(yj) {
                        *a += c * b;
                    }
                }
                col
            })
            .collect();
        let theta = eig.eigenvalues[..n].to_vec();
        if let Some(p) = &prev {
            let scale = theta[n - 1].abs().max(shift.abs()).max(f64::MIN_POSITIVE);
            let change = theta.iter().zip(p).map(|(a, b)| (a - b).abs()).fold(0.0_f64, f64::max);
            if change <= RITZ_TOL * scale {
                return Ok(theta);
            }
        }
        prev = Some(theta);
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn diameter(mesh: &SimplicialMesh) -> f64 {
    let v = mesh.vertices();
    let d = v[0].len();
    (0..d)
        .map(|k| {
            let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p[k]), b.max(p[k])));
            (hi - lo).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Lowest `n` eigenvalues of an assembled system.
pub fn solve_system(sys: &AssembledSystem, mesh: &SimplicialMesh, n: usize) -> Result<Vec<f64>> {
    check_count(n)?;
    let k = sys.stiffness.submatrix(&sys.free);
    let m = sys.mass.submatrix(&sys.free);
    let shift = match sys.bc {
        BoundaryCondition::Neumann => -1.0 / diameter(mesh).powi(2),
        _ => 0.0,
    };
    let mut vals = lowest_eigenvalues(&k, &m, n, shift)?;
    if sys.bc == BoundaryCondition::Neumann {
        // the constant lies in the discrete space; pin the kernel value
        vals[0] = 0.0;
    }
    Ok(vals)
}

/// First `n` FEM eigenvalues on an already built mesh.
pub fn mesh_eigenvalues(mesh: &SimplicialMesh, bc: BoundaryCondition, n: usize) -> Result<Spectrum> {
    let sys = assemble(mesh, bc)?;
    let vals = solve_system(&sys, mesh, n)?;
    Ok(Spectrum::new(vals, Some(bc), Provenance::Fem { h: mesh.mesh_size() }))
}

/// First `n` FEM eigenvalues of `body` meshed at `level`.
pub fn eigen_sum(body: &Polytope, bc: BoundaryCondition, n: usize, level: usize) -> Result<Spectrum> {
    let mesh = mesh_domain(body, level)?;
    mesh_eigenvalues(&mesh, bc, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn neumann_kernel_is_zero() {
        let tri = Polytope::regular_simplex(2).unwrap();
        let s = eigen_sum(&tri, BoundaryCondition::Neumann, 2, 2).unwrap();
        assert_eq!(s.values()[0], 0.0);
        assert!(s.values()[1] > 0.0);
    }

    #[test]
    fn dense_and_iterative_paths_agree() {
        let sq = Polytope::unit_cube(2).unwrap();
        let mesh = mesh_domain(&sq, 4).unwrap();
        for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann, BoundaryCondition::Robin { sigma: 2.0 }] {
            let sys = assemble(&mesh, bc).unwrap();
            let k = sys.stiffness.submatrix(&sys.free);
            let m = sys.mass.submatrix(&sys.free);
            let full = dense(&k).sym_eigen_generalized(&dense(&m)).unwrap().eigenvalues;
            let it = solve_system(&sys, &mesh, 5).unwrap();
            for i in 1..5 {
                assert!((full[i] - it[i]).abs() < 1e-10 * full[i], "{bc}: {} vs {}", full[i], it[i]);
            }
        }
    }

    #[test]
    fn square_first_dirichlet_from_above() {
        let sq = Polytope::unit_cube(2).unwrap();
        let s = eigen_sum(&sq, BoundaryCondition::Dirichlet, 1, 3).unwrap();
        assert!(s.values()[0] > 2.0 * PI * PI);
        assert!(s.values()[0] < 1.1 * 2.0 * PI * PI);
    }
}
