use rayon::prelude::*;

use super::mesh::SimplicialMesh;
use crate::error::{Error, Result};
use crate::linalg::sparse::CsrMatrix;
use crate::linalg::SquareMatrix;
use crate::spectra::BoundaryCondition;

const CHUNK: usize = 1024;

/// P1 stiffness, mass and boundary mass on the full vertex set. `free`
/// lists the unknowns kept after eliminating Dirichlet vertices.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    /// Stiffness, including `sigma` times the boundary mass for Robin.
    pub stiffness: CsrMatrix,
    pub mass: CsrMatrix,
    pub boundary_mass: CsrMatrix,
    pub free: Vec<usize>,
    pub bc: BoundaryCondition,
}

type Triplets = Vec<(usize, usize, f64)>;

fn cell_matrices(mesh: &SimplicialMesh, c: usize) -> Result<(Triplets, Triplets)> {
    let d = mesh.dim();
    let cell = &mesh.cells()[c];
    let p0 = &mesh.vertices()[cell[0]];
    let cols: Vec<Vec<f64>> = cell[1..]
        .iter()
        .map(|&i| mesh.vertices()[i].iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let j = SquareMatrix::from_columns(&cols)?;
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    let vol = j.det().abs() / fact;
    let jinv = j.invert().map_err(|_| Error::DegenerateCell { cell: c, volume: vol })?;
    // rows of J^{-1} are the gradients of barycentric coordinates 1..d
    let mut grads: Vec<Vec<f64>> = vec![vec![0.0; d]; d + 1];
    for (k, g) in grads.iter_mut().enumerate().skip(1) {
        g.copy_from_slice(jinv.row(k - 1));
    }
    for k in 0..d {
        grads[0][k] = -(1..=d).map(|i| grads[i][k]).sum::<f64>();
    }
    let mass_scale = vol / ((d + 1) * (d + 2)) as f64;
    let mut kt = Vec::with_capacity((d + 1) * (d + 1));
    let mut mt = Vec::with_capacity((d + 1) * (d + 1));
    for a in 0..=d {
        for b in 0..=d {
            let g: f64 = grads[a].iter().zip(&grads[b]).map(|(x, y)| x * y).sum();
            kt.push((cell[a], cell[b], vol * g));
            mt.push((cell[a], cell[b], mass_scale * if a == b { 2.0 } else { 1.0 }));
        }
    }
    Ok((kt, mt))
}

fn facet_measure(mesh: &SimplicialMesh, f: &[usize]) -> f64 {
    let p: Vec<&Vec<f64>> = f.iter().map(|&i| &mesh.vertices()[i]).collect();
    if mesh.dim() == 2 {
        ((p[1][0] - p[0][0]).powi(2) + (p[1][1] - p[0][1]).powi(2)).sqrt()
    } else {
        let u: Vec<f64> = (0..3).map(|k| p[1][k] - p[0][k]).collect();
        let v: Vec<f64> = (0..3).map(|k| p[2][k] - p[0][k]).collect();
        let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
        0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
    }
}

/// Assembles the P1 system. Cells are processed in parallel chunks whose
/// triplets are concatenated in cell order, so sums are reproducible.
pub fn assemble(mesh: &SimplicialMesh, bc: BoundaryCondition) -> Result<AssembledSystem> {
    let nv = mesh.vertices().len();
    let d = mesh.dim();
    let ncell = mesh.cells().len();
    let chunks: Vec<(Triplets, Triplets)> = (0..ncell)
        .collect::<Vec<_>>()
        .par_chunks(CHUNK)
        .map(|ids| {
            let mut k = Vec::new();
            let mut m = Vec::new();
            for &c in ids {
                let (kt, mt) = cell_matrices(mesh, c)?;
                k.extend(kt);
                m.extend(mt);
            }
            Ok((k, m))
        })
        .collect::<Result<_>>()?;
    let mut kt = Vec::new();
    let mut mt = Vec::new();
    for (k, m) in chunks {
        kt.extend(k);
        mt.extend(m);
    }
    let mut bt = Vec::new();
    for f in mesh.boundary() {
        let s = facet_measure(mesh, f) / (d * (d + 1)) as f64;
        for a in 0..d {
            for b in 0..d {
                bt.push((f[a], f[b], s * if a == b { 2.0 } else { 1.0 }));
            }
        }
    }
    let mut stiffness = CsrMatrix::from_triplets(nv, kt);
    let mass = CsrMatrix::from_triplets(nv, mt);
    let boundary_mass = CsrMatrix::from_triplets(nv, bt);
    if let BoundaryCondition::Robin { sigma } = bc {
        stiffness = stiffness.add_scaled(sigma, &boundary_mass);
    }
    let free = match bc {
        BoundaryCondition::Dirichlet => {
            let on = mesh.boundary_vertices();
            (0..nv).filter(|&i| !on[i]).collect()
        }
        _ => (0..nv).collect(),
    };
    Ok(AssembledSystem {
        stiffness,
        mass,
        boundary_mass,
        free,
        bc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::mesh::mesh_domain;
    use crate::geometry::Polytope;

    #[test]
    fn reference_triangle_row_sums_vanish() {
        let m = mesh_domain(&Polytope::standard_simplex(2).unwrap(), 0).unwrap();
        let sys = assemble(&m, BoundaryCondition::Neumann).unwrap();
        for i in 0..3 {
            let s: f64 = sys.stiffness.row(i).map(|(_, v)| v).sum();
            assert!(s.abs() < 1e-15);
        }
        let total: f64 = (0..3).flat_map(|i| sys.mass.row(i).map(|(_, v)| v)).sum();
        assert!((total - 0.5).abs() < 1e-15);
    }

    #[test]
    fn boundary_mass_total_is_perimeter() {
        let m = mesh_domain(&Polytope::unit_cube(2).unwrap(), 2).unwrap();
        let sys = assemble(&m, BoundaryCondition::Neumann).unwrap();
        let ones = vec![1.0; m.vertices().len()];
        assert!((sys.boundary_mass.bilinear(&ones, &ones) - 4.0).abs() < 1e-14);
        assert!((sys.mass.bilinear(&ones, &ones) - 1.0).abs() < 1e-14);
    }
}
