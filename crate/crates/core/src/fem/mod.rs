//! Piecewise-linear finite elements for Dirichlet, Neumann and Robin
//! eigenvalues on simplicial meshes of polygons and polyhedra.

mod assemble;
mod mesh;
mod richardson;
mod solve;

pub use assemble::{assemble, AssembledSystem};
pub use mesh::{mesh_domain, mesh_ellipse, SimplicialMesh, ELLIPSE_COARSE_SIDES, MAX_LEVEL_2D, MAX_LEVEL_3D};
pub use richardson::{richardson_extrapolate, RichardsonEstimate};
pub use solve::{eigen_sum, lowest_eigenvalues, mesh_eigenvalues, solve_system, DENSE_LIMIT};

use crate::error::{Error, Result};
use crate::geometry::Polytope;
use crate::spectra::{BoundaryCondition, Spectrum};

/// Spectra on consecutive refinement levels of one coarse mesh.
#[derive(Clone, Debug)]
pub struct LevelSequence {
    pub levels: Vec<usize>,
    pub spectra: Vec<Spectrum>,
}

impl LevelSequence {
    /// Sums of the first `n` values per level.
    pub fn sums(&self, n: usize) -> Vec<f64> {
        self.spectra.iter().map(|s| s.sum(n)).collect()
    }

    pub fn value_at(&self, index: usize) -> Vec<f64> {
        self.spectra.iter().map(|s| s.values()[index]).collect()
    }

    /// Richardson estimate of the sum of the first `n` values.
    pub fn sum_estimate(&self, n: usize) -> Result<RichardsonEstimate> {
        richardson_extrapolate(&self.sums(n))
    }

    pub fn finest(&self) -> &Spectrum {
        self.spectra.last().expect("at least one level")
    }
}

/// Solves on levels `first..=last` of `mesh_domain(body, .)`, refining
/// incrementally.
pub fn level_sequence(body: &Polytope, bc: BoundaryCondition, n: usize, first: usize, last: usize) -> Result<LevelSequence> {
    if first > last {
        return Err(Error::InvalidInput("empty level range".into()));
    }
    let mut mesh = mesh_domain(body, first)?;
    mesh_sequence(&mut mesh, bc, n, last, None)
}

/// Like [`level_sequence`] for a planar ellipse.
pub fn ellipse_level_sequence(
    e: &crate::geometry::Ellipsoid,
    bc: BoundaryCondition,
    n: usize,
    first: usize,
    last: usize,
) -> Result<LevelSequence> {
    if first > last {
        return Err(Error::InvalidInput("empty level range".into()));
    }
    let mut mesh = mesh_ellipse(e, first)?;
    let a = e.shape().clone();
    let project = move |p: &[f64]| -> Vec<f64> {
        let q = crate::linalg::dot(p, &a.mul_vec(p)).sqrt();
        p.iter().map(|x| x / q).collect()
    };
    mesh_sequence(&mut mesh, bc, n, last, Some(&project))
}

fn mesh_sequence(
    mesh: &mut SimplicialMesh,
    bc: BoundaryCondition,
    n: usize,
    last: usize,
    snap: Option<&dyn Fn(&[f64]) -> Vec<f64>>,
) -> Result<LevelSequence> {
    let limit = if mesh.dim() == 2 { MAX_LEVEL_2D } else { MAX_LEVEL_3D };
    if last > limit {
        return Err(Error::BudgetExceeded(format!("level {last} exceeds the limit {limit}")));
    }
    let mut levels = Vec::new();
    let mut spectra = Vec::new();
    loop {
        levels.push(mesh.level());
        spectra.push(mesh_eigenvalues(mesh, bc, n)?);
        if mesh.level() >= last {
            break;
        }
        *mesh = mesh.refine(snap)?;
    }
    Ok(LevelSequence { levels, spectra })
}
