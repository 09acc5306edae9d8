use eigensum::fem::{mesh_domain, mesh_ellipse, mesh_eigenvalues, SimplicialMesh};
use eigensum::lab::{scalar_orthogonal_factor, Domain};
use eigensum::numfmt::sig17;
use eigensum::spectra::{ball_spectrum, box_spectrum, lame_triangle_spectrum, torus_spectrum, Lattice};
use eigensum::{Body, BoundaryCondition, Error, Spectrum};

use crate::error::CliError;
use crate::spec::{sides_of, Shape};

/// Finite-element level when neither the domain file nor the flags name one.
pub fn default_level(shape: &Shape) -> usize {
    match shape {
        Shape::Reference { domain, .. } => domain.default_level(),
        _ if shape.dim() == 2 => 5,
        _ => 3,
    }
}

fn is_robin(bc: BoundaryCondition) -> bool {
    matches!(bc, BoundaryCondition::Robin { .. })
}

/// Mesh of the body at `level`.
pub fn mesh(shape: &Shape, level: usize) -> Result<SimplicialMesh, CliError> {
    Ok(match shape.body()? {
        Body::Polytope(p) => mesh_domain(&p, level)?,
        Body::Ellipsoid(e) => mesh_ellipse(&e, level)?,
    })
}

/// First `n` eigenvalues, from a closed form when one applies and from
/// finite elements otherwise.
pub fn compute(shape: &Shape, bc: Option<BoundaryCondition>, n: usize, level: usize) -> Result<Spectrum, CliError> {
    if let Shape::Torus { basis } = shape {
        if bc.is_some() {
            return Err(CliError::Usage("a torus takes no boundary condition".into()));
        }
        return Ok(torus_spectrum(&Lattice::new(basis.clone())?, n)?);
    }
    let bc = bc.unwrap_or(BoundaryCondition::Dirichlet);
    if let Some(sides) = sides_of(shape) {
        return Ok(box_spectrum(&sides, bc, n)?);
    }
    if let Shape::Reference { domain, t } = shape {
        match *domain {
            Domain::Ball { d } => {
                if is_robin(bc) {
                    return Err(Error::Unsupported("Robin spectrum of the ball".into()).into());
                }
                if let Some(c) = scalar_orthogonal_factor(t) {
                    if (2..=3).contains(&d) {
                        return Ok(ball_spectrum(c, d, bc, n)?);
                    }
                }
            }
            Domain::RegularSimplex { d: 2 } if !is_robin(bc) => {
                if let Some(c) = scalar_orthogonal_factor(t) {
                    return Ok(lame_triangle_spectrum(c, bc, n)?);
                }
            }
            _ => {}
        }
    }
    Ok(mesh_eigenvalues(&mesh(shape, level)?, bc, n)?)
}

/// `index,value,multiplicity,provenance` with 17 significant digits.
pub fn to_csv(s: &Spectrum) -> Result<Vec<u8>, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["index", "value", "multiplicity", "provenance"])?;
    for r in s.rows() {
        w.write_record([r.index.to_string(), sig17(r.value), r.multiplicity.to_string(), r.provenance])?;
    }
    w.into_inner().map_err(|e| CliError::Usage(e.to_string()))
}
