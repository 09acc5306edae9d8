//! Verification layer: both sides of each inequality, the geometric
//! identities, maximizer search and the polar-dual explorer.
//!
//! Eigenvalue sums come from closed forms when the image `T(D)` has one
//! (rotated boxes, scaled balls) and from finite elements otherwise. A
//! finite-element sum is the Richardson extrapolant over three consecutive
//! levels, and its error estimate is the change between the last two
//! extrapolants.

mod checks;
mod explorer;
pub mod report;
pub mod sampling;
mod search;

pub use checks::{
    box_identity_check, dn_batch, dn_check, robin_batch, stretch_batch, hsnorm_check, moment_identity_values, momentratio_body_check, momentratio_check, naive_functional,
    naive_functional_closed_form, naive_unbounded_check, normalized_functional, robin_check,
    regular_check, robin_normalized_check, stretch_check, torus_check, torus_normalized_sum, MomentShape,
    EXACT_TOL, GEOMETRY_TOL, ROBIN_TOL,
};
pub use explorer::{conjecture_explorer, disk_reference, ControlRow, ExplorerConfig, ExplorerRow, ExplorerSummary, CONTROL_SIDES};
pub use search::{maximizer_search, nelder_mead, NelderMeadResult, SearchObjective, SearchReport, EXCEED_TOL};

use crate::error::{Error, Result};
use crate::fem::{ellipse_level_sequence, level_sequence, LevelSequence};
use crate::geometry::{Body, Ellipsoid, Polytope};
use crate::linalg::SquareMatrix;
use crate::spectra::{ball_spectrum, box_spectrum, BoundaryCondition};
use crate::symmetry::{hypercube_group, polygon_group, simplex_group, OrthogonalGroup};

/// A reference domain `D` with a registered irreducible symmetry group.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    /// Unit cube `[-1/2, 1/2]^d`.
    Hypercube { d: usize },
    /// Unit-edge regular simplex centred at the origin.
    RegularSimplex { d: usize },
    /// Regular `n`-gon with unit circumradius.
    RegularPolygon { n: usize },
    /// Unit ball.
    Ball { d: usize },
}

impl Domain {
    pub fn dim(&self) -> usize {
        match *self {
            Domain::Hypercube { d } | Domain::RegularSimplex { d } | Domain::Ball { d } => d,
            Domain::RegularPolygon { .. } => 2,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            Domain::Hypercube { d } => format!("hypercube-{d}"),
            Domain::RegularSimplex { d } => format!("simplex-{d}"),
            Domain::RegularPolygon { n } => format!("polygon-{n}"),
            Domain::Ball { d } => format!("ball-{d}"),
        }
    }

    /// Irreducible symmetry group. The ball uses its hypercube subgroup.
    pub fn symmetry_group(&self) -> Result<OrthogonalGroup> {
        let g = match *self {
            Domain::Hypercube { d } | Domain::Ball { d } => hypercube_group(d)?,
            Domain::RegularSimplex { d } => simplex_group(d)?,
            Domain::RegularPolygon { n } => polygon_group(n)?,
        };
        if !g.is_irreducible() {
            return Err(Error::UnregisteredSymmetry(self.name()));
        }
        Ok(g)
    }

    pub fn body(&self) -> Result<Body> {
        Ok(match *self {
            Domain::Hypercube { d } => Polytope::unit_cube(d)?.into(),
            Domain::RegularSimplex { d } => Polytope::regular_simplex(d)?.into(),
            Domain::RegularPolygon { n } => Polytope::regular_polygon(n, 1.0)?.into(),
            Domain::Ball { d } => Ellipsoid::ball(d, 1.0)?.into(),
        })
    }

    /// Default finest refinement level for finite-element sums.
    pub fn default_level(&self) -> usize {
        match *self {
            Domain::RegularSimplex { d: 2 } => 6,
            Domain::RegularSimplex { .. } => 5,
            Domain::RegularPolygon { n } if n <= 8 => 5,
            Domain::RegularPolygon { .. } => 4,
            Domain::Hypercube { d: 2 } | Domain::Ball { d: 2 } => 5,
            Domain::Hypercube { .. } | Domain::Ball { .. } => 3,
        }
    }
}

/// An eigenvalue sum with its error estimate (`None` when exact).
#[derive(Clone, Debug, PartialEq)]
pub struct SumEstimate {
    pub value: f64,
    pub error: Option<f64>,
    /// Finest level used, for finite-element sums.
    pub level: Option<usize>,
}

impl SumEstimate {
    pub fn is_exact(&self) -> bool {
        self.error.is_none()
    }
}

/// Side lengths of `T([-1/2,1/2]^d)` when `T` has orthogonal columns.
pub fn box_sides(t: &SquareMatrix) -> Option<Vec<f64>> {
    let g = t.transpose().matmul(t);
    let d = t.dim();
    let scale = (0..d).map(|i| g[(i, i)]).fold(0.0_f64, f64::max);
    for i in 0..d {
        for j in 0..d {
            if i != j && g[(i, j)].abs() > 1e-12 * scale {
                return None;
            }
        }
    }
    Some((0..d).map(|j| crate::linalg::norm(&t.column(j))).collect())
}

/// `c` when `T = c U` with `U` orthogonal.
pub fn scalar_orthogonal_factor(t: &SquareMatrix) -> Option<f64> {
    let d = t.dim();
    let g = t.transpose().matmul(t);
    let c2 = g.trace() / d as f64;
    if g.max_abs_diff(&SquareMatrix::identity(d).scale(c2)) <= 1e-12 * c2 {
        Some(c2.sqrt())
    } else {
        None
    }
}

fn fem_estimates(seq: &LevelSequence, ns: &[usize]) -> Result<Vec<SumEstimate>> {
    ns.iter()
        .map(|&n| {
            let est = seq.sum_estimate(n)?;
            Ok(SumEstimate {
                value: est.extrapolated,
                error: Some(est.error_estimate),
                level: seq.levels.last().copied(),
            })
        })
        .collect()
}

/// Sum of the first `n` eigenvalues of `T(D)`.
///
/// `level` overrides the finest finite-element level; the levels used are
/// `level - 2 ..= level`. `force_fem` skips the closed forms, so both sides
/// of a comparison carry the same discretization bias.
pub fn image_sum(
    domain: Domain,
    t: &SquareMatrix,
    bc: BoundaryCondition,
    n: usize,
    level: Option<usize>,
    force_fem: bool,
) -> Result<SumEstimate> {
    Ok(image_sums(domain, t, bc, &[n], level, force_fem)?.remove(0))
}

/// [`image_sum`] for several `n` from one spectrum computation.
pub fn image_sums(
    domain: Domain,
    t: &SquareMatrix,
    bc: BoundaryCondition,
    ns: &[usize],
    level: Option<usize>,
    force_fem: bool,
) -> Result<Vec<SumEstimate>> {
    let d = domain.dim();
    if t.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: t.dim() });
    }
    let Some(&n_max) = ns.iter().max() else {
        return Ok(Vec::new());
    };
    let finest = level.unwrap_or_else(|| domain.default_level());
    let first = finest.saturating_sub(2);
    let exact = |s: crate::spectra::Spectrum| -> Vec<SumEstimate> {
        ns.iter()
            .map(|&n| SumEstimate {
                value: s.sum(n),
                error: None,
                level: None,
            })
            .collect()
    };
    if !force_fem {
        match domain {
            Domain::Hypercube { .. } => {
                if let Some(sides) = box_sides(t) {
                    return Ok(exact(box_spectrum(&sides, bc, n_max)?));
                }
            }
            Domain::Ball { d } if (2..=3).contains(&d) => {
                if let Some(c) = scalar_orthogonal_factor(t) {
                    if !matches!(bc, BoundaryCondition::Robin { .. }) {
                        return Ok(exact(ball_spectrum(c, d, bc, n_max)?));
                    }
                }
            }
            _ => {}
        }
    }
    if d > 3 {
        return Err(Error::Unsupported(format!(
            "finite elements in dimension {d}; {} has no closed form here",
            domain.name()
        )));
    }
    match domain.body()?.linear_image(t)? {
        Body::Polytope(p) => fem_estimates(&level_sequence(&p, bc, n_max, first, finest)?, ns),
        Body::Ellipsoid(e) => {
            if d != 2 {
                return Err(Error::Unsupported("3-D ellipsoid meshes".into()));
            }
            fem_estimates(&ellipse_level_sequence(&e, bc, n_max, first, finest)?, ns)
        }
    }
}
