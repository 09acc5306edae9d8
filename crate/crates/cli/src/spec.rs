//! JSON domain specifications.
//!
//! ```json
//! {"kind": "box", "sides": [1, 1, 1], "bc": "dirichlet", "n": 5}
//! {"kind": "torus", "basis": [[1, 0], [0, 1]], "n": 5}
//! {"kind": "regular-polygon", "N": 5, "transform": [[2, 0], [0, 1]], "bc": "robin", "sigma": 1}
//! ```
//!
//! Matrices are written row by row. A torus `basis` is the matrix whose
//! columns generate the lattice.

use serde::Deserialize;

use eigensum::lab::{box_sides, Domain};
use eigensum::{Body, BoundaryCondition, Ellipsoid, Polytope, SquareMatrix};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Box,
    Simplex,
    RegularPolygon,
    Polytope,
    Ellipsoid,
    Ball,
    Torus,
    EquilateralTriangle,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpec {
    pub kind: Kind,
    pub dimension: Option<usize>,
    /// Box side lengths.
    pub sides: Option<Vec<f64>>,
    /// Number of polygon vertices.
    #[serde(rename = "N")]
    pub polygon_sides: Option<usize>,
    /// Ball radius or polygon circumradius.
    pub radius: Option<f64>,
    /// Equilateral triangle side.
    pub side: Option<f64>,
    pub vertices: Option<Vec<Vec<f64>>>,
    pub axes: Option<Vec<f64>>,
    pub basis: Option<Vec<Vec<f64>>>,
    pub transform: Option<Vec<Vec<f64>>>,
    pub bc: Option<String>,
    pub sigma: Option<f64>,
    pub n: Option<usize>,
    pub level: Option<usize>,
}

/// What a spec describes once the parameters are folded into one transform.
#[derive(Clone, Debug)]
pub enum Shape {
    /// `T(D)` for a domain with a registered symmetry group.
    Reference { domain: Domain, t: SquareMatrix },
    /// A body without a registered group, transform already applied.
    Free { name: String, body: Body },
    Torus { basis: SquareMatrix },
}

impl Shape {
    pub fn dim(&self) -> usize {
        match self {
            Shape::Reference { domain, .. } => domain.dim(),
            Shape::Free { body, .. } => body.dim(),
            Shape::Torus { basis } => basis.dim(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Shape::Reference { domain, .. } => domain.name(),
            Shape::Free { name, .. } => name.clone(),
            Shape::Torus { basis } => format!("torus-{}", basis.dim()),
        }
    }

    /// The body itself (not defined for tori).
    pub fn body(&self) -> Result<Body, CliError> {
        match self {
            Shape::Reference { domain, t } => Ok(domain.body()?.linear_image(t)?),
            Shape::Free { body, .. } => Ok(body.clone()),
            Shape::Torus { .. } => Err(CliError::Usage("a torus has no body".into())),
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn matrix(rows: &[Vec<f64>], what: &str) -> Result<SquareMatrix, CliError> {
    let m = SquareMatrix::from_rows(rows).map_err(|e| usage(format!("{what}: {e}")))?;
    m.invert().map_err(|e| usage(format!("{what} is not invertible: {e}")))?;
    Ok(m)
}

fn positive(x: f64, what: &str) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(usage(format!("{what} must be positive, got {x}")))
    }
}

impl DomainSpec {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| usage(format!("domain spec: {e}")))
    }

    /// Checks the fields each kind needs and rejects the ones it does not use.
    fn check_fields(&self) -> Result<(), CliError> {
        let present = [
            ("sides", self.sides.is_some()),
            ("N", self.polygon_sides.is_some()),
            ("radius", self.radius.is_some()),
            ("side", self.side.is_some()),
            ("vertices", self.vertices.is_some()),
            ("axes", self.axes.is_some()),
            ("basis", self.basis.is_some()),
        ];
        let allowed: &[&str] = match self.kind {
            Kind::Box => &["sides"],
            Kind::Simplex => &[],
            Kind::RegularPolygon => &["N", "radius"],
            Kind::Polytope => &["vertices"],
            Kind::Ellipsoid => &["axes"],
            Kind::Ball => &["radius"],
            Kind::Torus => &["basis"],
            Kind::EquilateralTriangle => &["side"],
        };
        for (name, set) in present {
            if set && !allowed.contains(&name) {
                return Err(usage(format!("field {name:?} does not apply to kind {:?}", self.kind)));
            }
        }
        Ok(())
    }

    fn expect_dim(&self, d: usize) -> Result<(), CliError> {
        match self.dimension {
            Some(k) if k != d => Err(usage(format!("dimension {k} does not match the parameters (dimension {d})"))),
            _ => Ok(()),
        }
    }

    pub fn shape(&self) -> Result<Shape, CliError> {
        self.check_fields()?;
        let (shape, d) = match self.kind {
            Kind::Box => {
                let sides = self.sides.clone().ok_or_else(|| usage("box needs \"sides\""))?;
                for &s in &sides {
                    positive(s, "box side")?;
                }
                let d = sides.len();
                self.expect_dim(d)?;
                (Shape::Reference { domain: Domain::Hypercube { d }, t: SquareMatrix::diagonal(&sides) }, d)
            }
            Kind::Simplex => {
                let d = self.dimension.ok_or_else(|| usage("simplex needs \"dimension\""))?;
                (Shape::Reference { domain: Domain::RegularSimplex { d }, t: SquareMatrix::identity(d) }, d)
            }
            Kind::RegularPolygon => {
                let n = self.polygon_sides.ok_or_else(|| usage("regular-polygon needs \"N\""))?;
                self.expect_dim(2)?;
                let r = positive(self.radius.unwrap_or(1.0), "radius")?;
                (Shape::Reference { domain: Domain::RegularPolygon { n }, t: SquareMatrix::identity(2).scale(r) }, 2)
            }
            Kind::Ball => {
                let d = self.dimension.ok_or_else(|| usage("ball needs \"dimension\""))?;
                let r = positive(self.radius.unwrap_or(1.0), "radius")?;
                (Shape::Reference { domain: Domain::Ball { d }, t: SquareMatrix::identity(d).scale(r) }, d)
            }
            Kind::EquilateralTriangle => {
                self.expect_dim(2)?;
                let s = positive(self.side.unwrap_or(1.0), "side")?;
                (Shape::Reference { domain: Domain::RegularSimplex { d: 2 }, t: SquareMatrix::identity(2).scale(s) }, 2)
            }
            Kind::Polytope => {
                let v = self.vertices.as_ref().ok_or_else(|| usage("polytope needs \"vertices\""))?;
                let p = Polytope::from_points(v)?;
                self.expect_dim(p.dim())?;
                let d = p.dim();
                (Shape::Free { name: format!("polytope-{d}"), body: p.into() }, d)
            }
            Kind::Ellipsoid => {
                let axes = self.axes.as_ref().ok_or_else(|| usage("ellipsoid needs \"axes\""))?;
                let e = Ellipsoid::from_axes(axes)?;
                self.expect_dim(e.dim())?;
                let d = e.dim();
                (Shape::Free { name: format!("ellipsoid-{d}"), body: e.into() }, d)
            }
            Kind::Torus => {
                let basis = match &self.basis {
                    Some(b) => matrix(b, "basis")?,
                    None => SquareMatrix::identity(self.dimension.ok_or_else(|| usage("torus needs \"basis\" or \"dimension\""))?),
                };
                self.expect_dim(basis.dim())?;
                let d = basis.dim();
                (Shape::Torus { basis }, d)
            }
        };
        let Some(rows) = &self.transform else {
            return Ok(shape);
        };
        let t = matrix(rows, "transform")?;
        if t.dim() != d {
            return Err(usage(format!("transform is {}x{0}, domain has dimension {d}", t.dim())));
        }
        Ok(match shape {
            Shape::Reference { domain, t: base } => Shape::Reference { domain, t: t.matmul(&base) },
            Shape::Free { name, body } => Shape::Free { name, body: body.linear_image(&t)? },
            Shape::Torus { basis } => Shape::Torus { basis: t.matmul(&basis) },
        })
    }
}

/// Resolves the boundary condition from spec fields and flags (flags win).
/// `sigma` is accepted exactly when the condition is Robin.
pub fn boundary_condition(
    spec_bc: Option<&str>,
    spec_sigma: Option<f64>,
    flag_bc: Option<&str>,
    flag_sigma: Option<f64>,
    default: Option<BoundaryCondition>,
) -> Result<Option<BoundaryCondition>, CliError> {
    let kind = flag_bc.or(spec_bc);
    let sigma = flag_sigma.or(spec_sigma);
    match kind {
        Some(k) => Ok(Some(BoundaryCondition::parse(k, sigma).map_err(|e| usage(e.to_string()))?)),
        None if sigma.is_some() => Err(usage("sigma given without bc = robin")),
        None => Ok(default),
    }
}

/// Side lengths when `T(D)` is an axis-aligned box image of the cube.
pub fn sides_of(shape: &Shape) -> Option<Vec<f64>> {
    match shape {
        Shape::Reference { domain: Domain::Hypercube { .. }, t } => box_sides(t),
        _ => None,
    }
}
