//! Convex bodies: polytopes and origin-centred ellipsoids, their exact
//! moments, linear images and polar duals.

mod polytope;

pub use polytope::{regular_simplex_vertices, Facet, Polytope, Triangulation};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{norm, SquareMatrix};
use crate::numfmt;
use crate::symmetry::OrthogonalGroup;
use polytope::NamedKind;

/// Volume of the unit ball in `R^d`.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(d - 2) * 2.0 * std::f64::consts::PI / d as f64,
    }
}

/// Ellipsoid `{x : x^T A x < 1}`.
#[derive(Clone, Debug)]
pub struct Ellipsoid {
    shape: SquareMatrix,
}

impl Ellipsoid {
    pub fn new(shape: SquareMatrix) -> Result<Self> {
        if !shape.is_symmetric(1e-12 * shape.max_abs()) {
            return Err(Error::NotSymmetric {
                asymmetry: shape.sub(&shape.transpose()).max_abs(),
            });
        }
        shape.cholesky()?;
        Ok(Self { shape })
    }

    /// Axis-aligned ellipsoid with the given semi-axes.
    pub fn from_axes(axes: &[f64]) -> Result<Self> {
        if axes.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::DegenerateBody("semi-axes must be positive".into()));
        }
        let diag: Vec<f64> = axes.iter().map(|a| 1.0 / (a * a)).collect();
        Self::new(SquareMatrix::diagonal(&diag))
    }

    pub fn ball(d: usize, radius: f64) -> Result<Self> {
        Self::from_axes(&vec![radius; d])
    }

    pub fn shape(&self) -> &SquareMatrix {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.shape.dim()
    }

    pub fn moments(&self) -> BodyMoments {
        let d = self.dim();
        let volume = unit_ball_volume(d) / self.shape.det().sqrt();
        let inv = self.shape.invert().expect("shape matrix is SPD");
        let moment_matrix = inv.scale(volume / (d as f64 + 2.0));
        BodyMoments {
            volume,
            centroid: vec![0.0; d],
            second_moment: moment_matrix.trace(),
            moment_matrix,
        }
    }

    /// `T(E)` has shape `T^{-T} A T^{-1}`.
    pub fn map(&self, t: &SquareMatrix) -> Result<Self> {
        let inv = t.invert()?;
        let a = inv.transpose().matmul(&self.shape).matmul(&inv);
        let sym = a.add(&a.transpose()).scale(0.5);
        Ok(Self { shape: sym })
    }

    /// The polar dual of `{x^T A x < 1}` is `{x^T A^{-1} x < 1}`.
    pub fn polar_dual(&self) -> Result<Self> {
        let inv = self.shape.invert()?;
        Ok(Self {
            shape: inv.add(&inv.transpose()).scale(0.5),
        })
    }

    /// Semi-axis lengths, ascending.
    pub fn semi_axes(&self) -> Vec<f64> {
        let mut a: Vec<f64> = self
            .shape
            .sym_eigen()
            .expect("shape matrix is symmetric")
            .eigenvalues
            .iter()
            .map(|l| 1.0 / l.sqrt())
            .collect();
        a.sort_by(f64::total_cmp);
        a
    }
}

/// Volume, centroid, second moment about the centroid, and the moment
/// matrix `int x x^T dx` about the origin.
#[derive(Clone, Debug, Serialize)]
pub struct BodyMoments {
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub volume: f64,
    #[serde(serialize_with = "numfmt::serialize_vec_f64")]
    pub centroid: Vec<f64>,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub second_moment: f64,
    #[serde(serialize_with = "serialize_square")]
    pub moment_matrix: SquareMatrix,
}

fn serialize_square<S: serde::Serializer>(m: &SquareMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    numfmt::serialize_matrix(&m.to_rows(), s)
}

/// Exact integrals over one simplex: volume, `int x`, `int x x^T`.
pub(crate) fn simplex_integrals(points: &[&[f64]]) -> (f64, Vec<f64>, SquareMatrix) {
    let d = points.len() - 1;
    let edges: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(points[0]).map(|(a, b)| a - b).collect())
        .collect();
    let det = SquareMatrix::from_columns(&edges).expect("d edges of length d").det();
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    let vol = det.abs() / fact;
    let mut sum = vec![0.0; d];
    for p in points {
        for (s, x) in sum.iter_mut().zip(p.iter()) {
            *s += x;
        }
    }
    let first: Vec<f64> = sum.iter().map(|s| vol * s / (d as f64 + 1.0)).collect();
    let mut second = SquareMatrix::zeros(d);
    let c = vol / ((d as f64 + 1.0) * (d as f64 + 2.0));
    for i in 0..d {
        for j in 0..d {
            let pp: f64 = points.iter().map(|p| p[i] * p[j]).sum();
            second[(i, j)] = c * (pp + sum[i] * sum[j]);
        }
    }
    (vol, first, second)
}

impl Polytope {
    /// Exact moments by summing closed-form simplex integrals over the
    /// stored triangulation.
    pub fn moments(&self) -> Result<BodyMoments> {
        let tri = self.triangulation();
        let d = self.dim();
        let parts: Vec<(f64, Vec<f64>, SquareMatrix)> = tri
            .cells
            .par_iter()
            .map(|cell| {
                let pts: Vec<&[f64]> = cell.iter().map(|&i| tri.points[i].as_slice()).collect();
                simplex_integrals(&pts)
            })
            .collect();
        let mut volume = 0.0;
        let mut first = vec![0.0; d];
        let mut m = SquareMatrix::zeros(d);
        for (v, f, s) in &parts {
            volume += v;
            for (a, b) in first.iter_mut().zip(f) {
                *a += b;
            }
            m = m.add(s);
        }
        if !(volume > 0.0) {
            return Err(Error::DegenerateBody("zero volume".into()));
        }
        let centroid: Vec<f64> = first.iter().map(|x| x / volume).collect();
        let c2: f64 = centroid.iter().map(|x| x * x).sum();
        Ok(BodyMoments {
            volume,
            second_moment: m.trace() - volume * c2,
            centroid,
            moment_matrix: m,
        })
    }

    /// Polar dual `{x : x . v < 1 for all vertices v}`.
    pub fn polar_dual(&self) -> Result<Self> {
        let margin = self.origin_margin();
        if margin < 1e-9 * self.size() {
            return Err(Error::OriginNotInterior { margin });
        }
        if let Some(named) = self.named_kind() {
            let d = self.dim();
            let (kind, s) = match named.kind {
                NamedKind::Hypercube => (NamedKind::CrossPolytope, 1.0),
                NamedKind::CrossPolytope => (NamedKind::Hypercube, 1.0),
                // dual vertices are -d v_i / |v_i|^2 with |v_i|^2 = d / (2(d+1))
                NamedKind::Simplex => (NamedKind::Simplex, -2.0 * (d as f64 + 1.0)),
            };
            let t = named.transform.inverse_transpose()?.scale(s);
            return Polytope::named(kind, t);
        }
        let offsets = vec![1.0; self.vertices().len()];
        Polytope::from_halfspaces(self.vertices(), &offsets)
    }
}

/// A convex body: polytope or origin-centred ellipsoid.
#[derive(Clone, Debug)]
pub enum Body {
    Polytope(Polytope),
    Ellipsoid(Ellipsoid),
}

impl Body {
    pub fn dim(&self) -> usize {
        match self {
            Body::Polytope(p) => p.dim(),
            Body::Ellipsoid(e) => e.dim(),
        }
    }

    pub fn moments(&self) -> Result<BodyMoments> {
        match self {
            Body::Polytope(p) => p.moments(),
            Body::Ellipsoid(e) => Ok(e.moments()),
        }
    }

    pub fn linear_image(&self, t: &SquareMatrix) -> Result<Body> {
        if t.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: t.dim(),
            });
        }
        Ok(match self {
            Body::Polytope(p) => Body::Polytope(p.map(t)?),
            Body::Ellipsoid(e) => Body::Ellipsoid(e.map(t)?),
        })
    }

    pub fn polar_dual(&self) -> Result<Body> {
        Ok(match self {
            Body::Polytope(p) => Body::Polytope(p.polar_dual()?),
            Body::Ellipsoid(e) => Body::Ellipsoid(e.polar_dual()?),
        })
    }
}

impl From<Polytope> for Body {
    fn from(p: Polytope) -> Self {
        Body::Polytope(p)
    }
}

impl From<Ellipsoid> for Body {
    fn from(e: Ellipsoid) -> Self {
        Body::Ellipsoid(e)
    }
}

/// Outcome of [`moment_isotropy_check`].
#[derive(Clone, Debug, Serialize)]
pub struct IsotropyReport {
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub centroid_offset: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub max_off_diagonal: f64,
    /// `max |M - (I/d) Id|` entrywise.
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub isotropy_defect: f64,
    /// Largest entry of `|M - U M U^T|` over the group.
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub group_defect: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub second_moment: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub tolerance: f64,
    pub pass: bool,
}

/// Checks that the body is centred and its moment matrix is `(I/d) Id`.
/// `rel_tol` is relative to `I/d`; the centroid offset is judged relative to
/// the body size `(V)^{1/d}`.
pub fn moment_isotropy_check(body: &Body, group: &OrthogonalGroup, rel_tol: f64) -> Result<IsotropyReport> {
    let m = body.moments()?;
    let d = body.dim();
    let scale = m.second_moment / d as f64;
    let mut off = 0.0_f64;
    let mut defect = 0.0_f64;
    for i in 0..d {
        for j in 0..d {
            let target = if i == j { scale } else { 0.0 };
            defect = defect.max((m.moment_matrix[(i, j)] - target).abs());
            if i != j {
                off = off.max(m.moment_matrix[(i, j)].abs());
            }
        }
    }
    let group_defect = group
        .elements()
        .iter()
        .map(|u| u.matmul(&m.moment_matrix).matmul(&u.transpose()).max_abs_diff(&m.moment_matrix))
        .fold(0.0_f64, f64::max);
    let centroid_offset = norm(&m.centroid) / m.volume.powf(1.0 / d as f64);
    let tolerance = rel_tol * scale;
    let pass = centroid_offset <= rel_tol && off <= tolerance && defect <= tolerance;
    Ok(IsotropyReport {
        centroid_offset,
        max_off_diagonal: off,
        isotropy_defect: defect,
        group_defect,
        second_moment: m.second_moment,
        tolerance,
        pass,
    })
}

/// Largest distance from a point of `a` to its nearest point in `b`, taken
/// symmetrically; `INFINITY` when the sets differ in size.
pub fn vertex_set_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let one_way = |x: &[Vec<f64>], y: &[Vec<f64>]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| norm(&p.iter().zip(q).map(|(s, t)| s - t).collect::<Vec<_>>()))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0_f64, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symmetry::{hypercube_group, polygon_group, simplex_group};

    #[test]
    fn box_second_moment() {
        let t = [1.3, 0.7, 2.1];
        let m = Polytope::centered_box(&t).unwrap().moments().unwrap();
        let v = t.iter().product::<f64>();
        assert!((m.volume - v).abs() < 1e-14);
        let i = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]) * v / 12.0;
        assert!((m.second_moment - i).abs() < 1e-13 * i);
    }

    #[test]
    fn standard_simplex_volume() {
        for d in 2..=5 {
            let v = Polytope::standard_simplex(d).unwrap().moments().unwrap().volume;
            let f: f64 = (1..=d).map(|k| k as f64).product();
            assert!((v - 1.0 / f).abs() < 1e-15);
        }
    }

    #[test]
    fn unit_cube_isotropy() {
        let body = Body::from(Polytope::unit_cube(3).unwrap());
        let r = moment_isotropy_check(&body, &hypercube_group(3).unwrap(), 1e-12).unwrap();
        assert!(r.pass);
        assert!((r.second_moment - 0.25).abs() < 1e-15);
        let m = body.moments().unwrap().moment_matrix;
        assert!((m[(0, 0)] - 1.0 / 12.0).abs() < 1e-15);
    }

    #[test]
    fn simplex_triangle_isotropy() {
        let body = Body::from(Polytope::regular_simplex(2).unwrap());
        let r = moment_isotropy_check(&body, &simplex_group(2).unwrap(), 1e-12).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn rectangle_is_anisotropic() {
        let body = Body::from(Polytope::centered_box(&[2.0, 1.0]).unwrap());
        let g = OrthogonalGroup::custom(vec![
            SquareMatrix::identity(2),
            SquareMatrix::diagonal(&[-1.0, 1.0]),
            SquareMatrix::diagonal(&[1.0, -1.0]),
            SquareMatrix::diagonal(&[-1.0, -1.0]),
        ])
        .unwrap();
        let r = moment_isotropy_check(&body, &g, 1e-12).unwrap();
        assert!(!r.pass);
        assert!(r.group_defect < 1e-15);
    }

    #[test]
    fn cube_dual_is_octahedron() {
        let cube = Polytope::hypercube(3, 1.0).unwrap();
        let dual = cube.polar_dual().unwrap();
        let oct = Polytope::cross_polytope(3, 1.0).unwrap();
        assert!(vertex_set_distance(dual.vertices(), oct.vertices()) < 1e-14);
        // general halfspace path on an untagged cube
        let generic = Polytope::from_points(cube.vertices()).unwrap();
        let dual2 = generic.polar_dual().unwrap();
        assert!(vertex_set_distance(dual2.vertices(), oct.vertices()) < 1e-12);
    }

    #[test]
    fn square_dual_is_rotated_square() {
        let sq = Polytope::from_points(&[vec![1.0, 1.0], vec![-1.0, 1.0], vec![-1.0, -1.0], vec![1.0, -1.0]]).unwrap();
        let dual = sq.polar_dual().unwrap();
        let want = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0], vec![0.0, -1.0]];
        assert!(vertex_set_distance(dual.vertices(), &want) < 1e-14);
    }

    #[test]
    fn ball_dual_radius() {
        let b = Ellipsoid::ball(3, 2.5).unwrap().polar_dual().unwrap();
        for a in b.semi_axes() {
            assert!((a - 0.4).abs() < 1e-14);
        }
    }

    #[test]
    fn simplex_dual_named_matches_generic() {
        let s = Polytope::regular_simplex(3).unwrap();
        let named = s.polar_dual().unwrap();
        let generic = Polytope::from_points(s.vertices()).unwrap().polar_dual().unwrap();
        assert!(vertex_set_distance(named.vertices(), generic.vertices()) < 1e-12);
    }

    #[test]
    fn origin_outside_is_rejected() {
        let p = Polytope::standard_simplex(2).unwrap();
        assert!(matches!(p.polar_dual(), Err(Error::OriginNotInterior { .. })));
    }

    #[test]
    fn polygon_isotropy() {
        for n in [3usize, 5, 8] {
            let body = Body::from(Polytope::regular_polygon(n, 1.0).unwrap());
            let r = moment_isotropy_check(&body, &polygon_group(n).unwrap(), 1e-12).unwrap();
            assert!(r.pass, "{n}: {r:?}");
        }
    }
}
