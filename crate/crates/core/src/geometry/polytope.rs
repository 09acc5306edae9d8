use crate::error::{Error, Result};
use crate::linalg::{dot, norm, SquareMatrix};
use crate::symmetry::permutations;

/// Tolerance for facet incidence and feasibility, relative to the body size.
pub(crate) const INCIDENCE_TOL: f64 = 1e-10;
/// Points closer than this (relative) are merged.
pub(crate) const MERGE_RADIUS: f64 = 1e-9;

/// Supporting halfspace `normal . x <= offset` with unit outward normal.
///
/// `vertices` lists the incident vertex indices; in three dimensions they are
/// in counter-clockwise order seen from outside, in two dimensions they are
/// the edge endpoints in counter-clockwise order.
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
    pub vertices: Vec<usize>,
}

/// Simplicial decomposition. The first `vertices.len()` points are the
/// polytope vertices; any further points are interior helpers (body centre,
/// facet centres).
#[derive(Clone, Debug)]
pub struct Triangulation {
    pub points: Vec<Vec<f64>>,
    pub cells: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum NamedKind {
    /// `[-1, 1]^d`
    Hypercube,
    /// `conv{+-e_i}`
    CrossPolytope,
    /// unit-edge regular simplex centred at the origin
    Simplex,
}

/// Linear image `transform(canonical)` of a named solid; lets duals and
/// triangulations be produced in any dimension.
#[derive(Clone, Debug)]
pub(crate) struct Named {
    pub kind: NamedKind,
    pub transform: SquareMatrix,
}

/// Convex polytope stored as a vertex list with derived facets and a
/// simplicial decomposition.
#[derive(Clone, Debug)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
    triangulation: Triangulation,
    named: Option<Named>,
}

/// Vertices of the unit-edge regular simplex in `R^d`, centred at the origin.
///
/// Built from the standard basis of `R^{d+1}` expressed in the Helmert basis
/// of the hyperplane `sum x = 0`, then scaled from edge `sqrt 2` to 1.
pub fn regular_simplex_vertices(d: usize) -> Vec<Vec<f64>> {
    (0..=d)
        .map(|i| {
            (1..=d)
                .map(|k| {
                    // u_k = (1,..,1,-k,0,..)/sqrt(k(k+1)) with k leading ones
                    let kf = k as f64;
                    let ui = if i < k {
                        1.0
                    } else if i == k {
                        -kf
                    } else {
                        0.0
                    };
                    ui / (kf * (kf + 1.0)).sqrt() / std::f64::consts::SQRT_2
                })
                .collect()
        })
        .collect()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale_of(points: &[Vec<f64>]) -> f64 {
    points
        .iter()
        .flat_map(|p| p.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE)
}

fn dedupe(points: &[Vec<f64>], radius: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| norm(&sub(p, q)) <= radius) {
            out.push(p.clone());
        }
    }
    out
}

impl Polytope {
    /// Convex hull of `points` in two or three dimensions. Interior and
    /// non-extreme boundary points are dropped.
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::DegenerateBody("no points".into()))?;
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::DegenerateBody("mixed point dimensions".into()));
        }
        match dim {
            2 => Self::hull_2d(points),
            3 => Self::hull_3d(points),
            _ => Err(Error::Unsupported(format!(
                "general polytopes in dimension {dim}; use a named solid"
            ))),
        }
    }

    /// Simplex with the given `d + 1` vertices, any dimension.
    pub fn simplex(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let d = vertices.len().saturating_sub(1);
        if d < 1 || vertices.iter().any(|v| v.len() != d) {
            return Err(Error::DegenerateBody("simplex needs d+1 points in R^d".into()));
        }
        let facets = simplex_facets(&vertices)?;
        let triangulation = Triangulation {
            points: vertices.clone(),
            cells: vec![(0..=d).collect()],
        };
        Ok(Self {
            dim: d,
            vertices,
            facets,
            triangulation,
            named: None,
        })
    }

    /// Polytope `{x : a_i . x <= b_i}` in two or three dimensions, by
    /// brute-force enumeration of pairs/triples of constraints.
    pub fn from_halfspaces(normals: &[Vec<f64>], offsets: &[f64]) -> Result<Self> {
        assert_eq!(normals.len(), offsets.len());
        let dim = normals
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::DegenerateBody("no halfspaces".into()))?;
        if !(2..=3).contains(&dim) {
            return Err(Error::Unsupported(format!("halfspace enumeration in dimension {dim}")));
        }
        let m = normals.len();
        let scale = offsets.iter().fold(0.0_f64, |a, b| a.max(b.abs())).max(1e-300);
        let mut candidates = Vec::new();
        let mut try_system = |idx: &[usize]| {
            let rows: Vec<Vec<f64>> = idx.iter().map(|&i| normals[i].clone()).collect();
            let a = SquareMatrix::from_rows(&rows).unwrap();
            if let Ok(inv) = a.invert() {
                let b: Vec<f64> = idx.iter().map(|&i| offsets[i]).collect();
                let x = inv.mul_vec(&b);
                let feasible = normals
                    .iter()
                    .zip(offsets)
                    .all(|(n, &o)| dot(n, &x) <= o + INCIDENCE_TOL * scale.max(norm(n) * norm(&x)));
                if feasible {
                    candidates.push(x);
                }
            }
        };
        if dim == 2 {
            for i in 0..m {
                for j in (i + 1)..m {
                    try_system(&[i, j]);
                }
            }
        } else {
            for i in 0..m {
                for j in (i + 1)..m {
                    for k in (j + 1)..m {
                        try_system(&[i, j, k]);
                    }
                }
            }
        }
        if candidates.len() < dim + 1 {
            return Err(Error::DegenerateBody("halfspaces do not bound a full-dimensional body".into()));
        }
        let merged = dedupe(&candidates, MERGE_RADIUS * scale_of(&candidates));
        Self::from_points(&merged)
    }

    fn hull_2d(points: &[Vec<f64>]) -> Result<Self> {
        let scale = scale_of(points);
        let mut pts = dedupe(points, MERGE_RADIUS * scale);
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        if pts.len() < 3 {
            return Err(Error::DegenerateBody("fewer than three distinct points".into()));
        }
        let turn = |o: &[f64], a: &[f64], b: &[f64]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
        let eps = INCIDENCE_TOL * scale * scale;
        let mut lower: Vec<Vec<f64>> = Vec::new();
        for p in &pts {
            while lower.len() >= 2 && turn(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps {
                lower.pop();
            }
            lower.push(p.clone());
        }
        let mut upper: Vec<Vec<f64>> = Vec::new();
        for p in pts.iter().rev() {
            while upper.len() >= 2 && turn(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps {
                upper.pop();
            }
            upper.push(p.clone());
        }
        lower.pop();
        upper.pop();
        lower.extend(upper);
        let hull = lower;
        if hull.len() < 3 {
            return Err(Error::DegenerateBody("points are collinear".into()));
        }
        Ok(Self::from_ccw_polygon(hull))
    }

    /// Builds a polygon from vertices already in counter-clockwise convex
    /// position.
    fn from_ccw_polygon(vertices: Vec<Vec<f64>>) -> Self {
        let n = vertices.len();
        let facets = (0..n)
            .map(|i| {
                let (p, q) = (&vertices[i], &vertices[(i + 1) % n]);
                let e = sub(q, p);
                let len = norm(&e);
                let normal = vec![e[1] / len, -e[0] / len];
                let offset = dot(&normal, p);
                Facet {
                    normal,
                    offset,
                    vertices: vec![i, (i + 1) % n],
                }
            })
            .collect();
        let mut poly = Self {
            dim: 2,
            vertices,
            facets,
            triangulation: Triangulation {
                points: vec![],
                cells: vec![],
            },
            named: None,
        };
        poly.triangulation = poly.fan_triangulation();
        poly
    }

    fn hull_3d(points: &[Vec<f64>]) -> Result<Self> {
        let scale = scale_of(points);
        let pts = dedupe(points, MERGE_RADIUS * scale);
        let n = pts.len();
        if n < 4 {
            return Err(Error::DegenerateBody("fewer than four distinct points".into()));
        }
        let tol = INCIDENCE_TOL * scale;
        let mut planes: Vec<(Vec<f64>, f64)> = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                for k in (j + 1)..n {
                    let c = cross(&sub(&pts[j], &pts[i]), &sub(&pts[k], &pts[i]));
                    let len = norm(&c);
                    if len <= 1e-12 * scale * scale {
                        continue;
                    }
                    let nrm: Vec<f64> = c.iter().map(|v| v / len).collect();
                    let off = dot(&nrm, &pts[i]);
                    let (mut above, mut below) = (false, false);
                    for p in &pts {
                        let s = dot(&nrm, p) - off;
                        above |= s > tol;
                        below |= s < -tol;
                        if above && below {
                            break;
                        }
                    }
                    let plane = match (above, below) {
                        (false, true) => (nrm, off),
                        (true, false) => (nrm.iter().map(|v| -v).collect(), -off),
                        (false, false) => {
                            return Err(Error::DegenerateBody("points are coplanar".into()));
                        }
                        (true, true) => continue,
                    };
                    let dup = planes.iter().any(|(q, o)| {
                        norm(&sub(q, &plane.0)) <= 1e-9 && (o - plane.1).abs() <= 1e-9 * scale
                    });
                    if !dup {
                        planes.push(plane);
                    }
                }
            }
        }
        // keep only extreme points: incident normals of full rank
        let vertices: Vec<Vec<f64>> = pts
            .iter()
            .filter(|p| {
                let inc: Vec<&Vec<f64>> = planes
                    .iter()
                    .filter(|(nrm, off)| (dot(nrm, p) - off).abs() <= tol)
                    .map(|(nrm, _)| nrm)
                    .collect();
                rank3(&inc)
            })
            .cloned()
            .collect();
        let facets = planes
            .into_iter()
            .map(|(normal, offset)| {
                let inc: Vec<usize> = (0..vertices.len())
                    .filter(|&v| (dot(&normal, &vertices[v]) - offset).abs() <= tol)
                    .collect();
                let ordered = order_ccw(&vertices, &inc, &normal);
                Facet {
                    normal,
                    offset,
                    vertices: ordered,
                }
            })
            .collect();
        let mut poly = Self {
            dim: 3,
            vertices,
            facets,
            triangulation: Triangulation {
                points: vec![],
                cells: vec![],
            },
            named: None,
        };
        poly.triangulation = poly.fan_triangulation();
        Ok(poly)
    }

    /// Fan from the vertex average. Three-dimensional facets with more than
    /// three vertices are fanned from their own vertex average.
    fn fan_triangulation(&self) -> Triangulation {
        let nv = self.vertices.len();
        if nv == self.dim + 1 {
            return Triangulation {
                points: self.vertices.clone(),
                cells: vec![(0..nv).collect()],
            };
        }
        let mut points = self.vertices.clone();
        let centre = average(&self.vertices, &(0..nv).collect::<Vec<_>>());
        points.push(centre);
        let c = nv;
        let mut cells = Vec::new();
        for f in &self.facets {
            match self.dim {
                2 => cells.push(vec![c, f.vertices[0], f.vertices[1]]),
                3 if f.vertices.len() == 3 => {
                    cells.push(vec![c, f.vertices[0], f.vertices[1], f.vertices[2]]);
                }
                3 => {
                    let fc = points.len();
                    points.push(average(&self.vertices, &f.vertices));
                    let k = f.vertices.len();
                    for i in 0..k {
                        cells.push(vec![c, fc, f.vertices[i], f.vertices[(i + 1) % k]]);
                    }
                }
                _ => unreachable!("fan triangulation only in 2-D/3-D"),
            }
        }
        Triangulation { points, cells }
    }

    /// Regular `n`-gon with circumradius `r`, first vertex on the positive
    /// first axis.
    pub fn regular_polygon(n: usize, r: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::OutOfRange {
                what: "polygon sides",
                value: n as i64,
                allowed: ">= 3",
            });
        }
        let verts = (0..n)
            .map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                vec![r * a.cos(), r * a.sin()]
            })
            .collect();
        Ok(Self::from_ccw_polygon(verts))
    }

    /// `[-h, h]^d`.
    pub fn hypercube(d: usize, half_width: f64) -> Result<Self> {
        Self::named(NamedKind::Hypercube, SquareMatrix::identity(d).scale(half_width))
    }

    /// Unit-volume cube `[-1/2, 1/2]^d`.
    pub fn unit_cube(d: usize) -> Result<Self> {
        Self::hypercube(d, 0.5)
    }

    /// Centred box with the given side lengths.
    pub fn centered_box(sides: &[f64]) -> Result<Self> {
        let half: Vec<f64> = sides.iter().map(|s| 0.5 * s).collect();
        Self::named(NamedKind::Hypercube, SquareMatrix::diagonal(&half))
    }

    /// `conv{+-r e_i}`.
    pub fn cross_polytope(d: usize, r: f64) -> Result<Self> {
        Self::named(NamedKind::CrossPolytope, SquareMatrix::identity(d).scale(r))
    }

    /// Unit-edge regular simplex centred at the origin.
    pub fn regular_simplex(d: usize) -> Result<Self> {
        Self::named(NamedKind::Simplex, SquareMatrix::identity(d))
    }

    /// `conv{0, e_1, .., e_d}`.
    pub fn standard_simplex(d: usize) -> Result<Self> {
        let mut verts = vec![vec![0.0; d]];
        for i in 0..d {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            verts.push(e);
        }
        Self::simplex(verts)
    }

    pub(crate) fn named(kind: NamedKind, transform: SquareMatrix) -> Result<Self> {
        let d = transform.dim();
        if d < 2 {
            return Err(Error::DegenerateBody("dimension must be at least 2".into()));
        }
        transform.invert()?;
        let canonical = canonical_vertices(kind, d);
        let vertices: Vec<Vec<f64>> = canonical.iter().map(|v| transform.mul_vec(v)).collect();
        let mut poly = if d <= 3 && kind != NamedKind::Simplex {
            Self::from_points(&vertices)?
        } else if kind == NamedKind::Simplex {
            Self::simplex(vertices)?
        } else {
            let (points, cells) = canonical_cells(kind, d);
            let points = points.iter().map(|p| transform.mul_vec(p)).collect();
            let mut p = Self {
                dim: d,
                vertices,
                facets: vec![],
                triangulation: Triangulation { points, cells },
                named: None,
            };
            p.facets = canonical_facets(kind, d)
                .into_iter()
                .map(|(n, b)| p.mapped_facet(&n, b, &transform))
                .collect::<Result<_>>()?;
            p
        };
        poly.named = Some(Named { kind, transform });
        Ok(poly)
    }

    fn mapped_facet(&self, n: &[f64], b: f64, t: &SquareMatrix) -> Result<Facet> {
        let m = t.inverse_transpose()?.mul_vec(n);
        let len = norm(&m);
        let normal: Vec<f64> = m.iter().map(|v| v / len).collect();
        let offset = b / len;
        let tol = INCIDENCE_TOL * scale_of(&self.vertices);
        let vertices = (0..self.vertices.len())
            .filter(|&v| (dot(&normal, &self.vertices[v]) - offset).abs() <= tol)
            .collect();
        Ok(Facet {
            normal,
            offset,
            vertices,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub(crate) fn named_kind(&self) -> Option<&Named> {
        self.named.as_ref()
    }

    /// Smallest facet offset: the distance from the origin to the boundary
    /// (negative when the origin lies outside).
    pub fn origin_margin(&self) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn size(&self) -> f64 {
        scale_of(&self.vertices)
    }

    /// Image under `T` with the same vertex order and combinatorics.
    pub fn map(&self, t: &SquareMatrix) -> Result<Self> {
        if t.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: t.dim(),
            });
        }
        let it = t.inverse_transpose()?;
        let flip = t.det() < 0.0;
        let vertices = self.vertices.iter().map(|v| t.mul_vec(v)).collect();
        let facets = self
            .facets
            .iter()
            .map(|f| {
                let m = it.mul_vec(&f.normal);
                let len = norm(&m);
                let mut verts = f.vertices.clone();
                if flip && self.dim == 3 {
                    verts.reverse();
                }
                if flip && self.dim == 2 {
                    verts.reverse();
                }
                Facet {
                    normal: m.iter().map(|v| v / len).collect(),
                    offset: f.offset / len,
                    vertices: verts,
                }
            })
            .collect();
        let triangulation = Triangulation {
            points: self.triangulation.points.iter().map(|p| t.mul_vec(p)).collect(),
            cells: self.triangulation.cells.clone(),
        };
        let named = self.named.as_ref().map(|n| Named {
            kind: n.kind,
            transform: t.matmul(&n.transform),
        });
        let mut out = Self {
            dim: self.dim,
            vertices,
            facets,
            triangulation,
            named,
        };
        if flip && self.dim == 2 {
            // keep counter-clockwise vertex order
            out = out.reversed_polygon();
        }
        Ok(out)
    }

    fn reversed_polygon(&self) -> Self {
        let n = self.vertices.len();
        let verts: Vec<Vec<f64>> = (0..n).rev().map(|i| self.vertices[i].clone()).collect();
        let mut p = Self::from_ccw_polygon(verts);
        p.named = self.named.clone();
        // reuse the mapped helper points so the triangulation stays the image
        // of the original one
        let remap = |i: usize| if i < n { n - 1 - i } else { i };
        p.triangulation = Triangulation {
            points: {
                let mut pts = p.vertices.clone();
                pts.extend(self.triangulation.points[n..].iter().cloned());
                pts
            },
            cells: self
                .triangulation
                .cells
                .iter()
                .map(|c| c.iter().map(|&i| remap(i)).collect())
                .collect(),
        };
        p
    }

    /// Checks the stored invariants: every vertex satisfies every facet
    /// inequality, every facet carries at least `d` vertices, and each
    /// vertex is extreme.
    pub fn validate(&self) -> Result<()> {
        let tol = INCIDENCE_TOL * self.size();
        for f in &self.facets {
            if f.vertices.len() < self.dim {
                return Err(Error::DegenerateBody("facet supports fewer than d vertices".into()));
            }
            for v in &self.vertices {
                if dot(&f.normal, v) > f.offset + tol {
                    return Err(Error::DegenerateBody("vertex violates a facet inequality".into()));
                }
            }
        }
        for (i, _) in self.vertices.iter().enumerate() {
            let inc = self.facets.iter().filter(|f| f.vertices.contains(&i)).count();
            if inc < self.dim {
                return Err(Error::DegenerateBody(format!("vertex {i} is not extreme")));
            }
        }
        Ok(())
    }
}

fn average(points: &[Vec<f64>], idx: &[usize]) -> Vec<f64> {
    let d = points[0].len();
    let mut c = vec![0.0; d];
    for &i in idx {
        for (ck, pk) in c.iter_mut().zip(&points[i]) {
            *ck += pk;
        }
    }
    c.iter().map(|v| v / idx.len() as f64).collect()
}

fn rank3(normals: &[&Vec<f64>]) -> bool {
    for a in 0..normals.len() {
        for b in (a + 1)..normals.len() {
            let ab = cross(normals[a], normals[b]);
            for c in (b + 1)..normals.len() {
                if dot(&ab, normals[c]).abs() > 1e-9 {
                    return true;
                }
            }
        }
    }
    false
}

fn order_ccw(vertices: &[Vec<f64>], idx: &[usize], normal: &[f64]) -> Vec<usize> {
    let c = average(vertices, idx);
    let u = {
        let r = sub(&vertices[idx[0]], &c);
        let l = norm(&r);
        r.iter().map(|v| v / l).collect::<Vec<_>>()
    };
    let w = cross(normal, &u);
    let mut keyed: Vec<(f64, usize)> = idx
        .iter()
        .map(|&i| {
            let r = sub(&vertices[i], &c);
            (dot(&r, &w).atan2(dot(&r, &u)), i)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
    keyed.into_iter().map(|(_, i)| i).collect()
}

fn simplex_facets(vertices: &[Vec<f64>]) -> Result<Vec<Facet>> {
    let d = vertices.len() - 1;
    // barycentric map: lambda = B^{-1} [x; 1]
    let mut b = SquareMatrix::zeros(d + 1);
    for (j, v) in vertices.iter().enumerate() {
        for i in 0..d {
            b[(i, j)] = v[i];
        }
        b[(d, j)] = 1.0;
    }
    let inv = b
        .invert()
        .map_err(|_| Error::DegenerateBody("simplex vertices are affinely dependent".into()))?;
    Ok((0..=d)
        .map(|i| {
            let g: Vec<f64> = (0..d).map(|k| inv[(i, k)]).collect();
            let c = inv[(i, d)];
            let len = norm(&g);
            Facet {
                normal: g.iter().map(|v| -v / len).collect(),
                offset: c / len,
                vertices: (0..=d).filter(|&j| j != i).collect(),
            }
        })
        .collect())
}

fn canonical_vertices(kind: NamedKind, d: usize) -> Vec<Vec<f64>> {
    match kind {
        NamedKind::Hypercube => (0..(1usize << d))
            .map(|bits| {
                (0..d)
                    .map(|i| if bits & (1 << i) != 0 { 1.0 } else { -1.0 })
                    .collect()
            })
            .collect(),
        NamedKind::CrossPolytope => {
            let mut out = Vec::with_capacity(2 * d);
            for i in 0..d {
                for s in [1.0, -1.0] {
                    let mut e = vec![0.0; d];
                    e[i] = s;
                    out.push(e);
                }
            }
            out
        }
        NamedKind::Simplex => regular_simplex_vertices(d),
    }
}

/// Closed-form triangulations used above three dimensions.
fn canonical_cells(kind: NamedKind, d: usize) -> (Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let verts = canonical_vertices(kind, d);
    match kind {
        NamedKind::Hypercube => {
            // Kuhn: walk from (-1,..,-1) flipping coordinates in permutation order
            let cells = permutations(d)
                .into_iter()
                .map(|p| {
                    let mut bits = 0usize;
                    let mut cell = vec![0usize];
                    for &axis in &p {
                        bits |= 1 << axis;
                        cell.push(bits);
                    }
                    cell
                })
                .collect();
            (verts, cells)
        }
        NamedKind::CrossPolytope => {
            let mut points = verts;
            let origin = points.len();
            points.push(vec![0.0; d]);
            let cells = (0..(1usize << d))
                .map(|signs| {
                    let mut cell = vec![origin];
                    for i in 0..d {
                        cell.push(2 * i + usize::from(signs & (1 << i) != 0));
                    }
                    cell
                })
                .collect();
            (points, cells)
        }
        NamedKind::Simplex => (verts, vec![(0..=d).collect()]),
    }
}

fn canonical_facets(kind: NamedKind, d: usize) -> Vec<(Vec<f64>, f64)> {
    match kind {
        NamedKind::Hypercube => canonical_vertices(NamedKind::CrossPolytope, d)
            .into_iter()
            .map(|n| (n, 1.0))
            .collect(),
        NamedKind::CrossPolytope => {
            let s = (d as f64).sqrt();
            canonical_vertices(NamedKind::Hypercube, d)
                .into_iter()
                .map(|n| (n.iter().map(|v| v / s).collect(), 1.0 / s))
                .collect()
        }
        NamedKind::Simplex => {
            let verts = regular_simplex_vertices(d);
            let r = norm(&verts[0]);
            verts
                .iter()
                .map(|v| (v.iter().map(|x| -x / r).collect(), r / d as f64))
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_simplex_has_unit_edges_and_centre() {
        for d in 2..=6 {
            let v = regular_simplex_vertices(d);
            for i in 0..=d {
                for j in (i + 1)..=d {
                    assert!((norm(&sub(&v[i], &v[j])) - 1.0).abs() < 1e-14);
                }
            }
            let c = average(&v, &(0..=d).collect::<Vec<_>>());
            assert!(norm(&c) < 1e-15);
        }
    }

    #[test]
    fn hull_drops_interior_points() {
        let pts = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
            vec![0.5, 0.0],
        ];
        let p = Polytope::from_points(&pts).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.facets().len(), 4);
        p.validate().unwrap();
    }

    #[test]
    fn hull_3d_cube_with_extra_points() {
        let mut pts = canonical_vertices(NamedKind::Hypercube, 3);
        pts.push(vec![0.0, 0.0, 0.0]);
        pts.push(vec![1.0, 0.0, 0.0]);
        pts.push(vec![1.0, 1.0, 0.0]);
        let p = Polytope::from_points(&pts).unwrap();
        assert_eq!(p.vertices().len(), 8);
        assert_eq!(p.facets().len(), 6);
        assert!(p.facets().iter().all(|f| f.vertices.len() == 4));
        p.validate().unwrap();
        // 6 facets x 4 fan triangles
        assert_eq!(p.triangulation().cells.len(), 24);
    }

    #[test]
    fn coplanar_points_rejected() {
        let pts = vec![
            vec![0.0, 0.0, 0.0],
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
        ];
        assert!(Polytope::from_points(&pts).is_err());
    }

    #[test]
    fn halfspaces_of_square() {
        let normals = vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]];
        let p = Polytope::from_halfspaces(&normals, &[1.0; 4]).unwrap();
        assert_eq!(p.vertices().len(), 4);
        for v in p.vertices() {
            assert!((v[0].abs() - 1.0).abs() < 1e-15 && (v[1].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn named_solids_in_high_dimension_validate() {
        for d in 4..=5 {
            Polytope::hypercube(d, 1.0).unwrap().validate().unwrap();
            Polytope::cross_polytope(d, 1.0).unwrap().validate().unwrap();
            Polytope::regular_simplex(d).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn map_with_reflection_keeps_ccw_polygon() {
        let p = Polytope::regular_polygon(5, 1.0).unwrap();
        let q = p.map(&SquareMatrix::diagonal(&[1.0, -1.0])).unwrap();
        q.validate().unwrap();
        let v = q.vertices();
        let area2: f64 = (0..v.len())
            .map(|i| {
                let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        assert!(area2 > 0.0);
    }
}
