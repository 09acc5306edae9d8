use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::geometry::{Ellipsoid, Polytope};
use crate::linalg::{dot, SquareMatrix};

pub const MAX_LEVEL_2D: usize = 8;
pub const MAX_LEVEL_3D: usize = 5;
/// Number of sides of the inscribed polygon that starts an ellipse mesh.
pub const ELLIPSE_COARSE_SIDES: usize = 16;

/// Conforming simplicial mesh with positively oriented cells and outward
/// oriented boundary facets.
#[derive(Clone, Debug)]
pub struct SimplicialMesh {
    dim: usize,
    vertices: Vec<Vec<f64>>,
    cells: Vec<Vec<usize>>,
    boundary: Vec<Vec<usize>>,
    level: usize,
}

fn signed_volume(points: &[&[f64]]) -> f64 {
    let d = points.len() - 1;
    let cols: Vec<Vec<f64>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(points[0]).map(|(a, b)| a - b).collect())
        .collect();
    let fact: f64 = (1..=d).map(|k| k as f64).product();
    SquareMatrix::from_columns(&cols).expect("square").det() / fact
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl SimplicialMesh {
    /// Builds a mesh from points and cells, orienting cells positively and
    /// extracting the boundary. Unreferenced points are kept.
    pub fn new(dim: usize, vertices: Vec<Vec<f64>>, mut cells: Vec<Vec<usize>>, level: usize) -> Result<Self> {
        let scale = vertices
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        for (ci, cell) in cells.iter_mut().enumerate() {
            if cell.len() != dim + 1 {
                return Err(Error::InvalidInput(format!("cell {ci} has {} vertices", cell.len())));
            }
            let pts: Vec<&[f64]> = cell.iter().map(|&i| vertices[i].as_slice()).collect();
            let v = signed_volume(&pts);
            if v.abs() <= 1e-14 * scale.powi(dim as i32) {
                return Err(Error::DegenerateCell { cell: ci, volume: v });
            }
            if v < 0.0 {
                cell.swap(0, 1);
            }
        }
        let boundary = boundary_facets(dim, &vertices, &cells);
        Ok(Self {
            dim,
            vertices,
            cells,
            boundary,
            level,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn boundary(&self) -> &[Vec<usize>] {
        &self.boundary
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn cell_volume(&self, c: usize) -> f64 {
        let pts: Vec<&[f64]> = self.cells[c].iter().map(|&i| self.vertices[i].as_slice()).collect();
        signed_volume(&pts)
    }

    pub fn volume(&self) -> f64 {
        (0..self.cells.len()).map(|c| self.cell_volume(c)).sum()
    }

    /// Longest edge.
    pub fn mesh_size(&self) -> f64 {
        let mut h2 = 0.0_f64;
        for cell in &self.cells {
            for a in 0..cell.len() {
                for b in (a + 1)..cell.len() {
                    h2 = h2.max(dist2(&self.vertices[cell[a]], &self.vertices[cell[b]]));
                }
            }
        }
        h2.sqrt()
    }

    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut on = vec![false; self.vertices.len()];
        for f in &self.boundary {
            for &v in f {
                on[v] = true;
            }
        }
        on
    }

    /// Image under a linear map with the same connectivity.
    pub fn map(&self, t: &SquareMatrix) -> Result<Self> {
        let vertices = self.vertices.iter().map(|p| t.mul_vec(p)).collect();
        Self::new(self.dim, vertices, self.cells.clone(), self.level)
    }

    /// One level of uniform red refinement. Midpoints of boundary edges are
    /// passed through `snap`.
    pub fn refine(&self, snap: Option<&dyn Fn(&[f64]) -> Vec<f64>>) -> Result<Self> {
        let mut vertices = self.vertices.clone();
        let mut mids: HashMap<(usize, usize), usize> = HashMap::new();
        let boundary_edges: HashSet<(usize, usize)> = self
            .boundary
            .iter()
            .flat_map(|f| {
                let mut e = Vec::new();
                for a in 0..f.len() {
                    for b in (a + 1)..f.len() {
                        e.push((f[a].min(f[b]), f[a].max(f[b])));
                    }
                }
                e
            })
            .collect();
        let mut mid = |a: usize, b: usize, vertices: &mut Vec<Vec<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            *mids.entry(key).or_insert_with(|| {
                let mut p: Vec<f64> = vertices[a].iter().zip(&vertices[b]).map(|(x, y)| 0.5 * (x + y)).collect();
                if let Some(s) = snap {
                    if boundary_edges.contains(&key) {
                        p = s(&p);
                    }
                }
                vertices.push(p);
                vertices.len() - 1
            })
        };
        let mut cells = Vec::with_capacity(self.cells.len() * if self.dim == 2 { 4 } else { 8 });
        for c in &self.cells {
            if self.dim == 2 {
                let (a, b, cc) = (c[0], c[1], c[2]);
                let ab = mid(a, b, &mut vertices);
                let bc = mid(b, cc, &mut vertices);
                let ca = mid(cc, a, &mut vertices);
                cells.push(vec![a, ab, ca]);
                cells.push(vec![ab, b, bc]);
                cells.push(vec![ca, bc, cc]);
                cells.push(vec![ab, bc, ca]);
            } else {
                let m01 = mid(c[0], c[1], &mut vertices);
                let m02 = mid(c[0], c[2], &mut vertices);
                let m03 = mid(c[0], c[3], &mut vertices);
                let m12 = mid(c[1], c[2], &mut vertices);
                let m13 = mid(c[1], c[3], &mut vertices);
                let m23 = mid(c[2], c[3], &mut vertices);
                cells.push(vec![c[0], m01, m02, m03]);
                cells.push(vec![m01, c[1], m12, m13]);
                cells.push(vec![m02, m12, c[2], m23]);
                cells.push(vec![m03, m13, m23, c[3]]);
                // octahedron: three diagonals with the cycle of the other four
                let options = [
                    ((m01, m23), [m02, m03, m13, m12]),
                    ((m02, m13), [m01, m03, m23, m12]),
                    ((m03, m12), [m01, m02, m23, m13]),
                ];
                let lens: Vec<f64> = options
                    .iter()
                    .map(|((p, q), _)| dist2(&vertices[*p], &vertices[*q]))
                    .collect();
                let shortest = lens.iter().cloned().fold(f64::INFINITY, f64::min);
                let pick = lens
                    .iter()
                    .position(|&l| l <= shortest * (1.0 + 1e-10))
                    .expect("nonempty");
                let ((p, q), ring) = options[pick];
                for i in 0..4 {
                    cells.push(vec![p, q, ring[i], ring[(i + 1) % 4]]);
                }
            }
        }
        Self::new(self.dim, vertices, cells, self.level + 1)
    }

    /// OFF text: all triangles in 2-D, boundary triangles in 3-D.
    pub fn to_off(&self) -> String {
        let faces: &[Vec<usize>] = if self.dim == 2 { &self.cells } else { &self.boundary };
        let mut s = String::new();
        writeln!(s, "OFF").unwrap();
        writeln!(s, "{} {} 0", self.vertices.len(), faces.len()).unwrap();
        for p in &self.vertices {
            let z = if self.dim == 3 { p[2] } else { 0.0 };
            writeln!(s, "{:.16e} {:.16e} {:.16e}", p[0], p[1], z).unwrap();
        }
        for f in faces {
            let idx: Vec<String> = f.iter().map(usize::to_string).collect();
            writeln!(s, "{} {}", f.len(), idx.join(" ")).unwrap();
        }
        s
    }
}

/// Facets that belong to exactly one cell, ordered so the facet normal points
/// away from the cell.
fn boundary_facets(dim: usize, vertices: &[Vec<f64>], cells: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut count: HashMap<Vec<usize>, (usize, Vec<usize>, usize)> = HashMap::new();
    let mut order = Vec::new();
    for cell in cells {
        for skip in 0..=dim {
            let face: Vec<usize> = (0..=dim).filter(|&k| k != skip).map(|k| cell[k]).collect();
            let mut key = face.clone();
            key.sort_unstable();
            let e = count.entry(key.clone()).or_insert_with(|| {
                order.push(key.clone());
                (0, face, cell[skip])
            });
            e.0 += 1;
        }
    }
    // outward when sign det[f1 - f0, .., opposite - f0] = (-1)^d
    let want = if dim % 2 == 0 { 1.0 } else { -1.0 };
    order
        .into_iter()
        .filter_map(|key| {
            let (n, mut face, opp) = count.remove(&key).unwrap();
            if n != 1 {
                return None;
            }
            let mut pts: Vec<&[f64]> = face.iter().map(|&i| vertices[i].as_slice()).collect();
            pts.push(vertices[opp].as_slice());
            if signed_volume(&pts) * want < 0.0 {
                face.swap(0, 1);
            }
            Some(face)
        })
        .collect()
}

fn level_limit(dim: usize) -> usize {
    if dim == 2 {
        MAX_LEVEL_2D
    } else {
        MAX_LEVEL_3D
    }
}

fn check_level(dim: usize, level: usize) -> Result<()> {
    if level > level_limit(dim) {
        return Err(Error::BudgetExceeded(format!(
            "level {level} exceeds the {dim}-D limit {}",
            level_limit(dim)
        )));
    }
    Ok(())
}

/// Coarse mesh from the body's triangulation, refined `level` times.
pub fn mesh_domain(body: &Polytope, level: usize) -> Result<SimplicialMesh> {
    let dim = body.dim();
    if !(2..=3).contains(&dim) {
        return Err(Error::Unsupported(format!("meshing in dimension {dim}")));
    }
    check_level(dim, level)?;
    let tri = body.triangulation();
    let mut mesh = SimplicialMesh::new(dim, tri.points.clone(), tri.cells.clone(), 0)?;
    for _ in 0..level {
        mesh = mesh.refine(None)?;
    }
    Ok(mesh)
}

/// Planar ellipse meshed from an inscribed polygon whose new boundary
/// vertices are pushed onto the ellipse at every level.
pub fn mesh_ellipse(e: &Ellipsoid, level: usize) -> Result<SimplicialMesh> {
    if e.dim() != 2 {
        return Err(Error::Unsupported("curved meshes are planar only".into()));
    }
    check_level(2, level)?;
    let a = e.shape().clone();
    let project = move |p: &[f64]| -> Vec<f64> {
        let q = dot(p, &a.mul_vec(p)).sqrt();
        p.iter().map(|x| x / q).collect()
    };
    let n = ELLIPSE_COARSE_SIDES;
    let mut pts: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            project(&[t.cos(), t.sin()])
        })
        .collect();
    pts.push(vec![0.0, 0.0]);
    let cells = (0..n).map(|k| vec![n, k, (k + 1) % n]).collect();
    let mut mesh = SimplicialMesh::new(2, pts, cells, 0)?;
    for _ in 0..level {
        mesh = mesh.refine(Some(&project))?;
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn refinement_counts() {
        let tri = Polytope::standard_simplex(2).unwrap();
        assert_eq!(mesh_domain(&tri, 1).unwrap().cells().len(), 4);
        let tet = Polytope::standard_simplex(3).unwrap();
        let m = mesh_domain(&tet, 1).unwrap();
        assert_eq!(m.cells().len(), 8);
        assert!((m.volume() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn boundary_of_refined_square() {
        let sq = Polytope::unit_cube(2).unwrap();
        let m = mesh_domain(&sq, 2).unwrap();
        // 4 sides x 4 segments
        assert_eq!(m.boundary().len(), 16);
        let on = m.boundary_vertices();
        assert_eq!(on.iter().filter(|&&b| b).count(), 16);
    }

    #[test]
    fn boundary_facets_point_outward() {
        let cube = Polytope::unit_cube(3).unwrap();
        let m = mesh_domain(&cube, 1).unwrap();
        for f in m.boundary() {
            let p: Vec<&Vec<f64>> = f.iter().map(|&i| &m.vertices()[i]).collect();
            let u: Vec<f64> = (0..3).map(|k| p[1][k] - p[0][k]).collect();
            let v: Vec<f64> = (0..3).map(|k| p[2][k] - p[0][k]).collect();
            let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
            let c: Vec<f64> = (0..3).map(|k| (p[0][k] + p[1][k] + p[2][k]) / 3.0).collect();
            assert!(dot(&n, &c) > 0.0);
        }
    }

    #[test]
    fn level_budget() {
        let sq = Polytope::unit_cube(2).unwrap();
        assert!(matches!(mesh_domain(&sq, 9), Err(Error::BudgetExceeded(_))));
    }

    #[test]
    fn ellipse_vertices_on_boundary() {
        let e = Ellipsoid::from_axes(&[2.0, 1.0]).unwrap();
        let m = mesh_ellipse(&e, 2).unwrap();
        for (i, on) in m.boundary_vertices().iter().enumerate() {
            if *on {
                let p = &m.vertices()[i];
                assert!((p[0] * p[0] / 4.0 + p[1] * p[1] - 1.0).abs() < 1e-14);
            }
        }
        assert!(m.volume() < 2.0 * std::f64::consts::PI);
    }

    #[test]
    fn off_header() {
        let m = mesh_domain(&Polytope::standard_simplex(2).unwrap(), 1).unwrap();
        let off = m.to_off();
        assert!(off.starts_with("OFF\n6 4 0\n"));
    }
}
