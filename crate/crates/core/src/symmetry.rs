//! Finite orthogonal symmetry groups and the tight-frame identity.
//!
//! A group `G` of orthogonal matrices is irreducible when every nonzero orbit
//! `{U x : U in G}` spans `R^d`. For such groups the uniform average of
//! `|z U Y|^2` collapses to `|z|^2 |Y|_HS^2 / d`, and the same Schur argument
//! makes every `G`-invariant moment matrix a multiple of the identity. The
//! boundary forms at the bottom of the file carry the tangent-plane Jacobian
//! used by the Robin bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::regular_simplex_vertices;
use crate::linalg::{norm, RectMatrix, SquareMatrix};

/// Largest dimension for which hypercube and simplex groups are enumerated.
pub const MAX_GROUP_DIM: usize = 6;
/// Largest polygon order.
pub const MAX_POLYGON_SIDES: usize = 64;

const ORTHOGONALITY_TOL: f64 = 1e-12;
const RANK_THRESHOLD: f64 = 1e-8;
const RANDOM_ORBIT_PROBES: usize = 8;
const CHUNK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupLabel {
    Hypercube,
    Simplex,
    Polygon(usize),
    Custom,
}

/// Finite group of orthogonal matrices; averages use the counting measure.
#[derive(Clone, Debug)]
pub struct OrthogonalGroup {
    dim: usize,
    elements: Vec<SquareMatrix>,
    label: GroupLabel,
}

impl OrthogonalGroup {
    /// Wraps an explicit element list. Every element must be orthogonal and
    /// the identity must be present; closure is not checked here (see
    /// [`OrthogonalGroup::closure_defect`]).
    pub fn custom(elements: Vec<SquareMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .map(SquareMatrix::dim)
            .ok_or_else(|| Error::InvalidInput("empty group".into()))?;
        for u in &elements {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: u.dim(),
                });
            }
            if !u.is_orthogonal(ORTHOGONALITY_TOL) {
                return Err(Error::InvalidInput("group element is not orthogonal".into()));
            }
        }
        let id = SquareMatrix::identity(dim);
        if !elements.iter().any(|u| u.max_abs_diff(&id) <= ORTHOGONALITY_TOL) {
            return Err(Error::InvalidInput("group lacks the identity".into()));
        }
        Ok(Self {
            dim,
            elements,
            label: GroupLabel::Custom,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[SquareMatrix] {
        &self.elements
    }

    pub fn label(&self) -> GroupLabel {
        self.label
    }

    /// Index of the element matching `m` entrywise within `tol`.
    pub fn find(&self, m: &SquareMatrix, tol: f64) -> Option<usize> {
        self.elements.iter().position(|u| u.max_abs_diff(m) <= tol)
    }

    /// Largest distance from a product `U_i U_j` (random pairs) to the
    /// nearest group element. Zero up to rounding for a genuine group.
    pub fn closure_defect(&self, pairs: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst = 0.0_f64;
        for _ in 0..pairs {
            let a = &self.elements[rng.random_range(0..self.order())];
            let b = &self.elements[rng.random_range(0..self.order())];
            let p = a.matmul(b);
            let best = self
                .elements
                .iter()
                .map(|u| u.max_abs_diff(&p))
                .fold(f64::INFINITY, f64::min);
            worst = worst.max(best);
        }
        worst
    }

    /// Rank of the orbit `{U x}` judged by singular values above
    /// `1e-8 * sigma_max`.
    pub fn orbit_rank(&self, x: &[f64]) -> usize {
        let mut gram = SquareMatrix::zeros(self.dim);
        for u in &self.elements {
            let ux = u.mul_vec(x);
            for i in 0..self.dim {
                for j in 0..self.dim {
                    gram[(i, j)] += ux[i] * ux[j];
                }
            }
        }
        let sv: Vec<f64> = gram
            .sym_eigen()
            .map(|e| e.eigenvalues.iter().map(|l| l.max(0.0).sqrt()).collect())
            .unwrap_or_default();
        let top = sv.iter().copied().fold(0.0, f64::max);
        if top == 0.0 {
            return 0;
        }
        sv.iter().filter(|&&s| s > RANK_THRESHOLD * top).count()
    }

    /// Orbit-span test on the `d` basis vectors and eight pseudo-random
    /// directions.
    pub fn is_irreducible(&self) -> bool {
        let d = self.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(0x1dd_5eed);
        let mut probes: Vec<Vec<f64>> = (0..d)
            .map(|i| {
                let mut e = vec![0.0; d];
                e[i] = 1.0;
                e
            })
            .collect();
        for _ in 0..RANDOM_ORBIT_PROBES {
            probes.push((0..d).map(|_| rng.sample(StandardNormal)).collect());
        }
        probes.iter().all(|x| self.orbit_rank(x) == d)
    }

    /// `(1/|G|) sum_U |z U Y|^2` for a row vector `z` and a `d x m` matrix `Y`.
    pub fn frame_average(&self, z: &[f64], y: &RectMatrix) -> f64 {
        assert_eq!(z.len(), self.dim);
        assert_eq!(y.rows(), self.dim);
        let partial: Vec<f64> = self
            .elements
            .par_chunks(CHUNK)
            .map(|chunk| {
                let mut acc = 0.0;
                for u in chunk {
                    let zu = u.row_mul(z);
                    let zuy = y.row_mul(&zu);
                    acc += zuy.iter().map(|v| v * v).sum::<f64>();
                }
                acc
            })
            .collect();
        partial.iter().sum::<f64>() / self.order() as f64
    }

    /// `(1/|G|) sum_U U Y Y^T U^T`; equals `|Y|_HS^2 / d * Id` for an
    /// irreducible group.
    pub fn averaged_outer(&self, y: &RectMatrix) -> SquareMatrix {
        let g = y.gram_rows();
        self.average_conjugate(&g)
    }

    /// `(1/|G|) sum_U U A U^T`.
    pub fn average_conjugate(&self, a: &SquareMatrix) -> SquareMatrix {
        let mut acc = SquareMatrix::zeros(self.dim);
        for u in &self.elements {
            acc = acc.add(&u.matmul(a).matmul(&u.transpose()));
        }
        acc.scale(1.0 / self.order() as f64)
    }

    /// Elements as nested row arrays, for JSON export.
    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        self.elements.iter().map(SquareMatrix::to_rows).collect()
    }
}

fn check_dim(d: usize) -> Result<()> {
    if !(2..=MAX_GROUP_DIM).contains(&d) {
        return Err(Error::OutOfRange {
            what: "group dimension",
            value: d as i64,
            allowed: "2..=6",
        });
    }
    Ok(())
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            break;
        };
        let j = (i + 1..n).rev().find(|&j| p[j] > p[i]).unwrap();
        p.swap(i, j);
        p[i + 1..].reverse();
    }
    out
}

/// Symmetry group of the hypercube: all `2^d d!` signed permutation matrices.
pub fn hypercube_group(d: usize) -> Result<OrthogonalGroup> {
    check_dim(d)?;
    let mut elements = Vec::with_capacity((1 << d) * permutations(d).len());
    for perm in permutations(d) {
        for signs in 0..(1u32 << d) {
            let mut m = SquareMatrix::zeros(d);
            for (row, &col) in perm.iter().enumerate() {
                m[(row, col)] = if signs & (1 << row) != 0 { -1.0 } else { 1.0 };
            }
            elements.push(m);
        }
    }
    Ok(OrthogonalGroup {
        dim: d,
        elements,
        label: GroupLabel::Hypercube,
    })
}

/// Symmetry group of the centred regular simplex, realised by solving
/// `U [v_1 - v_0, ..] = [v_p(1) - v_p(0), ..]` for every vertex permutation.
pub fn simplex_group(d: usize) -> Result<OrthogonalGroup> {
    check_dim(d)?;
    let verts = regular_simplex_vertices(d);
    let edges = |p: &[usize]| -> SquareMatrix {
        let cols: Vec<Vec<f64>> = (1..=d)
            .map(|k| (0..d).map(|i| verts[p[k]][i] - verts[p[0]][i]).collect())
            .collect();
        SquareMatrix::from_columns(&cols).expect("square by construction")
    };
    let base_inv = edges(&(0..=d).collect::<Vec<_>>()).invert()?;
    let elements = permutations(d + 1)
        .iter()
        .map(|p| edges(p).matmul(&base_inv))
        .collect();
    Ok(OrthogonalGroup {
        dim: d,
        elements,
        label: GroupLabel::Simplex,
    })
}

/// Dihedral group of order `2N` of the regular `N`-gon with a vertex on the
/// positive first axis.
pub fn polygon_group(n: usize) -> Result<OrthogonalGroup> {
    if !(3..=MAX_POLYGON_SIDES).contains(&n) {
        return Err(Error::OutOfRange {
            what: "polygon sides",
            value: n as i64,
            allowed: "3..=64",
        });
    }
    let mut elements = Vec::with_capacity(2 * n);
    for k in 0..n {
        let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (s, c) = a.sin_cos();
        elements.push(SquareMatrix::from_rows(&[vec![c, -s], vec![s, c]]).unwrap());
    }
    for k in 0..n {
        let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        let (s, c) = a.sin_cos();
        // rotation composed with reflection in the first axis
        elements.push(SquareMatrix::from_rows(&[vec![c, s], vec![s, -c]]).unwrap());
    }
    Ok(OrthogonalGroup {
        dim: 2,
        elements,
        label: GroupLabel::Polygon(n),
    })
}

/// `S[W, w] = det [w_1 .. w_{d-1} w]`.
pub fn boundary_form(w_cols: &RectMatrix, w: &[f64]) -> f64 {
    let d = w_cols.rows();
    assert_eq!(w_cols.cols() + 1, d, "W must be d x (d-1)");
    assert_eq!(w.len(), d);
    let mut cols: Vec<Vec<f64>> = (0..d - 1).map(|j| w_cols.column(j)).collect();
    cols.push(w.to_vec());
    SquareMatrix::from_columns(&cols).unwrap().det()
}

/// The vector `S[W]` with `S[W] . w = S[W, w]` for every `w`; it is normal to
/// every column of `W` and its length is the `(d-1)`-volume they span.
pub fn boundary_vector(w_cols: &RectMatrix) -> Vec<f64> {
    let d = w_cols.rows();
    (0..d)
        .map(|i| {
            let mut e = vec![0.0; d];
            e[i] = 1.0;
            boundary_form(w_cols, &e)
        })
        .collect()
}

/// Tangent frame `W(x)` at a boundary point.
#[derive(Clone, Debug)]
pub struct BoundaryFrame {
    w: RectMatrix,
    orthonormal: bool,
}

impl BoundaryFrame {
    pub fn new(w: RectMatrix) -> Result<Self> {
        if w.cols() + 1 != w.rows() {
            return Err(Error::DimensionMismatch {
                expected: w.rows() - 1,
                got: w.cols(),
            });
        }
        let orthonormal = (0..w.cols()).all(|a| {
            (0..w.cols()).all(|b| {
                let dot: f64 = (0..w.rows()).map(|i| w.get(i, a) * w.get(i, b)).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                (dot - target).abs() <= ORTHOGONALITY_TOL
            })
        });
        Ok(Self { w, orthonormal })
    }

    pub fn matrix(&self) -> &RectMatrix {
        &self.w
    }

    pub fn is_orthonormal(&self) -> bool {
        self.orthonormal
    }

    pub fn normal(&self) -> Vec<f64> {
        boundary_vector(&self.w)
    }

    /// `(d-1)`-volume of the parallelepiped spanned by the columns.
    pub fn area(&self) -> f64 {
        norm(&self.normal())
    }
}
