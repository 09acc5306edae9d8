//! Sparse symmetric matrices for the finite-element path.
//!
//! Storage is plain CSR with the full (both triangles) pattern. Factorisation
//! uses a reverse Cuthill-McKee ordering followed by an envelope (skyline)
//! Cholesky, which is adequate for the banded systems produced by uniformly
//! refined simplicial meshes.

use std::collections::VecDeque;

use crate::error::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Clone, Debug)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl CsrMatrix {
    /// Builds a matrix from `(row, col, value)` triplets; duplicates are summed
    /// in the order they appear after a stable sort by position.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        triplets.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_ptr = vec![0usize; n + 1];
        let mut col_idx = Vec::with_capacity(triplets.len());
        let mut values: Vec<f64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in triplets {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..n {
            row_ptr[i + 1] += row_ptr[i];
        }
        Self {
            n,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()].iter().copied().zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    /// `x^T A y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (i, &xi) in x.iter().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * y[self.col_idx[k]];
            }
            acc += xi * s;
        }
        acc
    }

    /// `self + alpha * other`; both must share dimension.
    pub fn add_scaled(&self, alpha: f64, other: &CsrMatrix) -> CsrMatrix {
        assert_eq!(self.n, other.n);
        let mut trip = Vec::with_capacity(self.nnz() + other.nnz());
        for i in 0..self.n {
            trip.extend(self.row(i).map(|(j, v)| (i, j, v)));
            trip.extend(other.row(i).map(|(j, v)| (i, j, alpha * v)));
        }
        CsrMatrix::from_triplets(self.n, trip)
    }

    /// Principal submatrix on `keep` (indices in the new numbering follow the
    /// order of `keep`).
    pub fn submatrix(&self, keep: &[usize]) -> CsrMatrix {
        let mut map = vec![usize::MAX; self.n];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let mut trip = Vec::new();
        for (new_i, &old_i) in keep.iter().enumerate() {
            for (j, v) in self.row(old_i) {
                if map[j] != usize::MAX {
                    trip.push((new_i, map[j], v));
                }
            }
        }
        CsrMatrix::from_triplets(keep.len(), trip)
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.n {
            for (j, v) in self.row(i) {
                worst = worst.max((v - self.get(j, i)).abs());
            }
        }
        worst
    }
}

/// Reverse Cuthill-McKee permutation: `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.n();
    let degree: Vec<usize> = (0..n).map(|i| a.row(i).filter(|&(j, _)| j != i).count()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    while order.len() < n {
        // start each component from a pseudo-peripheral vertex
        let seed = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| degree[i])
            .unwrap();
        let start = pseudo_peripheral(a, seed, &degree);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = a
                .row(v)
                .map(|(j, _)| j)
                .filter(|&j| !visited[j])
                .collect();
            nbrs.sort_by_key(|&j| (degree[j], j));
            for j in nbrs {
                visited[j] = true;
                queue.push_back(j);
            }
        }
    }
    order.reverse();
    order
}

fn pseudo_peripheral(a: &CsrMatrix, start: usize, degree: &[usize]) -> usize {
    let mut root = start;
    let mut ecc = 0;
    for _ in 0..8 {
        let levels = bfs_levels(a, root);
        let max_level = *levels.iter().filter(|&&l| l != usize::MAX).max().unwrap();
        if max_level <= ecc && ecc > 0 {
            break;
        }
        ecc = max_level;
        root = (0..a.n())
            .filter(|&i| levels[i] == max_level)
            .min_by_key(|&i| (degree[i], i))
            .unwrap();
    }
    root
}

fn bfs_levels(a: &CsrMatrix, root: usize) -> Vec<usize> {
    let mut level = vec![usize::MAX; a.n()];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for (j, _) in a.row(v) {
            if level[j] == usize::MAX {
                level[j] = level[v] + 1;
                queue.push_back(j);
            }
        }
    }
    level
}

/// Envelope Cholesky factor `P A P^T = L L^T` of an SPD matrix.
pub struct SkylineCholesky {
    n: usize,
    perm: Vec<usize>,
    /// first column stored in each row of `L`
    first: Vec<usize>,
    /// start offset of each row in `data`
    offset: Vec<usize>,
    data: Vec<f64>,
}

impl SkylineCholesky {
    pub fn factor(a: &CsrMatrix) -> Result<Self> {
        let n = a.n();
        let perm = reverse_cuthill_mckee(a);
        let mut inv = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv[old] = new;
        }
        let mut first: Vec<usize> = (0..n).collect();
        for new_i in 0..n {
            for (j, _) in a.row(perm[new_i]) {
                let new_j = inv[j];
                if new_j < first[new_i] {
                    first[new_i] = new_j;
                }
            }
        }
        let mut offset = vec![0usize; n + 1];
        for i in 0..n {
            offset[i + 1] = offset[i] + (i - first[i] + 1);
        }
        let mut data = vec![0.0; offset[n]];
        for new_i in 0..n {
            for (j, v) in a.row(perm[new_i]) {
                let new_j = inv[j];
                if new_j <= new_i {
                    data[offset[new_i] + new_j - first[new_i]] += v;
                }
            }
        }
        for i in 0..n {
            let fi = first[i];
            for j in fi..i {
                let fj = first[j];
                let lo = fi.max(fj);
                let (head, tail) = data.split_at_mut(offset[i]);
                let row_i = &mut tail[..i - fi + 1];
                let row_j = &head[offset[j]..offset[j] + (j - fj + 1)];
                let mut s = row_i[j - fi];
                let ri = &row_i[lo - fi..j - fi];
                let rj = &row_j[lo - fj..j - fj];
                for (x, y) in ri.iter().zip(rj) {
                    s -= x * y;
                }
                row_i[j - fi] = s / row_j[j - fj];
            }
            let row_i = &mut data[offset[i]..offset[i + 1]];
            let (off, diag) = row_i.split_at_mut(i - fi);
            let s = diag[0] - off.iter().map(|x| x * x).sum::<f64>();
            if !(s > 0.0) {
                return Err(Error::NotPositiveDefinite { row: i, pivot: s });
            }
            diag[0] = s.sqrt();
        }
        Ok(Self {
            n,
            perm,
            first,
            offset,
            data,
        })
    }

    pub fn envelope_size(&self) -> usize {
        self.data.len()
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let fi = self.first[i];
            let row = &self.data[self.offset[i]..self.offset[i + 1]];
            let mut s = y[i];
            for (l, yk) in row[..i - fi].iter().zip(&y[fi..i]) {
                s -= l * yk;
            }
            y[i] = s / row[i - fi];
        }
        for i in (0..n).rev() {
            let fi = self.first[i];
            let row = &self.data[self.offset[i]..self.offset[i + 1]];
            let xi = y[i] / row[i - fi];
            y[i] = xi;
            for (l, yk) in row[..i - fi].iter().zip(&mut y[fi..i]) {
                *yk -= l * xi;
            }
        }
        let mut x = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
                t.push((i - 1, i, -1.0));
            }
        }
        CsrMatrix::from_triplets(n, t)
    }

    #[test]
    fn triplets_sum_duplicates() {
        let a = CsrMatrix::from_triplets(2, vec![(0, 0, 1.0), (1, 1, 2.0), (0, 0, 3.0)]);
        assert_eq!(a.get(0, 0), 4.0);
        assert_eq!(a.get(1, 1), 2.0);
        assert_eq!(a.get(0, 1), 0.0);
        assert_eq!(a.nnz(), 2);
    }

    #[test]
    fn skyline_solves_shuffled_laplacian() {
        // 2-D grid Laplacian with a scrambled numbering
        let m = 9;
        let n = m * m;
        let idx = |i: usize, j: usize| ((i * m + j) * 37) % n;
        let mut t = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let p = idx(i, j);
                t.push((p, p, 4.0));
                for (di, dj) in [(1i64, 0i64), (0, 1)] {
                    let (a, b) = (i as i64 + di, j as i64 + dj);
                    if a < m as i64 && b < m as i64 {
                        let q = idx(a as usize, b as usize);
                        t.push((p, q, -1.0));
                        t.push((q, p, -1.0));
                    }
                }
            }
        }
        let a = CsrMatrix::from_triplets(n, t);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x_true);
        let chol = SkylineCholesky::factor(&a).unwrap();
        let x = chol.solve(&b);
        let err = x.iter().zip(&x_true).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-12, "error {err}");
        // RCM keeps the envelope near bandwidth * n
        assert!(chol.envelope_size() < n * 2 * m);
    }

    #[test]
    fn skyline_rejects_indefinite() {
        let a = laplacian_1d(5).add_scaled(-10.0, &CsrMatrix::from_triplets(
            5,
            (0..5).map(|i| (i, i, 1.0)).collect(),
        ));
        assert!(SkylineCholesky::factor(&a).is_err());
    }

    #[test]
    fn submatrix_keeps_order() {
        let a = laplacian_1d(4);
        let s = a.submatrix(&[1, 2]);
        assert_eq!(s.get(0, 0), 2.0);
        assert_eq!(s.get(0, 1), -1.0);
        assert_eq!(s.n(), 2);
    }
}
