use std::f64::consts::PI;

use super::{check_count, Provenance, Spectrum};
use crate::error::Result;
use crate::geometry::unit_ball_volume;
use crate::linalg::SquareMatrix;

/// Lattice `T Z^d` given by the columns of `basis`.
#[derive(Clone, Debug)]
pub struct Lattice {
    basis: SquareMatrix,
    dual: SquareMatrix,
}

/// A dual-lattice vector `T^{-T} k` with its integer coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct DualVector {
    pub coords: Vec<i64>,
    pub vector: Vec<f64>,
    pub norm_sq: f64,
}

impl Lattice {
    pub fn new(basis: SquareMatrix) -> Result<Self> {
        let dual = basis.inverse_transpose()?;
        Ok(Self { basis, dual })
    }

    pub fn basis(&self) -> &SquareMatrix {
        &self.basis
    }

    pub fn dual_basis(&self) -> &SquareMatrix {
        &self.dual
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }
}

/// Calls `f` on every integer vector in `[-k, k]^d`.
fn for_each_in_box(d: usize, k: i64, f: &mut dyn FnMut(&[i64])) {
    let mut v = vec![-k; d];
    loop {
        f(&v);
        let mut i = 0;
        loop {
            if i == d {
                return;
            }
            if v[i] < k {
                v[i] += 1;
                break;
            }
            v[i] = -k;
            i += 1;
        }
    }
}

/// The `n` shortest vectors of the dual lattice, zero first. Ties (relative
/// gap `1e-12`) are ordered lexicographically on the integer coordinates.
///
/// Enumeration covers every `k` with `|k_i| <= sigma_max(T) R`, which
/// contains the dual ball of radius `R` since `k = T^T y`.
pub fn shortest_dual_vectors(lat: &Lattice, n: usize) -> Result<Vec<DualVector>> {
    check_count(n)?;
    let d = lat.dim();
    let smax = *lat.basis.singular_values().last().unwrap();
    let covol = lat.dual.det().abs();
    // radius whose ball should hold about 2n points
    let mut r = (2.0 * n as f64 * covol / unit_ball_volume(d)).powf(1.0 / d as f64);
    let dual = &lat.dual;
    loop {
        let k = (smax * r).floor() as i64 + 1;
        let r2 = r * r;
        let mut found: Vec<DualVector> = Vec::new();
        for_each_in_box(d, k, &mut |c: &[i64]| {
            let cf: Vec<f64> = c.iter().map(|&x| x as f64).collect();
            let y = dual.mul_vec(&cf);
            let ns: f64 = y.iter().map(|v| v * v).sum();
            if ns <= r2 {
                found.push(DualVector {
                    coords: c.to_vec(),
                    vector: y,
                    norm_sq: ns,
                });
            }
        });
        if found.len() >= n {
            found.sort_by(|a, b| a.norm_sq.total_cmp(&b.norm_sq).then_with(|| a.coords.cmp(&b.coords)));
            // regroup near-ties lexicographically
            let mut i = 0;
            while i < found.len() {
                let mut j = i + 1;
                while j < found.len() && found[j].norm_sq - found[j - 1].norm_sq <= 1e-12 * found[j].norm_sq {
                    j += 1;
                }
                found[i..j].sort_by(|a, b| a.coords.cmp(&b.coords));
                i = j;
            }
            found.truncate(n);
            return Ok(found);
        }
        r *= 1.5;
    }
}

/// Flat-torus spectrum `4 pi^2 |y|^2` over the shortest dual vectors.
pub fn torus_spectrum(lat: &Lattice, n: usize) -> Result<Spectrum> {
    let values = shortest_dual_vectors(lat, n)?
        .into_iter()
        .map(|v| 4.0 * PI * PI * v.norm_sq)
        .collect();
    Ok(Spectrum::new(values, None, Provenance::Exact))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubical_plane() {
        let lat = Lattice::new(SquareMatrix::identity(2)).unwrap();
        let v = shortest_dual_vectors(&lat, 5).unwrap();
        assert_eq!(v[0].coords, vec![0, 0]);
        let mut rest: Vec<Vec<i64>> = v[1..].iter().map(|x| x.coords.clone()).collect();
        rest.sort();
        assert_eq!(rest, vec![vec![-1, 0], vec![0, -1], vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn stretched_basis() {
        let lat = Lattice::new(SquareMatrix::diagonal(&[1.0, 2.0])).unwrap();
        let s = torus_spectrum(&lat, 3).unwrap();
        assert_eq!(s.values()[0], 0.0);
        assert!((s.values()[1] - PI * PI).abs() < 1e-13);
        assert!((s.values()[2] - PI * PI).abs() < 1e-13);
    }

    #[test]
    fn cubical_space() {
        let lat = Lattice::new(SquareMatrix::identity(3)).unwrap();
        let s = torus_spectrum(&lat, 7).unwrap();
        assert_eq!(s.values()[0], 0.0);
        for v in &s.values()[1..] {
            assert_eq!(*v, 4.0 * PI * PI);
        }
    }
}
