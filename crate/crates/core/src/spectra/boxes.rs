use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::f64::consts::PI;

use super::{check_count, BoundaryCondition, Provenance, Spectrum};
use crate::error::{Error, Result};

/// Bisection stops once the bracket is this small relative to the root.
const ROOT_TOL: f64 = 1e-15;

/// First `m` eigenvalues of `-u'' = rho u` on `(0, L)` with
/// `du/dn + sigma u = 0` at both ends.
///
/// With `u = cos(kx) + (sigma/k) sin(kx)` the condition at `L` reads
/// `(k^2 - sigma^2) sin(kL)/k - 2 sigma cos(kL) = 0`, which has exactly one
/// root in each interval `((j-1) pi/L, j pi/L)`.
pub fn interval_robin_eigenvalues(length: f64, sigma: f64, m: usize) -> Result<Vec<f64>> {
    if !(length > 0.0) || !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidInput(format!(
            "interval Robin problem needs L > 0 and finite sigma > 0 (L={length}, sigma={sigma})"
        )));
    }
    let g = |k: f64| {
        if k == 0.0 {
            -sigma * sigma * length - 2.0 * sigma
        } else {
            (k * k - sigma * sigma) * (k * length).sin() / k - 2.0 * sigma * (k * length).cos()
        }
    };
    (1..=m)
        .map(|j| {
            let mut lo = (j - 1) as f64 * PI / length;
            let mut hi = j as f64 * PI / length;
            let (mut glo, ghi) = (g(lo), g(hi));
            if glo == 0.0 || ghi == 0.0 || glo.signum() == ghi.signum() {
                return Err(Error::RootBracket(format!(
                    "Robin root {j}: g({lo})={glo}, g({hi})={ghi}"
                )));
            }
            for _ in 0..200 {
                if hi - lo <= ROOT_TOL * hi {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                let gm = g(mid);
                if gm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            let k = 0.5 * (lo + hi);
            Ok(k * k)
        })
        .collect()
}

#[derive(PartialEq)]
struct Entry {
    value: f64,
    index: Vec<usize>,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on value, then on the index tuple
        other
            .value
            .total_cmp(&self.value)
            .then_with(|| other.index.cmp(&self.index))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The `n` smallest eigenvalues of the box with side lengths `sides`.
pub fn box_spectrum(sides: &[f64], bc: BoundaryCondition, n: usize) -> Result<Spectrum> {
    check_count(n)?;
    if sides.is_empty() || sides.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::InvalidInput("box sides must be positive".into()));
    }
    let per_axis: Vec<Vec<f64>> = sides
        .iter()
        .map(|&t| match bc {
            BoundaryCondition::Dirichlet => Ok((1..=n).map(|k| (k as f64 * PI / t).powi(2)).collect()),
            BoundaryCondition::Neumann => Ok((0..n).map(|k| (k as f64 * PI / t).powi(2)).collect()),
            BoundaryCondition::Robin { sigma } => interval_robin_eigenvalues(t, sigma, n),
        })
        .collect::<Result<_>>()?;
    let value = |idx: &[usize]| -> f64 { idx.iter().zip(&per_axis).map(|(&k, ax)| ax[k]).sum() };
    let start = vec![0usize; sides.len()];
    let mut heap = BinaryHeap::new();
    let mut seen = HashSet::new();
    heap.push(Entry {
        value: value(&start),
        index: start.clone(),
    });
    seen.insert(start);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let Entry { value: v, index } = heap.pop().expect("tensor grid is infinite");
        out.push(v);
        for axis in 0..index.len() {
            if index[axis] + 1 < n {
                let mut next = index.clone();
                next[axis] += 1;
                if seen.insert(next.clone()) {
                    heap.push(Entry {
                        value: value(&next),
                        index: next,
                    });
                }
            }
        }
    }
    let provenance = match bc {
        BoundaryCondition::Robin { .. } => Provenance::RootFound { tol: ROOT_TOL },
        _ => Provenance::Exact,
    };
    Ok(Spectrum::new(out, Some(bc), provenance))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cube_first_dirichlet() {
        let s = box_spectrum(&[1.0; 3], BoundaryCondition::Dirichlet, 1).unwrap();
        assert!((s.values()[0] - 3.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn stretched_box_first_three() {
        let s = box_spectrum(&[2.0, 1.0, 1.0], BoundaryCondition::Dirichlet, 3).unwrap();
        let want = [9.0 / 4.0, 3.0, 17.0 / 4.0];
        for (v, w) in s.values().iter().zip(want) {
            assert!((v / (PI * PI) - w).abs() < 1e-13);
        }
    }

    #[test]
    fn neumann_starts_at_zero() {
        let s = box_spectrum(&[0.3, 2.0], BoundaryCondition::Neumann, 4).unwrap();
        assert_eq!(s.values()[0], 0.0);
    }

    #[test]
    fn robin_limits() {
        let small = interval_robin_eigenvalues(1.0, 1e-10, 4).unwrap();
        let large = interval_robin_eigenvalues(1.0, 1e10, 4).unwrap();
        for k in 0..4 {
            let neu = (k as f64 * PI).powi(2);
            let dir = ((k + 1) as f64 * PI).powi(2);
            assert!((small[k] - neu).abs() < 1e-7);
            assert!((large[k] - dir).abs() < 1e-7 * dir);
        }
    }

    #[test]
    fn robin_rejects_nonpositive_sigma() {
        assert!(interval_robin_eigenvalues(1.0, 0.0, 2).is_err());
    }
}
