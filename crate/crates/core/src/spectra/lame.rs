use std::f64::consts::PI;

use super::{check_count, BoundaryCondition, Provenance, Spectrum};
use crate::error::{Error, Result};

/// Equilateral triangle of side `s`: eigenvalues `16 pi^2 / (9 s^2) q` with
/// `q = m^2 + mn + n^2`, `m >= n >= 1` (Dirichlet) or `m >= n >= 0`
/// (Neumann), each pair counted twice when `m != n`.
pub fn lame_triangle_spectrum(side: f64, bc: BoundaryCondition, n: usize) -> Result<Spectrum> {
    check_count(n)?;
    if !(side > 0.0) {
        return Err(Error::InvalidInput("side must be positive".into()));
    }
    let min_index = match bc {
        BoundaryCondition::Dirichlet => 1u64,
        BoundaryCondition::Neumann => 0,
        BoundaryCondition::Robin { .. } => {
            return Err(Error::Unsupported("Robin spectrum of the equilateral triangle".into()));
        }
    };
    let scale = 16.0 * PI * PI / (9.0 * side * side);
    let mut qmax = 4 * n as u64 + 4;
    loop {
        let mut qs: Vec<(u64, usize)> = Vec::new();
        let mut mm = min_index;
        while mm * mm <= qmax {
            for nn in min_index..=mm {
                let q = mm * mm + mm * nn + nn * nn;
                if q <= qmax {
                    qs.push((q, if mm == nn { 1 } else { 2 }));
                }
            }
            mm += 1;
        }
        qs.sort();
        let count: usize = qs.iter().map(|x| x.1).sum();
        if count >= n {
            let values = qs
                .into_iter()
                .flat_map(|(q, m)| std::iter::repeat_n(scale * q as f64, m))
                .take(n)
                .collect();
            return Ok(Spectrum::new(values, Some(bc), Provenance::Exact));
        }
        qmax *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_values() {
        let d = lame_triangle_spectrum(1.0, BoundaryCondition::Dirichlet, 3).unwrap();
        let c = 16.0 * PI * PI / 9.0;
        assert!((d.values()[0] - 3.0 * c).abs() < 1e-12);
        assert!((d.values()[1] - 7.0 * c).abs() < 1e-12);
        assert_eq!(d.values()[1], d.values()[2]);
        let nm = lame_triangle_spectrum(1.0, BoundaryCondition::Neumann, 3).unwrap();
        assert_eq!(nm.values()[0], 0.0);
        assert!((nm.values()[1] - c).abs() < 1e-12);
    }

    #[test]
    fn scaling_by_four() {
        let a = lame_triangle_spectrum(1.0, BoundaryCondition::Dirichlet, 1).unwrap().values()[0];
        let b = lame_triangle_spectrum(2.0, BoundaryCondition::Dirichlet, 1).unwrap().values()[0];
        assert_eq!(a / b, 4.0);
    }
}
