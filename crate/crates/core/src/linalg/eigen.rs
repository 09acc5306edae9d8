use super::SquareMatrix;
use crate::error::{Error, Result};

/// Symmetry tolerance accepted by [`sym_eigen`], relative to the largest entry.
const SYMMETRY_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Ascending eigenvalues with orthonormal eigenvectors.
///
/// `eigenvectors[k]` belongs to `eigenvalues[k]`. For a generalized problem
/// the vectors are `B`-orthonormal instead.
#[derive(Clone, Debug)]
pub struct SymmetricEigenResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
}

pub(super) fn sym_eigen(s: &SquareMatrix, b: Option<&SquareMatrix>) -> Result<SymmetricEigenResult> {
    if !s.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric {
            asymmetry: s.asymmetry(),
        });
    }
    let Some(b) = b else {
        return Ok(jacobi_eigen(s));
    };
    if b.dim() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            got: b.dim(),
        });
    }
    if !b.is_symmetric(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric {
            asymmetry: b.asymmetry(),
        });
    }
    let l = b.cholesky()?;
    let c = reduce_by_cholesky(s, &l);
    let mut eig = jacobi_eigen(&c);
    for v in &mut eig.eigenvectors {
        *v = solve_lower_transpose(&l, v);
    }
    Ok(eig)
}

/// `L^{-1} S L^{-T}`, symmetrised.
fn reduce_by_cholesky(s: &SquareMatrix, l: &SquareMatrix) -> SquareMatrix {
    let d = s.dim();
    // X = L^{-1} S, column by column of S^T = S.
    let mut x = SquareMatrix::zeros(d);
    for j in 0..d {
        let col = solve_lower(l, &s.column(j));
        for i in 0..d {
            x[(i, j)] = col[i];
        }
    }
    // C = X L^{-T} = (L^{-1} X^T)^T
    let xt = x.transpose();
    let mut c = SquareMatrix::zeros(d);
    for j in 0..d {
        let col = solve_lower(l, &xt.column(j));
        for i in 0..d {
            c[(j, i)] = col[i];
        }
    }
    let mut sym = SquareMatrix::zeros(d);
    for i in 0..d {
        for j in 0..d {
            sym[(i, j)] = 0.5 * (c[(i, j)] + c[(j, i)]);
        }
    }
    sym
}

fn solve_lower(l: &SquareMatrix, b: &[f64]) -> Vec<f64> {
    let d = l.dim();
    let mut y = b.to_vec();
    for i in 0..d {
        let mut s = y[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    y
}

fn solve_lower_transpose(l: &SquareMatrix, b: &[f64]) -> Vec<f64> {
    let d = l.dim();
    let mut x = b.to_vec();
    for i in (0..d).rev() {
        let mut s = x[i];
        for k in (i + 1)..d {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    x
}

/// Cyclic Jacobi rotations on a symmetric matrix. The input is assumed
/// symmetric; only the upper triangle drives the rotations.
pub fn jacobi_eigen(s: &SquareMatrix) -> SymmetricEigenResult {
    let n = s.dim();
    let mut a: Vec<f64> = s.as_slice().to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let app = a[p * n + p];
                    let aqq = a[q * n + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * c;
                    // A <- J^T A J acting on rows/columns p, q
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - sn * akq;
                        a[k * n + q] = sn * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - sn * aqk;
                        a[q * n + k] = sn * apk + c * aqk;
                    }
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - sn * vkq;
                        v[k * n + q] = sn * vkp + c * vkq;
                    }
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].total_cmp(&a[j * n + j]));
    SymmetricEigenResult {
        eigenvalues: order.iter().map(|&i| a[i * n + i]).collect(),
        eigenvectors: order
            .iter()
            .map(|&j| (0..n).map(|k| v[k * n + j]).collect())
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_swap() {
        let e = SquareMatrix::diagonal(&[5.0, 2.0]).sym_eigen().unwrap();
        assert_eq!(e.eigenvalues, vec![2.0, 5.0]);
        let swap = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = swap.sym_eigen().unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        let m = SquareMatrix::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]).unwrap();
        assert!(matches!(m.sym_eigen(), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn generalized_rejects_non_spd() {
        let s = SquareMatrix::identity(2);
        let b = SquareMatrix::diagonal(&[1.0, -1.0]);
        assert!(matches!(
            s.sym_eigen_generalized(&b),
            Err(Error::NotPositiveDefinite { .. })
        ));
    }

    #[test]
    fn generalized_diagonal_pencil() {
        let s = SquareMatrix::diagonal(&[2.0, 9.0]);
        let b = SquareMatrix::diagonal(&[1.0, 3.0]);
        let e = s.sym_eigen_generalized(&b).unwrap();
        assert!((e.eigenvalues[0] - 2.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-14);
        // B-normalised
        let v = &e.eigenvectors[1];
        assert!((3.0 * v[1] * v[1] - 1.0).abs() < 1e-14);
    }
}
