//! Seeded sampling of transformations, boxes and convex polygons.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::geometry::Polytope;
use crate::linalg::{dot, SquareMatrix};
use crate::numfmt;

/// Default half-width of the log-singular-value range: singular values in
/// `[1/3, 3]`.
pub const LOG_SPREAD: f64 = 1.098_612_288_668_109_8;

/// A sampled transform with the parameters that produced it,
/// `T = U diag(exp(s)) V`.
#[derive(Clone, Debug, Serialize)]
pub struct TransformSample {
    #[serde(serialize_with = "serialize_square")]
    pub matrix: SquareMatrix,
    #[serde(serialize_with = "numfmt::serialize_vec_f64")]
    pub log_singular_values: Vec<f64>,
    pub det_normalized: bool,
}

fn serialize_square<S: serde::Serializer>(m: &SquareMatrix, s: S) -> Result<S::Ok, S::Error> {
    numfmt::serialize_matrix(&m.to_rows(), s)
}

/// Haar-distributed orthogonal matrix: Gram-Schmidt on a Gaussian matrix.
pub fn random_orthogonal<R: Rng>(d: usize, rng: &mut R) -> SquareMatrix {
    loop {
        let mut cols: Vec<Vec<f64>> = Vec::with_capacity(d);
        let mut ok = true;
        for _ in 0..d {
            let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            for _ in 0..2 {
                for c in &cols {
                    let p = dot(&v, c);
                    for (x, y) in v.iter_mut().zip(c) {
                        *x -= p * y;
                    }
                }
            }
            let n = dot(&v, &v).sqrt();
            if n < 1e-8 {
                ok = false;
                break;
            }
            cols.push(v.iter().map(|x| x / n).collect());
        }
        if ok {
            return SquareMatrix::from_columns(&cols).expect("square");
        }
    }
}

fn log_values<R: Rng>(d: usize, spread: f64, unimodular: bool, rng: &mut R) -> Vec<f64> {
    let mut s: Vec<f64> = (0..d).map(|_| rng.random_range(-spread..=spread)).collect();
    if unimodular {
        let mean = s.iter().sum::<f64>() / d as f64;
        s.iter_mut().for_each(|x| *x -= mean);
    }
    s
}

/// General transform `U diag(exp(s)) V` with `s_i` uniform in
/// `[-spread, spread]`.
pub fn random_transform<R: Rng>(d: usize, spread: f64, unimodular: bool, rng: &mut R) -> TransformSample {
    let s = log_values(d, spread, unimodular, rng);
    let u = random_orthogonal(d, rng);
    let v = random_orthogonal(d, rng);
    let diag = SquareMatrix::diagonal(&s.iter().map(|x| x.exp()).collect::<Vec<_>>());
    TransformSample {
        matrix: u.matmul(&diag).matmul(&v),
        log_singular_values: s,
        det_normalized: unimodular,
    }
}

/// Transform with condition number exactly `cond`: log-singular values are
/// drawn from a centred interval and then stretched so their range is
/// `ln cond`.
pub fn random_transform_with_condition<R: Rng>(d: usize, cond: f64, rng: &mut R) -> TransformSample {
    let mut s = log_values(d, 1.0, true, rng);
    let (lo, hi) = s.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    let width = (hi - lo).max(1e-12);
    let target = cond.ln();
    s.iter_mut().for_each(|x| *x = (*x - lo) / width * target - 0.5 * target);
    let u = random_orthogonal(d, rng);
    let v = random_orthogonal(d, rng);
    let diag = SquareMatrix::diagonal(&s.iter().map(|x| x.exp()).collect::<Vec<_>>());
    TransformSample {
        matrix: u.matmul(&diag).matmul(&v),
        log_singular_values: s,
        det_normalized: false,
    }
}

/// Transform with orthogonal columns, `U diag(exp(s))`; it maps a centred
/// box to a rotated box.
pub fn random_column_orthogonal<R: Rng>(d: usize, spread: f64, unimodular: bool, rng: &mut R) -> TransformSample {
    let s = log_values(d, spread, unimodular, rng);
    let u = random_orthogonal(d, rng);
    let diag = SquareMatrix::diagonal(&s.iter().map(|x| x.exp()).collect::<Vec<_>>());
    TransformSample {
        matrix: u.matmul(&diag),
        log_singular_values: s,
        det_normalized: unimodular,
    }
}

/// `c U` with `ln c` uniform in `[-spread, spread]`.
pub fn random_scaled_orthogonal<R: Rng>(d: usize, spread: f64, rng: &mut R) -> TransformSample {
    let c: f64 = rng.random_range(-spread..=spread);
    let u = random_orthogonal(d, rng);
    TransformSample {
        matrix: u.scale(c.exp()),
        log_singular_values: vec![c; d],
        det_normalized: false,
    }
}

/// Convex hull of 8 to 16 points uniform in the annulus `0.5 <= r <= 1`,
/// translated so its centroid is the origin. Rejected and redrawn when the
/// origin is not strictly interior.
pub fn random_convex_polygon<R: Rng>(rng: &mut R) -> Polytope {
    loop {
        let k = rng.random_range(8..=16);
        let pts: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let r = rng.random_range(0.25f64..=1.0).sqrt();
                let t = rng.random_range(0.0..std::f64::consts::TAU);
                vec![r * t.cos(), r * t.sin()]
            })
            .collect();
        let Ok(hull) = Polytope::from_points(&pts) else {
            continue;
        };
        let Ok(m) = hull.moments() else {
            continue;
        };
        let shifted: Vec<Vec<f64>> = hull
            .vertices()
            .iter()
            .map(|v| vec![v[0] - m.centroid[0], v[1] - m.centroid[1]])
            .collect();
        let Ok(poly) = Polytope::from_points(&shifted) else {
            continue;
        };
        if poly.origin_margin() > 1e-9 * poly.size() {
            return poly;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_have_requested_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in 2..=4 {
            assert!(random_orthogonal(d, &mut rng).is_orthogonal(1e-12));
            let t = random_transform(d, LOG_SPREAD, true, &mut rng);
            assert!((t.matrix.det().abs() - 1.0).abs() < 1e-12);
            let c = random_transform_with_condition(d, 3.0, &mut rng);
            let sv = c.matrix.singular_values();
            assert!((sv[d - 1] / sv[0] - 3.0).abs() < 1e-9);
            let o = random_column_orthogonal(d, LOG_SPREAD, false, &mut rng).matrix;
            let g = o.transpose().matmul(&o);
            for i in 0..d {
                for j in 0..d {
                    if i != j {
                        assert!(g[(i, j)].abs() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn polygons_are_centred() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let p = random_convex_polygon(&mut rng);
            let m = p.moments().unwrap();
            assert!(m.centroid.iter().all(|c| c.abs() < 1e-12));
            p.validate().unwrap();
        }
    }
}
