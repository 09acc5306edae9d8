//! Nelder-Mead ascent of the normalized functionals over unimodular
//! transforms, with seeded restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::checks::{normalized_functional, torus_normalized_sum};
use super::Domain;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::numfmt;
use crate::spectra::BoundaryCondition;

/// Relative slack allowed above the reference value.
pub const EXCEED_TOL: f64 = 1e-6;

const START_SPREAD: f64 = 0.7;
const INITIAL_STEP: f64 = 0.25;
const MAX_EVALUATIONS: usize = 4000;

#[derive(Clone, Debug)]
pub struct NelderMeadResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` from `x0` with the standard reflection/expansion/
/// contraction/shrink coefficients (1, 2, 1/2, 1/2).
///
/// Stops when both the spread of simplex values is below
/// `ftol * (1 + |f_best|)` and the simplex diameter is below `xtol`.
pub fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    step: f64,
    ftol: f64,
    xtol: f64,
    max_evaluations: usize,
) -> NelderMeadResult {
    let k = x0.len();
    let mut evals = 0;
    let mut eval = |x: &[f64], evals: &mut usize| {
        *evals += 1;
        f(x)
    };
    if k == 0 {
        let value = eval(x0, &mut evals);
        return NelderMeadResult { x: Vec::new(), value, evaluations: evals, converged: true };
    }
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(k + 1);
    simplex.push((x0.to_vec(), eval(x0, &mut evals)));
    for i in 0..k {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }
    let combine = |a: &[f64], b: &[f64], t: f64| -> Vec<f64> { a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect() };
    let mut converged = false;
    while evals < max_evaluations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[k].1;
        let diameter = simplex[1..]
            .iter()
            .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if (worst - best).abs() <= ftol * (1.0 + best.abs()) && diameter <= xtol {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; k];
        for (x, _) in &simplex[..k] {
            for (c, xi) in centroid.iter_mut().zip(x) {
                *c += xi / k as f64;
            }
        }
        let xr = combine(&centroid, &simplex[k].0, -1.0);
        let fr = eval(&xr, &mut evals);
        if fr < best {
            let xe = combine(&centroid, &simplex[k].0, -2.0);
            let fe = eval(&xe, &mut evals);
            simplex[k] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[k - 1].1 {
            simplex[k] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst {
            let xc = combine(&centroid, &xr, 0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        } else {
            let xc = combine(&centroid, &simplex[k].0, 0.5);
            let fc = eval(&xc, &mut evals);
            (xc, fc)
        };
        if fc < fr.min(worst) {
            simplex[k] = (xc, fc);
            continue;
        }
        let x_best = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            let x = combine(&x_best, &entry.0, 0.5);
            let v = eval(&x, &mut evals);
            *entry = (x, v);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    NelderMeadResult { x, value, evaluations: evals, converged }
}

/// What is maximized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SearchObjective {
    /// Normalized first Dirichlet functional over the unit-determinant
    /// boxes `diag(e^s)`, which is constant at `12 pi^2`.
    BoxFamily { d: usize },
    /// Normalized `n`-term functional of the unit cube over the same boxes.
    Cube { d: usize, n: usize, bc: BoundaryCondition },
    /// Normalized torus sum over `T = diag(e^s) R` with `R` a rotation.
    Torus { d: usize, n: usize },
}

impl SearchObjective {
    pub fn dim(&self) -> usize {
        match *self {
            SearchObjective::BoxFamily { d } | SearchObjective::Cube { d, .. } | SearchObjective::Torus { d, .. } => d,
        }
    }

    pub fn name(&self) -> String {
        match *self {
            SearchObjective::BoxFamily { d } => format!("box-family-{d}"),
            SearchObjective::Cube { d, .. } => format!("hypercube-{d}"),
            SearchObjective::Torus { d, .. } => format!("torus-{d}"),
        }
    }

    fn n(&self) -> usize {
        match *self {
            SearchObjective::BoxFamily { .. } => 1,
            SearchObjective::Cube { n, .. } | SearchObjective::Torus { n, .. } => n,
        }
    }

    fn bc(&self) -> Option<BoundaryCondition> {
        match *self {
            SearchObjective::BoxFamily { .. } => Some(BoundaryCondition::Dirichlet),
            SearchObjective::Cube { bc, .. } => Some(bc),
            SearchObjective::Torus { .. } => None,
        }
    }

    /// `(d - 1)` log-stretches, plus `d(d-1)/2` rotation parameters for tori.
    pub fn parameter_count(&self) -> usize {
        let d = self.dim();
        match self {
            SearchObjective::Torus { .. } => d - 1 + d * (d - 1) / 2,
            _ => d - 1,
        }
    }

    /// Transform for a parameter vector; always `|det T| = 1`.
    pub fn transform(&self, p: &[f64]) -> SquareMatrix {
        let d = self.dim();
        let mut s: Vec<f64> = p[..d - 1].to_vec();
        s.push(-s.iter().sum::<f64>());
        let diag = SquareMatrix::diagonal(&s.iter().map(|x| x.exp()).collect::<Vec<_>>());
        match self {
            SearchObjective::Torus { .. } => diag.matmul(&cayley(d, &p[d - 1..])),
            _ => diag,
        }
    }

    pub fn evaluate(&self, t: &SquareMatrix) -> Result<f64> {
        match *self {
            SearchObjective::BoxFamily { d } => {
                Ok(normalized_functional(Domain::Hypercube { d }, t, 1, BoundaryCondition::Dirichlet, None, false)?.value)
            }
            SearchObjective::Cube { d, n, bc } => {
                let f = normalized_functional(Domain::Hypercube { d }, t, n, bc, None, false)?;
                if !f.is_exact() {
                    return Err(Error::Unsupported("cube search needs box transforms".into()));
                }
                Ok(f.value)
            }
            SearchObjective::Torus { n, .. } => torus_normalized_sum(t, n),
        }
    }
}

/// Cayley transform `(I - A)^{-1} (I + A)` of the skew matrix with the given
/// upper-triangle entries; a rotation.
fn cayley(d: usize, upper: &[f64]) -> SquareMatrix {
    let mut a = SquareMatrix::zeros(d);
    let mut k = 0;
    for i in 0..d {
        for j in i + 1..d {
            a[(i, j)] = upper[k];
            a[(j, i)] = -upper[k];
            k += 1;
        }
    }
    let id = SquareMatrix::identity(d);
    id.sub(&a).invert().expect("I - A is invertible for skew A").matmul(&id.add(&a))
}

/// Outcome of a restarted search. `never_exceeds` covers every evaluation,
/// not only the optima.
#[derive(Clone, Debug, Serialize)]
pub struct SearchReport {
    pub objective: String,
    pub n: usize,
    pub bc: Option<String>,
    pub restarts: usize,
    pub seed: u64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub reference_value: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub best_value: f64,
    #[serde(serialize_with = "serialize_square")]
    pub best_transform: SquareMatrix,
    /// `min_Q |T - Q|_HS` over orthogonal `Q`, i.e. `sqrt(sum (s_i - 1)^2)`.
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub orthogonal_distance: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub max_evaluated: f64,
    /// `(reference - best) / reference`.
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub relative_gap: f64,
    pub never_exceeds: bool,
    pub converged_restarts: usize,
    pub evaluations: usize,
}

fn serialize_square<S: serde::Serializer>(m: &SquareMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    numfmt::serialize_matrix(&m.to_rows(), s)
}

impl SearchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }

    /// The optimum found is within `tol` relative of the reference value.
    pub fn reaches_reference(&self, tol: f64) -> bool {
        self.relative_gap.abs() <= tol
    }
}

/// Maximizes the objective from `restarts` seeded random starts. Restarts run
/// concurrently; results are merged in restart order.
pub fn maximizer_search(objective: SearchObjective, restarts: usize, seed: u64) -> Result<SearchReport> {
    let d = objective.dim();
    if d < 2 {
        return Err(Error::OutOfRange { what: "search dimension", value: d as i64, allowed: ">= 2" });
    }
    if restarts == 0 {
        return Err(Error::OutOfRange { what: "restarts", value: 0, allowed: ">= 1" });
    }
    if let SearchObjective::Torus { n, .. } = objective {
        if n < 2 {
            return Err(Error::OutOfRange { what: "torus eigenvalue count", value: n as i64, allowed: ">= 2" });
        }
    }
    let reference = objective.evaluate(&SquareMatrix::identity(d))?;
    let k = objective.parameter_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<Vec<f64>> = (0..restarts)
        .map(|_| (0..k).map(|_| rng.random_range(-START_SPREAD..=START_SPREAD)).collect())
        .collect();

    let runs: Vec<(NelderMeadResult, f64)> = starts
        .par_iter()
        .map(|x0| {
            let mut max_seen = f64::NEG_INFINITY;
            let res = nelder_mead(
                |p| {
                    // an evaluation failure is treated as a very poor point
                    let v = objective.evaluate(&objective.transform(p)).unwrap_or(f64::NEG_INFINITY);
                    max_seen = max_seen.max(v);
                    -v
                },
                x0,
                INITIAL_STEP,
                1e-14,
                1e-9,
                MAX_EVALUATIONS,
            );
            (res, max_seen)
        })
        .collect();

    let mut best: Option<&NelderMeadResult> = None;
    let mut max_evaluated = f64::NEG_INFINITY;
    let mut evaluations = 0;
    let mut converged = 0;
    for (res, seen) in &runs {
        max_evaluated = max_evaluated.max(*seen);
        evaluations += res.evaluations;
        converged += usize::from(res.converged);
        if best.is_none_or(|b| res.value < b.value) {
            best = Some(res);
        }
    }
    let best = best.expect("at least one restart");
    let best_value = -best.value;
    let best_transform = objective.transform(&best.x);
    let orthogonal_distance = best_transform.singular_values().iter().map(|s| (s - 1.0).powi(2)).sum::<f64>().sqrt();
    Ok(SearchReport {
        objective: objective.name(),
        n: objective.n(),
        bc: objective.bc().map(|b| b.name().to_string()),
        restarts,
        seed,
        reference_value: reference,
        best_value,
        best_transform,
        orthogonal_distance,
        max_evaluated,
        relative_gap: (reference - best_value) / reference.abs(),
        never_exceeds: max_evaluated <= reference * (1.0 + EXCEED_TOL),
        converged_restarts: converged,
        evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let r = nelder_mead(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 0.5).powi(2), &[0.0, 0.0], 0.5, 1e-14, 1e-9, 4000);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] + 0.5).abs() < 1e-6);
    }

    #[test]
    fn transforms_are_unimodular() {
        let obj = SearchObjective::Torus { d: 3, n: 5 };
        let t = obj.transform(&[0.3, -0.2, 0.4, 0.1, -0.7]);
        assert!((t.det() - 1.0).abs() < 1e-12);
        assert!(cayley(3, &[0.4, 0.1, -0.7]).is_orthogonal(1e-12));
    }

    #[test]
    fn box_family_is_flat() {
        let r = maximizer_search(SearchObjective::BoxFamily { d: 3 }, 3, 1).unwrap();
        assert!(r.never_exceeds);
        assert!(r.reaches_reference(1e-12));
    }
}
