use std::f64::consts::PI;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::report::{ReportInputs, VerificationReport};
use super::{image_sum, image_sums, scalar_orthogonal_factor, Domain, SumEstimate};
use crate::error::{Error, Result};
use crate::geometry::{Body, Ellipsoid, Polytope};
use crate::linalg::{norm, SquareMatrix};
use crate::spectra::{box_spectrum, torus_spectrum, BoundaryCondition, Lattice};

/// Tolerance for checks evaluated on closed-form spectra.
pub const EXACT_TOL: f64 = 1e-10;
/// Tolerance for Robin checks on root-found spectra.
pub const ROBIN_TOL: f64 = 1e-9;
/// Relative tolerance for exact-geometry identities.
pub const GEOMETRY_TOL: f64 = 1e-9;

fn inputs(domain: &str, t: Option<&SquareMatrix>, n: Option<usize>, bc: Option<BoundaryCondition>, level: Option<usize>) -> ReportInputs {
    ReportInputs {
        domain: domain.to_string(),
        transform: t.cloned(),
        n,
        bc: bc.map(|b| b.name().to_string()),
        sigma: bc.and_then(|b| b.sigma()),
        seed: None,
        level,
    }
}

fn hs_factor(t: &SquareMatrix) -> Result<f64> {
    Ok(t.invert()?.hs_norm_squared() / t.dim() as f64)
}

struct Scaled {
    report: VerificationReport,
    lhs: SumEstimate,
    reference: SumEstimate,
}

/// Compares `S_n(T(D))` (boundary condition from `image_bc`) against
/// `|T^{-1}|^2/d * S_n(D)` for every transform and every `n`. The sums on `D`
/// are computed at most once per method (closed form or finite elements) and
/// transforms are evaluated concurrently; output is ordered by transform,
/// then by `n`.
#[allow(clippy::too_many_arguments)]
fn scaled_sum_reports(
    theorem: &str,
    domain: Domain,
    ts: &[SquareMatrix],
    ns: &[usize],
    bc_ref: BoundaryCondition,
    image_bc: &(dyn Fn(&SquareMatrix) -> Result<BoundaryCondition> + Sync),
    level: Option<usize>,
    exact_tol: f64,
) -> Result<Vec<Scaled>> {
    let id = SquareMatrix::identity(domain.dim());
    let ref_default: OnceLock<Result<Vec<SumEstimate>>> = OnceLock::new();
    let ref_fem: OnceLock<Result<Vec<SumEstimate>>> = OnceLock::new();
    let per_t: Vec<Vec<Scaled>> = ts
        .par_iter()
        .map(|t| -> Result<Vec<Scaled>> {
            let factor = hs_factor(t)?;
            let bc = image_bc(t)?;
            let lhs = image_sums(domain, t, bc, ns, level, false)?;
            let exact = lhs.iter().all(SumEstimate::is_exact);
            let reference = if exact {
                ref_default.get_or_init(|| image_sums(domain, &id, bc_ref, ns, level, false))
            } else {
                ref_fem.get_or_init(|| image_sums(domain, &id, bc_ref, ns, level, true))
            };
            let reference = reference.as_ref().map_err(Clone::clone)?;
            let lhs = if exact && !reference.iter().all(SumEstimate::is_exact) {
                image_sums(domain, t, bc, ns, level, true)?
            } else {
                lhs
            };
            let equality = scalar_orthogonal_factor(t).is_some();
            Ok(ns
                .iter()
                .zip(lhs.into_iter().zip(reference.iter().cloned()))
                .map(|(&n, (l, r))| {
                    let inp = inputs(&domain.name(), Some(t), Some(n), Some(bc_ref), l.level);
                    let report = verdict(theorem, inp, &l, factor * r.value, r.error.map(|e| factor * e), equality, exact_tol);
                    Scaled { report, lhs: l, reference: r }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_t.into_iter().flatten().collect())
}

fn verdict(
    theorem: &str,
    inputs: ReportInputs,
    lhs: &SumEstimate,
    rhs_value: f64,
    rhs_error: Option<f64>,
    equality: bool,
    exact_tol: f64,
) -> VerificationReport {
    match (lhs.error, rhs_error) {
        (None, None) => {
            if equality {
                VerificationReport::identity(theorem, inputs, lhs.value, rhs_value, exact_tol).with_equality_case(true)
            } else {
                VerificationReport::inequality(theorem, inputs, lhs.value, rhs_value, exact_tol).with_equality_case(false)
            }
        }
        (el, er) => {
            let err = el.unwrap_or(0.0) + er.unwrap_or(0.0);
            if equality {
                VerificationReport::fem_two_sided(theorem, inputs, lhs.value, rhs_value, err)
            } else {
                VerificationReport::fem_strict(theorem, inputs, lhs.value, rhs_value, err).with_equality_case(false)
            }
        }
    }
}

fn dirichlet_or_neumann(bc: BoundaryCondition) -> Result<()> {
    match bc {
        BoundaryCondition::Robin { .. } => Err(Error::InvalidBoundaryCondition(
            "this check takes dirichlet or neumann; use the Robin checks".into(),
        )),
        _ => Ok(()),
    }
}

/// `sum_n(T D) <= |T^{-1}|_HS^2 / d * sum_n(D)`.
pub fn dn_check(domain: Domain, t: &SquareMatrix, n: usize, bc: BoundaryCondition, level: Option<usize>) -> Result<VerificationReport> {
    Ok(dn_batch(domain, std::slice::from_ref(t), &[n], bc, level)?.remove(0))
}

/// [`dn_check`] for every transform and every `n`, ordered by transform,
/// then by `n`.
pub fn dn_batch(domain: Domain, ts: &[SquareMatrix], ns: &[usize], bc: BoundaryCondition, level: Option<usize>) -> Result<Vec<VerificationReport>> {
    dirichlet_or_neumann(bc)?;
    domain.symmetry_group()?;
    let out = scaled_sum_reports("thm-DN", domain, ts, ns, bc, &|_| Ok(bc), level, EXACT_TOL)?;
    Ok(out.into_iter().map(|s| s.report).collect())
}

/// Diagonal stretch by `t`. When every `t_i > 1` the stretched sum must also
/// be strictly smaller than the original.
pub fn stretch_check(domain: Domain, t: &[f64], n: usize, bc: BoundaryCondition, level: Option<usize>) -> Result<VerificationReport> {
    Ok(stretch_batch(domain, t, &[n], bc, level)?.remove(0))
}

/// [`stretch_check`] for several `n`.
pub fn stretch_batch(domain: Domain, t: &[f64], ns: &[usize], bc: BoundaryCondition, level: Option<usize>) -> Result<Vec<VerificationReport>> {
    dirichlet_or_neumann(bc)?;
    domain.symmetry_group()?;
    if t.len() != domain.dim() || t.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::InvalidInput("stretch factors must be positive, one per axis".into()));
    }
    let tm = SquareMatrix::diagonal(t);
    let out = scaled_sum_reports("cor-stretch", domain, std::slice::from_ref(&tm), ns, bc, &|_| Ok(bc), level, EXACT_TOL)?;
    let all_stretch = t.iter().all(|&x| x > 1.0);
    Ok(out
        .into_iter()
        .map(|s| {
            if !all_stretch {
                return s.report;
            }
            let slack = 2.0 * (s.lhs.error.unwrap_or(0.0) + s.reference.error.unwrap_or(0.0));
            let pass = s.lhs.value + slack < s.reference.value;
            s.report.with_subcheck("stretched-sum-decreases", s.lhs.value, s.reference.value, pass)
        })
        .collect())
}

/// `[sum_n V^{2/d}](T D) * [V^{1+2/d} / I](T^{-T} D)`.
pub fn normalized_functional(
    domain: Domain,
    t: &SquareMatrix,
    n: usize,
    bc: BoundaryCondition,
    level: Option<usize>,
    force_fem: bool,
) -> Result<SumEstimate> {
    let d = domain.dim() as f64;
    let body = domain.body()?;
    let image = body.linear_image(t)?.moments()?;
    let dual = body.linear_image(&t.inverse_transpose()?)?.moments()?;
    let geom = image.volume.powf(2.0 / d) * dual.volume.powf(1.0 + 2.0 / d) / dual.second_moment;
    let s = image_sum(domain, t, bc, n, level, force_fem)?;
    Ok(SumEstimate {
        value: s.value * geom,
        error: s.error.map(|e| e * geom),
        level: s.level,
    })
}

/// The normalized functional at `T` never exceeds its value at the identity.
pub fn regular_check(domain: Domain, t: &SquareMatrix, n: usize, bc: BoundaryCondition, level: Option<usize>) -> Result<VerificationReport> {
    domain.symmetry_group()?;
    t.invert()?;
    let id = SquareMatrix::identity(domain.dim());
    let mut lhs = normalized_functional(domain, t, n, bc, level, false)?;
    let mut rhs = normalized_functional(domain, &id, n, bc, level, !lhs.is_exact())?;
    if lhs.is_exact() != rhs.is_exact() {
        lhs = normalized_functional(domain, t, n, bc, level, true)?;
        rhs = normalized_functional(domain, &id, n, bc, level, true)?;
    }
    let equality = scalar_orthogonal_factor(t).is_some();
    let tol = if matches!(bc, BoundaryCondition::Robin { .. }) { ROBIN_TOL } else { EXACT_TOL };
    let inp = inputs(&domain.name(), Some(t), Some(n), Some(bc), lhs.level);
    Ok(verdict("cor-regular", inp, &lhs, rhs.value, rhs.error, equality, tol * rhs.value.abs().max(1.0)))
}

/// Normalized first Dirichlet functional of the box with the given sides,
/// compared with `12 pi^2` to `1e-10` relative.
pub fn box_identity_check(sides: &[f64]) -> Result<VerificationReport> {
    let t = SquareMatrix::diagonal(sides);
    let domain = Domain::Hypercube { d: sides.len() };
    let f = normalized_functional(domain, &t, 1, BoundaryCondition::Dirichlet, None, false)?;
    let target = 12.0 * PI * PI;
    let inp = inputs(&domain.name(), Some(&t), Some(1), Some(BoundaryCondition::Dirichlet), None);
    Ok(VerificationReport::identity("box-12pi2", inp, f.value, target, EXACT_TOL * target))
}

/// `lambda_1 V^{1+4/3} / I` on `diag(1, 1, eps)` applied to the unit cube.
pub fn naive_functional(eps: f64) -> Result<f64> {
    let t = SquareMatrix::diagonal(&[1.0, 1.0, eps]);
    let body = Body::from(Polytope::unit_cube(3)?).linear_image(&t)?;
    let m = body.moments()?;
    let sides = super::box_sides(&t).expect("diagonal");
    let l1 = box_spectrum(&sides, BoundaryCondition::Dirichlet, 1)?.values()[0];
    Ok(l1 * m.volume.powf(1.0 + 4.0 / 3.0) / m.second_moment)
}

pub fn naive_functional_closed_form(eps: f64) -> f64 {
    12.0 * PI * PI * (2.0 + eps.powi(-2)) * eps.powf(4.0 / 3.0) / (2.0 + eps * eps)
}

/// One report per `eps`: computed value against the closed form, plus strict
/// growth whenever `eps` decreases from the previous entry.
pub fn naive_unbounded_check(epsilons: &[f64]) -> Result<Vec<VerificationReport>> {
    let mut out = Vec::with_capacity(epsilons.len());
    let mut prev: Option<(f64, f64)> = None;
    for &eps in epsilons {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::OutOfRange {
                what: "epsilon",
                value: eps as i64,
                allowed: "(0, 1]",
            });
        }
        let v = naive_functional(eps)?;
        let c = naive_functional_closed_form(eps);
        let inp = inputs("hypercube-3", Some(&SquareMatrix::diagonal(&[1.0, 1.0, eps])), Some(1), Some(BoundaryCondition::Dirichlet), None);
        let mut rep = VerificationReport::identity("naive-unbounded", inp, v, c, EXACT_TOL * c.abs());
        if let Some((pe, pv)) = prev {
            if eps < pe {
                rep = rep.with_subcheck("grows-as-epsilon-shrinks", v, pv, v > pv);
            }
        }
        prev = Some((eps, v));
        out.push(rep);
    }
    Ok(out)
}

/// Robin sums with the image parameter `sigma |T^{-1}|_HS / sqrt d`.
pub fn robin_check(domain: Domain, t: &SquareMatrix, n: usize, sigma: f64, level: Option<usize>) -> Result<VerificationReport> {
    Ok(robin_batch(domain, std::slice::from_ref(t), &[n], sigma, level)?.remove(0))
}

/// [`robin_check`] for every transform and every `n`.
pub fn robin_batch(domain: Domain, ts: &[SquareMatrix], ns: &[usize], sigma: f64, level: Option<usize>) -> Result<Vec<VerificationReport>> {
    domain.symmetry_group()?;
    let bc = BoundaryCondition::robin(sigma)?;
    let image_bc = |t: &SquareMatrix| BoundaryCondition::robin(sigma * hs_factor(t)?.sqrt());
    let out = scaled_sum_reports("thm-robin", domain, ts, ns, bc, &image_bc, level, ROBIN_TOL)?;
    Ok(out.into_iter().map(|s| s.report).collect())
}

/// Unimodular `T`, fixed `sigma`: the normalized Robin functional at `T`
/// is at most its value at the identity.
pub fn robin_normalized_check(domain: Domain, t: &SquareMatrix, n: usize, sigma: f64, level: Option<usize>) -> Result<VerificationReport> {
    if (t.det().abs() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!("transform must have |det| = 1, got {}", t.det())));
    }
    let bc = BoundaryCondition::robin(sigma)?;
    let mut rep = regular_check(domain, t, n, bc, level)?;
    rep.theorem = "cor-robin".into();
    let ratio = t.invert()?.hs_norm() / (domain.dim() as f64).sqrt();
    Ok(rep.with_subcheck("hs-norm-over-sqrt-d-at-least-one", ratio, 1.0, ratio >= 1.0 - 1e-12))
}

/// `(tau_2 + ... + tau_n) / |T^{-T}|_HS^2` for the torus `R^d / T Z^d`.
pub fn torus_normalized_sum(t: &SquareMatrix, n: usize) -> Result<f64> {
    let lat = Lattice::new(t.clone())?;
    let s = torus_spectrum(&lat, n)?;
    Ok(s.values()[1..].iter().sum::<f64>() / lat.dual_basis().hs_norm_squared())
}

pub fn torus_check(t: &SquareMatrix, n: usize) -> Result<VerificationReport> {
    if n < 2 {
        return Err(Error::OutOfRange {
            what: "torus eigenvalue count",
            value: n as i64,
            allowed: ">= 2",
        });
    }
    let lhs = torus_normalized_sum(t, n)?;
    let rhs = torus_normalized_sum(&SquareMatrix::identity(t.dim()), n)?;
    let equality = scalar_orthogonal_factor(t).is_some();
    let inp = inputs(&format!("torus-{}", t.dim()), Some(t), Some(n), None, None);
    Ok(if equality {
        VerificationReport::identity("prop-torus", inp, lhs, rhs, EXACT_TOL).with_equality_case(true)
    } else {
        VerificationReport::inequality("prop-torus", inp, lhs, rhs, 1e-9).with_equality_case(false)
    })
}

/// The three sides of the moment identities for `D` and `T`:
/// `(|T^{-1}|^2/d, V(D)^{1+4/d}/I(D) / [V(TD)^{2/d} V(T^{-T}D)^{1+2/d} / I(T^{-T}D)],
///   I(T^{-T} D) / (|det T^{-1}| I(D)))`.
pub fn moment_identity_values(domain: Domain, t: &SquareMatrix) -> Result<(f64, f64, f64)> {
    let d = domain.dim() as f64;
    let body = domain.body()?;
    let m0 = body.moments()?;
    let mt = body.linear_image(t)?.moments()?;
    let md = body.linear_image(&t.inverse_transpose()?)?.moments()?;
    let hs = hs_factor(t)?;
    let quotient = (m0.volume.powf(1.0 + 4.0 / d) / m0.second_moment)
        / (mt.volume.powf(2.0 / d) * md.volume.powf(1.0 + 2.0 / d) / md.second_moment);
    let dagger = md.second_moment / (t.invert()?.det().abs() * m0.second_moment);
    Ok((hs, quotient, dagger))
}

/// Both moment identities, relative tolerance `1e-10`.
pub fn hsnorm_check(domain: Domain, t: &SquareMatrix) -> Result<VerificationReport> {
    domain.symmetry_group()?;
    let (hs, quotient, dagger) = moment_identity_values(domain, t)?;
    let inp = inputs(&domain.name(), Some(t), None, None, None);
    let rel = (dagger - hs).abs() / hs;
    Ok(VerificationReport::identity("lem-hsnorm", inp, quotient, hs, EXACT_TOL * hs)
        .with_subcheck("inertia-of-inverse-transpose-image", rel, EXACT_TOL, rel <= EXACT_TOL))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentShape {
    Triangle,
    Parallelogram,
    Ellipse,
}

/// `A^2/I` on `T(D)` and on its polar dual, for `D` the centred equilateral
/// triangle, square or disk.
pub fn momentratio_check(shape: MomentShape, t: &SquareMatrix) -> Result<VerificationReport> {
    if t.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: t.dim() });
    }
    let base: Body = match shape {
        MomentShape::Triangle => Polytope::regular_simplex(2)?.into(),
        MomentShape::Parallelogram => Polytope::hypercube(2, 1.0)?.into(),
        MomentShape::Ellipse => Ellipsoid::ball(2, 1.0)?.into(),
    };
    let name = match shape {
        MomentShape::Triangle => "triangle",
        MomentShape::Parallelogram => "parallelogram",
        MomentShape::Ellipse => "ellipse",
    };
    momentratio_body_check(name, &base.linear_image(t)?, Some(t))
}

/// `A^2/I` on a planar body and on its polar dual. The body must have its
/// centroid at the origin.
pub fn momentratio_body_check(name: &str, omega: &Body, t: Option<&SquareMatrix>) -> Result<VerificationReport> {
    if omega.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: omega.dim() });
    }
    let m = omega.moments()?;
    let offset = norm(&m.centroid);
    if offset > 1e-9 * m.volume.sqrt() {
        return Err(Error::CentroidNotAtOrigin { offset });
    }
    let md = omega.polar_dual()?.moments()?;
    let lhs = m.volume * m.volume / m.second_moment;
    let rhs = md.volume * md.volume / md.second_moment;
    let inp = inputs(name, t, None, None, None);
    Ok(VerificationReport::identity("lem-momentratio", inp, lhs, rhs, GEOMETRY_TOL * lhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_stretch_example() {
        let t = SquareMatrix::diagonal(&[2.0, 1.0, 1.0]);
        let r = dn_check(Domain::Hypercube { d: 3 }, &t, 3, BoundaryCondition::Dirichlet, None).unwrap();
        assert!((r.lhs / (PI * PI) - 9.5).abs() < 1e-12);
        assert!((r.rhs / (PI * PI) - 11.25).abs() < 1e-12);
        assert!(r.pass && r.margin > 1.0);
    }

    #[test]
    fn pure_scaling_is_equality() {
        let t = SquareMatrix::identity(3).scale(1.7);
        let r = dn_check(Domain::Hypercube { d: 3 }, &t, 5, BoundaryCondition::Neumann, None).unwrap();
        assert_eq!(r.equality_case, Some(true));
        assert!(r.pass && r.margin.abs() < 1e-12);
    }

    #[test]
    fn neumann_uniform_stretch_quarters_the_sum() {
        let r = stretch_check(Domain::Hypercube { d: 3 }, &[2.0; 3], 5, BoundaryCondition::Neumann, None).unwrap();
        let orig = box_spectrum(&[1.0; 3], BoundaryCondition::Neumann, 5).unwrap().sum(5);
        assert!((r.lhs - orig / 4.0).abs() < 1e-12);
        assert!(r.pass);
    }

    #[test]
    fn naive_values() {
        assert!((naive_functional(1.0).unwrap() - 12.0 * PI * PI).abs() < 1e-12);
        let reps = naive_unbounded_check(&[1e-1, 1e-2, 1e-3]).unwrap();
        assert!(reps.iter().all(|r| r.pass));
    }

    #[test]
    fn robin_orthogonal_equality() {
        let t = SquareMatrix::from_rows(&[vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0]]).unwrap();
        let r = robin_check(Domain::Hypercube { d: 3 }, &t, 4, 1.0, None).unwrap();
        assert!(r.pass && r.margin.abs() < 1e-12);
        let s = robin_check(Domain::Hypercube { d: 3 }, &SquareMatrix::diagonal(&[2.0, 1.0, 1.0]), 4, 1.0, None).unwrap();
        assert!(s.pass && s.margin > 0.0);
    }

    #[test]
    fn torus_identity_and_square() {
        let r = torus_check(&SquareMatrix::identity(2), 5).unwrap();
        assert!(r.pass && r.margin == 0.0);
        assert!((r.lhs - 8.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn momentratio_square_and_disk() {
        for shape in [MomentShape::Parallelogram, MomentShape::Ellipse, MomentShape::Triangle] {
            let r = momentratio_check(shape, &SquareMatrix::identity(2)).unwrap();
            assert!(r.pass, "{shape:?}");
        }
    }
}
