//! Evidence gathering for the polar-dual Neumann functional on random convex
//! polygons. Nothing here asserts or refutes anything about the disk; the
//! summary flags rows that come close.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::sampling::random_convex_polygon;
use crate::error::{Error, Result};
use crate::fem::level_sequence;
use crate::geometry::Polytope;
use crate::numfmt::{self, sig17};
use crate::spectra::{ball_spectrum, BoundaryCondition};

/// Vertex count of the control polygon that stands in for the disk.
pub const CONTROL_SIDES: usize = 64;

#[derive(Clone, Debug)]
pub struct ExplorerConfig {
    pub samples: usize,
    /// Each polygon yields one row per entry.
    pub ns: Vec<usize>,
    pub seed: u64,
    /// Finest finite-element level; levels `level - 2 ..= level` are solved.
    pub level: usize,
    /// Also evaluate the regular 64-gon (reported in the summary only).
    pub control: bool,
}

impl Default for ExplorerConfig {
    fn default() -> Self {
        Self { samples: 20, ns: vec![2, 3], seed: 0, level: 4, control: true }
    }
}

/// One CSV row. `fem_error` is kept for the summary and not written out.
#[derive(Clone, Debug, Serialize)]
pub struct ExplorerRow {
    pub sample_id: usize,
    /// `"x y;x y;..."` in counter-clockwise order.
    pub polygon_vertices: String,
    pub n: usize,
    /// `(mu_2 + ... + mu_n) A(P) * A(P°)^2 / I(P°)`.
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub functional_dual: f64,
    /// `(mu_2 + ... + mu_n) A(P)^3 / I(P)`.
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub functional_direct: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub disk_value: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub ratio_to_disk: f64,
    #[serde(skip)]
    pub fem_error: f64,
}

impl ExplorerRow {
    /// `functional_dual - 2 fem_error` lies above the disk value.
    pub fn exceeds_disk(&self) -> bool {
        self.functional_dual - 2.0 * self.fem_error > self.disk_value
    }

    /// Not separated from the disk value by the error margin.
    pub fn is_candidate(&self) -> bool {
        self.functional_dual + 2.0 * self.fem_error >= self.disk_value
    }
}

/// The control polygon's values for one `n`.
#[derive(Clone, Debug, Serialize)]
pub struct ControlRow {
    pub n: usize,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub functional_dual: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub functional_direct: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub ratio_to_disk: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExplorerSummary {
    pub samples: usize,
    pub rows: usize,
    pub seed: u64,
    pub level: usize,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub max_functional_dual: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub max_ratio_to_disk: f64,
    /// `(sample_id, n)` of rows within the error margin of the disk value.
    pub candidates: Vec<(usize, usize)>,
    /// No row exceeds the disk value by more than twice its error estimate.
    pub all_below_disk_with_margin: bool,
    /// Control polygon rows, one per `n`.
    pub control: Vec<ControlRow>,
    /// Largest `|functional_dual / disk - 1|` over the control rows.
    #[serde(serialize_with = "numfmt::serialize_opt_f64")]
    pub control_relative_deviation: Option<f64>,
    /// Samples dropped because their mesh exceeded the budget. The rows of
    /// the remaining samples are still reported.
    pub skipped_samples: Vec<usize>,
    pub budget_exceeded: bool,
}

/// `2 pi^2 (mu_2 + ... + mu_n)` of the unit disk: the functional of the disk.
pub fn disk_reference(n: usize) -> Result<f64> {
    let s = ball_spectrum(1.0, 2, BoundaryCondition::Neumann, n)?;
    Ok(2.0 * std::f64::consts::PI.powi(2) * s.sum(n))
}

fn vertex_string(p: &Polytope) -> String {
    p.vertices()
        .iter()
        .map(|v| format!("{} {}", sig17(v[0]), sig17(v[1])))
        .collect::<Vec<_>>()
        .join(";")
}

fn evaluate(id: usize, poly: &Polytope, ns: &[usize], disks: &[f64], level: usize) -> Result<Vec<ExplorerRow>> {
    let n_max = *ns.iter().max().expect("non-empty");
    let m = poly.moments()?;
    let md = poly.polar_dual()?.moments()?;
    let seq = level_sequence(poly, BoundaryCondition::Neumann, n_max, level.saturating_sub(2), level)?;
    let verts = vertex_string(poly);
    ns.iter()
        .zip(disks)
        .map(|(&n, &disk)| {
            let est = seq.sum_estimate(n)?;
            let a = m.volume;
            let functional_dual = est.extrapolated * a * md.volume.powi(2) / md.second_moment;
            let functional_direct = est.extrapolated * a.powi(3) / m.second_moment;
            let scale = functional_dual / est.extrapolated;
            Ok(ExplorerRow {
                sample_id: id,
                polygon_vertices: verts.clone(),
                n,
                functional_dual,
                functional_direct,
                disk_value: disk,
                ratio_to_disk: functional_dual / disk,
                fem_error: est.error_estimate * scale,
            })
        })
        .collect()
}

/// Samples `config.samples` centred random polygons from `config.seed` and
/// evaluates both functionals for every `n` in `config.ns`. Rows are ordered
/// by sample, then by `n`.
pub fn conjecture_explorer(config: &ExplorerConfig) -> Result<(Vec<ExplorerRow>, ExplorerSummary)> {
    if config.ns.is_empty() || config.ns.iter().any(|&n| n < 2) {
        return Err(Error::InvalidInput("explorer needs n >= 2".into()));
    }
    if config.level < 2 {
        return Err(Error::OutOfRange { what: "explorer level", value: config.level as i64, allowed: ">= 2" });
    }
    let disks: Vec<f64> = config.ns.iter().map(|&n| disk_reference(n)).collect::<Result<_>>()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let polys: Vec<Polytope> = (0..config.samples).map(|_| random_convex_polygon(&mut rng)).collect();
    let per_sample: Vec<Result<Vec<ExplorerRow>>> = polys
        .par_iter()
        .enumerate()
        .map(|(i, p)| evaluate(i, p, &config.ns, &disks, config.level))
        .collect();
    let mut rows = Vec::new();
    let mut skipped_samples = Vec::new();
    for (i, r) in per_sample.into_iter().enumerate() {
        match r {
            Ok(r) => rows.extend(r),
            Err(Error::BudgetExceeded(_)) => skipped_samples.push(i),
            Err(e) => return Err(e),
        }
    }

    let control = if config.control {
        let p = Polytope::regular_polygon(CONTROL_SIDES, 1.0)?;
        evaluate(0, &p, &config.ns, &disks, config.level)?
            .into_iter()
            .map(|r| ControlRow {
                n: r.n,
                functional_dual: r.functional_dual,
                functional_direct: r.functional_direct,
                ratio_to_disk: r.ratio_to_disk,
            })
            .collect()
    } else {
        Vec::new()
    };
    let control_relative_deviation = control
        .iter()
        .map(|r| (r.ratio_to_disk - 1.0).abs())
        .reduce(f64::max);

    let summary = ExplorerSummary {
        samples: config.samples,
        rows: rows.len(),
        seed: config.seed,
        level: config.level,
        max_functional_dual: rows.iter().map(|r| r.functional_dual).fold(f64::NEG_INFINITY, f64::max),
        max_ratio_to_disk: rows.iter().map(|r| r.ratio_to_disk).fold(f64::NEG_INFINITY, f64::max),
        candidates: rows.iter().filter(|r| r.is_candidate()).map(|r| (r.sample_id, r.n)).collect(),
        all_below_disk_with_margin: rows.iter().all(|r| !r.exceeds_disk()),
        control,
        control_relative_deviation,
        budget_exceeded: !skipped_samples.is_empty(),
        skipped_samples,
    };
    Ok((rows, summary))
}
