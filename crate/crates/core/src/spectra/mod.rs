//! Closed-form and root-found Laplace spectra.

mod bessel;
mod boxes;
mod lame;
mod lattice;

pub use bessel::{
    ball_spectrum, bessel_j, bessel_j_series, bessel_j0_first_zero_bracket, spherical_bessel_j,
};
pub use boxes::{box_spectrum, interval_robin_eigenvalues};
pub use lame::lame_triangle_spectrum;
pub use lattice::{shortest_dual_vectors, torus_spectrum, DualVector, Lattice};

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative gap below which neighbouring values count as one eigenvalue.
pub const MULTIPLICITY_GAP: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
    Robin { sigma: f64 },
}

impl BoundaryCondition {
    /// Builds a condition from its name, requiring `sigma` exactly for Robin.
    pub fn parse(kind: &str, sigma: Option<f64>) -> Result<Self> {
        match (kind, sigma) {
            ("dirichlet", None) => Ok(Self::Dirichlet),
            ("neumann", None) => Ok(Self::Neumann),
            ("robin", Some(s)) => Self::robin(s),
            ("robin", None) => Err(Error::InvalidBoundaryCondition("robin needs sigma".into())),
            ("dirichlet" | "neumann", Some(_)) => Err(Error::InvalidBoundaryCondition(
                "sigma is only allowed with robin".into(),
            )),
            (other, _) => Err(Error::InvalidBoundaryCondition(format!("unknown kind {other:?}"))),
        }
    }

    pub fn robin(sigma: f64) -> Result<Self> {
        if sigma > 0.0 && sigma.is_finite() {
            Ok(Self::Robin { sigma })
        } else {
            Err(Error::InvalidBoundaryCondition(format!("sigma must be positive, got {sigma}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
            Self::Robin { .. } => "robin",
        }
    }

    pub fn sigma(&self) -> Option<f64> {
        match self {
            Self::Robin { sigma } => Some(*sigma),
            _ => None,
        }
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Robin { sigma } => write!(f, "robin(sigma={sigma})"),
            other => f.write_str(other.name()),
        }
    }
}

/// How the values were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    RootFound { tol: f64 },
    Fem { h: f64 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => f.write_str("exact"),
            Self::RootFound { tol } => write!(f, "root-found({tol:e})"),
            Self::Fem { h } => write!(f, "fem(h={h:e})"),
        }
    }
}

/// The first few eigenvalues, ascending and repeated by multiplicity.
///
/// `bc` is `None` for flat tori.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
    bc: Option<BoundaryCondition>,
    provenance: Provenance,
}

/// One CSV row of a spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRow {
    pub index: usize,
    pub value: f64,
    pub multiplicity: usize,
    pub provenance: String,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>, bc: Option<BoundaryCondition>, provenance: Provenance) -> Self {
        values.sort_by(f64::total_cmp);
        Self {
            values,
            bc,
            provenance,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn bc(&self) -> Option<BoundaryCondition> {
        self.bc
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Sum of the first `n` values (all of them if fewer are stored).
    pub fn sum(&self, n: usize) -> f64 {
        self.values.iter().take(n).sum()
    }

    /// Distinct values with multiplicities, merging neighbours closer than
    /// [`MULTIPLICITY_GAP`] relative. The last cluster only counts the values
    /// that were computed.
    pub fn clusters(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        let mut prev = f64::NAN;
        for &v in &self.values {
            let same = out.last().is_some() && (v - prev).abs() <= MULTIPLICITY_GAP * v.abs().max(prev.abs());
            if same {
                out.last_mut().unwrap().1 += 1;
            } else {
                out.push((v, 1));
            }
            prev = v;
        }
        out
    }

    /// Per-value multiplicities aligned with [`values`](Self::values).
    pub fn multiplicities(&self) -> Vec<usize> {
        self.clusters()
            .into_iter()
            .flat_map(|(_, m)| std::iter::repeat_n(m, m))
            .collect()
    }

    pub fn rows(&self) -> Vec<SpectrumRow> {
        let prov = self.provenance.to_string();
        self.values
            .iter()
            .zip(self.multiplicities())
            .enumerate()
            .map(|(i, (&value, multiplicity))| SpectrumRow {
                index: i + 1,
                value,
                multiplicity,
                provenance: prov.clone(),
            })
            .collect()
    }

    /// Same spectrum with every value multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
            bc: self.bc,
            provenance: self.provenance,
        }
    }
}

pub(crate) fn check_count(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::OutOfRange {
            what: "eigenvalue count",
            value: 0,
            allowed: ">= 1",
        })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_requires_sigma_exactly_for_robin() {
        assert_eq!(BoundaryCondition::parse("dirichlet", None).unwrap(), BoundaryCondition::Dirichlet);
        assert!(BoundaryCondition::parse("robin", None).is_err());
        assert!(BoundaryCondition::parse("neumann", Some(1.0)).is_err());
        assert!(BoundaryCondition::parse("robin", Some(-1.0)).is_err());
        assert_eq!(
            BoundaryCondition::parse("robin", Some(2.0)).unwrap(),
            BoundaryCondition::Robin { sigma: 2.0 }
        );
    }

    #[test]
    fn clusters_merge_close_values() {
        let s = Spectrum::new(vec![2.0, 1.0, 2.0 + 1e-12, 3.0], None, Provenance::Exact);
        assert_eq!(s.clusters(), vec![(1.0, 1), (2.0, 2), (3.0, 1)]);
        assert_eq!(s.multiplicities(), vec![1, 2, 2, 1]);
        assert_eq!(s.rows()[1].provenance, "exact");
    }
}
