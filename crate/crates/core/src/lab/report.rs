use serde::Serialize;

use crate::linalg::SquareMatrix;
use crate::numfmt;

/// Relative margin below which a case outside the known equality set is
/// flagged as near-equality.
pub const NEAR_EQUALITY_REL: f64 = 1e-6;

/// What was checked, for the `inputs` object of a report.
#[derive(Clone, Debug, Default, Serialize)]
pub struct ReportInputs {
    pub domain: String,
    #[serde(serialize_with = "serialize_opt_matrix")]
    pub transform: Option<SquareMatrix>,
    pub n: Option<usize>,
    pub bc: Option<String>,
    #[serde(serialize_with = "numfmt::serialize_opt_f64")]
    pub sigma: Option<f64>,
    pub seed: Option<u64>,
    pub level: Option<usize>,
}

fn serialize_opt_matrix<S: serde::Serializer>(m: &Option<SquareMatrix>, s: S) -> Result<S::Ok, S::Error> {
    match m {
        Some(m) => numfmt::serialize_matrix(&m.to_rows(), s),
        None => s.serialize_none(),
    }
}

/// A named auxiliary assertion carried inside a report.
#[derive(Clone, Debug, Serialize)]
pub struct SubCheck {
    pub name: String,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub value: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub bound: f64,
    pub pass: bool,
}

/// Both sides of one checked statement with its verdict.
///
/// `margin = rhs - lhs`. Inequalities pass when `margin >= -tolerance`,
/// identities when `|margin| <= tolerance`, strict finite-element checks when
/// `margin > tolerance`. Any failing sub-check fails the report.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub theorem: String,
    pub inputs: ReportInputs,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub lhs: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub rhs: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub margin: f64,
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub tolerance: f64,
    #[serde(serialize_with = "numfmt::serialize_opt_f64")]
    pub discretization_error: Option<f64>,
    pub pass: bool,
    /// Set when the transform is a scalar multiple of an orthogonal matrix,
    /// in which case the report is judged two-sided.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equality_case: Option<bool>,
    /// Outside the known equality set, yet `|margin| <= 1e-6 |rhs|`. Logged
    /// for inspection only; it does not affect `pass`.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub near_equality: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub subchecks: Vec<SubCheck>,
}

impl VerificationReport {
    fn base(theorem: &str, inputs: ReportInputs, lhs: f64, rhs: f64, tolerance: f64, pass: bool) -> Self {
        Self {
            theorem: theorem.to_string(),
            inputs,
            lhs,
            rhs,
            margin: rhs - lhs,
            tolerance,
            discretization_error: None,
            pass,
            equality_case: None,
            near_equality: false,
            subchecks: Vec::new(),
        }
    }

    pub fn inequality(theorem: &str, inputs: ReportInputs, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let pass = rhs - lhs >= -tolerance;
        Self::base(theorem, inputs, lhs, rhs, tolerance, pass)
    }

    pub fn identity(theorem: &str, inputs: ReportInputs, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let pass = (rhs - lhs).abs() <= tolerance;
        Self::base(theorem, inputs, lhs, rhs, tolerance, pass)
    }

    /// Strict finite-element inequality: passes only if the margin exceeds
    /// twice the summed discretization error of both sides.
    pub fn fem_strict(theorem: &str, inputs: ReportInputs, lhs: f64, rhs: f64, error: f64) -> Self {
        let tolerance = 2.0 * error;
        let pass = rhs - lhs > tolerance;
        let mut r = Self::base(theorem, inputs, lhs, rhs, tolerance, pass);
        r.discretization_error = Some(error);
        r
    }

    /// Finite-element equality case: `|margin| <= 2 error`.
    pub fn fem_two_sided(theorem: &str, inputs: ReportInputs, lhs: f64, rhs: f64, error: f64) -> Self {
        let tolerance = 2.0 * error;
        let pass = (rhs - lhs).abs() <= tolerance;
        let mut r = Self::base(theorem, inputs, lhs, rhs, tolerance, pass);
        r.discretization_error = Some(error);
        r.equality_case = Some(true);
        r
    }

    pub fn with_equality_case(mut self, equality: bool) -> Self {
        self.equality_case = Some(equality);
        self.near_equality = !equality && self.rhs != 0.0 && self.margin.abs() <= NEAR_EQUALITY_REL * self.rhs.abs();
        self
    }

    /// Adds a named sub-check with its own verdict.
    pub fn with_subcheck(mut self, name: &str, value: f64, bound: f64, pass: bool) -> Self {
        self.pass &= pass;
        self.subchecks.push(SubCheck {
            name: name.to_string(),
            value,
            bound,
            pass,
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serialises")
    }
}
