use serde::Serialize;

use crate::error::{Error, Result};
use crate::numfmt;

/// Richardson extrapolation of a sequence computed on uniformly refined
/// meshes, assuming an `O(h^2)` leading error.
#[derive(Clone, Debug, Serialize)]
pub struct RichardsonEstimate {
    /// `(4 v_last - v_prev) / 3`
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub extrapolated: f64,
    /// `log2((v0 - v1)/(v1 - v2))` over the last three levels, when defined.
    #[serde(serialize_with = "numfmt::serialize_opt_f64")]
    pub rate: Option<f64>,
    /// With three or more levels, the change between the last two
    /// extrapolants; otherwise `|v_last - v_prev| / 3`.
    #[serde(serialize_with = "numfmt::serialize_f64")]
    pub error_estimate: f64,
    /// Whether the sequence is non-increasing.
    pub monotone: bool,
}

fn extrapolate(prev: f64, last: f64) -> f64 {
    (4.0 * last - prev) / 3.0
}

pub fn richardson_extrapolate(values: &[f64]) -> Result<RichardsonEstimate> {
    let k = values.len();
    if k < 2 {
        return Err(Error::InvalidInput("Richardson extrapolation needs two levels".into()));
    }
    let extrapolated = extrapolate(values[k - 2], values[k - 1]);
    let (rate, error_estimate) = if k >= 3 {
        let (v0, v1, v2) = (values[k - 3], values[k - 2], values[k - 1]);
        let (d0, d1) = (v0 - v1, v1 - v2);
        let rate = if d0 != 0.0 && d1 != 0.0 && (d0 > 0.0) == (d1 > 0.0) {
            Some((d0 / d1).log2())
        } else {
            None
        };
        (rate, (extrapolated - extrapolate(v0, v1)).abs())
    } else {
        (None, (values[k - 1] - values[k - 2]).abs() / 3.0)
    };
    let monotone = values.windows(2).all(|w| w[1] <= w[0]);
    Ok(RichardsonEstimate {
        extrapolated,
        rate,
        error_estimate,
        monotone,
    })
}
