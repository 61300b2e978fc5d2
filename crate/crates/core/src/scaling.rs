use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{MultiObjectiveSet, QuboInstance};

/// How objectives are rescaled before equal-weight scalarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalingMethod {
    Original,
    RoofDual,
    Standardize,
}

impl ScalingMethod {
    pub const ALL: [ScalingMethod; 3] = [ScalingMethod::Original, ScalingMethod::RoofDual, ScalingMethod::Standardize];

    pub fn as_str(self) -> &'static str {
        match self {
            ScalingMethod::Original => "original",
            ScalingMethod::RoofDual => "roof_dual",
            ScalingMethod::Standardize => "standardize",
        }
    }

    /// Stable index used for seed derivation.
    pub fn id(self) -> u64 {
        match self {
            ScalingMethod::Original => 0,
            ScalingMethod::RoofDual => 1,
            ScalingMethod::Standardize => 2,
        }
    }
}

impl fmt::Display for ScalingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScalingMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "original" | "none" => Ok(ScalingMethod::Original),
            "roof_dual" | "roof-dual" => Ok(ScalingMethod::RoofDual),
            "standardize" => Ok(ScalingMethod::Standardize),
            other => Err(Error::InvalidConfig(format!("unknown scaling method {other:?}"))),
        }
    }
}

/// What was applied to one objective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub index: usize,
    pub method: ScalingMethod,
    /// Factor the objective matrix was multiplied by.
    pub scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

impl ScalingReport {
    pub fn identity(index: usize) -> Self {
        Self { index, method: ScalingMethod::Original, scale: 1.0, sigma: None, mean: None, lower: None, upper: None }
    }
}

/// Scaling of a single objective; `index` is recorded in the report as given.
pub fn report_for(method: ScalingMethod, index: usize, q: &QuboInstance) -> Result<ScalingReport> {
    match method {
        ScalingMethod::Original => Ok(ScalingReport::identity(index)),
        ScalingMethod::RoofDual => {
            let r = crate::roofdual::roof_dual_range(q);
            if !(r.width > 0.0 && r.width.is_finite()) {
                return Err(Error::ZeroWidth { index });
            }
            Ok(ScalingReport {
                index,
                method,
                scale: 1.0 / r.width,
                sigma: None,
                mean: None,
                lower: Some(r.lower),
                upper: Some(r.upper),
            })
        }
        ScalingMethod::Standardize => {
            let var = crate::moments::variance_fast(q);
            if !(var > 0.0 && var.is_finite()) {
                return Err(Error::ZeroVariance { index });
            }
            let sigma = var.sqrt();
            Ok(ScalingReport {
                index,
                method,
                scale: 1.0 / sigma,
                sigma: Some(sigma),
                mean: Some(crate::moments::mean_uniform(q)),
                lower: None,
                upper: None,
            })
        }
    }
}

/// Rescales every objective of `set` by `method`.
pub fn apply(method: ScalingMethod, set: &MultiObjectiveSet) -> Result<(MultiObjectiveSet, Vec<ScalingReport>)> {
    let reports = set
        .objectives()
        .iter()
        .enumerate()
        .map(|(i, q)| report_for(method, i, q))
        .collect::<Result<Vec<_>>>()?;
    let factors: Vec<f64> = reports.iter().map(|r| r.scale).collect();
    Ok((set.rescaled(&factors)?, reports))
}
