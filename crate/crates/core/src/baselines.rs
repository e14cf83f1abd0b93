//! Reference models: 3GPP UMi LOS probability, free space and LOS-only loss.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, ModelError, Result};
use crate::los::LosQuery;
use crate::pathloss::{friis_db, two_ray_los_db, PathLossOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BaselineKind {
    #[serde(rename = "3gpp-umi-los")]
    ThreeGppUmiLos,
    #[serde(rename = "free-space")]
    FreeSpace,
    #[serde(rename = "los-only")]
    LosOnly,
}

impl BaselineKind {
    pub fn tag(self) -> &'static str {
        match self {
            BaselineKind::ThreeGppUmiLos => "3gpp-umi-los",
            BaselineKind::FreeSpace => "free-space",
            BaselineKind::LosOnly => "los-only",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for BaselineKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "3gpp-umi-los" => Ok(BaselineKind::ThreeGppUmiLos),
            "free-space" => Ok(BaselineKind::FreeSpace),
            "los-only" => Ok(BaselineKind::LosOnly),
            other => Err(ModelError::UnsupportedModel(format!(
                "unknown baseline `{other}`"
            ))),
        }
    }
}

/// Breakpoint distance `d_0` and decay length `p_1` of the UMi curve.
pub fn umi_parameters(h_r: f64) -> (f64, f64) {
    let lg = h_r.log10();
    let d0 = 18f64.max(294.05 * lg - 432.94);
    let p1 = 233.98 * lg - 0.95;
    (d0, p1)
}

/// 3GPP UMi LOS probability for an aerial UE at height `h_r`.
pub fn plos_3gpp_umi(d: f64, h_r: f64) -> Result<f64> {
    ensure(
        (1.5..=300.0).contains(&h_r),
        "h_r",
        h_r,
        "1.5 m <= h_r <= 300 m, the 3GPP aerial UE height limit",
    )?;
    ensure(d >= 0.0, "d", d, "d >= 0")?;
    let (d0, p1) = umi_parameters(h_r);
    if d <= d0 {
        return Ok(1.0);
    }
    let r = d0 / d;
    Ok(r + (-d / p1).exp() * (1.0 - r))
}

/// Path loss of a reference model.
pub fn baseline_loss_db(
    kind: BaselineKind,
    query: &LosQuery,
    gain: f64,
    opts: &PathLossOptions,
) -> Result<f64> {
    match kind {
        BaselineKind::FreeSpace => friis_db(query.geom.d_los(), query.carrier.wavelength(), gain),
        BaselineKind::LosOnly => Ok(two_ray_los_db(query, gain, opts)?.loss_db),
        BaselineKind::ThreeGppUmiLos => Err(ModelError::UnsupportedModel(
            "3GPP UMi is available as a LOS probability only; no path-loss curve is defined".into(),
        )),
    }
}
