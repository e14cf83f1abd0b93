//! LOS, NLOS and link-state-blended path loss.
//!
//! All public results are positive losses in dB. The LOS branch is a
//! probabilistic two-ray model where the ground ray is present with
//! probability `P_GR`. The NLOS branch adds single knife-edge diffraction
//! over the expected tallest building to free-space loss. The two are
//! blended by the LOS probability.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::environment::{discrete_building_count, expected_max_height, MaxHeightMode};
use crate::error::{ensure, Result};
use crate::los::{ground_reflection_probability, plos, LosQuery};

/// Lower validity bound of the knife-edge loss approximation.
pub const KED_MIN_V: f64 = -0.78;

/// Domain in which the LOS and NLOS losses are averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlendMode {
    /// `P L_los[dB] + (1 - P) L_nlos[dB]`.
    #[default]
    Db,
    /// Average the linear channel gains, then convert to dB.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathLossOptions {
    /// Ground reflection coefficient `Gamma`.
    pub reflection_coefficient: f64,
    /// Loss reported when the two-ray sum hits an interference null.
    pub ceiling_db: f64,
    pub blend: BlendMode,
    pub max_height: MaxHeightMode,
}

impl Default for PathLossOptions {
    fn default() -> Self {
        Self {
            reflection_coefficient: 1.0,
            ceiling_db: 300.0,
            blend: BlendMode::Db,
            max_height: MaxHeightMode::Corrected,
        }
    }
}

/// Free-space loss `20 log10(4 pi d / lambda) - 10 log10(G)`.
pub fn friis_db(d_los: f64, wavelength: f64, gain: f64) -> Result<f64> {
    ensure(d_los > 0.0, "d_los", d_los, "d_los > 0")?;
    ensure(wavelength > 0.0, "wavelength", wavelength, "lambda > 0")?;
    ensure(gain > 0.0, "gain", gain, "G > 0 (linear)")?;
    Ok(20.0 * (4.0 * PI * d_los / wavelength).log10() - 10.0 * gain.log10())
}

/// Excess path of the ground-reflected ray as a phase, `(2 pi / lambda)(d_refl - d_los)`.
pub fn reflection_phase(query: &LosQuery) -> f64 {
    let g = &query.geom;
    2.0 * PI / query.carrier.wavelength() * (g.d_reflected() - g.d_los())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoRayLoss {
    pub loss_db: f64,
    pub p_gr: f64,
    pub phase: f64,
    /// The interference factor vanished and `loss_db` is the ceiling.
    pub clamped: bool,
}

/// Two-ray LOS loss with the reflected ray weighted by `P_GR`.
pub fn two_ray_los_db(query: &LosQuery, gain: f64, opts: &PathLossOptions) -> Result<TwoRayLoss> {
    let p_gr = ground_reflection_probability(query)?;
    two_ray_with_reflection(query, gain, p_gr, opts)
}

/// Two-ray LOS loss for a given reflection weight (`P_GR` or a per-trial
/// 0/1 realization).
pub fn two_ray_with_reflection(
    query: &LosQuery,
    gain: f64,
    reflection_weight: f64,
    opts: &PathLossOptions,
) -> Result<TwoRayLoss> {
    let friis = friis_db(query.geom.d_los(), query.carrier.wavelength(), gain)?;
    let phase = reflection_phase(query);
    let a = reflection_weight * opts.reflection_coefficient;
    // |1 - a e^{j phase}|^2
    let factor = (1.0 - a * phase.cos()).powi(2) + (a * phase.sin()).powi(2);
    let raw = friis - 10.0 * factor.log10();
    let clamped = raw.is_nan() || raw > opts.ceiling_db;
    Ok(TwoRayLoss {
        loss_db: if clamped { opts.ceiling_db } else { raw },
        p_gr: reflection_weight,
        phase,
        clamped,
    })
}

/// Lower bound of the Fresnel-Kirchhoff parameter, `h sqrt(8 / (lambda d))`.
pub fn diffraction_parameter(h: f64, d: f64, wavelength: f64) -> Result<f64> {
    ensure(d > 0.0, "d", d, "d > 0")?;
    ensure(wavelength > 0.0, "wavelength", wavelength, "lambda > 0")?;
    Ok(h * (8.0 / (wavelength * d)).sqrt())
}

/// Fresnel-Kirchhoff parameter at an edge `d1` and `d2` from the terminals.
pub fn diffraction_parameter_at(h: f64, d1: f64, d2: f64, wavelength: f64) -> f64 {
    h * (2.0 * (d1 + d2) / (wavelength * d1 * d2)).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diffraction {
    pub loss_db: f64,
    /// `v < -0.78`: outside the approximation; loss reported as 0 dB.
    pub out_of_domain: bool,
}

/// Single knife-edge diffraction loss.
pub fn ked_loss_db(v: f64) -> Diffraction {
    if v < KED_MIN_V {
        return Diffraction {
            loss_db: 0.0,
            out_of_domain: true,
        };
    }
    let u = v - 0.1;
    Diffraction {
        loss_db: 6.9 + 20.0 * ((u * u + 1.0).sqrt() + u).log10(),
        out_of_domain: false,
    }
}

/// Expected height of the tallest of `n` buildings above the mean ray
/// height. Negative when the ray clears the expected tallest building.
pub fn expected_obstacle_height(query: &LosQuery, n: u32, mode: MaxHeightMode) -> Result<f64> {
    let g = &query.geom;
    let top = expected_max_height(n, query.env.sigma_h(), g.min_height(), mode)?;
    Ok(top - g.h_r() / 2.0 - g.h_t() / 2.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlosLoss {
    pub loss_db: f64,
    pub n_buildings: u32,
    pub obstacle_height: f64,
    pub v: f64,
    pub out_of_domain: bool,
}

/// Free-space loss plus knife-edge loss over the expected tallest building.
pub fn nlos_loss_db(query: &LosQuery, gain: f64, opts: &PathLossOptions) -> Result<NlosLoss> {
    let n = discrete_building_count(query.expected_buildings());
    let h = expected_obstacle_height(query, n, opts.max_height)?;
    let v = diffraction_parameter(h, query.geom.d(), query.carrier.wavelength())?;
    let ked = ked_loss_db(v);
    let friis = friis_db(query.geom.d_los(), query.carrier.wavelength(), gain)?;
    Ok(NlosLoss {
        loss_db: friis + ked.loss_db,
        n_buildings: n,
        obstacle_height: h,
        v,
        out_of_domain: ked.out_of_domain,
    })
}

/// Per-query path-loss record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossBreakdown {
    pub p_los: f64,
    pub pl_los_db: f64,
    pub pl_nlos_db: f64,
    pub total_db: f64,
    pub n_buildings: u32,
    pub e_obstacle_height: f64,
    pub p_gr: f64,
    pub los_clamped: bool,
    pub diffraction_out_of_domain: bool,
}

/// Blend of two dB losses under `mode`.
pub fn blend_db(p_los: f64, los_db: f64, nlos_db: f64, mode: BlendMode) -> f64 {
    match mode {
        BlendMode::Db => p_los * los_db + (1.0 - p_los) * nlos_db,
        BlendMode::Linear => {
            let g =
                p_los * 10f64.powf(-los_db / 10.0) + (1.0 - p_los) * 10f64.powf(-nlos_db / 10.0);
            -10.0 * g.log10()
        }
    }
}

/// Total path loss weighted by the link-state probability.
pub fn total_loss(
    query: &LosQuery,
    gain: f64,
    opts: &PathLossOptions,
) -> Result<PathLossBreakdown> {
    let p_los = plos(query);
    let los = two_ray_los_db(query, gain, opts)?;
    let nlos = nlos_loss_db(query, gain, opts)?;
    Ok(PathLossBreakdown {
        p_los,
        pl_los_db: los.loss_db,
        pl_nlos_db: nlos.loss_db,
        total_db: blend_db(p_los, los.loss_db, nlos.loss_db, opts.blend),
        n_buildings: nlos.n_buildings,
        e_obstacle_height: nlos.obstacle_height,
        p_gr: los.p_gr,
        los_clamped: los.clamped,
        diffraction_out_of_domain: nlos.out_of_domain,
    })
}
