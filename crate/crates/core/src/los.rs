//! Line-of-sight probability over a Rayleigh built-up area.
//!
//! One building, placed uniformly along the link, blocks the direct ray
//! when it is taller than the ray at its position. Averaging the Rayleigh
//! CDF over the linear ray height gives an erf difference quotient; with
//! `E(b)` expected buildings in the Fresnel footprint the link is LOS with
//! probability `P_T^E(b)`.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::environment::{expected_building_count, Environment};
use crate::error::{ensure, ModelError, Result};
use crate::geometry::{Carrier, LinkGeometry};
use crate::special::erf_diff;

/// Height difference below which the equal-height branch is used.
pub const EQUAL_HEIGHT_EPS: f64 = 1e-9;

/// A single link evaluation point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LosQuery {
    pub geom: LinkGeometry,
    pub env: Environment,
    pub carrier: Carrier,
}

impl LosQuery {
    pub fn new(geom: LinkGeometry, env: Environment, carrier: Carrier) -> Self {
        Self { geom, env, carrier }
    }

    pub fn expected_buildings(&self) -> f64 {
        expected_building_count(&self.geom, &self.carrier, &self.env)
    }

    /// Same environment and carrier over a different geometry.
    pub fn with_geometry(&self, geom: LinkGeometry) -> Self {
        Self { geom, ..*self }
    }
}

/// LOS probability against one building of Rayleigh height at a uniform
/// position along the link.
pub fn plos_single_building(h_t: f64, h_r: f64, sigma_h: f64) -> Result<f64> {
    ensure(h_t >= 0.0, "h_t", h_t, "h_t >= 0")?;
    ensure(h_r >= 0.0, "h_r", h_r, "h_r >= 0")?;
    ensure(sigma_h >= 0.0, "sigma_h", sigma_h, "sigma_h >= 0")?;
    if sigma_h == 0.0 {
        return Ok(1.0);
    }
    let p = if (h_t - h_r).abs() < EQUAL_HEIGHT_EPS {
        equal_height_branch(0.5 * (h_t + h_r), sigma_h)
    } else {
        unequal_height_branch(h_t, h_r, sigma_h)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// `1 - exp(-H^2 / 2 sigma^2)`.
pub fn equal_height_branch(h: f64, sigma_h: f64) -> f64 {
    -(-h * h / (2.0 * sigma_h * sigma_h)).exp_m1()
}

/// `1 - sqrt(pi/2) sigma_h H_d` with `H_d` the erf difference quotient.
pub fn unequal_height_branch(h_t: f64, h_r: f64, sigma_h: f64) -> f64 {
    let scale = SQRT_2 * sigma_h;
    // Order the arguments so erf_diff sees a non-negative difference.
    let (hi, lo) = if h_t >= h_r { (h_t, h_r) } else { (h_r, h_t) };
    let h_d = erf_diff(hi / scale, lo / scale) / (hi - lo);
    1.0 - FRAC_PI_2.sqrt() * sigma_h * h_d
}

/// Closed-form LOS probability `P_T^E(b)` with a real-valued exponent.
pub fn plos(query: &LosQuery) -> f64 {
    let g = &query.geom;
    // Heights are validated by LinkGeometry, so this cannot fail.
    let single =
        plos_single_building(g.h_t(), g.h_r(), query.env.sigma_h()).expect("validated geometry");
    pow_buildings(single, query.expected_buildings())
}

/// `p^e` with `0^0 = 1`: no buildings block nothing.
fn pow_buildings(p: f64, expected: f64) -> f64 {
    if expected == 0.0 {
        1.0
    } else {
        p.powf(expected)
    }
}

/// Horizontal distances from the specular ground point to Tx and Rx.
pub fn reflection_split(geom: &LinkGeometry) -> Result<(f64, f64)> {
    let sum = geom.h_t() + geom.h_r();
    if sum == 0.0 {
        return Err(ModelError::ReflectionUndefined);
    }
    Ok((geom.d() * geom.h_t() / sum, geom.d() * geom.h_r() / sum))
}

/// Probability that both legs of the ground-reflected ray are clear.
///
/// Each leg is its own LOS problem with one end at ground level; its
/// expected building count comes from the leg's own Fresnel footprint. A
/// leg of zero length (terminal on the ground) is always clear.
pub fn ground_reflection_probability(query: &LosQuery) -> Result<f64> {
    let (d_t, d_r) = reflection_split(&query.geom)?;
    let leg = |h: f64, dist: f64| -> Result<f64> {
        if dist == 0.0 {
            return Ok(1.0);
        }
        let sub = LinkGeometry::new(h, 0.0, dist)?;
        Ok(plos(&query.with_geometry(sub)))
    };
    Ok(leg(query.geom.h_t(), d_t)? * leg(query.geom.h_r(), d_r)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::Preset;

    fn query(h_t: f64, h_r: f64, d: f64, sigma_h: f64, beta_h: f64) -> LosQuery {
        LosQuery::new(
            LinkGeometry::new(h_t, h_r, d).unwrap(),
            Environment::new(sigma_h, beta_h).unwrap(),
            Carrier::mmwave_28ghz(),
        )
    }

    #[test]
    fn single_building_equal_heights() {
        let p = plos_single_building(20.0, 20.0, 20.0).unwrap();
        assert!((p - 0.393_469).abs() < 1e-6, "{p}");
    }

    #[test]
    fn single_building_unequal_heights() {
        let p = plos_single_building(10.0, 30.0, 20.0).unwrap();
        assert!((p - 0.3941).abs() < 5e-5, "{p}");
        assert_eq!(p, plos_single_building(30.0, 10.0, 20.0).unwrap());
    }

    #[test]
    fn open_field_is_always_los() {
        for &(a, b) in &[(0.0, 0.0), (10.0, 30.0), (5.0, 5.0)] {
            assert_eq!(plos_single_building(a, b, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn negative_height_rejected() {
        assert!(plos_single_building(-1.0, 3.0, 20.0).is_err());
        assert!(plos_single_building(1.0, 3.0, -2.0).is_err());
    }

    #[test]
    fn branches_agree_near_equal_heights() {
        for &h in &[10.0, 30.0, 100.0] {
            for &s in &[10.0, 20.0, 40.0] {
                let a = equal_height_branch(h + 0.5e-6, s);
                let b = unequal_height_branch(h + 1e-6, h, s);
                assert!((a - b).abs() < 1e-8, "h={h} s={s}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn empty_environment_is_los() {
        assert_eq!(plos(&query(10.0, 30.0, 500.0, 20.0, 0.0)), 1.0);
    }

    #[test]
    fn high_altitude_is_nearly_los() {
        let p = plos(&query(100.0, 100.0, 500.0, 20.0, 3e-3));
        assert!(p > 0.99998, "{p}");
    }

    #[test]
    fn continuity_across_equal_heights() {
        let a = plos(&query(30.0 + 1e-6, 30.0, 300.0, 20.0, 3e-3));
        let b = plos(&query(30.0, 30.0, 300.0, 20.0, 3e-3));
        assert!((a - b).abs() < 1e-5);
    }

    #[test]
    fn reflection_probability_examples() {
        assert_eq!(
            ground_reflection_probability(&query(10.0, 100.0, 500.0, 20.0, 0.0)).unwrap(),
            1.0
        );
        let q = query(10.0, 100.0, 500.0, 20.0, 3e-3);
        let pgr = ground_reflection_probability(&q).unwrap();
        assert!(pgr > 0.0 && pgr < 1.0);
        assert!(pgr < plos(&q));

        let sym = query(50.0, 50.0, 100.0, 20.0, 3e-3);
        let (d_t, d_r) = reflection_split(&sym.geom).unwrap();
        assert_eq!((d_t, d_r), (50.0, 50.0));
        let leg_t = plos(&sym.with_geometry(LinkGeometry::new(50.0, 0.0, d_t).unwrap()));
        let leg_r = plos(&sym.with_geometry(LinkGeometry::new(50.0, 0.0, d_r).unwrap()));
        assert_eq!(leg_t, leg_r);
    }

    #[test]
    fn reflection_undefined_on_the_ground() {
        let q = query(0.0, 0.0, 100.0, 20.0, 3e-3);
        assert_eq!(
            ground_reflection_probability(&q),
            Err(ModelError::ReflectionUndefined)
        );
        // One terminal on the ground: that leg has zero length.
        let q = query(0.0, 40.0, 100.0, 20.0, 3e-3);
        let p = ground_reflection_probability(&q).unwrap();
        let direct = plos(&q);
        assert!((p - direct).abs() < 1e-15);
    }

    #[test]
    fn denser_presets_lower_plos() {
        let g = LinkGeometry::new(30.0, 30.0, 400.0).unwrap();
        let ps: Vec<f64> = Preset::ALL
            .iter()
            .map(|&p| {
                plos(&LosQuery::new(
                    g,
                    Environment::preset(p),
                    Carrier::default(),
                ))
            })
            .collect();
        assert!(ps[0] > ps[1] && ps[1] > ps[2], "{ps:?}");
    }
}
