//! Fresnel-zone geometry of a straight Tx-Rx link over flat ground.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Transceiver heights and horizontal separation, all in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    h_t: f64,
    h_r: f64,
    d: f64,
}

impl LinkGeometry {
    pub fn new(h_t: f64, h_r: f64, d: f64) -> Result<Self> {
        ensure(h_t.is_finite() && h_t >= 0.0, "h_t", h_t, "h_t >= 0")?;
        ensure(h_r.is_finite() && h_r >= 0.0, "h_r", h_r, "h_r >= 0")?;
        ensure(d.is_finite() && d > 0.0, "d", d, "d > 0")?;
        Ok(Self { h_t, h_r, d })
    }

    pub fn h_t(&self) -> f64 {
        self.h_t
    }

    pub fn h_r(&self) -> f64 {
        self.h_r
    }

    /// Horizontal separation.
    pub fn d(&self) -> f64 {
        self.d
    }

    /// Length of the direct ray.
    pub fn d_los(&self) -> f64 {
        self.d.hypot(self.h_t - self.h_r)
    }

    /// Length of the ray reflected once off flat ground.
    pub fn d_reflected(&self) -> f64 {
        self.d.hypot(self.h_t + self.h_r)
    }

    pub fn min_height(&self) -> f64 {
        self.h_t.min(self.h_r)
    }

    pub fn mean_height(&self) -> f64 {
        0.5 * (self.h_t + self.h_r)
    }
}

/// Carrier frequency. The wavelength is always derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Carrier {
    frequency_hz: f64,
}

impl Carrier {
    pub fn from_frequency(frequency_hz: f64) -> Result<Self> {
        ensure(
            frequency_hz.is_finite() && frequency_hz > 0.0,
            "frequency",
            frequency_hz,
            "f > 0 Hz",
        )?;
        Ok(Self { frequency_hz })
    }

    /// The 28 GHz carrier used throughout the reference scenarios.
    pub fn mmwave_28ghz() -> Self {
        Self { frequency_hz: 28e9 }
    }

    pub fn frequency_hz(&self) -> f64 {
        self.frequency_hz
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.frequency_hz
    }
}

impl Default for Carrier {
    fn default() -> Self {
        Self::mmwave_28ghz()
    }
}

/// Radius of the `n`th Fresnel zone at distances `d1`, `d2` from the two
/// terminals.
pub fn fresnel_radius(n: u32, d1: f64, d2: f64, wavelength: f64) -> Result<f64> {
    ensure(n >= 1, "n", f64::from(n), "zone index n >= 1")?;
    ensure(d1 > 0.0, "d1", d1, "d1 > 0")?;
    ensure(d2 > 0.0, "d2", d2, "d2 > 0")?;
    ensure(wavelength > 0.0, "wavelength", wavelength, "lambda > 0")?;
    Ok((f64::from(n) * wavelength * d1 * d2 / (d1 + d2)).sqrt())
}

/// Minor semi-axis of the `n`th Fresnel ellipsoid, i.e. the radius at
/// mid-path.
pub fn fresnel_max_radius(n: u32, d_los: f64, wavelength: f64) -> Result<f64> {
    ensure(n >= 1, "n", f64::from(n), "zone index n >= 1")?;
    ensure(d_los > 0.0, "d_los", d_los, "d_los > 0")?;
    ensure(wavelength > 0.0, "wavelength", wavelength, "lambda > 0")?;
    Ok((f64::from(n) * wavelength * d_los).sqrt() / 2.0)
}

/// Ground-projected area of the first Fresnel zone, `(pi d / 2) r_1^max`.
///
/// The major extent uses the horizontal separation `d`; the minor radius
/// uses the direct-ray length.
pub fn fresnel_footprint_area(geom: &LinkGeometry, carrier: &Carrier) -> f64 {
    let r1 = (carrier.wavelength() * geom.d_los()).sqrt() / 2.0;
    std::f64::consts::FRAC_PI_2 * geom.d() * r1
}

/// Height of the direct ray above ground at normalized position `s`
/// (0 at the receiver, 1 at the transmitter).
pub fn critical_height(geom: &LinkGeometry, s: f64) -> Result<f64> {
    ensure((0.0..=1.0).contains(&s), "s", s, "0 <= s <= 1")?;
    Ok(ray_height(geom.h_t, geom.h_r, s))
}

#[inline]
pub(crate) fn ray_height(h_t: f64, h_r: f64, s: f64) -> f64 {
    s * h_t + (1.0 - s) * h_r
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 0.010_706_873_5;

    #[test]
    fn wavelength_at_28ghz() {
        let c = Carrier::mmwave_28ghz();
        assert_relative_eq!(c.wavelength(), 0.010_706_873_5, max_relative = 1e-9);
        assert_relative_eq!(
            c.frequency_hz() * c.wavelength(),
            SPEED_OF_LIGHT,
            max_relative = 1e-9
        );
    }

    #[test]
    fn fresnel_radius_midpoint() {
        let r = fresnel_radius(1, 150.0, 150.0, LAMBDA).unwrap();
        assert!((r - 0.8961).abs() < 5e-5, "{r}");
        let r_max = fresnel_max_radius(1, 300.0, LAMBDA).unwrap();
        assert_relative_eq!(r, r_max, max_relative = 1e-12);
    }

    #[test]
    fn fresnel_radius_scaling_and_symmetry() {
        let r1 = fresnel_radius(1, 100.0, 200.0, LAMBDA).unwrap();
        let r4 = fresnel_radius(4, 100.0, 200.0, LAMBDA).unwrap();
        assert_relative_eq!(r4, 2.0 * r1, max_relative = 1e-14);
        assert_eq!(r1, fresnel_radius(1, 200.0, 100.0, LAMBDA).unwrap());
    }

    #[test]
    fn fresnel_radius_rejects_bad_inputs() {
        assert!(fresnel_radius(0, 1.0, 1.0, LAMBDA).is_err());
        assert!(fresnel_radius(1, 0.0, 1.0, LAMBDA).is_err());
        assert!(fresnel_radius(1, 1.0, -1.0, LAMBDA).is_err());
        assert!(fresnel_radius(1, 1.0, 1.0, 0.0).is_err());
        assert!(fresnel_max_radius(1, 0.0, LAMBDA).is_err());
    }

    #[test]
    fn max_radius_examples() {
        let c = Carrier::mmwave_28ghz();
        let r = fresnel_max_radius(1, 300.0, c.wavelength()).unwrap();
        assert!((r - 0.896).abs() < 5e-4, "{r}");
        assert!((r - 0.89).abs() <= 0.01);
        let r = fresnel_max_radius(1, 75.0, LAMBDA).unwrap();
        assert!((r - 0.4481).abs() < 5e-5, "{r}");
        assert!(fresnel_max_radius(1, 1e-12, LAMBDA).unwrap() < 1e-6);
    }

    #[test]
    fn footprint_area() {
        let c = Carrier::mmwave_28ghz();
        let g = LinkGeometry::new(30.0, 30.0, 500.0).unwrap();
        assert!((fresnel_max_radius(1, g.d_los(), c.wavelength()).unwrap() - 1.1569).abs() < 5e-5);
        let s = fresnel_footprint_area(&g, &c);
        assert!((s - 908.6).abs() < 0.05, "{s}");

        let g2 = LinkGeometry::new(30.0, 30.0, 1000.0).unwrap();
        assert_relative_eq!(
            fresnel_footprint_area(&g2, &c) / s,
            2f64.powf(1.5),
            max_relative = 1e-12
        );
        let tiny = LinkGeometry::new(30.0, 30.0, 1e-9).unwrap();
        assert!(fresnel_footprint_area(&tiny, &c) < 1e-10);
    }

    #[test]
    fn critical_height_endpoints() {
        let g = LinkGeometry::new(40.0, 10.0, 100.0).unwrap();
        assert_eq!(critical_height(&g, 1.0).unwrap(), 40.0);
        assert_eq!(critical_height(&g, 0.0).unwrap(), 10.0);
        assert_eq!(critical_height(&g, 0.5).unwrap(), 25.0);
        assert!(critical_height(&g, 1.01).is_err());
        assert!(critical_height(&g, -0.01).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(LinkGeometry::new(-1.0, 10.0, 1.0).is_err());
        assert!(LinkGeometry::new(1.0, 10.0, 0.0).is_err());
        assert!(LinkGeometry::new(1.0, f64::NAN, 1.0).is_err());
        let g = LinkGeometry::new(10.0, 40.0, 40.0).unwrap();
        assert_eq!(g.d_los(), 50.0);
        assert!(g.d_los() >= g.d());
        assert!(Carrier::from_frequency(0.0).is_err());
    }
}
