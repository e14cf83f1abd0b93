//! Statistical description of the built-up area.
//!
//! Building heights are Rayleigh distributed with scale `sigma_h`; the
//! building density `beta_h` is a count per square metre. The usual
//! suburban/urban/dense-urban triples are `(20, 2e-3)`, `(30, 3e-3)` and
//! `(40, 4e-3)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distr::OpenClosed01;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, ModelError, Result};
use crate::geometry::{fresnel_footprint_area, Carrier, LinkGeometry};
use crate::special::{binomial, erfc, integrate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    Suburban,
    Urban,
    DenseUrban,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::Suburban, Preset::Urban, Preset::DenseUrban];

    /// `(sigma_h, beta_h)` for the preset.
    pub fn parameters(self) -> (f64, f64) {
        match self {
            Preset::Suburban => (20.0, 2e-3),
            Preset::Urban => (30.0, 3e-3),
            Preset::DenseUrban => (40.0, 4e-3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Preset::Suburban => "suburban",
            Preset::Urban => "urban",
            Preset::DenseUrban => "dense-urban",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "suburban" => Ok(Preset::Suburban),
            "urban" => Ok(Preset::Urban),
            "dense-urban" => Ok(Preset::DenseUrban),
            other => Err(ModelError::UnsupportedModel(format!(
                "unknown environment preset `{other}` (expected suburban, urban or dense-urban)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    sigma_h: f64,
    beta_h: f64,
    preset: Option<Preset>,
}

impl Environment {
    /// `beta_h` is taken as buildings per square metre, unconverted.
    pub fn new(sigma_h: f64, beta_h: f64) -> Result<Self> {
        ensure(
            sigma_h.is_finite() && sigma_h >= 0.0,
            "sigma_h",
            sigma_h,
            "sigma_h >= 0",
        )?;
        ensure(
            beta_h.is_finite() && beta_h >= 0.0,
            "beta_h",
            beta_h,
            "beta_h >= 0",
        )?;
        Ok(Self {
            sigma_h,
            beta_h,
            preset: None,
        })
    }

    pub fn preset(preset: Preset) -> Self {
        let (sigma_h, beta_h) = preset.parameters();
        Self {
            sigma_h,
            beta_h,
            preset: Some(preset),
        }
    }

    pub fn sigma_h(&self) -> f64 {
        self.sigma_h
    }

    pub fn beta_h(&self) -> f64 {
        self.beta_h
    }

    pub fn label(&self) -> Option<Preset> {
        self.preset
    }

    pub fn with_sigma_h(self, sigma_h: f64) -> Result<Self> {
        Self::new(sigma_h, self.beta_h)
    }

    pub fn with_beta_h(self, beta_h: f64) -> Result<Self> {
        Self::new(self.sigma_h, beta_h)
    }
}

impl Default for Environment {
    fn default() -> Self {
        Self::preset(Preset::Urban)
    }
}

/// Rayleigh density of building height.
pub fn height_pdf(h_b: f64, sigma_h: f64) -> Result<f64> {
    ensure(h_b >= 0.0, "h_b", h_b, "h_b >= 0")?;
    ensure(
        sigma_h > 0.0,
        "sigma_h",
        sigma_h,
        "sigma_h > 0 (sigma_h = 0 is a point mass)",
    )?;
    let s2 = sigma_h * sigma_h;
    Ok(h_b / s2 * (-h_b * h_b / (2.0 * s2)).exp())
}

/// Rayleigh CDF; `sigma_h = 0` is the point mass at zero.
pub fn height_cdf(x: f64, sigma_h: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if sigma_h == 0.0 {
        1.0
    } else {
        -(-x * x / (2.0 * sigma_h * sigma_h)).exp_m1()
    }
}

pub fn mean_height(sigma_h: f64) -> f64 {
    (2.0 * PI).sqrt() / 2.0 * sigma_h
}

/// Rayleigh draw by inverse CDF.
pub fn sample_height<R: Rng + ?Sized>(rng: &mut R, sigma_h: f64) -> f64 {
    if sigma_h == 0.0 {
        return 0.0;
    }
    // U in (0, 1], so ln U is finite.
    let u: f64 = rng.sample(OpenClosed01);
    sigma_h * (-2.0 * u.ln()).sqrt()
}

/// Mean number of buildings inside the first-Fresnel-zone footprint.
pub fn expected_building_count(geom: &LinkGeometry, carrier: &Carrier, env: &Environment) -> f64 {
    fresnel_footprint_area(geom, carrier) * env.beta_h
}

/// Discrete building count used by the order-statistics formulas:
/// `max(1, round(E(b)))`.
pub fn discrete_building_count(expected: f64) -> u32 {
    (expected.round() as u32).max(1)
}

/// CDF of the tallest of `n` i.i.d. Rayleigh heights.
pub fn max_height_cdf(x: f64, n: u32, sigma_h: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if sigma_h == 0.0 {
        return 1.0;
    }
    let tail = (-x * x / (2.0 * sigma_h * sigma_h)).exp();
    (f64::from(n) * (-tail).ln_1p()).exp()
}

/// `1 - max_height_cdf`, accurate deep in the tail.
fn max_height_survival(x: f64, n: u32, sigma_h: f64) -> f64 {
    let tail = (-x * x / (2.0 * sigma_h * sigma_h)).exp();
    -(f64::from(n) * (-tail).ln_1p()).exp_m1()
}

/// How to evaluate the truncated mean of the tallest building.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaxHeightMode {
    /// Binomial expansion of the truncated integral, coefficient
    /// `sigma_h sqrt(pi / (2n))` and erfc argument `h sqrt(n) / (sqrt(2) sigma_h)`.
    #[default]
    Corrected,
    /// The printed sum with coefficient `sigma_h sqrt(n pi) / n` and erfc
    /// argument `h sqrt(n) / (2 sigma_h)`. Kept for auditing only; it does
    /// not equal the integral (N = 1, h = 0 gives `1.7725 sigma_h`).
    Literal,
}

/// Largest `n` evaluated by the alternating binomial sum. Beyond it the
/// cancellation costs more than six digits and quadrature is used.
pub const BINOMIAL_SUM_MAX_N: u32 = 24;

/// `integral_{h_min}^inf (1 - F_max(x)) dx` for the tallest of `n`
/// Rayleigh(`sigma_h`) buildings.
pub fn expected_max_height(n: u32, sigma_h: f64, h_min: f64, mode: MaxHeightMode) -> Result<f64> {
    ensure(n >= 1, "N", f64::from(n), "N >= 1")?;
    ensure(sigma_h >= 0.0, "sigma_h", sigma_h, "sigma_h >= 0")?;
    ensure(h_min >= 0.0, "h_min", h_min, "h_min >= 0")?;
    if sigma_h == 0.0 {
        return Ok(0.0);
    }
    match mode {
        MaxHeightMode::Corrected if n > BINOMIAL_SUM_MAX_N => {
            Ok(max_height_by_quadrature(n, sigma_h, h_min))
        }
        MaxHeightMode::Corrected => Ok((1..=n)
            .map(|k| {
                let kf = f64::from(k);
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * binomial(n, k)
                    * sigma_h
                    * (PI / (2.0 * kf)).sqrt()
                    * erfc(h_min * kf.sqrt() / (std::f64::consts::SQRT_2 * sigma_h))
            })
            .sum()),
        MaxHeightMode::Literal => Ok((1..=n)
            .map(|k| {
                let kf = f64::from(k);
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * binomial(n, k) / kf
                    * sigma_h
                    * (kf * PI).sqrt()
                    * erfc(h_min * kf.sqrt() / (2.0 * sigma_h))
            })
            .sum()),
    }
}

fn max_height_by_quadrature(n: u32, sigma_h: f64, h_min: f64) -> f64 {
    // Survival < 1e-18 beyond x_hi: n exp(-x^2 / 2 sigma^2) < 1e-18.
    let x_hi = sigma_h * (2.0 * (f64::from(n) * 1e18).ln()).sqrt();
    if h_min >= x_hi {
        return 0.0;
    }
    integrate(
        |x| max_height_survival(x, n, sigma_h),
        h_min,
        x_hi,
        1e-10 * sigma_h,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pdf_values() {
        assert_eq!(height_pdf(0.0, 20.0).unwrap(), 0.0);
        let v = height_pdf(20.0, 20.0).unwrap();
        assert!((v - 0.030_327).abs() < 1e-6, "{v}");
        assert!(height_pdf(1.0, 0.0).is_err());
        assert!(height_pdf(-1.0, 1.0).is_err());
    }

    #[test]
    fn pdf_normalizes() {
        let total = integrate(|x| height_pdf(x, 20.0).unwrap(), 0.0, 400.0, 1e-10);
        assert!((total - 1.0).abs() < 1e-6);
    }

    #[test]
    fn mean_height_values() {
        assert!((mean_height(20.0) - 25.066).abs() < 1e-3);
        assert_eq!(mean_height(0.0), 0.0);
    }

    #[test]
    fn zero_sigma_samples_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..100).all(|_| sample_height(&mut rng, 0.0) == 0.0));
    }

    #[test]
    fn sampling_is_reproducible() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16)
                .map(|_| sample_height(&mut rng, 20.0))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(7), draw(7));
        assert_ne!(draw(7), draw(8));
    }

    #[test]
    fn building_count() {
        let c = Carrier::mmwave_28ghz();
        let g = LinkGeometry::new(30.0, 30.0, 500.0).unwrap();
        let urban = Environment::new(30.0, 3e-3).unwrap();
        let eb = expected_building_count(&g, &c, &urban);
        assert!((eb - 2.7258).abs() < 1e-3, "{eb}");
        let empty = Environment::new(30.0, 0.0).unwrap();
        assert_eq!(expected_building_count(&g, &c, &empty), 0.0);
        let double = Environment::new(30.0, 6e-3).unwrap();
        assert!((expected_building_count(&g, &c, &double) - 2.0 * eb).abs() < 1e-12);
    }

    #[test]
    fn discrete_count_rounds_with_floor_of_one() {
        assert_eq!(discrete_building_count(0.0), 1);
        assert_eq!(discrete_building_count(0.49), 1);
        assert_eq!(discrete_building_count(2.5), 3);
        assert_eq!(discrete_building_count(2.49), 2);
    }

    #[test]
    fn max_cdf_values() {
        assert!((max_height_cdf(13.0, 1, 20.0) - height_cdf(13.0, 20.0)).abs() < 1e-15);
        let v = max_height_cdf(20.0, 2, 20.0);
        assert!((v - 0.154_818).abs() < 1e-6, "{v}");
        assert!((max_height_cdf(1e4, 5, 20.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expected_max_height_examples() {
        let m1 = expected_max_height(1, 20.0, 0.0, MaxHeightMode::Corrected).unwrap();
        assert!((m1 - mean_height(20.0)).abs() < 1e-10);
        let m2 = expected_max_height(2, 20.0, 0.0, MaxHeightMode::Corrected).unwrap();
        let hand = 2.0 * mean_height(20.0) - 20.0 * PI.sqrt() / 2.0;
        assert!((m2 - hand).abs() < 1e-10);
        assert!((m2 - 32.41).abs() < 5e-3);
        let far = expected_max_height(2, 20.0, 1e3, MaxHeightMode::Corrected).unwrap();
        assert!(far.abs() < 1e-12);
    }

    #[test]
    fn literal_mode_disagrees_at_n1() {
        let lit = expected_max_height(1, 1.0, 0.0, MaxHeightMode::Literal).unwrap();
        assert!((lit - PI.sqrt()).abs() < 1e-12);
        let cor = expected_max_height(1, 1.0, 0.0, MaxHeightMode::Corrected).unwrap();
        assert!((cor - 1.2533).abs() < 1e-4);
    }

    #[test]
    fn quadrature_path_continues_binomial_path() {
        let n = BINOMIAL_SUM_MAX_N;
        for &h in &[0.0, 20.0, 60.0] {
            let sum = expected_max_height(n, 20.0, h, MaxHeightMode::Corrected).unwrap();
            let quad = max_height_by_quadrature(n, 20.0, h);
            assert!(((sum - quad) / quad).abs() < 1e-6, "h={h}: {sum} vs {quad}");
        }
        let big = expected_max_height(500, 20.0, 0.0, MaxHeightMode::Corrected).unwrap();
        let smaller = expected_max_height(100, 20.0, 0.0, MaxHeightMode::Corrected).unwrap();
        assert!(big > smaller && big.is_finite());
    }

    #[test]
    fn degenerate_sigma() {
        assert_eq!(
            expected_max_height(3, 0.0, 0.0, MaxHeightMode::Corrected).unwrap(),
            0.0
        );
        assert!(expected_max_height(0, 1.0, 0.0, MaxHeightMode::Corrected).is_err());
    }

    #[test]
    fn preset_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("rural".parse::<Preset>().is_err());
        assert_eq!(Environment::preset(Preset::Urban).sigma_h(), 30.0);
    }
}
