//! ULA gain under Gaussian beam wobble and the resulting path-loss
//! fluctuation (PLF).
//!
//! Angles on the gain path are radians. The reference `sigma_f` curve
//! ([`sigma_f_paper_fit`]) takes its argument in degrees.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, ModelError, Result};
use crate::stats::{empirical_cdf, exp_tail_fit, mean_and_se, std_dev_and_se, ExpTailFit};

/// Smallest trial count accepted by PLF statistics.
pub const MIN_PLF_TRIALS: u64 = 10_000;

/// Probability levels at which the PLF CDF is reported.
pub const CDF_POINTS: usize = 101;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaConfig {
    /// Number of ULA elements `N`.
    pub elements: u32,
    /// Pattern exponent `m`.
    pub exponent: f64,
    /// Wobble standard deviation at the transmitter (rad).
    pub wobble_tx: f64,
    /// Wobble standard deviation at the receiver (rad).
    pub wobble_rx: f64,
    /// Linear gain outside the main lobe.
    pub gain_floor: f64,
}

impl Default for AntennaConfig {
    fn default() -> Self {
        Self {
            elements: 2,
            exponent: 2.0,
            wobble_tx: 0.0,
            wobble_rx: 0.0,
            gain_floor: 1e-3,
        }
    }
}

impl AntennaConfig {
    pub fn validate(&self) -> Result<()> {
        ensure(
            self.elements >= 1,
            "elements",
            f64::from(self.elements),
            "N >= 1",
        )?;
        ensure(self.exponent > 0.0, "exponent", self.exponent, "m > 0")?;
        ensure(
            self.wobble_tx >= 0.0,
            "wobble_tx",
            self.wobble_tx,
            "sigma >= 0",
        )?;
        ensure(
            self.wobble_rx >= 0.0,
            "wobble_rx",
            self.wobble_rx,
            "sigma >= 0",
        )?;
        ensure(
            self.gain_floor > 0.0 && self.gain_floor <= 1.0,
            "gain_floor",
            self.gain_floor,
            "0 < g_floor <= 1",
        )
    }

    /// Same wobble at both ends.
    pub fn with_wobble(self, sigma_rad: f64) -> Self {
        Self {
            wobble_tx: sigma_rad,
            wobble_rx: sigma_rad,
            ..self
        }
    }

    /// PLF with both beams on boresight.
    pub fn aligned_plf(&self) -> f64 {
        -20.0 * f64::from(self.elements).log10()
    }

    /// PLF when both beams fall outside their main lobes.
    pub fn floor_plf(&self) -> f64 {
        -20.0 * self.gain_floor.log10()
    }
}

/// Linear ULA gain at pointing error `theta + theta_w`:
/// `N cos(pi N / 2 (theta + theta_w))^m` inside `|theta + theta_w| <= 1/N`,
/// never below `g_floor`.
pub fn ula_gain(theta: f64, theta_w: f64, cfg: &AntennaConfig) -> f64 {
    let n = f64::from(cfg.elements);
    let off = theta + theta_w;
    if off.abs() > 1.0 / n {
        return cfg.gain_floor;
    }
    let g = n * (PI * n / 2.0 * off).cos().max(0.0).powf(cfg.exponent);
    g.max(cfg.gain_floor)
}

/// One PLF draw in dB for aligned beams with random wobble at both ends.
pub fn sample_plf<R: Rng + ?Sized>(cfg: &AntennaConfig, rng: &mut R) -> f64 {
    let draw = |sigma: f64, rng: &mut R| -> f64 {
        if sigma == 0.0 {
            0.0
        } else {
            Normal::new(0.0, sigma).expect("sigma > 0").sample(rng)
        }
    };
    let w_tx = draw(cfg.wobble_tx, rng);
    let w_rx = draw(cfg.wobble_rx, rng);
    let g = ula_gain(0.0, w_tx, cfg) * ula_gain(0.0, w_rx, cfg);
    -10.0 * g.log10()
}

/// Summary of a PLF sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlfStatistics {
    /// Raw draws in trial order.
    pub samples: Vec<f64>,
    pub mean_db: f64,
    pub mean_se_db: f64,
    /// Standard deviation of PLF, `sigma_f`.
    pub sigma_f_db: f64,
    pub sigma_f_se_db: f64,
    /// `(plf_db, F)` at [`CDF_POINTS`] probability levels.
    pub cdf: Vec<(f64, f64)>,
    /// `None` for a degenerate sample (e.g. no wobble).
    pub tail_fit: Option<ExpTailFit>,
}

impl PlfStatistics {
    pub fn from_samples(samples: Vec<f64>) -> Result<Self> {
        let n = samples.len() as u64;
        if n < MIN_PLF_TRIALS {
            return Err(ModelError::InsufficientTrials {
                got: n,
                min: MIN_PLF_TRIALS,
            });
        }
        let (mean_db, mean_se_db) = mean_and_se(&samples);
        let (sigma_f_db, sigma_f_se_db) = std_dev_and_se(&samples);
        let mut sorted = samples.clone();
        sorted.sort_by(f64::total_cmp);
        let tail_fit = if sigma_f_db > 0.0 {
            exp_tail_fit(&sorted)
        } else {
            None
        };
        Ok(Self {
            cdf: empirical_cdf(&sorted, CDF_POINTS),
            samples,
            mean_db,
            mean_se_db,
            sigma_f_db,
            sigma_f_se_db,
            tail_fit,
        })
    }
}

/// Serial PLF experiment over `trials` draws from `rng`.
pub fn plf_statistics<R: Rng + ?Sized>(
    cfg: &AntennaConfig,
    trials: u64,
    rng: &mut R,
) -> Result<PlfStatistics> {
    cfg.validate()?;
    if trials < MIN_PLF_TRIALS {
        return Err(ModelError::InsufficientTrials {
            got: trials,
            min: MIN_PLF_TRIALS,
        });
    }
    let samples = (0..trials).map(|_| sample_plf(cfg, rng)).collect();
    PlfStatistics::from_samples(samples)
}

/// Fitted `sigma_f` (dB) against misalignment `sigma` (degrees):
/// `18.7 exp(-((sigma - 27.7) / 11.1)^2)`.
pub fn sigma_f_paper_fit(sigma_deg: f64) -> f64 {
    18.7 * (-((sigma_deg - 27.7) / 11.1).powi(2)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg16() -> AntennaConfig {
        AntennaConfig {
            elements: 16,
            ..AntennaConfig::default()
        }
    }

    #[test]
    fn boresight_gain_is_n() {
        assert_eq!(ula_gain(0.0, 0.0, &cfg16()), 16.0);
    }

    #[test]
    fn lobe_edge_hits_floor() {
        let c = cfg16();
        assert_eq!(ula_gain(1.0 / 16.0, 0.0, &c), c.gain_floor);
        assert_eq!(ula_gain(0.0, 0.2, &c), c.gain_floor);
        let near = ula_gain(1.0 / 16.0 - 1e-6, 0.0, &c);
        assert!(near <= c.gain_floor + 1e-6);
    }

    #[test]
    fn half_lobe_gain() {
        let g = ula_gain(0.0, 1.0 / 32.0, &cfg16());
        assert!((g - 8.0).abs() < 1e-12);
        assert_eq!(
            ula_gain(0.01, 0.0, &cfg16()),
            ula_gain(0.0, -0.01, &cfg16())
        );
    }

    #[test]
    fn no_wobble_gives_constant_plf() {
        let c = cfg16();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(sample_plf(&c, &mut rng), -10.0 * 256f64.log10());
        }
        let stats = plf_statistics(&c, MIN_PLF_TRIALS, &mut rng).unwrap();
        assert_eq!(stats.sigma_f_db, 0.0);
        assert!(stats.tail_fit.is_none());
    }

    #[test]
    fn plf_is_bounded() {
        let c = cfg16().with_wobble(0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..10_000 {
            let p = sample_plf(&c, &mut rng);
            assert!(p >= c.aligned_plf() - 1e-12 && p <= c.floor_plf() + 1e-12);
        }
    }

    #[test]
    fn too_few_trials() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let err = plf_statistics(&cfg16(), 100, &mut rng).unwrap_err();
        assert!(matches!(
            err,
            ModelError::InsufficientTrials { got: 100, .. }
        ));
    }

    #[test]
    fn reference_fit_values() {
        assert_eq!(sigma_f_paper_fit(27.7), 18.7);
        let v = sigma_f_paper_fit(16.6);
        assert!((v - 18.7 / std::f64::consts::E).abs() < 1e-12);
        assert!((v - 6.88).abs() < 5e-3);
        assert!((sigma_f_paper_fit(38.8) - v).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(AntennaConfig::default().validate().is_ok());
        let bad = AntennaConfig {
            gain_floor: 0.0,
            ..AntennaConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = AntennaConfig {
            elements: 0,
            ..AntennaConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
