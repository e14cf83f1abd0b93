//! Scenario files.
//!
//! A scenario is one JSON object. Every key is optional; unknown keys are
//! rejected. Numeric axes accept a single number, a list of numbers, or a
//! range `{"start": a, "stop": b, "steps": n}` giving `n + 1` evenly spaced
//! points from `a` to `b`.

use std::fmt;
use std::path::{Path, PathBuf};

use a2a_core::{
    AntennaConfig, Carrier, CountMode, Environment, Execution, LinkGeometry, LosQuery, McConfig,
    PathLossOptions, Preset,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Value(f64),
    List(Vec<f64>),
    Range(Range),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Value(v) => vec![*v],
            Axis::List(v) => v.clone(),
            Axis::Range(r) => (0..=r.steps)
                .map(|i| {
                    if i == r.steps {
                        r.stop
                    } else {
                        r.start + (r.stop - r.start) * f64::from(i) / f64::from(r.steps)
                    }
                })
                .collect(),
        }
    }

    fn check(&self, field: &str) -> Result<(), CliError> {
        if let Axis::Range(r) = self {
            if r.steps == 0 {
                return Err(CliError::scenario(
                    field,
                    "range needs a positive step count",
                ));
            }
        }
        let values = self.values();
        if values.is_empty() {
            return Err(CliError::scenario(field, "list is empty"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::scenario(field, "values must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometrySpec {
    pub h_t: Axis,
    pub h_r: Axis,
    pub d: Axis,
}

impl Default for GeometrySpec {
    fn default() -> Self {
        Self {
            h_t: Axis::Value(10.0),
            h_r: Axis::Value(100.0),
            d: Axis::Range(Range {
                start: 10.0,
                stop: 1000.0,
                steps: 99,
            }),
        }
    }
}

/// A preset name or explicit Rayleigh scale and density (buildings per m²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnvironmentSpec {
    Preset(Preset),
    Explicit(ExplicitEnvironment),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitEnvironment {
    pub sigma_h: Axis,
    pub beta_h: Axis,
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        EnvironmentSpec::Preset(Preset::Urban)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AntennaSpec {
    pub elements: u32,
    pub exponent: f64,
    pub gain_floor: f64,
    /// Beam wobble standard deviation, degrees, applied at both ends.
    pub sigma_w_deg: Axis,
}

impl Default for AntennaSpec {
    fn default() -> Self {
        let base = AntennaConfig::default();
        Self {
            elements: base.elements,
            exponent: base.exponent,
            gain_floor: base.gain_floor,
            sigma_w_deg: Axis::List(vec![5.0, 10.0, 15.0, 20.0, 25.0, 27.7]),
        }
    }
}

impl AntennaSpec {
    pub fn config(&self, sigma_w_deg: f64) -> AntennaConfig {
        AntennaConfig {
            elements: self.elements,
            exponent: self.exponent,
            gain_floor: self.gain_floor,
            ..AntennaConfig::default()
        }
        .with_wobble(sigma_w_deg.to_radians())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McSpec {
    pub trials: u64,
    pub seed: u64,
    pub count_mode: CountMode,
    pub execution: Execution,
}

impl Default for McSpec {
    fn default() -> Self {
        let mc = McConfig::default();
        Self {
            trials: mc.trials,
            seed: mc.seed,
            count_mode: mc.count_mode,
            execution: mc.execution,
        }
    }
}

impl McSpec {
    pub fn config(&self) -> McConfig {
        McConfig::new(self.trials, self.seed)
            .with_count_mode(self.count_mode)
            .with_execution(self.execution)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub format: Format,
    /// Main table; standard output when absent.
    pub path: Option<PathBuf>,
    /// PLF CDF table; not written when absent.
    pub cdf_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub frequency_ghz: f64,
    /// Combined linear antenna gain `G` on the path-loss curves.
    pub gain: f64,
    pub geometry: GeometrySpec,
    pub environment: EnvironmentSpec,
    pub antenna: AntennaSpec,
    pub mc: McSpec,
    pub pathloss: PathLossOptions,
    /// Adds the 3GPP UMi column to LOS-probability sweeps.
    pub baseline_3gpp: bool,
    pub output: OutputSpec,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            frequency_ghz: 28.0,
            gain: 1.0,
            geometry: GeometrySpec::default(),
            environment: EnvironmentSpec::default(),
            antenna: AntennaSpec::default(),
            mc: McSpec::default(),
            pathloss: PathLossOptions::default(),
            baseline_3gpp: false,
            output: OutputSpec::default(),
        }
    }
}

/// One evaluation point of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub h_t: f64,
    pub h_r: f64,
    pub d: f64,
    pub sigma_h: f64,
    pub beta_h: f64,
}

/// The axis varied across a sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweptAxis {
    HT,
    HR,
    D,
    SigmaH,
    BetaH,
}

impl SweptAxis {
    pub fn column(self) -> &'static str {
        match self {
            SweptAxis::HT => "h_t",
            SweptAxis::HR => "h_r",
            SweptAxis::D => "d",
            SweptAxis::SigmaH => "sigma_h",
            SweptAxis::BetaH => "beta_h",
        }
    }

    pub fn of(self, p: &Point) -> f64 {
        match self {
            SweptAxis::HT => p.h_t,
            SweptAxis::HR => p.h_r,
            SweptAxis::D => p.d,
            SweptAxis::SigmaH => p.sigma_h,
            SweptAxis::BetaH => p.beta_h,
        }
    }
}

impl fmt::Display for SweptAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

/// The expanded sweep: its axis (`d` when nothing varies) and its points.
#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweptAxis,
    pub points: Vec<Point>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let scenario: Scenario = serde_json::from_str(text).map_err(CliError::Parse)?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.frequency_ghz.is_finite() && self.frequency_ghz > 0.0) {
            return Err(CliError::scenario("frequency_ghz", "must be positive"));
        }
        if !(self.gain.is_finite() && self.gain > 0.0) {
            return Err(CliError::scenario("gain", "must be positive"));
        }
        if self.mc.trials == 0 {
            return Err(CliError::scenario("mc.trials", "must be at least 1"));
        }
        self.geometry.h_t.check("geometry.h_t")?;
        self.geometry.h_r.check("geometry.h_r")?;
        self.geometry.d.check("geometry.d")?;
        if let EnvironmentSpec::Explicit(e) = &self.environment {
            e.sigma_h.check("environment.sigma_h")?;
            e.beta_h.check("environment.beta_h")?;
        }
        self.antenna.sigma_w_deg.check("antenna.sigma_w_deg")?;
        self.antenna
            .config(0.0)
            .validate()
            .map_err(|e| CliError::scenario("antenna", &e.to_string()))?;
        self.sweep().map(|_| ())
    }

    pub fn carrier(&self) -> Carrier {
        Carrier::from_frequency(self.frequency_ghz * 1e9).expect("validated frequency")
    }

    pub fn mc_config(&self) -> McConfig {
        self.mc.config()
    }

    fn environment_axes(&self) -> (Vec<f64>, Vec<f64>) {
        match &self.environment {
            EnvironmentSpec::Preset(p) => {
                let (s, b) = p.parameters();
                (vec![s], vec![b])
            }
            EnvironmentSpec::Explicit(e) => (e.sigma_h.values(), e.beta_h.values()),
        }
    }

    /// Expands the axes; fails when more than one axis varies.
    pub fn sweep(&self) -> Result<Sweep, CliError> {
        let (sigma, beta) = self.environment_axes();
        let axes = [
            (SweptAxis::HT, self.geometry.h_t.values()),
            (SweptAxis::HR, self.geometry.h_r.values()),
            (SweptAxis::D, self.geometry.d.values()),
            (SweptAxis::SigmaH, sigma),
            (SweptAxis::BetaH, beta),
        ];
        let swept: Vec<SweptAxis> = axes
            .iter()
            .filter(|(_, v)| v.len() > 1)
            .map(|(a, _)| *a)
            .collect();
        if swept.len() > 1 {
            let names: Vec<&str> = swept.iter().map(|a| a.column()).collect();
            return Err(CliError::scenario(
                "geometry/environment",
                &format!(
                    "exactly one axis may vary per table, found {}",
                    names.join(", ")
                ),
            ));
        }
        let axis = swept.first().copied().unwrap_or(SweptAxis::D);
        let len = axes.iter().map(|(_, v)| v.len()).max().unwrap_or(1);
        let at = |a: usize, i: usize| {
            let v = &axes[a].1;
            if v.len() == 1 {
                v[0]
            } else {
                v[i]
            }
        };
        let points = (0..len)
            .map(|i| Point {
                h_t: at(0, i),
                h_r: at(1, i),
                d: at(2, i),
                sigma_h: at(3, i),
                beta_h: at(4, i),
            })
            .collect();
        Ok(Sweep { axis, points })
    }

    pub fn query(&self, p: &Point) -> Result<LosQuery, CliError> {
        let geom = LinkGeometry::new(p.h_t, p.h_r, p.d)?;
        let env = Environment::new(p.sigma_h, p.beta_h)?;
        Ok(LosQuery::new(geom, env, self.carrier()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let s = Scenario::from_json("{}").unwrap();
        assert_eq!(s, Scenario::default());
        assert_eq!(s.frequency_ghz, 28.0);
        assert_eq!(s.environment, EnvironmentSpec::Preset(Preset::Urban));
    }

    #[test]
    fn range_includes_both_ends() {
        let a = Axis::Range(Range {
            start: 10.0,
            stop: 600.0,
            steps: 59,
        });
        let v = a.values();
        assert_eq!(v.len(), 60);
        assert_eq!(v[0], 10.0);
        assert_eq!(v[59], 600.0);
        assert!((v[1] - 20.0).abs() < 1e-12);
    }

    #[test]
    fn explicit_environment_and_axis_forms() {
        let s = Scenario::from_json(
            r#"{"geometry": {"h_t": 10, "h_r": [100], "d": 500},
                "environment": {"sigma_h": [10, 20, 40], "beta_h": 3e-3}}"#,
        )
        .unwrap();
        let sweep = s.sweep().unwrap();
        assert_eq!(sweep.axis, SweptAxis::SigmaH);
        assert_eq!(sweep.points.len(), 3);
        assert_eq!(sweep.points[2].sigma_h, 40.0);
        assert_eq!(sweep.points[2].d, 500.0);
    }

    #[test]
    fn rejects_unknown_keys() {
        let err = Scenario::from_json(r#"{"frequncy_ghz": 28}"#).unwrap_err();
        assert!(err.to_string().contains("frequncy_ghz"), "{err}");
        let err = Scenario::from_json(r#"{"mc": {"trails": 5}}"#).unwrap_err();
        assert!(err.to_string().contains("trails"), "{err}");
    }

    #[test]
    fn rejects_two_swept_axes() {
        let err =
            Scenario::from_json(r#"{"geometry": {"h_r": [10, 20], "d": [1, 2]}}"#).unwrap_err();
        assert!(err.to_string().contains("h_r, d"), "{err}");
    }

    #[test]
    fn rejects_zero_steps() {
        let err =
            Scenario::from_json(r#"{"geometry": {"d": {"start": 1, "stop": 2, "steps": 0}}}"#)
                .unwrap_err();
        assert!(err.to_string().contains("geometry.d"), "{err}");
    }

    #[test]
    fn antenna_angles_are_degrees() {
        let s = AntennaSpec::default();
        let cfg = s.config(180.0);
        assert!((cfg.wobble_tx - std::f64::consts::PI).abs() < 1e-15);
    }
}
