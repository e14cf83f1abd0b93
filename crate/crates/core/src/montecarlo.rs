//! Geometric Monte Carlo oracles for the closed forms.
//!
//! Buildings are zero-width vertical screens on the Tx-Rx line, placed
//! uniformly with Rayleigh heights. Nothing here calls the closed forms it
//! is meant to check.
//!
//! # Reproducibility
//!
//! Trials are split into fixed chunks of [`CHUNK_TRIALS`]. Chunk `i` of an
//! oracle draws from a ChaCha8 generator keyed by `SplitMix64(seed, tag)`
//! on stream `i`. Chunk results are reduced in chunk order, so serial and
//! parallel runs return bit-identical values.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::antenna::{sample_plf, AntennaConfig, PlfStatistics, MIN_PLF_TRIALS};
use crate::environment::sample_height;
use crate::error::{ensure, ModelError, Result};
use crate::geometry::{ray_height, LinkGeometry};
use crate::los::{plos_single_building, reflection_split, LosQuery};
use crate::pathloss::{
    diffraction_parameter_at, friis_db, ked_loss_db, two_ray_with_reflection, PathLossOptions,
};
use crate::stats::mean_and_se;

pub const CHUNK_TRIALS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CountMode {
    /// Building count ~ Poisson(E(b)).
    #[default]
    Poisson,
    /// Building count fixed at round(E(b)).
    FixedRound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Execution {
    Serial,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub trials: u64,
    pub seed: u64,
    pub count_mode: CountMode,
    /// Does not affect results.
    pub execution: Execution,
}

impl Default for McConfig {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 0x5eed,
            count_mode: CountMode::Poisson,
            execution: Execution::Parallel,
        }
    }
}

impl McConfig {
    pub fn new(trials: u64, seed: u64) -> Self {
        Self {
            trials,
            seed,
            ..Self::default()
        }
    }

    pub fn with_count_mode(self, count_mode: CountMode) -> Self {
        Self { count_mode, ..self }
    }

    pub fn with_execution(self, execution: Execution) -> Self {
        Self { execution, ..self }
    }

    fn validate(&self) -> Result<()> {
        ensure(
            self.trials >= 1,
            "trials",
            self.trials as f64,
            "trials >= 1",
        )
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub trials: u64,
}

impl Estimate {
    fn binomial(successes: u64, trials: u64) -> Self {
        let p = successes as f64 / trials as f64;
        Self {
            mean: p,
            se: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
        }
    }

    /// `|mean - reference| / se`, with `se` replaced by `se_floor` when larger.
    pub fn z_score(&self, reference: f64, se_floor: f64) -> f64 {
        let se = self.se.max(se_floor);
        let delta = (self.mean - reference).abs();
        if delta == 0.0 {
            0.0
        } else {
            delta / se
        }
    }
}

// Oracle tags keep the sub-streams of different oracles disjoint.
const TAG_PLOS: u64 = 1;
const TAG_SINGLE: u64 = 2;
const TAG_MAX_HEIGHT: u64 = 3;
const TAG_TOTAL_LOSS: u64 = 4;
const TAG_PLF: u64 = 5;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Generator for chunk `chunk` of oracle `tag`.
pub fn substream(seed: u64, tag: u64, chunk: u64) -> ChaCha8Rng {
    let mut state = seed ^ tag.wrapping_mul(0xd1b5_4a32_d192_ed03);
    let mut key = [0u8; 32];
    for word in key.chunks_exact_mut(8) {
        word.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(chunk);
    rng
}

/// Runs `per_chunk(rng, trials_in_chunk)` over every chunk and returns the
/// results in chunk order.
fn run_chunks<T, F>(mc: &McConfig, tag: u64, per_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = mc.trials.div_ceil(CHUNK_TRIALS);
    let run = |i: u64| {
        let len = CHUNK_TRIALS.min(mc.trials - i * CHUNK_TRIALS);
        let mut rng = substream(mc.seed, tag, i);
        per_chunk(&mut rng, len)
    };
    match mc.execution {
        Execution::Serial => (0..chunks).map(run).collect(),
        Execution::Parallel => (0..chunks).into_par_iter().map(run).collect(),
    }
}

/// Draws building counts with a given mean.
#[derive(Debug, Clone, Copy)]
enum Counter {
    None,
    Fixed(u64),
    Poisson(Poisson<f64>),
}

impl Counter {
    fn new(mean: f64, mode: CountMode) -> Self {
        if mean <= 0.0 {
            return Counter::None;
        }
        match mode {
            CountMode::FixedRound => Counter::Fixed(mean.round() as u64),
            CountMode::Poisson => Counter::Poisson(Poisson::new(mean).expect("mean > 0")),
        }
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        match self {
            Counter::None => 0,
            Counter::Fixed(n) => *n,
            Counter::Poisson(p) => p.sample(rng) as u64,
        }
    }
}

/// Position in (0, 1) measured from the receiver side.
fn position<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}

/// True when all `count` buildings stay below the ray from `h_r` (s = 0)
/// to `h_t` (s = 1).
fn ray_clear<R: Rng + ?Sized>(rng: &mut R, count: u64, h_t: f64, h_r: f64, sigma_h: f64) -> bool {
    let mut clear = true;
    // Draw every building so the stream advances identically either way.
    for _ in 0..count {
        let s = position(rng);
        let h = sample_height(rng, sigma_h);
        clear &= h < ray_height(h_t, h_r, s);
    }
    clear
}

/// Estimated LOS probability with building counts drawn per `count_mode`.
pub fn mc_plos(query: &LosQuery, mc: &McConfig) -> Result<Estimate> {
    mc.validate()?;
    let counter = Counter::new(query.expected_buildings(), mc.count_mode);
    let (h_t, h_r, sigma_h) = (query.geom.h_t(), query.geom.h_r(), query.env.sigma_h());
    let hits: u64 = run_chunks(mc, TAG_PLOS, |rng, len| {
        (0..len)
            .filter(|_| {
                let b = counter.draw(rng);
                ray_clear(rng, b, h_t, h_r, sigma_h)
            })
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(Estimate::binomial(hits, mc.trials))
}

/// Estimated LOS probability against exactly one building.
pub fn mc_single_building(h_t: f64, h_r: f64, sigma_h: f64, mc: &McConfig) -> Result<Estimate> {
    mc.validate()?;
    ensure(h_t >= 0.0, "h_t", h_t, "h_t >= 0")?;
    ensure(h_r >= 0.0, "h_r", h_r, "h_r >= 0")?;
    ensure(sigma_h >= 0.0, "sigma_h", sigma_h, "sigma_h >= 0")?;
    let hits: u64 = run_chunks(mc, TAG_SINGLE, |rng, len| {
        (0..len)
            .filter(|_| ray_clear(rng, 1, h_t, h_r, sigma_h))
            .count() as u64
    })
    .into_iter()
    .sum();
    Ok(Estimate::binomial(hits, mc.trials))
}

/// Exact LOS probability that [`mc_plos`] estimates under `mode`.
///
/// For Poisson counts this is `exp(-E(b) (1 - P_T))`; for fixed counts
/// `P_T^round(E(b))`. Neither equals the real-exponent form `P_T^E(b)`.
pub fn count_mode_plos(query: &LosQuery, mode: CountMode) -> f64 {
    let g = &query.geom;
    let single =
        plos_single_building(g.h_t(), g.h_r(), query.env.sigma_h()).expect("validated geometry");
    let mean = query.expected_buildings();
    match mode {
        CountMode::Poisson => (-mean * (1.0 - single)).exp(),
        CountMode::FixedRound => {
            let n = mean.round();
            if n == 0.0 {
                1.0
            } else {
                single.powf(n)
            }
        }
    }
}

/// Estimates `E[max(M - h_min, 0)]` for `M` the tallest of `n` Rayleigh
/// buildings.
pub fn mc_expected_max_height(n: u32, sigma_h: f64, h_min: f64, mc: &McConfig) -> Result<Estimate> {
    mc.validate()?;
    ensure(n >= 1, "N", f64::from(n), "N >= 1")?;
    ensure(sigma_h >= 0.0, "sigma_h", sigma_h, "sigma_h >= 0")?;
    let partials = run_chunks(mc, TAG_MAX_HEIGHT, |rng, len| {
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..len {
            let top = (0..n)
                .map(|_| sample_height(rng, sigma_h))
                .fold(0.0, f64::max);
            let x = (top - h_min).max(0.0);
            sum += x;
            sum_sq += x * x;
        }
        (sum, sum_sq)
    });
    let (sum, sum_sq) = partials
        .into_iter()
        .fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let t = mc.trials as f64;
    let mean = sum / t;
    let var = if mc.trials > 1 {
        ((sum_sq - t * mean * mean) / (t - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(Estimate {
        mean,
        se: (var / t).sqrt(),
        trials: mc.trials,
    })
}

/// Per-trial losses from [`mc_total_loss`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossSamples {
    pub mean_db: f64,
    pub se_db: f64,
    /// Fraction of trials with a clear direct ray.
    pub los_fraction: f64,
    pub samples: Vec<f64>,
}

/// End-to-end geometric realization of the blended path loss.
///
/// Each trial realizes the buildings on the direct path. If the ray is
/// clear, the two reflection legs get their own building realizations and
/// the loss is the two-ray loss with the reflection either present or not.
/// If the ray is blocked, the blocker with the largest excess height sets
/// the Fresnel-Kirchhoff parameter at its own position. Losses are
/// averaged in dB.
pub fn mc_total_loss(
    query: &LosQuery,
    gain: f64,
    opts: &PathLossOptions,
    mc: &McConfig,
) -> Result<LossSamples> {
    mc.validate()?;
    let g = query.geom;
    let lambda = query.carrier.wavelength();
    let sigma_h = query.env.sigma_h();
    let friis = friis_db(g.d_los(), lambda, gain)?;
    let with_reflection = two_ray_with_reflection(query, gain, 1.0, opts)?.loss_db;

    let direct = Counter::new(query.expected_buildings(), mc.count_mode);
    let (d_t, d_r) = reflection_split(&g)?;
    let leg = |h: f64, dist: f64| -> Result<(f64, Counter)> {
        if dist == 0.0 {
            return Ok((h, Counter::None));
        }
        let sub = query.with_geometry(LinkGeometry::new(h, 0.0, dist)?);
        Ok((h, Counter::new(sub.expected_buildings(), mc.count_mode)))
    };
    let legs = [leg(g.h_t(), d_t)?, leg(g.h_r(), d_r)?];

    let chunks = run_chunks(mc, TAG_TOTAL_LOSS, |rng, len| {
        let mut out = Vec::with_capacity(len as usize);
        let mut clear_count = 0u64;
        for _ in 0..len {
            let b = direct.draw(rng);
            // (excess height above the ray, position) of the worst blocker.
            let mut worst: Option<(f64, f64)> = None;
            for _ in 0..b {
                let s = position(rng);
                let h = sample_height(rng, sigma_h);
                let excess = h - ray_height(g.h_t(), g.h_r(), s);
                if excess >= 0.0 && worst.map_or(true, |(e, _)| excess > e) {
                    worst = Some((excess, s));
                }
            }
            let loss = match worst {
                None => {
                    clear_count += 1;
                    let mut reflected = true;
                    for (h, counter) in &legs {
                        let n = counter.draw(rng);
                        // Leg ray runs from the terminal (s = 1) to the ground point.
                        reflected &= ray_clear(rng, n, *h, 0.0, sigma_h);
                    }
                    if reflected {
                        with_reflection
                    } else {
                        friis
                    }
                }
                Some((excess, s)) => {
                    let d1 = s * g.d();
                    let v = diffraction_parameter_at(excess, d1, g.d() - d1, lambda);
                    friis + ked_loss_db(v).loss_db
                }
            };
            out.push(loss);
        }
        (out, clear_count)
    });

    let mut samples = Vec::with_capacity(mc.trials as usize);
    let mut clear = 0u64;
    for (chunk, c) in chunks {
        samples.extend(chunk);
        clear += c;
    }
    let (mean_db, se_db) = mean_and_se(&samples);
    Ok(LossSamples {
        mean_db,
        se_db: if se_db.is_nan() { 0.0 } else { se_db },
        los_fraction: clear as f64 / mc.trials as f64,
        samples,
    })
}

/// PLF experiment with chunked, reproducible sub-streams.
pub fn mc_plf(cfg: &AntennaConfig, mc: &McConfig) -> Result<PlfStatistics> {
    cfg.validate()?;
    if mc.trials < MIN_PLF_TRIALS {
        return Err(ModelError::InsufficientTrials {
            got: mc.trials,
            min: MIN_PLF_TRIALS,
        });
    }
    let samples: Vec<f64> = run_chunks(mc, TAG_PLF, |rng, len| {
        (0..len).map(|_| sample_plf(cfg, rng)).collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    PlfStatistics::from_samples(samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::Environment;
    use crate::geometry::Carrier;
    use rand::RngCore;

    fn query(h_t: f64, h_r: f64, d: f64, sigma_h: f64, beta_h: f64) -> LosQuery {
        LosQuery::new(
            LinkGeometry::new(h_t, h_r, d).unwrap(),
            Environment::new(sigma_h, beta_h).unwrap(),
            Carrier::mmwave_28ghz(),
        )
    }

    #[test]
    fn substreams_are_distinct_and_stable() {
        let a = substream(1, TAG_PLOS, 0).next_u64();
        assert_eq!(a, substream(1, TAG_PLOS, 0).next_u64());
        assert_ne!(a, substream(1, TAG_PLOS, 1).next_u64());
        assert_ne!(a, substream(1, TAG_SINGLE, 0).next_u64());
        assert_ne!(a, substream(2, TAG_PLOS, 0).next_u64());
    }

    #[test]
    fn chunks_cover_all_trials() {
        let mc = McConfig::new(CHUNK_TRIALS * 2 + 17, 9);
        let lens = run_chunks(&mc, 0, |_, len| len);
        assert_eq!(lens, vec![CHUNK_TRIALS, CHUNK_TRIALS, 17]);
    }

    #[test]
    fn empty_environment_is_always_clear() {
        let est = mc_plos(
            &query(10.0, 30.0, 500.0, 20.0, 0.0),
            &McConfig::new(10_000, 1),
        )
        .unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.se, 0.0);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(mc_plos(&query(10.0, 30.0, 500.0, 20.0, 0.0), &McConfig::new(0, 1)).is_err());
    }

    #[test]
    fn serial_and_parallel_agree() {
        let q = query(20.0, 60.0, 400.0, 20.0, 3e-3);
        let opts = PathLossOptions::default();
        let serial = McConfig::new(20_000, 42).with_execution(Execution::Serial);
        let par = serial.with_execution(Execution::Parallel);
        assert_eq!(mc_plos(&q, &serial).unwrap(), mc_plos(&q, &par).unwrap());
        assert_eq!(
            mc_total_loss(&q, 1.0, &opts, &serial).unwrap(),
            mc_total_loss(&q, 1.0, &opts, &par).unwrap()
        );
        assert_eq!(
            mc_expected_max_height(3, 20.0, 10.0, &serial).unwrap(),
            mc_expected_max_height(3, 20.0, 10.0, &par).unwrap()
        );
    }

    #[test]
    fn total_loss_without_buildings_is_full_two_ray() {
        let q = query(50.0, 50.0, 500.0, 20.0, 0.0);
        let opts = PathLossOptions::default();
        let out = mc_total_loss(&q, 1.0, &opts, &McConfig::new(5_000, 3)).unwrap();
        let expect = two_ray_with_reflection(&q, 1.0, 1.0, &opts)
            .unwrap()
            .loss_db;
        assert!(out.samples.iter().all(|&s| s == expect));
        assert_eq!(out.los_fraction, 1.0);
    }

    #[test]
    fn huge_heights_max_is_zero_above_limit() {
        let est = mc_expected_max_height(2, 20.0, 1e4, &McConfig::new(10_000, 5)).unwrap();
        assert_eq!(est.mean, 0.0);
    }

    #[test]
    fn count_mode_targets() {
        let q = query(10.0, 30.0, 500.0, 20.0, 3e-3);
        let p = plos_single_building(10.0, 30.0, 20.0).unwrap();
        let eb = q.expected_buildings();
        assert!((count_mode_plos(&q, CountMode::Poisson) - (-eb * (1.0 - p)).exp()).abs() < 1e-15);
        assert_eq!(
            count_mode_plos(&q, CountMode::FixedRound),
            p.powf(eb.round())
        );
    }
}
