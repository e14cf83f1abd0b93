//! Path-loss model for low-altitude air-to-air millimeter-wave links over a
//! statistically described built-up area.
//!
//! The model chains together:
//!
//! - first-Fresnel-zone geometry ([`geometry`]),
//! - Rayleigh building heights and building density ([`environment`]),
//! - a closed-form line-of-sight probability ([`los`]),
//! - two-ray LOS loss, knife-edge NLOS loss and their blend ([`pathloss`]),
//! - ULA gain under Gaussian beam wobble ([`antenna`]),
//! - the 3GPP UMi reference curves ([`baselines`]).
//!
//! [`montecarlo`] holds independent geometric simulations used to check
//! every closed form by direct sampling.

pub mod antenna;
pub mod baselines;
pub mod environment;
mod error;
pub mod geometry;
pub mod los;
pub mod montecarlo;
pub mod pathloss;
pub mod special;
pub mod stats;

pub use antenna::{AntennaConfig, PlfStatistics};
pub use baselines::BaselineKind;
pub use environment::{Environment, MaxHeightMode, Preset};
pub use error::{ModelError, Result};
pub use geometry::{Carrier, LinkGeometry, SPEED_OF_LIGHT};
pub use los::LosQuery;
pub use montecarlo::{CountMode, Estimate, Execution, McConfig};
pub use pathloss::{BlendMode, PathLossBreakdown, PathLossOptions};
