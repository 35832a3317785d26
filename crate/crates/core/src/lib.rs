//! Secrecy analysis for RIS-assisted mmWave links that combine a frequency
//! diverse array (FDA) at the base station with random inverted beamforming
//! and RIS element subset selection (RIBES).
//!
//! The crate evaluates closed-form SNRs and secrecy rates, computes optimal
//! subset sizes and frequency increments, and ships independent oracles
//! (exhaustive enumeration, symbol-level Monte Carlo, grid search) that the
//! closed forms are checked against.
//!
//! ```
//! use risfda::{Scenario, Technique};
//!
//! let scn = Scenario::baseline();
//! let bob = scn.bob();
//! let eve = risfda::PolarLocation::new(50.0, bob.aoa_rad).unwrap();
//! let report = scn.evaluate(&eve, Technique::FdaRibes).unwrap();
//! assert!(report.rate_bits > 0.0);
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beamforming;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod optimize;
pub mod oracle;
pub mod scenario;
pub mod secrecy;
pub mod stats;
pub mod sweep;
pub mod units;
pub mod verify;

pub use beamforming::{BeamformerVector, MaskSampler, SelectionMask, SelectionSizes};
pub use channel::{CascadedChannel, ChannelMatrix, FdaPlan, RisGeometry, SPEED_OF_LIGHT};
pub use error::{Error, Result};
pub use geometry::{PathLossModel, Placement, Point, PolarLocation};
pub use optimize::{Method, OptimizationResult};
pub use oracle::{EnumerationReport, McReport};
pub use scenario::{Scenario, SecrecyReport};
pub use secrecy::{Combine, LinkBudget, Technique, WiretapRegion};
pub use stats::{DirichletKernels, ScalingStats};
