//! Recovering the metric of a compact geodesic space, up to scale, from
//! ordinal distance comparisons on a finite sample.
//!
//! The crate is split along the data flow:
//!
//! - [`space`]: analytic ground-truth spaces and samplers,
//! - [`hausdorff`]: covering radius of a sample,
//! - [`oracle`]: the comparison channel `d(w, x) <= d(y, z)`,
//! - [`reconstruction`]: midpoint chains, bracket estimates and level choice,
//! - [`repair`]: turning the estimate into a metric,
//! - [`evaluation`]: bound checks and statistical sweeps.
//!
//! ```
//! use ordmetric::oracle::OrdinalOracle;
//! use ordmetric::reconstruction::{reconstruct, ReconstructionConfig};
//! use ordmetric::space::{SampleMode, SpaceModel};
//!
//! let sample = SpaceModel::segment().sample(9, SampleMode::Grid, 0).unwrap();
//! let oracle = OrdinalOracle::from_sample(&sample);
//! let result = reconstruct(&oracle, &ReconstructionConfig::default()).unwrap();
//! assert_eq!(result.p_n, 3);
//! assert_eq!(result.brackets.upper(0, 8).value(), 1.0);
//! ```

pub mod error;
pub mod evaluation;
pub mod hausdorff;
pub mod matrix;
pub mod oracle;
pub mod reconstruction;
pub mod repair;
pub mod space;

pub use error::{Error, Result};
