//! H-infinity norm estimation for FIR filters under a budgeted, noisy
//! time-domain query model.
//!
//! * [`signals`]: Toeplitz sections, DFT, frequency response, peak gain.
//! * [`oracle`]: the budgeted query sessions estimators talk to.
//! * [`estimators`]: plugin least squares, two power methods, weighted
//!   Thompson sampling, the MOSS grid bandit, and the sector test.
//! * [`lowerbound`]: hard priors, KL / chi-square / TV computations and Le Cam
//!   risk certificates.
//! * [`bench`]: random plants, the parallel suite runner, performance
//!   profiles, persistence and the `hinf` command line.

// `!(x > 0.0)` rejects NaN along with non-positive values; hex seed tags
// are grouped by ASCII byte.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::unusual_byte_groupings)]

pub mod bench;
pub mod error;
pub mod estimators;
pub mod lowerbound;
pub mod oracle;
pub mod rng;
pub mod signals;

pub use error::{Error, Result};
pub use num_complex::Complex64;
