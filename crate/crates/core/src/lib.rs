//! Parallel Mersenne Twister streams and their statistical quality.
//!
//! * [`mt`]: the MT19937 generator status and its operations.
//! * [`partition`]: status sets for sequence splitting, random spacing and
//!   the indexed sequence, with their on-disk format.
//! * [`stats`]: the test battery and its p-value machinery.
//! * [`campaign`]: parallel, byte-reproducible battery runs and the
//!   aggregate reports and quality registry built from them.

pub mod campaign;
pub mod error;
pub mod mt;
pub mod partition;
pub mod stats;

pub use error::{Error, Result};
pub use mt::MtState;
pub use partition::{StatusSet, Technique};
pub use stats::{Battery, Mode, StreamView, TestDefinition, TestResult, TestSpec, Verdict};
