//! Qutrit states in the SU(3) Bloch-vector representation, and separability
//! thresholds for isotropic two-qutrit states and for N-qutrit states near the
//! maximally mixed state.

pub mod cli;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod multi_qutrit;
pub mod qutrit;
pub mod report;
pub mod su3;
pub mod two_qutrit;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, SubsystemShape};
pub use qutrit::{BlochVector, PureStateParams, QutritDensity};
pub use report::{SeparabilityReport, Verdict};
