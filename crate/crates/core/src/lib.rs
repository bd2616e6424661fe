//! Exact coherence dynamics of a purely dephasing qubit whose initial state
//! is prepared by a nonselective measurement on the qubit–bath thermal
//! state, together with the short-time velocity extrema and independent
//! brute-force checks.

pub mod dynamics;
pub mod error;
pub mod oracle;
pub mod quadrature;
pub mod scheme;
pub mod shorttime;
pub mod spectral;

pub use error::{Error, Result};
