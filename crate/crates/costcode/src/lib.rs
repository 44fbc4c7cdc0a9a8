//! Variable-length lossless source coding under conditional per-symbol costs,
//! with the measurement side: overflow probability of codeword cost, the
//! achievability and converse bounds that sandwich it, and finite-n
//! information-spectrum curves with first- and second-order threshold
//! estimators.
//!
//! The crate is organized around the pipeline
//!
//! ```text
//!   cost_model -> coder -> overflow
//!        \------ sources ----/   \-- spectrum
//! ```
//!
//! * [`cost_model`] — conditional cost tables and the cost-capacity equation.
//! * [`sources`] — i.i.d. / Markov / mixture models with exact probabilities,
//!   enumeration, and seeded sampling.
//! * [`coder`] — the cost-aware prefix-free interval encoder with its
//!   generalized-Kraft and per-codeword cost-bound audits.
//! * [`overflow`] — exact and Monte Carlo overflow probability plus the
//!   achievability/converse bound sweeps.
//! * [`spectrum`] — information-spectrum curves, threshold estimators, and
//!   Gaussian CDF/quantile numerics.
//! * [`config`] — the TOML experiment-configuration format used by the CLI.

pub mod config;
pub mod coder;
pub mod cost_model;
pub mod error;
pub mod numeric;
pub mod overflow;
pub mod sources;
pub mod spectrum;

pub use error::{Error, Result};
