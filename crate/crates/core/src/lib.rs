//! Rigorous interval bounds for rectangle and rectangle-scan probabilities
//! of Markov increments.
//!
//! The pipeline: [`kernels`] evaluates one-step transition probabilities of
//! partial-sum chains as certified intervals, [`scan`] reduces a scan event
//! to a rectangle event over a window chain, and [`engine`] runs the forward
//! recursion in directed-rounding interval arithmetic ([`interval`],
//! [`fpround`]). [`metrics`] measures and presents the resulting accuracy and
//! [`oracle`] computes exact rational reference values.

pub mod cli;
pub mod engine;
pub mod fpround;
pub mod interval;
pub mod kernels;
pub mod metrics;
pub mod oracle;
pub mod report;
pub mod scan;

pub use fpround::{Arith, Fallback, Float, Precision, RoundingMode, Strong};
pub use interval::Interval;
