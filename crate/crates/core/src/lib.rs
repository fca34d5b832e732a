//! Detects dataset biases in SQuAD-style reading-comprehension data.
//!
//! The pipeline perturbs a dataset in eight ways ([`ablations`]), scores a
//! model on the original and perturbed copies ([`evaluation`]), and turns the
//! F1 drops into a per-bias report ([`report`]). Any model can take part
//! through a predictions file; [`reader`] provides a built-in heuristic one.

pub mod ablations;
pub mod cli;
pub mod evaluation;
pub mod reader;
pub mod report;
pub mod squad;
pub mod text;

pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");
