//! Desk-scale laboratory for adaptive codebook selection in codebook-based
//! CSI feedback.
//!
//! The crate covers the full loop of a UE-assisted codebook adaptation study:
//!
//! - [`channel`] — seeded parametric geometric multipath channels for a
//!   cross-polarized 2D antenna array.
//! - [`codebook`] — generalized DFT codebooks (spatial / frequency / time
//!   bases plus top-K linear-combination coefficients), quantization,
//!   reconstruction and per-codebook CSI overhead pricing.
//! - [`assistance`] — normalized spatial / frequency / time channel
//!   autocorrelation reports (SDCP, FDCP, TDCP) and feature assembly.
//! - [`agcs`] — ideal precoder extraction and the aging-aware generalized
//!   cosine similarity metric evaluated at a configurable reporting delay.
//! - [`predictor`] — a small fully-connected network mapping assistance
//!   features to per-codebook AGCS predictions, with training, evaluation,
//!   permutation importance and feature pruning.
//! - [`selection`] — overhead-aware codebook selection policies and a policy
//!   evaluation harness with fixed-codebook baselines.
//! - [`config`], [`dataset_io`], [`pipeline`], [`svgplot`] — experiment
//!   configuration, the JSON-lines dataset format, the command pipeline used
//!   by the CLI, and dependency-free SVG report plots.
//!
//! Everything is deterministic: all randomness flows from one global 64-bit
//! seed through the [`rng`] module's counter-based generator, so datasets and
//! model checkpoints are byte-identical across runs with equal configs.

pub mod agcs;
pub mod assistance;
pub mod channel;
pub mod codebook;
pub mod config;
pub mod dataset_io;
pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod predictor;
pub mod rng;
pub mod selection;
pub mod svgplot;

pub use error::{Error, Result};
