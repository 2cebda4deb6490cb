//! OFDM radar Monte Carlo simulator.
//!
//! Synthesizes the post-equalization symbol-domain grid for a multi-target
//! scene, applies receiver quantization, computes zero-padded periodograms
//! over a chosen axis pair, detects and estimates targets, and validates
//! the analytic accuracy bounds empirically.
//!
//! The simulation is noise-normalized: thermal noise has unit variance per
//! complex sample and each target's amplitude carries its per-symbol SNR,
//! which the link-budget model supplies from physical scene parameters.

pub mod detect;
pub mod error;
pub mod export;
pub mod grid;
pub mod monte_carlo;
pub mod periodogram;
pub mod scene;

pub use detect::{detect_targets, Detection, Detections};
pub use error::{Result, SimError};
pub use grid::{quantize_grid, GridMeta, SymbolGrid};
pub use monte_carlo::{monte_carlo_accuracy, MonteCarloResult};
pub use periodogram::{compute_periodogram, Axes, PeriodogramGrid, PeriodogramOptions, Window};
pub use scene::{synthesize_grid, GridDims, SimScene, Synthesis};
