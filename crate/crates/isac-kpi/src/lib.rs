//! Analytic sensing-performance model for ISAC cellular deployments.
//!
//! The crate models a mono-static OFDM sensing link built on standardized
//! downlink pilots (PRS) and answers two questions for a given system
//! parameterization: how well can it sense (accuracy and resolution KPIs),
//! and how far (maximum range under thermal noise, quantization noise,
//! angular resolution and ambiguity constraints).
//!
//! Everything internal is linear SI; decibel forms appear only at API
//! boundaries. See [`units`] for the conversion rules.

pub mod accuracy;
pub mod error;
pub mod link_budget;
pub mod quantization;
pub mod resolution;
pub mod system;
pub mod target;
pub mod units;

pub use error::ModelError;
pub use system::{ArrayGeometry, Band, DerivedParams, PrsConfig, SystemConfig};
pub use target::Target;
pub use units::{Gain, Power};
