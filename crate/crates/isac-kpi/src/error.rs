//! Error type shared by the KPI modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{quantity} must be finite, got {value}")]
    NonFinite { quantity: &'static str, value: f64 },

    #[error("{quantity} must be > 0, got {value}")]
    NonPositive { quantity: &'static str, value: f64 },

    #[error("invalid config field {field}: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("unsupported numerology: subcarrier spacing {spacing_hz} Hz is not 15 kHz * 2^mu")]
    UnsupportedNumerology { spacing_hz: f64 },

    #[error("environment is empty: need at least one clutter object or a self-interference term")]
    EmptyEnvironment,

    #[error("accuracy undefined at steering (azimuth {azimuth_deg} deg, elevation {elevation_deg} deg): asin argument out of [-1, 1] on both branches")]
    UndefinedAtSteering { azimuth_deg: f64, elevation_deg: f64 },

    #[error("steering (azimuth {azimuth_deg} deg, elevation {elevation_deg} deg) maps outside the array's reachable angular-frequency region")]
    UnreachableSteering { azimuth_deg: f64, elevation_deg: f64 },

    #[error("unresolvable at this steering: {reason}")]
    Unresolvable { reason: String },
}

pub type Result<T> = std::result::Result<T, ModelError>;
