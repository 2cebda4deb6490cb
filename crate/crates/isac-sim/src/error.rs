//! Error type of the simulator.

use isac_kpi::ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("miss rate too high: only {detected} of {trials} trials produced a usable detection")]
    MissRate { detected: usize, trials: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
