//! Unit-safe scalars, dB conversions and physical constants.
//!
//! All model formulas work in linear SI units; dB and dBm enter and leave
//! through the constructors and accessors here.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// Speed of light in vacuum, m/s. Exact by SI definition; published tables
/// that round to 3e8 differ from values computed here by < 0.07%.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise spectral density at the reference temperature, dBm/Hz.
pub const NOISE_DENSITY_DBM_PER_HZ: f64 = -174.0;

/// Thermal noise spectral density in W/Hz (linear form of -174 dBm/Hz).
pub fn noise_density_w_per_hz() -> f64 {
    10f64.powf(NOISE_DENSITY_DBM_PER_HZ / 10.0) * 1e-3
}

/// 10^(x/10). Rejects non-finite input.
pub fn db_to_linear(db: f64) -> Result<f64> {
    if !db.is_finite() {
        return Err(ModelError::NonFinite {
            quantity: "dB value",
            value: db,
        });
    }
    Ok(10f64.powf(db / 10.0))
}

/// 10*log10(x). Rejects x <= 0 and non-finite input.
pub fn linear_to_db(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(ModelError::NonFinite {
            quantity: "linear ratio",
            value: x,
        });
    }
    if x <= 0.0 {
        return Err(ModelError::NonPositive {
            quantity: "linear ratio",
            value: x,
        });
    }
    Ok(10.0 * x.log10())
}

/// A strictly positive power, stored in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Power(f64);

impl Power {
    pub fn from_watts(w: f64) -> Result<Self> {
        if !w.is_finite() {
            return Err(ModelError::NonFinite {
                quantity: "power [W]",
                value: w,
            });
        }
        if w <= 0.0 {
            return Err(ModelError::NonPositive {
                quantity: "power [W]",
                value: w,
            });
        }
        Ok(Power(w))
    }

    pub fn from_dbm(dbm: f64) -> Result<Self> {
        Ok(Power(db_to_linear(dbm)? * 1e-3))
    }

    pub fn watts(self) -> f64 {
        self.0
    }

    pub fn dbm(self) -> f64 {
        // Infallible: the stored value is strictly positive.
        10.0 * (self.0 * 1e3).log10()
    }
}

/// A strictly positive dimensionless ratio (antenna gain, noise figure,
/// PAPR penalty, ...), stored in linear form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Gain(f64);

impl Gain {
    pub fn from_linear(x: f64) -> Result<Self> {
        if !x.is_finite() {
            return Err(ModelError::NonFinite {
                quantity: "gain (linear)",
                value: x,
            });
        }
        if x <= 0.0 {
            return Err(ModelError::NonPositive {
                quantity: "gain (linear)",
                value: x,
            });
        }
        Ok(Gain(x))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        Ok(Gain(db_to_linear(db)?))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}
