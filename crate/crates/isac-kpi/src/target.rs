//! Sensing target description shared by the link budget, the scenario
//! evaluator and the simulator.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// A point target: radar cross section, position and radial motion.
///
/// Azimuth is measured in the horizontal array axis, elevation in the
/// vertical one; both are zero at boresight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Target {
    /// Radar cross section, m^2.
    pub rcs_m2: f64,
    /// Distance from the array, m.
    pub range_m: f64,
    /// Radial speed, m/s; positive means moving away.
    #[serde(default)]
    pub speed_mps: f64,
    #[serde(default)]
    pub azimuth_deg: f64,
    #[serde(default)]
    pub elevation_deg: f64,
}

impl Target {
    pub fn validate(&self) -> Result<()> {
        if !(self.rcs_m2.is_finite() && self.rcs_m2 > 0.0) {
            return Err(ModelError::NonPositive {
                quantity: "target rcs_m2",
                value: self.rcs_m2,
            });
        }
        if !(self.range_m.is_finite() && self.range_m > 0.0) {
            return Err(ModelError::NonPositive {
                quantity: "target range_m",
                value: self.range_m,
            });
        }
        for (q, v) in [
            ("target speed_mps", self.speed_mps),
            ("target azimuth_deg", self.azimuth_deg),
            ("target elevation_deg", self.elevation_deg),
        ] {
            if !v.is_finite() {
                return Err(ModelError::NonFinite { quantity: q, value: v });
            }
        }
        Ok(())
    }

    /// Static target at boresight.
    pub fn at(rcs_m2: f64, range_m: f64) -> Self {
        Target {
            rcs_m2,
            range_m,
            speed_mps: 0.0,
            azimuth_deg: 0.0,
            elevation_deg: 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(Target::at(1.0, 100.0).validate().is_ok());
        assert!(Target::at(0.0, 100.0).validate().is_err());
        assert!(Target::at(1.0, -5.0).validate().is_err());
    }
}
