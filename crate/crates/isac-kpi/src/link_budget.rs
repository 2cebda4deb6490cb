//! Thermal-noise link budget for the mono-static sensing link: received
//! power, noise power, per-symbol and post-processing SNR, the
//! noise-limited maximum range and RCS estimation from a measured peak.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::system::SystemConfig;
use crate::target::Target;
use crate::units::{noise_density_w_per_hz, Power, SPEED_OF_LIGHT};

/// SNR decomposition for one target: absolute powers, per-symbol SNR and
/// the post-processing SNR after coherent integration over the N x M grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrBreakdown {
    pub received_power_w: f64,
    pub noise_power_w: f64,
    /// Per-symbol SNR before integration.
    pub per_symbol_snr: f64,
    /// N * M.
    pub processing_gain: f64,
    /// per_symbol_snr * processing_gain, exactly.
    pub post_snr: f64,
}

/// Monostatic radar equation:
/// P_R = P_T G_T G_R psi c0^2 / ((4 pi)^3 r^4 f_c^2).
pub fn received_power(cfg: &SystemConfig, rcs_m2: f64, range_m: f64, tx_power: Power) -> Result<f64> {
    if !(rcs_m2.is_finite() && rcs_m2 > 0.0) {
        return Err(ModelError::NonPositive { quantity: "rcs_m2", value: rcs_m2 });
    }
    if !(range_m.is_finite() && range_m > 0.0) {
        return Err(ModelError::NonPositive { quantity: "range_m", value: range_m });
    }
    let four_pi_cubed = (4.0 * std::f64::consts::PI).powi(3);
    Ok(tx_power.watts() * cfg.array_gain().linear() * cfg.rx_array_gain().linear() * rcs_m2
        * SPEED_OF_LIGHT.powi(2)
        / (four_pi_cubed * range_m.powi(4) * cfg.carrier_frequency_hz.powi(2)))
}

/// Receiver noise power over the occupied bandwidth: N0 * F * N * delta_f.
pub fn noise_power(cfg: &SystemConfig) -> f64 {
    noise_density_w_per_hz() * cfg.noise_figure.linear() * cfg.occupied_bandwidth_hz()
}

/// Full SNR breakdown for a target at its configured range.
pub fn snr(cfg: &SystemConfig, target: &Target, tx_power: Power) -> Result<SnrBreakdown> {
    target.validate()?;
    let p_r = received_power(cfg, target.rcs_m2, target.range_m, tx_power)?;
    let p_n = noise_power(cfg);
    let per_symbol = p_r / p_n;
    let gain = cfg.subcarrier_count as f64 * cfg.symbols_per_frame()? as f64;
    Ok(SnrBreakdown {
        received_power_w: p_r,
        noise_power_w: p_n,
        per_symbol_snr: per_symbol,
        processing_gain: gain,
        post_snr: per_symbol * gain,
    })
}

/// Noise-limited maximum range: the range where the post-processing SNR
/// falls to `snr_floor`. The subcarrier count cancels between processing
/// gain and noise bandwidth, leaving
/// r = (P_T G_T G_R psi c0^2 M / (gamma* (4 pi)^3 f_c^2 N0 F delta_f))^(1/4).
pub fn max_range_noise(
    cfg: &SystemConfig,
    rcs_m2: f64,
    tx_power: Power,
    snr_floor: f64,
) -> Result<f64> {
    if !(rcs_m2.is_finite() && rcs_m2 > 0.0) {
        return Err(ModelError::NonPositive { quantity: "rcs_m2", value: rcs_m2 });
    }
    if !(snr_floor.is_finite() && snr_floor > 0.0) {
        return Err(ModelError::NonPositive { quantity: "snr_floor", value: snr_floor });
    }
    let four_pi_cubed = (4.0 * std::f64::consts::PI).powi(3);
    let m = cfg.symbols_per_frame()? as f64;
    let num = tx_power.watts() * cfg.array_gain().linear() * cfg.rx_array_gain().linear() * rcs_m2
        * SPEED_OF_LIGHT.powi(2)
        * m;
    let den = snr_floor
        * four_pi_cubed
        * cfg.carrier_frequency_hz.powi(2)
        * noise_density_w_per_hz()
        * cfg.noise_figure.linear()
        * cfg.subcarrier_spacing_hz;
    Ok((num / den).powf(0.25))
}

/// RCS from a measured periodogram peak (absolute watts after processing):
/// the radar equation inverted with the N * M integration gain divided out.
pub fn estimate_rcs(
    cfg: &SystemConfig,
    peak_power_w: f64,
    range_m: f64,
    tx_power: Power,
) -> Result<f64> {
    if !(peak_power_w.is_finite() && peak_power_w > 0.0) {
        return Err(ModelError::NonPositive { quantity: "peak_power_w", value: peak_power_w });
    }
    if !(range_m.is_finite() && range_m > 0.0) {
        return Err(ModelError::NonPositive { quantity: "range_m", value: range_m });
    }
    let four_pi_cubed = (4.0 * std::f64::consts::PI).powi(3);
    let nm = cfg.subcarrier_count as f64 * cfg.symbols_per_frame()? as f64;
    Ok(peak_power_w * four_pi_cubed * range_m.powi(4) * cfg.carrier_frequency_hz.powi(2)
        / (tx_power.watts() * nm * cfg.array_gain().linear() * cfg.rx_array_gain().linear()
            * SPEED_OF_LIGHT.powi(2)))
}
