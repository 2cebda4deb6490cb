//! System parameterization: carrier, OFDM numerology, PRS allocation,
//! antenna arrays and power limits, plus the derived quantities every KPI
//! formula consumes (array gain, symbol budget per frame, Doppler sampling
//! period, EMF-constrained indoor power).

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::units::{Gain, Power, SPEED_OF_LIGHT};

/// Uniform rectangular array: element counts and spacings in wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub rows: u32,
    pub cols: u32,
    pub row_spacing_wavelengths: f64,
    pub col_spacing_wavelengths: f64,
}

impl ArrayGeometry {
    pub fn validate(&self) -> Result<()> {
        if self.rows < 1 {
            return Err(ModelError::InvalidConfig {
                field: "array.rows",
                reason: "must be >= 1".into(),
            });
        }
        if self.cols < 1 {
            return Err(ModelError::InvalidConfig {
                field: "array.cols",
                reason: "must be >= 1".into(),
            });
        }
        for (f, v) in [
            ("array.row_spacing_wavelengths", self.row_spacing_wavelengths),
            ("array.col_spacing_wavelengths", self.col_spacing_wavelengths),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidConfig {
                    field: f,
                    reason: format!("must be > 0, got {v}"),
                });
            }
        }
        Ok(())
    }

    /// Physical diagonal of the aperture at wavelength `lambda_m`, meters.
    pub fn diagonal_m(&self, lambda_m: f64) -> f64 {
        let h = self.rows as f64 * self.row_spacing_wavelengths * lambda_m;
        let w = self.cols as f64 * self.col_spacing_wavelengths * lambda_m;
        (h * h + w * w).sqrt()
    }
}

/// PRS allocation: symbols per slot, comb stride, frame timing and TDD duty
/// cycle. The comb pattern revisits a given subcarrier every `comb_size`
/// symbols, which sets the effective Doppler sampling period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrsConfig {
    pub symbols_per_slot: u32,
    pub comb_size: u32,
    pub frame_duration_s: f64,
    pub duty_cycle: f64,
}

/// Standard PRS symbol/comb counts; 1 is accepted as the trivial "no comb"
/// configuration for studies outside the standardized set.
const PRS_COUNTS: [u32; 5] = [1, 2, 4, 6, 12];

impl PrsConfig {
    pub fn validate(&self) -> Result<()> {
        if !PRS_COUNTS.contains(&self.symbols_per_slot) {
            return Err(ModelError::InvalidConfig {
                field: "prs.symbols_per_slot",
                reason: format!("must be one of {PRS_COUNTS:?}, got {}", self.symbols_per_slot),
            });
        }
        if !PRS_COUNTS.contains(&self.comb_size) {
            return Err(ModelError::InvalidConfig {
                field: "prs.comb_size",
                reason: format!("must be one of {PRS_COUNTS:?}, got {}", self.comb_size),
            });
        }
        if self.symbols_per_slot % self.comb_size != 0 {
            return Err(ModelError::InvalidConfig {
                field: "prs.comb_size",
                reason: format!(
                    "symbols_per_slot {} not divisible by comb_size {}",
                    self.symbols_per_slot, self.comb_size
                ),
            });
        }
        if !(self.frame_duration_s.is_finite() && self.frame_duration_s > 0.0) {
            return Err(ModelError::InvalidConfig {
                field: "prs.frame_duration_s",
                reason: format!("must be > 0, got {}", self.frame_duration_s),
            });
        }
        if !(self.duty_cycle.is_finite() && self.duty_cycle > 0.0 && self.duty_cycle <= 1.0) {
            return Err(ModelError::InvalidConfig {
                field: "prs.duty_cycle",
                reason: format!("must be in (0, 1], got {}", self.duty_cycle),
            });
        }
        Ok(())
    }

    /// Effective PRS symbols usable per slot after comb thinning.
    pub fn effective_symbols_per_slot(&self) -> u32 {
        self.symbols_per_slot / self.comb_size
    }

    /// Default allocation: 12 symbols, comb-2, 10 ms frame, 80% downlink.
    pub fn standard() -> Self {
        PrsConfig {
            symbols_per_slot: 12,
            comb_size: 2,
            frame_duration_s: 10e-3,
            duty_cycle: 0.8,
        }
    }
}

/// Frequency-range presets from the reference parameterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Band {
    Fr1,
    Fr2,
    Fr3,
}

impl Band {
    pub const ALL: [Band; 3] = [Band::Fr1, Band::Fr2, Band::Fr3];

    pub fn label(self) -> &'static str {
        match self {
            Band::Fr1 => "fr1",
            Band::Fr2 => "fr2",
            Band::Fr3 => "fr3",
        }
    }

    pub fn parse(s: &str) -> Option<Band> {
        match s.to_ascii_lowercase().as_str() {
            "fr1" => Some(Band::Fr1),
            "fr2" => Some(Band::Fr2),
            "fr3" => Some(Band::Fr3),
            _ => None,
        }
    }
}

/// Full system parameterization. Constructed from a built-in band preset or
/// deserialized from JSON (dB-keyed, see `SystemConfigJson`); internally all
/// fields are linear SI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemConfigJson", into = "SystemConfigJson")]
pub struct SystemConfig {
    pub band: String,
    pub carrier_frequency_hz: f64,
    /// Nominal (carrier-aggregation) bandwidth; descriptive only, the
    /// formulas use the occupied bandwidth N * delta_f.
    pub nominal_bandwidth_hz: Option<f64>,
    pub subcarrier_spacing_hz: f64,
    pub subcarrier_count: u32,
    /// OFDM symbol duration including cyclic prefix.
    pub symbol_duration_s: f64,
    pub noise_figure: Gain,
    pub element_gain: Gain,
    pub array: ArrayGeometry,
    /// Receive-array override for asymmetric studies; transmit array reused
    /// when absent (co-located arrays of equal characteristics).
    pub rx_array: Option<ArrayGeometry>,
    pub outdoor_power: Power,
    /// Explicit indoor power; wins over the EMF-derived limit when set.
    pub indoor_power_override: Option<Power>,
    pub adc_bits: u32,
    /// Optional FFT fixed-point width; absent means ideal transforms.
    pub fft_bits: Option<u32>,
    pub prs: PrsConfig,
    pub papr_penalty: Gain,
    /// AGC implementation loss dividing the receiver SQNR; 1.0 = perfect AGC.
    pub agc_loss: Gain,
    /// EMF power-reduction factor applied on top of the duty cycle.
    pub emf_power_reduction: f64,
    /// EMF exposure limit, W/m^2.
    pub emf_density_limit_w_per_m2: f64,
    /// Reference distance at which the EMF limit is enforced, m.
    pub emf_reference_distance_m: f64,
    /// Pins the symbol budget per frame, bypassing the PRS derivation.
    pub symbols_per_frame_override: Option<u32>,
}

/// Derived quantities consumed by the KPI formulas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedParams {
    /// Transmit array gain (equals receive gain unless rx_array is set).
    pub array_gain: Gain,
    pub symbols_per_frame: u32,
    pub doppler_sampling_period_s: f64,
    pub indoor_power_limit: Power,
}

/// Effective indoor power with its EMF limit and an override consistency
/// warning when the override exceeds the limit.
#[derive(Debug, Clone, PartialEq)]
pub struct IndoorPower {
    pub limit: Power,
    pub effective: Power,
    pub warning: Option<String>,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        for (f, v) in [
            ("carrier_frequency_hz", self.carrier_frequency_hz),
            ("subcarrier_spacing_hz", self.subcarrier_spacing_hz),
            ("symbol_duration_s", self.symbol_duration_s),
            ("emf_power_reduction", self.emf_power_reduction),
            ("emf_density_limit_w_per_m2", self.emf_density_limit_w_per_m2),
            ("emf_reference_distance_m", self.emf_reference_distance_m),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidConfig {
                    field: f,
                    reason: format!("must be > 0, got {v}"),
                });
            }
        }
        if self.subcarrier_count < 2 {
            return Err(ModelError::InvalidConfig {
                field: "subcarrier_count",
                reason: format!("must be >= 2, got {}", self.subcarrier_count),
            });
        }
        if self.symbol_duration_s < 1.0 / self.subcarrier_spacing_hz {
            return Err(ModelError::InvalidConfig {
                field: "symbol_duration_s",
                reason: format!(
                    "must be >= 1/subcarrier_spacing = {:.3e} s (cyclic prefix cannot be negative)",
                    1.0 / self.subcarrier_spacing_hz
                ),
            });
        }
        if self.adc_bits < 1 {
            return Err(ModelError::InvalidConfig {
                field: "adc_bits",
                reason: "must be >= 1".into(),
            });
        }
        if let Some(q) = self.fft_bits {
            if q < 1 {
                return Err(ModelError::InvalidConfig {
                    field: "fft_bits",
                    reason: "must be >= 1 when present".into(),
                });
            }
        }
        self.array.validate()?;
        if let Some(rx) = &self.rx_array {
            rx.validate()?;
        }
        self.prs.validate()?;
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency_hz
    }

    /// Occupied bandwidth N * delta_f, Hz.
    pub fn occupied_bandwidth_hz(&self) -> f64 {
        self.subcarrier_count as f64 * self.subcarrier_spacing_hz
    }

    /// Transmit array gain G = R * C * G_E.
    pub fn array_gain(&self) -> Gain {
        gain_of(&self.array, self.element_gain)
    }

    /// Receive array gain; the transmit array is reused unless an rx_array
    /// override is configured.
    pub fn rx_array_gain(&self) -> Gain {
        match &self.rx_array {
            Some(rx) => gain_of(rx, self.element_gain),
            None => self.array_gain(),
        }
    }

    /// Slot duration from the standard numerology: 1 ms / 2^mu where the
    /// subcarrier spacing is 15 kHz * 2^mu.
    pub fn slot_duration_s(&self) -> Result<f64> {
        let ratio = self.subcarrier_spacing_hz / 15e3;
        let mu = ratio.log2();
        let mu_round = mu.round();
        if mu_round < 0.0 || mu_round > 6.0 || (mu - mu_round).abs() > 1e-9 {
            return Err(ModelError::UnsupportedNumerology {
                spacing_hz: self.subcarrier_spacing_hz,
            });
        }
        Ok(1e-3 / 2f64.powf(mu_round))
    }

    /// OFDM symbols usable for sensing per radio frame:
    /// floor(slots_per_frame * effective PRS symbols per slot * duty cycle).
    /// An explicit override wins.
    pub fn symbols_per_frame(&self) -> Result<u32> {
        if let Some(m) = self.symbols_per_frame_override {
            return Ok(m);
        }
        let slots = self.prs.frame_duration_s / self.slot_duration_s()?;
        let m = slots * self.prs.effective_symbols_per_slot() as f64 * self.prs.duty_cycle;
        Ok(m.floor() as u32)
    }

    /// EMF-constrained indoor transmit power:
    /// S0 * 4 pi d'^2 / (G * T* * P*).
    pub fn indoor_power_limit(&self) -> Power {
        let w = self.emf_density_limit_w_per_m2 * 4.0 * std::f64::consts::PI
            * self.emf_reference_distance_m.powi(2)
            / (self.array_gain().linear() * self.prs.duty_cycle * self.emf_power_reduction);
        Power::from_watts(w).expect("EMF limit positive for a valid config")
    }

    /// Indoor power with override resolution and consistency warning.
    pub fn indoor_power(&self) -> IndoorPower {
        let limit = self.indoor_power_limit();
        match self.indoor_power_override {
            Some(p) => {
                let warning = (p.watts() > limit.watts()).then(|| {
                    format!(
                        "indoor power override {:.2} dBm exceeds the EMF limit {:.2} dBm",
                        p.dbm(),
                        limit.dbm()
                    )
                });
                IndoorPower { limit, effective: p, warning }
            }
            None => IndoorPower { limit, effective: limit, warning: None },
        }
    }

    /// Effective Doppler sampling period: the comb pattern revisits a given
    /// subcarrier every comb_size symbols, so T_D = comb_size * T_0.
    pub fn doppler_sampling_period_s(&self) -> f64 {
        self.prs.comb_size as f64 * self.symbol_duration_s
    }

    pub fn derived(&self) -> Result<DerivedParams> {
        Ok(DerivedParams {
            array_gain: self.array_gain(),
            symbols_per_frame: self.symbols_per_frame()?,
            doppler_sampling_period_s: self.doppler_sampling_period_s(),
            indoor_power_limit: self.indoor_power_limit(),
        })
    }

    /// Frozen built-in parameterizations (golden data).
    pub fn builtin(band: Band) -> SystemConfig {
        let (fc, b_nom, df, t0, n, array, pout_dbm) = match band {
            Band::Fr1 => (
                3.5e9,
                200e6,
                30e3,
                35.67e-6,
                6552,
                ArrayGeometry {
                    rows: 24,
                    cols: 8,
                    row_spacing_wavelengths: 0.7,
                    col_spacing_wavelengths: 0.5,
                },
                49.0,
            ),
            Band::Fr2 => (
                28e9,
                1600e6,
                120e3,
                8.92e-6,
                12672,
                ArrayGeometry {
                    rows: 32,
                    cols: 32,
                    row_spacing_wavelengths: 0.5,
                    col_spacing_wavelengths: 0.5,
                },
                36.0,
            ),
            Band::Fr3 => (
                7e9,
                400e6,
                60e3,
                17.84e-6,
                6480,
                ArrayGeometry {
                    rows: 32,
                    cols: 32,
                    row_spacing_wavelengths: 0.5,
                    col_spacing_wavelengths: 0.5,
                },
                49.0,
            ),
        };
        SystemConfig {
            band: band.label().to_string(),
            carrier_frequency_hz: fc,
            nominal_bandwidth_hz: Some(b_nom),
            subcarrier_spacing_hz: df,
            subcarrier_count: n,
            symbol_duration_s: t0,
            noise_figure: Gain::from_db(8.0).unwrap(),
            element_gain: Gain::from_db(3.0).unwrap(),
            array,
            rx_array: None,
            outdoor_power: Power::from_dbm(pout_dbm).unwrap(),
            indoor_power_override: None,
            adc_bits: 12,
            fft_bits: None,
            prs: PrsConfig::standard(),
            papr_penalty: Gain::from_db(8.0).unwrap(),
            agc_loss: Gain::from_linear(1.0).unwrap(),
            emf_power_reduction: 0.25,
            emf_density_limit_w_per_m2: 10.0,
            emf_reference_distance_m: 1.0,
            symbols_per_frame_override: None,
        }
    }
}

fn gain_of(array: &ArrayGeometry, element_gain: Gain) -> Gain {
    Gain::from_linear(array.rows as f64 * array.cols as f64 * element_gain.linear())
        .expect("array gain positive for a valid geometry")
}

/// JSON mirror of `SystemConfig`: dB-valued fields carry a _db / _dbm / _dbi
/// suffix; everything else is plain SI.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfigJson {
    #[serde(default = "default_band_label")]
    pub band: String,
    pub carrier_frequency_hz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nominal_bandwidth_hz: Option<f64>,
    pub subcarrier_spacing_hz: f64,
    pub subcarrier_count: u32,
    pub symbol_duration_s: f64,
    pub noise_figure_db: f64,
    pub element_gain_dbi: f64,
    pub array: ArrayGeometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rx_array: Option<ArrayGeometry>,
    pub outdoor_power_dbm: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indoor_power_dbm: Option<f64>,
    pub adc_bits: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fft_bits: Option<u32>,
    #[serde(default = "PrsConfig::standard")]
    pub prs: PrsConfig,
    #[serde(default = "default_papr_db")]
    pub papr_penalty_db: f64,
    #[serde(default)]
    pub agc_loss_db: f64,
    #[serde(default = "default_emf_power_reduction")]
    pub emf_power_reduction: f64,
    #[serde(default = "default_emf_density")]
    pub emf_density_limit_w_per_m2: f64,
    #[serde(default = "default_emf_distance")]
    pub emf_reference_distance_m: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbols_per_frame_override: Option<u32>,
}

fn default_band_label() -> String {
    "custom".to_string()
}
fn default_papr_db() -> f64 {
    8.0
}
fn default_emf_power_reduction() -> f64 {
    0.25
}
fn default_emf_density() -> f64 {
    10.0
}
fn default_emf_distance() -> f64 {
    1.0
}

impl TryFrom<SystemConfigJson> for SystemConfig {
    type Error = ModelError;

    fn try_from(j: SystemConfigJson) -> Result<SystemConfig> {
        let cfg = SystemConfig {
            band: j.band,
            carrier_frequency_hz: j.carrier_frequency_hz,
            nominal_bandwidth_hz: j.nominal_bandwidth_hz,
            subcarrier_spacing_hz: j.subcarrier_spacing_hz,
            subcarrier_count: j.subcarrier_count,
            symbol_duration_s: j.symbol_duration_s,
            noise_figure: Gain::from_db(j.noise_figure_db)?,
            element_gain: Gain::from_db(j.element_gain_dbi)?,
            array: j.array,
            rx_array: j.rx_array,
            outdoor_power: Power::from_dbm(j.outdoor_power_dbm)?,
            indoor_power_override: j.indoor_power_dbm.map(Power::from_dbm).transpose()?,
            adc_bits: j.adc_bits,
            fft_bits: j.fft_bits,
            prs: j.prs,
            papr_penalty: Gain::from_db(j.papr_penalty_db)?,
            agc_loss: Gain::from_db(j.agc_loss_db)?,
            emf_power_reduction: j.emf_power_reduction,
            emf_density_limit_w_per_m2: j.emf_density_limit_w_per_m2,
            emf_reference_distance_m: j.emf_reference_distance_m,
            symbols_per_frame_override: j.symbols_per_frame_override,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<SystemConfig> for SystemConfigJson {
    fn from(c: SystemConfig) -> SystemConfigJson {
        SystemConfigJson {
            band: c.band,
            carrier_frequency_hz: c.carrier_frequency_hz,
            nominal_bandwidth_hz: c.nominal_bandwidth_hz,
            subcarrier_spacing_hz: c.subcarrier_spacing_hz,
            subcarrier_count: c.subcarrier_count,
            symbol_duration_s: c.symbol_duration_s,
            noise_figure_db: c.noise_figure.db(),
            element_gain_dbi: c.element_gain.db(),
            array: c.array,
            rx_array: c.rx_array,
            outdoor_power_dbm: c.outdoor_power.dbm(),
            indoor_power_dbm: c.indoor_power_override.map(Power::dbm),
            adc_bits: c.adc_bits,
            fft_bits: c.fft_bits,
            prs: c.prs,
            papr_penalty_db: c.papr_penalty.db(),
            agc_loss_db: c.agc_loss.db(),
            emf_power_reduction: c.emf_power_reduction,
            emf_density_limit_w_per_m2: c.emf_density_limit_w_per_m2,
            emf_reference_distance_m: c.emf_reference_distance_m,
            symbols_per_frame_override: c.symbols_per_frame_override,
        }
    }
}
