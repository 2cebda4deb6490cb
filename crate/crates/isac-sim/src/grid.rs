//! The post-equalization symbol-domain grid and receiver quantization.

use ndarray::Array4;
use num_complex::Complex64;

use crate::error::{Result, SimError};

/// Physical axis scales captured from the config that synthesized a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridMeta {
    pub subcarrier_spacing_hz: f64,
    pub doppler_sampling_period_s: f64,
    pub carrier_frequency_hz: f64,
    pub row_spacing_wavelengths: f64,
    pub col_spacing_wavelengths: f64,
}

/// Complex samples indexed (subcarrier n, symbol m, column c, row r).
#[derive(Debug, Clone)]
pub struct SymbolGrid {
    pub data: Array4<Complex64>,
    pub meta: GridMeta,
}

impl SymbolGrid {
    pub fn total_power(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Largest absolute real or imaginary component: the quantizer full scale
/// under perfect AGC.
pub(crate) fn full_scale<'a>(values: impl Iterator<Item = &'a Complex64>) -> f64 {
    values.fold(0.0f64, |fs, z| fs.max(z.re.abs()).max(z.im.abs()))
}

/// Uniform mid-rise quantization of real and imaginary parts in place,
/// `bits` per component, full scale at the maximum component. A zero
/// input is left untouched.
pub(crate) fn quantize_components(values: &mut [Complex64], bits: u32) -> Result<()> {
    if !(1..=52).contains(&bits) {
        return Err(SimError::InvalidRequest(format!(
            "quantizer width must be 1..=52 bits, got {bits}"
        )));
    }
    let fs = full_scale(values.iter());
    if fs == 0.0 {
        return Ok(());
    }
    let half_levels = (1u64 << (bits - 1)) as f64;
    let step = fs / half_levels;
    let q = |x: f64| {
        let idx = (x / step).floor().clamp(-half_levels, half_levels - 1.0);
        step * (idx + 0.5)
    };
    for z in values {
        *z = Complex64::new(q(z.re), q(z.im));
    }
    Ok(())
}

/// Quantizes a symbol grid in place as the ADC stage would: mid-rise,
/// full scale at the grid's maximum absolute component (perfect AGC).
pub fn quantize_grid(grid: &mut SymbolGrid, bits: u32) -> Result<()> {
    let data = grid
        .data
        .as_slice_mut()
        .expect("symbol grid is stored in standard layout");
    quantize_components(data, bits)
}
