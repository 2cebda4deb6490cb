//! Windowed, zero-padded 2D periodogram over a symbol grid.
//!
//! The range axis always transforms the subcarrier dimension; the second
//! axis is either the symbol (Doppler) or the array-column (azimuth)
//! dimension. Power is averaged non-coherently over the remaining axes.

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::grid::{quantize_components, SymbolGrid};
use isac_kpi::units::SPEED_OF_LIGHT;

/// Which pair of grid axes the periodogram transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axes {
    RangeDoppler,
    RangeAzimuth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Window {
    Rectangular,
    Hann,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PeriodogramOptions {
    pub axes: Axes,
    /// Zero-padding factor applied to both transformed axes.
    pub pad: usize,
    pub window: Window,
    /// Mid-rise word width applied to the transform input and output,
    /// modeling a fixed-point FFT. None computes in full precision.
    pub fft_bits: Option<u32>,
}

impl Default for PeriodogramOptions {
    fn default() -> Self {
        PeriodogramOptions {
            axes: Axes::RangeDoppler,
            pad: 1,
            window: Window::Rectangular,
            fft_bits: None,
        }
    }
}

/// Periodogram output. Rows index range bins 0..P0; columns index the
/// fftshifted second axis, so column `j` carries signed bin `j - center`.
#[derive(Debug, Clone)]
pub struct PeriodogramGrid {
    pub power: Array2<f64>,
    pub axes: Axes,
    pub pad: usize,
    pub window: Window,
    /// Meters per padded range bin.
    pub range_bin_m: f64,
    /// Second-axis quantity per padded bin: m/s for Doppler, normalized
    /// aperture frequency for azimuth.
    pub second_bin: f64,
    /// Column index of signed bin zero.
    pub second_center: usize,
    pub col_spacing_wavelengths: f64,
    /// Pre-padding lengths of the two transformed axes.
    pub transformed_len: (usize, usize),
}

impl PeriodogramGrid {
    pub fn range_of_bin(&self, bin: f64) -> f64 {
        bin * self.range_bin_m
    }

    /// Physical value of a (possibly fractional) column index.
    pub fn second_of_bin(&self, bin: f64) -> f64 {
        (bin - self.second_center as f64) * self.second_bin
    }

    pub fn second_axis_label(&self) -> &'static str {
        match self.axes {
            Axes::RangeDoppler => "speed_mps",
            Axes::RangeAzimuth => "azimuth_naf",
        }
    }

    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Noise floor from the median bin power. The median of a unit-mean
    /// exponential is ln 2, so dividing restores the mean without letting
    /// sparse strong peaks bias the estimate.
    pub fn noise_floor_estimate(&self) -> f64 {
        let mut values: Vec<f64> = self.power.iter().copied().collect();
        let mid = values.len() / 2;
        let (_, median, _) = values.select_nth_unstable_by(mid, f64::total_cmp);
        *median / std::f64::consts::LN_2
    }
}

fn window_vec(window: Window, len: usize) -> Vec<f64> {
    match window {
        Window::Rectangular => vec![1.0; len],
        Window::Hann => {
            if len == 1 {
                return vec![1.0];
            }
            (0..len)
                .map(|i| 0.5 * (1.0 - (std::f64::consts::TAU * i as f64 / len as f64).cos()))
                .collect()
        }
    }
}

pub fn compute_periodogram(
    grid: &SymbolGrid,
    options: &PeriodogramOptions,
) -> Result<PeriodogramGrid> {
    if options.pad < 1 {
        return Err(SimError::InvalidRequest("pad factor must be >= 1".into()));
    }
    let (n, m, c, r) = grid.data.dim();
    let (len0, len1) = match options.axes {
        Axes::RangeDoppler => (n, m),
        Axes::RangeAzimuth => (n, c),
    };
    if len0 < 1 || len1 < 1 {
        return Err(SimError::InvalidRequest("transformed axes must be non-empty".into()));
    }
    let p0 = len0 * options.pad;
    let p1 = len1 * options.pad;

    let w0 = window_vec(options.window, len0);
    let w1 = window_vec(options.window, len1);
    let divisor = w0.iter().map(|w| w * w).sum::<f64>() * w1.iter().map(|w| w * w).sum::<f64>();

    let mut planner = FftPlanner::<f64>::new();
    // The signal delays subcarriers as exp(-j 2 pi n df tau), so the
    // inverse transform places increasing range at increasing bin index.
    let fft0 = planner.plan_fft_inverse(p0);
    let fft1 = planner.plan_fft_forward(p1);
    let mut scratch0 = vec![Complex64::default(); fft0.get_inplace_scratch_len()];
    let mut scratch1 = vec![Complex64::default(); fft1.get_inplace_scratch_len()];

    let mut accum = Array2::<f64>::zeros((p0, p1));
    let mut small = vec![Complex64::default(); len0 * len1];
    let mut padded = vec![Complex64::default(); p0 * p1];
    let mut column = vec![Complex64::default(); p0];

    let slices: Vec<(usize, usize)> = match options.axes {
        Axes::RangeDoppler => {
            (0..c).flat_map(|a| (0..r).map(move |b| (a, b))).collect()
        }
        Axes::RangeAzimuth => {
            (0..m).flat_map(|a| (0..r).map(move |b| (a, b))).collect()
        }
    };

    for &(a, b) in &slices {
        for i in 0..len0 {
            for j in 0..len1 {
                let z = match options.axes {
                    Axes::RangeDoppler => grid.data[[i, j, a, b]],
                    Axes::RangeAzimuth => grid.data[[i, a, j, b]],
                };
                small[i * len1 + j] = z * (w0[i] * w1[j]);
            }
        }
        if let Some(bits) = options.fft_bits {
            // Quantize before padding: mid-rise has no zero level, so
            // quantizing afterwards would turn the pad into noise.
            quantize_components(&mut small, bits)?;
        }
        padded.fill(Complex64::default());
        for i in 0..len0 {
            padded[i * p1..i * p1 + len1].copy_from_slice(&small[i * len1..(i + 1) * len1]);
        }
        fft1.process_with_scratch(&mut padded[..len0 * p1], &mut scratch1);
        for j in 0..p1 {
            for i in 0..p0 {
                column[i] = padded[i * p1 + j];
            }
            fft0.process_with_scratch(&mut column, &mut scratch0);
            for i in 0..p0 {
                padded[i * p1 + j] = column[i];
            }
        }
        if let Some(bits) = options.fft_bits {
            quantize_components(&mut padded, bits)?;
        }
        for i in 0..p0 {
            for j in 0..p1 {
                accum[[i, j]] += padded[i * p1 + j].norm_sqr() / divisor;
            }
        }
    }

    let k = slices.len() as f64;
    accum.mapv_inplace(|v| v / k);

    let center = p1 / 2;
    let mut power = Array2::<f64>::zeros((p0, p1));
    for j in 0..p1 {
        let src = (j + p1 - center) % p1;
        for i in 0..p0 {
            power[[i, j]] = accum[[i, src]];
        }
    }

    let meta = &grid.meta;
    let range_bin_m = SPEED_OF_LIGHT / (2.0 * meta.subcarrier_spacing_hz * p0 as f64);
    let second_bin = match options.axes {
        Axes::RangeDoppler => {
            SPEED_OF_LIGHT
                / (2.0 * meta.carrier_frequency_hz * meta.doppler_sampling_period_s * p1 as f64)
        }
        Axes::RangeAzimuth => 1.0 / p1 as f64,
    };

    Ok(PeriodogramGrid {
        power,
        axes: options.axes,
        pad: options.pad,
        window: options.window,
        range_bin_m,
        second_bin,
        second_center: center,
        col_spacing_wavelengths: meta.col_spacing_wavelengths,
        transformed_len: (len0, len1),
    })
}
