//! Scene description and symbol-grid synthesis.

use isac_kpi::accuracy::angles_to_naf;
use isac_kpi::link_budget::snr;
use isac_kpi::resolution::unambiguous_limits;
use isac_kpi::units::SPEED_OF_LIGHT;
use isac_kpi::{Power, SystemConfig, Target};
use ndarray::Array4;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::grid::{GridMeta, SymbolGrid};

/// Simulated grid extent. Desk-scale reductions of the full frame: each
/// extent must not exceed what the config provides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDims {
    pub subcarriers: usize,
    pub symbols: usize,
    #[serde(default = "one")]
    pub cols: usize,
    #[serde(default = "one")]
    pub rows: usize,
}

fn one() -> usize {
    1
}

impl Default for GridDims {
    fn default() -> Self {
        GridDims { subcarriers: 256, symbols: 64, cols: 1, rows: 1 }
    }
}

/// A simulation scene: system, transmit power, targets, and grid shape.
/// The seed fully determines the synthesized grid.
#[derive(Debug, Clone)]
pub struct SimScene {
    pub config: SystemConfig,
    pub tx_power: Power,
    pub targets: Vec<Target>,
    /// Pins the first target's per-symbol SNR instead of deriving it from
    /// the link budget; other targets keep their radar-equation ratios
    /// relative to the first.
    pub per_symbol_snr: Option<f64>,
    pub seed: u64,
    pub dims: GridDims,
    pub noise: bool,
}

/// A synthesized grid with the scene warnings and the per-symbol SNR
/// actually given to each target.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub grid: SymbolGrid,
    pub warnings: Vec<String>,
    pub per_target_snr: Vec<f64>,
}

impl SimScene {
    pub fn new(config: SystemConfig, tx_power: Power) -> Self {
        SimScene {
            config,
            tx_power,
            targets: Vec::new(),
            per_symbol_snr: None,
            seed: 0,
            dims: GridDims::default(),
            noise: true,
        }
    }

    /// Checks the scene, returning warnings for conditions that distort
    /// but do not invalidate the simulation (aliasing targets).
    pub fn validate(&self) -> Result<Vec<String>> {
        self.config.validate()?;
        let dims = self.dims;
        for (name, v) in [
            ("subcarriers", dims.subcarriers),
            ("symbols", dims.symbols),
            ("cols", dims.cols),
            ("rows", dims.rows),
        ] {
            if v < 1 {
                return Err(SimError::InvalidScene(format!("dims.{name} must be >= 1")));
            }
        }
        let caps = [
            ("subcarriers", dims.subcarriers, self.config.subcarrier_count as usize),
            ("symbols", dims.symbols, self.config.symbols_per_frame()? as usize),
            ("cols", dims.cols, self.config.array.cols as usize),
            ("rows", dims.rows, self.config.array.rows as usize),
        ];
        for (name, v, cap) in caps {
            if v > cap {
                return Err(SimError::InvalidScene(format!(
                    "dims.{name} = {v} exceeds the {cap} the config provides"
                )));
            }
        }
        if let Some(snr) = self.per_symbol_snr {
            if !(snr.is_finite() && snr > 0.0) {
                return Err(SimError::InvalidScene(format!(
                    "per_symbol_snr must be finite and > 0, got {snr}"
                )));
            }
        }
        let unamb = unambiguous_limits(&self.config)?;
        let mut warnings = Vec::new();
        for (i, t) in self.targets.iter().enumerate() {
            t.validate()?;
            angles_to_naf(&self.config, t.azimuth_deg, t.elevation_deg)?;
            if t.range_m >= unamb.range_m {
                warnings.push(format!(
                    "target {i} at {:.1} m is at or beyond the unambiguous range {:.1} m and will alias",
                    t.range_m, unamb.range_m
                ));
            }
            if t.speed_mps.abs() >= unamb.speed_mps {
                warnings.push(format!(
                    "target {i} at {:.1} m/s is at or beyond the unambiguous speed {:.1} m/s and will alias",
                    t.speed_mps, unamb.speed_mps
                ));
            }
        }
        Ok(warnings)
    }

    /// Per-symbol SNR of each target, after applying the override pin.
    pub fn per_target_snrs(&self) -> Result<Vec<f64>> {
        let physical: Vec<f64> = self
            .targets
            .iter()
            .map(|t| snr(&self.config, t, self.tx_power).map(|b| b.per_symbol_snr))
            .collect::<std::result::Result<_, _>>()?;
        match (self.per_symbol_snr, physical.first()) {
            (Some(pinned), Some(&first)) => {
                Ok(physical.iter().map(|&g| pinned * g / first).collect())
            }
            _ => Ok(physical),
        }
    }
}

/// Synthesizes the symbol-domain grid: per target an amplitude
/// sqrt(gamma_S) e^{j chi} with phase progression
/// 2 pi (-n df tau + m T_D f_D + c ell + r eta), plus unit-variance
/// complex Gaussian noise when enabled.
pub fn synthesize_grid(scene: &SimScene) -> Result<Synthesis> {
    let warnings = scene.validate()?;
    let snrs = scene.per_target_snrs()?;
    let cfg = &scene.config;
    let meta = GridMeta {
        subcarrier_spacing_hz: cfg.subcarrier_spacing_hz,
        doppler_sampling_period_s: cfg.doppler_sampling_period_s(),
        carrier_frequency_hz: cfg.carrier_frequency_hz,
        row_spacing_wavelengths: cfg.array.row_spacing_wavelengths,
        col_spacing_wavelengths: cfg.array.col_spacing_wavelengths,
    };
    let dims = scene.dims;
    let shape = (dims.subcarriers, dims.symbols, dims.cols, dims.rows);
    let mut data = Array4::<Complex64>::zeros(shape);
    let mut rng = ChaCha8Rng::seed_from_u64(scene.seed);
    let phases: Vec<f64> = scene
        .targets
        .iter()
        .map(|_| rng.random::<f64>() * std::f64::consts::TAU)
        .collect();

    for ((target, &gamma_s), &chi) in scene.targets.iter().zip(&snrs).zip(&phases) {
        let naf = angles_to_naf(cfg, target.azimuth_deg, target.elevation_deg)?;
        let tau = 2.0 * target.range_m / SPEED_OF_LIGHT;
        let doppler_hz = 2.0 * target.speed_mps * meta.carrier_frequency_hz / SPEED_OF_LIGHT;
        let step_n = -std::f64::consts::TAU * meta.subcarrier_spacing_hz * tau;
        let step_m = std::f64::consts::TAU * meta.doppler_sampling_period_s * doppler_hz;
        let step_c = std::f64::consts::TAU * naf.horizontal;
        let step_r = std::f64::consts::TAU * naf.vertical;
        let amp = Complex64::from_polar(gamma_s.sqrt(), chi);

        let axis = |len: usize, step: f64| -> Vec<Complex64> {
            (0..len).map(|i| Complex64::from_polar(1.0, step * i as f64)).collect()
        };
        let pn = axis(dims.subcarriers, step_n);
        let pm = axis(dims.symbols, step_m);
        let pc = axis(dims.cols, step_c);
        let pr = axis(dims.rows, step_r);

        for (n, &vn) in pn.iter().enumerate() {
            let a_n = amp * vn;
            for (m, &vm) in pm.iter().enumerate() {
                let a_nm = a_n * vm;
                for (c, &vc) in pc.iter().enumerate() {
                    let a_nmc = a_nm * vc;
                    for (r, &vr) in pr.iter().enumerate() {
                        data[[n, m, c, r]] += a_nmc * vr;
                    }
                }
            }
        }
    }

    if scene.noise {
        let slice = data.as_slice_mut().expect("freshly allocated grid is standard layout");
        let scale = 0.5f64.sqrt();
        for z in slice {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            *z += Complex64::new(re * scale, im * scale);
        }
    }

    Ok(Synthesis { grid: SymbolGrid { data, meta }, warnings, per_target_snr: snrs })
}
