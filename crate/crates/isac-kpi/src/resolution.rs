//! Resolution limits per estimation axis, their projection to angle and
//! metric space, unambiguous range and speed, and the achievable-range
//! combiner that picks the most stringent constraint.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};
use crate::link_budget::max_range_noise;
use crate::quantization::{max_range_quant, Environment};
use crate::system::SystemConfig;
use crate::target::Target;
use crate::units::{Power, SPEED_OF_LIGHT};

/// Resolution per estimation axis: range, speed, and the two co-array NAF
/// axes. The angular axes come from the sum co-array of TX and RX, a
/// (2R-1) x (2C-1) array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Resolutions {
    pub range_m: f64,
    pub speed_mps: f64,
    pub vertical_naf: f64,
    pub horizontal_naf: f64,
}

/// Angle-domain resolution at a stated incidence, degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngularResolution {
    pub elevation_deg: f64,
    pub azimuth_deg: f64,
}

/// Metric-space separation needed between two objects at a stated range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpatialResolution {
    pub vertical_m: f64,
    pub horizontal_m: f64,
}

/// Aliasing-free limits of the range and speed axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnambiguousLimits {
    pub range_m: f64,
    pub speed_mps: f64,
}

/// Maximum ranges at which required spatial resolutions still hold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionLimitedRange {
    pub vertical_m: Option<f64>,
    pub horizontal_m: Option<f64>,
    pub warnings: Vec<String>,
}

/// Scenario resolution requirements; either axis may be absent. The
/// required operating range is carried along for feasibility verdicts and
/// does not enter the range combiner.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Requirements {
    #[serde(default)]
    pub vertical_resolution_m: Option<f64>,
    #[serde(default)]
    pub horizontal_resolution_m: Option<f64>,
    #[serde(default)]
    pub required_range_m: Option<f64>,
}

impl Requirements {
    pub fn validate(&self) -> Result<()> {
        for (field, v) in [
            ("requirements.vertical_resolution_m", self.vertical_resolution_m),
            ("requirements.horizontal_resolution_m", self.horizontal_resolution_m),
            ("requirements.required_range_m", self.required_range_m),
        ] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return Err(ModelError::InvalidConfig {
                        field,
                        reason: format!("must be finite and > 0, got {v}"),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn has_spatial(&self) -> bool {
        self.vertical_resolution_m.is_some() || self.horizontal_resolution_m.is_some()
    }
}

/// Which limit the achievable-range combiner settled on. Ties break in
/// this declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BindingConstraint {
    Noise,
    Quantization,
    Resolution,
    Ambiguity,
}

impl BindingConstraint {
    pub fn label(&self) -> &'static str {
        match self {
            BindingConstraint::Noise => "noise",
            BindingConstraint::Quantization => "quantization",
            BindingConstraint::Resolution => "resolution",
            BindingConstraint::Ambiguity => "ambiguity",
        }
    }
}

/// Every range limit in play plus the combined achievable range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeLimits {
    pub noise_m: f64,
    pub quantization_m: Option<f64>,
    pub vertical_m: Option<f64>,
    pub horizontal_m: Option<f64>,
    /// The resolution term entering the combiner: the better (larger) of
    /// the two axis limits, since separation in one domain suffices.
    pub resolution_m: Option<f64>,
    pub ambiguity_m: f64,
    pub overall_m: f64,
    pub binding: BindingConstraint,
    pub warnings: Vec<String>,
}

/// Full resolution picture at one incidence and range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResolutionReport {
    pub range_m: f64,
    pub speed_mps: f64,
    pub vertical_naf: f64,
    pub horizontal_naf: f64,
    pub elevation_deg: Option<f64>,
    pub azimuth_deg: Option<f64>,
    pub vertical_m: Option<f64>,
    pub horizontal_m: Option<f64>,
    pub unambiguous_range_m: f64,
    pub unambiguous_speed_mps: f64,
    pub warnings: Vec<String>,
}

/// Per-axis resolutions: rho_r = c/(2 N df), rho_s = c/(2 T_f f_c),
/// rho_z = 1/(2R-1), rho_x = 1/(2C-1).
pub fn resolutions(cfg: &SystemConfig) -> Result<Resolutions> {
    cfg.validate()?;
    Ok(Resolutions {
        range_m: SPEED_OF_LIGHT
            / (2.0 * cfg.subcarrier_count as f64 * cfg.subcarrier_spacing_hz),
        speed_mps: SPEED_OF_LIGHT
            / (2.0 * cfg.prs.frame_duration_s * cfg.carrier_frequency_hz),
        vertical_naf: 1.0 / (2.0 * cfg.array.rows as f64 - 1.0),
        horizontal_naf: 1.0 / (2.0 * cfg.array.cols as f64 - 1.0),
    })
}

/// NAF resolutions projected to angles at a stated incidence:
/// rho_phi = asin(lambda/dr * rho_z) - phi, rho_theta likewise with the
/// cos(phi)-scaled column axis. Degrees out.
pub fn angular_resolution(
    cfg: &SystemConfig,
    azimuth_deg: f64,
    elevation_deg: f64,
) -> Result<AngularResolution> {
    let res = resolutions(cfg)?;
    let phi = elevation_deg.to_radians();
    let theta = azimuth_deg.to_radians();
    let arg_el = res.vertical_naf / cfg.array.row_spacing_wavelengths;
    let arg_az = phi.cos() * res.horizontal_naf / cfg.array.col_spacing_wavelengths;
    if arg_el.abs() > 1.0 || arg_az.abs() > 1.0 {
        return Err(ModelError::Unresolvable {
            reason: format!(
                "angular resolution undefined: NAF cell exceeds the visible region \
                 (elevation argument {arg_el:.4}, azimuth argument {arg_az:.4})"
            ),
        });
    }
    let rho_phi = arg_el.asin() - phi;
    let rho_theta = arg_az.asin() - theta;
    if rho_phi < 0.0 || rho_theta < 0.0 {
        return Err(ModelError::Unresolvable {
            reason: format!(
                "unresolvable at this steering: one-sided angular offset is negative \
                 (elevation {:.4} deg, azimuth {:.4} deg)",
                rho_phi.to_degrees(),
                rho_theta.to_degrees()
            ),
        });
    }
    Ok(AngularResolution {
        elevation_deg: rho_phi.to_degrees(),
        azimuth_deg: rho_theta.to_degrees(),
    })
}

/// Required metric spacing at range r: rho_v = r sin(rho_phi),
/// rho_h = r sin(rho_theta).
pub fn spatial_resolution(
    cfg: &SystemConfig,
    azimuth_deg: f64,
    elevation_deg: f64,
    range_m: f64,
) -> Result<SpatialResolution> {
    if !(range_m.is_finite() && range_m >= 0.0) {
        return Err(ModelError::NonPositive { quantity: "range_m", value: range_m });
    }
    let ang = angular_resolution(cfg, azimuth_deg, elevation_deg)?;
    Ok(SpatialResolution {
        vertical_m: range_m * ang.elevation_deg.to_radians().sin(),
        horizontal_m: range_m * ang.azimuth_deg.to_radians().sin(),
    })
}

fn range_from_requirement(
    requirement_m: f64,
    sin_rho: f64,
    axis: &str,
    warnings: &mut Vec<String>,
) -> f64 {
    if sin_rho == 0.0 {
        warnings.push(format!(
            "{axis} resolution limit unbounded: angular resolution vanishes at this steering"
        ));
        f64::INFINITY
    } else {
        requirement_m / sin_rho
    }
}

/// Maximum ranges keeping required vertical/horizontal spacings
/// resolvable: r_v* = rho_v*/sin(rho_phi), r_h* = rho_h*/sin(rho_theta).
/// An absent requirement leaves the corresponding limit absent.
pub fn resolution_limited_range(
    cfg: &SystemConfig,
    azimuth_deg: f64,
    elevation_deg: f64,
    required_vertical_m: Option<f64>,
    required_horizontal_m: Option<f64>,
) -> Result<ResolutionLimitedRange> {
    for (field, v) in [
        ("required_vertical_m", required_vertical_m),
        ("required_horizontal_m", required_horizontal_m),
    ] {
        if let Some(v) = v {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::InvalidConfig {
                    field,
                    reason: format!("must be finite and > 0, got {v}"),
                });
            }
        }
    }
    let ang = angular_resolution(cfg, azimuth_deg, elevation_deg)?;
    let mut warnings = Vec::new();
    let vertical_m = required_vertical_m.map(|req| {
        range_from_requirement(
            req,
            ang.elevation_deg.to_radians().sin(),
            "vertical",
            &mut warnings,
        )
    });
    let horizontal_m = required_horizontal_m.map(|req| {
        range_from_requirement(
            req,
            ang.azimuth_deg.to_radians().sin(),
            "horizontal",
            &mut warnings,
        )
    });
    Ok(ResolutionLimitedRange { vertical_m, horizontal_m, warnings })
}

/// Aliasing limits: r_u* = c0/(2 df), s_u = c0/(2 f_c T_D) with the
/// effective Doppler sampling period T_D.
pub fn unambiguous_limits(cfg: &SystemConfig) -> Result<UnambiguousLimits> {
    cfg.validate()?;
    Ok(UnambiguousLimits {
        range_m: SPEED_OF_LIGHT / (2.0 * cfg.subcarrier_spacing_hz),
        speed_mps: SPEED_OF_LIGHT
            / (2.0 * cfg.carrier_frequency_hz * cfg.doppler_sampling_period_s()),
    })
}

fn combine(
    noise_m: f64,
    quantization_m: Option<f64>,
    resolution_m: Option<f64>,
    ambiguity_m: f64,
) -> (f64, BindingConstraint) {
    let mut best = (noise_m, BindingConstraint::Noise);
    let candidates = [
        (quantization_m, BindingConstraint::Quantization),
        (resolution_m, BindingConstraint::Resolution),
        (Some(ambiguity_m), BindingConstraint::Ambiguity),
    ];
    for (value, constraint) in candidates {
        if let Some(value) = value {
            if value < best.0 {
                best = (value, constraint);
            }
        }
    }
    best
}

/// The achievable sensing range: the most stringent of the noise,
/// quantization, resolution, and ambiguity limits. With
/// `use_resolution` the resolution term enters as max(r_v*, r_h*);
/// without it only noise, quantization, and ambiguity constrain (the
/// caller asserts that range/speed resolution separates targets).
pub fn achievable_range(
    cfg: &SystemConfig,
    tx_power: Power,
    target: &Target,
    environment: Option<&Environment>,
    requirements: &Requirements,
    snr_floor: f64,
    use_resolution: bool,
) -> Result<RangeLimits> {
    cfg.validate()?;
    target.validate()?;
    requirements.validate()?;
    let noise_m = max_range_noise(cfg, target.rcs_m2, tx_power, snr_floor)?;
    let quantization_m = match environment {
        Some(env) if !env.is_empty() => {
            Some(max_range_quant(cfg, target.rcs_m2, env, snr_floor)?)
        }
        _ => None,
    };
    let mut warnings = Vec::new();
    let (vertical_m, horizontal_m) = if use_resolution && requirements.has_spatial() {
        let limited = resolution_limited_range(
            cfg,
            target.azimuth_deg,
            target.elevation_deg,
            requirements.vertical_resolution_m,
            requirements.horizontal_resolution_m,
        )?;
        warnings.extend(limited.warnings);
        (limited.vertical_m, limited.horizontal_m)
    } else {
        (None, None)
    };
    let resolution_m = match (vertical_m, horizontal_m) {
        (Some(v), Some(h)) => Some(v.max(h)),
        (Some(v), None) => Some(v),
        (None, Some(h)) => Some(h),
        (None, None) => None,
    };
    let ambiguity_m = unambiguous_limits(cfg)?.range_m;
    let (overall_m, binding) = combine(noise_m, quantization_m, resolution_m, ambiguity_m);
    Ok(RangeLimits {
        noise_m,
        quantization_m,
        vertical_m,
        horizontal_m,
        resolution_m,
        ambiguity_m,
        overall_m,
        binding,
        warnings,
    })
}

/// Assembles the resolution picture at one incidence and range. Angular
/// axes that are unresolvable at the steering come back absent with a
/// warning instead of failing the whole report.
pub fn resolution_report(
    cfg: &SystemConfig,
    azimuth_deg: f64,
    elevation_deg: f64,
    range_m: f64,
) -> Result<ResolutionReport> {
    let res = resolutions(cfg)?;
    let unamb = unambiguous_limits(cfg)?;
    let mut warnings = Vec::new();
    let (angles, spatial) = match angular_resolution(cfg, azimuth_deg, elevation_deg) {
        Ok(ang) => {
            let spatial = spatial_resolution(cfg, azimuth_deg, elevation_deg, range_m)?;
            (Some(ang), Some(spatial))
        }
        Err(ModelError::Unresolvable { reason }) => {
            warnings.push(reason);
            (None, None)
        }
        Err(e) => return Err(e),
    };
    Ok(ResolutionReport {
        range_m: res.range_m,
        speed_mps: res.speed_mps,
        vertical_naf: res.vertical_naf,
        horizontal_naf: res.horizontal_naf,
        elevation_deg: angles.map(|a| a.elevation_deg),
        azimuth_deg: angles.map(|a| a.azimuth_deg),
        vertical_m: spatial.map(|s| s.vertical_m),
        horizontal_m: spatial.map(|s| s.horizontal_m),
        unambiguous_range_m: unamb.range_m,
        unambiguous_speed_mps: unamb.speed_mps,
        warnings,
    })
}
