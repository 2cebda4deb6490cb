//! Scenario files and their evaluation into a KPI report.
//!
//! A scenario bundles a system configuration with a deployment placement,
//! the target of interest, the reflecting environment, and optional
//! sensing requirements. [`load_scenario`] turns a JSON file (or the name
//! of a shipped sample) into a validated [`Scenario`]; [`evaluate`] is a
//! pure function from a scenario to the full KPI picture.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use isac_kpi::accuracy::{accuracy_report, AccuracyReport, ClockStats};
use isac_kpi::quantization::{ClutterObject, Environment, SelfInterference};
use isac_kpi::resolution::{
    achievable_range, resolution_report, RangeLimits, Requirements, ResolutionReport,
};
use isac_kpi::system::SystemConfigJson;
use isac_kpi::units::db_to_linear;
use isac_kpi::{Band, ModelError, Power, SystemConfig, Target};
use isac_sim::{GridDims, SimScene, Window};

/// Detection threshold the KPI tables are quoted at.
pub const DEFAULT_DETECTION_SNR_DB: f64 = 17.0;

/// Shipped sample scenarios, resolvable by name from any directory.
pub const BUILTIN_SCENARIOS: &[(&str, &str)] = &[
    (
        "fr2-indoor-factory",
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../scenarios/fr2-indoor-factory.json"
        )),
    ),
    (
        "traffic-count",
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../scenarios/traffic-count.json"
        )),
    ),
    (
        "ghost-driver",
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../scenarios/ghost-driver.json"
        )),
    ),
    (
        "drone-detection",
        include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../scenarios/drone-detection.json"
        )),
    ),
];

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// serde_json's message already carries the line and column.
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

type Result<T> = std::result::Result<T, ScenarioError>;

/// Whether the transmitter operates under the indoor EMF-constrained
/// power limit or the outdoor regulatory one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Placement {
    Indoor,
    Outdoor,
}

impl Placement {
    pub fn label(self) -> &'static str {
        match self {
            Placement::Indoor => "indoor",
            Placement::Outdoor => "outdoor",
        }
    }
}

/// Simulation overrides carried by a scenario. Everything is optional;
/// the simulator's desk-scale defaults apply otherwise.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimSection {
    pub dims: Option<GridDims>,
    pub seed: Option<u64>,
    pub noise: Option<bool>,
    pub window: Option<Window>,
    /// Pins the first target's per-symbol SNR instead of deriving it from
    /// the link budget; other targets keep their physical power ratios.
    pub per_symbol_snr_db: Option<f64>,
    /// Overrides the system config's transform word length.
    pub fft_bits: Option<u32>,
}

/// `system` accepts a band name ("fr1"), a path to a config JSON file
/// (resolved against the scenario file's directory), or an inline config
/// object.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum SystemSource {
    Name(String),
    Inline(Box<SystemConfigJson>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    system: SystemSource,
    placement: Placement,
    target: Target,
    #[serde(default)]
    clutter: Vec<ClutterObject>,
    #[serde(default)]
    self_interference: Option<SelfInterference>,
    #[serde(default)]
    clock: Option<ClockStats>,
    #[serde(default)]
    requirements: Requirements,
    /// Defaults to true exactly when a spatial resolution requirement is
    /// present, so the resolution term enters the range combiner only
    /// when there is a requirement to derive it from.
    #[serde(default)]
    use_resolution_limit: Option<bool>,
    #[serde(default)]
    detection_snr_db: Option<f64>,
    #[serde(default)]
    sim: SimSection,
}

/// A fully resolved scenario: system config loaded, defaults filled,
/// every invariant checked.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub system_label: String,
    pub config: SystemConfig,
    pub placement: Placement,
    pub target: Target,
    pub clutter: Vec<ClutterObject>,
    pub self_interference: Option<SelfInterference>,
    pub clock: Option<ClockStats>,
    pub requirements: Requirements,
    pub use_resolution_limit: bool,
    pub detection_snr_db: f64,
    pub sim: SimSection,
}

impl Scenario {
    /// Transmit power selected by the placement. Indoor scenarios run at
    /// the EMF-constrained effective power.
    pub fn tx_power(&self) -> Power {
        match self.placement {
            Placement::Indoor => self.config.indoor_power().effective,
            Placement::Outdoor => self.config.outdoor_power,
        }
    }

    /// The reflecting environment, if anything in it can capture the
    /// receiver's dynamic range.
    pub fn environment(&self) -> Option<Environment> {
        let env = Environment {
            clutter: self.clutter.clone(),
            self_interference: self.self_interference,
        };
        if env.is_empty() {
            None
        } else {
            Some(env)
        }
    }

    /// Builds the simulation scene: the target of interest plus clutter
    /// objects as static boresight reflectors, at the placement's power.
    pub fn sim_scene(&self, seed_override: Option<u64>) -> Result<SimScene> {
        let mut targets = vec![self.target];
        for c in &self.clutter {
            targets.push(Target {
                rcs_m2: c.rcs_m2,
                range_m: c.range_m,
                speed_mps: 0.0,
                azimuth_deg: 0.0,
                elevation_deg: 0.0,
            });
        }
        let per_symbol_snr = match self.sim.per_symbol_snr_db {
            Some(db) => Some(db_to_linear(db)?),
            None => None,
        };
        Ok(SimScene {
            config: self.config.clone(),
            tx_power: self.tx_power(),
            targets,
            per_symbol_snr,
            seed: seed_override.or(self.sim.seed).unwrap_or(0),
            dims: self.sim.dims.unwrap_or_default(),
            noise: self.sim.noise.unwrap_or(true),
        })
    }
}

/// Everything `evaluate` knows about a scenario, serialized in report
/// order: link budget context, accuracy, resolution, range limits, and
/// the feasibility verdict.
#[derive(Debug, Clone, Serialize)]
pub struct KpiReport {
    pub system: String,
    pub placement: Placement,
    pub tx_power_dbm: f64,
    pub detection_snr_db: f64,
    pub accuracy: AccuracyReport,
    pub resolution: ResolutionReport,
    pub range: RangeLimits,
    pub binding: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub feasible: bool,
    pub achievable_range_m: f64,
    pub required_range_m: Option<f64>,
    pub reason: Option<String>,
}

impl Verdict {
    fn from_limits(limits: &RangeLimits, required_m: Option<f64>) -> Verdict {
        let (feasible, reason) = match required_m {
            None => (true, None),
            Some(req) if limits.overall_m >= req => (true, None),
            Some(req) => (
                false,
                Some(format!(
                    "achievable range {:.1} m falls short of the required {:.1} m \
                     ({}-limited)",
                    limits.overall_m,
                    req,
                    limits.binding.label()
                )),
            ),
        };
        Verdict {
            feasible,
            achievable_range_m: limits.overall_m,
            required_range_m: required_m,
            reason,
        }
    }
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn builtin_text(name: &str) -> Option<&'static str> {
    let stem = name.strip_suffix(".json").unwrap_or(name);
    BUILTIN_SCENARIOS
        .iter()
        .find(|(n, _)| *n == stem)
        .map(|(_, text)| *text)
}

/// Loads a scenario from a JSON file, or from the shipped samples when
/// `path` names one and no such file exists.
pub fn load_scenario(path: &str) -> Result<Scenario> {
    let p = Path::new(path);
    if p.exists() {
        let text = read_file(p)?;
        let base = p.parent().unwrap_or(Path::new(".")).to_path_buf();
        parse_scenario(&text, path, &base)
    } else if let Some(text) = builtin_text(path) {
        parse_scenario(text, path, &PathBuf::from("."))
    } else {
        Err(ScenarioError::Io {
            path: path.to_string(),
            source: std::io::Error::new(
                std::io::ErrorKind::NotFound,
                "no such file or shipped scenario",
            ),
        })
    }
}

/// Parses and validates scenario JSON. `base` anchors relative system
/// config paths; `label` names the source in error messages.
pub fn parse_scenario(text: &str, label: &str, base: &Path) -> Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|source| ScenarioError::Parse {
        path: label.to_string(),
        source,
    })?;
    let (system_label, config) = resolve_system(&file.system, base)?;
    config.validate()?;
    file.target
        .validate()
        .map_err(|e| ScenarioError::Invalid(format!("target: {e}")))?;
    for (i, c) in file.clutter.iter().enumerate() {
        c.validate()
            .map_err(|e| ScenarioError::Invalid(format!("clutter[{i}]: {e}")))?;
    }
    if let Some(si) = &file.self_interference {
        si.validate()
            .map_err(|e| ScenarioError::Invalid(format!("self_interference: {e}")))?;
    }
    if let Some(clock) = &file.clock {
        clock
            .validate()
            .map_err(|e| ScenarioError::Invalid(format!("clock: {e}")))?;
    }
    file.requirements
        .validate()
        .map_err(|e| ScenarioError::Invalid(format!("requirements: {e}")))?;
    let detection_snr_db = file.detection_snr_db.unwrap_or(DEFAULT_DETECTION_SNR_DB);
    if !detection_snr_db.is_finite() {
        return Err(ScenarioError::Invalid(format!(
            "detection_snr_db: must be finite, got {detection_snr_db}"
        )));
    }
    if let Some(db) = file.sim.per_symbol_snr_db {
        if !db.is_finite() {
            return Err(ScenarioError::Invalid(format!(
                "sim.per_symbol_snr_db: must be finite, got {db}"
            )));
        }
    }
    let use_resolution_limit = file
        .use_resolution_limit
        .unwrap_or_else(|| file.requirements.has_spatial());
    Ok(Scenario {
        system_label,
        config,
        placement: file.placement,
        target: file.target,
        clutter: file.clutter,
        self_interference: file.self_interference,
        clock: file.clock,
        requirements: file.requirements,
        use_resolution_limit,
        detection_snr_db,
        sim: file.sim,
    })
}

fn resolve_system(source: &SystemSource, base: &Path) -> Result<(String, SystemConfig)> {
    match source {
        SystemSource::Inline(json) => {
            let cfg = SystemConfig::try_from((**json).clone())?;
            Ok((cfg.band.clone(), cfg))
        }
        SystemSource::Name(name) => {
            if let Some(band) = Band::parse(name) {
                return Ok((band.label().to_string(), SystemConfig::builtin(band)));
            }
            let path = base.join(name);
            let text = read_file(&path)?;
            let json: SystemConfigJson =
                serde_json::from_str(&text).map_err(|source| ScenarioError::Parse {
                    path: path.display().to_string(),
                    source,
                })?;
            let cfg = SystemConfig::try_from(json)?;
            Ok((cfg.band.clone(), cfg))
        }
    }
}

/// Evaluates every KPI for the scenario at its detection SNR, per the
/// reporting convention: accuracies and resolutions quoted at the
/// threshold SNR and the target's incidence angles.
pub fn evaluate(scenario: &Scenario) -> Result<KpiReport> {
    let cfg = &scenario.config;
    let gamma = db_to_linear(scenario.detection_snr_db)?;
    let tx = scenario.tx_power();
    let env = scenario.environment();
    let accuracy = accuracy_report(
        cfg,
        gamma,
        scenario.target.azimuth_deg,
        scenario.target.elevation_deg,
        scenario.clock.as_ref(),
        gamma,
    )?;
    let resolution = resolution_report(
        cfg,
        scenario.target.azimuth_deg,
        scenario.target.elevation_deg,
        scenario.target.range_m,
    )?;
    let range = achievable_range(
        cfg,
        tx,
        &scenario.target,
        env.as_ref(),
        &scenario.requirements,
        gamma,
        scenario.use_resolution_limit,
    )?;
    let verdict = Verdict::from_limits(&range, scenario.requirements.required_range_m);
    let binding = range.binding.label().to_string();
    Ok(KpiReport {
        system: scenario.system_label.clone(),
        placement: scenario.placement,
        tx_power_dbm: tx.dbm(),
        detection_snr_db: scenario.detection_snr_db,
        accuracy,
        resolution,
        range,
        binding,
        verdict,
    })
}
