//! The `isac` command line tool.
//!
//! Exit codes: 0 success, 1 infeasible verdict, 2 input error, 3
//! internal error.

use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use isac_cli::report::{kpi_table, ReportFormat};
use isac_cli::scenario::{evaluate, load_scenario, ScenarioError, DEFAULT_DETECTION_SNR_DB};
use isac_kpi::link_budget::{estimate_rcs, noise_power};
use isac_kpi::system::SystemConfigJson;
use isac_kpi::units::db_to_linear;
use isac_kpi::{Band, ModelError, SystemConfig};
use isac_sim::export::{write_detections_json, write_periodogram_csv};
use isac_sim::{
    compute_periodogram, detect_targets, synthesize_grid, Axes, PeriodogramOptions, SimError,
    Window,
};

#[derive(Parser)]
#[command(
    name = "isac",
    version,
    about = "Sensing KPIs, feasibility verdicts and radar simulation for ISAC cellular systems"
)]
struct Cli {
    /// Directory output files are written into (prepended to relative
    /// output paths)
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the sensing KPI table for one or more system configurations
    Kpi {
        /// Band name (fr1, fr2, fr3) or a system config JSON file;
        /// repeat for several columns. All three bands when omitted.
        #[arg(long = "band", value_name = "BAND")]
        bands: Vec<String>,
        /// Output format
        #[arg(long, value_enum, default_value_t = FormatArg::Md)]
        format: FormatArg,
    },
    /// Evaluate a scenario's achievable-range limits
    MaxRange {
        /// Scenario JSON file or shipped sample name
        #[arg(long, value_name = "FILE")]
        scenario: String,
    },
    /// Evaluate a scenario against its required range
    Feasibility {
        /// Scenario JSON file or shipped sample name
        #[arg(long, value_name = "FILE")]
        scenario: String,
    },
    /// Synthesize the scenario's symbol grid, compute a periodogram and
    /// export the map together with its detections
    Simulate {
        /// Scenario JSON file or shipped sample name
        #[arg(long, value_name = "FILE")]
        scenario: String,
        /// Axis pair of the map
        #[arg(long, value_enum, default_value_t = AxesArg::RangeDoppler)]
        axes: AxesArg,
        /// Zero-padding factor of both transforms
        #[arg(long, default_value_t = 1)]
        pad: usize,
        /// Output prefix; writes <prefix>.csv and <prefix>.json
        #[arg(long, value_name = "PREFIX")]
        out: PathBuf,
        /// Overrides the scenario's simulation seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Estimate a target's radar cross section from an observed peak
    RcsEstimate {
        /// Band name or system config JSON file
        #[arg(long, value_name = "BAND")]
        band: String,
        /// Post-processing peak power over the noise floor, dB
        #[arg(long, value_name = "DB")]
        peak_db: f64,
        /// Target range, m
        #[arg(long, value_name = "METERS")]
        range: f64,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Md,
    Csv,
    Json,
}

impl From<FormatArg> for ReportFormat {
    fn from(f: FormatArg) -> ReportFormat {
        match f {
            FormatArg::Md => ReportFormat::Markdown,
            FormatArg::Csv => ReportFormat::Csv,
            FormatArg::Json => ReportFormat::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum AxesArg {
    RangeDoppler,
    RangeAzimuth,
}

impl From<AxesArg> for Axes {
    fn from(a: AxesArg) -> Axes {
        match a {
            AxesArg::RangeDoppler => Axes::RangeDoppler,
            AxesArg::RangeAzimuth => Axes::RangeAzimuth,
        }
    }
}

enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Internal(m) => m,
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            // Scene problems and unwritable output paths trace back to
            // user input; only the estimator statistics are internal.
            SimError::MissRate { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

fn main() {
    std::process::exit(run());
}

fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = !matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let _ = e.print();
            return if usage_error { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Kpi { bands, format } => cmd_kpi(&bands, format.into()),
        Command::MaxRange { scenario } => cmd_max_range(&scenario),
        Command::Feasibility { scenario } => cmd_feasibility(&scenario),
        Command::Simulate { scenario, axes, pad, out, seed } => {
            cmd_simulate(cli.out_dir.as_deref(), &scenario, axes.into(), pad, &out, seed)
        }
        Command::RcsEstimate { band, peak_db, range } => cmd_rcs(&band, peak_db, range),
    }
}

/// Resolves a `--band` value: builtin band name or config file path.
fn resolve_config(name: &str) -> Result<(String, SystemConfig), CliError> {
    if let Some(band) = Band::parse(name) {
        return Ok((band.label().to_string(), SystemConfig::builtin(band)));
    }
    let path = Path::new(name);
    if !path.exists() {
        return Err(CliError::Input(format!(
            "{name}: not a band name (fr1, fr2, fr3) and no such file"
        )));
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {name}: {e}")))?;
    let json: SystemConfigJson =
        serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{name}: {e}")))?;
    let cfg = SystemConfig::try_from(json)?;
    Ok((cfg.band.clone(), cfg))
}

fn cmd_kpi(bands: &[String], format: ReportFormat) -> Result<i32, CliError> {
    let configs: Vec<(String, SystemConfig)> = if bands.is_empty() {
        Band::ALL
            .iter()
            .map(|&b| (b.label().to_string(), SystemConfig::builtin(b)))
            .collect()
    } else {
        bands
            .iter()
            .map(|n| resolve_config(n))
            .collect::<Result<_, _>>()?
    };
    let table = kpi_table(&configs, DEFAULT_DETECTION_SNR_DB, format)?;
    print!("{table}");
    Ok(0)
}

fn cmd_max_range(scenario: &str) -> Result<i32, CliError> {
    let sc = load_scenario(scenario)?;
    let report = evaluate(&sc)?;
    let r = &report.range;
    println!(
        "system {} ({}, {:.1} dBm), target rcs {} m^2",
        report.system,
        sc.placement.label(),
        report.tx_power_dbm,
        sc.target.rcs_m2
    );
    println!("  noise-limited range:        {:>10.1} m", r.noise_m);
    match r.quantization_m {
        Some(q) => println!("  quantization-limited range: {:>10.1} m", q),
        None => println!("  quantization-limited range:           none (no dynamic-range load)"),
    }
    if let Some(v) = r.vertical_m {
        println!("  vertical-resolution range:  {:>10.1} m", v);
    }
    if let Some(h) = r.horizontal_m {
        println!("  horizontal-resolution range:{:>10.1} m", h);
    }
    println!("  unambiguous range:          {:>10.1} m", r.ambiguity_m);
    println!(
        "  achievable range:           {:>10.1} m  ({}-limited)",
        r.overall_m, report.binding
    );
    for w in &r.warnings {
        eprintln!("warning: {w}");
    }
    Ok(0)
}

fn cmd_feasibility(scenario: &str) -> Result<i32, CliError> {
    let sc = load_scenario(scenario)?;
    let report = evaluate(&sc)?;
    let v = &report.verdict;
    println!(
        "achievable range r* = {:.1} m ({}-limited)",
        v.achievable_range_m, report.binding
    );
    match v.required_range_m {
        Some(req) => println!("required range      = {req:.1} m"),
        None => println!("required range      = none"),
    }
    if v.feasible {
        println!("verdict: feasible");
        Ok(0)
    } else {
        println!(
            "verdict: infeasible ({})",
            v.reason.as_deref().unwrap_or("no reason recorded")
        );
        Ok(1)
    }
}

/// `<prefix>.ext`, appending rather than replacing any existing suffix.
fn append_ext(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn db(x: f64) -> f64 {
    10.0 * x.max(1e-30).log10()
}

/// Strong scenes spray sidelobe detections; stdout gets the strongest
/// few and the JSON export keeps the full list.
const PRINTED_DETECTIONS: usize = 10;

fn cmd_simulate(
    out_dir: Option<&Path>,
    scenario: &str,
    axes: Axes,
    pad: usize,
    out: &Path,
    seed: Option<u64>,
) -> Result<i32, CliError> {
    let sc = load_scenario(scenario)?;
    let scene = sc.sim_scene(seed)?;
    let synth = synthesize_grid(&scene)?;
    for w in &synth.warnings {
        eprintln!("warning: {w}");
    }
    let options = PeriodogramOptions {
        axes,
        pad,
        window: sc.sim.window.unwrap_or(Window::Rectangular),
        fft_bits: sc.sim.fft_bits.or(sc.config.fft_bits),
    };
    let pgm = compute_periodogram(&synth.grid, &options)?;
    let snr_floor = db_to_linear(sc.detection_snr_db)?;
    let detections = detect_targets(&pgm, snr_floor)?;

    let prefix = match out_dir {
        Some(dir) => dir.join(out),
        None => out.to_path_buf(),
    };
    if let Some(dir) = prefix.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Input(format!("cannot create {}: {e}", dir.display())))?;
        }
    }
    let csv_path = append_ext(&prefix, "csv");
    let json_path = append_ext(&prefix, "json");
    write_periodogram_csv(&csv_path, &pgm)?;
    write_detections_json(&json_path, &pgm, &detections)?;

    println!(
        "{} periodogram: {} x {} bins (pad {}, {} window), seed {}",
        axes.label(),
        pgm.power.nrows(),
        pgm.power.ncols(),
        pad,
        options.window.label(),
        scene.seed
    );
    println!(
        "noise floor {:.1} dB, detection threshold {:.1} dB",
        db(detections.noise_floor),
        db(detections.threshold)
    );
    println!("{} detection(s)", detections.items.len());
    for d in detections.items.iter().take(PRINTED_DETECTIONS) {
        let second = match axes {
            Axes::RangeDoppler => format!(
                "speed {:>8.2} m/s",
                d.speed_mps.unwrap_or(f64::NAN)
            ),
            Axes::RangeAzimuth => format!(
                "azimuth {:>7.2} deg",
                d.azimuth_deg.unwrap_or(f64::NAN)
            ),
        };
        println!(
            "  range {:>8.2} m, {}, peak {:>5.1} dB over the floor",
            d.range_m,
            second,
            db(d.peak_to_floor)
        );
    }
    if detections.items.len() > PRINTED_DETECTIONS {
        println!(
            "  ... and {} more (full list in the JSON export)",
            detections.items.len() - PRINTED_DETECTIONS
        );
    }
    println!("wrote {} and {}", csv_path.display(), json_path.display());
    Ok(0)
}

fn cmd_rcs(band: &str, peak_db: f64, range: f64) -> Result<i32, CliError> {
    let (label, cfg) = resolve_config(band)?;
    let gamma = db_to_linear(peak_db)?;
    let peak_w = gamma * noise_power(&cfg);
    // The estimate assumes the outdoor transmit power.
    let tx = cfg.outdoor_power;
    let rcs = estimate_rcs(&cfg, peak_w, range, tx)?;
    println!(
        "system {label} (outdoor, {:.1} dBm), peak {peak_db:.1} dB over the noise floor at {range:.1} m",
        tx.dbm()
    );
    println!("estimated rcs: {:.3e} m^2 ({:.1} dBsm)", rcs, 10.0 * rcs.log10());
    Ok(0)
}
