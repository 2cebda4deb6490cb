//! File output: periodogram maps as CSV, detection lists as JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::detect::Detections;
use crate::error::Result;
use crate::periodogram::{Axes, PeriodogramGrid, Window};

impl Axes {
    pub fn label(self) -> &'static str {
        match self {
            Axes::RangeDoppler => "range-doppler",
            Axes::RangeAzimuth => "range-azimuth",
        }
    }
}

impl Window {
    pub fn label(self) -> &'static str {
        match self {
            Window::Rectangular => "rectangular",
            Window::Hann => "hann",
        }
    }
}

/// Shape and scaling of an exported map, enough to reconstruct physical
/// coordinates from bin indices without the binary grid.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodogramMetadata {
    pub axes: String,
    pub window: String,
    pub pad: usize,
    pub range_bins: usize,
    pub second_bins: usize,
    pub range_bin_m: f64,
    pub second_axis: String,
    pub second_bin: f64,
    pub second_center: usize,
}

impl PeriodogramMetadata {
    pub fn from_grid(pgm: &PeriodogramGrid) -> Self {
        let (p0, p1) = pgm.power.dim();
        PeriodogramMetadata {
            axes: pgm.axes.label().to_string(),
            window: pgm.window.label().to_string(),
            pad: pgm.pad,
            range_bins: p0,
            second_bins: p1,
            range_bin_m: pgm.range_bin_m,
            second_axis: pgm.second_axis_label().to_string(),
            second_bin: pgm.second_bin,
            second_center: pgm.second_center,
        }
    }
}

fn db_floor(power: f64) -> f64 {
    (10.0 * power.max(1e-30).log10()).max(-300.0)
}

/// Writes the power map in dB: one metadata header line, then one CSV row
/// per range bin, columns in shifted second-axis order.
pub fn write_periodogram_csv(path: &Path, pgm: &PeriodogramGrid) -> Result<()> {
    let meta = PeriodogramMetadata::from_grid(pgm);
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(
        out,
        "axes={},window={},pad={},range_bins={},second_bins={},range_bin_m={},second_axis={},second_bin={},second_center={},values=db",
        meta.axes,
        meta.window,
        meta.pad,
        meta.range_bins,
        meta.second_bins,
        meta.range_bin_m,
        meta.second_axis,
        meta.second_bin,
        meta.second_center,
    )?;
    for row in pgm.power.rows() {
        let mut first = true;
        for &p in row {
            if !first {
                write!(out, ",")?;
            }
            write!(out, "{:.6}", db_floor(p))?;
            first = false;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct DetectionsFile<'a> {
    #[serde(flatten)]
    meta: &'a PeriodogramMetadata,
    #[serde(flatten)]
    detections: &'a Detections,
}

/// Writes the detection list with the map metadata flattened alongside.
pub fn write_detections_json(
    path: &Path,
    pgm: &PeriodogramGrid,
    detections: &Detections,
) -> Result<()> {
    let meta = PeriodogramMetadata::from_grid(pgm);
    let file = DetectionsFile { meta: &meta, detections };
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, &file)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::Other, e))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detect::detect_targets;
    use crate::periodogram::{compute_periodogram, PeriodogramOptions};
    use crate::scene::{synthesize_grid, GridDims, SimScene};
    use isac_kpi::units::db_to_linear;
    use isac_kpi::{Band, SystemConfig, Target};

    fn sample() -> (PeriodogramGrid, Detections) {
        let cfg = SystemConfig::builtin(Band::Fr2);
        let power = cfg.outdoor_power;
        let mut scene = SimScene::new(cfg, power);
        scene.dims = GridDims { subcarriers: 32, symbols: 8, cols: 1, rows: 1 };
        scene.per_symbol_snr = Some(db_to_linear(30.0).unwrap() / 256.0);
        scene.targets = vec![Target { speed_mps: 4.0, ..Target::at(1.0, 120.0) }];
        scene.seed = 77;
        let out = synthesize_grid(&scene).unwrap();
        let pgm = compute_periodogram(
            &out.grid,
            &PeriodogramOptions { pad: 2, ..Default::default() },
        )
        .unwrap();
        let dets = detect_targets(&pgm, db_to_linear(17.0).unwrap()).unwrap();
        (pgm, dets)
    }

    #[test]
    fn csv_has_header_and_one_row_per_range_bin() {
        let (pgm, _) = sample();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("map.csv");
        write_periodogram_csv(&path, &pgm).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 64 + 1);
        let header = lines[0];
        assert!(header.contains("axes=range-doppler"));
        assert!(header.contains("window=rectangular"));
        assert!(header.contains("pad=2"));
        assert!(header.contains("range_bins=64"));
        assert!(header.contains("second_bins=16"));
        assert!(header.contains("second_axis=speed_mps"));
        assert!(header.contains("second_center=8"));
        assert!(header.ends_with("values=db"));
        let first_row: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first_row.len(), 16);
        let parsed: f64 = first_row[0].parse().unwrap();
        let want = 10.0 * pgm.power[[0, 0]].max(1e-30).log10();
        assert!((parsed - want.max(-300.0)).abs() < 1e-4);
    }

    #[test]
    fn detections_json_round_trips() {
        let (pgm, dets) = sample();
        assert!(!dets.items.is_empty());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("detections.json");
        write_detections_json(&path, &pgm, &dets).unwrap();
        let value: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(value["axes"], "range-doppler");
        // serde_json's default reader is a couple of ulps off shortest
        // representations, so compare loosely.
        let bin = value["range_bin_m"].as_f64().unwrap();
        assert!((bin - pgm.range_bin_m).abs() < 1e-9 * pgm.range_bin_m);
        assert_eq!(
            value["detections"].as_array().unwrap().len(),
            dets.items.len()
        );
        assert!(value["noise_floor"].as_f64().unwrap() > 0.0);
        let first = &value["detections"][0];
        assert!(first["range_m"].as_f64().is_some());
        assert!(first["elevation_deg"].is_null());
    }

    #[test]
    fn exports_are_byte_deterministic()  {
        let (pgm, dets) = sample();
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        let b = dir.path().join("b.csv");
        write_periodogram_csv(&a, &pgm).unwrap();
        write_periodogram_csv(&b, &pgm).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        let ja = dir.path().join("a.json");
        let jb = dir.path().join("b.json");
        write_detections_json(&ja, &pgm, &dets).unwrap();
        write_detections_json(&jb, &pgm, &dets).unwrap();
        assert_eq!(std::fs::read(&ja).unwrap(), std::fs::read(&jb).unwrap());
    }
}
