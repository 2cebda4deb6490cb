//! KPI table generation: the per-band summary of accuracy, resolution
//! and ambiguity figures, rendered as Markdown, CSV or JSON.
//!
//! Every number is recomputed from the system configuration at render
//! time; nothing is read from stored tables.

use serde::Serialize;

use isac_kpi::accuracy::accuracy_report;
use isac_kpi::resolution::resolution_report;
use isac_kpi::units::db_to_linear;
use isac_kpi::{ModelError, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Markdown,
    Csv,
    Json,
}

const ANGLE_NOTE: &str = "raw CRLB value; cross-band ratios and the 1/sqrt(SNR) scaling \
                          are the reliable comparison (see the README note on angular \
                          accuracy normalization)";
const SLOPE_NOTE: &str = "spatial resolution per meter of range; multiply by the range";

/// One table row: a KPI across all requested configurations. A missing
/// value means the KPI is undefined there (e.g. angles at a degenerate
/// steering).
#[derive(Debug, Clone, Serialize)]
pub struct KpiRow {
    pub kpi: &'static str,
    pub unit: &'static str,
    pub note: Option<&'static str>,
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KpiTableData {
    pub snr_db: f64,
    pub columns: Vec<String>,
    pub rows: Vec<KpiRow>,
}

/// Computes the 12 KPI rows for the given configurations at one
/// detection SNR, boresight incidence.
pub fn kpi_rows(
    configs: &[(String, SystemConfig)],
    snr_db: f64,
) -> Result<KpiTableData, ModelError> {
    let gamma = db_to_linear(snr_db)?;
    let mut rows: Vec<KpiRow> = [
        ("sigma_r", "m", None),
        ("sigma_v", "m/s", None),
        ("sigma_phi", "deg", Some(ANGLE_NOTE)),
        ("sigma_theta", "deg", Some(ANGLE_NOTE)),
        ("rho_r", "m", None),
        ("rho_s", "m/s", None),
        ("rho_phi", "deg", None),
        ("rho_theta", "deg", None),
        ("rho_v_slope", "m/m", Some(SLOPE_NOTE)),
        ("rho_h_slope", "m/m", Some(SLOPE_NOTE)),
        ("r_unambiguous", "m", None),
        ("s_unambiguous", "m/s", None),
    ]
    .into_iter()
    .map(|(kpi, unit, note)| KpiRow {
        kpi,
        unit,
        note,
        values: Vec::with_capacity(configs.len()),
    })
    .collect();

    for (_, cfg) in configs {
        let acc = accuracy_report(cfg, gamma, 0.0, 0.0, None, gamma)?;
        // Range 1 m turns the spatial-resolution values into slopes.
        let res = resolution_report(cfg, 0.0, 0.0, 1.0)?;
        let values = [
            acc.range_m,
            acc.speed_mps,
            acc.elevation_deg,
            acc.azimuth_deg,
            Some(res.range_m),
            Some(res.speed_mps),
            res.elevation_deg,
            res.azimuth_deg,
            res.vertical_m,
            res.horizontal_m,
            Some(res.unambiguous_range_m),
            Some(res.unambiguous_speed_mps),
        ];
        for (row, v) in rows.iter_mut().zip(values) {
            row.values.push(v);
        }
    }
    Ok(KpiTableData {
        snr_db,
        columns: configs.iter().map(|(name, _)| name.clone()).collect(),
        rows,
    })
}

/// Renders the full KPI table in the requested format.
pub fn kpi_table(
    configs: &[(String, SystemConfig)],
    snr_db: f64,
    format: ReportFormat,
) -> Result<String, ModelError> {
    let data = kpi_rows(configs, snr_db)?;
    Ok(match format {
        ReportFormat::Markdown => render_markdown(&data),
        ReportFormat::Csv => render_csv(&data),
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(&data).expect("report serializes");
            s.push('\n');
            s
        }
    })
}

/// Four significant figures, plain decimal notation.
fn fmt_value(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let decimals = (3 - x.abs().log10().floor() as i32).clamp(0, 9) as usize;
    format!("{x:.decimals$}")
}

fn fmt_cell(v: Option<f64>) -> String {
    v.map(fmt_value).unwrap_or_else(|| "-".to_string())
}

fn note_markers(data: &KpiTableData) -> Vec<(&'static str, String)> {
    let mut notes: Vec<(&'static str, String)> = Vec::new();
    for note in data.rows.iter().filter_map(|r| r.note) {
        if !notes.iter().any(|(n, _)| *n == note) {
            let marker = format!("[{}]", (b'a' + notes.len() as u8) as char);
            notes.push((note, marker));
        }
    }
    notes
}

fn render_markdown(data: &KpiTableData) -> String {
    let notes = note_markers(data);
    let marker_for = |note: Option<&'static str>| {
        note.and_then(|n| notes.iter().find(|(t, _)| *t == n))
            .map(|(_, m)| m.as_str())
            .unwrap_or("")
    };
    let mut out = format!(
        "Sensing KPIs at detection SNR {:.1} dB, boresight incidence\n\n",
        data.snr_db
    );
    out.push_str("| KPI | Unit |");
    for c in &data.columns {
        out.push_str(&format!(" {c} |"));
    }
    out.push('\n');
    out.push_str("|---|---|");
    for _ in &data.columns {
        out.push_str("---|");
    }
    out.push('\n');
    for row in &data.rows {
        out.push_str(&format!("| {}{} | {} |", row.kpi, marker_for(row.note), row.unit));
        for v in &row.values {
            out.push_str(&format!(" {} |", fmt_cell(*v)));
        }
        out.push('\n');
    }
    if !notes.is_empty() {
        out.push('\n');
        for (text, marker) in &notes {
            out.push_str(&format!("{marker} {text}\n"));
        }
    }
    out
}

fn render_csv(data: &KpiTableData) -> String {
    let mut out = String::from("kpi,unit");
    for c in &data.columns {
        out.push(',');
        out.push_str(c);
    }
    out.push_str(",note\n");
    for row in &data.rows {
        out.push_str(row.kpi);
        out.push(',');
        out.push_str(row.unit);
        for v in &row.values {
            out.push(',');
            if let Some(x) = v {
                out.push_str(&x.to_string());
            }
        }
        out.push(',');
        if let Some(note) = row.note {
            out.push('"');
            out.push_str(note);
            out.push('"');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use isac_kpi::Band;

    fn all_bands() -> Vec<(String, SystemConfig)> {
        [Band::Fr1, Band::Fr2, Band::Fr3]
            .into_iter()
            .map(|b| (b.label().to_string(), SystemConfig::builtin(b)))
            .collect()
    }

    #[test]
    fn markdown_table_has_twelve_rows_and_all_bands() {
        let md = kpi_table(&all_bands(), 17.0, ReportFormat::Markdown).unwrap();
        let body: Vec<&str> = md
            .lines()
            .filter(|l| l.starts_with('|') && !l.starts_with("|---"))
            .collect();
        assert_eq!(body.len(), 13); // header + 12 KPI rows
        assert!(body[0].contains("fr1") && body[0].contains("fr3"));
        assert!(md.contains("sigma_r"));
        assert!(md.contains("s_unambiguous"));
        assert!(md.contains("[a]"), "angular rows carry a footnote marker");
    }

    #[test]
    fn csv_is_machine_readable() {
        let csv = kpi_table(&all_bands(), 17.0, ReportFormat::Csv).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 13);
        assert_eq!(lines[0], "kpi,unit,fr1,fr2,fr3,note");
        let sigma_r: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(sigma_r[0], "sigma_r");
        let v: f64 = sigma_r[2].parse().unwrap();
        assert_relative_eq!(v, 0.042, max_relative = 0.05);
    }

    #[test]
    fn json_round_trips_with_nulls_preserved() {
        let json = kpi_table(&all_bands(), 17.0, ReportFormat::Json).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["columns"].as_array().unwrap().len(), 3);
        assert_eq!(parsed["rows"].as_array().unwrap().len(), 12);
        assert_eq!(parsed["snr_db"].as_f64().unwrap(), 17.0);
    }

    #[test]
    fn values_are_recomputed_not_tabulated() {
        // At a different SNR the accuracy rows must move with 1/sqrt(gamma)
        // while resolutions stay put.
        let a = kpi_rows(&all_bands(), 17.0).unwrap();
        let b = kpi_rows(&all_bands(), 23.0).unwrap();
        let ratio = a.rows[0].values[0].unwrap() / b.rows[0].values[0].unwrap();
        assert_relative_eq!(ratio, 10f64.powf(0.6).sqrt(), max_relative = 1e-12);
        assert_eq!(a.rows[4].values[0], b.rows[4].values[0]);
    }

    #[test]
    fn sig4_formatting() {
        assert_eq!(fmt_value(0.041876), "0.04188");
        assert_eq!(fmt_value(4996.5409), "4997");
        assert_eq!(fmt_value(600.66), "600.7");
        assert_eq!(fmt_value(0.0), "0");
    }
}
