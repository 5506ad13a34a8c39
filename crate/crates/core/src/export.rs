//! CSV and JSON artifacts.
//!
//! * holographic pattern: `element_index,row,col,amplitude,pin_state`
//! * pattern cut: `angle_deg,magnitude_db_normalized`
//! * sweep: `target_theta_deg,target_phi_deg,lobe_theta_deg,lobe_phi_deg,directivity_dbi,hpbw_deg,sll_db`
//!
//! Floating point values are written in shortest round-trip form so a
//! re-read file reproduces the in-memory values exactly.

use serde::{Deserialize, Serialize};
use std::io::{Read, Write};

use crate::error::{domain, Result};
use crate::farfield::{BeamMetrics, SweepRow};
use crate::geometry::ElementGrid;
use crate::holography::{HolographicPattern, PinState, PinStateMap};
use crate::link::StreamResult;

/// Angles are converted from radians for output; rounding to 1e-9°
/// removes the conversion residue (`-59.99999999999999` becomes `-60`).
pub fn clean_deg(angle_deg: f64) -> f64 {
    (angle_deg * 1e9).round() / 1e9
}

#[derive(Debug, Serialize, Deserialize)]
struct PatternRecord {
    element_index: usize,
    row: usize,
    col: usize,
    amplitude: f64,
    pin_state: String,
}

pub fn write_pattern_csv<W: Write>(
    writer: W,
    grid: &ElementGrid,
    pattern: &HolographicPattern,
    pins: &PinStateMap,
) -> Result<()> {
    if pattern.len() != grid.len() || pins.len() != grid.len() {
        return Err(domain("pattern, pin map and grid lengths differ"));
    }
    let mut w = csv::Writer::from_writer(writer);
    for (n, (&amplitude, state)) in pattern.amplitudes().iter().zip(pins.states()).enumerate() {
        let (row, col) = grid.row_col(n);
        w.serialize(PatternRecord {
            element_index: n,
            row,
            col,
            amplitude,
            pin_state: state.as_str().to_string(),
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Read amplitudes and diode states back from a pattern CSV. Rows may come
/// in any order; indices must cover `0..n` exactly once.
pub fn read_pattern_csv<R: Read>(reader: R) -> Result<(HolographicPattern, Vec<PinState>)> {
    let mut rows: Vec<PatternRecord> = csv::Reader::from_reader(reader)
        .deserialize()
        .collect::<std::result::Result<_, _>>()?;
    rows.sort_by_key(|r| r.element_index);
    if rows.iter().enumerate().any(|(i, r)| r.element_index != i) {
        return Err(domain(
            "pattern CSV element indices are not a contiguous 0..n range",
        ));
    }
    let states = rows
        .iter()
        .map(|r| r.pin_state.parse())
        .collect::<Result<Vec<_>>>()?;
    let pattern = HolographicPattern::new(rows.into_iter().map(|r| r.amplitude).collect())?;
    Ok((pattern, states))
}

pub fn write_cut_csv<W: Write>(writer: W, cut: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["angle_deg", "magnitude_db_normalized"])?;
    for (angle, db) in cut {
        w.write_record([clean_deg(*angle).to_string(), db.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Several normalized cuts side by side, one column per target.
pub fn write_overlay_csv<W: Write>(
    writer: W,
    labels: &[String],
    cuts: &[Vec<(f64, f64)>],
) -> Result<()> {
    if labels.len() != cuts.len() || cuts.is_empty() {
        return Err(domain(
            "overlay needs one label per cut and at least one cut",
        ));
    }
    let n = cuts[0].len();
    if cuts.iter().any(|c| c.len() != n) {
        return Err(domain("overlay cuts must share their angle samples"));
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["angle_deg".to_string()];
    header.extend(labels.iter().cloned());
    w.write_record(&header)?;
    for i in 0..n {
        let mut rec = vec![clean_deg(cuts[0][i].0).to_string()];
        rec.extend(cuts.iter().map(|c| c[i].1.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON-friendly view of [`BeamMetrics`], angles in degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub main_lobe_theta_deg: f64,
    pub main_lobe_phi_deg: f64,
    pub peak_directivity_dbi: f64,
    pub hpbw_deg: f64,
    /// `None` when no sidelobe exists in the cut.
    pub peak_sidelobe_level_db: Option<f64>,
    pub sidelobe_theta_deg: Option<f64>,
}

impl From<&BeamMetrics> for MetricsRecord {
    fn from(m: &BeamMetrics) -> Self {
        Self {
            main_lobe_theta_deg: clean_deg(m.main_lobe.theta_deg()),
            main_lobe_phi_deg: clean_deg(m.main_lobe.phi_deg()),
            peak_directivity_dbi: m.peak_directivity_dbi,
            hpbw_deg: m.hpbw_deg,
            peak_sidelobe_level_db: m
                .peak_sidelobe_level_db
                .is_finite()
                .then_some(m.peak_sidelobe_level_db),
            sidelobe_theta_deg: m.sidelobe_direction.map(|d| clean_deg(d.theta_deg())),
        }
    }
}

#[derive(Debug, Serialize)]
struct SweepRecord {
    target_theta_deg: f64,
    target_phi_deg: f64,
    lobe_theta_deg: Option<f64>,
    lobe_phi_deg: Option<f64>,
    directivity_dbi: Option<f64>,
    hpbw_deg: Option<f64>,
    sll_db: Option<f64>,
}

/// One row per target; failed rows keep their target and leave the metric
/// columns empty.
pub fn write_sweep_csv<W: Write>(writer: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for row in rows {
        let m = row.metrics.as_ref().ok();
        w.serialize(SweepRecord {
            target_theta_deg: clean_deg(row.target.theta_deg()),
            target_phi_deg: clean_deg(row.target.phi_deg()),
            lobe_theta_deg: m.map(|m| clean_deg(m.main_lobe.theta_deg())),
            lobe_phi_deg: m.map(|m| clean_deg(m.main_lobe.phi_deg())),
            directivity_dbi: m.map(|m| m.peak_directivity_dbi),
            hpbw_deg: m.map(|m| m.hpbw_deg),
            sll_db: m.and_then(|m| {
                m.peak_sidelobe_level_db
                    .is_finite()
                    .then_some(m.peak_sidelobe_level_db)
            }),
        })?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamRecord {
    pub ber: f64,
    pub snr_db: f64,
    pub n_bits: usize,
    pub seed: u64,
}

impl From<&StreamResult> for StreamRecord {
    fn from(r: &StreamResult) -> Self {
        Self {
            ber: r.bit_error_rate,
            snr_db: r.snr_db_used,
            n_bits: r.sent_bits.len(),
            seed: r.seed,
        }
    }
}
