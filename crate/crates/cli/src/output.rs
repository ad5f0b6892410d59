//! Output files. Every write goes to a temporary sibling and is renamed
//! into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use emaxwell::integrator::{DiagnosticsRequest, SampleRow};
use emaxwell::model::{PlasmaState, FIELD_NAMES};
use serde::Serialize;

use crate::config::{claim_to_string, space_name};
use emaxwell::analysis::DecayClaim;

pub const CSV_SCHEMA_VERSION: u32 = 1;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_name().context("output path has no file name")?.to_string_lossy();
    let tmp = dir.join(format!(".{name}.tmp{}", std::process::id()));
    let mut f = fs::File::create(&tmp).with_context(|| format!("cannot create {}", tmp.display()))?;
    f.write_all(bytes)?;
    f.sync_all()?;
    drop(f);
    fs::rename(&tmp, path).with_context(|| format!("cannot move {} into place", path.display()))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// Column names for the sample rows of a run.
pub fn csv_header(request: &DiagnosticsRequest, claims: &[DecayClaim]) -> Vec<String> {
    let mut h: Vec<String> = ["t", "step", "E_N", "D_N"].map(String::from).to_vec();
    h.extend((0..=request.energy_order).map(|l| format!("level_{l}")));
    h.extend(
        ["residual_E", "residual_B", "min_density", "min_temperature"].map(String::from),
    );
    for k in &request.window_levels {
        for name in ["E_window", "D_window", "cross_n", "cross_E", "cross_B", "E_tilde"] {
            h.push(format!("{name}_k{k}"));
        }
    }
    for (s, space) in &request.negative_norms {
        h.push(format!("{}_{s}", space_name(*space)));
    }
    for c in claims {
        h.push(format!("decay_{}", claim_to_string(c)));
    }
    h.push("max_mean".into());
    h
}

fn csv_row(row: &SampleRow) -> Vec<String> {
    let e = &row.energy;
    let mut r = vec![format!("{:?}", row.time()), row.step.to_string()];
    let mut push = |v: f64| r.push(format!("{v:e}"));
    push(e.energy);
    push(e.dissipation);
    e.level_norms.iter().for_each(|v| push(*v));
    push(e.residual_e);
    push(e.residual_b);
    push(e.min_density);
    push(e.min_temperature);
    for w in &row.windows {
        for v in [w.energy, w.dissipation, w.cross_n, w.cross_e, w.cross_b, w.instant_energy] {
            push(v);
        }
    }
    row.negative.iter().for_each(|n| push(n.value));
    row.decay.iter().for_each(|v| push(*v));
    push(row.max_mean);
    r
}

pub fn timeseries_csv(rows: &[SampleRow], request: &DiagnosticsRequest, claims: &[DecayClaim]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
    w.write_record(["schema_version", &CSV_SCHEMA_VERSION.to_string()])?;
    w.write_record(csv_header(request, claims))?;
    for row in rows {
        w.write_record(csv_row(row))?;
    }
    Ok(w.into_inner().map_err(|e| e.into_error())?)
}

#[derive(Serialize)]
struct Snapshot<'a> {
    time: f64,
    step: u64,
    points_per_axis: usize,
    box_length: f64,
    /// Row-major `(i, j, k)` values of each field on the grid.
    fields: Vec<(&'a str, Vec<f64>)>,
}

pub fn snapshot_path(dir: &Path, index: usize) -> PathBuf {
    dir.join(format!("snapshot_{index:03}.json"))
}

pub fn write_snapshot(path: &Path, state: &PlasmaState, step: u64) -> Result<()> {
    let grid = state.grid();
    let fields = FIELD_NAMES
        .iter()
        .zip(state.fields())
        .map(|(name, f)| (*name, f.to_real().into_values()))
        .collect();
    let snap = Snapshot {
        time: state.time,
        step,
        points_per_axis: grid.points_per_axis(),
        box_length: grid.box_length(),
        fields,
    };
    // compact: snapshots are large
    let text = serde_json::to_string(&snap)?;
    write_atomic(path, text.as_bytes())
}
