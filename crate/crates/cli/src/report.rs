//! Plot-data emission: combines empirical errors and bound curves from
//! one or more trajectories into a long-format CSV (`k,series,value`)
//! for external plotting. No rendering happens here.

use std::path::Path;

use anyhow::{bail, Context};

use online_adp::trajectory::Trajectory;

use crate::experiment::bound_series_name;

/// One series source: a label (empty for a lone trajectory), the error
/// values, and the bound column.
pub struct ReportSeries {
    pub label: String,
    pub bound_name: String,
    pub errors: Vec<f64>,
    pub bounds: Vec<Option<f64>>,
}

impl ReportSeries {
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        ReportSeries {
            label: traj.algorithm.as_str().to_string(),
            bound_name: bound_series_name(traj.algorithm).to_string(),
            errors: traj.errors(),
            bounds: traj.steps.iter().map(|s| s.bound).collect(),
        }
    }
}

/// Writes `plotdata.csv`. With a single trajectory the series are named
/// `err` and `bound_tN`; with several, each is prefixed by its
/// algorithm id (`avi:err`, `async-vi:bound_t6`, …).
pub fn emit_report(series: &[ReportSeries], out: &Path) -> anyhow::Result<()> {
    if series.is_empty() {
        bail!("usage error: no trajectories given");
    }
    let horizon = series[0].errors.len();
    for s in series.iter().skip(1) {
        if s.errors.len() != horizon {
            bail!(
                "usage error: trajectories must share a horizon ({} vs {horizon})",
                s.errors.len()
            );
        }
    }
    let lone = series.len() == 1;
    let mut text = String::from("k,series,value\n");
    for s in series {
        let err_name = if lone {
            "err".to_string()
        } else {
            format!("{}:err", s.label)
        };
        let bound_name = if lone {
            s.bound_name.clone()
        } else {
            format!("{}:{}", s.label, s.bound_name)
        };
        for (k, err) in s.errors.iter().enumerate() {
            text.push_str(&format!("{k},{err_name},{err:.16e}\n"));
        }
        for (k, bound) in s.bounds.iter().enumerate() {
            if let Some(b) = bound {
                text.push_str(&format!("{k},{bound_name},{b:.16e}\n"));
            }
        }
    }
    std::fs::write(out, text).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

/// Reads the `err`/`bound` columns of a written `trajectory.csv` back,
/// together with the algorithm id from the sibling `manifest.json` (file
/// stem as fallback). Lets `report` combine previous runs.
pub fn read_trajectory_csv(path: &Path) -> anyhow::Result<ReportSeries> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    let columns: Vec<&str> = header.split(',').collect();
    let find = |name: &str| columns.iter().position(|c| *c == name);
    let (Some(err_idx), Some(bound_idx)) = (find("err"), find("bound")) else {
        bail!("{} does not look like a trajectory CSV", path.display());
    };
    let mut errors = Vec::new();
    let mut bounds = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        errors.push(cells.get(err_idx).unwrap_or(&"0").parse::<f64>()?);
        let bound_cell = cells.get(bound_idx).copied().unwrap_or("");
        bounds.push(if bound_cell.is_empty() {
            None
        } else {
            Some(bound_cell.parse::<f64>()?)
        });
    }
    let (label, bound_name) = sibling_identity(path);
    Ok(ReportSeries {
        label,
        bound_name,
        errors,
        bounds,
    })
}

fn sibling_identity(path: &Path) -> (String, String) {
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".to_string());
    let manifest_path = path.parent().map(|d| d.join("manifest.json"));
    if let Some(mp) = manifest_path {
        if let Ok(text) = std::fs::read_to_string(&mp) {
            if let Ok(value) = serde_json::from_str::<serde_json::Value>(&text) {
                if let Some(algo) = value.get("algorithm").and_then(|v| v.as_str()) {
                    let bound_name = match algo {
                        "avi" => "bound_t1",
                        "pi" => "bound_t2",
                        "api" => "bound_t3",
                        "opi" => "bound_t4",
                        "aopi" => "bound_t5",
                        "async-vi" => "bound_t6",
                        "async-pi" => "bound_t7",
                        _ => "bound",
                    };
                    return (algo.to_string(), bound_name.to_string());
                }
            }
        }
    }
    (fallback, "bound".to_string())
}
