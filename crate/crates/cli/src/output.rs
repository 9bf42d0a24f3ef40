//! CSV artifacts: the trajectory header contract and provenance lines.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use anyhow::{Context, Result};
use peds_core::integrate::Trajectory;
use peds_core::projector::Projector;

use crate::config::ScenarioConfig;

/// 12 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.11e}")
}

/// `# seed=.. n=.. alpha=.. dt=.. map=.. ordering=.. git=..`
pub fn provenance_line(cfg: &ScenarioConfig) -> String {
    format!(
        "# seed={} n={} alpha={} dt={} map={} ordering={} git={}",
        cfg.seed,
        cfg.n,
        cfg.alpha,
        cfg.dt,
        cfg.map.token(),
        cfg.ordering.token(),
        git_describe()
    )
}

fn git_describe() -> String {
    Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .unwrap_or_else(|| "unknown".into())
}

fn ensure_parent(path: &Path) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
    }
    Ok(())
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// The integrator-module contract:
/// `t, xtilde_1..xtilde_m, comp_norm_1..comp_norm_m[, full state]`.
pub fn write_trajectory(
    path: &Path,
    cfg: &ScenarioConfig,
    traj: &Trajectory,
    omega: &Projector,
    full_state: bool,
) -> Result<()> {
    let m = traj.projected[0].len();
    let norms = peds_core::integrate::complement_norms(traj, omega);
    let mut out = provenance_line(cfg);
    out.push('\n');
    let mut header: Vec<String> = vec!["t".into()];
    for i in 1..=m {
        header.push(format!("xtilde_{i}"));
    }
    for i in 1..=m {
        header.push(format!("comp_norm_{i}"));
    }
    if full_state {
        let n = traj.states[0].n();
        for i in 1..=m {
            for k in 1..=n {
                header.push(format!("x_{i}_{k}"));
            }
        }
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for (idx, t) in traj.times.iter().enumerate() {
        let mut row: Vec<String> = vec![num(*t)];
        row.extend(traj.projected[idx].iter().map(|v| num(*v)));
        row.extend(norms[idx].iter().map(|v| num(*v)));
        if full_state {
            for col in traj.states[idx].columns() {
                row.extend(col.iter().map(|v| num(*v)));
            }
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_text(path, &out)
}

/// A plain matrix of named columns against time (ensemble and reference
/// artifacts).
pub fn write_columns(
    path: &Path,
    cfg: &ScenarioConfig,
    times: &[f64],
    names: &[String],
    columns: &[Vec<f64>],
) -> Result<()> {
    assert_eq!(names.len(), columns.len());
    let mut out = provenance_line(cfg);
    out.push('\n');
    out.push_str("t,");
    out.push_str(&names.join(","));
    out.push('\n');
    for (idx, t) in times.iter().enumerate() {
        let mut row: Vec<String> = vec![num(*t)];
        for col in columns {
            row.push(num(col[idx]));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_text(path, &out)
}

pub fn stem_with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut name = stem
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "out".into());
    name.push_str(suffix);
    stem.with_file_name(name)
}
