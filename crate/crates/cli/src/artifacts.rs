//! Output files for every subcommand.
//!
//! All artifacts are deterministic: identical config and build produce
//! byte-identical bytes (no wall clock, no map iteration order, floats
//! printed in shortest round-trip form). Every file embeds the resolved
//! run configuration, as a `# config:` comment in CSV and as a `config`
//! field in JSON, so any single artifact reproduces its run.

use anyhow::{Context, Result};
use resifront_core::{RunConfig, Snapshot, Trajectory};
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};

/// Resolve the output directory: flag, then `RESIFRONT_OUT`, then a
/// `resifront-out` directory next to the caller.
pub fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os("RESIFRONT_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("resifront-out"))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Shortest round-trip form, switching to scientific notation outside
/// [1e-4, 1e16) so near-zero tails do not print as hundreds of digits.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn config_header(cfg: &RunConfig) -> Result<String> {
    Ok(format!("# config: {}\n", serde_json::to_string(cfg)?))
}

/// `series.csv`: the recorded time series, one row per snapshot.
pub fn write_series(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut s = config_header(&traj.config)?;
    s.push_str("t,g,h,gprime,hprime,max_u\n");
    for snap in &traj.snapshots {
        s.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_f64(snap.t),
            fmt_f64(snap.g),
            fmt_f64(snap.h),
            fmt_f64(snap.gprime),
            fmt_f64(snap.hprime),
            fmt_f64(snap.max_u)
        ));
    }
    write_text(path, &s)
}

/// `profile_NNNNNN.csv` for every snapshot that stored node values.
pub fn write_profiles(dir: &Path, traj: &Trajectory) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (i, snap) in traj.snapshots.iter().enumerate() {
        let Some(profile) = &snap.profile else {
            continue;
        };
        let path = dir.join(format!("profile_{i:06}.csv"));
        let mut s = config_header(&traj.config)?;
        s.push_str(&format!("# t: {}\n", snap.t));
        s.push_str("x,u\n");
        let n = snap.n as f64;
        for (j, u) in profile.iter().enumerate() {
            let x = snap.g + (j as f64 / n) * (snap.h - snap.g);
            s.push_str(&format!("{},{}\n", fmt_f64(x), fmt_f64(*u)));
        }
        write_text(&path, &s)?;
        written.push(path);
    }
    Ok(written)
}

/// Scalar digest of a run, written as `summary.json`.
#[derive(Serialize)]
pub struct Summary<'a> {
    pub config: &'a RunConfig,
    pub termination: &'a resifront_core::Termination,
    pub t_end: f64,
    pub final_width: f64,
    pub final_max_u: f64,
    pub final_snapshot: SnapshotScalars,
    pub monitors: &'a resifront_core::MonitorReport,
}

/// A snapshot without its (possibly large) profile payload.
#[derive(Serialize)]
pub struct SnapshotScalars {
    pub t: f64,
    pub g: f64,
    pub h: f64,
    pub gprime: f64,
    pub hprime: f64,
    pub max_u: f64,
    pub n: usize,
}

impl From<&Snapshot> for SnapshotScalars {
    fn from(s: &Snapshot) -> Self {
        SnapshotScalars {
            t: s.t,
            g: s.g,
            h: s.h,
            gprime: s.gprime,
            hprime: s.hprime,
            max_u: s.max_u,
            n: s.n,
        }
    }
}

impl<'a> Summary<'a> {
    pub fn of(traj: &'a Trajectory) -> Self {
        let last = traj.final_snapshot();
        Summary {
            config: &traj.config,
            termination: &traj.termination,
            t_end: last.t,
            final_width: last.h - last.g,
            final_max_u: last.max_u,
            final_snapshot: last.into(),
            monitors: &traj.monitors,
        }
    }
}

/// The standard artifact set of one simulation.
pub fn write_run(dir: &Path, traj: &Trajectory) -> Result<()> {
    ensure_dir(dir)?;
    write_json(&dir.join("summary.json"), &Summary::of(traj))?;
    write_series(&dir.join("series.csv"), traj)?;
    write_json(&dir.join("trajectory.json"), traj)?;
    write_profiles(dir, traj)?;
    Ok(())
}
