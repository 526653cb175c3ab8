//! `report.json`, `dispatch.csv` and `schedule.csv` writers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::NaiveDateTime;
use ebess_core::{ChargeSchedule, DispatchSeries, SchedulingProblem};
use thiserror::Error;

use crate::report::Plan;

pub const DISPATCH_HEADER: [&str; 6] = ["timestamp", "load_kw", "battery_support_kw", "grid_kw", "bess_recharge_kw", "soc_kwh"];
pub const SCHEDULE_HEADER: [&str; 5] = ["interval", "decision", "battery_kwh", "distance_mi", "rate_usd_per_kwh"];

#[derive(Debug, Error)]
pub enum OutputError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("cannot encode report: {0}")]
    Json(#[from] serde_json::Error),
}

fn timestamp(t: NaiveDateTime) -> String {
    t.format("%Y-%m-%dT%H:%M:%S").to_string()
}

/// `soc_kwh` is the state of charge at the end of each interval.
pub fn write_dispatch_csv<W: Write>(out: W, series: &DispatchSeries) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DISPATCH_HEADER)?;
    for i in 0..series.len() {
        w.write_record([
            timestamp(series.timestamps[i]),
            series.load_kw[i].to_string(),
            series.battery_support_kw[i].to_string(),
            series.grid_kw[i].to_string(),
            series.bess_recharge_kw[i].to_string(),
            series.bess_soc_kwh[i + 1].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per interval with the state after it.
pub fn write_schedule_csv<W: Write>(out: W, schedule: &ChargeSchedule, problem: &SchedulingProblem) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCHEDULE_HEADER)?;
    for (t, &charge) in schedule.decisions.iter().enumerate() {
        w.write_record([
            t.to_string(),
            if charge { "charge" } else { "drive" }.to_string(),
            schedule.battery_kwh[t + 1].to_string(),
            schedule.distance_mi[t + 1].to_string(),
            problem.cost_per_interval[t].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<fs::File, OutputError> {
    fs::File::create(path).map_err(|source| OutputError::Io { path: path.to_path_buf(), source })
}

pub fn write_report_json(dir: &Path, plan: &Plan) -> Result<PathBuf, OutputError> {
    let path = dir.join("report.json");
    let mut text = serde_json::to_string_pretty(&plan.report)?;
    text.push('\n');
    fs::write(&path, text).map_err(|source| OutputError::Io { path: path.clone(), source })?;
    Ok(path)
}

pub fn write_dispatch_file(dir: &Path, plan: &Plan) -> Result<PathBuf, OutputError> {
    let path = dir.join("dispatch.csv");
    write_dispatch_csv(create(&path)?, &plan.dispatch).map_err(|source| OutputError::Csv { path: path.clone(), source })?;
    Ok(path)
}

/// Writes nothing when the schedule is infeasible.
pub fn write_schedule_file(dir: &Path, plan: &Plan) -> Result<Option<PathBuf>, OutputError> {
    let Some(schedule) = plan.report.schedule.feasible() else { return Ok(None) };
    let path = dir.join("schedule.csv");
    write_schedule_csv(create(&path)?, schedule, &plan.problem).map_err(|source| OutputError::Csv { path: path.clone(), source })?;
    Ok(Some(path))
}

pub fn ensure_dir(dir: &Path) -> Result<(), OutputError> {
    fs::create_dir_all(dir).map_err(|source| OutputError::Io { path: dir.to_path_buf(), source })
}

/// All three files; returns the paths written.
pub fn write_outputs(dir: &Path, plan: &Plan) -> Result<Vec<PathBuf>, OutputError> {
    ensure_dir(dir)?;
    let mut written = vec![write_report_json(dir, plan)?, write_dispatch_file(dir, plan)?];
    written.extend(write_schedule_file(dir, plan)?);
    Ok(written)
}
