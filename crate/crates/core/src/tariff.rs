//! Seasonal time-of-use tariffs.
//!
//! A [`TouRateSchedule`] is a list of seasons; each season owns a set of months and
//! separate weekday / weekend band lists. Bands are whole-hour intervals
//! `[start_hour, end_hour)` that may wrap past midnight (21 -> 8). A schedule is
//! only constructible when every month belongs to exactly one season and every
//! hour of both day types is covered by exactly one band, so lookups are total.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use chrono::{Datelike, NaiveDateTime, TimeDelta, Timelike, Weekday};
use serde::{Deserialize, Serialize};

use crate::model::ModelError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandLabel {
    OffPeak,
    MidPeak,
    OnPeak,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DayType {
    Weekday,
    Weekend,
}

impl DayType {
    pub fn of(weekday: Weekday) -> Self {
        match weekday {
            Weekday::Sat | Weekday::Sun => DayType::Weekend,
            _ => DayType::Weekday,
        }
    }
}

/// Which side of a band boundary an instant exactly on the boundary belongs to.
///
/// `StartInclusive` is the `[start, end)` reading used for tariff lookups.
/// `EndInclusive` reads bands as `(start, end]`, so a session starting at 16:00
/// is billed in the band that ends at 16:00.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryConvention {
    #[default]
    StartInclusive,
    EndInclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateBand {
    pub start_hour: u8,
    pub end_hour: u8,
    pub rate_usd_per_kwh: f64,
    pub label: BandLabel,
}

impl RateBand {
    pub fn contains_hour(&self, hour: u8) -> bool {
        if self.start_hour < self.end_hour {
            self.start_hour <= hour && hour < self.end_hour
        } else {
            hour >= self.start_hour || hour < self.end_hour
        }
    }

    /// Length of the band in hours, accounting for wraparound.
    pub fn hours(&self) -> u8 {
        if self.start_hour < self.end_hour {
            self.end_hour - self.start_hour
        } else {
            24 - self.start_hour + self.end_hour
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Season {
    #[serde(default)]
    pub name: String,
    pub months: Vec<u8>,
    pub weekday: Vec<RateBand>,
    pub weekend: Vec<RateBand>,
}

impl Season {
    pub fn bands(&self, day: DayType) -> &[RateBand] {
        match day {
            DayType::Weekday => &self.weekday,
            DayType::Weekend => &self.weekend,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTouRateSchedule {
    seasons: Vec<Season>,
}

impl TryFrom<RawTouRateSchedule> for TouRateSchedule {
    type Error = ModelError;

    fn try_from(raw: RawTouRateSchedule) -> Result<Self, ModelError> {
        TouRateSchedule::new(raw.seasons)
    }
}

/// A validated seasonal TOU tariff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTouRateSchedule")]
pub struct TouRateSchedule {
    seasons: Vec<Season>,
}

impl TouRateSchedule {
    pub fn new(seasons: Vec<Season>) -> Result<Self, ModelError> {
        let mut owner: [Option<usize>; 12] = [None; 12];
        for (i, season) in seasons.iter().enumerate() {
            let field = |what: &str| format!("tariff.seasons[{i}].{what}");
            for &m in &season.months {
                if !(1..=12).contains(&m) {
                    return Err(ModelError::invalid(field("months"), format!("month {m} not in 1..=12")));
                }
                if let Some(prev) = owner[usize::from(m - 1)] {
                    return Err(ModelError::invalid(
                        field("months"),
                        format!("month {m} already belongs to season {prev}"),
                    ));
                }
                owner[usize::from(m - 1)] = Some(i);
            }
            validate_day(&season.weekday, &field("weekday"))?;
            validate_day(&season.weekend, &field("weekend"))?;
        }
        let uncovered: Vec<u8> = (1..=12u8).filter(|m| owner[usize::from(m - 1)].is_none()).collect();
        if !uncovered.is_empty() {
            return Err(ModelError::invalid(
                "tariff.seasons",
                format!("months {} uncovered", format_month_runs(&uncovered)),
            ));
        }
        Ok(Self { seasons })
    }

    pub fn seasons(&self) -> &[Season] {
        &self.seasons
    }

    pub fn season_for_month(&self, month: u32) -> &Season {
        self.seasons
            .iter()
            .find(|s| s.months.iter().any(|&m| u32::from(m) == month))
            .expect("validated schedule covers every month")
    }

    /// The unique band active at `time` under the `[start, end)` convention.
    pub fn band_at(&self, time: NaiveDateTime) -> &RateBand {
        let season = self.season_for_month(time.month());
        let hour = time.hour() as u8;
        season
            .bands(DayType::of(time.weekday()))
            .iter()
            .find(|b| b.contains_hour(hour))
            .expect("validated schedule covers every hour")
    }

    pub fn band_at_with(&self, time: NaiveDateTime, convention: BoundaryConvention) -> &RateBand {
        match convention {
            BoundaryConvention::StartInclusive => self.band_at(time),
            // Boundaries sit on whole hours, so (start, end] at t is [start, end) just before t.
            BoundaryConvention::EndInclusive => self.band_at(time - TimeDelta::nanoseconds(1)),
        }
    }

    pub fn rate_at(&self, time: NaiveDateTime) -> f64 {
        self.band_at(time).rate_usd_per_kwh
    }
}

fn validate_day(bands: &[RateBand], field: &str) -> Result<(), ModelError> {
    if bands.is_empty() {
        return Err(ModelError::invalid(field, "bands must cover 24 hours"));
    }
    let mut covered = [0u8; 24];
    for (j, band) in bands.iter().enumerate() {
        let bfield = format!("{field}[{j}]");
        if band.start_hour >= 24 || band.end_hour > 24 {
            return Err(ModelError::invalid(bfield, "hours must satisfy start < 24 and end <= 24"));
        }
        if band.start_hour == band.end_hour {
            return Err(ModelError::invalid(bfield, "band is empty (start == end)"));
        }
        if !(band.rate_usd_per_kwh.is_finite() && band.rate_usd_per_kwh >= 0.0) {
            return Err(ModelError::invalid(bfield, "rate must be finite and >= 0"));
        }
        for h in 0..24u8 {
            if band.contains_hour(h) {
                covered[usize::from(h)] += 1;
            }
        }
    }
    if let Some(h) = covered.iter().position(|&c| c > 1) {
        return Err(ModelError::invalid(field, format!("bands overlap at hour {h}")));
    }
    if covered.contains(&0) {
        return Err(ModelError::invalid(field, "bands must cover 24 hours"));
    }
    Ok(())
}

/// Formats a sorted list of months as cyclic runs, e.g. `[1,2,3,4,5,10,11,12]` -> `10..5`.
fn format_month_runs(months: &[u8]) -> String {
    let present = |m: u8| months.contains(&m);
    let next = |m: u8| if m == 12 { 1 } else { m + 1 };
    let prev = |m: u8| if m == 1 { 12 } else { m - 1 };
    if months.len() == 12 {
        return String::from("1..12");
    }
    let mut out = String::new();
    // Walk the year starting just after a gap so wrapping runs stay whole.
    let start = (1..=12u8).find(|&m| !present(m)).map(next).unwrap_or(1);
    let mut m = start;
    for _ in 0..12 {
        if present(m) && !present(prev(m)) {
            let mut end = m;
            while present(next(end)) {
                end = next(end);
            }
            if !out.is_empty() {
                out.push_str(", ");
            }
            if end == m {
                let _ = write!(out, "{m}");
            } else {
                let _ = write!(out, "{m}..{end}");
            }
        }
        m = next(m);
    }
    out
}
