//! Domain types shared by every planning stage, and the scenario document root.
//!
//! All types deserialize straight from the scenario schema; [`Scenario::validate`]
//! enforces the invariants that serde cannot express.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use chrono::{NaiveDateTime, TimeDelta};
use serde::{Deserialize, Serialize};

use crate::economics::EnergyBucket;
use crate::tariff::{BoundaryConvention, TouRateSchedule};
use crate::units::{METRES_PER_MILE, PAPER_COMPAT_METRES_PER_MILE, STANDARD_GRAVITY};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("{field}: {rule}")]
    Invalid { field: String, rule: String },
    #[error("demand profile row {row}: {message}")]
    Demand { row: usize, message: String },
}

impl ModelError {
    pub fn invalid(field: impl Into<String>, rule: impl Into<String>) -> Self {
        ModelError::Invalid { field: field.into(), rule: rule.into() }
    }
}

fn ensure(ok: bool, field: &str, rule: &str) -> Result<(), ModelError> {
    if ok {
        Ok(())
    } else {
        Err(ModelError::invalid(field, rule))
    }
}

fn finite(values: &[(&str, f64)]) -> Result<(), ModelError> {
    for (field, v) in values {
        ensure(v.is_finite(), field, "must be finite")?;
    }
    Ok(())
}

fn default_gravity() -> f64 {
    STANDARD_GRAVITY
}

fn default_efficiencies() -> Vec<f64> {
    vec![0.97, 0.97, 0.97]
}

fn default_one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BusSpec {
    pub mass_kg: f64,
    pub height_m: f64,
    pub width_m: f64,
    pub drag_coefficient: f64,
    /// Explicit frontal area; `height_m * width_m` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frontal_area_m2: Option<f64>,
    pub aux_power_kw: f64,
    pub onboard_battery_kwh: f64,
    #[serde(default)]
    pub battery_type_label: String,
    /// Motor, transmission and battery efficiencies, multiplied together.
    #[serde(default = "default_efficiencies")]
    pub drivetrain_efficiencies: Vec<f64>,
}

impl BusSpec {
    pub fn frontal_area(&self) -> f64 {
        self.frontal_area_m2.unwrap_or(self.height_m * self.width_m)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        finite(&[
            ("bus.mass_kg", self.mass_kg),
            ("bus.height_m", self.height_m),
            ("bus.width_m", self.width_m),
            ("bus.drag_coefficient", self.drag_coefficient),
            ("bus.aux_power_kw", self.aux_power_kw),
            ("bus.onboard_battery_kwh", self.onboard_battery_kwh),
        ])?;
        ensure(self.mass_kg > 0.0, "bus.mass_kg", "must be > 0")?;
        ensure(self.frontal_area() > 0.0 && self.frontal_area().is_finite(), "bus.frontal_area_m2", "must be > 0")?;
        ensure(self.drag_coefficient > 0.0, "bus.drag_coefficient", "must be > 0")?;
        ensure(self.aux_power_kw >= 0.0, "bus.aux_power_kw", "must be >= 0")?;
        ensure(self.onboard_battery_kwh > 0.0, "bus.onboard_battery_kwh", "must be > 0")?;
        ensure(!self.drivetrain_efficiencies.is_empty(), "bus.drivetrain_efficiencies", "must not be empty")?;
        for e in &self.drivetrain_efficiencies {
            ensure(*e > 0.0 && *e <= 1.0, "bus.drivetrain_efficiencies", "each stage must be in (0, 1]")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RouteProfile {
    pub leg_distance_mi: f64,
    pub average_speed_mph: f64,
    pub elevation_start_m: f64,
    pub elevation_end_m: f64,
    pub air_density_kg_m3: f64,
    pub rolling_coefficient: f64,
    #[serde(default = "default_gravity")]
    pub gravity_m_s2: f64,
    /// Metres per mile override, e.g. 1600.0 to reproduce 1.6 km/mi arithmetic.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paper_compat_mile_factor: Option<f64>,
}

impl RouteProfile {
    pub fn metres_per_mile(&self) -> f64 {
        self.paper_compat_mile_factor.unwrap_or(METRES_PER_MILE)
    }

    pub fn leg_distance_m(&self) -> f64 {
        self.leg_distance_mi * self.metres_per_mile()
    }

    pub fn trip_duration_h(&self) -> f64 {
        self.leg_distance_mi / self.average_speed_mph
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        finite(&[
            ("route.leg_distance_mi", self.leg_distance_mi),
            ("route.average_speed_mph", self.average_speed_mph),
            ("route.elevation_start_m", self.elevation_start_m),
            ("route.elevation_end_m", self.elevation_end_m),
            ("route.air_density_kg_m3", self.air_density_kg_m3),
            ("route.rolling_coefficient", self.rolling_coefficient),
            ("route.gravity_m_s2", self.gravity_m_s2),
        ])?;
        ensure(self.leg_distance_mi > 0.0, "route.leg_distance_mi", "must be > 0")?;
        ensure(self.average_speed_mph > 0.0, "route.average_speed_mph", "must be > 0")?;
        ensure(self.air_density_kg_m3 > 0.0, "route.air_density_kg_m3", "must be > 0")?;
        ensure(self.rolling_coefficient >= 0.0, "route.rolling_coefficient", "must be >= 0")?;
        ensure(self.gravity_m_s2 > 0.0, "route.gravity_m_s2", "must be > 0")?;
        if let Some(f) = self.paper_compat_mile_factor {
            ensure(f.is_finite() && f > 0.0, "route.paper_compat_mile_factor", "must be > 0")?;
        }
        Ok(())
    }
}

/// One instance of the binary charge/drive scheduling problem.
///
/// Interval `t` either charges (`d_t = 1`, battery `+charge_energy_per_interval_kwh`)
/// or drives one leg (`d_t = 0`, battery `-trip_energy_kwh`, distance `+leg_distance_mi`).
/// The objective is `sum_t d_t * objective_energy_coeff_kwh * cost_per_interval[t]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulingProblem {
    pub horizon_intervals: usize,
    pub interval_minutes: f64,
    pub initial_battery_kwh: f64,
    pub battery_capacity_kwh: f64,
    pub charge_energy_per_interval_kwh: f64,
    pub trip_energy_kwh: f64,
    pub leg_distance_mi: f64,
    pub min_total_distance_mi: f64,
    pub cost_per_interval: Vec<f64>,
    pub objective_energy_coeff_kwh: f64,
}

impl SchedulingProblem {
    pub fn validate(&self) -> Result<(), ModelError> {
        finite(&[
            ("schedule.interval_minutes", self.interval_minutes),
            ("schedule.initial_battery_kwh", self.initial_battery_kwh),
            ("schedule.battery_capacity_kwh", self.battery_capacity_kwh),
            ("schedule.charge_energy_per_interval_kwh", self.charge_energy_per_interval_kwh),
            ("schedule.trip_energy_kwh", self.trip_energy_kwh),
            ("schedule.leg_distance_mi", self.leg_distance_mi),
            ("schedule.min_total_distance_mi", self.min_total_distance_mi),
            ("schedule.objective_energy_coeff_kwh", self.objective_energy_coeff_kwh),
        ])?;
        ensure(self.interval_minutes > 0.0, "schedule.interval_minutes", "must be > 0")?;
        ensure(self.trip_energy_kwh >= 0.0, "schedule.trip_energy_kwh", "must be >= 0")?;
        ensure(self.charge_energy_per_interval_kwh >= 0.0, "schedule.charge_energy_per_interval_kwh", "must be >= 0")?;
        ensure(self.battery_capacity_kwh >= 0.0, "schedule.battery_capacity_kwh", "must be >= 0")?;
        ensure(
            self.initial_battery_kwh >= 0.0 && self.initial_battery_kwh <= self.battery_capacity_kwh,
            "schedule.initial_battery_kwh",
            "must satisfy 0 <= initial <= capacity",
        )?;
        ensure(self.leg_distance_mi > 0.0, "schedule.leg_distance_mi", "must be > 0")?;
        ensure(self.min_total_distance_mi >= 0.0, "schedule.min_total_distance_mi", "must be >= 0")?;
        ensure(self.objective_energy_coeff_kwh >= 0.0, "schedule.objective_energy_coeff_kwh", "must be >= 0")?;
        ensure(
            self.cost_per_interval.len() == self.horizon_intervals,
            "schedule.cost_per_interval",
            "length must equal horizon_intervals",
        )?;
        ensure(self.cost_per_interval.iter().all(|c| c.is_finite()), "schedule.cost_per_interval", "must be finite")?;
        Ok(())
    }

    /// Tolerance for battery-bound and distance comparisons, scaled to the problem.
    pub fn energy_tolerance(&self) -> f64 {
        1e-9 * self.battery_capacity_kwh.max(self.charge_energy_per_interval_kwh).max(self.trip_energy_kwh).max(1.0)
    }

    pub fn distance_tolerance(&self) -> f64 {
        1e-9 * self.min_total_distance_mi.max(self.leg_distance_mi).max(1.0)
    }

    /// Smallest number of driving intervals whose distance meets the minimum.
    pub fn required_trips(&self) -> usize {
        let need = self.min_total_distance_mi - self.distance_tolerance();
        if need <= 0.0 {
            return 0;
        }
        let mut k = libm::floor(need / self.leg_distance_mi) as usize;
        while (k as f64) * self.leg_distance_mi < need {
            k += 1;
        }
        k
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChargingSession {
    pub start: NaiveDateTime,
    pub energy_kwh: f64,
    pub power_kw: f64,
    #[serde(default)]
    pub location_label: String,
}

impl ChargingSession {
    pub fn duration_h(&self) -> f64 {
        self.energy_kwh / self.power_kw
    }

    pub fn end(&self) -> NaiveDateTime {
        self.start + hours_to_delta(self.duration_h())
    }

    pub fn validate(&self, field: &str) -> Result<(), ModelError> {
        ensure(self.energy_kwh.is_finite() && self.energy_kwh >= 0.0, field, "energy_kwh must be >= 0")?;
        ensure(self.power_kw.is_finite() && self.power_kw > 0.0, field, "power_kw must be > 0")?;
        Ok(())
    }
}

pub(crate) fn hours_to_delta(hours: f64) -> TimeDelta {
    TimeDelta::milliseconds(libm::round(hours * 3.6e6) as i64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BessSpec {
    pub capacity_kwh: f64,
    pub max_power_kw: f64,
    pub warranted_throughput_mwh: f64,
    pub round_trip_efficiency: f64,
    pub install_cost_usd: f64,
    pub incentives_usd: f64,
}

impl BessSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        finite(&[
            ("bess.capacity_kwh", self.capacity_kwh),
            ("bess.max_power_kw", self.max_power_kw),
            ("bess.warranted_throughput_mwh", self.warranted_throughput_mwh),
            ("bess.round_trip_efficiency", self.round_trip_efficiency),
            ("bess.install_cost_usd", self.install_cost_usd),
            ("bess.incentives_usd", self.incentives_usd),
        ])?;
        ensure(self.capacity_kwh >= 0.0, "bess.capacity_kwh", "must be >= 0")?;
        ensure(self.max_power_kw >= 0.0, "bess.max_power_kw", "must be >= 0")?;
        ensure(self.warranted_throughput_mwh > 0.0, "bess.warranted_throughput_mwh", "must be > 0")?;
        ensure(
            self.round_trip_efficiency > 0.0 && self.round_trip_efficiency <= 1.0,
            "bess.round_trip_efficiency",
            "must be in (0, 1]",
        )?;
        ensure(self.install_cost_usd >= 0.0, "bess.install_cost_usd", "must be >= 0")?;
        ensure(self.incentives_usd >= 0.0, "bess.incentives_usd", "must be >= 0")?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DemandSample {
    pub timestamp: NaiveDateTime,
    pub power_kw: f64,
}

/// A uniformly sampled load series. Each sample's power holds until the next timestamp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandProfile {
    samples: Vec<DemandSample>,
    interval: TimeDelta,
}

impl DemandProfile {
    /// Row numbers in errors are 1-based data rows.
    pub fn new(samples: Vec<DemandSample>) -> Result<Self, ModelError> {
        if samples.len() < 2 {
            return Err(ModelError::Demand { row: samples.len(), message: "at least 2 samples required".into() });
        }
        let interval = samples[1].timestamp - samples[0].timestamp;
        let tolerance = TimeDelta::seconds(1);
        for (i, s) in samples.iter().enumerate() {
            let row = i + 1;
            if !(s.power_kw.is_finite() && s.power_kw >= 0.0) {
                return Err(ModelError::Demand { row, message: format!("power_kw must be >= 0, got {}", s.power_kw) });
            }
            if i == 0 {
                continue;
            }
            let step = s.timestamp - samples[i - 1].timestamp;
            if step <= TimeDelta::zero() {
                return Err(ModelError::Demand { row, message: "timestamps must be strictly increasing".into() });
            }
            if (step - interval).abs() > tolerance {
                return Err(ModelError::Demand {
                    row,
                    message: format!(
                        "non-uniform spacing: {} s, expected {} s",
                        step.num_seconds(),
                        interval.num_seconds()
                    ),
                });
            }
        }
        Ok(Self { samples, interval })
    }

    /// Energy-preserving rasterisation of charging sessions onto `bins` intervals
    /// starting at `start`. Each bin holds the average power it receives.
    pub fn from_sessions(
        sessions: &[ChargingSession],
        start: NaiveDateTime,
        resolution_minutes: u32,
        bins: usize,
    ) -> Result<Self, ModelError> {
        ensure(resolution_minutes > 0, "demand.resolution_minutes", "must be > 0")?;
        ensure(bins >= 2, "demand", "at least 2 samples required")?;
        let step = TimeDelta::minutes(i64::from(resolution_minutes));
        let step_h = f64::from(resolution_minutes) / 60.0;
        let mut samples: Vec<DemandSample> = (0..bins)
            .map(|i| DemandSample { timestamp: start + step * i as i32, power_kw: 0.0 })
            .collect();
        for s in sessions {
            let (a, b) = (s.start, s.end());
            for sample in samples.iter_mut() {
                let lo = sample.timestamp.max(a);
                let hi = (sample.timestamp + step).min(b);
                if hi > lo {
                    let overlap_h = (hi - lo).num_milliseconds() as f64 / 3.6e6;
                    sample.power_kw += s.power_kw * overlap_h / step_h;
                }
            }
        }
        Self::new(samples)
    }

    pub fn samples(&self) -> &[DemandSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn interval(&self) -> TimeDelta {
        self.interval
    }

    pub fn interval_hours(&self) -> f64 {
        self.interval.num_milliseconds() as f64 / 3.6e6
    }

    /// Covered span in hours (`len * interval`).
    pub fn duration_hours(&self) -> f64 {
        self.interval_hours() * self.samples.len() as f64
    }
}

// ---------------------------------------------------------------------------
// Scenario document
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    /// Wall-clock start of interval 0; also fixes the season and day type of the rates.
    pub start: NaiveDateTime,
    pub horizon_intervals: usize,
    pub interval_minutes: f64,
    pub initial_battery_kwh: f64,
    pub battery_capacity_kwh: f64,
    pub charge_power_kw: f64,
    /// Defaults to `charge_power_kw * interval` when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub charge_energy_per_interval_kwh: Option<f64>,
    /// Fixed trip energy; derived from the traction model when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trip_energy_kwh: Option<f64>,
    pub min_total_distance_mi: f64,
    /// Objective multiplier; defaults to the charge energy per interval.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective_energy_coeff_kwh: Option<f64>,
}

impl ScheduleConfig {
    pub fn interval_hours(&self) -> f64 {
        self.interval_minutes / 60.0
    }

    pub fn charge_energy_per_interval(&self) -> f64 {
        self.charge_energy_per_interval_kwh.unwrap_or(self.charge_power_kw * self.interval_hours())
    }

    pub fn interval_start(&self, t: usize) -> NaiveDateTime {
        self.start + hours_to_delta(self.interval_hours() * t as f64)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BessConfig {
    /// Fixed capacity; sized from on-peak charging energy when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacity_kwh: Option<f64>,
    /// Fixed power rating; sized from the largest simultaneous on-peak load when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_power_kw: Option<f64>,
    pub warranted_throughput_mwh: f64,
    #[serde(default = "default_one")]
    pub round_trip_efficiency: f64,
    pub install_cost_usd: f64,
    #[serde(default)]
    pub incentives_usd: f64,
    #[serde(default = "default_one")]
    pub safety_factor: f64,
    /// Capacity of one purchasable battery module, used to count modules.
    pub module_capacity_kwh: f64,
}

impl BessConfig {
    pub fn spec(&self, capacity_kwh: f64, max_power_kw: f64) -> BessSpec {
        BessSpec {
            capacity_kwh,
            max_power_kw,
            warranted_throughput_mwh: self.warranted_throughput_mwh,
            round_trip_efficiency: self.round_trip_efficiency,
            install_cost_usd: self.install_cost_usd,
            incentives_usd: self.incentives_usd,
        }
    }
}

fn default_horizon_years() -> u32 {
    10
}

fn default_days_per_month() -> f64 {
    30.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EconomicsConfig {
    /// Which band a session starting exactly on a boundary is billed in.
    #[serde(default)]
    pub session_boundary: BoundaryConvention,
    /// Pre-bucketed daily energies; when present they replace session billing.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub billing_buckets: Vec<EnergyBucket>,
    /// Defaults to the total billed daily energy.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub daily_discharge_kwh: Option<f64>,
    #[serde(default)]
    pub annual_net_income_usd: f64,
    #[serde(default = "default_horizon_years")]
    pub horizon_years: u32,
    #[serde(default = "default_days_per_month")]
    pub days_per_month: f64,
    /// Round the warranty period to 2 decimals and the daily bill to whole dollars.
    #[serde(default)]
    pub paper_compat_rounding: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EssSearchConfig {
    /// Ascending energy levels to try.
    pub energy_levels_kwh: Vec<f64>,
    /// Descending power-to-energy ratios (kW per kWh).
    pub power_ratios: Vec<f64>,
    pub energy_cost_usd_per_kwh: f64,
    #[serde(default)]
    pub power_cost_usd_per_kw: f64,
}

fn default_resolution() -> u32 {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemandConfig {
    /// CSV `timestamp,power_kw`; relative to the scenario file. Synthesised from
    /// the charging sessions over one day when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<String>,
    #[serde(default = "default_resolution")]
    pub resolution_minutes: u32,
}

impl Default for DemandConfig {
    fn default() -> Self {
        Self { profile: None, resolution_minutes: default_resolution() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub bus: BusSpec,
    pub route: RouteProfile,
    pub schedule: ScheduleConfig,
    pub tariff: TouRateSchedule,
    #[serde(default)]
    pub sessions: Vec<ChargingSession>,
    pub bess: BessConfig,
    pub economics: EconomicsConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ess_search: Option<EssSearchConfig>,
    #[serde(default)]
    pub demand: DemandConfig,
}

impl Scenario {
    /// Fills derivable defaults so that a loaded scenario serializes to a fixed point.
    pub fn apply_defaults(&mut self) {
        if self.bus.frontal_area_m2.is_none() {
            self.bus.frontal_area_m2 = Some(self.bus.height_m * self.bus.width_m);
        }
    }

    /// Switches on the 1.6 km/mi factor, the 200 kWh objective coefficient and
    /// rounded lifetime arithmetic.
    pub fn enable_paper_compat(&mut self) {
        self.route.paper_compat_mile_factor = Some(PAPER_COMPAT_METRES_PER_MILE);
        self.schedule.objective_energy_coeff_kwh = Some(200.0);
        self.economics.paper_compat_rounding = true;
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        ensure(!self.name.trim().is_empty(), "name", "must not be empty")?;
        self.bus.validate()?;
        self.route.validate()?;

        let s = &self.schedule;
        finite(&[
            ("schedule.interval_minutes", s.interval_minutes),
            ("schedule.initial_battery_kwh", s.initial_battery_kwh),
            ("schedule.battery_capacity_kwh", s.battery_capacity_kwh),
            ("schedule.charge_power_kw", s.charge_power_kw),
            ("schedule.min_total_distance_mi", s.min_total_distance_mi),
        ])?;
        ensure(s.interval_minutes > 0.0, "schedule.interval_minutes", "must be > 0")?;
        ensure(s.charge_power_kw >= 0.0, "schedule.charge_power_kw", "must be >= 0")?;
        ensure(s.battery_capacity_kwh >= 0.0, "schedule.battery_capacity_kwh", "must be >= 0")?;
        ensure(
            s.initial_battery_kwh >= 0.0 && s.initial_battery_kwh <= s.battery_capacity_kwh,
            "schedule.initial_battery_kwh",
            "must satisfy 0 <= initial <= capacity",
        )?;
        ensure(s.min_total_distance_mi >= 0.0, "schedule.min_total_distance_mi", "must be >= 0")?;
        if let Some(e) = s.charge_energy_per_interval_kwh {
            ensure(e.is_finite() && e >= 0.0, "schedule.charge_energy_per_interval_kwh", "must be >= 0")?;
        }
        if let Some(e) = s.trip_energy_kwh {
            ensure(e.is_finite() && e > 0.0, "schedule.trip_energy_kwh", "must be > 0")?;
        }
        if let Some(c) = s.objective_energy_coeff_kwh {
            ensure(c.is_finite() && c >= 0.0, "schedule.objective_energy_coeff_kwh", "must be >= 0")?;
        }

        for (i, session) in self.sessions.iter().enumerate() {
            session.validate(&format!("sessions[{i}]"))?;
        }

        let b = &self.bess;
        finite(&[
            ("bess.warranted_throughput_mwh", b.warranted_throughput_mwh),
            ("bess.install_cost_usd", b.install_cost_usd),
            ("bess.incentives_usd", b.incentives_usd),
            ("bess.safety_factor", b.safety_factor),
            ("bess.module_capacity_kwh", b.module_capacity_kwh),
        ])?;
        b.spec(b.capacity_kwh.unwrap_or(0.0), b.max_power_kw.unwrap_or(0.0)).validate()?;
        ensure(b.safety_factor >= 1.0, "bess.safety_factor", "must be >= 1")?;
        ensure(b.module_capacity_kwh > 0.0, "bess.module_capacity_kwh", "must be > 0")?;

        let e = &self.economics;
        for (i, bucket) in e.billing_buckets.iter().enumerate() {
            ensure(
                bucket.energy_kwh.is_finite() && bucket.energy_kwh >= 0.0,
                &format!("economics.billing_buckets[{i}].energy_kwh"),
                "must be >= 0",
            )?;
        }
        if let Some(d) = e.daily_discharge_kwh {
            ensure(d.is_finite() && d > 0.0, "economics.daily_discharge_kwh", "must be > 0")?;
        }
        ensure(e.annual_net_income_usd.is_finite(), "economics.annual_net_income_usd", "must be finite")?;
        ensure(e.horizon_years >= 1, "economics.horizon_years", "must be >= 1")?;
        ensure(e.days_per_month.is_finite() && e.days_per_month > 0.0, "economics.days_per_month", "must be > 0")?;

        if let Some(search) = &self.ess_search {
            ensure(!search.energy_levels_kwh.is_empty(), "ess_search.energy_levels_kwh", "must not be empty")?;
            ensure(!search.power_ratios.is_empty(), "ess_search.power_ratios", "must not be empty")?;
            ensure(
                search.energy_levels_kwh.windows(2).all(|w| w[0] < w[1])
                    && search.energy_levels_kwh.iter().all(|e| e.is_finite() && *e >= 0.0),
                "ess_search.energy_levels_kwh",
                "must be ascending and >= 0",
            )?;
            ensure(
                search.power_ratios.windows(2).all(|w| w[0] > w[1])
                    && search.power_ratios.iter().all(|r| r.is_finite() && *r >= 0.0),
                "ess_search.power_ratios",
                "must be descending and >= 0",
            )?;
            ensure(
                search.energy_cost_usd_per_kwh.is_finite() && search.energy_cost_usd_per_kwh >= 0.0,
                "ess_search.energy_cost_usd_per_kwh",
                "must be >= 0",
            )?;
            ensure(
                search.power_cost_usd_per_kw.is_finite() && search.power_cost_usd_per_kw >= 0.0,
                "ess_search.power_cost_usd_per_kw",
                "must be >= 0",
            )?;
        }
        ensure(self.demand.resolution_minutes > 0, "demand.resolution_minutes", "must be > 0")?;
        Ok(())
    }

    /// The scheduling instance for a given per-trip energy, rated from the tariff
    /// at each interval's start.
    pub fn scheduling_problem(&self, trip_energy_kwh: f64) -> SchedulingProblem {
        let s = &self.schedule;
        let charge = s.charge_energy_per_interval();
        SchedulingProblem {
            horizon_intervals: s.horizon_intervals,
            interval_minutes: s.interval_minutes,
            initial_battery_kwh: s.initial_battery_kwh,
            battery_capacity_kwh: s.battery_capacity_kwh,
            charge_energy_per_interval_kwh: charge,
            trip_energy_kwh,
            leg_distance_mi: self.route.leg_distance_mi,
            min_total_distance_mi: s.min_total_distance_mi,
            cost_per_interval: (0..s.horizon_intervals).map(|t| self.tariff.rate_at(s.interval_start(t))).collect(),
            objective_energy_coeff_kwh: s.objective_energy_coeff_kwh.unwrap_or(charge),
        }
    }
}

impl core::fmt::Display for Scenario {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(&self.name)
    }
}
