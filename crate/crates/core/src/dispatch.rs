//! Stationary battery sizing and per-interval dispatch against e-bus charging load.

use alloc::vec::Vec;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::model::{hours_to_delta, BessSpec, ChargingSession, DemandProfile, ModelError, SchedulingProblem};
use crate::scheduler::ChargeSchedule;
use crate::tariff::{BandLabel, BoundaryConvention, TouRateSchedule};

/// A block of charging energy delivered at constant power from `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChargeEvent {
    pub start: NaiveDateTime,
    pub energy_kwh: f64,
    pub power_kw: f64,
}

impl ChargeEvent {
    pub fn end(&self) -> NaiveDateTime {
        if self.power_kw > 0.0 {
            self.start + hours_to_delta(self.energy_kwh / self.power_kw)
        } else {
            self.start
        }
    }
}

impl From<&ChargingSession> for ChargeEvent {
    fn from(s: &ChargingSession) -> Self {
        ChargeEvent { start: s.start, energy_kwh: s.energy_kwh, power_kw: s.power_kw }
    }
}

/// One event per charging interval of a schedule whose interval 0 begins at `start`.
pub fn schedule_events(schedule: &ChargeSchedule, problem: &SchedulingProblem, start: NaiveDateTime) -> Vec<ChargeEvent> {
    let interval_h = problem.interval_minutes / 60.0;
    schedule
        .decisions
        .iter()
        .enumerate()
        .filter(|(_, &d)| d)
        .map(|(t, _)| ChargeEvent {
            start: start + hours_to_delta(interval_h * t as f64),
            energy_kwh: problem.charge_energy_per_interval_kwh,
            power_kw: problem.charge_energy_per_interval_kwh / interval_h,
        })
        .collect()
}

fn on_peak(rates: &TouRateSchedule, at: NaiveDateTime, convention: BoundaryConvention) -> bool {
    rates.band_at_with(at, convention).label == BandLabel::OnPeak
}

/// Charging energy whose event starts inside an on-peak band.
pub fn peak_charge_energy(events: &[ChargeEvent], rates: &TouRateSchedule, convention: BoundaryConvention) -> f64 {
    events
        .iter()
        .filter(|e| on_peak(rates, e.start, convention))
        .map(|e| e.energy_kwh)
        .sum()
}

/// Largest total power of on-peak events that overlap in time.
pub fn max_simultaneous_peak_power(events: &[ChargeEvent], rates: &TouRateSchedule, convention: BoundaryConvention) -> f64 {
    // (time, is_start, power); ends sort before starts at the same instant.
    let mut edges: Vec<(NaiveDateTime, bool, f64)> = events
        .iter()
        .filter(|e| e.power_kw > 0.0 && on_peak(rates, e.start, convention))
        .flat_map(|e| [(e.start, true, e.power_kw), (e.end(), false, e.power_kw)])
        .collect();
    edges.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut level: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for (_, start, p) in edges {
        if start {
            level += p;
            peak = peak.max(level);
        } else {
            level -= p;
        }
    }
    peak
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BessSizing {
    pub on_peak_energy_kwh: f64,
    pub capacity_kwh: f64,
    pub max_power_kw: f64,
}

/// Capacity covers the on-peak charging energy times a safety factor; the power
/// rating covers the largest simultaneous on-peak load.
pub fn size_bess(
    events: &[ChargeEvent],
    rates: &TouRateSchedule,
    convention: BoundaryConvention,
    safety_factor: f64,
) -> Result<BessSizing, ModelError> {
    if !(safety_factor >= 1.0 && safety_factor.is_finite()) {
        return Err(ModelError::invalid("safety_factor", "must be >= 1"));
    }
    let on_peak_energy_kwh = peak_charge_energy(events, rates, convention);
    Ok(BessSizing {
        on_peak_energy_kwh,
        capacity_kwh: on_peak_energy_kwh * safety_factor,
        max_power_kw: max_simultaneous_peak_power(events, rates, convention),
    })
}

/// Aligned per-interval series. `bess_soc_kwh[i]` is the state of charge at the
/// start of interval `i`; it has one more entry than the other series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispatchSeries {
    pub interval_hours: f64,
    pub timestamps: Vec<NaiveDateTime>,
    pub load_kw: Vec<f64>,
    pub battery_support_kw: Vec<f64>,
    pub grid_kw: Vec<f64>,
    pub bess_recharge_kw: Vec<f64>,
    pub bess_soc_kwh: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispatchSummary {
    pub duration_h: f64,
    pub load_kwh: f64,
    pub support_kwh: f64,
    pub recharge_kwh: f64,
    pub grid_kwh: f64,
    pub on_peak_load_kwh: f64,
    pub on_peak_grid_kwh: f64,
    pub peak_load_kw: f64,
    pub peak_on_peak_grid_kw: f64,
    pub cost_without_bess_usd: f64,
    pub cost_with_bess_usd: f64,
    pub savings_usd: f64,
}

impl DispatchSeries {
    pub fn len(&self) -> usize {
        self.timestamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.timestamps.is_empty()
    }

    pub fn summarize(&self, rates: &TouRateSchedule) -> DispatchSummary {
        let dt = self.interval_hours;
        let mut s = DispatchSummary {
            duration_h: dt * self.len() as f64,
            load_kwh: 0.0,
            support_kwh: 0.0,
            recharge_kwh: 0.0,
            grid_kwh: 0.0,
            on_peak_load_kwh: 0.0,
            on_peak_grid_kwh: 0.0,
            peak_load_kw: 0.0,
            peak_on_peak_grid_kw: 0.0,
            cost_without_bess_usd: 0.0,
            cost_with_bess_usd: 0.0,
            savings_usd: 0.0,
        };
        for i in 0..self.len() {
            let band = rates.band_at(self.timestamps[i]);
            let (load, grid) = (self.load_kw[i], self.grid_kw[i]);
            s.load_kwh += load * dt;
            s.support_kwh += self.battery_support_kw[i] * dt;
            s.recharge_kwh += self.bess_recharge_kw[i] * dt;
            s.grid_kwh += grid * dt;
            s.peak_load_kw = s.peak_load_kw.max(load);
            if band.label == BandLabel::OnPeak {
                s.on_peak_load_kwh += load * dt;
                s.on_peak_grid_kwh += grid * dt;
                s.peak_on_peak_grid_kw = s.peak_on_peak_grid_kw.max(grid);
            }
            s.cost_without_bess_usd += load * dt * band.rate_usd_per_kwh;
            s.cost_with_bess_usd += grid * dt * band.rate_usd_per_kwh;
        }
        s.savings_usd = s.cost_without_bess_usd - s.cost_with_bess_usd;
        s
    }
}

/// Greedy peak shaving starting from a full battery. See [`dispatch_from`].
pub fn dispatch(load: &DemandProfile, bess: &BessSpec, rates: &TouRateSchedule) -> DispatchSeries {
    dispatch_from(load, bess, rates, bess.capacity_kwh)
}

/// Greedy peak shaving.
///
/// On-peak intervals: the battery supplies `min(load, max_power, soc / dt)`.
/// Off-peak intervals with zero bus load: the battery recharges from the grid at
/// up to `max_power` until full, storing `recharge * dt * efficiency`.
/// Everything else passes straight through to the grid. With this split,
/// `load == support + (grid - recharge)` holds exactly in floating point.
pub fn dispatch_from(load: &DemandProfile, bess: &BessSpec, rates: &TouRateSchedule, initial_soc_kwh: f64) -> DispatchSeries {
    let dt = load.interval_hours();
    let n = load.len();
    let capacity = bess.capacity_kwh;
    let eta = bess.round_trip_efficiency;
    let mut out = DispatchSeries {
        interval_hours: dt,
        timestamps: Vec::with_capacity(n),
        load_kw: Vec::with_capacity(n),
        battery_support_kw: Vec::with_capacity(n),
        grid_kw: Vec::with_capacity(n),
        bess_recharge_kw: Vec::with_capacity(n),
        bess_soc_kwh: Vec::with_capacity(n + 1),
    };
    let mut soc = initial_soc_kwh.clamp(0.0, capacity);
    out.bess_soc_kwh.push(soc);

    for sample in load.samples() {
        let demand = sample.power_kw;
        let (support, grid, recharge) = match rates.band_at(sample.timestamp).label {
            BandLabel::OnPeak => {
                let wanted = demand.min(bess.max_power_kw).min(soc / dt).max(0.0);
                let grid = demand - wanted;
                // Re-derive support from the rounded grid draw so the split is exact.
                let support = demand - grid;
                soc = (soc - support * dt).clamp(0.0, capacity);
                (support, grid, 0.0)
            }
            BandLabel::OffPeak if demand == 0.0 && soc < capacity => {
                let recharge = bess.max_power_kw.min((capacity - soc) / (dt * eta)).max(0.0);
                soc = (soc + recharge * dt * eta).clamp(0.0, capacity);
                (0.0, recharge, recharge)
            }
            _ => (0.0, demand, 0.0),
        };
        out.timestamps.push(sample.timestamp);
        out.load_kw.push(demand);
        out.battery_support_kw.push(support);
        out.grid_kw.push(grid);
        out.bess_recharge_kw.push(recharge);
        out.bess_soc_kwh.push(soc);
    }
    out
}
