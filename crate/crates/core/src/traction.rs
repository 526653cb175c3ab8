//! Constant-speed traction energy for one route leg.
//!
//! Road load is the sum of aerodynamic drag, rolling resistance and grade
//! resistance; dividing by the drivetrain efficiency gives the force the battery
//! has to supply. Energy over the leg plus auxiliary (HVAC) load is the trip energy.

use serde::{Deserialize, Serialize};

use crate::model::{BusSpec, RouteProfile};
use crate::units::{JOULES_PER_KWH, METRES_PER_MILE, MPH_TO_M_PER_S};

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum TractionError {
    #[error("distance must be > 0, got {0}")]
    NonPositiveDistance(f64),
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    #[error("efficiency stage {0} outside (0, 1]")]
    EfficiencyOutOfRange(f64),
    #[error("at least one efficiency stage is required")]
    NoStages,
    #[error("speed must be > 0, got {0}")]
    NonPositiveSpeed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TractionForces {
    pub air_drag_n: f64,
    pub rolling_n: f64,
    pub climb_n: f64,
    pub net_n: f64,
    pub total_n: f64,
    pub efficiency: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripEnergy {
    pub traction_kwh: f64,
    pub aux_kwh: f64,
    pub total_kwh: f64,
    pub trip_duration_h: f64,
}

/// Full traction evaluation of a bus on a route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TractionSummary {
    pub gradient_deg: f64,
    pub forces: TractionForces,
    pub energy: TripEnergy,
}

/// Grade angle in degrees using the international mile.
pub fn gradient_angle(elev_start_m: f64, elev_end_m: f64, distance_mi: f64) -> Result<f64, TractionError> {
    gradient_angle_with_mile(elev_start_m, elev_end_m, distance_mi, METRES_PER_MILE)
}

/// `atan((start - end) / distance)` in degrees, with an explicit metres-per-mile factor.
pub fn gradient_angle_with_mile(
    elev_start_m: f64,
    elev_end_m: f64,
    distance_mi: f64,
    metres_per_mile: f64,
) -> Result<f64, TractionError> {
    if !elev_start_m.is_finite() || !elev_end_m.is_finite() {
        return Err(TractionError::NonFinite("elevation"));
    }
    if distance_mi.is_nan() || distance_mi <= 0.0 || !distance_mi.is_finite() {
        return Err(TractionError::NonPositiveDistance(distance_mi));
    }
    let rise = elev_start_m - elev_end_m;
    Ok(libm::atan(rise / (distance_mi * metres_per_mile)).to_degrees())
}

/// Product of per-stage efficiencies (motor, transmission, battery, ...).
pub fn drivetrain_efficiency(stages: &[f64]) -> Result<f64, TractionError> {
    if stages.is_empty() {
        return Err(TractionError::NoStages);
    }
    stages.iter().try_fold(1.0, |acc, &e| {
        if e > 0.0 && e <= 1.0 {
            Ok(acc * e)
        } else {
            Err(TractionError::EfficiencyOutOfRange(e))
        }
    })
}

pub fn traction_forces(
    bus: &BusSpec,
    route: &RouteProfile,
    angle_deg: f64,
    efficiency: f64,
) -> Result<TractionForces, TractionError> {
    if !angle_deg.is_finite() {
        return Err(TractionError::NonFinite("angle"));
    }
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(TractionError::EfficiencyOutOfRange(efficiency));
    }
    let inputs = [
        ("mass", bus.mass_kg),
        ("frontal area", bus.frontal_area()),
        ("drag coefficient", bus.drag_coefficient),
        ("air density", route.air_density_kg_m3),
        ("speed", route.average_speed_mph),
        ("gravity", route.gravity_m_s2),
        ("rolling coefficient", route.rolling_coefficient),
    ];
    if let Some((name, _)) = inputs.iter().find(|(_, v)| !v.is_finite()) {
        return Err(TractionError::NonFinite(name));
    }

    let v = route.average_speed_mph * MPH_TO_M_PER_S;
    let a = angle_deg.to_radians();
    let weight = bus.mass_kg * route.gravity_m_s2;

    let air_drag_n = 0.5 * bus.frontal_area() * bus.drag_coefficient * route.air_density_kg_m3 * v * v;
    let rolling_n = weight * route.rolling_coefficient * libm::cos(a);
    let climb_n = weight * libm::sin(a);
    let net_n = air_drag_n + rolling_n + climb_n;
    Ok(TractionForces { air_drag_n, rolling_n, climb_n, net_n, total_n: net_n / efficiency, efficiency })
}

/// Energy for one leg at constant speed. Negative tractive force (steep descent)
/// is clamped to zero: regeneration is not modelled.
pub fn trip_energy(forces: &TractionForces, route: &RouteProfile, aux_power_kw: f64) -> Result<TripEnergy, TractionError> {
    if route.leg_distance_mi.is_nan() || route.leg_distance_mi <= 0.0 {
        return Err(TractionError::NonPositiveDistance(route.leg_distance_mi));
    }
    if route.average_speed_mph.is_nan() || route.average_speed_mph <= 0.0 {
        return Err(TractionError::NonPositiveSpeed(route.average_speed_mph));
    }
    if !aux_power_kw.is_finite() || !forces.total_n.is_finite() {
        return Err(TractionError::NonFinite("trip energy input"));
    }
    let traction_kwh = energy_kwh(forces.total_n.max(0.0), route.leg_distance_m());
    let trip_duration_h = route.trip_duration_h();
    let aux_kwh = aux_power_kw * trip_duration_h;
    Ok(TripEnergy { traction_kwh, aux_kwh, total_kwh: traction_kwh + aux_kwh, trip_duration_h })
}

/// Work in kWh for a constant force (N) over a distance (m).
pub fn energy_kwh(force_n: f64, distance_m: f64) -> f64 {
    force_n * distance_m / JOULES_PER_KWH
}

/// Gradient, forces and trip energy for a bus on its route.
pub fn evaluate(bus: &BusSpec, route: &RouteProfile) -> Result<TractionSummary, TractionError> {
    let gradient_deg = gradient_angle_with_mile(
        route.elevation_start_m,
        route.elevation_end_m,
        route.leg_distance_mi,
        route.metres_per_mile(),
    )?;
    let efficiency = drivetrain_efficiency(&bus.drivetrain_efficiencies)?;
    let forces = traction_forces(bus, route, gradient_deg, efficiency)?;
    let energy = trip_energy(&forces, route, bus.aux_power_kw)?;
    Ok(TractionSummary { gradient_deg, forces, energy })
}
