//! Planning core for battery-buffered e-bus charging.
//!
//! Everything here is pure computation over the domain types in [`model`] and
//! [`tariff`]: the traction energy model, the exact charge/drive scheduler, BESS
//! sizing and dispatch, and the billing / lifetime / IRR economics. The crate is
//! `no_std` (it needs `alloc`); file formats and the CLI live in the `ebess`
//! companion crate.

#![no_std]

extern crate alloc;

pub mod dispatch;
pub mod economics;
pub mod model;
pub mod scheduler;
pub mod tariff;
pub mod traction;
pub mod units;

pub use dispatch::{dispatch, peak_charge_energy, size_bess, BessSizing, ChargeEvent, DispatchSeries};
pub use economics::{
    battery_lifetime_metrics, bill_buckets, bill_events, irr_solve, optimize_ess_size, rate_at,
    EnergyBucket, IrrError, IrrProblem, LifetimeMetrics,
};
pub use model::{
    BessSpec, BusSpec, ChargingSession, DemandProfile, DemandSample, ModelError, RouteProfile,
    Scenario, SchedulingProblem,
};
pub use scheduler::{optimize_schedule, validate_schedule, ChargeSchedule, Infeasible, ScheduleOutcome};
pub use tariff::{BandLabel, BoundaryConvention, DayType, RateBand, Season, TouRateSchedule};
pub use traction::{
    drivetrain_efficiency, gradient_angle, traction_forces, trip_energy, TractionForces, TripEnergy,
};
