//! Unit conversion constants.

/// International mile in metres.
pub const METRES_PER_MILE: f64 = 1609.34;

/// The rounded 1.6 km/mi factor used by some published route calculations.
pub const PAPER_COMPAT_METRES_PER_MILE: f64 = 1600.0;

pub const MPH_TO_M_PER_S: f64 = 0.44704;

pub const JOULES_PER_KWH: f64 = 3.6e6;

pub const STANDARD_GRAVITY: f64 = 9.81;

pub const DAYS_PER_YEAR: f64 = 365.0;
