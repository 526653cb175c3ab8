//! Time-of-use billing, battery lifetime arithmetic, IRR and the ESS size search.

mod ess_search;
mod irr;
mod lifetime;

use alloc::string::String;

use chrono::NaiveDateTime;
use serde::{Deserialize, Serialize};

use crate::dispatch::ChargeEvent;
use crate::tariff::{BoundaryConvention, TouRateSchedule};

pub use ess_search::{optimize_ess_size, search_ess_size, EssChoice, EssSearchError};
pub use irr::{irr_solve, npv, IrrError, IrrProblem, IRR_LOWER_BOUND, IRR_UPPER_BOUND};
pub use lifetime::{battery_lifetime_metrics, LifetimeMetrics};

/// Energy already assigned to a billing period; `at` is any instant inside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyBucket {
    #[serde(default)]
    pub label: String,
    pub energy_kwh: f64,
    pub at: NaiveDateTime,
}

pub fn rate_at(time: NaiveDateTime, rates: &TouRateSchedule) -> f64 {
    rates.rate_at(time)
}

pub fn bill_buckets(buckets: &[EnergyBucket], rates: &TouRateSchedule) -> f64 {
    buckets.iter().map(|b| b.energy_kwh * rates.rate_at(b.at)).sum()
}

/// Each event is billed entirely at the rate in force when it starts.
pub fn bill_events(events: &[ChargeEvent], rates: &TouRateSchedule, convention: BoundaryConvention) -> f64 {
    events
        .iter()
        .map(|e| e.energy_kwh * rates.band_at_with(e.start, convention).rate_usd_per_kwh)
        .sum()
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use alloc::vec;
    use chrono::NaiveDate;

    fn bucket(e: f64, h: u32) -> EnergyBucket {
        EnergyBucket { label: String::new(), energy_kwh: e, at: wednesday(h, 0) }
    }

    #[test]
    fn rates() {
        let r = sce();
        assert_eq!(rate_at(wednesday(17, 0), &r), 0.38);
        assert_eq!(rate_at(wednesday(21, 0), &r), 0.13);
        let feb_saturday = NaiveDate::from_ymd_opt(2024, 2, 10).unwrap().and_hms_opt(10, 0, 0).unwrap();
        assert_eq!(rate_at(feb_saturday, &r), 0.12);
    }

    #[test]
    fn bucket_bill() {
        let r = sce();
        let daily = bill_buckets(&[bucket(400.0, 8), bucket(20.0, 16), bucket(360.0, 22)], &r);
        assert!((daily - 106.40).abs() < 1e-9);
        assert!((daily * 30.0 - 3192.0).abs() < 1e-6);
        assert_eq!(bill_buckets(&[], &r), 0.0);
    }

    #[test]
    fn session_bill_depends_on_boundary() {
        let r = sce();
        let half_open = bill_events(&day_sessions(), &r, BoundaryConvention::StartInclusive);
        // 340 * 0.13 + 80 * 0.38 + 360 * 0.13
        assert!((half_open - 121.40).abs() < 1e-9);
        let end_inclusive = bill_events(&day_sessions(), &r, BoundaryConvention::EndInclusive);
        assert!((end_inclusive - 106.40).abs() < 1e-9);
    }

    #[test]
    fn bucket_bill_scales_linearly() {
        let r = sce();
        let base = vec![bucket(400.0, 8), bucket(20.0, 16), bucket(360.0, 22)];
        let scaled: alloc::vec::Vec<_> = base.iter().map(|b| EnergyBucket { energy_kwh: b.energy_kwh * 4.0, ..b.clone() }).collect();
        assert_eq!(bill_buckets(&scaled, &r), 4.0 * bill_buckets(&base, &r));
    }
}
