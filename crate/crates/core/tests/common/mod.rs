#![allow(dead_code)]

use chrono::{NaiveDate, NaiveDateTime};
use ebess_core::{BandLabel, RateBand, Season, TouRateSchedule};

fn day(off: f64, on: f64) -> Vec<RateBand> {
    vec![
        RateBand { start_hour: 8, end_hour: 16, rate_usd_per_kwh: off, label: BandLabel::OffPeak },
        RateBand { start_hour: 16, end_hour: 21, rate_usd_per_kwh: on, label: BandLabel::OnPeak },
        RateBand { start_hour: 21, end_hour: 8, rate_usd_per_kwh: off, label: BandLabel::OffPeak },
    ]
}

pub fn sce_tariff() -> TouRateSchedule {
    TouRateSchedule::new(vec![
        Season { name: "summer".into(), months: vec![6, 7, 8, 9], weekday: day(0.13, 0.38), weekend: day(0.13, 0.27) },
        Season { name: "winter".into(), months: vec![10, 11, 12, 1, 2, 3, 4, 5], weekday: day(0.12, 0.35), weekend: day(0.12, 0.35) },
    ])
    .unwrap()
}

/// A tariff with a mid-peak shoulder, so every label occurs.
pub fn three_band_tariff() -> TouRateSchedule {
    let bands = vec![
        RateBand { start_hour: 0, end_hour: 7, rate_usd_per_kwh: 0.10, label: BandLabel::OffPeak },
        RateBand { start_hour: 7, end_hour: 15, rate_usd_per_kwh: 0.20, label: BandLabel::MidPeak },
        RateBand { start_hour: 15, end_hour: 22, rate_usd_per_kwh: 0.45, label: BandLabel::OnPeak },
        RateBand { start_hour: 22, end_hour: 24, rate_usd_per_kwh: 0.10, label: BandLabel::OffPeak },
    ];
    TouRateSchedule::new(vec![Season { name: String::new(), months: (1..=12).collect(), weekday: bands.clone(), weekend: bands }])
        .unwrap()
}

pub fn wednesday(h: u32, m: u32) -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2024, 7, 17).unwrap().and_hms_opt(h, m, 0).unwrap()
}
