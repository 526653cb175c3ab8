use serde::{Deserialize, Serialize};

use crate::model::{BessSpec, ModelError};
use crate::units::DAYS_PER_YEAR;

/// Warranty-limited battery life and the daily cost of energy drawn from it.
///
/// Half of the warranted throughput counts as discharge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LifetimeMetrics {
    pub daily_discharge_kwh: f64,
    pub annual_discharge_kwh: f64,
    pub warranty_period_years: f64,
    pub lifetime_discharge_kwh: f64,
    pub cost_per_kwh_usd: f64,
    pub daily_battery_cost_usd: f64,
    pub breakeven_install_cost_usd: f64,
}

/// With `rounding`, the warranty period is rounded to two decimals and the
/// daily bill to whole dollars before they feed later steps.
pub fn battery_lifetime_metrics(
    daily_discharge_kwh: f64,
    daily_bill_usd: f64,
    bess: &BessSpec,
    rounding: bool,
) -> Result<LifetimeMetrics, ModelError> {
    if !(daily_discharge_kwh > 0.0 && daily_discharge_kwh.is_finite()) {
        return Err(ModelError::invalid("daily_discharge_kwh", "must be > 0"));
    }
    if !(bess.warranted_throughput_mwh > 0.0 && bess.warranted_throughput_mwh.is_finite()) {
        return Err(ModelError::invalid("warranted_throughput_mwh", "must be > 0"));
    }
    if !(daily_bill_usd >= 0.0 && daily_bill_usd.is_finite()) {
        return Err(ModelError::invalid("daily_bill_usd", "must be finite and >= 0"));
    }
    let annual = daily_discharge_kwh * DAYS_PER_YEAR;
    let warranty = bess.warranted_throughput_mwh * 1000.0 / 2.0 / annual;
    let (warranty, lifetime, bill) = if rounding {
        let hundredths = libm::round(warranty * 100.0);
        (hundredths / 100.0, hundredths * annual / 100.0, libm::round(daily_bill_usd))
    } else {
        (warranty, warranty * annual, daily_bill_usd)
    };
    let cost_per_kwh = bess.install_cost_usd / lifetime;
    Ok(LifetimeMetrics {
        daily_discharge_kwh,
        annual_discharge_kwh: annual,
        warranty_period_years: warranty,
        lifetime_discharge_kwh: lifetime,
        cost_per_kwh_usd: cost_per_kwh,
        daily_battery_cost_usd: daily_discharge_kwh * cost_per_kwh,
        breakeven_install_cost_usd: bill / daily_discharge_kwh * lifetime,
    })
}
