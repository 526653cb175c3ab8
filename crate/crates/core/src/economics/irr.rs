use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const IRR_LOWER_BOUND: f64 = -0.9999;
pub const IRR_UPPER_BOUND: f64 = 10.0;

/// `annual_cashflows_usd[n]` arrives at the end of year `n + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrrProblem {
    pub upfront_usd: f64,
    pub incentives_usd: f64,
    pub annual_cashflows_usd: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IrrError {
    #[error("no IRR in [{IRR_LOWER_BOUND}, {IRR_UPPER_BOUND}]: discounted cashflows never cross the net upfront cost")]
    NoRoot,
    #[error("bisection stopped at r = {rate} with residual {residual}")]
    NotConverged { rate: f64, residual: f64 },
    #[error("invalid IRR problem: {0}")]
    Invalid(&'static str),
}

impl IrrProblem {
    pub fn horizon_years(&self) -> usize {
        self.annual_cashflows_usd.len()
    }

    pub fn net_upfront(&self) -> f64 {
        self.upfront_usd - self.incentives_usd
    }

    pub fn validate(&self) -> Result<(), IrrError> {
        if self.annual_cashflows_usd.is_empty() {
            return Err(IrrError::Invalid("at least one cashflow is required"));
        }
        if self.annual_cashflows_usd.iter().any(|c| !c.is_finite()) {
            return Err(IrrError::Invalid("cashflows must be finite"));
        }
        if !(self.incentives_usd >= 0.0 && self.upfront_usd >= self.incentives_usd && self.upfront_usd.is_finite()) {
            return Err(IrrError::Invalid("need upfront >= incentives >= 0"));
        }
        if self.net_upfront() <= 0.0 {
            return Err(IrrError::Invalid("net upfront cost must be positive"));
        }
        Ok(())
    }
}

/// Present value of the cashflows at `rate` minus the net upfront cost.
pub fn npv(problem: &IrrProblem, rate: f64) -> f64 {
    let step = 1.0 / (1.0 + rate);
    let mut discount = 1.0;
    let mut pv = 0.0;
    for &cf in &problem.annual_cashflows_usd {
        discount *= step;
        if cf != 0.0 {
            pv += cf * discount;
        }
    }
    pv - problem.net_upfront()
}

/// Bisection on `[IRR_LOWER_BOUND, IRR_UPPER_BOUND]` down to adjacent floats.
/// The result satisfies `|npv| < 1e-9 * net_upfront`, or `NotConverged` is returned.
pub fn irr_solve(problem: &IrrProblem) -> Result<f64, IrrError> {
    problem.validate()?;
    let tolerance = 1e-9 * problem.net_upfront();
    let f = |r| npv(problem, r);

    let (mut lo, mut hi) = (IRR_LOWER_BOUND, IRR_UPPER_BOUND);
    let (mut f_lo, f_hi) = (f(lo), f(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.is_nan() || f_hi.is_nan() || (f_lo > 0.0) == (f_hi > 0.0) {
        return Err(IrrError::NoRoot);
    }

    for _ in 0..2200 {
        let mid = lo + (hi - lo) / 2.0;
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }

    let (rate, residual) = [(lo, f(lo)), (hi, f(hi))]
        .into_iter()
        .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap_or((lo, f_lo));
    if residual.abs() < tolerance {
        Ok(rate)
    } else {
        Err(IrrError::NotConverged { rate, residual })
    }
}
