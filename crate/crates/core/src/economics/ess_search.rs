//! Early-stopping hill climb over (energy, power/energy ratio) grids.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::irr::{irr_solve, IrrError, IrrProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssChoice {
    pub energy_kwh: f64,
    pub power_kw: f64,
    pub irr: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EssSearchError {
    #[error("energy levels and power ratios must be non-empty")]
    EmptyGrid,
    #[error("no financeable configuration")]
    NoFinanceableConfiguration,
    #[error(transparent)]
    Irr(#[from] IrrError),
}

/// Levels are visited in the given (ascending) order and ratios in the given
/// (descending) order, with `P = E * ratio`. The ratio sweep for a level stops
/// at the first score below its predecessor; the level sweep stops at the
/// first level whose best score is below the previous level's. `None` scores
/// rank below every number. Ties keep the configuration seen first.
pub fn search_ess_size<F>(energy_levels: &[f64], ratios: &[f64], mut score: F) -> Result<EssChoice, EssSearchError>
where
    F: FnMut(f64, f64) -> Option<f64>,
{
    if energy_levels.is_empty() || ratios.is_empty() {
        return Err(EssSearchError::EmptyGrid);
    }
    let mut best: Option<EssChoice> = None;
    let mut previous_level_max = f64::NEG_INFINITY;
    for (i, &energy) in energy_levels.iter().enumerate() {
        let mut level_best: Option<EssChoice> = None;
        let mut level_max = f64::NEG_INFINITY;
        let mut previous = None;
        for &ratio in ratios {
            let power = energy * ratio;
            let value = score(energy, power).unwrap_or(f64::NEG_INFINITY);
            if value > level_max {
                level_max = value;
                level_best = Some(EssChoice { energy_kwh: energy, power_kw: power, irr: value });
            }
            if previous.is_some_and(|p| value < p) {
                break;
            }
            previous = Some(value);
        }
        if i > 0 && level_max < previous_level_max {
            break;
        }
        if let Some(candidate) = level_best {
            if best.is_none_or(|b| candidate.irr > b.irr) {
                best = Some(candidate);
            }
        }
        previous_level_max = level_max;
    }
    best.ok_or(EssSearchError::NoFinanceableConfiguration)
}

/// [`search_ess_size`] scored by IRR. Configurations without a root are unfinanceable.
pub fn optimize_ess_size<F>(energy_levels: &[f64], ratios: &[f64], mut evaluate: F) -> Result<EssChoice, EssSearchError>
where
    F: FnMut(f64, f64) -> IrrProblem,
{
    let mut failure = None;
    let result = search_ess_size(energy_levels, ratios, |e, p| match irr_solve(&evaluate(e, p)) {
        Ok(r) => Some(r),
        Err(IrrError::NoRoot) => None,
        Err(err) => {
            failure.get_or_insert(err);
            None
        }
    });
    match failure {
        Some(err) => Err(err.into()),
        None => result,
    }
}
