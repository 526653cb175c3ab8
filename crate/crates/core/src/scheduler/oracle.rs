//! Exhaustive enumeration of decision vectors, for verifying [`super::optimize_schedule`].
//!
//! Vectors are visited depth-first in lexicographic order (drive before charge),
//! tracking the battery by the recurrence rather than the closed form the DP uses.
//! Branches are cut only when the battery leaves its bounds or the remaining
//! intervals cannot supply the required trips, both of which no completion can repair.

use alloc::vec::Vec;
use core::cmp::Ordering;

use super::{compare_candidates, ChargeSchedule, Infeasible, ScheduleError, ScheduleOutcome};
use crate::model::SchedulingProblem;

pub const MAX_BRUTE_FORCE_HORIZON: usize = 26;

struct Search<'a> {
    problem: &'a SchedulingProblem,
    eps: f64,
    required: usize,
    path: Vec<bool>,
    best: Option<(f64, usize, Vec<bool>)>,
    feasible_count: u64,
}

impl Search<'_> {
    fn in_bounds(&self, battery: f64) -> bool {
        battery >= -self.eps && battery <= self.problem.battery_capacity_kwh + self.eps
    }

    fn visit(&mut self, t: usize, battery: f64, trips: usize, cost: f64) {
        let horizon = self.problem.horizon_intervals;
        if trips + (horizon - t) < self.required {
            return;
        }
        if t == horizon {
            self.feasible_count += 1;
            let charges = horizon - trips;
            let better = match &self.best {
                None => true,
                Some((c, n, v)) => compare_candidates((cost, charges, &self.path), (*c, *n, v)) == Ordering::Less,
            };
            if better {
                self.best = Some((cost, charges, self.path.clone()));
            }
            return;
        }
        let p = self.problem;
        let drive = battery - p.trip_energy_kwh;
        if self.in_bounds(drive) {
            self.path.push(false);
            self.visit(t + 1, drive, trips + 1, cost);
            self.path.pop();
        }
        let charge = battery + p.charge_energy_per_interval_kwh;
        if self.in_bounds(charge) {
            self.path.push(true);
            self.visit(t + 1, charge, trips, cost + p.objective_energy_coeff_kwh * p.cost_per_interval[t]);
            self.path.pop();
        }
    }
}

fn run(problem: &SchedulingProblem, required: usize) -> Result<Search<'_>, ScheduleError> {
    problem.validate()?;
    if problem.horizon_intervals > MAX_BRUTE_FORCE_HORIZON {
        return Err(ScheduleError::HorizonTooLarge { horizon: problem.horizon_intervals, max: MAX_BRUTE_FORCE_HORIZON });
    }
    let mut search = Search {
        problem,
        eps: problem.energy_tolerance(),
        required,
        path: Vec::with_capacity(problem.horizon_intervals),
        best: None,
        feasible_count: 0,
    };
    if search.in_bounds(problem.initial_battery_kwh) {
        search.visit(0, problem.initial_battery_kwh, 0, 0.0);
    }
    Ok(search)
}

/// Same contract as [`super::optimize_schedule`], by enumeration. `T <= 26`.
pub fn brute_force_schedule(problem: &SchedulingProblem) -> Result<ScheduleOutcome, ScheduleError> {
    let required = problem.required_trips();
    let search = run(problem, required)?;
    if let Some((_, _, decisions)) = search.best {
        return Ok(ScheduleOutcome::Feasible(ChargeSchedule::from_decisions(problem, decisions)));
    }
    Ok(ScheduleOutcome::Infeasible(Infeasible {
        required_trips: required,
        max_achievable_trips: max_trips(problem),
        energy_shortfall_kwh: Infeasible::shortfall(problem, required),
    }))
}

/// Number of decision vectors satisfying every constraint.
pub fn count_feasible(problem: &SchedulingProblem) -> Result<u64, ScheduleError> {
    Ok(run(problem, problem.required_trips())?.feasible_count)
}

/// Most driving intervals over battery-feasible vectors, ignoring the distance target.
fn max_trips(problem: &SchedulingProblem) -> Option<usize> {
    fn go(p: &SchedulingProblem, eps: f64, t: usize, battery: f64, trips: usize, best: &mut Option<usize>) {
        if best.is_some_and(|b| trips + (p.horizon_intervals - t) <= b) {
            return;
        }
        if t == p.horizon_intervals {
            *best = Some(trips);
            return;
        }
        let ok = |e: f64| e >= -eps && e <= p.battery_capacity_kwh + eps;
        let drive = battery - p.trip_energy_kwh;
        if ok(drive) {
            go(p, eps, t + 1, drive, trips + 1, best);
        }
        let charge = battery + p.charge_energy_per_interval_kwh;
        if ok(charge) {
            go(p, eps, t + 1, charge, trips, best);
        }
    }
    let mut best = None;
    go(problem, problem.energy_tolerance(), 0, problem.initial_battery_kwh, 0, &mut best);
    best
}
