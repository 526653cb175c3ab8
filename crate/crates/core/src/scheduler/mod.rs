//! Binary charge/drive scheduling for a single bus on a single route.
//!
//! Each interval the bus either charges or drives one leg. The battery level after
//! `t` intervals of which `b` were driving is `initial + (t - b) * charge - b * trip`,
//! so `(t, b)` fully determines the state and an exact dynamic program over
//! `O(T^2)` states finds the cheapest feasible decision vector without any
//! quantisation. [`oracle`] holds an independent exhaustive search used to check it.

pub mod oracle;

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::model::{ModelError, SchedulingProblem};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScheduleError {
    #[error(transparent)]
    Invalid(#[from] ModelError),
    #[error("horizon of {horizon} intervals exceeds the enumeration limit of {max}")]
    HorizonTooLarge { horizon: usize, max: usize },
    #[error("schedule vectors have inconsistent lengths for a horizon of {0} intervals")]
    LengthMismatch(usize),
}

/// A feasible decision vector with its trajectories. `decisions[t]` is `true`
/// when interval `t` charges; `battery_kwh[0]` and `distance_mi[0]` are the
/// state before the first interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChargeSchedule {
    pub decisions: Vec<bool>,
    pub battery_kwh: Vec<f64>,
    pub distance_mi: Vec<f64>,
    pub total_cost_usd: f64,
    pub trips_completed: usize,
}

impl ChargeSchedule {
    /// Replays a decision vector through the battery and distance recurrences.
    pub fn from_decisions(problem: &SchedulingProblem, decisions: Vec<bool>) -> Self {
        let mut battery = Vec::with_capacity(decisions.len() + 1);
        let mut distance = Vec::with_capacity(decisions.len() + 1);
        battery.push(problem.initial_battery_kwh);
        distance.push(0.0);
        let mut cost = 0.0;
        let mut trips = 0;
        for (t, &charge) in decisions.iter().enumerate() {
            let (b, d) = (battery[t], distance[t]);
            if charge {
                battery.push(b + problem.charge_energy_per_interval_kwh);
                distance.push(d);
                cost += problem.objective_energy_coeff_kwh * problem.cost_per_interval[t];
            } else {
                battery.push(b - problem.trip_energy_kwh);
                distance.push(d + problem.leg_distance_mi);
                trips += 1;
            }
        }
        Self { decisions, battery_kwh: battery, distance_mi: distance, total_cost_usd: cost, trips_completed: trips }
    }

    pub fn charging_intervals(&self) -> usize {
        self.decisions.iter().filter(|&&d| d).count()
    }
}

/// Why no decision vector satisfies the constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Infeasible {
    /// Driving intervals needed to reach the minimum distance.
    pub required_trips: usize,
    /// Most driving intervals any battery-feasible vector achieves, or `None`
    /// when no vector keeps the battery within bounds at all.
    pub max_achievable_trips: Option<usize>,
    /// `required * trip - initial - (T - required) * charge`, floored at zero:
    /// the energy missing even if every non-driving interval charged and the
    /// upper battery bound were ignored.
    pub energy_shortfall_kwh: f64,
}

impl Infeasible {
    pub(crate) fn shortfall(problem: &SchedulingProblem, required: usize) -> f64 {
        let charges = problem.horizon_intervals.saturating_sub(required) as f64;
        let deficit = required as f64 * problem.trip_energy_kwh
            - problem.initial_battery_kwh
            - charges * problem.charge_energy_per_interval_kwh;
        deficit.max(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum ScheduleOutcome {
    Feasible(ChargeSchedule),
    Infeasible(Infeasible),
}

impl ScheduleOutcome {
    pub fn feasible(&self) -> Option<&ChargeSchedule> {
        match self {
            ScheduleOutcome::Feasible(s) => Some(s),
            ScheduleOutcome::Infeasible(_) => None,
        }
    }

    pub fn is_feasible(&self) -> bool {
        matches!(self, ScheduleOutcome::Feasible(_))
    }
}

/// Orders candidate vectors: cost, then fewer charging intervals, then
/// lexicographically earliest (driving before charging).
pub(crate) fn compare_candidates(a: (f64, usize, &[bool]), b: (f64, usize, &[bool])) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
        .then(a.1.cmp(&b.1))
        .then_with(|| a.2.cmp(b.2))
}

#[derive(Clone)]
struct Node {
    cost: f64,
    decisions: Vec<bool>,
}

/// Minimum-cost feasible schedule, or an infeasibility certificate.
pub fn optimize_schedule(problem: &SchedulingProblem) -> Result<ScheduleOutcome, ScheduleError> {
    problem.validate()?;
    let horizon = problem.horizon_intervals;
    let eps = problem.energy_tolerance();
    let level = |t: usize, b: usize| {
        problem.initial_battery_kwh + (t - b) as f64 * problem.charge_energy_per_interval_kwh
            - b as f64 * problem.trip_energy_kwh
    };
    let in_bounds = |e: f64| e >= -eps && e <= problem.battery_capacity_kwh + eps;

    // layer[b]: best prefix reaching `b` driving intervals after `t` steps.
    let mut layer: Vec<Option<Node>> = vec![Some(Node { cost: 0.0, decisions: Vec::with_capacity(horizon) })];
    for t in 0..horizon {
        let step_cost = problem.objective_energy_coeff_kwh * problem.cost_per_interval[t];
        let mut next: Vec<Option<Node>> = vec![None; t + 2];
        for (b, slot) in next.iter_mut().enumerate() {
            if !in_bounds(level(t + 1, b)) {
                continue;
            }
            let charged = layer.get(b).and_then(Option::as_ref).map(|n| (n, true));
            let drove = b.checked_sub(1).and_then(|p| layer[p].as_ref()).map(|n| (n, false));
            let mut best: Option<Node> = None;
            for (prev, charge) in [drove, charged].into_iter().flatten() {
                let cost = if charge { prev.cost + step_cost } else { prev.cost };
                let better = match &best {
                    None => true,
                    Some(cur) => match cost.partial_cmp(&cur.cost).unwrap_or(Ordering::Equal) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => prefix_less(&prev.decisions, charge, &cur.decisions),
                    },
                };
                if better {
                    let mut decisions = prev.decisions.clone();
                    decisions.push(charge);
                    best = Some(Node { cost, decisions });
                }
            }
            *slot = best;
        }
        layer = next;
    }

    let required = problem.required_trips();
    let best = layer
        .iter()
        .enumerate()
        .filter(|(b, _)| *b >= required)
        .filter_map(|(b, n)| n.as_ref().map(|n| (b, n)))
        .min_by(|(ba, a), (bb, b)| {
            compare_candidates((a.cost, horizon - ba, &a.decisions), (b.cost, horizon - bb, &b.decisions))
        });

    Ok(match best {
        Some((_, node)) => ScheduleOutcome::Feasible(ChargeSchedule::from_decisions(problem, node.decisions.clone())),
        None => ScheduleOutcome::Infeasible(Infeasible {
            required_trips: required,
            max_achievable_trips: layer.iter().rposition(Option::is_some),
            energy_shortfall_kwh: Infeasible::shortfall(problem, required),
        }),
    })
}

/// Is `prefix ++ [last]` lexicographically smaller than `other`?
fn prefix_less(prefix: &[bool], last: bool, other: &[bool]) -> bool {
    match prefix.cmp(&other[..prefix.len()]) {
        Ordering::Less => true,
        Ordering::Greater => false,
        Ordering::Equal => !last && other[prefix.len()],
    }
}

/// A broken constraint. Constraint numbers: 1 battery recurrence, 2 battery
/// bounds, 3 initial battery, 4 distance recurrence, 5 minimum distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub constraint: u8,
    pub interval: Option<usize>,
    pub detail: String,
}

pub fn validate_schedule(schedule: &ChargeSchedule, problem: &SchedulingProblem) -> Result<Vec<Violation>, ScheduleError> {
    let horizon = problem.horizon_intervals;
    if schedule.decisions.len() != horizon
        || schedule.battery_kwh.len() != horizon + 1
        || schedule.distance_mi.len() != horizon + 1
        || problem.cost_per_interval.len() != horizon
    {
        return Err(ScheduleError::LengthMismatch(horizon));
    }
    let eps = problem.energy_tolerance();
    let deps = problem.distance_tolerance();
    let battery = &schedule.battery_kwh;
    let distance = &schedule.distance_mi;
    let mut out = Vec::new();
    let mut push = |constraint, interval, detail: String| out.push(Violation { constraint, interval, detail });

    for t in 1..=horizon {
        let charge = schedule.decisions[t - 1];
        let expected = if charge {
            battery[t - 1] + problem.charge_energy_per_interval_kwh
        } else {
            battery[t - 1] - problem.trip_energy_kwh
        };
        if (battery[t] - expected).abs() > eps {
            push(1, Some(t), format!("battery {} != {}", battery[t], expected));
        }
    }
    for (t, &b) in battery.iter().enumerate() {
        if b < -eps || b > problem.battery_capacity_kwh + eps {
            push(2, Some(t), format!("battery {b} outside [0, {}]", problem.battery_capacity_kwh));
        }
    }
    if (battery[0] - problem.initial_battery_kwh).abs() > eps {
        push(3, Some(0), format!("initial battery {} != {}", battery[0], problem.initial_battery_kwh));
    }
    if distance[0].abs() > deps {
        push(4, Some(0), format!("initial distance {} != 0", distance[0]));
    }
    for t in 1..=horizon {
        let expected = if schedule.decisions[t - 1] { distance[t - 1] } else { distance[t - 1] + problem.leg_distance_mi };
        if (distance[t] - expected).abs() > deps {
            push(4, Some(t), format!("distance {} != {}", distance[t], expected));
        }
    }
    if distance[horizon] < problem.min_total_distance_mi - deps {
        push(5, None, format!("distance {} < {}", distance[horizon], problem.min_total_distance_mi));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn problem(horizon: usize) -> SchedulingProblem {
        SchedulingProblem {
            horizon_intervals: horizon,
            interval_minutes: 30.0,
            initial_battery_kwh: 600.0,
            battery_capacity_kwh: 600.0,
            charge_energy_per_interval_kwh: 300.0,
            trip_energy_kwh: 245.0,
            leg_distance_mi: 17.6,
            min_total_distance_mi: 352.0,
            cost_per_interval: vec![0.13; horizon],
            objective_energy_coeff_kwh: 200.0,
        }
    }

    #[test]
    fn zero_consumption_route_never_charges() {
        let p = SchedulingProblem {
            trip_energy_kwh: 0.0,
            min_total_distance_mi: 2.0 * 17.6,
            ..problem(2)
        };
        let s = optimize_schedule(&p).unwrap();
        let s = s.feasible().unwrap();
        assert_eq!(s.decisions, vec![false, false]);
        assert_eq!(s.total_cost_usd, 0.0);
    }

    #[test]
    fn literal_instance_is_infeasible_with_certificate() {
        let out = optimize_schedule(&problem(24)).unwrap();
        let ScheduleOutcome::Infeasible(cert) = out else { panic!("expected infeasible") };
        assert_eq!(cert.required_trips, 20);
        assert_eq!(cert.energy_shortfall_kwh, 3100.0);
        assert!(cert.max_achievable_trips.unwrap() < 20);
    }

    #[test]
    fn stuck_bus_is_infeasible() {
        let p = SchedulingProblem {
            initial_battery_kwh: 100.0,
            charge_energy_per_interval_kwh: 0.0,
            min_total_distance_mi: 17.6,
            ..problem(6)
        };
        let out = optimize_schedule(&p).unwrap();
        assert!(!out.is_feasible());
    }

    #[test]
    fn prefers_cheap_slots_then_fewer_charges_then_earliest() {
        // Must drive 2 of 4 legs with 100 kWh; one charge of 100 suffices.
        let p = SchedulingProblem {
            horizon_intervals: 4,
            initial_battery_kwh: 100.0,
            battery_capacity_kwh: 200.0,
            charge_energy_per_interval_kwh: 100.0,
            trip_energy_kwh: 100.0,
            leg_distance_mi: 1.0,
            min_total_distance_mi: 2.0,
            cost_per_interval: vec![1.0, 5.0, 1.0, 1.0],
            objective_energy_coeff_kwh: 100.0,
            interval_minutes: 30.0,
        };
        // Every feasible vector needs two charges; the two cheapest (cost 2) are
        // 1001 and 1010, and the lexicographically earlier one wins.
        let out = optimize_schedule(&p).unwrap();
        let s = out.feasible().unwrap();
        assert_eq!(s.decisions, vec![true, false, false, true]);
        assert_eq!(s.total_cost_usd, 200.0);

        // With free energy, 0010 (one charge) beats the lexicographically
        // smaller 0011 (two charges).
        let p = SchedulingProblem { trip_energy_kwh: 50.0, cost_per_interval: vec![0.0; 4], ..p };
        let out = optimize_schedule(&p).unwrap();
        assert_eq!(out.feasible().unwrap().decisions, vec![false, false, true, false]);
    }

    #[test]
    fn validate_flags_constructed_violations() {
        let p = SchedulingProblem {
            initial_battery_kwh: 25.0,
            battery_capacity_kwh: 100.0,
            trip_energy_kwh: 10.0,
            min_total_distance_mi: 0.0,
            cost_per_interval: vec![0.1; 3],
            ..problem(3)
        };
        let s = ChargeSchedule::from_decisions(&p, vec![false; 3]);
        assert_eq!(s.battery_kwh[3], -5.0);
        let v = validate_schedule(&s, &p).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].constraint, v[0].interval), (2, Some(3)));

        let p = SchedulingProblem {
            leg_distance_mi: 17.0,
            trip_energy_kwh: 0.0,
            cost_per_interval: vec![0.1; 20],
            ..problem(20)
        };
        let s = ChargeSchedule::from_decisions(&p, vec![false; 20]);
        assert_eq!(s.distance_mi[20], 340.0);
        let v = validate_schedule(&s, &p).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].constraint, v[0].interval), (5, None));
    }

    #[test]
    fn validate_rejects_length_mismatch() {
        let p = problem(3);
        let mut s = ChargeSchedule::from_decisions(&p, vec![false; 3]);
        s.battery_kwh.pop();
        assert_eq!(validate_schedule(&s, &p), Err(ScheduleError::LengthMismatch(3)));
    }

    #[test]
    fn validate_catches_recurrence_tampering() {
        let p = SchedulingProblem { min_total_distance_mi: 0.0, ..problem(3) };
        let mut s = ChargeSchedule::from_decisions(&p, vec![false, false, true]);
        s.battery_kwh[0] = 590.0;
        let v = validate_schedule(&s, &p).unwrap();
        let constraints: Vec<u8> = v.iter().map(|v| v.constraint).collect();
        assert_eq!(constraints, vec![1, 3]);
        s.battery_kwh[0] = 600.0;
        s.distance_mi[2] = 1.0;
        let v = validate_schedule(&s, &p).unwrap();
        assert!(v.iter().all(|v| v.constraint == 4) && v.len() == 2);
    }

    #[test]
    fn rejects_invalid_problem() {
        let p = SchedulingProblem { cost_per_interval: vec![0.1; 3], ..problem(4) };
        assert!(matches!(optimize_schedule(&p), Err(ScheduleError::Invalid(_))));
        let p = SchedulingProblem { initial_battery_kwh: 700.0, ..problem(4) };
        assert!(optimize_schedule(&p).is_err());
    }
}
