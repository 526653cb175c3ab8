use std::fs;

use ebess::report::{IrrOutcome, PlanningReport, TripEnergySource};
use ebess::{plan, resolve_scenario, PlanOptions};
use ebess_core::ScheduleOutcome;

fn run(name: &str, options: &PlanOptions) -> ebess::Plan {
    let loaded = resolve_scenario(name).unwrap();
    plan(&loaded.scenario, loaded.base_dir.as_deref(), options).unwrap()
}

#[test]
fn literal_route_is_infeasible_but_still_reported() {
    let p = run("la_route_ac_paper", &PlanOptions::default());
    let ScheduleOutcome::Infeasible(cert) = &p.report.schedule else { panic!("expected infeasible") };
    assert_eq!(cert.required_trips, 20);
    assert_eq!(cert.energy_shortfall_kwh, 3100.0);
    assert_eq!(p.report.trip_energy_source, TripEnergySource::Configured);
    assert!((p.report.billing.daily_bill_usd - 106.40).abs() < 1e-9);
    assert_eq!(p.report.billing.monthly_bill_usd, 3180.0);
    assert_eq!(p.report.lifetime.lifetime_discharge_kwh, 298_935.0);
}

#[test]
fn physics_route_answers() {
    let p = run("la_route_ac_physics", &PlanOptions::default());
    let r = &p.report;
    assert!(r.schedule.is_feasible());
    assert_eq!(r.trip_energy_source, TripEnergySource::TractionModel);
    assert!((r.billing.monthly_bill_usd - 3192.0).abs() < 1e-6);
    assert_eq!(r.bess.capacity_kwh, 20.0);
    assert_eq!(r.bess.max_power_kw, 500.0);
    let a = &r.answers;
    assert_eq!(a.energy_used_8am_10pm_kwh, 420.0);
    assert_eq!(a.batteries_required, 1);
    // 20 kWh moved from the 0.38 band to the 0.13 band each day.
    assert!((a.monthly_savings_usd - 20.0 * 0.25 * 30.0).abs() < 1e-6);
    assert!((r.annual_savings_usd - 20.0 * 0.25 * 365.0).abs() < 1e-6);
    assert!(matches!(r.irr, IrrOutcome::Solved { rate } if rate < 0.0));
    // The synthesised demand day carries all 780 kWh.
    assert!((r.dispatch.load_kwh - 780.0).abs() < 1e-6);
}

#[test]
fn overrides_apply() {
    let p = run("la_route_ac_physics", &PlanOptions { safety_factor: Some(1.5), ..Default::default() });
    assert_eq!(p.report.bess.capacity_kwh, 30.0);
    let p = run("la_route_ac_physics", &PlanOptions { paper_compat: true, ..Default::default() });
    assert!(p.report.paper_compat);
    assert_eq!(p.problem.objective_energy_coeff_kwh, 200.0);
    assert_eq!(p.report.billing.monthly_bill_usd, 3180.0);
}

#[test]
fn demand_csv_override() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("load.csv");
    let mut text = String::from("timestamp,power_kw\n");
    for h in 0..24 {
        text.push_str(&format!("2024-07-17T{h:02}:00:00,{}\n", if (16..21).contains(&h) { 100 } else { 0 }));
    }
    fs::write(&csv, text).unwrap();
    let p = run("la_route_ac_physics", &PlanOptions { demand_csv: Some(csv), ..Default::default() });
    assert_eq!(p.dispatch.len(), 24);
    assert_eq!(p.report.dispatch.on_peak_load_kwh, 500.0);
    assert_eq!(p.report.dispatch.support_kwh, 20.0);
}

#[test]
fn report_json_round_trips() {
    for name in ebess::bundled_scenarios() {
        let p = run(name, &PlanOptions::default());
        let text = serde_json::to_string_pretty(&p.report).unwrap();
        let back: PlanningReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p.report);
    }
}
