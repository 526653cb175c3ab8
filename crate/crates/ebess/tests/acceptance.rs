//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use chrono::{NaiveDate, TimeDelta};
use ebess::resolve_scenario;
use ebess_core::dispatch::dispatch_from;
use ebess_core::economics::{npv, search_ess_size};
use ebess_core::scheduler::oracle::{brute_force_schedule, count_feasible};
use ebess_core::traction::{energy_kwh, evaluate};
use ebess_core::{
    battery_lifetime_metrics, bill_buckets, irr_solve, optimize_schedule, BandLabel, BessSpec, DemandProfile,
    DemandSample, IrrProblem, ScheduleOutcome, SchedulingProblem,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn billing() -> Outcome {
    let s = resolve_scenario("la_route_ac_paper").map_err(|e| e.to_string())?.scenario;
    let energies: Vec<f64> = s.economics.billing_buckets.iter().map(|b| b.energy_kwh).collect();
    if energies != [400.0, 20.0, 360.0] {
        return Err(format!("unexpected bundled buckets {energies:?}"));
    }
    let daily = bill_buckets(&s.economics.billing_buckets, &s.tariff);
    let monthly = daily * 30.0;
    check(
        within(daily, 106.40, 0.01) && within(monthly, 3192.0, 0.30),
        format!("daily ${daily:.4}, monthly ${monthly:.2}"),
    )
}

fn lifetime_chain() -> Outcome {
    let bess = BessSpec {
        capacity_kwh: 20.0,
        max_power_kw: 500.0,
        warranted_throughput_mwh: 600.0,
        round_trip_efficiency: 1.0,
        install_cost_usd: 40_625.0,
        incentives_usd: 0.0,
    };
    let m = battery_lifetime_metrics(780.0, 106.40, &bess, true).map_err(|e| e.to_string())?;
    check(
        m.annual_discharge_kwh == 284_700.0
            && m.warranty_period_years == 1.05
            && m.lifetime_discharge_kwh == 298_935.0
            && (0.1355..=0.1365).contains(&m.cost_per_kwh_usd)
            && within(m.daily_battery_cost_usd, 106.0, 0.50)
            && within(m.breakeven_install_cost_usd, 40_625.0, 15.0),
        format!(
            "annual {} kWh, warranty {} yr, lifetime {} kWh, ${:.4}/kWh, daily ${:.2}, breakeven ${:.2}",
            m.annual_discharge_kwh,
            m.warranty_period_years,
            m.lifetime_discharge_kwh,
            m.cost_per_kwh_usd,
            m.daily_battery_cost_usd,
            m.breakeven_install_cost_usd
        ),
    )
}

fn traction() -> Outcome {
    let s = resolve_scenario("la_route_ac_paper").map_err(|e| e.to_string())?.scenario;
    if s.route.paper_compat_mile_factor != Some(1600.0) {
        return Err("bundled literal scenario should use 1600 m per mile".into());
    }
    let t = evaluate(&s.bus, &s.route).map_err(|e| e.to_string())?;
    let f = &t.forces;
    let d = s.route.leg_distance_m();
    let joules = f.total_n * d;
    let unit_ok = (energy_kwh(f.total_n, d) * 3.6e6 - joules).abs() <= 4.0 * f64::EPSILON * joules;
    check(
        (2935.0..=2950.0).contains(&f.rolling_n)
            && (3415.0..=3430.0).contains(&f.climb_n)
            && within(f.efficiency, 0.912673, 1e-6)
            && within(t.gradient_deg, 1.00, 0.05)
            && unit_ok,
        format!(
            "F_2 {:.1} N, F_3 {:.1} N, efficiency {:.6}, gradient {:.4} deg, unit identity {}",
            f.rolling_n,
            f.climb_n,
            f.efficiency,
            t.gradient_deg,
            if unit_ok { "exact" } else { "broken" }
        ),
    )
}

fn literal_problem() -> Result<SchedulingProblem, String> {
    let s = resolve_scenario("la_route_ac_paper").map_err(|e| e.to_string())?.scenario;
    let trip = s.schedule.trip_energy_kwh.ok_or("literal scenario has no configured trip energy")?;
    Ok(s.scheduling_problem(trip))
}

fn infeasibility() -> Outcome {
    let p = literal_problem()?;
    let started = Instant::now();
    let feasible_vectors = count_feasible(&p).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    let outcome = optimize_schedule(&p).map_err(|e| e.to_string())?;
    let ScheduleOutcome::Infeasible(cert) = outcome else {
        return Err("optimizer returned a schedule".into());
    };
    check(
        feasible_vectors == 0 && elapsed <= Duration::from_secs(60),
        format!(
            "T = {}, 0 feasible of 2^{} by enumeration in {:.2?}; certificate: {} trips required, {:?} achievable, {} kWh short",
            p.horizon_intervals, p.horizon_intervals, elapsed, cert.required_trips, cert.max_achievable_trips, cert.energy_shortfall_kwh
        ),
    )
}

fn random_problem(rng: &mut ChaCha8Rng) -> SchedulingProblem {
    let horizon = rng.random_range(0..=16usize);
    // Half the instances use small integers (frequent ties and bound contacts),
    // half use continuous values.
    let integral = rng.random_bool(0.5);
    let mut draw = |lo: f64, hi: f64| {
        let x = rng.random_range(lo..=hi);
        if integral {
            x.round()
        } else {
            x
        }
    };
    let capacity = draw(1.0, 60.0);
    let initial = draw(0.0, capacity).min(capacity);
    let charge = draw(0.0, 30.0);
    let trip = draw(0.0, 25.0);
    let leg = draw(1.0, 5.0);
    let need = rng.random_range(0..=horizon) as f64;
    let cost_per_interval = (0..horizon).map(|_| f64::from(rng.random_range(0..=8u8)) * 0.05).collect();
    SchedulingProblem {
        horizon_intervals: horizon,
        interval_minutes: 30.0,
        initial_battery_kwh: initial,
        battery_capacity_kwh: capacity,
        charge_energy_per_interval_kwh: charge,
        trip_energy_kwh: trip,
        leg_distance_mi: leg,
        min_total_distance_mi: need * leg,
        cost_per_interval,
        objective_energy_coeff_kwh: charge.max(1.0),
    }
}

fn optimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005);
    let started = Instant::now();
    let (mut feasible, mut mismatches) = (0, Vec::new());
    for i in 0..500 {
        let p = random_problem(&mut rng);
        let dp = optimize_schedule(&p).map_err(|e| format!("instance {i}: {e}"))?;
        let bf = brute_force_schedule(&p).map_err(|e| format!("instance {i}: {e}"))?;
        let (a, b) = (dp.feasible().map(|s| s.total_cost_usd), bf.feasible().map(|s| s.total_cost_usd));
        if a != b {
            mismatches.push(format!("instance {i}: dp {a:?} vs brute force {b:?}"));
        }
        feasible += usize::from(dp.is_feasible());
    }
    let elapsed = started.elapsed();
    check(
        mismatches.is_empty() && elapsed <= Duration::from_secs(300),
        format!("500 instances ({feasible} feasible), {} mismatches, {elapsed:.2?} {}", mismatches.len(), mismatches.join("; ")),
    )
}

fn dispatch_conservation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0006);
    let scenario = resolve_scenario("la_route_ac_physics").map_err(|e| e.to_string())?.scenario;
    let rates = &scenario.tariff;
    let mut failures = Vec::new();
    let mut intervals = 0usize;
    for case in 0..200 {
        let step = [5i64, 15, 30, 60][rng.random_range(0..4)];
        let n = rng.random_range(2..=(2 * 1440 / step as usize));
        let start = NaiveDate::from_ymd_opt(2024, rng.random_range(1..=12), rng.random_range(1..=28))
            .unwrap()
            .and_hms_opt(rng.random_range(0..24), 0, 0)
            .unwrap();
        let samples = (0..n)
            .map(|i| DemandSample {
                timestamp: start + TimeDelta::minutes(step * i as i64),
                power_kw: if rng.random_bool(0.4) { 0.0 } else { rng.random_range(0.0..700.0) },
            })
            .collect();
        let profile = DemandProfile::new(samples).map_err(|e| e.to_string())?;
        let capacity = if rng.random_bool(0.1) { 0.0 } else { rng.random_range(0.0..2000.0) };
        let bess = BessSpec {
            capacity_kwh: capacity,
            max_power_kw: rng.random_range(0.0..800.0),
            warranted_throughput_mwh: 600.0,
            round_trip_efficiency: if rng.random_bool(0.5) { 1.0 } else { rng.random_range(0.7..1.0) },
            install_cost_usd: 0.0,
            incentives_usd: 0.0,
        };
        let d = dispatch_from(&profile, &bess, rates, capacity * rng.random_range(0.0..=1.0));
        intervals += d.len();
        for i in 0..d.len() {
            if d.load_kw[i] != d.battery_support_kw[i] + (d.grid_kw[i] - d.bess_recharge_kw[i]) {
                failures.push(format!("case {case} interval {i}: conservation"));
            }
        }
        if d.bess_soc_kwh.iter().any(|&s| !(0.0..=capacity).contains(&s)) {
            failures.push(format!("case {case}: SOC out of bounds"));
        }
        let on_peak_grid: f64 = (0..d.len())
            .filter(|&i| rates.band_at(d.timestamps[i]).label == BandLabel::OnPeak)
            .map(|i| d.grid_kw[i] * d.interval_hours)
            .sum();
        let on_peak_load: f64 = (0..d.len())
            .filter(|&i| rates.band_at(d.timestamps[i]).label == BandLabel::OnPeak)
            .map(|i| d.load_kw[i] * d.interval_hours)
            .sum();
        if on_peak_grid > on_peak_load {
            failures.push(format!("case {case}: on-peak grid {on_peak_grid} > load {on_peak_load}"));
        }
    }
    check(
        failures.is_empty(),
        format!("200 profiles, {intervals} intervals, {} violations {}", failures.len(), failures.join("; ")),
    )
}

fn unimodal(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let peak = rng.random_range(0..n);
    let mut v = vec![0.0; n];
    for i in (0..peak).rev() {
        v[i] = v[i + 1] - rng.random_range(0.01..1.0);
    }
    for i in peak + 1..n {
        v[i] = v[i - 1] - rng.random_range(0.01..1.0);
    }
    v
}

fn irr_and_search() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut problems = Vec::new();

    let zero = irr_solve(&IrrProblem { upfront_usd: 1000.0, incentives_usd: 0.0, annual_cashflows_usd: vec![100.0; 10] });
    let ten = irr_solve(&IrrProblem { upfront_usd: 100.0, incentives_usd: 0.0, annual_cashflows_usd: vec![110.0] });
    match (&zero, &ten) {
        (Ok(z), Ok(t)) if z.abs() <= 1e-9 && (t - 0.10).abs() <= 1e-9 => {}
        _ => problems.push(format!("analytic cases gave {zero:?} and {ten:?}")),
    }

    let mut solved = 0;
    let mut worst = 0.0f64;
    for i in 0..300 {
        let upfront = rng.random_range(1e3..1e7);
        let incentives = upfront * rng.random_range(0.0..0.5);
        let net = upfront - incentives;
        let n = rng.random_range(1..=30);
        let payback = rng.random_range(0.5..5.0);
        let weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
        let total: f64 = weights.iter().sum::<f64>().max(1e-12);
        let p = IrrProblem {
            upfront_usd: upfront,
            incentives_usd: incentives,
            annual_cashflows_usd: weights.iter().map(|w| w / total * net * payback).collect(),
        };
        if let Ok(r) = irr_solve(&p) {
            solved += 1;
            let residual = npv(&p, r).abs() / net;
            worst = worst.max(residual);
            if residual >= 1e-9 {
                problems.push(format!("instance {i}: relative residual {residual:e}"));
            }
        }
    }

    let levels = [10.0, 20.0, 40.0, 80.0, 160.0, 320.0];
    let ratios = [4.0, 2.0, 1.0, 0.5, 0.25, 0.125];
    let mut agree = 0;
    for k in 0..100 {
        let rows = unimodal(&mut rng, 6);
        let cols = unimodal(&mut rng, 6);
        let weight = rng.random_range(0.1..10.0);
        let surface = |i: usize, j: usize| rows[i] + weight * cols[j];
        let found = search_ess_size(&levels, &ratios, |e, p| {
            let i = levels.iter().position(|&x| x == e)?;
            let j = ratios.iter().position(|&r| e * r == p)?;
            Some(surface(i, j))
        });
        let mut best = (0, 0);
        for i in 0..6 {
            for j in 0..6 {
                if surface(i, j) > surface(best.0, best.1) {
                    best = (i, j);
                }
            }
        }
        match found {
            Ok(c) if c.energy_kwh == levels[best.0] && c.power_kw == levels[best.0] * ratios[best.1] => agree += 1,
            other => problems.push(format!("surface {k}: search {other:?}, exhaustive {best:?}")),
        }
    }
    check(
        problems.is_empty(),
        format!(
            "analytic IRR 0 and 0.10 ok, {solved}/300 solved with worst relative residual {worst:.1e}, {agree}/100 surfaces match exhaustive argmax {}",
            problems.join("; ")
        ),
    )
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                let rel = path.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&path).unwrap());
            }
        }
    }
    out
}

fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut details = Vec::new();
    let mut ok = true;
    for (name, expected_code) in [("la_route_ac_paper", 2), ("la_route_ac_physics", 0)] {
        let mut trees = Vec::new();
        for run in 0..2 {
            let out = tmp.path().join(format!("{name}-{run}"));
            let status = Command::new(env!("CARGO_BIN_EXE_ebess"))
                .args(["report", "--scenario", name, "--out"])
                .arg(&out)
                .env_remove("EBESS_SCENARIO_DIR")
                .status()
                .map_err(|e| e.to_string())?;
            ok &= status.code() == Some(expected_code);
            trees.push(tree(&out));
        }
        let same = trees[0] == trees[1] && !trees[0].is_empty();
        ok &= same;
        details.push(format!(
            "{name}: {} files {}",
            trees[0].len(),
            if same { "identical" } else { "DIFFER" }
        ));
    }
    check(ok, details.join(", "))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("billing reproduction", billing),
        ("lifetime chain", lifetime_chain),
        ("traction", traction),
        ("scheduler infeasibility", infeasibility),
        ("scheduler optimality", optimality),
        ("dispatch conservation", dispatch_conservation),
        ("IRR and ESS search", irr_and_search),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
