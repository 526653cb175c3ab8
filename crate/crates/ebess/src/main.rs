use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ebess::output::{ensure_dir, write_dispatch_file, write_report_json, write_schedule_file, OutputError};
use ebess::report::{EssSearchOutcome, IrrOutcome};
use ebess::scenario::ScenarioError;
use ebess::{plan, resolve_scenario, write_outputs, Answers, Plan, PlanOptions};
use ebess_core::ScheduleOutcome;

const EXIT_INVALID: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "ebess", version, about = "E-bus charging schedules, BESS sizing and techno-economics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Grade, tractive forces and per-leg energy
    Traction(Common),
    /// Cheapest feasible charge/drive schedule, or an infeasibility certificate
    Schedule(Common),
    /// BESS capacity and power from on-peak charging
    SizeBess(Common),
    /// Greedy peak-shaving dispatch over the demand profile
    Dispatch(Common),
    /// Bills, battery lifetime, IRR and the ESS size search
    Economics(Common),
    /// Everything, written to the output directory
    Report(Common),
}

#[derive(Args, Clone)]
struct Common {
    /// Scenario file or bundled scenario name; repeat for several
    #[arg(long, required = true, value_name = "PATH|NAME")]
    scenario: Vec<String>,
    /// Output directory (`report` defaults to ./out)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// 1.6 km per mile, objective coefficient 200 and rounded lifetime arithmetic
    #[arg(long)]
    paper_compat: bool,
    /// Multiplier on on-peak charging energy when sizing the BESS
    #[arg(long, value_name = "F")]
    safety_factor: Option<f64>,
    /// Demand profile CSV (`timestamp,power_kw`) overriding the scenario's
    #[arg(long, value_name = "CSV")]
    demand: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<ScenarioError> for Failure {
    fn from(e: ScenarioError) -> Self {
        let code = if matches!(e, ScenarioError::Io { .. }) { EXIT_IO } else { EXIT_INVALID };
        Failure { code, message: e.to_string() }
    }
}

impl From<OutputError> for Failure {
    fn from(e: OutputError) -> Self {
        Failure { code: EXIT_IO, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (kind, common) = match &cli.command {
        Command::Traction(c) => ("traction", c),
        Command::Schedule(c) => ("schedule", c),
        Command::SizeBess(c) => ("size-bess", c),
        Command::Dispatch(c) => ("dispatch", c),
        Command::Economics(c) => ("economics", c),
        Command::Report(c) => ("report", c),
    };
    let mut worst = 0u8;
    for arg in &common.scenario {
        let code = match run_one(kind, common, arg) {
            Ok(code) => code,
            Err(f) => {
                eprintln!("error: {}", f.message);
                f.code
            }
        };
        worst = worst.max(code);
    }
    ExitCode::from(worst)
}

fn run_one(kind: &str, common: &Common, arg: &str) -> Result<u8, Failure> {
    let loaded = resolve_scenario(arg)?;
    let options = PlanOptions {
        paper_compat: common.paper_compat,
        safety_factor: common.safety_factor,
        demand_csv: common.demand.clone(),
    };
    let plan = plan(&loaded.scenario, loaded.base_dir.as_deref(), &options).map_err(|e| Failure {
        code: if e.is_io() { EXIT_IO } else { EXIT_INVALID },
        message: format!("{}: {e}", loaded.scenario.name),
    })?;

    let out = match (&common.out, kind) {
        (Some(dir), _) => Some(dir.clone()),
        (None, "report") => Some(PathBuf::from("out")),
        (None, _) => None,
    };
    let out = out.map(|dir| if common.scenario.len() > 1 { dir.join(&plan.report.scenario) } else { dir });

    let text = match kind {
        "traction" => traction_text(&plan),
        "schedule" => schedule_text(&plan),
        "size-bess" => sizing_text(&plan),
        "dispatch" => dispatch_text(&plan),
        "economics" => economics_text(&plan),
        _ => format!("{}{}", schedule_text(&plan), answers_text(&plan)),
    };
    print!("{text}");

    if let Some(dir) = out {
        for path in write_for(kind, &dir, &plan)? {
            println!("wrote {}", path.display());
        }
    }
    let infeasible = !plan.is_feasible() && matches!(kind, "schedule" | "report");
    Ok(if infeasible { EXIT_INFEASIBLE } else { 0 })
}

fn write_for(kind: &str, dir: &Path, plan: &Plan) -> Result<Vec<PathBuf>, OutputError> {
    ensure_dir(dir)?;
    Ok(match kind {
        "report" => write_outputs(dir, plan)?,
        "schedule" => {
            let mut v = vec![write_report_json(dir, plan)?];
            v.extend(write_schedule_file(dir, plan)?);
            v
        }
        "dispatch" => vec![write_report_json(dir, plan)?, write_dispatch_file(dir, plan)?],
        _ => vec![write_report_json(dir, plan)?],
    })
}

fn traction_text(plan: &Plan) -> String {
    let t = &plan.report.traction;
    let f = &t.forces;
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", plan.report.scenario);
    let _ = writeln!(s, "gradient: {:.4} deg", t.gradient_deg);
    let _ = writeln!(s, "F_1 air drag: {:.1} N", f.air_drag_n);
    let _ = writeln!(s, "F_2 rolling: {:.1} N", f.rolling_n);
    let _ = writeln!(s, "F_3 climb: {:.1} N", f.climb_n);
    let _ = writeln!(s, "F_net: {:.1} N", f.net_n);
    let _ = writeln!(s, "efficiency: {:.6}", f.efficiency);
    let _ = writeln!(s, "F_total: {:.1} N", f.total_n);
    let _ = writeln!(
        s,
        "trip energy: {:.2} kWh ({:.2} traction + {:.2} auxiliary over {:.3} h)",
        t.energy.total_kwh, t.energy.traction_kwh, t.energy.aux_kwh, t.energy.trip_duration_h
    );
    s
}

fn schedule_text(plan: &Plan) -> String {
    let r = &plan.report;
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", r.scenario);
    let _ = writeln!(s, "trip energy: {:.2} kWh ({:?})", r.trip_energy_kwh, r.trip_energy_source);
    match &r.schedule {
        ScheduleOutcome::Feasible(sched) => {
            let charging: Vec<String> =
                sched.decisions.iter().enumerate().filter(|(_, &d)| d).map(|(t, _)| t.to_string()).collect();
            let _ = writeln!(s, "schedule: feasible, cost ${:.2}", sched.total_cost_usd);
            let _ = writeln!(s, "charging intervals: [{}]", charging.join(", "));
            let _ = writeln!(s, "trips: {}", sched.trips_completed);
        }
        ScheduleOutcome::Infeasible(cert) => {
            let _ = writeln!(s, "schedule: infeasible");
            let _ = writeln!(s, "required trips: {}", cert.required_trips);
            match cert.max_achievable_trips {
                Some(m) => {
                    let _ = writeln!(s, "max achievable trips: {m}");
                }
                None => {
                    let _ = writeln!(s, "max achievable trips: none (battery bounds unsatisfiable)");
                }
            }
            let _ = writeln!(s, "energy shortfall: {:.2} kWh", cert.energy_shortfall_kwh);
        }
    }
    s
}

fn sizing_text(plan: &Plan) -> String {
    let r = &plan.report;
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", r.scenario);
    let _ = writeln!(s, "on-peak charging energy: {} kWh", r.bess_sizing.on_peak_energy_kwh);
    let _ = writeln!(s, "BESS capacity: {} kWh", r.bess.capacity_kwh);
    let _ = writeln!(s, "BESS power: {} kW", r.bess.max_power_kw);
    let _ = writeln!(s, "modules: {}", r.answers.batteries_required);
    s
}

fn dispatch_text(plan: &Plan) -> String {
    let d = &plan.report.dispatch;
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", plan.report.scenario);
    let _ = writeln!(s, "intervals: {} x {} h", plan.dispatch.len(), plan.dispatch.interval_hours);
    let _ = writeln!(s, "load: {:.2} kWh ({:.2} on-peak)", d.load_kwh, d.on_peak_load_kwh);
    let _ = writeln!(s, "battery support: {:.2} kWh", d.support_kwh);
    let _ = writeln!(s, "battery recharge: {:.2} kWh", d.recharge_kwh);
    let _ = writeln!(s, "on-peak grid energy: {:.2} kWh", d.on_peak_grid_kwh);
    let _ = writeln!(s, "cost without / with BESS: ${:.2} / ${:.2}", d.cost_without_bess_usd, d.cost_with_bess_usd);
    s
}

fn economics_text(plan: &Plan) -> String {
    let r = &plan.report;
    let l = &r.lifetime;
    let mut s = String::new();
    let _ = writeln!(s, "scenario: {}", r.scenario);
    let _ = writeln!(s, "daily bill: ${:.2} ({:?}, {} kWh)", r.billing.daily_bill_usd, r.billing.method, r.billing.daily_energy_kwh);
    let _ = writeln!(s, "monthly bill: ${:.2}", r.billing.monthly_bill_usd);
    let _ = writeln!(s, "annual discharge: {} kWh", l.annual_discharge_kwh);
    let _ = writeln!(s, "warranty period: {:.4} years", l.warranty_period_years);
    let _ = writeln!(s, "lifetime discharge: {:.1} kWh", l.lifetime_discharge_kwh);
    let _ = writeln!(s, "cost per kWh: ${:.4}", l.cost_per_kwh_usd);
    let _ = writeln!(s, "daily battery cost: ${:.2}", l.daily_battery_cost_usd);
    let _ = writeln!(s, "breakeven install cost: ${:.2}", l.breakeven_install_cost_usd);
    let _ = writeln!(s, "annual savings: ${:.2}", r.annual_savings_usd);
    let _ = writeln!(s, "IRR: {}", irr_text(&r.irr));
    if let Some(search) = &r.ess_search {
        let _ = match search {
            EssSearchOutcome::Found(c) => {
                writeln!(s, "best ESS: {} kWh / {} kW, IRR {:.4}", c.energy_kwh, c.power_kw, c.irr)
            }
            EssSearchOutcome::Failed { reason } => writeln!(s, "best ESS: {reason}"),
        };
    }
    s
}

fn irr_text(irr: &IrrOutcome) -> String {
    match irr {
        IrrOutcome::Solved { rate } => format!("{:.4}", rate),
        IrrOutcome::NoRoot => "no root".to_string(),
        IrrOutcome::NotConverged { rate, residual } => format!("not converged (r = {rate}, residual {residual})"),
        IrrOutcome::Invalid { reason } => format!("invalid ({reason})"),
    }
}

fn answers_text(plan: &Plan) -> String {
    let a = &plan.report.answers;
    let payback = a
        .roi_breakeven
        .payback_years
        .map_or("never".to_string(), |y| format!("{y:.1} years"));
    let values = [
        format!("{} kWh", a.energy_used_8am_10pm_kwh),
        a.batteries_required.to_string(),
        format!("${:.2}", a.monthly_savings_usd),
        format!("{:.2} years", a.warranty_lifecycle_years),
        format!("payback {payback}, breakeven install ${:.0}", a.roi_breakeven.breakeven_install_cost_usd),
        format!(
            "net ${:.0} (savings ${:.0} over warranty vs ${:.0} installed)",
            a.lifetime_cost_benefit.net_benefit_usd,
            a.lifetime_cost_benefit.savings_over_warranty_usd,
            a.lifetime_cost_benefit.net_install_cost_usd
        ),
    ];
    let mut s = String::new();
    for (label, value) in Answers::LABELS.iter().zip(values) {
        let _ = writeln!(s, "{label}: {value}");
    }
    s
}
