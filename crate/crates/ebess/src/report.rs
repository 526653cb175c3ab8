//! The end-to-end planning pipeline and its serializable report.

use std::path::{Path, PathBuf};

use chrono::{NaiveDateTime, NaiveTime, TimeDelta, Timelike};
use ebess_core::dispatch::{dispatch, DispatchSummary};
use ebess_core::economics::EssChoice;
use ebess_core::scheduler::ScheduleError;
use ebess_core::traction::{self, TractionError, TractionSummary};
use ebess_core::units::DAYS_PER_YEAR;
use ebess_core::{
    battery_lifetime_metrics, bill_buckets, bill_events, irr_solve, optimize_ess_size, optimize_schedule, size_bess,
    BessSizing, BessSpec, ChargeEvent, ChargingSession, DemandProfile, DispatchSeries, IrrError, IrrProblem,
    LifetimeMetrics, ModelError, Scenario, ScheduleOutcome, SchedulingProblem, TouRateSchedule,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::demand::{read_demand_csv, DemandCsvError};

#[derive(Debug, Clone, Default)]
pub struct PlanOptions {
    pub paper_compat: bool,
    pub safety_factor: Option<f64>,
    /// Overrides the scenario's demand profile.
    pub demand_csv: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("traction model: {0}")]
    Traction(#[from] TractionError),
    #[error("scheduler: {0}")]
    Schedule(#[from] ScheduleError),
    #[error("demand profile: {0}")]
    Demand(#[from] DemandCsvError),
}

impl PipelineError {
    pub fn is_io(&self) -> bool {
        matches!(self, PipelineError::Demand(DemandCsvError::Io { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripEnergySource {
    Configured,
    TractionModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BillingMethod {
    Buckets,
    Sessions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Billing {
    pub method: BillingMethod,
    pub daily_energy_kwh: f64,
    pub daily_bill_usd: f64,
    pub monthly_bill_usd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum IrrOutcome {
    Solved { rate: f64 },
    NoRoot,
    NotConverged { rate: f64, residual: f64 },
    Invalid { reason: String },
}

impl From<Result<f64, IrrError>> for IrrOutcome {
    fn from(r: Result<f64, IrrError>) -> Self {
        match r {
            Ok(rate) => IrrOutcome::Solved { rate },
            Err(IrrError::NoRoot) => IrrOutcome::NoRoot,
            Err(IrrError::NotConverged { rate, residual }) => IrrOutcome::NotConverged { rate, residual },
            Err(IrrError::Invalid(reason)) => IrrOutcome::Invalid { reason: reason.to_string() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EssSearchOutcome {
    Found(EssChoice),
    Failed { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoiBreakeven {
    /// Net install cost over annual savings; absent when nothing is saved.
    pub payback_years: Option<f64>,
    pub breakeven_install_cost_usd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostBenefit {
    pub net_install_cost_usd: f64,
    pub savings_over_warranty_usd: f64,
    pub net_benefit_usd: f64,
    pub battery_energy_cost_usd_per_kwh: f64,
}

/// The six planning questions, answered from the module outputs above them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answers {
    /// Charging energy of sessions starting between 08:00 and 22:00.
    pub energy_used_8am_10pm_kwh: f64,
    pub batteries_required: u64,
    pub monthly_savings_usd: f64,
    pub warranty_lifecycle_years: f64,
    pub roi_breakeven: RoiBreakeven,
    pub lifetime_cost_benefit: CostBenefit,
}

impl Answers {
    pub const LABELS: [&'static str; 6] = [
        "energy used 8am-10pm",
        "batteries required",
        "monthly savings",
        "warranty lifecycle",
        "ROI breakeven",
        "lifetime cost/benefit",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanningReport {
    pub scenario: String,
    pub paper_compat: bool,
    pub traction: TractionSummary,
    pub trip_energy_kwh: f64,
    pub trip_energy_source: TripEnergySource,
    pub schedule: ScheduleOutcome,
    pub bess_sizing: BessSizing,
    pub bess: BessSpec,
    pub dispatch: DispatchSummary,
    pub billing: Billing,
    pub lifetime: LifetimeMetrics,
    pub annual_savings_usd: f64,
    pub irr: IrrOutcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ess_search: Option<EssSearchOutcome>,
    pub answers: Answers,
}

/// A report together with the series it summarises.
#[derive(Debug, Clone)]
pub struct Plan {
    pub report: PlanningReport,
    pub problem: SchedulingProblem,
    pub schedule_start: NaiveDateTime,
    pub dispatch: DispatchSeries,
}

impl Plan {
    pub fn is_feasible(&self) -> bool {
        self.report.schedule.is_feasible()
    }
}

/// One day of load, from midnight of the schedule's first day. The previous
/// day's sessions are included so overnight charging wraps into the morning.
fn synthesize_demand(scenario: &Scenario) -> Result<DemandProfile, ModelError> {
    let resolution = scenario.demand.resolution_minutes;
    if 1440 % resolution != 0 {
        return Err(ModelError::invalid("demand.resolution_minutes", "must divide 1440"));
    }
    let day_start = scenario.schedule.start.date().and_time(NaiveTime::MIN);
    let sessions: Vec<ChargingSession> = scenario
        .sessions
        .iter()
        .flat_map(|s| [s.clone(), ChargingSession { start: s.start - TimeDelta::days(1), ..s.clone() }])
        .collect();
    DemandProfile::from_sessions(&sessions, day_start, resolution, (1440 / resolution) as usize)
}

fn load_demand(scenario: &Scenario, base_dir: Option<&Path>, options: &PlanOptions) -> Result<DemandProfile, PipelineError> {
    let configured = scenario.demand.profile.as_ref().map(|p| match base_dir {
        Some(dir) => dir.join(p),
        None => PathBuf::from(p),
    });
    match options.demand_csv.clone().or(configured) {
        Some(path) => Ok(read_demand_csv(&path)?),
        None => Ok(synthesize_demand(scenario)?),
    }
}

fn daily_savings(summary: &DispatchSummary) -> f64 {
    if summary.duration_h > 0.0 {
        summary.savings_usd / (summary.duration_h / 24.0)
    } else {
        0.0
    }
}

fn ess_search(scenario: &Scenario, demand: &DemandProfile, rates: &TouRateSchedule) -> Option<EssSearchOutcome> {
    let search = scenario.ess_search.as_ref()?;
    let e = &scenario.economics;
    let outcome = optimize_ess_size(&search.energy_levels_kwh, &search.power_ratios, |energy, power| {
        let mut spec = scenario.bess.spec(energy, power);
        spec.install_cost_usd = energy * search.energy_cost_usd_per_kwh + power * search.power_cost_usd_per_kw;
        let savings = daily_savings(&dispatch(demand, &spec, rates).summarize(rates)) * DAYS_PER_YEAR;
        IrrProblem {
            upfront_usd: spec.install_cost_usd,
            incentives_usd: spec.incentives_usd,
            annual_cashflows_usd: vec![savings + e.annual_net_income_usd; e.horizon_years as usize],
        }
    });
    Some(match outcome {
        Ok(choice) => EssSearchOutcome::Found(choice),
        Err(err) => EssSearchOutcome::Failed { reason: err.to_string() },
    })
}

/// Runs every stage. An infeasible schedule does not stop the later stages.
pub fn plan(scenario: &Scenario, base_dir: Option<&Path>, options: &PlanOptions) -> Result<Plan, PipelineError> {
    let mut scenario = scenario.clone();
    if options.paper_compat {
        scenario.enable_paper_compat();
    }
    if let Some(f) = options.safety_factor {
        scenario.bess.safety_factor = f;
    }
    scenario.validate()?;
    let rates = &scenario.tariff;
    let econ = &scenario.economics;

    let traction = traction::evaluate(&scenario.bus, &scenario.route)?;
    let (trip_energy_kwh, trip_energy_source) = match scenario.schedule.trip_energy_kwh {
        Some(e) => (e, TripEnergySource::Configured),
        None => (traction.energy.total_kwh, TripEnergySource::TractionModel),
    };
    let problem = scenario.scheduling_problem(trip_energy_kwh);
    let schedule = optimize_schedule(&problem)?;

    let events: Vec<ChargeEvent> = scenario.sessions.iter().map(ChargeEvent::from).collect();
    let bess_sizing = size_bess(&events, rates, econ.session_boundary, scenario.bess.safety_factor)?;
    let bess = scenario.bess.spec(
        scenario.bess.capacity_kwh.unwrap_or(bess_sizing.capacity_kwh),
        scenario.bess.max_power_kw.unwrap_or(bess_sizing.max_power_kw),
    );
    bess.validate()?;

    let demand = load_demand(&scenario, base_dir, options)?;
    let series = dispatch(&demand, &bess, rates);
    let dispatch_summary = series.summarize(rates);

    let (method, daily_energy_kwh, daily_bill_usd) = if econ.billing_buckets.is_empty() {
        let energy = events.iter().map(|e| e.energy_kwh).sum();
        (BillingMethod::Sessions, energy, bill_events(&events, rates, econ.session_boundary))
    } else {
        let energy = econ.billing_buckets.iter().map(|b| b.energy_kwh).sum();
        (BillingMethod::Buckets, energy, bill_buckets(&econ.billing_buckets, rates))
    };
    let billed_daily = if econ.paper_compat_rounding { daily_bill_usd.round() } else { daily_bill_usd };
    let billing = Billing {
        method,
        daily_energy_kwh,
        daily_bill_usd,
        monthly_bill_usd: billed_daily * econ.days_per_month,
    };

    let daily_discharge = econ.daily_discharge_kwh.unwrap_or(daily_energy_kwh);
    let lifetime = battery_lifetime_metrics(daily_discharge, daily_bill_usd, &bess, econ.paper_compat_rounding)?;

    let daily_savings_usd = daily_savings(&dispatch_summary);
    let annual_savings_usd = daily_savings_usd * DAYS_PER_YEAR;
    let irr = IrrOutcome::from(irr_solve(&IrrProblem {
        upfront_usd: bess.install_cost_usd,
        incentives_usd: bess.incentives_usd,
        annual_cashflows_usd: vec![annual_savings_usd + econ.annual_net_income_usd; econ.horizon_years as usize],
    }));
    let ess_search = ess_search(&scenario, &demand, rates);

    let service_hours = |s: &&ChargingSession| (8..22).contains(&s.start.hour());
    let net_install = bess.install_cost_usd - bess.incentives_usd;
    let savings_over_warranty = annual_savings_usd * lifetime.warranty_period_years;
    let answers = Answers {
        energy_used_8am_10pm_kwh: scenario.sessions.iter().filter(service_hours).map(|s| s.energy_kwh).sum(),
        batteries_required: (bess.capacity_kwh / scenario.bess.module_capacity_kwh).ceil() as u64,
        monthly_savings_usd: daily_savings_usd * econ.days_per_month,
        warranty_lifecycle_years: lifetime.warranty_period_years,
        roi_breakeven: RoiBreakeven {
            payback_years: (annual_savings_usd > 0.0).then(|| net_install / annual_savings_usd),
            breakeven_install_cost_usd: lifetime.breakeven_install_cost_usd,
        },
        lifetime_cost_benefit: CostBenefit {
            net_install_cost_usd: net_install,
            savings_over_warranty_usd: savings_over_warranty,
            net_benefit_usd: savings_over_warranty - net_install,
            battery_energy_cost_usd_per_kwh: lifetime.cost_per_kwh_usd,
        },
    };

    let report = PlanningReport {
        scenario: scenario.name.clone(),
        paper_compat: options.paper_compat || econ.paper_compat_rounding,
        traction,
        trip_energy_kwh,
        trip_energy_source,
        schedule,
        bess_sizing,
        bess,
        dispatch: dispatch_summary,
        billing,
        lifetime,
        annual_savings_usd,
        irr,
        ess_search,
        answers,
    };
    Ok(Plan { report, problem, schedule_start: scenario.schedule.start, dispatch: series })
}
