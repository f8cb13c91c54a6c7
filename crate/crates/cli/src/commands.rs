use std::process::ExitCode;

use casimir_core::acceptance::{
    determinism_criterion, run_acceptance, AcceptanceConfig, CriterionResult,
};
use casimir_core::casimir::{
    free_energy_all_routes, free_energy_antiperiodic, tis_check, FreeEnergyBreakdown, Route, Slab,
    TisRelation,
};
use casimir_core::epstein::{
    epstein2, epstein2_deriv_z, epstein2_direct, functional_equation_residual, EpsteinForm,
};
use casimir_core::error::CasimirError;
use casimir_core::lattice::{SumControl, SumMode};
use casimir_core::oracle::{thermal_oracle, zero_point_ladder, OracleControl};
use casimir_core::par::{self, Execution};
use casimir_core::sweep::{grid, run_sweep, Spacing, SweepSpec, SweepVariable};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::output::{emit, fmt_num, Cell, Document, Format};
use crate::{
    Command, Common, EnergyArgs, EpsteinArgs, RelationArg, RouteArg, SelftestArgs, SpacingArg,
    SweepArgs, TisArgs, VariableArg,
};

const UNITS: &str =
    "natural units (hbar = c = k_B = 1); free energies per unit transverse area, 1/length^3";

const ENERGY_COLUMNS: [&str; 10] = [
    "xi", "a", "beta", "e0", "f1", "f2", "thermal", "total", "route", "est_error",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CasimirError),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot configure thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numerical() => 2,
            _ => 1,
        }
    }
}

pub fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Energy(args) => energy(args),
        Command::Sweep(args) => sweep(args),
        Command::Tis(args) => tis(args),
        Command::Epstein(args) => epstein(args),
        Command::Selftest(args) => selftest(args),
    }
}

fn setup(common: &Common) -> Result<SumControl, CliError> {
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CasimirError::InvalidInput {
                field: "threads",
                detail: "must be at least 1".into(),
            }
            .into());
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Threads(e.to_string()))?;
    }
    Ok(SumControl::new(common.tol, common.max_terms, SumMode::Accelerated)?)
}

fn common_meta(doc: &mut Document, ctl: &SumControl) {
    doc.meta("tol", Cell::Num(ctl.rel_tol));
    doc.meta("max_terms", Cell::Int(ctl.max_terms));
}

fn finish(doc: &Document, common: &Common) -> Result<(), CliError> {
    emit(&doc.render(common.format), common.output.as_deref())?;
    Ok(())
}

fn energy_row(r: &FreeEnergyBreakdown) -> Vec<Cell> {
    vec![
        Cell::Num(r.slab.xi()),
        Cell::Num(r.slab.a),
        Cell::Num(r.slab.beta),
        Cell::Num(r.e0),
        Cell::Num(r.f1),
        Cell::Num(r.f2),
        Cell::Num(r.thermal),
        Cell::Num(r.total),
        Cell::text(r.route.as_str()),
        Cell::Num(r.est_error),
    ]
}

fn failed_row(slab: &Slab) -> Vec<Cell> {
    let mut row = vec![Cell::Num(slab.xi()), Cell::Num(slab.a), Cell::Num(slab.beta)];
    row.extend(std::iter::repeat_n(Cell::Empty, 5));
    row.push(Cell::text("FAILED"));
    row.push(Cell::Empty);
    row
}

fn single_route(route: RouteArg) -> Option<Route> {
    match route {
        RouteArg::Decomposition => Some(Route::Decomposition),
        RouteArg::FSeries => Some(Route::FSeries),
        RouteArg::Zeta => Some(Route::Zeta),
        RouteArg::All => None,
    }
}

fn energy(args: EnergyArgs) -> Result<ExitCode, CliError> {
    let ctl = setup(&args.common)?;
    let slab = match (args.beta, args.xi) {
        (Some(beta), _) => Slab::new(args.a, beta)?,
        (None, Some(xi)) => Slab::from_xi(args.a, xi)?,
        (None, None) => unreachable!("clap requires one of --beta/--xi"),
    };
    let rows = match single_route(args.route) {
        Some(route) => vec![free_energy_antiperiodic(&slab, route, &ctl)?],
        None => free_energy_all_routes(&slab, &ctl)?,
    };

    let mut doc = Document::new("casimir energy", ENERGY_COLUMNS.to_vec());
    doc.meta("units", Cell::text(UNITS));
    common_meta(&mut doc, &ctl);
    doc.rows = rows.iter().map(energy_row).collect();
    if args.verify {
        let oc = OracleControl::default();
        let thermal = thermal_oracle(&slab, &oc)?;
        let zp = zero_point_ladder(slab.a, &oc)?;
        let rel = |x: f64, y: f64| (x - y).abs() / x.abs().max(y.abs()).max(f64::MIN_POSITIVE);
        doc.summary("verify_thermal_oracle", Cell::Num(thermal));
        doc.summary("verify_thermal_rel_diff", Cell::Num(rel(thermal, rows[0].thermal)));
        doc.summary("verify_zero_point_oracle", Cell::Num(zp.value));
        doc.summary("verify_zero_point_rel_diff", Cell::Num(rel(zp.value, rows[0].e0)));
        doc.summary("verify_zero_point_order", Cell::Num(zp.order));
    }
    finish(&doc, &args.common)?;
    Ok(ExitCode::SUCCESS)
}

fn sweep(args: SweepArgs) -> Result<ExitCode, CliError> {
    let ctl = setup(&args.common)?;
    let route = single_route(args.route).ok_or(CasimirError::InvalidInput {
        field: "route",
        detail: "a sweep takes a single route".into(),
    })?;
    let spec = SweepSpec {
        variable: match args.variable {
            VariableArg::Xi => SweepVariable::Xi,
            VariableArg::Beta => SweepVariable::Beta,
            VariableArg::T => SweepVariable::T,
        },
        from: args.from,
        to: args.to,
        points: args.points,
        spacing: match args.spacing {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        },
        a: args.a,
    };
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let outcome = run_sweep(&spec, route, &ctl, exec)?;

    let mut doc = Document::new("casimir sweep", ENERGY_COLUMNS.to_vec());
    doc.meta("units", Cell::text(UNITS));
    doc.meta("variable", Cell::text(spec.variable.as_str()));
    doc.meta("from", Cell::Num(spec.from));
    doc.meta("to", Cell::Num(spec.to));
    doc.meta("points", Cell::Int(spec.points as u64));
    doc.meta("spacing", Cell::text(spec.spacing.as_str()));
    doc.meta("a", Cell::Num(spec.a));
    doc.meta("route", Cell::text(route.as_str()));
    common_meta(&mut doc, &ctl);
    doc.rows = outcome.rows.iter().map(energy_row).collect();
    let code = match &outcome.failure {
        None => ExitCode::SUCCESS,
        Some(f) => {
            doc.rows.push(failed_row(&f.slab));
            doc.error = Some(f.error.to_string());
            ExitCode::from(if f.error.is_numerical() { 2 } else { 1 })
        }
    };
    finish(&doc, &args.common)?;
    if let Some(f) = &outcome.failure {
        eprintln!("error: {}", f.error);
    }
    Ok(code)
}

fn tis(args: TisArgs) -> Result<ExitCode, CliError> {
    let ctl = setup(&args.common)?;
    let relation = match args.relation {
        RelationArg::F1 => TisRelation::F1Relation,
        RelationArg::F2Corrected => TisRelation::F2Corrected,
        RelationArg::F2AsPrinted => TisRelation::F2AsPrinted,
        RelationArg::G => TisRelation::GReflection,
    };
    let spec = SweepSpec {
        variable: SweepVariable::Xi,
        from: args.from,
        to: args.to,
        points: args.points,
        spacing: Spacing::Log,
        a: 1.0,
    };
    spec.validate()?;
    let mut xis = grid(args.from, args.to, args.points, Spacing::Log);
    let fp = relation.fixed_point();
    if fp > args.from && fp < args.to && !xis.contains(&fp) {
        xis.push(fp);
        xis.sort_by(f64::total_cmp);
    }
    let reports = par::map_ordered(Execution::Parallel, &xis, |&xi| tis_check(relation, xi, &ctl));

    let mut doc = Document::new(
        "casimir tis",
        vec!["relation", "xi", "lhs", "rhs", "abs_residual", "rel_residual", "fixed_point"],
    );
    doc.meta("units", Cell::text("dimensionless profiles a*F1, a*F2 at a = 1 (g: pure number)"));
    doc.meta("relation", Cell::text(relation.as_str()));
    common_meta(&mut doc, &ctl);
    let mut max_rel: f64 = 0.0;
    let mut failure = None;
    for r in reports {
        match r {
            Ok(rep) => {
                max_rel = max_rel.max(rep.rel_residual);
                doc.rows.push(vec![
                    Cell::text(relation.as_str()),
                    Cell::Num(rep.xi),
                    Cell::Num(rep.lhs),
                    Cell::Num(rep.rhs),
                    Cell::Num(rep.abs_residual),
                    Cell::Num(rep.rel_residual),
                    Cell::Bool(rep.fixed_point),
                ]);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    let code = match &failure {
        None => {
            doc.summary("max_rel_residual", Cell::Num(max_rel));
            ExitCode::SUCCESS
        }
        Some(e) => {
            doc.error = Some(e.to_string());
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    };
    finish(&doc, &args.common)?;
    if let Some(e) = failure {
        eprintln!("error: {e}");
    }
    Ok(code)
}

fn epstein(args: EpsteinArgs) -> Result<ExitCode, CliError> {
    let ctl = setup(&args.common)?;
    let form = EpsteinForm::new(args.z, args.a1, args.a2)?;
    let value = epstein2(form)?;
    let pole_to_empty = |r: Result<f64, CasimirError>| match r {
        Ok(v) => Ok(Cell::Num(v)),
        Err(CasimirError::Pole { .. }) => Ok(Cell::Empty),
        Err(e) => Err(e),
    };
    let derivative = pole_to_empty(epstein2_deriv_z(form))?;
    let residual = pole_to_empty(functional_equation_residual(form))?;
    let (direct, direct_err) = if args.direct {
        let d = epstein2_direct(form, &ctl)?;
        (Cell::Num(d.value), Cell::Num(d.est_error))
    } else {
        (Cell::Empty, Cell::Empty)
    };
    let mut doc = Document::new(
        "casimir epstein",
        vec!["z", "a1", "a2", "value", "derivative", "fe_residual", "direct", "direct_est_error"],
    );
    common_meta(&mut doc, &ctl);
    doc.rows.push(vec![
        Cell::Num(form.z),
        Cell::Num(form.a1),
        Cell::Num(form.a2),
        Cell::Num(value),
        derivative,
        residual,
        direct,
        direct_err,
    ]);
    finish(&doc, &args.common)?;
    Ok(ExitCode::SUCCESS)
}

fn criterion_json(c: &CriterionResult) -> Value {
    let mut m = Map::new();
    m.insert("id".into(), Value::from(c.id));
    m.insert("title".into(), Value::from(c.title));
    m.insert("passed".into(), Value::from(c.passed));
    m.insert(
        "details".into(),
        Value::Array(c.details.iter().map(|d| Value::from(d.as_str())).collect()),
    );
    Value::Object(m)
}

fn selftest(args: SelftestArgs) -> Result<ExitCode, CliError> {
    let ctl = setup(&args.common)?;
    let cfg = AcceptanceConfig {
        ctl,
        exec: Execution::Parallel,
    };
    let first = run_acceptance(&cfg);
    let second = run_acceptance(&cfg);
    let mut criteria = first.criteria.clone();
    criteria.push(determinism_criterion(&first, &second));
    let passed = criteria.iter().filter(|c| c.passed).count();
    let all = passed == criteria.len();

    let text = match args.common.format {
        Format::Csv => {
            let mut out = String::from("# casimir selftest\n");
            out.push_str(&format!("# tol: {}\n# max_terms: {}\n", fmt_num(ctl.rel_tol), ctl.max_terms));
            for c in &criteria {
                out.push_str(&c.headline());
                out.push('\n');
                for d in &c.details {
                    out.push_str("    ");
                    out.push_str(d);
                    out.push('\n');
                }
            }
            let verdict = if all { "PASS" } else { "FAIL" };
            out.push_str(&format!("{verdict}: {passed}/{} criteria passed\n", criteria.len()));
            out
        }
        Format::Json => {
            let mut doc = Map::new();
            doc.insert("tol".into(), Value::from(ctl.rel_tol));
            doc.insert("max_terms".into(), Value::from(ctl.max_terms));
            doc.insert("criteria".into(), Value::Array(criteria.iter().map(criterion_json).collect()));
            doc.insert("status".into(), Value::from(if all { "ok" } else { "failed" }));
            let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("JSON serialization");
            s.push('\n');
            s
        }
    };
    emit(&text, args.common.output.as_deref())?;
    for c in &criteria {
        eprintln!(
            "[{}] {:.3} s (budget {} s)",
            c.id,
            c.elapsed.as_secs_f64(),
            c.budget.as_secs()
        );
    }
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(2) })
}
