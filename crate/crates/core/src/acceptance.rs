//! The acceptance suite: each criterion evaluates its checks, renders a
//! deterministic report block, and records its wall-clock time separately.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};

use crate::casimir::{
    free_energy_antiperiodic, free_energy_periodic, high_temperature_expansion, thermal_part,
    tis_check, zero_point_antiperiodic, zero_point_single_pi, Route, Slab, TisRelation,
};
use crate::epstein::{epstein2, epstein2_direct, functional_equation_residual, EpsteinForm};
use crate::error::Result;
use crate::lattice::SumControl;
use crate::oracle::{thermal_oracle, zero_point_ladder, OracleControl};
use crate::par::{self, Execution};
use crate::specfun::ZETA3;
use crate::sweep::{grid, Spacing};

/// Settings shared by all criteria.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcceptanceConfig {
    pub ctl: SumControl,
    pub exec: Execution,
}

impl Default for AcceptanceConfig {
    fn default() -> Self {
        AcceptanceConfig {
            ctl: SumControl::default(),
            exec: Execution::Parallel,
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub title: &'static str,
    pub passed: bool,
    /// Evidence lines; deterministic for a given configuration.
    pub details: Vec<String>,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    /// One-line summary, e.g. `PASS [3] oracle agreement`.
    pub fn headline(&self) -> String {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        format!("{tag} [{}] {}", self.id, self.title)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
}

impl AcceptanceReport {
    pub fn all_passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    pub fn elapsed(&self) -> Duration {
        self.criteria.iter().map(|c| c.elapsed).sum()
    }

    /// Report text without timings, byte-identical across runs.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let _ = writeln!(out, "{}", c.headline());
            for d in &c.details {
                let _ = writeln!(out, "    {d}");
            }
        }
        out
    }
}

/// Collects checks for one criterion.
struct Checks {
    passed: bool,
    details: Vec<String>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            passed: true,
            details: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: String) {
        let tag = if ok { "ok  " } else { "FAIL" };
        self.passed &= ok;
        self.details.push(format!("{tag} {line}"));
    }

    fn note(&mut self, line: String) {
        self.details.push(format!("     {line}"));
    }

    fn error(&mut self, context: &str, e: impl std::fmt::Display) {
        self.passed = false;
        self.details.push(format!("FAIL {context}: {e}"));
    }

    fn run(&mut self, context: &str, f: impl FnOnce(&mut Self) -> Result<()>) {
        if let Err(e) = f(self) {
            self.error(context, e);
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

fn timed(
    id: u32,
    title: &'static str,
    budget_secs: u64,
    body: impl FnOnce(&mut Checks),
) -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::new();
    body(&mut checks);
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget_secs);
    if elapsed > budget {
        checks.passed = false;
        checks
            .details
            .push(format!("FAIL runtime exceeded the {budget_secs} s budget"));
    }
    CriterionResult {
        id,
        title,
        passed: checks.passed,
        details: checks.details,
        elapsed,
        budget,
    }
}

/// Runs criteria 1 through 7. Criterion 8 (whole-suite runtime and
/// determinism) is judged by the caller, which runs the suite twice.
pub fn run_acceptance(cfg: &AcceptanceConfig) -> AcceptanceReport {
    AcceptanceReport {
        criteria: vec![
            zero_temperature_constant(cfg),
            route_triangle(cfg),
            oracle_agreement(cfg),
            inversion_symmetry(cfg),
            decomposition_identity(cfg),
            epstein_checks(cfg),
            high_temperature(cfg),
        ],
    }
}

/// Criterion 8: the suite finishes inside `budget` and two runs render to
/// identical bytes.
pub fn determinism_criterion(first: &AcceptanceReport, second: &AcceptanceReport) -> CriterionResult {
    let budget = Duration::from_secs(60);
    let elapsed = first.elapsed().max(second.elapsed());
    let identical = first.render() == second.render();
    let mut checks = Checks::new();
    checks.check(identical, "two consecutive runs render byte-identical reports".into());
    checks.check(elapsed < budget, "full suite inside the 60 s budget".into());
    CriterionResult {
        id: 8,
        title: "selftest runtime and determinism",
        passed: checks.passed,
        details: checks.details,
        elapsed,
        budget,
    }
}

fn zero_temperature_constant(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(1, "zero-temperature constant", 1, |c| {
        c.run("zero-temperature constant", |c| {
            let exact = zero_point_antiperiodic(1.0)?;
            let slab = Slab::from_xi(1.0, 1e-4)?;
            let fe = free_energy_antiperiodic(&slab, Route::Decomposition, &cfg.ctl)?;
            let diff = (fe.total - exact).abs();
            c.check(
                diff <= 1e-8,
                format!(
                    "decomposition total at xi=1e-4, a=1: {:.17e} vs 7pi^2/720 = {:.17e} (|diff| {:.3e} <= 1e-8)",
                    fe.total, exact, diff
                ),
            );
            let z = zero_point_ladder(1.0, &OracleControl::default())?;
            let odiff = (z.value - exact).abs();
            c.check(
                odiff <= 1e-6,
                format!(
                    "cutoff oracle (delta ladder 0.04/0.02/0.01): {:.17e} (|diff| {:.3e} <= 1e-6, observed order {:.3})",
                    z.value, odiff, z.order
                ),
            );
            let printed = zero_point_single_pi(1.0);
            c.note(format!(
                "finding: the printed zero-temperature term 7pi/720 = {:.17e} differs from the computed value by a factor {:.6} (= pi); relative inconsistency {:.3e}",
                printed,
                exact / printed,
                rel(printed, exact)
            ));
            Ok(())
        })
    })
}

fn route_triangle(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(2, "route triangle", 10, |c| {
        let xis = grid(0.05, 20.0, 25, Spacing::Log);
        let ctl = cfg.ctl;
        let rows = par::map_ordered(cfg.exec, &xis, |&xi| -> Result<_> {
            let slab = Slab::from_xi(1.0, xi)?;
            let d = free_energy_antiperiodic(&slab, Route::Decomposition, &ctl)?;
            let f = free_energy_antiperiodic(&slab, Route::FSeries, &ctl)?;
            Ok((d.total, f.total))
        });
        let mut worst: f64 = 0.0;
        let mut failed = None;
        for (xi, r) in xis.iter().zip(rows) {
            match r {
                Ok((d, f)) => worst = worst.max(rel(d, f)),
                Err(e) => {
                    failed = Some((*xi, e));
                    break;
                }
            }
        }
        if let Some((xi, e)) = failed {
            c.error(&format!("f-series vs decomposition at xi={xi:.6e}"), e);
        } else {
            c.check(
                worst <= 1e-10,
                format!("f-series vs decomposition, 25 log points xi in [0.05, 20]: max rel diff {worst:.3e} <= 1e-10"),
            );
        }
        for i in [0usize, 6, 12, 18, 24] {
            let xi = xis[i];
            c.run(&format!("zeta route at xi={xi:.6e}"), |c| {
                let slab = Slab::from_xi(1.0, xi)?;
                let d = free_energy_antiperiodic(&slab, Route::Decomposition, &ctl)?;
                let f = free_energy_antiperiodic(&slab, Route::FSeries, &ctl)?;
                let z = free_energy_antiperiodic(&slab, Route::Zeta, &ctl)?;
                let r = rel(z.total, d.total).max(rel(z.total, f.total));
                c.check(
                    r <= 1e-6,
                    format!("zeta route at xi={xi:.6e}: total {:.17e}, max rel diff {r:.3e} <= 1e-6", z.total),
                );
                Ok(())
            });
        }
    })
}

fn oracle_agreement(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(3, "thermal part vs mode-sum oracle", 5, |c| {
        let xis = grid(0.05, 5.0, 10, Spacing::Log);
        let ctl = cfg.ctl;
        let oc = OracleControl::default();
        let rows = par::map_ordered(cfg.exec, &xis, |&xi| -> Result<_> {
            let slab = Slab::from_xi(1.0, xi)?;
            Ok((thermal_part(&slab, &ctl)?.value, thermal_oracle(&slab, &oc)?))
        });
        for (xi, r) in xis.iter().zip(rows) {
            match r {
                Ok((t, o)) => {
                    let d = rel(t, o);
                    c.check(
                        d <= 1e-8,
                        format!("xi={xi:.6e}: thermal {t:.17e}, oracle {o:.17e}, rel diff {d:.3e} <= 1e-8"),
                    );
                }
                Err(e) => c.error(&format!("xi={xi:.6e}"), e),
            }
        }
    })
}

fn inversion_symmetry(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(4, "temperature inversion symmetry", 5, |c| {
        let mut xis = grid(0.02, 50.0, 25, Spacing::Log);
        xis.push(TisRelation::F1Relation.fixed_point());
        xis.push(TisRelation::F2Corrected.fixed_point());
        xis.sort_by(f64::total_cmp);
        let ctl = cfg.ctl;
        for relation in [TisRelation::F1Relation, TisRelation::F2Corrected] {
            let reports = par::map_ordered(cfg.exec, &xis, |&xi| tis_check(relation, xi, &ctl));
            let mut worst: f64 = 0.0;
            let mut fixed = Vec::new();
            let mut err = None;
            for r in reports {
                match r {
                    Ok(rep) => {
                        worst = worst.max(rep.rel_residual);
                        if rep.fixed_point {
                            fixed.push(rep);
                        }
                    }
                    Err(e) => {
                        err = Some(e);
                        break;
                    }
                }
            }
            if let Some(e) = err {
                c.error(relation.as_str(), e);
                continue;
            }
            c.check(
                worst <= 1e-10,
                format!("{relation}: max rel_residual {worst:.3e} <= 1e-10 over xi in [0.02, 50]"),
            );
            for rep in fixed {
                c.note(format!(
                    "{relation}: fixed point xi={:.17e}, residual {:.3e} (exact)",
                    rep.xi, rep.rel_residual
                ));
            }
        }
        let printed = par::map_ordered(cfg.exec, &xis, |&xi| {
            tis_check(TisRelation::F2AsPrinted, xi, &ctl)
        });
        match printed.into_iter().collect::<Result<Vec<_>>>() {
            Ok(reps) => {
                let min = reps.iter().map(|r| r.rel_residual).fold(f64::INFINITY, f64::min);
                let max = reps.iter().map(|r| r.rel_residual).fold(0.0, f64::max);
                c.check(
                    min > 1e-3,
                    format!("finding: printed F2 relation (F1 on the right) fails everywhere: rel_residual in [{min:.3e}, {max:.3e}]"),
                );
                for rep in reps.iter().filter(|r| [0.02, 1.0 / PI, 50.0].iter().any(|x| rel(r.xi, *x) < 1e-12)) {
                    c.note(format!(
                        "f2-as-printed at xi={:.6e}: lhs {:.17e}, rhs {:.17e}, rel_residual {:.3e}",
                        rep.xi, rep.lhs, rep.rhs, rep.rel_residual
                    ));
                }
            }
            Err(e) => c.error("f2-as-printed", e),
        }
    })
}

fn decomposition_identity(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(5, "periodic decomposition F = F_per(2a) - F_per(a)", 2, |c| {
        let points = [(1.0, 1.0), (1.0, 0.25), (0.5, 3.0), (2.0, 1.5), (3.0, 40.0)];
        for (a, beta) in points {
            c.run(&format!("a={a}, beta={beta}"), |c| {
                let slab = Slab::new(a, beta)?;
                let total = free_energy_antiperiodic(&slab, Route::FSeries, &cfg.ctl)?.total;
                let wide = free_energy_periodic(&slab.widened(2.0), &cfg.ctl)?.value;
                let narrow = free_energy_periodic(&slab, &cfg.ctl)?.value;
                let r = rel(total, wide - narrow);
                c.check(
                    r <= 1e-11,
                    format!("a={a}, beta={beta}: F {total:.17e} vs F_per(2a)-F_per(a) {:.17e}, rel diff {r:.3e} <= 1e-11", wide - narrow),
                );
                Ok(())
            });
        }
    })
}

fn epstein_checks(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(6, "Epstein function", 10, |c| {
        for (z, a1, a2) in [(1.5, 1.0, 1.0), (2.0, 1.0, 1.0), (3.0, 1.0, 2.0)] {
            c.run(&format!("direct vs continued at z={z}"), |c| {
                let form = EpsteinForm::new(z, a1, a2)?;
                let d = epstein2_direct(form, &cfg.ctl)?;
                let e = epstein2(form)?;
                let r = rel(d.value, e);
                c.check(
                    r <= 1e-10,
                    format!("E2({z}; {a1}, {a2}): direct {:.17e}, continued {e:.17e}, rel diff {r:.3e} <= 1e-10", d.value),
                );
                Ok(())
            });
        }
        c.run("functional equation", |c| {
            let mut worst: f64 = 0.0;
            for k in 0..=40 {
                let z = -2.0 + 0.125 * k as f64;
                if z.abs() < 0.05 || (z - 1.0).abs() < 0.05 {
                    continue;
                }
                worst = worst.max(functional_equation_residual(EpsteinForm::new(z, 1.0, 4.0)?)?);
            }
            c.check(
                worst <= 1e-8,
                format!("functional equation on z in [-2, 3] (step 1/8, a=(1,4)): max residual {worst:.3e} <= 1e-8"),
            );
            Ok(())
        });
        c.run("brute-force E2(2;1,1)", |c| {
            let brute = brute_force_e2_square(2000);
            let e = epstein2(EpsteinForm::new(2.0, 1.0, 1.0)?)?;
            let r = rel(e, brute);
            c.check(
                r <= 1e-9,
                format!("E2(2;1,1) = {e:.17e} vs brute-force square sum {brute:.17e}, rel diff {r:.3e} <= 1e-9"),
            );
            Ok(())
        });
    })
}

/// Σ′ over |n₁|, |n₂| ≤ m of (n₁² + n₂²)⁻², plus the exact continuum integral
/// of r⁻⁴ outside the square of half-side m + ½.
fn brute_force_e2_square(m: i64) -> f64 {
    let rows = par::map_range(Execution::Parallel, 0, m as u64 + 1, |j| {
        let j = j as i64;
        let mut acc = 0.0;
        for i in (-m..=m).rev() {
            if i != 0 || j != 0 {
                let q = (i * i + j * j) as f64;
                acc += 1.0 / (q * q);
            }
        }
        acc
    });
    let mut total = rows[0];
    for r in &rows[1..] {
        total += 2.0 * r;
    }
    let x = m as f64 + 0.5;
    total + (PI / 2.0 + 1.0) / (x * x)
}

fn high_temperature(cfg: &AcceptanceConfig) -> CriterionResult {
    timed(7, "high-temperature expansion", 5, |c| {
        c.run("three-term expansion at aT=30", |c| {
            let slab = Slab::new(1.0, 1.0 / 30.0)?;
            let terms = high_temperature_expansion(&slab);
            let sum: f64 = terms.iter().map(|t| t.1).sum();
            let full = free_energy_antiperiodic(&slab, Route::Decomposition, &cfg.ctl)?.total;
            let r = rel(sum, full);
            c.check(
                r <= 1e-6,
                format!("aT=30: expansion {sum:.17e} vs full {full:.17e}, rel diff {r:.3e} <= 1e-6"),
            );
            let with_e0 = sum + zero_point_antiperiodic(1.0)?;
            c.note(format!(
                "finding: adding 7pi^2/720 as a T^0 term would give rel diff {:.3e}",
                rel(with_e0, full)
            ));
            Ok(())
        });
        c.run("least-squares fit over aT in [20, 50]", |c| {
            let ts = grid(20.0, 50.0, 31, Spacing::Linear);
            let totals = ts
                .iter()
                .map(|&t| {
                    Ok(free_energy_antiperiodic(&Slab::new(1.0, 1.0 / t)?, Route::Decomposition, &cfg.ctl)?.total)
                })
                .collect::<Result<Vec<f64>>>()?;
            let [c4, c1, c0] = fit_t4_t_1(&ts, &totals);
            let sb = -PI * PI / 90.0;
            let lin = 3.0 * ZETA3 / (8.0 * PI);
            c.check(
                rel(c4, sb) <= 1e-3,
                format!("fitted T^4 coefficient {c4:.17e} vs -pi^2/90 = {sb:.17e} (rel {:.3e} <= 1e-3)", rel(c4, sb)),
            );
            c.check(
                rel(c1, lin) <= 1e-2,
                format!("fitted T coefficient {c1:.17e} vs 3zeta(3)/(8pi) = {lin:.17e} (rel {:.3e} <= 1e-2)", rel(c1, lin)),
            );
            c.note(format!(
                "finding: fitted T^0 coefficient {c0:.3e}; a constant term 7pi^2/720 = {:.17e} is not present",
                zero_point_antiperiodic(1.0)?
            ));
            Ok(())
        });
    })
}

/// Least-squares coefficients of F ≈ c₄T⁴ + c₁T + c₀, with columns scaled to
/// unit norm before solving.
fn fit_t4_t_1(ts: &[f64], values: &[f64]) -> [f64; 3] {
    let n = ts.len();
    let cols: [fn(f64) -> f64; 3] = [|t| t.powi(4), |t| t, |_| 1.0];
    let mut design = DMatrix::<f64>::zeros(n, 3);
    let mut norms = [0.0; 3];
    for (k, f) in cols.iter().enumerate() {
        for (i, &t) in ts.iter().enumerate() {
            design[(i, k)] = f(t);
        }
        norms[k] = design.column(k).norm();
        design.column_mut(k).unscale_mut(norms[k]);
    }
    let rhs = DVector::from_column_slice(values);
    let svd = design.svd(true, true);
    let sol = svd.solve(&rhs, 1e-14).expect("design matrix has full rank");
    [sol[0] / norms[0], sol[1] / norms[1], sol[2] / norms[2]]
}
