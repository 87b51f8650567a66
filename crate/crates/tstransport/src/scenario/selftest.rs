//! The built-in verification suite: eight checks over five canonical
//! scales, printed one verdict per line. Exit 0 only if everything passes;
//! otherwise the run stops at the first failing check and names it.
//!
//! Setting the environment variable in [`FAULT_ENV`] to `sign` or `space`
//! corrupts one stored field value before the corresponding check, proving
//! the audit actually trips (the process then exits 1 naming that check).

use std::time::Instant;

use crate::conservation::{
    check_pdf_conditions, check_sign, check_space_conservation, check_time_conservation,
    SPACE_TOL, TIME_TOL,
};
use crate::distributions::{binomial_pmf, stopstart_branch};
use crate::oracle::{rk4_solve, Rk4Options};
use crate::timescale::{Grid, TimeScale};
use crate::transport::{solve, SolutionField, TransportProblem};

/// Environment variable read by [`run_selftest`] to inject a fault.
pub const FAULT_ENV: &str = "TSTRANSPORT_SELFTEST_FAULT";

struct Canonical {
    name: &'static str,
    problem: TransportProblem,
    field: SolutionField,
    /// Branches whose time balance is audited (each keeps its residual
    /// beyond the horizon under the audit's cap).
    balance_branches: &'static [i64],
}

fn canonical_suite() -> crate::Result<Vec<Canonical>> {
    let specs: Vec<(&'static str, TimeScale, &'static [i64])> = vec![
        (
            "single interval [0,12]",
            TimeScale::single_interval(12.0)?,
            &[0, 1, 2, 3],
        ),
        (
            "uniform lattice 0.25*Z, 60 steps",
            TimeScale::uniform(0.25, 60)?,
            &[0, 1, 2, 3],
        ),
        (
            "uniform lattice 0.9*Z, 20 steps",
            TimeScale::uniform(0.9, 20)?,
            &[0, 1, 2, 3],
        ),
        ("harmonic points, 40 gaps", TimeScale::harmonic(40)?, &[0]),
        (
            "stop-start, 6 periods",
            TimeScale::stop_start(0.5, 0.5, 6)?,
            &[0, 1, 2],
        ),
    ];
    let mut out = Vec::with_capacity(specs.len());
    for (name, scale, balance_branches) in specs {
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale)?;
        let grid = Grid::new(&problem.scale, None)?;
        let field = solve(&problem, &grid)?;
        out.push(Canonical {
            name,
            problem,
            field,
            balance_branches,
        });
    }
    Ok(out)
}

fn poisson_value(lambda: f64, m: usize) -> f64 {
    let mut v = (-lambda).exp();
    for j in 1..=m {
        v *= lambda / j as f64;
    }
    v
}

enum Verdict {
    Pass(String),
    Fail(String),
}

fn report(index: usize, name: &str, v: &Verdict) -> bool {
    match v {
        Verdict::Pass(detail) => {
            println!("check {index}/8: {name} ... pass ({detail})");
            true
        }
        Verdict::Fail(detail) => {
            println!("check {index}/8: {name} ... FAIL ({detail})");
            false
        }
    }
}

/// Run the whole suite, printing one verdict line per check.
/// Returns the process exit code: 0 on success, 1 at the first failure.
pub fn run_selftest() -> i32 {
    let started = Instant::now();
    let fault = std::env::var(FAULT_ENV).ok();
    if let Some(f) = &fault {
        if f != "sign" && f != "space" {
            eprintln!("warning: unknown fault `{f}` in {FAULT_ENV} ignored (known: sign, space)");
        }
    }

    let suite = match canonical_suite() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("selftest could not build the canonical scales: {e}");
            return 1;
        }
    };

    let fault_sign = fault.as_deref() == Some("sign");
    let fault_space = fault.as_deref() == Some("space");
    let checks: Vec<(&str, Box<dyn Fn(&[Canonical]) -> Verdict>)> = vec![
        ("continuous closed form", Box::new(check_continuous)),
        ("lattice closed form", Box::new(check_lattice)),
        (
            "sign preservation",
            Box::new(move |s| check_sign_all(s, fault_sign)),
        ),
        (
            "space-sum conservation",
            Box::new(move |s| check_space_all(s, fault_space)),
        ),
        ("time-integral balance", Box::new(check_time_all)),
        ("section normalization", Box::new(check_normalization)),
        ("harmonic first-success law", Box::new(check_harmonic_law)),
        ("stop-start branch formulas", Box::new(check_stop_start)),
    ];

    for (i, (name, check)) in checks.iter().enumerate() {
        let verdict = check(&suite);
        if !report(i + 1, name, &verdict) {
            println!("selftest: failing check: {name}");
            return 1;
        }
    }
    println!(
        "selftest: 8/8 checks passed ({:.2} s)",
        started.elapsed().as_secs_f64()
    );
    0
}

/// Field on a single interval against `t^m e^{-t} / m!`.
fn check_continuous(suite: &[Canonical]) -> Verdict {
    let field = &suite[0].field;
    let mut worst = 0.0f64;
    for t in [0.5, 3.0, 12.0] {
        for m in 0..=30usize {
            let expected = poisson_value(t, m);
            let got = match field.value(m as i64, t) {
                Ok(v) => v,
                Err(e) => return Verdict::Fail(format!("evaluation failed: {e}")),
            };
            let rel = (got - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
            worst = worst.max(rel);
        }
    }
    if worst <= 1e-12 {
        Verdict::Pass(format!("max relative error {worst:.1e}"))
    } else {
        Verdict::Fail(format!("max relative error {worst:.1e} > 1e-12"))
    }
}

/// Field on the quarter-step lattice against the binomial law.
fn check_lattice(suite: &[Canonical]) -> Verdict {
    let field = &suite[1].field;
    let reference = binomial_pmf(60, 0.25);
    let mut worst = 0.0f64;
    for (m, &(_, expected)) in reference.entries().iter().enumerate() {
        let got = match field.value(m as i64, 15.0) {
            Ok(v) => v,
            Err(e) => return Verdict::Fail(format!("evaluation failed: {e}")),
        };
        let rel = (got - expected).abs() / expected.abs().max(f64::MIN_POSITIVE);
        worst = worst.max(rel);
    }
    if worst <= 1e-12 {
        Verdict::Pass(format!("max relative error {worst:.1e}"))
    } else {
        Verdict::Fail(format!("max relative error {worst:.1e} > 1e-12"))
    }
}

fn check_sign_all(suite: &[Canonical], inject: bool) -> Verdict {
    let mut worst = 0.0f64;
    for canon in suite {
        let report = if inject {
            let mut tampered = canon.field.clone();
            tampered.inject_fault(1, 0, -1e-3);
            check_sign(&tampered)
        } else {
            check_sign(&canon.field)
        };
        match report {
            Ok(r) if r.pass => worst = worst.min(r.worst),
            Ok(r) => {
                return Verdict::Fail(format!(
                    "{}: value {} at t={}, m={}",
                    canon.name, r.worst, r.worst_t, r.worst_m
                ))
            }
            Err(e) => return Verdict::Fail(format!("{}: {e}", canon.name)),
        }
    }
    Verdict::Pass(format!("worst value {worst:.1e} across 5 scales"))
}

fn check_space_all(suite: &[Canonical], inject: bool) -> Verdict {
    let mut worst = 0.0f64;
    for canon in suite {
        let report = if inject {
            let mut tampered = canon.field.clone();
            let last = tampered.grid().len() - 1;
            tampered.inject_fault(last, 0, 0.5);
            check_space_conservation(&tampered, SPACE_TOL)
        } else {
            check_space_conservation(&canon.field, SPACE_TOL)
        };
        if !report.pass {
            return Verdict::Fail(format!(
                "{}: drift {} at t={}",
                canon.name, report.max_drift, report.worst_t
            ));
        }
        worst = worst.max(report.max_drift);
    }
    Verdict::Pass(format!("max drift {worst:.1e} across 5 scales"))
}

fn check_time_all(suite: &[Canonical]) -> Verdict {
    let mut worst = 0.0f64;
    for canon in suite {
        match check_time_conservation(&canon.field, canon.balance_branches, 1e-10, TIME_TOL) {
            Ok(r) if r.pass => worst = worst.max(r.max_defect),
            Ok(r) => {
                return Verdict::Fail(format!(
                    "{}: defect {} (allowed {})",
                    canon.name, r.max_defect, r.allowed
                ))
            }
            Err(e) => return Verdict::Fail(format!("{}: {e}", canon.name)),
        }
    }
    Verdict::Pass(format!("max defect {worst:.1e} across audited branches"))
}

/// With unit parameters every canonical scale satisfies the probability
/// conditions; the measured section totals must agree.
fn check_normalization(suite: &[Canonical]) -> Verdict {
    let mut worst = 0.0f64;
    for canon in suite {
        let pdf = check_pdf_conditions(&canon.problem);
        if !pdf.both {
            return Verdict::Fail(format!(
                "{}: unit parameters should satisfy the probability conditions",
                canon.name
            ));
        }
        let time = match canon.field.time_section(0) {
            Ok(t) => t,
            Err(e) => return Verdict::Fail(format!("{}: {e}", canon.name)),
        };
        let time_total = time.total() + time.tail_bound();
        let horizon = canon.field.grid().len() - 1;
        let t_end = canon.field.grid().points()[horizon].t;
        let space = match canon.field.space_section(t_end) {
            Ok(s) => s,
            Err(e) => return Verdict::Fail(format!("{}: {e}", canon.name)),
        };
        let space_total = space.total() + space.tail_bound();
        worst = worst
            .max((time_total - 1.0).abs())
            .max((space_total - 1.0).abs());
    }
    if worst <= 1e-8 {
        Verdict::Pass(format!("max |total - 1| = {worst:.1e}"))
    } else {
        Verdict::Fail(format!("max |total - 1| = {worst:.1e} > 1e-8"))
    }
}

/// Time section of the origin on the harmonic scale: weight `1/(j(j+1))`
/// at the j-th point.
fn check_harmonic_law(suite: &[Canonical]) -> Verdict {
    let field = &suite[3].field;
    let section = match field.time_section(0) {
        Ok(s) => s,
        Err(e) => return Verdict::Fail(format!("{e}")),
    };
    let mut worst = 0.0f64;
    for (i, &(_, w)) in section.entries()[..40].iter().enumerate() {
        let j = (i + 1) as f64;
        let expected = 1.0 / (j * (j + 1.0));
        let rel = (w - expected).abs() / expected;
        worst = worst.max(rel);
    }
    if worst <= 1e-13 {
        Verdict::Pass(format!("max relative error {worst:.1e}"))
    } else {
        Verdict::Fail(format!("max relative error {worst:.1e} > 1e-13"))
    }
}

/// All four closed-form stop-start branches, sampled across every period.
fn check_stop_start(suite: &[Canonical]) -> Verdict {
    let field = &suite[4].field;
    let mut worst = 0.0f64;
    for n in 0..6usize {
        for i in 0..=10usize {
            let t = n as f64 + 0.05 * i as f64;
            for x in 0..=3usize {
                let expected = match stopstart_branch(x, n, t) {
                    Ok(v) => v,
                    Err(e) => return Verdict::Fail(format!("reference failed: {e}")),
                };
                let got = match field.value(x as i64, t) {
                    Ok(v) => v,
                    Err(e) => return Verdict::Fail(format!("evaluation failed: {e}")),
                };
                worst = worst.max((got - expected).abs());
            }
        }
    }
    // Cross-check with the independent integrator on the two scales whose
    // dynamics mix both step kinds.
    for idx in [3usize, 4usize] {
        let canon = &suite[idx];
        let grid = canon.field.grid();
        let opts = Rk4Options {
            max_step: 1e-4,
            max_m: 15,
        };
        let rk = match rk4_solve(&canon.problem, grid, &opts) {
            Ok(r) => r,
            Err(e) => return Verdict::Fail(format!("{}: integrator failed: {e}", canon.name)),
        };
        for (t, _) in canon.problem.scale.scattered_points() {
            let gi = grid.index_of(t).expect("scattered points are on the grid");
            for m in 0..=15i64 {
                let d = (canon.field.value_at_grid(m, gi) - rk.value_at_grid(m, gi)).abs();
                worst = worst.max(d);
            }
        }
    }
    if worst <= 1e-6 {
        Verdict::Pass(format!("max absolute deviation {worst:.1e}"))
    } else {
        Verdict::Fail(format!("max absolute deviation {worst:.1e} > 1e-6"))
    }
}
