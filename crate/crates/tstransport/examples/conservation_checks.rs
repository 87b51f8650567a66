//! Audit a solved field: sign preservation, conservation of the weighted
//! spatial sum, and the per-branch balance between the time integral and
//! the initial mass. The audit recomputes everything from the field —
//! including honest quadrature of the evaluated solution — rather than
//! trusting solver bookkeeping.

use tstransport::conservation::{full_report, check_pdf_conditions};
use tstransport::timescale::{Component, Grid, TimeScale};
use tstransport::transport::{solve, TransportProblem};

fn main() -> Result<(), tstransport::Error> {
    // A deliberately irregular scale: intervals and points of varying size.
    let scale = TimeScale::new(vec![
        Component::Interval { start: 0.0, end: 0.7 },
        Component::Point { at: 1.0 },
        Component::Point { at: 1.3 },
        Component::Interval { start: 1.9, end: 3.4 },
        Component::Point { at: 3.75 },
        Component::Interval { start: 4.0, end: 6.5 },
    ])?;
    println!(
        "scale: {} components, continuous length {}, max gap {}",
        scale.components().len(),
        scale.continuous_length(),
        scale.max_graininess()
    );

    let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale)?;
    let grid = Grid::new(&problem.scale, None)?;
    let field = solve(&problem, &grid)?;

    let report = full_report(&problem, &field, &[0, 1, 2], 1e-10)?;
    println!("\nsign preservation: pass = {} (worst value {:.2e} at t = {}, m = {})",
        report.sign.pass, report.sign.worst, report.sign.worst_t, report.sign.worst_m);
    println!(
        "space-sum conservation: pass = {} (max drift {:.2e} at t = {})",
        report.space.pass, report.space.max_drift, report.space.worst_t
    );
    println!("time-integral balance (per branch):");
    for row in &report.time.branches {
        println!(
            "  m = {}: integral {:.12} + beyond-horizon {:.3e} vs expected {:.12} (defect {:.2e})",
            row.m, row.integral, row.residual, row.expected, row.defect
        );
    }
    println!(
        "  overall: pass = {} (max defect {:.2e}, allowance {:.2e})",
        report.time.pass, report.time.max_defect, report.time.allowed
    );

    let pdf = check_pdf_conditions(&problem);
    println!(
        "\nprobability conditions: k = 1: {}, A*mu_x = 1: {}, positivity: {} -> \
         time sections are laws: {}, space sections are laws: {}",
        pdf.k_is_one, pdf.space_normalized, pdf.admissible,
        pdf.time_sections_pdf, pdf.space_sections_pdf
    );
    Ok(())
}
