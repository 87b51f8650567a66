//! Solve on a single continuous interval and compare the field against its
//! closed form: with a unit point mass and k = mu_x = 1, the value at site
//! m and time t is t^m e^{-t} / m! — each space section is a Poisson law.

use tstransport::timescale::{Grid, TimeScale};
use tstransport::transport::{solve, TransportProblem};

fn closed_form(t: f64, m: usize) -> f64 {
    let mut v = (-t).exp();
    for j in 1..=m {
        v *= t / j as f64;
    }
    v
}

fn main() -> Result<(), tstransport::Error> {
    let scale = TimeScale::single_interval(12.0)?;
    let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale)?;
    let grid = Grid::new(&problem.scale, Some(0.5))?;
    let field = solve(&problem, &grid)?;

    println!("u(m, t) on [0, 12], point mass at the origin, k = mu_x = 1");
    println!("{:>4} {:>12} {:>14} {:>14} {:>10}", "m", "t", "solver", "t^m e^-t/m!", "rel err");
    let mut worst = 0.0f64;
    for &t in &[0.5, 2.0, 6.0, 12.0] {
        for m in [0usize, 1, 3, 8, 15] {
            let got = field.value(m as i64, t)?;
            let want = closed_form(t, m);
            let rel = (got - want).abs() / want;
            worst = worst.max(rel);
            println!("{m:>4} {t:>12.3} {got:>14.6e} {want:>14.6e} {rel:>10.1e}");
        }
    }
    println!("\nworst relative error: {worst:.2e}");

    let section = field.space_section(6.0)?;
    println!(
        "space section at t = 6: {} entries, total {:.12}, tail bound {:.2e}",
        section.entries().len(),
        section.total(),
        section.tail_bound()
    );
    println!(
        "mode sits at site {} (Poisson(6) mode is 5 or 6)",
        section.mode().unwrap()
    );
    Ok(())
}
