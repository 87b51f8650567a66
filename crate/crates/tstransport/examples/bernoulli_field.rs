//! On the uniform lattice mu_t·Z the same equation walks a Bernoulli
//! process: after n steps the space section is Binomial(n, c) with
//! c = k·mu_t/mu_x, and the waiting time of the first hop is geometric.

use tstransport::distributions::{binomial_pmf, tv_distance};
use tstransport::timescale::{Grid, TimeScale};
use tstransport::transport::{solve, TransportProblem};

fn main() -> Result<(), tstransport::Error> {
    let step = 0.25;
    let n = 40;
    let scale = TimeScale::uniform(step, n)?;
    let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale)?;
    let grid = Grid::new(&problem.scale, None)?;
    let field = solve(&problem, &grid)?;

    // The space section after all n steps vs the binomial law.
    let t_end = step * n as f64;
    let section = field.space_section(t_end)?;
    let reference = binomial_pmf(n, step);
    println!("space section after {n} steps of {step} vs Binomial({n}, {step}):");
    println!("{:>4} {:>14} {:>14}", "m", "solver", "binomial");
    for m in [0usize, 2, 5, 10, 15, 20] {
        println!(
            "{m:>4} {:>14.6e} {:>14.6e}",
            section.entries()[m].1,
            reference.entries()[m].1
        );
    }
    println!(
        "total variation between the two: {:.2e}",
        tv_distance(&section, &reference)
    );

    // First-hop waiting time: the time section of the origin.
    let waiting = field.time_section(0)?;
    println!("\nwaiting-time law of the first hop (geometric, success 1/4):");
    for (i, (t, w)) in waiting.entries()[..6].iter().enumerate() {
        let geometric = step * (1.0 - step).powi(i as i32);
        println!("  t = {t:<5} weight {w:.6} (geometric predicts {geometric:.6})");
    }
    println!(
        "  total {:.9} + tail bound {:.2e} accounts for probability one",
        waiting.total(),
        waiting.tail_bound()
    );
    Ok(())
}
