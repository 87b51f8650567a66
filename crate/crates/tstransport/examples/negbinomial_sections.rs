//! Waiting-time laws on the lattice: the time section of site m is the law
//! of the number of steps needed for the (m+1)-th hop. Note the convention:
//! weights index the STEP COUNT n = m, m+1, ..., so `w(n)` is the chance
//! that hop m+1 lands exactly on step n+1 — the textbook negative binomial
//! shifted by one.

use tstransport::distributions::negbinomial_pmf;
use tstransport::timescale::{Grid, TimeScale};
use tstransport::transport::{solve, TransportProblem};

fn main() -> Result<(), tstransport::Error> {
    let p = 0.25;
    let n_steps = 120;
    let scale = TimeScale::uniform(p, n_steps)?;
    let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale)?;
    let grid = Grid::new(&problem.scale, None)?;
    let field = solve(&problem, &grid)?;

    for m in [0usize, 1, 3] {
        let section = field.time_section(m as i64)?;
        let reference = negbinomial_pmf(m, p, n_steps);
        println!("time section of site {m} (success chance {p}):");
        println!("{:>4} {:>12} {:>12}", "n", "solver", "closed form");
        for n in m..m + 6 {
            // Solver entries are (time, weight); the law indexes steps.
            let (t, w) = section.entries()[n];
            let (_, want) = reference.entries()[n - m];
            println!("{n:>4} {w:>12.8} {want:>12.8}   (t = {t})");
        }
        println!(
            "  total {:.10} + tail {:.2e}\n",
            section.total(),
            section.tail_bound()
        );
    }
    Ok(())
}
