//! A scale that alternates half-unit runs with half-unit pauses: the field
//! is a counting process that accumulates continuously during runs and
//! jumps across pauses. The first four branches have short closed forms
//! (polynomials in t times the decaying envelope), shipped as
//! `stopstart_branch` for cross-checking.

use tstransport::distributions::stopstart_branch;
use tstransport::timescale::{Grid, TimeScale};
use tstransport::transport::{solve, TransportProblem};

fn main() -> Result<(), tstransport::Error> {
    let scale = TimeScale::stop_start(0.5, 0.5, 6)?;
    println!(
        "scale: 6 runs of length 1/2 separated by pauses of 1/2, horizon {}",
        scale.t_max()
    );
    let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale)?;
    let grid = Grid::new(&problem.scale, Some(0.1))?;
    let field = solve(&problem, &grid)?;

    println!("\nsolver vs closed-form branches at mid-run times:");
    println!("{:>3} {:>6} {:>14} {:>14}", "x", "t", "solver", "closed form");
    let mut worst = 0.0f64;
    for n in 0..6usize {
        let t = n as f64 + 0.25;
        for x in 0..=3usize {
            let got = field.value(x as i64, t)?;
            let want = stopstart_branch(x, n, t)?;
            worst = worst.max((got - want).abs());
            if n % 2 == 1 {
                println!("{x:>3} {t:>6.2} {got:>14.8e} {want:>14.8e}");
            }
        }
    }
    println!("worst absolute deviation over all branches: {worst:.2e}");

    // The pause steps multiply branch 0 by exactly 1/2; runs decay it
    // exponentially, so u(0, t) = e^{-(continuous time)} / 2^(pauses so far).
    println!("\nbranch 0 along the walk (exponential decay halved at each pause):");
    for n in 0..6usize {
        let t = n as f64 + 0.5;
        let v = field.value(0, t)?;
        let predicted = (-(0.5 * (n as f64 + 1.0))).exp() * 0.5f64.powi(n as i32);
        println!("  end of run {n}: u = {v:.8e} (prediction {predicted:.8e})");
    }
    Ok(())
}
