//! The scale's own exponential: on continuous stretches it grows like
//! e^{p·t}, across a gap of width mu it picks up a factor (1 + p·mu).
//! With p = -k/mu_x it is exactly the decay of the origin branch of the
//! transport field — demonstrated here on three different scales.

use tstransport::timescale::{Grid, TimeScale};
use tstransport::transport::{solve, TransportProblem};

fn main() -> Result<(), tstransport::Error> {
    let scales = [
        ("single interval [0,4]", TimeScale::single_interval(4.0)?),
        ("lattice 0.25*Z", TimeScale::uniform(0.25, 16)?),
        ("stop-start", TimeScale::stop_start(0.5, 0.5, 4)?),
    ];
    let k = 1.2;

    for (name, scale) in scales {
        println!("{name}:");
        // Sample a few times of the scale.
        let t_max = scale.t_max();
        let samples: Vec<f64> = (1..=4)
            .map(|i| t_max * i as f64 / 4.0)
            .filter_map(|t| scale.snap(t))
            .collect();

        let problem = TransportProblem::point_mass(k, 1.0, 1.0, scale.clone())?;
        let grid = Grid::new(&scale, None)?;
        let field = solve(&problem, &grid)?;

        for &t in &samples {
            let exp_val = scale.dynamic_exp(-k, t, 0.0)?;
            let branch0 = field.value(0, t)?;
            println!(
                "  t = {t:<8} e_p(t; 0) = {exp_val:.10e}   u(0, t) = {branch0:.10e}   diff {:.1e}",
                (exp_val - branch0).abs()
            );
        }

        // The exponential is multiplicative along the scale:
        // e_p(t2; 0) = e_p(t2; t1) * e_p(t1; 0).
        if samples.len() >= 2 {
            let (t1, t2) = (samples[0], samples[samples.len() - 1]);
            let whole = scale.dynamic_exp(-k, t2, 0.0)?;
            let split = scale.dynamic_exp(-k, t2, t1)? * scale.dynamic_exp(-k, t1, 0.0)?;
            println!("  semigroup check: |whole - split| = {:.1e}", (whole - split).abs());
        }
        println!();
    }

    // Positivity failure: on a unit-gap lattice, p = -1 hits a zero factor
    // and the exponential is undefined from then on.
    let unit = TimeScale::uniform(1.0, 4)?;
    match unit.dynamic_exp(-1.0, 3.0, 0.0) {
        Err(e) => println!("unit lattice with p = -1: {e}"),
        Ok(v) => println!("unexpected value {v}"),
    }
    Ok(())
}
