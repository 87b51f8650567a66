//! Trials whose success probability changes from step to step: the lattice
//! walk with per-gap hop chances p_1, p_2, ... counts successes of
//! independent but non-identical trials. The closed recursion is checked
//! here against brute-force enumeration over all outcome patterns, and the
//! harmonic plan p_i = 1/(i+1) reproduces the 1/(j(j+1)) first-success law.

use tstransport::distributions::{
    heterogeneous_oracle, heterogeneous_solution, HeterogeneousTrialPlan,
};

fn main() -> Result<(), tstransport::Error> {
    // An arbitrary short plan: probabilities vary trial by trial.
    let plan = HeterogeneousTrialPlan::new(vec![0.1, 0.45, 0.3, 0.72, 0.5])?;
    println!("plan: {:?}", plan.probs());
    println!("{:>3} {:>3} {:>16} {:>16}", "n", "m", "recursion", "enumeration");
    for n in 0..=plan.len() {
        for m in 0..=n {
            let fast = heterogeneous_solution(&plan, m, n)?;
            let slow = heterogeneous_oracle(&plan, m, n)?;
            assert!((fast - slow).abs() < 1e-14);
            println!("{n:>3} {m:>3} {fast:>16.10} {slow:>16.10}");
        }
    }

    // Success counts must sum to one at every step.
    let total: f64 = (0..=plan.len())
        .map(|m| heterogeneous_solution(&plan, m, plan.len()).unwrap())
        .sum();
    println!("\nmass after all trials: {total:.15}");

    // The harmonic plan: p_i = 1/(i+1). The chance that the FIRST success
    // happens at trial j is then exactly 1/(j(j+1)).
    let harmonic = HeterogeneousTrialPlan::harmonic(8)?;
    println!("\nharmonic plan first-success law:");
    for j in 1..=8usize {
        // Still at zero successes after j-1 trials, then succeed.
        let none_before = heterogeneous_solution(&harmonic, 0, j - 1)?;
        let first_here = none_before * harmonic.probs()[j - 1];
        let law = 1.0 / (j as f64 * (j as f64 + 1.0));
        println!("  j = {j}: {first_here:.10} vs 1/(j(j+1)) = {law:.10}");
    }
    Ok(())
}
