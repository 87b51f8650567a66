//! Refine the lattice and watch the Bernoulli law approach its Poisson
//! limit: with graininess 1/n and hop chance rate/n, the total-variation
//! distance to Poisson(rate) shrinks like O(1/n) — the classical limit
//! theorem, measured rather than assumed.

use tstransport::distributions::poisson_limit_distance;

fn main() {
    let rate = 1.0;
    println!("TV distance between Binomial(n, {rate}/n) and Poisson({rate}):");
    println!("{:>6} {:>14} {:>10}", "n", "distance", "ratio");
    let mut prev: Option<f64> = None;
    let mut n = 4usize;
    while n <= 1024 {
        let d = poisson_limit_distance(n, rate);
        match prev {
            Some(p) => println!("{n:>6} {d:>14.6e} {:>10.4}", d / p),
            None => println!("{n:>6} {d:>14.6e} {:>10}", ""),
        }
        prev = Some(d);
        n *= 2;
    }
    println!("\nhalving the step roughly halves the distance: first-order convergence");

    // The same game at a larger rate: the constant grows, the order stays.
    let rate = 4.0;
    println!("\nrate {rate}: ");
    for n in [8usize, 32, 128, 512] {
        println!("  n = {n:>4}: {:.4e}", poisson_limit_distance(n, rate));
    }
}
