//! Shared helpers for the integration suites.
//!
//! Each integration target compiles this module afresh and uses its own
//! subset of the helpers, so unused-item lints are off here.
#![allow(dead_code)]

use rand::Rng;
use tstransport::timescale::{Component, TimeScale};

pub fn rel_err(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

/// A random scale admissible for k = mu_x = 1: components separated by gaps
/// in [0.05, 0.9] (positivity factor at least 0.1), grown until the walk's
/// expected hop count reaches `target_mean` so that branches up to m = 10
/// leave little mass beyond the horizon.
pub fn random_admissible_scale<R: Rng>(rng: &mut R, target_mean: f64) -> TimeScale {
    let mut comps = Vec::new();
    let mut cur = 0.0;
    let mut mean = 0.0;
    while mean < target_mean {
        if rng.gen_bool(0.4) {
            let len = rng.gen_range(1.0..4.0);
            comps.push(Component::Interval {
                start: cur,
                end: cur + len,
            });
            cur += len;
            mean += len;
        } else {
            comps.push(Component::Point { at: cur });
        }
        let gap = rng.gen_range(0.05..0.9);
        cur += gap;
        mean += gap;
    }
    comps.push(Component::Point { at: cur });
    TimeScale::new(comps).expect("generator yields valid scales")
}
