//! An independent numerical cross-check for the exact solver.
//!
//! On continuous stretches the field obeys the lower-triangular ODE system
//! `u'_m = -kappa (u_m - u_{m-1})`; this module integrates it with classical
//! fixed-step fourth-order Runge-Kutta instead of the closed-form kernel the
//! solver uses. Across gaps only the defining algebraic update exists, so
//! that part is shared by construction.
//!
//! The oracle works on a fixed index window `m_lo..=max_m`. Because the
//! coupling is strictly one-directional (site `m` feels only `m` and
//! `m - 1`), truncation above `max_m` leaves every kept component exact:
//! comparisons against the solver are meaningful for all `m <= max_m`.

use crate::timescale::{Component, Grid};
use crate::transport::TransportProblem;
use crate::{Error, Result};

/// Tuning for the Runge-Kutta walker.
#[derive(Debug, Clone)]
pub struct Rk4Options {
    /// Upper bound on the integration substep inside intervals.
    pub max_step: f64,
    /// Highest site index carried by the oracle.
    pub max_m: i64,
}

impl Default for Rk4Options {
    fn default() -> Self {
        Rk4Options {
            max_step: 1e-4,
            max_m: 24,
        }
    }
}

/// Field values produced by the Runge-Kutta walker, one vector per grid
/// point, aligned with the grid used to produce it.
#[derive(Debug, Clone)]
pub struct Rk4Field {
    m_lo: i64,
    states: Vec<Vec<f64>>,
}

impl Rk4Field {
    pub fn m_lo(&self) -> i64 {
        self.m_lo
    }

    /// Value at site `m` and grid index `gi`; zero outside the window.
    pub fn value_at_grid(&self, m: i64, gi: usize) -> f64 {
        let j = m - self.m_lo;
        if j < 0 || j as usize >= self.states[gi].len() {
            0.0
        } else {
            self.states[gi][j as usize]
        }
    }
}

/// Derivative of the truncated system: `du[m] = -kappa (u[m] - u[m-1])`.
fn derivative(u: &[f64], kappa: f64, out: &mut [f64]) {
    let mut prev = 0.0;
    for (m, &v) in u.iter().enumerate() {
        out[m] = -kappa * (v - prev);
        prev = v;
    }
}

/// One classical Runge-Kutta step of size `h`.
fn rk4_step(u: &mut Vec<f64>, kappa: f64, h: f64, scratch: &mut [Vec<f64>]) {
    let n = u.len();
    let (k1, rest) = scratch.split_at_mut(1);
    let (k2, rest) = rest.split_at_mut(1);
    let (k3, rest) = rest.split_at_mut(1);
    let (k4, rest) = rest.split_at_mut(1);
    let tmp = &mut rest[0];
    derivative(u, kappa, &mut k1[0]);
    for m in 0..n {
        tmp[m] = u[m] + 0.5 * h * k1[0][m];
    }
    derivative(tmp, kappa, &mut k2[0]);
    for m in 0..n {
        tmp[m] = u[m] + 0.5 * h * k2[0][m];
    }
    derivative(tmp, kappa, &mut k3[0]);
    for m in 0..n {
        tmp[m] = u[m] + h * k3[0][m];
    }
    derivative(tmp, kappa, &mut k4[0]);
    for m in 0..n {
        u[m] += h / 6.0 * (k1[0][m] + 2.0 * k2[0][m] + 2.0 * k3[0][m] + k4[0][m]);
    }
}

/// Walk the grid with Runge-Kutta integration on intervals and the defining
/// algebraic update across gaps.
///
/// # Errors
///
/// Same admissibility errors as the exact solver: positivity violations,
/// empty grids, mismatched grids, invalid parameters. Additionally rejects
/// a non-positive `max_step` or a window that cannot hold the initial data.
pub fn rk4_solve(
    problem: &TransportProblem,
    grid: &Grid,
    opts: &Rk4Options,
) -> Result<Rk4Field> {
    problem.validate()?;
    if !(opts.max_step > 0.0) {
        return Err(Error::InvalidParameter {
            name: "max_step",
            constraint: "must be positive",
        });
    }
    if grid.is_empty() {
        return Err(Error::HorizonEmpty);
    }
    if grid.scale() != &problem.scale {
        return Err(Error::InvalidScale {
            reason: "grid was built for a different time scale".into(),
        });
    }
    let reg = problem.check_regressivity();
    if let Some(v) = reg.violations.first() {
        return Err(Error::CflViolation {
            t: v.t,
            factor: v.factor,
        });
    }
    let (m_lo, ic) = problem.ic_vector();
    let width = (opts.max_m - m_lo + 1).max(0) as usize;
    if width < ic.len() {
        return Err(Error::InvalidParameter {
            name: "max_m",
            constraint: "window must cover the initial data",
        });
    }

    let kappa = problem.kappa();
    let c = problem.k / problem.mu_x;
    let mut u = vec![0.0; width];
    u[..ic.len()].copy_from_slice(&ic);
    let mut scratch = vec![vec![0.0; width]; 5];

    let mut states: Vec<Vec<f64>> = vec![Vec::new(); grid.len()];
    for ci in 0..grid.component_count() {
        let (lo, hi) = grid.component_span(ci);
        states[lo] = u.clone();
        if matches!(problem.scale.components()[ci], Component::Interval { .. }) {
            for gi in lo + 1..=hi {
                let dt = grid.points()[gi].t - grid.points()[gi - 1].t;
                let nsub = (dt / opts.max_step).ceil().max(1.0) as usize;
                let h = dt / nsub as f64;
                for _ in 0..nsub {
                    rk4_step(&mut u, kappa, h, &mut scratch);
                }
                states[gi] = u.clone();
            }
        }
        let end = grid.points()[hi];
        if end.is_scattered() {
            let factor = 1.0 - c * end.mu;
            let mut next = vec![0.0; width];
            for m in 0..width {
                let hop = if m > 0 { u[m - 1] } else { 0.0 };
                next[m] = factor * u[m] + c * end.mu * hop;
            }
            u = next;
        }
    }

    Ok(Rk4Field { m_lo, states })
}
