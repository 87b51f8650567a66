//! The exact transport solver.
//!
//! The field `u(m·mu_x, t)` lives on spatial sites `m·mu_x` and evolves along
//! the time scale by two exact closed-form moves:
//!
//! * **across a gap** of width `mu_t`, with `c = k·mu_t/mu_x`:
//!   `u'(m) = (1 - c)·u(m) + c·u(m-1)` — a weighted-average hop, valid while
//!   the positivity condition `c < 1` holds;
//! * **across a continuous stretch** of length `dt`, with `lambda =
//!   k·dt/mu_x`: convolution with the Poisson kernel,
//!   `u'(m) = e^{-lambda} Σ_{i<=m} u(i) lambda^{m-i}/(m-i)!`.
//!
//! Both moves preserve the spatial sum and nonnegativity, so no numerical
//! diffusion or oscillation enters the walk; the only approximation is the
//! spatial window cutoff, whose discarded mass is tracked per time and kept
//! below the problem's `tail_tol`.
//!
//! [`SolutionField`] stores the field at every grid point and can evaluate
//! it exactly at any time of the scale, including between grid samples.

use crate::distributions::{DistributionTable, TableKind};
use crate::timescale::{Component, Grid, TimeScale};
use crate::{Error, Result};

/// Default bound on the spatial mass the solver may drop by windowing.
pub const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Where `lambda` is split into sub-propagations to keep `e^{-lambda}`
/// comfortably inside `f64` range. The split is exact (kernel semigroup).
const LAMBDA_CHUNK: f64 = 200.0;

/// Initial data for the transport problem.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// Mass `amplitude` at site `m = 0`, zero elsewhere.
    PointMass { amplitude: f64 },
    /// Arbitrary finitely-supported data: `coefficients[i]` sits at site
    /// `m_lo + i`.
    General { m_lo: i64, coefficients: Vec<f64> },
}

/// A transport problem: equation parameters, initial data, temporal domain,
/// and the spatial window tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportProblem {
    /// Transport coefficient `k > 0`.
    pub k: f64,
    /// Spatial site spacing `mu_x > 0`.
    pub mu_x: f64,
    pub initial: InitialCondition,
    pub scale: TimeScale,
    /// Bound on spatial mass dropped by windowing, relative to the total.
    pub tail_tol: f64,
}

impl TransportProblem {
    /// Point mass `a` at the origin.
    pub fn point_mass(k: f64, a: f64, mu_x: f64, scale: TimeScale) -> Result<Self> {
        let p = TransportProblem {
            k,
            mu_x,
            initial: InitialCondition::PointMass { amplitude: a },
            scale,
            tail_tol: DEFAULT_TAIL_TOL,
        };
        p.validate()?;
        Ok(p)
    }

    /// General finitely-supported initial data.
    pub fn with_initial(
        k: f64,
        mu_x: f64,
        scale: TimeScale,
        initial: InitialCondition,
    ) -> Result<Self> {
        let p = TransportProblem {
            k,
            mu_x,
            initial,
            scale,
            tail_tol: DEFAULT_TAIL_TOL,
        };
        p.validate()?;
        Ok(p)
    }

    /// Replace the window tolerance.
    pub fn with_tail_tol(mut self, tail_tol: f64) -> Result<Self> {
        self.tail_tol = tail_tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::InvalidParameter {
                name: "k",
                constraint: "must be positive and finite",
            });
        }
        if !(self.mu_x > 0.0) || !self.mu_x.is_finite() {
            return Err(Error::InvalidParameter {
                name: "mu_x",
                constraint: "must be positive and finite",
            });
        }
        if !(self.tail_tol > 0.0 && self.tail_tol < 1.0) {
            return Err(Error::InvalidParameter {
                name: "tail_tol",
                constraint: "must lie in (0, 1)",
            });
        }
        match &self.initial {
            InitialCondition::PointMass { amplitude } => {
                if !(*amplitude > 0.0) || !amplitude.is_finite() {
                    return Err(Error::InvalidParameter {
                        name: "A",
                        constraint: "point-mass amplitude must be positive and finite",
                    });
                }
            }
            InitialCondition::General { coefficients, .. } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidParameter {
                        name: "initial",
                        constraint: "needs at least one coefficient",
                    });
                }
                if coefficients.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "initial",
                        constraint: "coefficients must be finite",
                    });
                }
            }
        }
        Ok(())
    }

    /// Transport rate per site: `k / mu_x`.
    pub fn kappa(&self) -> f64 {
        self.k / self.mu_x
    }

    /// Initial data as `(m_lo, values)`.
    pub fn ic_vector(&self) -> (i64, Vec<f64>) {
        match &self.initial {
            InitialCondition::PointMass { amplitude } => (0, vec![*amplitude]),
            InitialCondition::General { m_lo, coefficients } => (*m_lo, coefficients.clone()),
        }
    }

    /// Sum of the initial data (the conserved spatial sum).
    pub fn ic_total(&self) -> f64 {
        self.ic_vector().1.iter().sum()
    }

    pub fn ic_nonnegative(&self) -> bool {
        self.ic_vector().1.iter().all(|c| *c >= 0.0)
    }

    /// Positivity check of the scale under this problem's `k` and `mu_x`.
    pub fn check_regressivity(&self) -> crate::timescale::RegressivityReport {
        self.scale.check_regressivity(self.k, self.mu_x)
    }
}

/// One exact step across a gap of width `mu_t` starting at time `t`
/// (`t` is used for diagnostics only). The result has one more entry than
/// `state`; the spatial sum is preserved exactly.
///
/// # Errors
///
/// [`Error::CflViolation`] when `1 - k·mu_t/mu_x <= 0`; the boundary case
/// is rejected too, because sign preservation degenerates there.
pub fn step_scattered(state: &[f64], k: f64, mu_x: f64, mu_t: f64, t: f64) -> Result<Vec<f64>> {
    let c = k * mu_t / mu_x;
    let factor = 1.0 - c;
    if factor <= 0.0 {
        return Err(Error::CflViolation { t, factor });
    }
    let mut out = vec![0.0; state.len() + 1];
    for m in 0..out.len() {
        let stay = if m < state.len() { state[m] } else { 0.0 };
        let hop = if m > 0 { state[m - 1] } else { 0.0 };
        out[m] = factor * stay + c * hop;
    }
    Ok(out)
}

/// Exact propagation of `state` across a continuous stretch of length `dt`:
/// convolution with the Poisson kernel of rate `lambda = k·dt/mu_x`. The
/// spatial window grows just enough that the discarded upper tail is below
/// `tail_tol` relative to the total mass.
///
/// # Panics
///
/// Panics if `dt < 0`, `k <= 0`, `mu_x <= 0`, or `tail_tol` is not in
/// `(0, 1)`; these are contract violations, not runtime conditions.
pub fn propagate_interval(state: &[f64], k: f64, mu_x: f64, dt: f64, tail_tol: f64) -> Vec<f64> {
    assert!(dt >= 0.0, "dt must be nonnegative");
    assert!(k > 0.0 && mu_x > 0.0, "need k > 0 and mu_x > 0");
    assert!(tail_tol > 0.0 && tail_tol < 1.0, "tail_tol must be in (0, 1)");
    kernel_step(state, k / mu_x * dt, tail_tol).0
}

/// Smallest window extension `J` with Poisson tail `P(X > J) <= tol`
/// (Chernoff bound; a modest overestimate, never an underestimate).
fn tail_extension(lambda: f64, tol: f64) -> usize {
    if lambda <= 0.0 {
        return 0;
    }
    let ln_tol = tol.ln();
    let mut j = lambda.ceil() as usize + 1;
    loop {
        let jf = j as f64;
        // ln P(X > j) <= -lambda + j·(1 + ln(lambda/j)) for j > lambda.
        if -lambda + jf * (1.0 + (lambda / jf).ln()) <= ln_tol {
            return j;
        }
        j += 1;
    }
}

/// Poisson-kernel convolution with relative tail budget `rel_tol`.
/// Returns the new state and an upper bound on the discarded mass.
/// Large rates are split into exact sub-propagations to stay well inside
/// `f64` exponent range.
fn kernel_step(state: &[f64], lambda: f64, rel_tol: f64) -> (Vec<f64>, f64) {
    debug_assert!(lambda >= 0.0);
    if state.is_empty() || lambda == 0.0 {
        return (state.to_vec(), 0.0);
    }
    let chunks = (lambda / LAMBDA_CHUNK).ceil().max(1.0) as usize;
    if chunks > 1 {
        let sub = lambda / chunks as f64;
        let sub_tol = rel_tol / chunks as f64;
        let mut cur = state.to_vec();
        let mut deficit = 0.0;
        for _ in 0..chunks {
            let (next, d) = kernel_once(&cur, sub, sub_tol);
            cur = next;
            deficit += d;
        }
        return (cur, deficit);
    }
    kernel_once(state, lambda, rel_tol)
}

/// Single entry of the Poisson-kernel convolution:
/// `e^{-lambda} Σ_{j <= j_hi} state[j] · lambda^{j_hi - j}/(j_hi - j)!`.
/// Exact (up to rounding) for any `j_hi`, however deep.
fn kernel_entry(state: &[f64], lambda: f64, j_hi: usize) -> f64 {
    if lambda == 0.0 {
        return state.get(j_hi).copied().unwrap_or(0.0);
    }
    if lambda > LAMBDA_CHUNK {
        // Extreme rates fall back to the chunked full convolution; entries
        // beyond its window are below the default tail tolerance anyway.
        let (v, _) = kernel_step(state, lambda, DEFAULT_TAIL_TOL);
        return v.get(j_hi).copied().unwrap_or(0.0);
    }
    let mut weight = (-lambda).exp();
    let mut acc = 0.0;
    for d in 0..=j_hi {
        let j = j_hi - d;
        if j < state.len() {
            acc += state[j] * weight;
        }
        weight *= lambda / (d as f64 + 1.0);
    }
    acc
}

fn kernel_once(state: &[f64], lambda: f64, rel_tol: f64) -> (Vec<f64>, f64) {
    let ext = tail_extension(lambda, rel_tol);
    let n_out = state.len() + ext;
    let mut weights = vec![0.0; n_out];
    weights[0] = (-lambda).exp();
    for j in 1..n_out {
        weights[j] = weights[j - 1] * lambda / j as f64;
    }
    let mut out = vec![0.0; n_out];
    for (i, &s) in state.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        for (j, &w) in weights[..n_out - i].iter().enumerate() {
            out[i + j] += s * w;
        }
    }
    let nonneg = state.iter().all(|s| *s >= 0.0);
    let deficit = if nonneg {
        let sum_in: f64 = state.iter().sum();
        let sum_out: f64 = out.iter().sum();
        (sum_in - sum_out).max(0.0)
    } else {
        state.iter().map(|s| s.abs()).sum::<f64>() * rel_tol
    };
    (out, deficit)
}

/// The solved field: exact values at every grid point, exact evaluation
/// anywhere on the scale, and per-time bounds on windowed-away mass.
#[derive(Debug, Clone)]
pub struct SolutionField {
    grid: Grid,
    k: f64,
    mu_x: f64,
    m_lo: i64,
    ic: Vec<f64>,
    ic_nonnegative: bool,
    /// `states[gi][j]` is `u((m_lo + j)·mu_x, t_gi)`.
    states: Vec<Vec<f64>>,
    /// Upper bound on mass above the stored window, per grid point.
    tails: Vec<f64>,
}

/// Solve the problem on the given grid by one exact left-to-right walk.
///
/// # Errors
///
/// * [`Error::CflViolation`] at the first scattered point violating
///   positivity (the whole solve is refused);
/// * [`Error::HorizonEmpty`] for an empty grid;
/// * [`Error::InvalidScale`] if the grid was built for a different scale;
/// * parameter validation errors from [`TransportProblem::validate`].
pub fn solve(problem: &TransportProblem, grid: &Grid) -> Result<SolutionField> {
    problem.validate()?;
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

    let kappa = problem.kappa();
    let n_intervals = problem.scale.intervals().count().max(1);
    // Split the window budget so the walk's accumulated discard stays below
    // tail_tol even across many intervals.
    let budget = problem.tail_tol / (2.0 * n_intervals as f64);
    let (m_lo, ic) = problem.ic_vector();

    let mut states: Vec<Vec<f64>> = vec![Vec::new(); grid.len()];
    let mut tails: Vec<f64> = vec![0.0; grid.len()];
    let mut cur = ic.clone();
    let mut cur_tail = 0.0;

    for ci in 0..grid.component_count() {
        let (lo, hi) = grid.component_span(ci);
        match problem.scale.components()[ci] {
            Component::Point { .. } => {
                states[lo] = cur.clone();
                tails[lo] = cur_tail;
            }
            Component::Interval { start, .. } => {
                states[lo] = cur.clone();
                tails[lo] = cur_tail;
                // Every sample propagates from the interval's left endpoint:
                // errors never compound within an interval.
                for gi in lo + 1..=hi {
                    let dt = grid.points()[gi].t - start;
                    let (v, deficit) = kernel_step(&cur, kappa * dt, budget);
                    states[gi] = v;
                    tails[gi] = cur_tail + deficit;
                }
                cur = states[hi].clone();
                cur_tail = tails[hi];
            }
        }
        let end = grid.points()[hi];
        if end.is_scattered() {
            cur = step_scattered(&cur, problem.k, problem.mu_x, end.mu, end.t)?;
        }
    }

    Ok(SolutionField {
        grid: grid.clone(),
        k: problem.k,
        mu_x: problem.mu_x,
        m_lo,
        ic,
        ic_nonnegative: problem.ic_nonnegative(),
        states,
        tails,
    })
}

impl SolutionField {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn scale(&self) -> &TimeScale {
        self.grid.scale()
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn mu_x(&self) -> f64 {
        self.mu_x
    }

    pub fn kappa(&self) -> f64 {
        self.k / self.mu_x
    }

    /// Lowest stored spatial index (fixed along the walk: transport only
    /// moves mass upward).
    pub fn m_lo(&self) -> i64 {
        self.m_lo
    }

    /// Initial data the field was solved from.
    pub fn initial_values(&self) -> &[f64] {
        &self.ic
    }

    pub fn ic_total(&self) -> f64 {
        self.ic.iter().sum()
    }

    pub fn ic_nonnegative(&self) -> bool {
        self.ic_nonnegative
    }

    /// Stored window at grid index `gi` as an inclusive index range.
    pub fn window_at(&self, gi: usize) -> (i64, i64) {
        (self.m_lo, self.m_lo + self.states[gi].len() as i64 - 1)
    }

    /// Largest window over all grid points.
    pub fn max_window(&self) -> (i64, i64) {
        let w = self.states.iter().map(Vec::len).max().unwrap_or(0);
        (self.m_lo, self.m_lo + w as i64 - 1)
    }

    /// Field value at grid index `gi`, site `m`; zero outside the window
    /// (below it exactly, above it up to the tail bound).
    pub fn value_at_grid(&self, m: i64, gi: usize) -> f64 {
        let j = m - self.m_lo;
        if j < 0 || j as usize >= self.states[gi].len() {
            0.0
        } else {
            self.states[gi][j as usize]
        }
    }

    /// The stored spatial vector at grid index `gi`.
    pub fn state_at_grid(&self, gi: usize) -> &[f64] {
        &self.states[gi]
    }

    /// Upper bound on windowed-away mass at grid index `gi`.
    pub fn tail_at_grid(&self, gi: usize) -> f64 {
        self.tails[gi]
    }

    /// Fault-injection hook for the self-test: overwrite one stored value
    /// so the structural checks can prove they trip on corrupted fields.
    pub(crate) fn inject_fault(&mut self, gi: usize, j: usize, v: f64) {
        self.states[gi][j] = v;
    }

    /// Largest tail bound over the walk.
    pub fn max_tail(&self) -> f64 {
        self.tails.iter().fold(0.0, |a, &b| a.max(b))
    }

    /// Cumulative spatial mass at or below site `m` at grid index `gi`.
    pub fn cumulative_below(&self, m: i64, gi: usize) -> f64 {
        let hi = (m - self.m_lo + 1).clamp(0, self.states[gi].len() as i64) as usize;
        self.states[gi][..hi].iter().sum()
    }

    /// Exact field value at any `t` in the scale and any site `m`.
    ///
    /// At grid points the stored value is returned. Off the grid — and for
    /// sites above the stored window at times inside interval components —
    /// the value is recomputed exactly by a single Poisson-kernel sum from
    /// the left endpoint of the interval containing `t`, so arbitrary
    /// depths keep full relative accuracy there. Only at point components
    /// do sites above the window report 0 (covered by the tail bound);
    /// walks across pure point scales never truncate, so in practice this
    /// affects scales where intervals precede points.
    ///
    /// # Errors
    ///
    /// [`Error::TimeNotInScale`] if `t` is not in the scale.
    pub fn value(&self, m: i64, t: f64) -> Result<f64> {
        if m < self.m_lo {
            return Ok(0.0);
        }
        let (ci, ts) = self
            .scale()
            .locate_component(t)
            .ok_or(Error::TimeNotInScale { t })?;
        match self.scale().components()[ci] {
            Component::Point { .. } => {
                let gi = self
                    .grid
                    .index_of(ts)
                    .expect("point components are grid points");
                Ok(self.value_at_grid(m, gi))
            }
            Component::Interval { start, .. } => {
                let j_hi = (m - self.m_lo) as usize;
                if let Some(gi) = self.grid.index_of(ts) {
                    if j_hi < self.states[gi].len() {
                        return Ok(self.states[gi][j_hi]);
                    }
                }
                let (lo_gi, _) = self.grid.component_span(ci);
                Ok(kernel_entry(
                    &self.states[lo_gi],
                    self.kappa() * (ts - start),
                    j_hi,
                ))
            }
        }
    }

    /// The time profile of spatial branch `m`, packaged with delta weights:
    /// graininess times the value at scattered points, exact per-cell
    /// integrals between consecutive grid samples on intervals. The weights
    /// therefore sum to the exact delta integral of the branch over
    /// `[0, t_max)`, and the tail bound accounts for mass beyond the horizon
    /// plus windowing dust.
    ///
    /// # Errors
    ///
    /// [`Error::NegativeInitialData`] for sign-indefinite fields;
    /// [`Error::IndexOutOfWindow`] if `m` was never inside the window.
    pub fn time_section(&self, m: i64) -> Result<DistributionTable> {
        if !self.ic_nonnegative {
            return Err(Error::NegativeInitialData);
        }
        let (lo, hi) = self.max_window();
        if m < lo || m > hi {
            return Err(Error::IndexOutOfWindow { m, lo, hi });
        }
        let kappa = self.kappa();
        let pts = self.grid.points();
        let mut entries = Vec::with_capacity(pts.len());
        let mut has_mass = false;
        let mut has_cells = false;
        for ci in 0..self.grid.component_count() {
            let (lo_gi, hi_gi) = self.grid.component_span(ci);
            if matches!(
                self.scale().components()[ci],
                Component::Interval { .. }
            ) {
                has_cells = true;
                // Exact cell masses: integral of u(m, ·) over [t_i, t_{i+1})
                // = (C_m(t_i) - C_m(t_{i+1})) / kappa, with C_m the cumulative
                // spatial mass at or below m (telescoped equation).
                for gi in lo_gi..hi_gi {
                    let mass =
                        (self.cumulative_below(m, gi) - self.cumulative_below(m, gi + 1)) / kappa;
                    entries.push((pts[gi].t, mass.max(0.0)));
                }
            }
            let end = pts[hi_gi];
            if end.is_scattered() {
                has_mass = true;
                entries.push((end.t, end.mu * self.value_at_grid(m, hi_gi)));
            } else {
                // Horizon point: contributes nothing to [0, t_max).
                entries.push((end.t, 0.0));
            }
        }
        let kind = match (has_mass, has_cells) {
            (true, false) => TableKind::Mass,
            (false, true) => TableKind::DensitySampled,
            _ => TableKind::Mixed,
        };
        let horizon = pts.len() - 1;
        let residual = self.cumulative_below(m, horizon) / kappa;
        let measure = self.scale().continuous_length()
            + self.scale().scattered_points().map(|(_, mu)| mu).sum::<f64>();
        let tail_bound = residual + self.max_tail() * measure;
        DistributionTable::new(
            kind,
            entries,
            tail_bound,
            format!("section=time m={m} k={} mu_x={}", self.k, self.mu_x),
        )
    }

    /// The spatial profile at grid time `t`: locations `m·mu_x` with weights
    /// `mu_x · u(m·mu_x, t)` over the stored window.
    ///
    /// # Errors
    ///
    /// [`Error::TimeNotOnGrid`] if `t` is not a grid point;
    /// [`Error::NegativeInitialData`] for sign-indefinite fields.
    pub fn space_section(&self, t: f64) -> Result<DistributionTable> {
        if !self.ic_nonnegative {
            return Err(Error::NegativeInitialData);
        }
        let gi = self
            .grid
            .index_of(t)
            .ok_or(Error::TimeNotOnGrid { t })?;
        let entries = self.states[gi]
            .iter()
            .enumerate()
            .map(|(j, &v)| (((self.m_lo + j as i64) as f64) * self.mu_x, self.mu_x * v))
            .collect();
        DistributionTable::new(
            TableKind::Mass,
            entries,
            self.mu_x * self.tails[gi],
            format!("section=space t={} k={} mu_x={}", t, self.k, self.mu_x),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::timescale::{Grid, TimeScale};

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(a.abs()).max(f64::MIN_POSITIVE)
    }

    fn poisson_value(a: f64, lambda: f64, m: usize) -> f64 {
        // Independent reference: e^-lambda lambda^m / m! accumulated forward.
        let mut v = a * (-lambda).exp();
        for j in 1..=m {
            v *= lambda / j as f64;
        }
        v
    }

    #[test]
    fn scattered_step_splits_a_point_mass() {
        let out = step_scattered(&[2.0], 1.0, 1.0, 0.25, 0.0).unwrap();
        assert_eq!(out, vec![1.5, 0.5]);
    }

    #[test]
    fn scattered_step_preserves_zero_and_sum() {
        let out = step_scattered(&[0.0, 0.0, 0.0], 2.0, 1.0, 0.3, 0.0).unwrap();
        assert!(out.iter().all(|v| *v == 0.0));
        let state = [0.4, 0.3, 0.2];
        let out = step_scattered(&state, 1.5, 0.5, 0.2, 0.0).unwrap();
        let sum: f64 = out.iter().sum();
        assert!((sum - 0.9).abs() < 1e-15);
    }

    #[test]
    fn scattered_step_rejects_boundary_and_beyond() {
        // c = 1 exactly: rejected.
        let r = step_scattered(&[1.0], 1.0, 1.0, 1.0, 3.0);
        assert!(matches!(r, Err(Error::CflViolation { factor, .. }) if factor == 0.0));
        let r = step_scattered(&[1.0], 2.0, 1.0, 1.0, 3.0);
        assert!(matches!(r, Err(Error::CflViolation { factor, .. }) if factor < 0.0));
    }

    #[test]
    fn two_scattered_steps_match_binomial() {
        let s1 = step_scattered(&[1.0], 1.0, 1.0, 0.25, 0.0).unwrap();
        let s2 = step_scattered(&s1, 1.0, 1.0, 0.25, 0.25).unwrap();
        // C(2,1) (3/4)(1/4) = 0.375
        assert!((s2[1] - 0.375).abs() < 1e-15);
    }

    #[test]
    fn interval_propagation_of_point_mass_is_poisson() {
        let out = propagate_interval(&[1.0], 1.0, 1.0, 2.0, 1e-12);
        for (m, v) in out.iter().enumerate() {
            assert!(rel_close(*v, poisson_value(1.0, 2.0, m), 1e-13));
        }
    }

    #[test]
    fn interval_propagation_convolves_general_states() {
        let out = propagate_interval(&[0.75, 0.25], 1.0, 1.0, 1.0, 1e-12);
        let e = (-1.0f64).exp();
        assert!(rel_close(out[0], 0.75 * e, 1e-14)); // 0.27591...
        assert!(rel_close(out[1], e, 1e-14)); // 0.75 e + 0.25 e
    }

    #[test]
    fn tiny_interval_is_the_identity() {
        let state = [0.3, 0.5, 0.2];
        let out = propagate_interval(&state, 1.0, 1.0, 1e-12, 1e-12);
        for (a, b) in state.iter().zip(&out) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn propagation_accounts_for_all_mass() {
        let state = [0.2, 0.0, 0.5, 0.3];
        let (out, deficit) = kernel_step(&state, 7.3, 1e-12);
        let sum: f64 = out.iter().sum();
        assert!(deficit <= 1e-12);
        assert!((sum + deficit - 1.0).abs() < 1e-12);
    }

    #[test]
    fn large_rates_split_exactly() {
        // lambda = 500 forces chunking; sum is still conserved.
        let (out, deficit) = kernel_step(&[1.0], 500.0, 1e-10);
        let sum: f64 = out.iter().sum();
        assert!((sum + deficit - 1.0).abs() < 1e-9);
        // The mode sits near lambda.
        let mode = out
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert!((mode as f64 - 500.0).abs() < 3.0);
    }

    #[test]
    fn continuous_solve_matches_poisson_field() {
        let scale = TimeScale::single_interval(21.0).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        for t in [0.1, 1.0, 5.0, 20.0] {
            for m in 0..=12 {
                let v = field.value(m, t).unwrap();
                assert!(
                    rel_close(v, poisson_value(1.0, t, m as usize), 1e-12),
                    "t={t} m={m}"
                );
            }
        }
    }

    #[test]
    fn lattice_solve_matches_binomial_field() {
        let p = 0.25;
        let scale = TimeScale::uniform(p, 20).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        let reference = crate::distributions::binomial_pmf(20, p);
        for m in 0..=20i64 {
            let v = field.value(m, 20.0 * p).unwrap();
            assert!(
                rel_close(v, reference.entries()[m as usize].1, 1e-12),
                "m={m}"
            );
        }
    }

    #[test]
    fn stop_start_solve_matches_reference_branches() {
        let scale = TimeScale::stop_start(0.5, 0.5, 6).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        for n in 0..6usize {
            for frac in [0.0, 0.15, 0.37, 0.5] {
                let t = n as f64 + frac;
                for x in 0..=3usize {
                    let v = field.value(x as i64, t).unwrap();
                    let reference =
                        crate::distributions::stopstart_branch(x, n, t).unwrap();
                    assert!(
                        (v - reference).abs() < 1e-13,
                        "x={x} n={n} t={t}: {v} vs {reference}"
                    );
                }
            }
        }
    }

    #[test]
    fn solve_rejects_inadmissible_lattice() {
        let scale = TimeScale::uniform(1.0, 4).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        assert!(matches!(
            solve(&problem, &grid),
            Err(Error::CflViolation { t, .. }) if t == 0.0
        ));
    }

    #[test]
    fn solve_rejects_mismatched_grid() {
        let scale = TimeScale::single_interval(2.0).unwrap();
        let other = TimeScale::single_interval(3.0).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&other, None).unwrap();
        assert!(matches!(
            solve(&problem, &grid),
            Err(Error::InvalidScale { .. })
        ));
    }

    #[test]
    fn values_between_grid_points_are_exact() {
        let scale = TimeScale::single_interval(4.0).unwrap();
        let problem = TransportProblem::point_mass(2.0, 3.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, Some(0.5)).unwrap();
        let field = solve(&problem, &grid).unwrap();
        // 1.3 is not a grid point of h = 0.5 sampling.
        assert_eq!(grid.index_of(1.3), None);
        for m in 0..8 {
            let v = field.value(m, 1.3).unwrap();
            assert!(rel_close(v, poisson_value(3.0, 2.6, m as usize), 1e-13));
        }
        // Below the window is exactly zero.
        assert_eq!(field.value(-2, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn window_tail_stays_within_budget() {
        let scale = TimeScale::stop_start(0.5, 0.25, 8).unwrap();
        let problem = TransportProblem::point_mass(1.5, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        assert!(field.max_tail() <= problem.tail_tol);
    }

    #[test]
    fn time_section_on_interval_has_exponential_cells() {
        let scale = TimeScale::single_interval(30.0).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        let section = field.time_section(0).unwrap();
        assert_eq!(section.kind(), TableKind::DensitySampled);
        // Cell mass over [t_i, t_{i+1}) for branch 0 is e^-t_i - e^-t_{i+1}.
        let h = 30.0 / 64.0;
        let (t0, w0) = section.entries()[1];
        assert!((w0 - ((-t0).exp() - (-(t0 + h)).exp())).abs() < 1e-14);
        assert!((section.total() + section.tail_bound() - 1.0).abs() < 1e-11);
    }

    #[test]
    fn time_section_on_lattice_is_geometric() {
        let p = 0.25;
        let scale = TimeScale::uniform(p, 120).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        let section = field.time_section(0).unwrap();
        assert_eq!(section.kind(), TableKind::Mass);
        for (n, (loc, w)) in section.entries()[..120].iter().enumerate() {
            assert!((loc - n as f64 * p).abs() < 1e-12);
            assert!(rel_close(*w, p * (1.0 - p).powi(n as i32), 1e-12), "n={n}");
        }
        assert!((section.total() + section.tail_bound() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn time_section_rejects_out_of_window_branches() {
        let scale = TimeScale::uniform(0.25, 4).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        assert!(matches!(
            field.time_section(40),
            Err(Error::IndexOutOfWindow { .. })
        ));
    }

    #[test]
    fn space_section_is_the_poisson_law() {
        let scale = TimeScale::single_interval(3.0).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, Some(0.5)).unwrap();
        let field = solve(&problem, &grid).unwrap();
        let section = field.space_section(2.0).unwrap();
        for (m, (loc, w)) in section.entries().iter().enumerate() {
            assert_eq!(*loc, m as f64);
            assert!(rel_close(*w, poisson_value(1.0, 2.0, m), 1e-12));
        }
        assert!((section.total() + section.tail_bound() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn space_section_at_time_zero_is_degenerate() {
        let scale = TimeScale::single_interval(1.0).unwrap();
        let problem = TransportProblem::point_mass(1.0, 2.0, 0.5, scale).unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        let section = field.space_section(0.0).unwrap();
        assert_eq!(section.entries()[0], (0.0, 1.0)); // mu_x * A = 0.5 * 2
        assert_eq!(section.total(), 1.0);
    }

    #[test]
    fn space_section_needs_a_grid_time() {
        let scale = TimeScale::single_interval(1.0).unwrap();
        let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
        let grid = Grid::new(&problem.scale, Some(0.25)).unwrap();
        let field = solve(&problem, &grid).unwrap();
        assert!(matches!(
            field.space_section(0.1),
            Err(Error::TimeNotOnGrid { .. })
        ));
    }

    #[test]
    fn negative_initial_data_solves_but_refuses_sections() {
        let scale = TimeScale::single_interval(1.0).unwrap();
        let problem = TransportProblem::with_initial(
            1.0,
            1.0,
            scale,
            InitialCondition::General {
                m_lo: 0,
                coefficients: vec![1.0, -0.5],
            },
        )
        .unwrap();
        let grid = Grid::new(&problem.scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        assert!(!field.ic_nonnegative());
        // The walk still conserves the (signed) sum.
        let last = grid.len() - 1;
        let sum: f64 = field.state_at_grid(last).iter().sum();
        assert!((sum - 0.5).abs() < 1e-12);
        assert!(matches!(
            field.space_section(1.0),
            Err(Error::NegativeInitialData)
        ));
        assert!(matches!(
            field.time_section(0),
            Err(Error::NegativeInitialData)
        ));
    }

    #[test]
    fn shifted_initial_data_shifts_the_field() {
        let scale = TimeScale::single_interval(2.0).unwrap();
        let problem = TransportProblem::with_initial(
            1.0,
            1.0,
            scale.clone(),
            InitialCondition::General {
                m_lo: -3,
                coefficients: vec![1.0],
            },
        )
        .unwrap();
        let grid = Grid::new(&scale, None).unwrap();
        let field = solve(&problem, &grid).unwrap();
        let v = field.value(-1, 2.0).unwrap();
        assert!(rel_close(v, poisson_value(1.0, 2.0, 2), 1e-13));
    }

    #[test]
    fn rescaling_space_is_exact() {
        // Dyadic parameters so both routes round identically.
        let scale = TimeScale::stop_start(0.5, 0.25, 4).unwrap();
        let coarse =
            TransportProblem::point_mass(3.0, 1.0, 2.0, scale.clone()).unwrap();
        let unit = TransportProblem::point_mass(1.5, 1.0, 1.0, scale.clone()).unwrap();
        let grid = Grid::new(&scale, None).unwrap();
        let a = solve(&coarse, &grid).unwrap();
        let b = solve(&unit, &grid).unwrap();
        for gi in 0..grid.len() {
            assert_eq!(a.state_at_grid(gi), b.state_at_grid(gi));
        }
    }
}
