//! Bounded time scales: finite unions of closed intervals and isolated
//! points, starting at zero.
//!
//! A time scale here is the temporal domain of the transport solver. It is
//! stored as an ordered list of [`Component`]s separated by strictly positive
//! gaps. Right-scattered points (component right endpoints followed by a gap)
//! carry graininess `mu(t) > 0`; points inside an interval are right-dense
//! with `mu(t) = 0`. The right edge of the last component is the horizon
//! `t_max`, where graininess is undefined.
//!
//! The module provides the calculus the solver needs: graininess and forward
//! jump queries, the positivity check for the scheme, the dynamic exponential
//! `e_p(t; t0)` for constant `p`, and the delta integral (weighted sums at
//! scattered points, adaptive quadrature on continuous parts).

use crate::quad;
use crate::{Error, Result};

/// Absolute tolerance used to snap queried times onto component endpoints
/// and grid points.
pub const SNAP_TOL: f64 = 1e-12;

/// One maximal piece of a time scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    /// A closed interval `[start, end]` with `end > start`.
    Interval { start: f64, end: f64 },
    /// An isolated point.
    Point { at: f64 },
}

impl Component {
    pub fn start(&self) -> f64 {
        match *self {
            Component::Interval { start, .. } => start,
            Component::Point { at } => at,
        }
    }

    pub fn end(&self) -> f64 {
        match *self {
            Component::Interval { end, .. } => end,
            Component::Point { at } => at,
        }
    }

    fn is_interval(&self) -> bool {
        matches!(self, Component::Interval { .. })
    }
}

/// A bounded time scale `T ⊂ [0, t_max]` with `min T = 0` and `t_max ∈ T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    components: Vec<Component>,
}

/// One positivity violation found by [`TimeScale::check_regressivity`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositivityViolation {
    /// The right-scattered point where the condition fails.
    pub t: f64,
    /// Its graininess.
    pub mu: f64,
    /// The offending factor `1 - k*mu/mu_x` (`<= 0`).
    pub factor: f64,
}

/// Outcome of the scheme positivity check `1 - k*mu(t)/mu_x > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressivityReport {
    pub pass: bool,
    /// Every scattered point where the factor is not strictly positive.
    pub violations: Vec<PositivityViolation>,
}

impl TimeScale {
    /// Build a scale from components, validating the structural invariants:
    /// the scale starts at 0, components are strictly ordered with gaps wider
    /// than `2 * SNAP_TOL`, and intervals are non-degenerate.
    pub fn new(components: Vec<Component>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidScale {
                reason: "a time scale needs at least one component".into(),
            });
        }
        let first = components[0].start();
        if first != 0.0 {
            return Err(Error::InvalidScale {
                reason: format!("the scale must start at 0, found {first}"),
            });
        }
        for c in &components {
            let (s, e) = (c.start(), c.end());
            if !s.is_finite() || !e.is_finite() {
                return Err(Error::InvalidScale {
                    reason: "component endpoints must be finite".into(),
                });
            }
            if c.is_interval() && e - s <= 2.0 * SNAP_TOL {
                return Err(Error::InvalidScale {
                    reason: format!("degenerate interval [{s}, {e}]"),
                });
            }
        }
        for w in components.windows(2) {
            let gap = w[1].start() - w[0].end();
            if gap <= 2.0 * SNAP_TOL {
                return Err(Error::InvalidScale {
                    reason: format!(
                        "components must be separated by a positive gap; found {gap:e} \
                         between {} and {}",
                        w[0].end(),
                        w[1].start()
                    ),
                });
            }
        }
        Ok(TimeScale { components })
    }

    /// The single interval `[0, t_max]` (fully continuous time).
    pub fn single_interval(t_max: f64) -> Result<Self> {
        TimeScale::new(vec![Component::Interval {
            start: 0.0,
            end: t_max,
        }])
    }

    /// The uniform lattice `{0, step, ..., n*step}` (fully discrete time,
    /// `n` gaps of width `step`).
    pub fn uniform(step: f64, n: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() {
            return Err(Error::InvalidScale {
                reason: format!("uniform step must be positive, got {step}"),
            });
        }
        if n == 0 {
            return Err(Error::InvalidScale {
                reason: "uniform scale needs at least one step".into(),
            });
        }
        let pts = (0..=n)
            .map(|i| Component::Point { at: i as f64 * step })
            .collect();
        TimeScale::new(pts)
    }

    /// `n` "on" intervals of length `on` separated by "off" gaps of length
    /// `off`: the union of `[i*(on+off), i*(on+off) + on]` for `i < n`.
    pub fn stop_start(on: f64, off: f64, n: usize) -> Result<Self> {
        if !(on > 0.0 && off > 0.0) {
            return Err(Error::InvalidScale {
                reason: format!("stop-start lengths must be positive, got on={on}, off={off}"),
            });
        }
        if n == 0 {
            return Err(Error::InvalidScale {
                reason: "stop-start scale needs at least one interval".into(),
            });
        }
        let comps = (0..n)
            .map(|i| {
                let s = i as f64 * (on + off);
                Component::Interval { start: s, end: s + on }
            })
            .collect();
        TimeScale::new(comps)
    }

    /// The points `{0, 1/2, 1/2 + 1/3, ...}`: `n` gaps where the `i`-th gap
    /// has width `1/(i+1)`.
    pub fn harmonic(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidScale {
                reason: "harmonic scale needs at least one gap".into(),
            });
        }
        let mut t = 0.0;
        let mut pts = vec![Component::Point { at: 0.0 }];
        for i in 1..=n {
            t += 1.0 / (i as f64 + 1.0);
            pts.push(Component::Point { at: t });
        }
        TimeScale::new(pts)
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    /// The right edge of the scale.
    pub fn t_max(&self) -> f64 {
        self.components.last().expect("non-empty").end()
    }

    /// Locate `t`: the index of the component containing it and the snapped
    /// representative (endpoints within [`SNAP_TOL`] are canonicalized).
    fn locate(&self, t: f64) -> Option<(usize, f64)> {
        if !t.is_finite() {
            return None;
        }
        // Index of the first component starting after t (with snap slack).
        let idx = self
            .components
            .partition_point(|c| c.start() <= t + SNAP_TOL);
        if idx == 0 {
            return None;
        }
        let ci = idx - 1;
        let c = &self.components[ci];
        let (s, e) = (c.start(), c.end());
        if (t - e).abs() <= SNAP_TOL {
            return Some((ci, e));
        }
        if (t - s).abs() <= SNAP_TOL {
            return Some((ci, s));
        }
        if c.is_interval() && t > s && t < e {
            return Some((ci, t));
        }
        None
    }

    /// Whether `t` belongs to the scale (up to [`SNAP_TOL`] at endpoints).
    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_some()
    }

    /// Component index and snapped representative of `t`, if in the scale.
    pub(crate) fn locate_component(&self, t: f64) -> Option<(usize, f64)> {
        self.locate(t)
    }

    /// The canonical representative of `t` in the scale, if any.
    pub fn snap(&self, t: f64) -> Option<f64> {
        self.locate(t).map(|(_, s)| s)
    }

    /// Graininess `mu(t)`: 0 at right-dense points, the gap width at
    /// right-scattered points. Undefined (an error) at the horizon.
    pub fn graininess(&self, t: f64) -> Result<f64> {
        let (ci, ts) = self.locate(t).ok_or(Error::TimeNotInScale { t })?;
        let c = &self.components[ci];
        if ts < c.end() {
            return Ok(0.0); // interior or left endpoint of an interval
        }
        match self.components.get(ci + 1) {
            Some(next) => Ok(next.start() - ts),
            None => Err(Error::HorizonBoundary { t: ts }),
        }
    }

    /// Forward jump `sigma(t) = t + mu(t)`.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        let ts = self.snap(t).ok_or(Error::TimeNotInScale { t })?;
        Ok(ts + self.graininess(ts)?)
    }

    /// All right-scattered points as `(t, mu)` pairs, increasing in `t`.
    pub fn scattered_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.components.windows(2).map(|w| {
            let t = w[0].end();
            (t, w[1].start() - t)
        })
    }

    /// All continuous parts as `(start, end)` pairs.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.components.iter().filter_map(|c| match *c {
            Component::Interval { start, end } => Some((start, end)),
            Component::Point { .. } => None,
        })
    }

    /// Largest graininess over the scale (0 if there are no scattered points).
    pub fn max_graininess(&self) -> f64 {
        self.scattered_points()
            .map(|(_, mu)| mu)
            .fold(0.0, f64::max)
    }

    /// Total length of the continuous parts.
    pub fn continuous_length(&self) -> f64 {
        self.intervals().map(|(a, b)| b - a).sum()
    }

    /// Check the scheme positivity condition `1 - k*mu(t)/mu_x > 0` at every
    /// right-scattered point. The boundary case `= 0` counts as a violation.
    pub fn check_regressivity(&self, k: f64, mu_x: f64) -> RegressivityReport {
        let mut violations = Vec::new();
        for (t, mu) in self.scattered_points() {
            let factor = 1.0 - k * mu / mu_x;
            if factor <= 0.0 {
                violations.push(PositivityViolation { t, mu, factor });
            }
        }
        RegressivityReport {
            pass: violations.is_empty(),
            violations,
        }
    }

    /// The dynamic exponential `e_p(t; t0)` for constant `p`:
    /// `exp(p * L) * prod (1 + p*mu(s))` where `L` is the Lebesgue length of
    /// the continuous parts of `[t0, t)` and the product runs over its
    /// right-scattered points.
    ///
    /// Errors with [`Error::RegressivityViolation`] if some factor is zero,
    /// and [`Error::InvalidRange`] if `t0 > t`.
    pub fn dynamic_exp(&self, p: f64, t: f64, t0: f64) -> Result<f64> {
        let t0s = self.snap(t0).ok_or(Error::TimeNotInScale { t: t0 })?;
        let ts = self.snap(t).ok_or(Error::TimeNotInScale { t })?;
        if t0s > ts {
            return Err(Error::InvalidRange { from: t0s, to: ts });
        }
        let mut cont = 0.0;
        for (a, b) in self.intervals() {
            let lo = a.max(t0s);
            let hi = b.min(ts);
            if hi > lo {
                cont += hi - lo;
            }
        }
        let mut product = 1.0;
        for (s, mu) in self.scattered_points() {
            if s >= t0s && s < ts {
                let factor = 1.0 + p * mu;
                if factor == 0.0 {
                    return Err(Error::RegressivityViolation { t: s, p, mu });
                }
                product *= factor;
            }
        }
        Ok((p * cont).exp() * product)
    }

    /// Delta integral of `f` over `[t_from, t_to)`: graininess-weighted sums
    /// at right-scattered points plus adaptive Simpson quadrature (absolute
    /// tolerance `tol` per continuous part) on intervals.
    pub fn delta_integral<F: Fn(f64) -> f64>(
        &self,
        f: F,
        t_from: f64,
        t_to: f64,
        tol: f64,
    ) -> Result<f64> {
        let from = self.snap(t_from).ok_or(Error::TimeNotInScale { t: t_from })?;
        let to = self.snap(t_to).ok_or(Error::TimeNotInScale { t: t_to })?;
        if from > to {
            return Err(Error::InvalidRange { from, to });
        }
        let mut total = 0.0;
        for (s, mu) in self.scattered_points() {
            if s >= from && s < to {
                total += mu * f(s);
            }
        }
        for (a, b) in self.intervals() {
            let lo = a.max(from);
            let hi = b.min(to);
            if hi > lo {
                total += quad::adaptive_simpson(&f, lo, hi, tol, quad::DEFAULT_BUDGET)?;
            }
        }
        Ok(total)
    }

    /// Restrict the scale to `[0, t_max]`. If `t_max` falls in a gap, the
    /// scale ends at the last point before the gap.
    pub fn truncate(&self, t_max: f64) -> Result<TimeScale> {
        if !(t_max > 0.0) {
            return Err(Error::InvalidScale {
                reason: format!("truncation horizon must be positive, got {t_max}"),
            });
        }
        let mut comps = Vec::new();
        for c in &self.components {
            if c.start() > t_max + SNAP_TOL {
                break;
            }
            match *c {
                Component::Point { at } => comps.push(Component::Point { at }),
                Component::Interval { start, end } => {
                    if end <= t_max + SNAP_TOL {
                        comps.push(Component::Interval { start, end });
                    } else if t_max - start > 2.0 * SNAP_TOL {
                        comps.push(Component::Interval { start, end: t_max });
                    } else {
                        comps.push(Component::Point { at: start });
                    }
                }
            }
        }
        TimeScale::new(comps)
    }

    /// Extend the scale to reach `t_max` by repeating its trailing pattern
    /// (last gap + last component). A single-interval scale stretches its
    /// interval; a single isolated point cannot be extended.
    pub fn extend_periodic(&self, t_max: f64) -> Result<TimeScale> {
        if t_max <= self.t_max() + SNAP_TOL {
            return self.truncate(t_max);
        }
        let mut comps = self.components.clone();
        if comps.len() == 1 {
            return match comps[0] {
                Component::Interval { start, .. } => {
                    TimeScale::new(vec![Component::Interval { start, end: t_max }])
                }
                Component::Point { .. } => Err(Error::InvalidScale {
                    reason: "cannot extend a single-point scale; no pattern to repeat".into(),
                }),
            };
        }
        let last = comps[comps.len() - 1];
        let prev_end = comps[comps.len() - 2].end();
        let gap = last.start() - prev_end;
        let len = last.end() - last.start();
        let mut end = last.end();
        while end + SNAP_TOL < t_max {
            let start = end + gap;
            if start > t_max + SNAP_TOL {
                break;
            }
            end = (start + len).min(t_max);
            comps.push(if len > 0.0 && end - start > 2.0 * SNAP_TOL {
                Component::Interval { start, end }
            } else {
                end = start;
                Component::Point { at: start }
            });
        }
        TimeScale::new(comps)
    }
}

/// One node of an output grid over a time scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub t: f64,
    /// Graininess at `t`; positive exactly at right-scattered points.
    /// The horizon point stores 0.
    pub mu: f64,
}

impl GridPoint {
    pub fn is_scattered(&self) -> bool {
        self.mu > 0.0
    }
}

/// An ordered sampling of a time scale: every scattered point and interval
/// endpoint, plus equispaced interior samples of each interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    scale: TimeScale,
    points: Vec<GridPoint>,
    /// Per component: (first grid index, last grid index) inclusive.
    spans: Vec<(usize, usize)>,
}

/// Default number of output subintervals per continuous component when no
/// explicit output step is requested.
pub const DEFAULT_SAMPLES_PER_INTERVAL: usize = 64;

impl Grid {
    /// Sample `scale` with output step `h_out` on intervals (`None` means
    /// each interval is split into [`DEFAULT_SAMPLES_PER_INTERVAL`] cells).
    /// Interval endpoints always land on the grid exactly.
    pub fn new(scale: &TimeScale, h_out: Option<f64>) -> Result<Grid> {
        if let Some(h) = h_out {
            if !(h > 0.0) || !h.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "h_out",
                    constraint: "must be positive and finite",
                });
            }
        }
        let mut points = Vec::new();
        let mut spans = Vec::new();
        let ncomp = scale.components().len();
        for (ci, c) in scale.components().iter().enumerate() {
            let first = points.len();
            let gap_mu = if ci + 1 < ncomp {
                scale.components()[ci + 1].start() - c.end()
            } else {
                0.0
            };
            match *c {
                Component::Point { at } => {
                    points.push(GridPoint { t: at, mu: gap_mu });
                }
                Component::Interval { start, end } => {
                    let len = end - start;
                    let nsub = match h_out {
                        Some(h) => (len / h).ceil().max(1.0) as usize,
                        None => DEFAULT_SAMPLES_PER_INTERVAL,
                    };
                    let h = len / nsub as f64;
                    for i in 0..nsub {
                        points.push(GridPoint {
                            t: start + i as f64 * h,
                            mu: 0.0,
                        });
                    }
                    points.push(GridPoint { t: end, mu: gap_mu });
                }
            }
            spans.push((first, points.len() - 1));
        }
        Ok(Grid {
            scale: scale.clone(),
            points,
            spans,
        })
    }

    pub fn scale(&self) -> &TimeScale {
        &self.scale
    }

    pub fn points(&self) -> &[GridPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Grid index whose time matches `t` within [`SNAP_TOL`].
    pub fn index_of(&self, t: f64) -> Option<usize> {
        let idx = self.points.partition_point(|p| p.t < t - SNAP_TOL);
        if idx < self.points.len() && (self.points[idx].t - t).abs() <= SNAP_TOL {
            Some(idx)
        } else {
            None
        }
    }

    /// Inclusive grid-index range covering component `ci`.
    pub(crate) fn component_span(&self, ci: usize) -> (usize, usize) {
        self.spans[ci]
    }

    pub(crate) fn component_count(&self) -> usize {
        self.spans.len()
    }
}
