//! Structural checks on solved fields: sign preservation, conservation of
//! the spatial sum, the time-integral balance per spatial branch, and the
//! parameter conditions under which sections are probability laws.
//!
//! Every check here recomputes its quantity from the stored field — sums,
//! honest quadrature of the evaluated field, closed-form residuals — rather
//! than trusting any invariant the solver maintains internally. Tolerances
//! are explicit and carried in the reports.

use crate::quad::{adaptive_simpson, DEFAULT_BUDGET};
use crate::transport::{SolutionField, TransportProblem};
use crate::{Error, Result};

/// Values above this floor count as nonnegative (rounding dust allowance).
pub const SIGN_FLOOR: f64 = -1e-14;

/// Base absolute tolerance for spatial-sum drift.
pub const SPACE_TOL: f64 = 1e-10;

/// Base absolute tolerance for the per-branch time-integral balance.
pub const TIME_TOL: f64 = 1e-8;

/// Tolerance on parameter identities (`k = 1`, normalization products).
pub const PDF_PARAM_TOL: f64 = 1e-12;

/// Fraction of the expected balance the beyond-horizon residual may reach
/// before the horizon is declared too short to audit.
pub const RESIDUAL_CAP: f64 = 0.1;

/// Outcome of the sign-preservation check.
#[derive(Debug, Clone)]
pub struct SignReport {
    pub pass: bool,
    /// Most negative value seen anywhere in the field.
    pub worst: f64,
    pub worst_t: f64,
    pub worst_m: i64,
}

/// Every stored value must sit above [`SIGN_FLOOR`].
///
/// # Errors
///
/// [`Error::NegativeInitialData`]: sign preservation is only meaningful
/// for nonnegative data, so sign-indefinite fields cannot be audited this
/// way.
pub fn check_sign(field: &SolutionField) -> Result<SignReport> {
    if !field.ic_nonnegative() {
        return Err(Error::NegativeInitialData);
    }
    let mut worst = f64::INFINITY;
    let mut worst_t = 0.0;
    let mut worst_m = field.m_lo();
    for (gi, p) in field.grid().points().iter().enumerate() {
        for (j, &v) in field.state_at_grid(gi).iter().enumerate() {
            if v < worst {
                worst = v;
                worst_t = p.t;
                worst_m = field.m_lo() + j as i64;
            }
        }
    }
    if !worst.is_finite() {
        worst = 0.0;
    }
    Ok(SignReport {
        pass: worst >= SIGN_FLOOR,
        worst,
        worst_t,
        worst_m,
    })
}

/// Outcome of the spatial-sum conservation check.
#[derive(Debug, Clone)]
pub struct SpaceConservationReport {
    /// The conserved quantity `mu_x · Σ_m u(m, 0)`.
    pub expected: f64,
    /// Largest deviation of `mu_x · Σ_m u(m, t)` over all grid times.
    pub max_drift: f64,
    pub worst_t: f64,
    /// Base tolerance; the per-time allowance also adds the windowed tail.
    pub tol: f64,
    pub pass: bool,
}

/// The weighted spatial sum must equal its initial value at every grid time,
/// within `tol` plus the windowed-away mass bound at that time.
pub fn check_space_conservation(field: &SolutionField, tol: f64) -> SpaceConservationReport {
    let mu_x = field.mu_x();
    let expected = mu_x * field.ic_total();
    let mut max_drift = 0.0;
    let mut worst_t = 0.0;
    let mut pass = true;
    for (gi, p) in field.grid().points().iter().enumerate() {
        let sum: f64 = field.state_at_grid(gi).iter().sum();
        let drift = (mu_x * sum - expected).abs();
        if drift > max_drift {
            max_drift = drift;
            worst_t = p.t;
        }
        if drift > tol + mu_x * field.tail_at_grid(gi) {
            pass = false;
        }
    }
    SpaceConservationReport {
        expected,
        max_drift,
        worst_t,
        tol,
        pass,
    }
}

/// Balance sheet for one spatial branch: delta integral over the horizon
/// plus the closed-form residual beyond it against the initial cumulative
/// mass scaled by `mu_x / k`.
#[derive(Debug, Clone)]
pub struct BranchBalance {
    pub m: i64,
    /// `(mu_x/k) · Σ_{i <= m} u(i, 0)`.
    pub expected: f64,
    /// Delta integral of the branch over `[0, t_max)`: graininess-weighted
    /// scattered values plus adaptive quadrature of the evaluated field.
    pub integral: f64,
    /// Exact remaining integral beyond the horizon,
    /// `(mu_x/k) · Σ_{i <= m} u(i, t_max)`.
    pub residual: f64,
    /// `|integral + residual - expected|`.
    pub defect: f64,
}

/// Outcome of the time-integral balance check.
#[derive(Debug, Clone)]
pub struct TimeConservationReport {
    pub branches: Vec<BranchBalance>,
    pub max_defect: f64,
    /// Total allowance: base tolerance plus accumulated quadrature budget
    /// plus the windowing contribution.
    pub allowed: f64,
    pub pass: bool,
}

/// Audit the time-integral balance for the given branches.
///
/// The integral over `[0, t_max)` is recomputed from scratch — graininess
/// times stored values at scattered points, adaptive Simpson quadrature of
/// [`SolutionField::value`] on each interval — so this check exercises the
/// field evaluation path, not the solver's own bookkeeping.
///
/// # Errors
///
/// [`Error::HorizonTooShort`] when the beyond-horizon residual exceeds
/// [`RESIDUAL_CAP`] of the expected balance (the audit would be vacuous);
/// [`Error::QuadratureFailure`] if an interval integral cannot be resolved.
pub fn check_time_conservation(
    field: &SolutionField,
    branches: &[i64],
    quad_tol: f64,
    tol: f64,
) -> Result<TimeConservationReport> {
    let scale = field.scale().clone();
    let mu_x = field.mu_x();
    let k = field.k();
    let horizon = field.grid().len() - 1;
    let n_intervals = scale.intervals().count();
    let measure =
        scale.continuous_length() + scale.scattered_points().map(|(_, mu)| mu).sum::<f64>();

    let mut rows = Vec::with_capacity(branches.len());
    let mut max_defect = 0.0f64;
    for &m in branches {
        let expected = mu_x / k
            * field.initial_values()[..((m - field.m_lo() + 1)
                .clamp(0, field.initial_values().len() as i64)
                as usize)]
                .iter()
                .sum::<f64>();
        let residual = mu_x / k * field.cumulative_below(m, horizon);
        if expected > 0.0 && residual > RESIDUAL_CAP * expected {
            return Err(Error::HorizonTooShort {
                m,
                residual,
                expected,
            });
        }
        let mut integral = 0.0;
        for (t, mu) in scale.scattered_points() {
            let gi = field
                .grid()
                .index_of(t)
                .expect("scattered points are grid points");
            integral += mu * field.value_at_grid(m, gi);
        }
        for (a, b) in scale.intervals() {
            integral += adaptive_simpson(
                |s| field.value(m, s).unwrap_or(0.0),
                a,
                b,
                quad_tol,
                DEFAULT_BUDGET,
            )?;
        }
        let defect = (integral + residual - expected).abs();
        max_defect = max_defect.max(defect);
        rows.push(BranchBalance {
            m,
            expected,
            integral,
            residual,
            defect,
        });
    }
    let allowed = tol + quad_tol * n_intervals as f64 + field.max_tail() * measure;
    Ok(TimeConservationReport {
        pass: max_defect <= allowed,
        branches: rows,
        max_defect,
        allowed,
    })
}

/// Raw parameter conditions and the verdicts on when sections are exact
/// probability laws.
#[derive(Debug, Clone)]
pub struct PdfConditionReport {
    /// `|k - 1| <= PDF_PARAM_TOL`.
    pub k_is_one: bool,
    /// `|A·mu_x - 1| <= PDF_PARAM_TOL`, `A` the total initial mass.
    pub space_normalized: bool,
    /// `|A·mu_x/k - 1| <= PDF_PARAM_TOL`.
    pub time_normalized: bool,
    /// Strict positivity `1 - k·mu(t)/mu_x > 0` everywhere.
    pub admissible: bool,
    /// `sup mu(t) < mu_x` (the raw graininess comparison).
    pub graininess_below_mu_x: bool,
    /// Time sections are probability laws: time-normalized and admissible.
    pub time_sections_pdf: bool,
    /// Space sections are probability laws: space-normalized and admissible.
    pub space_sections_pdf: bool,
    /// Both at once (equivalent to `k = 1`, `A·mu_x = 1`, admissible).
    pub both: bool,
}

/// Decide when the induced sections integrate to one.
///
/// The verdicts require admissibility (strict positivity of every step
/// factor) rather than the raw graininess comparison: positivity is what
/// the balance identities rest on, and the two coincide exactly when
/// `k = 1`. Both raw conditions are still reported individually.
pub fn check_pdf_conditions(problem: &TransportProblem) -> PdfConditionReport {
    let a_total = problem.ic_total();
    let k_is_one = (problem.k - 1.0).abs() <= PDF_PARAM_TOL;
    let space_normalized = (a_total * problem.mu_x - 1.0).abs() <= PDF_PARAM_TOL;
    let time_normalized = (a_total * problem.mu_x / problem.k - 1.0).abs() <= PDF_PARAM_TOL;
    let admissible = problem.check_regressivity().pass;
    let graininess_below_mu_x = problem.scale.max_graininess() < problem.mu_x;
    let time_sections_pdf = time_normalized && admissible;
    let space_sections_pdf = space_normalized && admissible;
    PdfConditionReport {
        k_is_one,
        space_normalized,
        time_normalized,
        admissible,
        graininess_below_mu_x,
        time_sections_pdf,
        space_sections_pdf,
        both: time_sections_pdf && space_sections_pdf,
    }
}

/// All checks bundled for one solved problem.
#[derive(Debug, Clone)]
pub struct ConservationReport {
    pub sign: SignReport,
    pub space: SpaceConservationReport,
    pub time: TimeConservationReport,
    pub pdf: PdfConditionReport,
}

impl ConservationReport {
    pub fn pass(&self) -> bool {
        self.sign.pass && self.space.pass && self.time.pass
    }
}

/// Run the full audit with default tolerances on the given branches.
///
/// # Errors
///
/// Propagates [`Error::NegativeInitialData`], [`Error::HorizonTooShort`],
/// and quadrature failures from the individual checks.
pub fn full_report(
    problem: &TransportProblem,
    field: &SolutionField,
    branches: &[i64],
    quad_tol: f64,
) -> Result<ConservationReport> {
    Ok(ConservationReport {
        sign: check_sign(field)?,
        space: check_space_conservation(field, SPACE_TOL),
        time: check_time_conservation(field, branches, quad_tol, TIME_TOL)?,
        pdf: check_pdf_conditions(problem),
    })
}
