//! Crate-wide error type.

/// Everything that can go wrong while building scales, solving, or running
/// scenarios. Variants carry the offending values so messages are actionable.
#[derive(Debug, thiserror::Error)]
#[non_exhaustive]
pub enum Error {
    /// The queried time does not belong to the time scale.
    #[error("time {t} is not a point of the time scale")]
    TimeNotInScale { t: f64 },

    /// Graininess and the forward jump are undefined at the right edge of a
    /// bounded scale.
    #[error("graininess is undefined at the horizon t = {t}")]
    HorizonBoundary { t: f64 },

    /// A range query with `from > to`, or endpoints outside the scale.
    #[error("invalid time range {from}..{to}")]
    InvalidRange { from: f64, to: f64 },

    /// `1 + p*mu(t) = 0` at a right-scattered point: the dynamic exponential
    /// degenerates and cannot be inverted past `t`.
    #[error("regressivity violated at t = {t}: 1 + p*mu = 0 (p = {p}, mu = {mu})")]
    RegressivityViolation { t: f64, p: f64, mu: f64 },

    /// Adaptive quadrature ran out of its evaluation budget before reaching
    /// the requested tolerance.
    #[error(
        "quadrature used all {budget} evaluations before reaching tolerance {tol} \
         (unresolved panel tolerance {estimate:e})"
    )]
    QuadratureFailure { tol: f64, budget: usize, estimate: f64 },

    /// The positivity condition `1 - k*mu(t)/mu_x > 0` fails at a scattered
    /// point, so the scheme would not preserve sign.
    #[error("positivity (CFL) condition violated at t = {t}: 1 - k*mu/mu_x = {factor} (need > 0)")]
    CflViolation { t: f64, factor: f64 },

    /// A spatial index outside the window the solver stored.
    #[error("spatial index {m} is outside the stored window {lo}..={hi}")]
    IndexOutOfWindow { m: i64, lo: i64, hi: i64 },

    /// A time that is in the scale but not one of the stored grid points.
    #[error("time {t} is not a grid point of this solution")]
    TimeNotOnGrid { t: f64 },

    /// Heterogeneous-trial query outside the plan, or `m > n`.
    #[error("trial query out of range: m = {m}, n = {n}, plan has {len} trials")]
    TrialIndexOutOfRange { m: usize, n: usize, len: usize },

    /// The brute-force enumerator is limited to small trial counts.
    #[error("enumeration is limited to n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    /// Reference branch formulas are tabulated only for the first few
    /// spatial indices.
    #[error("no reference branch formula for x = {x}; only x <= 3 are tabulated")]
    BranchUnavailable { x: usize },

    /// The horizon retains too much mass for the requested branch integral
    /// to be meaningful.
    #[error(
        "horizon too short: branch {m} still holds residual {residual:e}, \
         more than 10% of the conserved value {expected:e}"
    )]
    HorizonTooShort { m: i64, residual: f64, expected: f64 },

    /// A grid with no points.
    #[error("empty grid: nothing to solve")]
    HorizonEmpty,

    /// Sections of a sign-indefinite field are not distributions.
    #[error("initial data has negative entries; sections are not distributions")]
    NegativeInitialData,

    /// A structurally invalid time scale (overlap, zero gap, wrong origin...).
    #[error("invalid time scale: {reason}")]
    InvalidScale { reason: String },

    /// A parameter outside its documented domain.
    #[error("parameter `{name}`: {constraint}")]
    InvalidParameter {
        name: &'static str,
        constraint: &'static str,
    },

    /// A scenario file that does not parse or validate; carries the exact
    /// field and the constraint it broke.
    #[error("config field `{field}`: {constraint}")]
    Config { field: String, constraint: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: &str, constraint: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            constraint: constraint.into(),
        }
    }
}
