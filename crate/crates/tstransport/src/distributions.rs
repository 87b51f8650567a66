//! Closed-form reference laws and distribution tables.
//!
//! Sections of the transport field, weighted by the right measure, are
//! classical distributions: Poisson and binomial across space, Erlang,
//! geometric and negative-binomial along time, and splices of these on mixed
//! scales. This module tabulates those laws directly (independently of the
//! solver) so they can serve as cross-checks, and provides the
//! [`DistributionTable`] container both routes share.

use crate::{Error, Result};

/// How the weights of a [`DistributionTable`] are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Point masses at isolated locations.
    Mass,
    /// Cell masses of a sampled density: the weight at location `t_i` is the
    /// integral of the density over the cell `[t_i, t_{i+1})`.
    DensitySampled,
    /// Both kinds of entry appear (mixed time scale).
    Mixed,
}

impl TableKind {
    fn as_str(&self) -> &'static str {
        match self {
            TableKind::Mass => "mass",
            TableKind::DensitySampled => "density-sampled",
            TableKind::Mixed => "mixed",
        }
    }
}

/// A discrete set of `(location, weight)` pairs representing a section of
/// the field or a reference law, normalized so that the weights sum to the
/// relevant delta integral.
///
/// `tail_bound` is an upper bound on the mass the table does not show
/// (spatial window cutoff, truncated support, or mass beyond the horizon),
/// so `total() + tail_bound` approximates the untruncated total.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionTable {
    kind: TableKind,
    entries: Vec<(f64, f64)>,
    tail_bound: f64,
    /// Free-form `key=value` annotations identifying the table (branch,
    /// time, parameters); serialized into the CSV header comment.
    label: String,
}

impl DistributionTable {
    /// Build a table, rejecting negative weights (values below `-1e-14` are
    /// errors; tiny negative rounding dust is clamped to zero).
    pub fn new(
        kind: TableKind,
        entries: Vec<(f64, f64)>,
        tail_bound: f64,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut entries = entries;
        for (loc, w) in &mut entries {
            if !loc.is_finite() || !w.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "entries",
                    constraint: "locations and weights must be finite",
                });
            }
            if *w < -1e-14 {
                return Err(Error::NegativeInitialData);
            }
            if *w < 0.0 {
                *w = 0.0;
            }
        }
        Ok(DistributionTable {
            kind,
            entries,
            tail_bound,
            label: label.into(),
        })
    }

    pub fn kind(&self) -> TableKind {
        self.kind
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }

    /// Sum of the weights.
    pub fn total(&self) -> f64 {
        self.entries.iter().map(|(_, w)| w).sum()
    }

    /// Upper bound on mass missing from the table.
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Location of the largest weight, if the table is non-empty.
    pub fn mode(&self) -> Option<f64> {
        self.entries
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(loc, _)| *loc)
    }

    /// Serialize as CSV: a `#` comment carrying kind, annotations, total and
    /// tail bound, then a `location,weight` header and one row per entry.
    /// Numbers are printed with 17 significant digits so identical tables
    /// serialize byte-identically.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# kind={} {} total={} tail_bound={}\n",
            self.kind.as_str(),
            self.label,
            fmt_float(self.total()),
            fmt_float(self.tail_bound),
        ));
        out.push_str("location,weight\n");
        for (loc, w) in &self.entries {
            out.push_str(&format!("{},{}\n", fmt_float(*loc), fmt_float(*w)));
        }
        out
    }
}

/// Fixed 17-significant-digit scientific formatting used by every file the
/// crate writes; guarantees byte-identical reruns and exact `f64` round-trip.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Poisson point probabilities `e^{-lambda} lambda^m / m!` for
/// `m = 0..=m_max`.
///
/// The returned table is exact up to rounding; its tail bound is the mass
/// beyond `m_max`.
///
/// # Panics
///
/// Panics if `lambda` is negative or not finite.
pub fn poisson_pmf(lambda: f64, m_max: usize) -> DistributionTable {
    assert!(
        lambda.is_finite() && lambda >= 0.0,
        "poisson rate must be finite and nonnegative"
    );
    let mut entries = Vec::with_capacity(m_max + 1);
    let mut term = (-lambda).exp();
    let mut cum = 0.0;
    for m in 0..=m_max {
        entries.push((m as f64, term));
        cum += term;
        term *= lambda / (m as f64 + 1.0);
    }
    let tail = (1.0 - cum).max(0.0);
    DistributionTable::new(
        TableKind::Mass,
        entries,
        tail,
        format!("family=poisson lambda={lambda}"),
    )
    .expect("poisson weights are nonnegative")
}

/// Erlang density of shape `x + 1` and rate `k`:
/// `k^{x+1} t^x e^{-kt} / x!`.
///
/// This is the time profile of branch `x` of a continuous-time field with
/// unit normalization; `x = 0` gives the exponential density `k e^{-kt}`.
pub fn erlang_density(k: f64, x: usize, t: f64) -> f64 {
    assert!(k > 0.0 && t >= 0.0, "need k > 0 and t >= 0");
    if t == 0.0 {
        return if x == 0 { k } else { 0.0 };
    }
    // k * e^{-kt} * (kt)^x / x!, accumulated multiplicatively.
    let kt = k * t;
    let mut term = k * (-kt).exp();
    for j in 1..=x {
        term *= kt / j as f64;
    }
    term
}

/// Binomial point probabilities `C(n, m) p^m (1-p)^{n-m}` for `m = 0..=n`.
///
/// Computed by the stable multiplicative recurrence from `(1-p)^n` upward;
/// no factorials are formed.
///
/// # Panics
///
/// Panics unless `0 <= p <= 1`.
pub fn binomial_pmf(n: usize, p: f64) -> DistributionTable {
    assert!((0.0..=1.0).contains(&p), "need 0 <= p <= 1");
    let q = 1.0 - p;
    let mut entries = Vec::with_capacity(n + 1);
    if p == 1.0 {
        entries.extend((0..n).map(|m| (m as f64, 0.0)));
        entries.push((n as f64, 1.0));
    } else {
        let mut w = q.powi(n as i32);
        for m in 0..=n {
            entries.push((m as f64, w));
            w *= (n - m) as f64 / (m as f64 + 1.0) * (p / q);
        }
    }
    DistributionTable::new(
        TableKind::Mass,
        entries,
        0.0,
        format!("family=binomial n={n} p={p}"),
    )
    .expect("binomial weights are nonnegative")
}

/// Counting-convention negative binomial: the weight at `n` (number of
/// steps) for a fixed spatial branch `m` is
///
/// ```text
///     w(n) = p · C(n, m) (1-p)^{n-m} p^m,        n = m, m+1, ..., n_max.
/// ```
///
/// This is `p` times the lattice field value at branch `m` after `n` steps,
/// i.e. the probability that the particle sits at branch `m` just before a
/// step, times the success probability of that step. Summed over all
/// `n >= m` the weights reach exactly 1, and `m = 0` reduces to the
/// geometric law `p (1-p)^n`.
///
/// Note the convention: the index counts *steps taken so far*, not trials
/// until the `(m+1)`-th success. The textbook negative binomial
/// `C(n-1, r-1) p^r q^{n-r}` with `r = m + 1` is this law shifted by one in
/// `n`. The step-count form is used throughout because it is literally a
/// section of the transport field.
///
/// # Panics
///
/// Panics unless `0 < p < 1` and `n_max >= m`.
pub fn negbinomial_pmf(m: usize, p: f64, n_max: usize) -> DistributionTable {
    assert!(p > 0.0 && p < 1.0, "need 0 < p < 1");
    assert!(n_max >= m, "need n_max >= m");
    let q = 1.0 - p;
    let mut entries = Vec::with_capacity(n_max - m + 1);
    // w(m) = p^{m+1}; w(n+1) = w(n) * q * (n+1) / (n+1-m).
    let mut w = p.powi(m as i32 + 1);
    for n in m..=n_max {
        entries.push((n as f64, w));
        w *= q * (n as f64 + 1.0) / ((n + 1 - m) as f64);
    }
    let tail = (1.0 - entries.iter().map(|(_, w)| w).sum::<f64>()).max(0.0);
    DistributionTable::new(
        TableKind::Mass,
        entries,
        tail,
        format!("family=negbinomial m={m} p={p}"),
    )
    .expect("negative binomial weights are nonnegative")
}

/// A finite sequence of Bernoulli success probabilities, one per trial, for
/// transport on a scale whose `i`-th gap is `p_i` (with `k = mu_x = 1`, so
/// the step weight of trial `i` is exactly `p_i`).
#[derive(Debug, Clone, PartialEq)]
pub struct HeterogeneousTrialPlan {
    probs: Vec<f64>,
}

impl HeterogeneousTrialPlan {
    /// Validate `0 < p_i < 1` for every trial.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidParameter {
                name: "probs",
                constraint: "needs at least one trial",
            });
        }
        if probs.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return Err(Error::InvalidParameter {
                name: "probs",
                constraint: "every success probability must lie strictly in (0, 1)",
            });
        }
        Ok(HeterogeneousTrialPlan { probs })
    }

    /// The plan whose `i`-th trial (1-based) succeeds with probability
    /// `1/(i+1)`: the harmonic gap sequence.
    pub fn harmonic(n: usize) -> Result<Self> {
        HeterogeneousTrialPlan::new((1..=n).map(|i| 1.0 / (i as f64 + 1.0)).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Probability of exactly `m` successes in the first `n` trials of `plan`,
/// by the forward recurrence
///
/// ```text
///     u_i(m) = (1 - p_i) u_{i-1}(m) + p_i u_{i-1}(m - 1),
/// ```
///
/// which is one scattered transport step per trial. `O(n^2)` time, exact up
/// to rounding.
///
/// # Errors
///
/// [`Error::TrialIndexOutOfRange`] if `n` exceeds the plan or `m > n`.
pub fn heterogeneous_solution(plan: &HeterogeneousTrialPlan, m: usize, n: usize) -> Result<f64> {
    if n > plan.len() || m > n {
        return Err(Error::TrialIndexOutOfRange {
            m,
            n,
            len: plan.len(),
        });
    }
    let mut u = vec![1.0];
    for i in 0..n {
        let p = plan.probs[i];
        let mut next = vec![0.0; u.len() + 1];
        for mm in 0..next.len() {
            let stay = if mm < u.len() { u[mm] } else { 0.0 };
            let hop = if mm > 0 { u[mm - 1] } else { 0.0 };
            next[mm] = (1.0 - p) * stay + p * hop;
        }
        u = next;
    }
    Ok(u[m])
}

/// Maximum trial count [`heterogeneous_oracle`] will enumerate.
pub const ORACLE_MAX_TRIALS: usize = 14;

/// Brute-force check value for [`heterogeneous_solution`]: sums the
/// probability of every success/failure pattern with `m` successes among
/// `n` trials (`C(n, m)` products). Exponential in `n`, limited to
/// `n <= 14`.
///
/// # Errors
///
/// [`Error::TooLarge`] beyond the enumeration limit;
/// [`Error::TrialIndexOutOfRange`] as for the recurrence.
pub fn heterogeneous_oracle(plan: &HeterogeneousTrialPlan, m: usize, n: usize) -> Result<f64> {
    if n > ORACLE_MAX_TRIALS {
        return Err(Error::TooLarge {
            n,
            max: ORACLE_MAX_TRIALS,
        });
    }
    if n > plan.len() || m > n {
        return Err(Error::TrialIndexOutOfRange {
            m,
            n,
            len: plan.len(),
        });
    }
    let mut total = 0.0;
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != m {
            continue;
        }
        let mut prob = 1.0;
        for (i, &p) in plan.probs[..n].iter().enumerate() {
            prob *= if mask & (1 << i) != 0 { p } else { 1.0 - p };
        }
        total += prob;
    }
    Ok(total)
}

/// Reference branch values for transport on the scale
/// `U_i [i, i + 1/2]` with `k = mu_x = A = 1`: closed forms for the first
/// four spatial branches on the `n`-th interval (`t` in `[n, n + 1/2]`).
///
/// ```text
///     u(0, t) = 2^{-n} e^{n/2 - t}
///     u(1, t) = (2t + n) / 2^{n+1} · e^{n/2 - t}
///     u(2, t) = (4t² + 4nt + n² - 4n) / (2! · 2^{n+2}) · e^{n/2 - t}
///     u(3, t) = (8t³ + 12nt² + 6(n² - 4n)t + n³ - 12n² + 16n)
///               / (3! · 2^{n+3}) · e^{n/2 - t}
/// ```
///
/// Branches `x > 3` have no tabulated closed form (the solver itself is the
/// way to compute them) and return [`Error::BranchUnavailable`].
///
/// # Errors
///
/// [`Error::BranchUnavailable`] for `x > 3`;
/// [`Error::TimeNotInScale`] if `t` is not in `[n, n + 1/2]` (up to snap
/// tolerance).
pub fn stopstart_branch(x: usize, n: usize, t: f64) -> Result<f64> {
    if x > 3 {
        return Err(Error::BranchUnavailable { x });
    }
    let nf = n as f64;
    if t < nf - crate::timescale::SNAP_TOL || t > nf + 0.5 + crate::timescale::SNAP_TOL {
        return Err(Error::TimeNotInScale { t });
    }
    let t = t.clamp(nf, nf + 0.5);
    let envelope = (nf / 2.0 - t).exp() / 2f64.powi(n as i32);
    let value = match x {
        0 => envelope,
        1 => (2.0 * t + nf) * envelope / 2.0,
        2 => {
            let poly = 4.0 * t * t + 4.0 * nf * t + nf * nf - 4.0 * nf;
            poly * envelope / 8.0
        }
        _ => {
            let poly = 8.0 * t.powi(3)
                + 12.0 * nf * t * t
                + 6.0 * (nf * nf - 4.0 * nf) * t
                + nf.powi(3) - 12.0 * nf * nf + 16.0 * nf;
            poly * envelope / 48.0
        }
    };
    Ok(value)
}

/// Total-variation distance between two tables over the union of their
/// integer locations, counting each table's tail bound as mass the other
/// does not match.
pub fn tv_distance(a: &DistributionTable, b: &DistributionTable) -> f64 {
    use std::collections::BTreeMap;
    let mut merged: BTreeMap<i64, (f64, f64)> = BTreeMap::new();
    for (loc, w) in a.entries() {
        merged.entry(loc.round() as i64).or_insert((0.0, 0.0)).0 += w;
    }
    for (loc, w) in b.entries() {
        merged.entry(loc.round() as i64).or_insert((0.0, 0.0)).1 += w;
    }
    let sum: f64 = merged.values().map(|(x, y)| (x - y).abs()).sum();
    0.5 * (sum + a.tail_bound() + b.tail_bound())
}

/// Total-variation distance between the lattice space section
/// `binomial(n, rate/n)` and its continuous-time limit `Poisson(rate)`.
///
/// Both laws are the space sections of the same transport problem at the
/// matched time `t` with `n` steps taken (`mu_t = t/n`, `k = rate/t`,
/// `mu_x = 1`), so this measures how fast the lattice field converges to
/// the continuous field as the lattice refines. The classical rate is
/// `O(1/n)`.
///
/// # Panics
///
/// Panics unless `n >= 1` and `0 <= rate <= n`.
pub fn poisson_limit_distance(n: usize, rate: f64) -> f64 {
    assert!(n >= 1, "need at least one step");
    assert!(
        rate >= 0.0 && rate <= n as f64,
        "need 0 <= rate <= n for a valid step weight"
    );
    let binom = binomial_pmf(n, rate / n as f64);
    let pois = poisson_pmf(rate, n);
    tv_distance(&binom, &pois)
}
