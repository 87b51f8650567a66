//! Adaptive Simpson quadrature with a hard evaluation budget.
//!
//! This is the generic fallback used by [`crate::timescale::TimeScale::delta_integral`]
//! for the continuous parts of a scale. Solver output is integrated exactly
//! elsewhere; this routine makes no smoothness assumption beyond what Simpson
//! needs.

use crate::{Error, Result};

/// Default number of integrand evaluations a single integral may spend.
pub const DEFAULT_BUDGET: usize = 1_000_000;

/// Default absolute tolerance for quadrature.
pub const DEFAULT_TOL: f64 = 1e-10;

struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
}

/// Integrate `f` over `[a, b]` to absolute tolerance `tol`, spending at most
/// `budget` evaluations of `f`.
///
/// The interval is pre-split into eight panels so symmetric integrands cannot
/// fool the error estimate, then each panel is refined adaptively with the
/// usual Richardson correction.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    budget: usize,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(Error::InvalidRange { from: a, to: b });
    }
    if a == b {
        return Ok(0.0);
    }
    let mut evals: usize = 0;
    let eval = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    const PRESPLIT: usize = 8;
    let h = (b - a) / PRESPLIT as f64;
    let mut stack: Vec<Panel> = Vec::with_capacity(64);
    for i in 0..PRESPLIT {
        let pa = a + i as f64 * h;
        let pb = if i + 1 == PRESPLIT { b } else { pa + h };
        let pm = 0.5 * (pa + pb);
        let fa = eval(pa, &mut evals);
        let fm = eval(pm, &mut evals);
        let fb = eval(pb, &mut evals);
        let whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
        stack.push(Panel {
            a: pa,
            b: pb,
            fa,
            fm,
            fb,
            whole,
            tol: tol / PRESPLIT as f64,
        });
    }

    let mut total = 0.0;
    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let lm = 0.5 * (p.a + m);
        let rm = 0.5 * (m + p.b);
        if evals + 2 > budget {
            return Err(Error::QuadratureFailure {
                tol,
                budget,
                estimate: p.tol,
            });
        }
        let flm = eval(lm, &mut evals);
        let frm = eval(rm, &mut evals);
        let left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
        let right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
        let delta = left + right - p.whole;
        // Numerically degenerate subdivision: accept what we have.
        if delta.abs() <= 15.0 * p.tol || m <= p.a || m >= p.b {
            total += left + right + delta / 15.0;
        } else {
            stack.push(Panel {
                a: p.a,
                b: m,
                fa: p.fa,
                fm: flm,
                fb: p.fm,
                whole: left,
                tol: 0.5 * p.tol,
            });
            stack.push(Panel {
                a: m,
                b: p.b,
                fa: p.fm,
                fm: frm,
                fb: p.fb,
                whole: right,
                tol: 0.5 * p.tol,
            });
        }
    }
    Ok(total)
}
