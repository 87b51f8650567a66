//! Scenario configs: a small key-value text format describing a transport
//! run (scale, parameters, initial data, requested outputs), plus built-in
//! presets and a serializer whose output parses back to the same scenario.
//!
//! # Grammar
//!
//! One `key = value` pair per line; `#` starts a comment; blank lines are
//! ignored. Keys:
//!
//! | key        | value                                               |
//! |------------|-----------------------------------------------------|
//! | `scale`    | literal `[[0,0.5],[1,1.5],2]` (intervals and bare points, strictly increasing) or a generator: `uniform(step, n)`, `stopstart(on, off, n)`, `harmonic(n)` |
//! | `k`        | transport coefficient, default 1                    |
//! | `A`        | point-mass amplitude, default 1                     |
//! | `mu_x`     | site spacing, default 1                             |
//! | `initial`  | `point` (default) or a list `[c0, c1, ...]`         |
//! | `m_lo`     | lowest site of a list initial, default 0            |
//! | `t_max`    | horizon, **required**; the scale is truncated or periodically extended to reach it |
//! | `h_out`    | output sampling step inside intervals (default: interval length / 64) |
//! | `tail_tol` | window tolerance, default 1e-12                     |
//! | `quad_tol` | quadrature tolerance, default 1e-10                 |
//! | `outputs`  | comma list of `field`, `time_sections(m, ...)`, `space_sections(t, ...)`, `conservation`, `pdf_check` |
//!
//! Convergence studies use a separate key set: `rate`, `steps` (list of
//! `n`, each giving the lattice `1/n · ℤ`), `target_time`.

mod run;
mod selftest;

pub use run::{exit_code, run_convergence, run_scenario, RunOutcome};
pub use selftest::{run_selftest, FAULT_ENV};

use crate::timescale::TimeScale;
use crate::transport::InitialCondition;
use crate::{Error, Result};

/// The scale as written in a config: either an explicit component list or
/// one of the shorthand generators.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleSpec {
    Literal(Vec<ScaleEntry>),
    Uniform { step: f64, n: usize },
    StopStart { on: f64, off: f64, n: usize },
    Harmonic { n: usize },
}

/// One entry of a literal scale.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleEntry {
    Point(f64),
    Interval(f64, f64),
}

impl ScaleSpec {
    /// Build the base scale, before horizon reconciliation.
    pub fn build(&self) -> Result<TimeScale> {
        match self {
            ScaleSpec::Literal(entries) => {
                let comps = entries
                    .iter()
                    .map(|e| match *e {
                        ScaleEntry::Point(at) => crate::timescale::Component::Point { at },
                        ScaleEntry::Interval(start, end) => {
                            crate::timescale::Component::Interval { start, end }
                        }
                    })
                    .collect();
                TimeScale::new(comps)
            }
            ScaleSpec::Uniform { step, n } => TimeScale::uniform(*step, *n),
            ScaleSpec::StopStart { on, off, n } => TimeScale::stop_start(*on, *off, *n),
            ScaleSpec::Harmonic { n } => TimeScale::harmonic(*n),
        }
    }

    fn to_text(&self) -> String {
        match self {
            ScaleSpec::Literal(entries) => {
                let inner: Vec<String> = entries
                    .iter()
                    .map(|e| match e {
                        ScaleEntry::Point(at) => num(*at),
                        ScaleEntry::Interval(a, b) => format!("[{},{}]", num(*a), num(*b)),
                    })
                    .collect();
                format!("[{}]", inner.join(","))
            }
            ScaleSpec::Uniform { step, n } => format!("uniform({}, {n})", num(*step)),
            ScaleSpec::StopStart { on, off, n } => {
                format!("stopstart({}, {}, {n})", num(*on), num(*off))
            }
            ScaleSpec::Harmonic { n } => format!("harmonic({n})"),
        }
    }
}

/// Which artifacts a scenario run writes.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Outputs {
    pub field: bool,
    pub time_sections: Vec<i64>,
    pub space_sections: Vec<f64>,
    pub conservation: bool,
    pub pdf_check: bool,
}

impl Outputs {
    fn is_empty(&self) -> bool {
        !self.field
            && self.time_sections.is_empty()
            && self.space_sections.is_empty()
            && !self.conservation
            && !self.pdf_check
    }

    fn to_text(&self) -> String {
        let mut parts = Vec::new();
        if self.field {
            parts.push("field".to_string());
        }
        if !self.time_sections.is_empty() {
            let ms: Vec<String> = self.time_sections.iter().map(|m| m.to_string()).collect();
            parts.push(format!("time_sections({})", ms.join(",")));
        }
        if !self.space_sections.is_empty() {
            let ts: Vec<String> = self.space_sections.iter().map(|t| num(*t)).collect();
            parts.push(format!("space_sections({})", ts.join(",")));
        }
        if self.conservation {
            parts.push("conservation".to_string());
        }
        if self.pdf_check {
            parts.push("pdf_check".to_string());
        }
        parts.join(", ")
    }
}

/// A parsed scenario: everything needed to build the problem and run it.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scale: ScaleSpec,
    pub k: f64,
    pub a: f64,
    pub mu_x: f64,
    pub initial: InitialCondition,
    pub t_max: f64,
    pub h_out: Option<f64>,
    pub tail_tol: f64,
    pub quad_tol: f64,
    pub outputs: Outputs,
}

/// A parsed convergence study: lattices `1/n · ℤ` against the continuous
/// limit at a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceConfig {
    /// Limit rate `lambda` (the per-unit-time transport rate).
    pub rate: f64,
    /// Lattice refinements: each `n` gives graininess `1/n`.
    pub steps: Vec<u64>,
    /// Time at which the two laws are compared.
    pub target_time: f64,
}

impl ScenarioConfig {
    /// The scale actually solved on: the configured scale truncated or
    /// periodically extended so its horizon equals `t_max`.
    pub fn build_scale(&self) -> Result<TimeScale> {
        let base = self.scale.build()?;
        let end = base.t_max();
        let tol = 1e-9 * end.abs().max(1.0);
        if (self.t_max - end).abs() <= tol {
            Ok(base)
        } else if self.t_max < end {
            base.truncate(self.t_max)
        } else {
            base.extend_periodic(self.t_max)
        }
    }

    /// The transport problem this scenario describes.
    pub fn build_problem(&self) -> Result<crate::transport::TransportProblem> {
        let scale = self.build_scale()?;
        let p = crate::transport::TransportProblem {
            k: self.k,
            mu_x: self.mu_x,
            initial: self.initial.clone(),
            scale,
            tail_tol: self.tail_tol,
        };
        p.validate()?;
        Ok(p)
    }

    /// Serialize to config text that parses back to an equal scenario.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("scale = {}\n", self.scale.to_text()));
        out.push_str(&format!("k = {}\n", num(self.k)));
        match &self.initial {
            InitialCondition::PointMass { amplitude } => {
                out.push_str(&format!("A = {}\n", num(*amplitude)));
                out.push_str("initial = point\n");
            }
            InitialCondition::General { m_lo, coefficients } => {
                let cs: Vec<String> = coefficients.iter().map(|c| num(*c)).collect();
                out.push_str(&format!("initial = [{}]\n", cs.join(",")));
                if *m_lo != 0 {
                    out.push_str(&format!("m_lo = {m_lo}\n"));
                }
            }
        }
        out.push_str(&format!("mu_x = {}\n", num(self.mu_x)));
        out.push_str(&format!("t_max = {}\n", num(self.t_max)));
        if let Some(h) = self.h_out {
            out.push_str(&format!("h_out = {}\n", num(h)));
        }
        out.push_str(&format!("tail_tol = {}\n", num(self.tail_tol)));
        out.push_str(&format!("quad_tol = {}\n", num(self.quad_tol)));
        if !self.outputs.is_empty() {
            out.push_str(&format!("outputs = {}\n", self.outputs.to_text()));
        }
        out
    }
}

impl ConvergenceConfig {
    pub fn to_text(&self) -> String {
        let steps: Vec<String> = self.steps.iter().map(|n| n.to_string()).collect();
        format!(
            "rate = {}\nsteps = {}\ntarget_time = {}\n",
            num(self.rate),
            steps.join(", "),
            num(self.target_time)
        )
    }
}

/// Shortest decimal that parses back to the same value. Plain notation for
/// ordinary magnitudes, exponent notation for extremes.
fn num(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-4 || x.abs() >= 1e7) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::config(field, format!("not a number: `{}`", s.trim())))?;
    if !v.is_finite() {
        return Err(Error::config(field, "must be finite"));
    }
    Ok(v)
}

fn parse_usize(field: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::config(field, format!("not a nonnegative integer: `{}`", s.trim())))
}

/// Split `s` at `sep`, but only at parenthesis/bracket depth zero.
fn split_top_level(s: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for ch in s.chars() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        if ch == sep && depth == 0 {
            parts.push(cur.trim().to_string());
            cur = String::new();
        } else {
            cur.push(ch);
        }
    }
    if !cur.trim().is_empty() {
        parts.push(cur.trim().to_string());
    }
    parts
}

/// `name(arg, arg, ...)` → (name, inner args string), if it has that shape.
fn call_form(s: &str) -> Option<(&str, &str)> {
    let open = s.find('(')?;
    if !s.ends_with(')') {
        return None;
    }
    Some((s[..open].trim(), &s[open + 1..s.len() - 1]))
}

fn parse_scale(value: &str) -> Result<ScaleSpec> {
    let value = value.trim();
    if let Some((name, args)) = call_form(value) {
        let args = split_top_level(args, ',');
        return match name {
            "uniform" => {
                if args.len() != 2 {
                    return Err(Error::config("scale", "uniform takes (step, n)"));
                }
                Ok(ScaleSpec::Uniform {
                    step: parse_f64("scale", &args[0])?,
                    n: parse_usize("scale", &args[1])?,
                })
            }
            "stopstart" => {
                if args.len() != 3 {
                    return Err(Error::config("scale", "stopstart takes (on, off, n)"));
                }
                Ok(ScaleSpec::StopStart {
                    on: parse_f64("scale", &args[0])?,
                    off: parse_f64("scale", &args[1])?,
                    n: parse_usize("scale", &args[2])?,
                })
            }
            "harmonic" => {
                if args.len() != 1 {
                    return Err(Error::config("scale", "harmonic takes (n)"));
                }
                Ok(ScaleSpec::Harmonic {
                    n: parse_usize("scale", &args[0])?,
                })
            }
            other => Err(Error::config(
                "scale",
                format!("unknown generator `{other}` (try uniform, stopstart, harmonic)"),
            )),
        };
    }
    if value.starts_with('[') && value.ends_with(']') {
        let inner = &value[1..value.len() - 1];
        let mut entries = Vec::new();
        for item in split_top_level(inner, ',') {
            if item.starts_with('[') && item.ends_with(']') {
                let pair = split_top_level(&item[1..item.len() - 1], ',');
                if pair.len() != 2 {
                    return Err(Error::config(
                        "scale",
                        format!("interval entry needs two endpoints: `{item}`"),
                    ));
                }
                entries.push(ScaleEntry::Interval(
                    parse_f64("scale", &pair[0])?,
                    parse_f64("scale", &pair[1])?,
                ));
            } else {
                entries.push(ScaleEntry::Point(parse_f64("scale", &item)?));
            }
        }
        if entries.is_empty() {
            return Err(Error::config("scale", "literal scale must be non-empty"));
        }
        return Ok(ScaleSpec::Literal(entries));
    }
    Err(Error::config(
        "scale",
        "expected a literal like [[0,0.5],[1,1.5]] or a generator like uniform(0.25, 60)",
    ))
}

fn parse_outputs(value: &str) -> Result<Outputs> {
    let mut out = Outputs::default();
    for token in split_top_level(value, ',') {
        if token == "field" {
            out.field = true;
        } else if token == "conservation" {
            out.conservation = true;
        } else if token == "pdf_check" {
            out.pdf_check = true;
        } else if let Some((name, args)) = call_form(&token) {
            match name {
                "time_sections" => {
                    for a in split_top_level(args, ',') {
                        let m: i64 = a.parse().map_err(|_| {
                            Error::config("outputs", format!("not a site index: `{a}`"))
                        })?;
                        out.time_sections.push(m);
                    }
                }
                "space_sections" => {
                    for a in split_top_level(args, ',') {
                        out.space_sections.push(parse_f64("outputs", &a)?);
                    }
                }
                other => {
                    return Err(Error::config(
                        "outputs",
                        format!("unknown output `{other}`"),
                    ))
                }
            }
        } else {
            return Err(Error::config(
                "outputs",
                format!("unknown output `{token}`"),
            ));
        }
    }
    Ok(out)
}

/// Key-value pairs from config text: comments stripped, keys seen at most
/// once.
fn key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs: Vec<(String, String)> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(Error::config(
                "config",
                format!("line {}: expected `key = value`, got `{line}`", lineno + 1),
            ));
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::config(
                "config",
                format!("line {}: empty key or value", lineno + 1),
            ));
        }
        if pairs.iter().any(|(k, _)| *k == key) {
            return Err(Error::config(
                "config",
                format!("duplicate key `{key}` (line {})", lineno + 1),
            ));
        }
        pairs.push((key, value));
    }
    Ok(pairs)
}

/// Parse scenario config text.
///
/// # Errors
///
/// [`Error::Config`] with the offending field name and the violated
/// constraint; nothing is partially applied.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let pairs = key_values(text)?;
    let mut scale: Option<ScaleSpec> = None;
    let mut k = 1.0;
    let mut a: Option<f64> = None;
    let mut mu_x = 1.0;
    let mut initial_list: Option<Vec<f64>> = None;
    let mut initial_point = true;
    let mut m_lo: Option<i64> = None;
    let mut t_max: Option<f64> = None;
    let mut h_out: Option<f64> = None;
    let mut tail_tol = crate::transport::DEFAULT_TAIL_TOL;
    let mut quad_tol = crate::quad::DEFAULT_TOL;
    let mut outputs = Outputs::default();

    for (key, value) in &pairs {
        match key.as_str() {
            "scale" => scale = Some(parse_scale(value)?),
            "k" => k = parse_f64("k", value)?,
            "A" => a = Some(parse_f64("A", value)?),
            "mu_x" => mu_x = parse_f64("mu_x", value)?,
            "initial" => {
                if value == "point" {
                    initial_point = true;
                } else if value.starts_with('[') && value.ends_with(']') {
                    initial_point = false;
                    let mut cs = Vec::new();
                    for item in split_top_level(&value[1..value.len() - 1], ',') {
                        cs.push(parse_f64("initial", &item)?);
                    }
                    if cs.is_empty() {
                        return Err(Error::config("initial", "list must be non-empty"));
                    }
                    initial_list = Some(cs);
                } else {
                    return Err(Error::config(
                        "initial",
                        "expected `point` or a list like [1, 0.5]",
                    ));
                }
            }
            "m_lo" => {
                m_lo = Some(value.parse().map_err(|_| {
                    Error::config("m_lo", format!("not an integer: `{value}`"))
                })?)
            }
            "t_max" => t_max = Some(parse_f64("t_max", value)?),
            "h_out" => h_out = Some(parse_f64("h_out", value)?),
            "tail_tol" => tail_tol = parse_f64("tail_tol", value)?,
            "quad_tol" => quad_tol = parse_f64("quad_tol", value)?,
            "outputs" => outputs = parse_outputs(value)?,
            other => {
                return Err(Error::config(
                    other,
                    "unknown key (known: scale, k, A, mu_x, initial, m_lo, t_max, h_out, \
                     tail_tol, quad_tol, outputs)",
                ))
            }
        }
    }

    let scale = scale.ok_or_else(|| Error::config("scale", "required"))?;
    let t_max = t_max.ok_or_else(|| Error::config("t_max", "required"))?;
    if !(t_max > 0.0) {
        return Err(Error::config("t_max", "must be positive"));
    }
    if let Some(h) = h_out {
        if !(h > 0.0) {
            return Err(Error::config("h_out", "must be positive"));
        }
    }
    if !(tail_tol > 0.0 && tail_tol < 1.0) {
        return Err(Error::config("tail_tol", "must lie in (0, 1)"));
    }
    if !(quad_tol > 0.0) {
        return Err(Error::config("quad_tol", "must be positive"));
    }

    let initial = if initial_point {
        if initial_list.is_some() {
            unreachable!("initial_point implies no list");
        }
        if m_lo.is_some() {
            return Err(Error::config("m_lo", "only meaningful for a list initial"));
        }
        InitialCondition::PointMass {
            amplitude: a.unwrap_or(1.0),
        }
    } else {
        if a.is_some() {
            return Err(Error::config(
                "A",
                "amplitude applies to `initial = point` only; scale the list instead",
            ));
        }
        InitialCondition::General {
            m_lo: m_lo.unwrap_or(0),
            coefficients: initial_list.expect("list initial"),
        }
    };

    let config = ScenarioConfig {
        scale,
        k,
        a: match &initial {
            InitialCondition::PointMass { amplitude } => *amplitude,
            InitialCondition::General { coefficients, .. } => coefficients.iter().sum(),
        },
        mu_x,
        initial,
        t_max,
        h_out,
        tail_tol,
        quad_tol,
        outputs,
    };
    // Surface scale/parameter/admissibility problems at parse time rather
    // than later, mid-run.
    let problem = config.build_problem()?;
    if let Some(v) = problem.check_regressivity().violations.first() {
        return Err(Error::CflViolation {
            t: v.t,
            factor: v.factor,
        });
    }
    Ok(config)
}

/// Parse convergence-study config text (`rate`, `steps`, `target_time`).
///
/// # Errors
///
/// [`Error::Config`] on malformed input; [`Error::CflViolation`] when a
/// requested lattice is inadmissible for the rate (`rate/n >= 1`).
pub fn parse_convergence(text: &str) -> Result<ConvergenceConfig> {
    let pairs = key_values(text)?;
    let mut rate: Option<f64> = None;
    let mut steps: Option<Vec<u64>> = None;
    let mut target_time = 1.0;
    for (key, value) in &pairs {
        match key.as_str() {
            "rate" => rate = Some(parse_f64("rate", value)?),
            "steps" => {
                let trimmed = value.trim();
                let inner = if trimmed.starts_with('[') && trimmed.ends_with(']') {
                    &trimmed[1..trimmed.len() - 1]
                } else {
                    trimmed
                };
                let mut ns = Vec::new();
                for item in split_top_level(inner, ',') {
                    let n: u64 = item.parse().map_err(|_| {
                        Error::config("steps", format!("not a positive integer: `{item}`"))
                    })?;
                    if n == 0 {
                        return Err(Error::config("steps", "every n must be at least 1"));
                    }
                    ns.push(n);
                }
                if ns.is_empty() {
                    return Err(Error::config("steps", "must list at least one n"));
                }
                steps = Some(ns);
            }
            "target_time" => target_time = parse_f64("target_time", value)?,
            other => {
                return Err(Error::config(
                    other,
                    "unknown key (known: rate, steps, target_time)",
                ))
            }
        }
    }
    let rate = rate.ok_or_else(|| Error::config("rate", "required"))?;
    let steps = steps.ok_or_else(|| Error::config("steps", "required"))?;
    if !(rate > 0.0) {
        return Err(Error::config("rate", "must be positive"));
    }
    if !(target_time > 0.0) {
        return Err(Error::config("target_time", "must be positive"));
    }
    for &n in &steps {
        let factor = 1.0 - rate / n as f64;
        if factor <= 0.0 {
            return Err(Error::CflViolation {
                t: 0.0,
                factor,
            });
        }
    }
    Ok(ConvergenceConfig {
        rate,
        steps,
        target_time,
    })
}

/// Built-in scenario presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// A single continuous interval: the field is the Poisson family and
    /// the time sections are Erlang laws.
    Poisson,
    /// The uniform lattice `0.25·ℤ`: binomial space sections, negative
    /// binomial time sections.
    Bernoulli,
    /// The harmonic point scale: time section of the origin is the
    /// `1/(j(j+1))` first-success law.
    Harmonic,
    /// Alternating run/pause intervals: the mixed counting process.
    StopStart,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Poisson,
        Preset::Bernoulli,
        Preset::Harmonic,
        Preset::StopStart,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Poisson => "poisson",
            Preset::Bernoulli => "bernoulli",
            Preset::Harmonic => "harmonic",
            Preset::StopStart => "stopstart",
        }
    }

    pub fn from_name(name: &str) -> Result<Preset> {
        match name {
            "poisson" => Ok(Preset::Poisson),
            "bernoulli" => Ok(Preset::Bernoulli),
            "harmonic" => Ok(Preset::Harmonic),
            "stopstart" => Ok(Preset::StopStart),
            other => Err(Error::config(
                "preset",
                format!("unknown preset `{other}` (known: poisson, bernoulli, harmonic, stopstart)"),
            )),
        }
    }

    /// The preset's scenario.
    pub fn config(self) -> ScenarioConfig {
        match self {
            Preset::Poisson => ScenarioConfig {
                scale: ScaleSpec::Literal(vec![ScaleEntry::Interval(0.0, 20.0)]),
                k: 1.0,
                a: 1.0,
                mu_x: 1.0,
                initial: InitialCondition::PointMass { amplitude: 1.0 },
                t_max: 20.0,
                h_out: Some(0.25),
                tail_tol: 1e-12,
                quad_tol: 1e-10,
                outputs: Outputs {
                    field: true,
                    time_sections: vec![0, 1, 2, 3],
                    space_sections: vec![1.0, 5.0, 20.0],
                    conservation: true,
                    pdf_check: true,
                },
            },
            Preset::Bernoulli => ScenarioConfig {
                scale: ScaleSpec::Uniform { step: 0.25, n: 60 },
                k: 1.0,
                a: 1.0,
                mu_x: 1.0,
                initial: InitialCondition::PointMass { amplitude: 1.0 },
                t_max: 15.0,
                h_out: None,
                tail_tol: 1e-12,
                quad_tol: 1e-10,
                outputs: Outputs {
                    field: true,
                    time_sections: vec![0, 1, 2],
                    space_sections: vec![5.0, 15.0],
                    conservation: true,
                    pdf_check: true,
                },
            },
            Preset::Harmonic => ScenarioConfig {
                scale: ScaleSpec::Harmonic { n: 40 },
                k: 1.0,
                a: 1.0,
                mu_x: 1.0,
                initial: InitialCondition::PointMass { amplitude: 1.0 },
                // Horizon of harmonic(40): 1/2 + 1/3 + ... + 1/41.
                t_max: harmonic_end(40),
                h_out: None,
                tail_tol: 1e-12,
                quad_tol: 1e-10,
                outputs: Outputs {
                    // Only the origin branch: deeper branches keep most of
                    // their mass beyond this horizon, and the balance audit
                    // would (rightly) refuse them.
                    time_sections: vec![0],
                    field: true,
                    space_sections: Vec::new(),
                    conservation: true,
                    pdf_check: true,
                },
            },
            Preset::StopStart => ScenarioConfig {
                scale: ScaleSpec::StopStart {
                    on: 0.5,
                    off: 0.5,
                    n: 8,
                },
                k: 1.0,
                a: 1.0,
                mu_x: 1.0,
                initial: InitialCondition::PointMass { amplitude: 1.0 },
                t_max: 7.5,
                h_out: Some(0.05),
                tail_tol: 1e-12,
                quad_tol: 1e-10,
                outputs: Outputs {
                    field: true,
                    time_sections: vec![0, 1, 2, 3],
                    space_sections: vec![7.5],
                    conservation: true,
                    pdf_check: true,
                },
            },
        }
    }

    /// Config text for the preset; parsing it yields [`Preset::config`].
    pub fn dump(self) -> String {
        let header = match self {
            Preset::Poisson => {
                "# poisson: single continuous interval; Poisson field, Erlang time sections"
            }
            Preset::Bernoulli => {
                "# bernoulli: uniform lattice 0.25*Z; binomial space sections"
            }
            Preset::Harmonic => {
                "# harmonic: shrinking-gap point scale; 1/(j(j+1)) first-success law"
            }
            Preset::StopStart => {
                "# stopstart: alternating run/pause intervals; mixed counting process"
            }
        };
        format!("{header}\n{}", self.config().to_text())
    }
}

fn harmonic_end(n: usize) -> f64 {
    let mut t = 0.0;
    for i in 1..=n {
        t += 1.0 / (i as f64 + 1.0);
    }
    t
}
