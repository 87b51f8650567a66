//! Exact transport on semidiscrete domains.
//!
//! This crate solves the scalar transport equation
//!
//! ```text
//!     u^{Δt}(x, t) + k · ∇x u(x, t) = 0,        u(x, 0) given,
//! ```
//!
//! on a domain whose space is the lattice `mu_x · Z` (with the backward
//! difference `∇x u = (u(x) - u(x - mu_x)) / mu_x`) and whose time is a
//! *time scale*: any finite union of closed intervals and isolated points
//! starting at 0. Delta derivatives interpolate between the classical
//! derivative (on intervals) and the forward difference (at gaps), so one
//! solver covers continuous, discrete, and mixed time in a single walk.
//!
//! Everything is computed in closed form:
//!
//! * across a gap of width `mu`, the field updates by the weighted average
//!   `u ← (1 - k·mu/mu_x) u + (k·mu/mu_x) shift(u)`;
//! * across a continuous stretch of length `dt`, the field convolves with a
//!   Poisson kernel of rate `k·dt/mu_x`.
//!
//! Neither step introduces numerical diffusion; accuracy is limited only by
//! `f64` arithmetic and an explicitly tracked spatial tail cutoff.
//!
//! The induced section families are classical probability laws: space
//! sections give Poisson or binomial weights, time sections give Erlang
//! densities, geometric or negative-binomial weights, and mixed scales give
//! their splices. The [`distributions`] module tabulates these laws, and
//! [`conservation`] verifies the sign, mass, and normalization statements
//! that make the probabilistic reading valid.
//!
//! # Modules
//!
//! * [`timescale`]: time-scale domains, graininess, dynamic exponential,
//!   delta integrals, output grids.
//! * [`transport`]: the exact solver and its section extractors.
//! * [`distributions`]: closed-form reference laws and distribution tables.
//! * [`conservation`]: sign, space-sum, and time-integral checks, and the
//!   conditions under which sections are probability distributions.
//! * [`oracle`]: an independent Runge-Kutta reference integrator used for
//!   self-verification.
//! * [`scenario`]: config-file driven runs, presets, CSV output, selftest.
//! * [`quad`]: adaptive Simpson quadrature with an evaluation budget.
//!
//! # Quick start
//!
//! ```
//! use tstransport::timescale::{Grid, TimeScale};
//! use tstransport::transport::{solve, TransportProblem};
//!
//! // Transport with k = 1 on unit-spaced sites: run for 1, pause for
//! // 1/2, twice. (Gaps must stay below mu_x / k for positivity.)
//! let scale = TimeScale::stop_start(1.0, 0.5, 2).unwrap();
//! let problem = TransportProblem::point_mass(1.0, 1.0, 1.0, scale).unwrap();
//! let grid = Grid::new(&problem.scale, None).unwrap();
//! let field = solve(&problem, &grid).unwrap();
//!
//! // Mass is conserved along the walk.
//! let total: f64 = field.space_section(2.5).unwrap().total();
//! assert!((total - 1.0).abs() < 1e-9);
//! ```

pub mod conservation;
pub mod distributions;
mod error;
pub mod oracle;
pub mod quad;
pub mod scenario;
pub mod timescale;
pub mod transport;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
