//! Numerics for a one-dimensional reaction-diffusion population confined
//! between two free boundaries that resist motion: each front advances
//! only when the interior flux exceeds a resistance threshold `alpha`,
//! and retreats otherwise.
//!
//! The crate provides, in rough dependency order:
//!
//! * [`nonlinearity`]: reaction terms `f(u)` with exact primitives;
//! * [`phase_plane`]: stationary arches/plateaus via first-integral
//!   quadrature and the critical resistance `alpha0`;
//! * [`semiwave`]: the travelling semi-wave `(c*, q*)` by shooting;
//! * [`solver`]: a front-fixed finite-difference scheme for the full
//!   moving-boundary evolution;
//! * [`classifier`]: spreading / vanishing / transition verdicts and
//!   front-speed measurement;
//! * [`threshold`]: the sharp amplitude threshold `sigma*` by bisection;
//! * [`certificates`]: sufficient a-priori conditions for vanishing;
//! * [`config`]: serde-facing run configuration shared by the CLI and
//!   the Python bindings.

pub mod certificates;
pub mod classifier;
pub mod config;
pub mod error;
pub mod extended;
pub mod initial;
pub mod nonlinearity;
pub mod ode;
pub mod phase_plane;
pub mod quad;
pub mod semiwave;
pub mod solver;
pub mod threshold;

pub use certificates::{vanishing_certificate, Certificate, Reason};
pub use classifier::{ClassifierParams, Outcome, Verdict};
pub use config::{NonlinearitySpec, PhiSpec, RunConfig};
pub use error::{CoreError, Result};
pub use extended::ExtendedReal;
pub use initial::InitialData;
pub use nonlinearity::{HermiteNode, Kind, Nonlinearity, ReactionClass};
pub use phase_plane::{StationaryCase, StationaryClass, StationaryProfile};
pub use semiwave::{SemiWave, ShootConfig, ShotClass};
pub use threshold::{find_sigma_star, Evaluation, ThresholdOpts, ThresholdResult};
pub use solver::{
    simulate, MonitorReport, Snapshot, SolverState, Termination, Trajectory,
};
