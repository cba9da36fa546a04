//! Random periodic orbits of stochastic flows on a cylinder.
//!
//! This crate builds, detects, and verifies random periodic solutions of
//! random dynamical systems on the cylinder `S^1 x R^d`: stochastic flows
//! whose angular coordinate winds around the circle while the fiber
//! coordinate contracts toward a family of random invariant curves.
//!
//! The pieces, bottom to top:
//!
//! * [`noise`] — two-sided Wiener paths on a uniform grid with exact,
//!   seed-reproducible shift, extension, and bridge refinement. The shift
//!   map on paths is the ergodic clockwork everything else composes with.
//! * [`integrate`] — a Heun (predictor-corrector) integrator for
//!   Stratonovich SDEs driven by a stored path, with a variational companion
//!   that transports tangent vectors and Jacobians along the solution.
//! * [`cocycle`] — the flow abstraction: maps `(path, t0, t1, point)` to a
//!   point, satisfying the cocycle identities over the path shift.
//! * [`example`] — a benchmark system with closed-form solutions (a
//!   stochastically forced pitchfork radius paired with uniform rotation),
//!   used as the ground truth for every numerical claim.
//! * [`fixtures`] — analytically solvable cylinder systems with known
//!   invariant-curve structure: single curves, coexisting pairs, a
//!   half-twisted band whose curve closes only after two windings, and a
//!   deliberately broken system whose angular advance depends on the fiber.
//! * [`pullback`] — pullback limits: run the flow from ever-earlier start
//!   times to hit the random attractor at time zero, with convergence
//!   diagnostics.
//! * [`winding`] — the discrete view: quotient the flow by full windings of
//!   the circle, sample the fiber over a base point, cluster it into
//!   components, trace invariant curve sections, and read off how the
//!   winding permutes them.
//! * [`lyapunov`] — fiber Lyapunov exponents along trajectories via the
//!   variational flow.
//! * [`report`] — serializable reports and CSV writers for everything above.
//! * [`cli`] — the command-line front end (`simulate`, `pullback`, `curves`,
//!   `lyapunov`, `verify`, `oracle`).
//!
//! Determinism is a design rule throughout: a seed plus a configuration
//! reproduces every byte of output, and path operations (shift, extension,
//! refinement) are bit-stable so that cocycle identities can be tested
//! exactly rather than approximately.

pub mod cli;
pub mod cocycle;
pub mod error;
pub mod example;
pub mod fixtures;
pub mod integrate;
pub mod linalg;
pub mod lyapunov;
pub mod noise;
pub mod pullback;
pub mod report;
pub mod winding;

pub use cocycle::{Cocycle, CylinderPoint, LiftedPoint, SystemHandle};
pub use error::{Error, Result};
pub use integrate::SdeSpec;
pub use noise::WienerPath;
