//! Points on the cylinder and the stochastic-flow abstraction.
//!
//! State space is the cylinder `S^1 x R^d`: an angle `s` (mod 1) and a fiber
//! vector `y` in `R^d`. Flows are computed on the universal cover
//! `R x R^d`, where the angle is lifted to a real number and winding counts
//! are visible; [`LiftedPoint::project`] folds back down.
//!
//! A [`Cocycle`] is a flow driven by a [`WienerPath`]: it maps a start point
//! at time `t0` to its image at time `t1`, reading the path on `[t0, t1]`
//! (plus up to [`Cocycle::history_needed`] seconds before `t0`). Over the
//! path shift `theta_t` it satisfies the cocycle laws
//!
//! * identity: flowing from `t0` to `t0` is the identity map, and
//! * composition: flowing `t0 -> t1 -> t2` equals flowing `t0 -> t2`
//!   directly, when the middle point is fed back in.
//!
//! This module also carries numeric checkers for both laws, used by the test
//! suites and the verification front end. For flows computed by stepping a
//! stored path cell by cell with state-autonomous coefficients, composition
//! holds *bit-exactly*: both sides execute the same float operations on the
//! same stored increments.

use std::sync::Arc;

use crate::error::Result;
use crate::noise::WienerPath;

/// A point on the cylinder: angle `s` in `[0, 1)`, fiber `y` in `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderPoint {
    pub s: f64,
    pub y: Vec<f64>,
}

impl CylinderPoint {
    /// Build a point, folding the angle into `[0, 1)`.
    pub fn new(s: f64, y: Vec<f64>) -> Self {
        CylinderPoint {
            s: wrap_unit(s),
            y,
        }
    }

    /// Lift to the cover with a chosen winding count.
    pub fn lift(&self, winding: i64) -> LiftedPoint {
        LiftedPoint {
            s_lift: self.s + winding as f64,
            y: self.y.clone(),
        }
    }
}

/// A point on the universal cover: unbounded lifted angle plus fiber.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub s_lift: f64,
    pub y: Vec<f64>,
}

impl LiftedPoint {
    pub fn new(s_lift: f64, y: Vec<f64>) -> Self {
        LiftedPoint { s_lift, y }
    }

    /// Fold down to the cylinder; also returns the winding count
    /// (floor of the lifted angle).
    pub fn project(&self) -> (CylinderPoint, i64) {
        let w = self.s_lift.floor();
        (
            CylinderPoint {
                s: wrap_unit(self.s_lift),
                y: self.y.clone(),
            },
            w as i64,
        )
    }

    /// Euclidean distance in the cover (lifted angle and fiber together).
    pub fn dist(&self, other: &LiftedPoint) -> f64 {
        let ds = self.s_lift - other.s_lift;
        let dy: f64 = self
            .y
            .iter()
            .zip(&other.y)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        (ds * ds + dy).sqrt()
    }
}

/// Fold a real angle into `[0, 1)`.
pub fn wrap_unit(s: f64) -> f64 {
    let r = s - s.floor();
    // s slightly below an integer can round to 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Distance between two angles on the circle (shorter arc, in `[0, 1/2]`).
pub fn circle_dist(a: f64, b: f64) -> f64 {
    let d = wrap_unit(a - b);
    d.min(1.0 - d)
}

/// A stochastic flow on the cylinder, driven by a Wiener path.
///
/// Times are on the path's own clock and must be grid-aligned. Implementors
/// read the path only on `[t0 - history_needed(), t1]`.
pub trait Cocycle {
    /// Fiber dimension `d`.
    fn fiber_dim(&self) -> usize;

    /// Short identifier for reports and labels.
    fn name(&self) -> &str;

    /// Flow the point from time `t0` to time `t1 >= t0`.
    fn flow(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<LiftedPoint>;

    /// Flow the point and transport the fiber Jacobian alongside.
    ///
    /// Returns the end point and the `d x d` derivative (row-major) of the
    /// fiber image with respect to the starting fiber, holding the starting
    /// angle fixed. The base point must match [`Cocycle::flow`] bit-for-bit
    /// where the implementation integrates, so the two entry points can be
    /// cross-checked exactly.
    fn tangent_flow(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<(LiftedPoint, Vec<f64>)>;

    /// How much path history before `t0` the flow reads (seconds).
    fn history_needed(&self) -> f64 {
        0.0
    }

    /// Deterministic spread of fiber starting points used when sampling the
    /// attractor over a base angle. Implementations that know their
    /// interesting region (or must dodge an invariant repelling set)
    /// override this.
    fn default_fiber_seeds(&self, n: usize) -> Vec<Vec<f64>> {
        kronecker_spread(self.fiber_dim(), n, 2.5)
    }
}

/// Shared handle to a flow.
pub type SystemHandle = Arc<dyn Cocycle + Send + Sync>;

/// Low-discrepancy spread of `n` points in `[-half_width, half_width]^d`
/// (Kronecker sequence on the generalized golden ratio).
pub fn kronecker_spread(d: usize, n: usize, half_width: f64) -> Vec<Vec<f64>> {
    // unique positive root of x^(d+1) = x + 1
    let mut g = 1.5f64;
    for _ in 0..64 {
        g = (1.0 + g).powf(1.0 / (d as f64 + 1.0));
    }
    let alphas: Vec<f64> = (1..=d).map(|j| g.powi(-(j as i32))).collect();
    (0..n)
        .map(|i| {
            alphas
                .iter()
                .map(|&a| {
                    let u = (0.5 + a * (i as f64 + 1.0)).fract();
                    (2.0 * u - 1.0) * half_width
                })
                .collect()
        })
        .collect()
}

/// Residual of the identity law: distance from `flow(t0 -> t0, x)` to `x`.
pub fn identity_residual(
    system: &dyn Cocycle,
    path: &WienerPath,
    t0: f64,
    start: &LiftedPoint,
) -> Result<f64> {
    let end = system.flow(path, t0, t0, start)?;
    Ok(end.dist(start))
}

/// Residual of the composition law through a midpoint:
/// `flow(t0 -> t2, x)` versus `flow(t1 -> t2, flow(t0 -> t1, x))`.
pub fn composition_residual(
    system: &dyn Cocycle,
    path: &WienerPath,
    t0: f64,
    t1: f64,
    t2: f64,
    start: &LiftedPoint,
) -> Result<f64> {
    let direct = system.flow(path, t0, t2, start)?;
    let mid = system.flow(path, t0, t1, start)?;
    let two_leg = system.flow(path, t1, t2, &mid)?;
    Ok(direct.dist(&two_leg))
}

/// Residual of composition expressed over the path shift: the second leg is
/// run on the shifted path `theta_{t1} omega` from its own time zero. For
/// flows of autonomous coefficients the two formulations agree exactly.
pub fn shifted_composition_residual(
    system: &dyn Cocycle,
    path: &WienerPath,
    t0: f64,
    t1: f64,
    t2: f64,
    start: &LiftedPoint,
) -> Result<f64> {
    let direct = system.flow(path, t0, t2, start)?;
    let mid = system.flow(path, t0, t1, start)?;
    let shifted = path.shift(t1)?;
    let two_leg = system.flow(&shifted, 0.0, t2 - t1, &mid)?;
    Ok(direct.dist(&two_leg))
}
