//! Analytically solvable cylinder systems with known invariant-curve
//! structure.
//!
//! Each system here has an exact flow (no integrator involved), so the
//! detection and extraction machinery can be tested against closed-form
//! answers: curve positions, contraction rates, component counts, winding
//! behavior. The roster:
//!
//! * [`TrackedSinusoid`] — an affine fiber flow relaxing toward a moving
//!   target built from a sinusoid in the angle and a window of the driving
//!   noise. One random invariant curve, one winding, every rate exact.
//! * [`DoubleWell`] — a bistable fiber with flat invariant curves at
//!   `y = +1` and `y = -1`: two coexisting curves, identity permutation.
//! * [`HalfTwistBand`] — a planar fiber whose attracting circle is traversed
//!   with a half twist per revolution: the fiber over any angle holds two
//!   points of a *single* curve that closes only after two windings.
//! * [`SkewedAngle`] — a deliberate violation: the angular advance depends
//!   on the fiber, so no common full-circle time exists and detection must
//!   refuse it.
//!
//! A half-twist needs a planar fiber. In one dimension a curve crossing
//! itself over an angle is impossible: two strands exchanged by one winding
//! would have to pass through each other (intermediate values pin them
//! together), collapsing the exchange. The band with a half twist is the
//! minimal geometry that realizes winding number 2 with uniform fiber
//! contraction.

use std::f64::consts::{LN_2, PI, TAU};

use crate::cocycle::{Cocycle, LiftedPoint};
use crate::error::{Error, Result};
use crate::noise::WienerPath;

/// Exact flow of the logistic fiber `dy/dt = kappa (y - y^3)` over a span
/// with `e2 = exp(2 kappa dt)`: returns the image and its derivative with
/// respect to `y0`.
fn logistic_map(y0: f64, e2: f64) -> (f64, f64) {
    let den = 1.0 + y0 * y0 * (e2 - 1.0);
    (y0 * e2.sqrt() / den.sqrt(), e2.sqrt() / den.powf(1.5))
}

// ---------------------------------------------------------------------------
// TrackedSinusoid
// ---------------------------------------------------------------------------

/// Affine fiber flow relaxing at rate `kappa` toward the moving target
///
/// ```text
/// P(t) = a sin(2 pi s(t)) + b (W(t) - W(t-1)),
/// ```
///
/// with the angle advancing uniformly (`t1 = 1`). The exact flow is
///
/// ```text
/// y(t) = P(t) + exp(-kappa (t - t0)) (y0 - P(t0)),
/// ```
///
/// so every initial fiber collapses onto the single random invariant curve
///
/// ```text
/// phi_t(s) = a sin(2 pi s) + b (W(t) - W(t-1)),
/// ```
///
/// a sinusoid with a noise-dependent vertical offset. Per winding the fiber
/// contracts by exactly `exp(-kappa)` (0.5 at the default), the
/// angle-coupling constant is `2 pi a (1 - exp(-kappa))`, and the curve's
/// true maximal slope is `2 pi a`.
#[derive(Debug, Clone)]
pub struct TrackedSinusoid {
    pub kappa: f64,
    pub a: f64,
    pub b: f64,
}

impl Default for TrackedSinusoid {
    fn default() -> Self {
        TrackedSinusoid {
            kappa: LN_2,
            a: 2.0,
            b: 1.0,
        }
    }
}

impl TrackedSinusoid {
    /// The moving target at time `t` for a trajectory at lifted angle
    /// `s_lift`.
    fn target(&self, path: &WienerPath, t: f64, s_lift: f64) -> Result<f64> {
        Ok(self.a * (TAU * s_lift).sin() + self.b * (path.value(t)? - path.value(t - 1.0)?))
    }

    /// Exact value of the invariant curve at time `t`, angle `s`.
    pub fn curve_value(&self, path: &WienerPath, t: f64, s: f64) -> Result<f64> {
        self.target(path, t, s)
    }

    /// Fiber contraction per winding.
    pub fn contraction_per_winding(&self) -> f64 {
        (-self.kappa).exp()
    }

    /// Supremum of the angle-coupling derivative over one winding.
    pub fn angle_coupling(&self) -> f64 {
        TAU * self.a * (1.0 - (-self.kappa).exp())
    }

    /// True maximal slope of the invariant curve.
    pub fn curve_slope_max(&self) -> f64 {
        TAU * self.a
    }
}

impl Cocycle for TrackedSinusoid {
    fn fiber_dim(&self) -> usize {
        1
    }

    fn name(&self) -> &str {
        "tracked-sinusoid"
    }

    fn flow(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<LiftedPoint> {
        let delta = t1 - t0;
        if delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "backward flow requested: t0 = {t0}, t1 = {t1}"
            )));
        }
        let s1 = start.s_lift + delta;
        let p0 = self.target(path, t0, start.s_lift)?;
        let p1 = self.target(path, t1, s1)?;
        let y1 = p1 + (-self.kappa * delta).exp() * (start.y[0] - p0);
        Ok(LiftedPoint::new(s1, vec![y1]))
    }

    fn tangent_flow(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<(LiftedPoint, Vec<f64>)> {
        let end = self.flow(path, t0, t1, start)?;
        Ok((end, vec![(-self.kappa * (t1 - t0)).exp()]))
    }

    fn history_needed(&self) -> f64 {
        1.0
    }

    /// Wide spread: the random offset can push the curve a few units.
    fn default_fiber_seeds(&self, n: usize) -> Vec<Vec<f64>> {
        crate::cocycle::kronecker_spread(1, n, 6.0)
    }
}

// ---------------------------------------------------------------------------
// DoubleWell
// ---------------------------------------------------------------------------

/// Bistable fiber `dy/dt = kappa (y - y^3)` under a uniformly rotating
/// angle (`t1 = 1`).
///
/// Two flat invariant curves at `y = +1` and `y = -1` coexist; `y = 0` is an
/// invariant repeller separating their basins. Near either curve the fiber
/// contracts by `exp(-2 kappa)` per winding (0.5 at the default), and the
/// permutation induced by one winding is the identity on the two components.
#[derive(Debug, Clone)]
pub struct DoubleWell {
    pub kappa: f64,
}

impl Default for DoubleWell {
    fn default() -> Self {
        DoubleWell { kappa: LN_2 / 2.0 }
    }
}

impl DoubleWell {
    /// Fiber contraction per winding at either well.
    pub fn contraction_per_winding(&self) -> f64 {
        (-2.0 * self.kappa).exp()
    }

    /// The two curve levels.
    pub fn curve_values(&self) -> [f64; 2] {
        [-1.0, 1.0]
    }
}

impl Cocycle for DoubleWell {
    fn fiber_dim(&self) -> usize {
        1
    }

    fn name(&self) -> &str {
        "double-well"
    }

    fn flow(
        &self,
        _path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<LiftedPoint> {
        let delta = t1 - t0;
        if delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "backward flow requested: t0 = {t0}, t1 = {t1}"
            )));
        }
        let e2 = (2.0 * self.kappa * delta).exp();
        let (y1, _) = logistic_map(start.y[0], e2);
        Ok(LiftedPoint::new(start.s_lift + delta, vec![y1]))
    }

    fn tangent_flow(
        &self,
        _path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<(LiftedPoint, Vec<f64>)> {
        let delta = t1 - t0;
        let e2 = (2.0 * self.kappa * delta).exp();
        let (y1, dy) = logistic_map(start.y[0], e2);
        Ok((LiftedPoint::new(start.s_lift + delta, vec![y1]), vec![dy]))
    }

    /// Both basins, staying clear of the repeller at zero.
    fn default_fiber_seeds(&self, n: usize) -> Vec<Vec<f64>> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        (0..n)
            .map(|i| {
                let u = (0.5 + INV_PHI * (i as f64 + 1.0)).fract();
                let signed = 2.0 * u - 1.0; // in (-1, 1)
                vec![signed.signum() * (0.2 + 2.6 * signed.abs())]
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// HalfTwistBand
// ---------------------------------------------------------------------------

/// Planar fiber whose attractor is a circle traversed with a half twist per
/// winding: a single invariant curve of winding number 2.
///
/// In polar fiber coordinates `y = r (cos phi, sin phi)` the flow is
///
/// ```text
/// ds/dt = 1                      (t1 = 1)
/// dr/dt = r - r^3                (attracting circle r = 1)
/// du/dt = -(kappa/2) sin(2u),    u = phi - pi s   (relative phase)
/// ```
///
/// Both fiber equations are exactly solvable: the radius is logistic and the
/// relative phase obeys `tan u(t) = tan(u0) exp(-kappa t)` within each cell
/// between the repelling phases `u = pi/2 mod pi`. The attracting set is
/// `u = 0 mod pi`, i.e. the two points `±(cos(pi s), sin(pi s))` over each
/// angle `s` — the two strands of the single closed curve
///
/// ```text
/// psi(sigma) = (cos(pi sigma), sin(pi sigma)),   sigma in [0, 2),
/// ```
///
/// which closes only after two windings. One winding maps each strand to
/// the other. Per winding the fiber contracts by
/// `max(exp(-2), exp(-kappa))` on the curve (0.5 at the default `ln 2`).
#[derive(Debug, Clone)]
pub struct HalfTwistBand {
    pub kappa: f64,
}

impl Default for HalfTwistBand {
    fn default() -> Self {
        HalfTwistBand { kappa: LN_2 }
    }
}

impl HalfTwistBand {
    /// Point of the double-cover curve at parameter `sigma` in `[0, 2)`.
    pub fn curve_value(&self, sigma: f64) -> [f64; 2] {
        [(PI * sigma).cos(), (PI * sigma).sin()]
    }

    /// Fiber contraction per winding on the curve.
    pub fn contraction_per_winding(&self) -> f64 {
        (-2.0f64).exp().max((-self.kappa).exp())
    }

    /// Relative phase map over a span and its derivative:
    /// `v -> atan(tan(v) e^{-kappa delta})` on `[-pi/2, pi/2]`.
    fn phase_map(&self, v0: f64, delta: f64) -> (f64, f64) {
        let decay = (-self.kappa * delta).exp();
        let t = v0.tan();
        let v1 = (t * decay).atan();
        let dv = decay * (1.0 + t * t) / (1.0 + t * t * decay * decay);
        (v1, dv)
    }
}

impl Cocycle for HalfTwistBand {
    fn fiber_dim(&self) -> usize {
        2
    }

    fn name(&self) -> &str {
        "half-twist-band"
    }

    fn flow(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<LiftedPoint> {
        Ok(self.tangent_flow(path, t0, t1, start)?.0)
    }

    fn tangent_flow(
        &self,
        _path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<(LiftedPoint, Vec<f64>)> {
        let delta = t1 - t0;
        if delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "backward flow requested: t0 = {t0}, t1 = {t1}"
            )));
        }
        let s1 = start.s_lift + delta;
        let (y1, y2) = (start.y[0], start.y[1]);
        let r0 = (y1 * y1 + y2 * y2).sqrt();
        if r0 == 0.0 {
            // the origin is an invariant repeller; its radial linearization
            // expands isotropically while rotating with the band
            let gain = delta.exp();
            let (c, s) = ((PI * delta).cos(), (PI * delta).sin());
            return Ok((
                LiftedPoint::new(s1, vec![0.0, 0.0]),
                vec![gain * c, -gain * s, gain * s, gain * c],
            ));
        }
        let phi0 = y2.atan2(y1);
        let u0 = phi0 - PI * start.s_lift;
        // reduce to the cell around the nearest attracting phase
        let k = (u0 / PI).round();
        let v0 = u0 - k * PI;
        let (v1, dv) = self.phase_map(v0, delta);
        let e2 = (2.0 * delta).exp();
        let (r1, dr) = logistic_map(r0, e2);
        let phi1 = PI * s1 + k * PI + v1;
        let end = LiftedPoint::new(s1, vec![r1 * phi1.cos(), r1 * phi1.sin()]);
        // chain rule through polar coordinates:
        // J = d(y')/d(r',phi') * diag(dr, dv) * d(r0,phi0)/d(y)
        let (c1, s1n) = (phi1.cos(), phi1.sin());
        let (c0, s0n) = (phi0.cos(), phi0.sin());
        // rows of d(r0, phi0)/d(y): [c0, s0n], [-s0n/r0, c0/r0]
        let a11 = dr * c0;
        let a12 = dr * s0n;
        let a21 = dv * (-s0n / r0);
        let a22 = dv * (c0 / r0);
        let jac = vec![
            c1 * a11 - r1 * s1n * a21,
            c1 * a12 - r1 * s1n * a22,
            s1n * a11 + r1 * c1 * a21,
            s1n * a12 + r1 * c1 * a22,
        ];
        Ok((end, jac))
    }

    /// A ring of radii around the attracting circle, phases spread by the
    /// golden angle so none sits exactly on the repelling phase set.
    fn default_fiber_seeds(&self, n: usize) -> Vec<Vec<f64>> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        (0..n)
            .map(|i| {
                let u = (0.5 + INV_PHI * (i as f64 + 1.0)).fract();
                let w = (0.5 + INV_PHI * INV_PHI * (i as f64 + 1.0)).fract();
                let r = 0.4 + 1.8 * u;
                let phi = TAU * w + 0.1;
                vec![r * phi.cos(), r * phi.sin()]
            })
            .collect()
    }
}

// ---------------------------------------------------------------------------
// SkewedAngle
// ---------------------------------------------------------------------------

/// A system whose angular advance depends on the fiber: trajectories at
/// different fiber heights complete the circle in different times, so no
/// common full-circle time exists and winding analysis must refuse it.
///
/// Exact flow:
///
/// ```text
/// y(t) = y0 exp(-kappa (t - t0)),
/// s(t) = s0 + (t - t0)/t1 + (eps/t1) y0 (1 - exp(-kappa (t - t0)))/kappa.
/// ```
#[derive(Debug, Clone)]
pub struct SkewedAngle {
    pub t1: f64,
    pub eps: f64,
    pub kappa: f64,
}

impl Default for SkewedAngle {
    fn default() -> Self {
        SkewedAngle {
            t1: 1.0,
            eps: 0.05,
            kappa: LN_2,
        }
    }
}

impl Cocycle for SkewedAngle {
    fn fiber_dim(&self) -> usize {
        1
    }

    fn name(&self) -> &str {
        "skewed-angle"
    }

    fn flow(
        &self,
        _path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<LiftedPoint> {
        let delta = t1 - t0;
        if delta < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "backward flow requested: t0 = {t0}, t1 = {t1}"
            )));
        }
        let decay = (-self.kappa * delta).exp();
        let s1 = start.s_lift
            + delta / self.t1
            + (self.eps / self.t1) * start.y[0] * (1.0 - decay) / self.kappa;
        Ok(LiftedPoint::new(s1, vec![start.y[0] * decay]))
    }

    fn tangent_flow(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<(LiftedPoint, Vec<f64>)> {
        let end = self.flow(path, t0, t1, start)?;
        Ok((end, vec![(-self.kappa * (t1 - t0)).exp()]))
    }
}
