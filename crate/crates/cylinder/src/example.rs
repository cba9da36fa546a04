//! Benchmark system with closed-form solutions.
//!
//! Uniform rotation on the circle paired with a stochastically forced
//! pitchfork normal form in the radial fiber:
//!
//! ```text
//! ds   = dt / (2 pi)                       (one revolution per time 2 pi)
//! drho = (rho - rho^3) dt + nu rho ∘ dW    (Stratonovich)
//! ```
//!
//! The radial equation is solvable in closed form. Writing
//! `E(u) = exp(u + nu W(u))`,
//!
//! ```text
//! rho(t; rho0) = rho0 E(t) / sqrt(1 + 2 rho0^2 ∫_0^t E(u)^2 du),
//! ```
//!
//! and pulling the start time to `-infinity` yields the stationary radius
//!
//! ```text
//! rho*(omega) = ( 2 ∫_{-inf}^0 exp(2u + 2 nu W(u)) du )^{-1/2},
//! ```
//!
//! which satisfies `rho(t, rho*(omega), omega) = rho*(theta_t omega)`: the
//! graph `s -> rho*(omega)` is a random invariant circle, approached by
//! every positive initial radius, and the pair (one revolution per `2 pi`,
//! stationary radius) is a random periodic solution of period `2 pi` with
//! a single winding. The fiber Lyapunov exponent on the circle is exactly
//! `-2`: time averages of `1 - 3 rho*^2` converge there because
//! `rho*^2` has time average 1.
//!
//! Everything here is evaluated from stored path data only. The integrals
//! are trapezoid sums over the path grid, run through a rescaled recursion
//! whose exponents stay bounded (no overflow for long spans):
//! `J_k = ∫_{a}^{t_k} exp(2(u - t_k) + 2 nu (W(u) - W(t_k))) du` satisfies
//! `J_{k+1} = alpha_k J_k + dt/2 (alpha_k + 1)` with
//! `alpha_k = exp(-2 dt - 2 nu dW_k)`.

use crate::cocycle::{Cocycle, LiftedPoint};
use crate::error::{Error, Result};
use crate::integrate::{integrate, integrate_sampled, integrate_with_tangent, SdeSpec};
use crate::noise::WienerPath;

/// Full-circle time of the benchmark system.
pub const BENCH_T1: f64 = std::f64::consts::TAU;

/// The benchmark flow: uniform rotation plus a pitchfork radius.
#[derive(Debug, Clone)]
pub struct PitchforkCircle {
    /// Multiplicative noise amplitude on the radius.
    pub nu: f64,
}

impl PitchforkCircle {
    pub fn new(nu: f64) -> Self {
        PitchforkCircle { nu }
    }

    /// Time for one full revolution of the angle.
    pub fn t1(&self) -> f64 {
        BENCH_T1
    }

    /// Exact fiber Lyapunov exponent on the invariant circle.
    pub fn lyapunov_exact(&self) -> f64 {
        -2.0
    }

    /// The system as a 2-D Stratonovich SDE on (lifted angle, radius).
    pub fn sde_spec(&self) -> SdeSpec {
        let nu = self.nu;
        SdeSpec::new(
            2,
            Box::new(|x, f| {
                f[0] = 1.0 / BENCH_T1;
                f[1] = x[1] - x[1] * x[1] * x[1];
            }),
            Box::new(move |x, g| {
                g[0] = 0.0;
                g[1] = nu * x[1];
            }),
        )
        .with_jacobians(
            Box::new(|x, a| {
                a[0] = 0.0;
                a[1] = 0.0;
                a[2] = 0.0;
                a[3] = 1.0 - 3.0 * x[1] * x[1];
            }),
            Box::new(move |_x, b| {
                b[0] = 0.0;
                b[1] = 0.0;
                b[2] = 0.0;
                b[3] = nu;
            }),
        )
    }

    /// One step of the rescaled trapezoid recursion for
    /// `J = ∫ exp(2(u - t) + 2 nu (W(u) - W(t))) du` as `t` advances a cell.
    fn j_step(&self, j: f64, dt: f64, dw: f64) -> f64 {
        let alpha = (-2.0 * dt - 2.0 * self.nu * dw).exp();
        alpha * j + 0.5 * dt * (alpha + 1.0)
    }

    /// Closed-form radius at `t1`, starting from `rho0` at `t0`.
    ///
    /// Evaluated as `rho0 / sqrt(D + 2 rho0^2 J)` where
    /// `D = exp(-2 (t1 - t0) - 2 nu (W(t1) - W(t0)))` and `J` is the
    /// rescaled integral above; all exponents are bounded, so arbitrarily
    /// long spans underflow gracefully toward the stationary value instead
    /// of overflowing.
    pub fn closed_form_radius(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        rho0: f64,
    ) -> Result<f64> {
        let i0 = path.grid_index(t0)?;
        let i1 = path.grid_index(t1)?;
        if i1 < i0 {
            return Err(Error::InvalidArgument(format!(
                "backward evaluation requested: t0 = {t0}, t1 = {t1}"
            )));
        }
        if rho0 == 0.0 {
            return Ok(0.0);
        }
        let dt = path.dt();
        let mut j = 0.0;
        let mut d = 1.0;
        for i in i0..i1 {
            let dw = path.increment_at(i);
            j = self.j_step(j, dt, dw);
            d *= (-2.0 * dt - 2.0 * self.nu * dw).exp();
        }
        Ok(rho0 / (d + 2.0 * rho0 * rho0 * j).sqrt())
    }

    /// Closed-form radius sampled every `stride` cells along `[t0, t1]`.
    pub fn closed_form_radius_sampled(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        rho0: f64,
        stride: usize,
    ) -> Result<Vec<(f64, f64)>> {
        let i0 = path.grid_index(t0)?;
        let i1 = path.grid_index(t1)?;
        if i1 < i0 {
            return Err(Error::InvalidArgument(format!(
                "backward evaluation requested: t0 = {t0}, t1 = {t1}"
            )));
        }
        let stride = stride.max(1);
        let dt = path.dt();
        let mut j = 0.0;
        let mut d = 1.0;
        let mut out = Vec::with_capacity((i1 - i0) / stride + 2);
        out.push((path.time_at(i0), rho0));
        for i in i0..i1 {
            let dw = path.increment_at(i);
            j = self.j_step(j, dt, dw);
            d *= (-2.0 * dt - 2.0 * self.nu * dw).exp();
            if (i + 1 - i0) % stride == 0 || i + 1 == i1 {
                let rho = if rho0 == 0.0 {
                    0.0
                } else {
                    rho0 / (d + 2.0 * rho0 * rho0 * j).sqrt()
                };
                out.push((path.time_at(i + 1), rho));
            }
        }
        Ok(out)
    }

    /// Stationary radius `rho*(theta_t omega)`, integrating the closed-form
    /// tail from the left edge of the path's domain up to `t`.
    ///
    /// The truncation error is of relative size `exp(2 (t_min - t))`; give
    /// the path 20 or more time units of history before `t` and it is far
    /// below every tolerance used in this crate.
    pub fn stationary_radius(&self, path: &WienerPath, t: f64) -> Result<f64> {
        let i1 = path.grid_index(t)?;
        let dt = path.dt();
        let mut j = 0.0;
        for i in 0..i1 {
            j = self.j_step(j, dt, path.increment_at(i));
        }
        if j <= 0.0 {
            return Err(Error::InvalidArgument(
                "stationary radius needs path history before t".into(),
            ));
        }
        Ok(1.0 / (2.0 * j).sqrt())
    }

    /// Ergodic route to the fiber Lyapunov exponent: the time average of
    /// the pathwise linearization rate `1 - 3 rho(t)^2` along the
    /// numerically integrated trajectory started on the stationary radius.
    ///
    /// Stationarity forces the time average of `1 - rho^2` to vanish, so
    /// this average converges to `1 - 3 E[rho*^2] = -2` — a route through
    /// plain trajectory statistics, independent of any tangent transport.
    pub fn ergodic_rate_average(&self, path: &WienerPath, t_max: f64) -> Result<f64> {
        let rho0 = self.stationary_radius(path, 0.0)?;
        let samples = integrate_sampled(&self.sde_spec(), path, 0.0, t_max, &[0.0, rho0], 1)?;
        if samples.len() < 2 {
            return Err(Error::InvalidArgument(
                "ergodic average needs a positive horizon".into(),
            ));
        }
        // Trapezoid rule for the running integral of 1 - 3 rho^2.
        let mut acc = 0.0;
        for pair in samples.windows(2) {
            let (t0, ref x0) = pair[0];
            let (t1, ref x1) = pair[1];
            let f0 = 1.0 - 3.0 * x0[1] * x0[1];
            let f1 = 1.0 - 3.0 * x1[1] * x1[1];
            acc += 0.5 * (f0 + f1) * (t1 - t0);
        }
        let span = samples.last().unwrap().0 - samples[0].0;
        Ok(acc / span)
    }
}

impl Cocycle for PitchforkCircle {
    fn fiber_dim(&self) -> usize {
        1
    }

    fn name(&self) -> &str {
        "pitchfork-circle"
    }

    fn flow(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<LiftedPoint> {
        let spec = self.sde_spec();
        let x = integrate(&spec, path, t0, t1, &[start.s_lift, start.y[0]])?;
        Ok(LiftedPoint::new(x[0], vec![x[1]]))
    }

    fn tangent_flow(
        &self,
        path: &WienerPath,
        t0: f64,
        t1: f64,
        start: &LiftedPoint,
    ) -> Result<(LiftedPoint, Vec<f64>)> {
        let spec = self.sde_spec();
        let (x, v) = integrate_with_tangent(
            &spec,
            path,
            t0,
            t1,
            &[start.s_lift, start.y[0]],
            &[vec![0.0, 1.0]],
        )?;
        Ok((LiftedPoint::new(x[0], vec![x[1]]), vec![v[0][1]]))
    }

    /// Positive radii only: the zero section is invariant and repelling, and
    /// the system models a radius, so the attractor of interest is the
    /// positive branch.
    fn default_fiber_seeds(&self, n: usize) -> Vec<Vec<f64>> {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        (0..n)
            .map(|i| {
                let u = (0.5 + INV_PHI * (i as f64 + 1.0)).fract();
                vec![0.3 + 2.5 * u]
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{composition_residual, identity_residual, shifted_composition_residual};

    // Frozen values of the deterministic (nu = 0, W = 0) radius
    // rho(t) = rho0 e^t / sqrt(1 + rho0^2 (e^{2t} - 1)),
    // evaluated independently.
    const RHO_T1_FROM_HALF: f64 = 0.8433472560147414; // t = 1,   rho0 = 0.5
    const RHO_THALF_FROM_TWO: f64 = 1.175177856120688; // t = 0.5, rho0 = 2.0
    const EXP_MINUS_4PI: f64 = 3.4873423562089973e-6;

    #[test]
    fn deterministic_radius_matches_frozen_logistic_values() {
        let sys = PitchforkCircle::new(0.0);
        let path = WienerPath::zeros(0.0, 1.0, 1e-4).unwrap();
        let r = sys.closed_form_radius(&path, 0.0, 1.0, 0.5).unwrap();
        assert!(
            (r - RHO_T1_FROM_HALF).abs() < 1e-8,
            "rho(1; 0.5) = {r}, frozen {RHO_T1_FROM_HALF}"
        );
        let r = sys.closed_form_radius(&path, 0.0, 0.5, 2.0).unwrap();
        assert!(
            (r - RHO_THALF_FROM_TWO).abs() < 1e-8,
            "rho(0.5; 2.0) = {r}, frozen {RHO_THALF_FROM_TWO}"
        );
    }

    /// Grid spacing near 1e-3 that divides the full-circle time exactly.
    fn period_grid() -> f64 {
        BENCH_T1 / 6283.0
    }

    #[test]
    fn ergodic_rate_average_recovers_the_exponent() {
        let sys = PitchforkCircle::new(0.5);
        // 20 units of history for the stationary radius, 150 of averaging.
        let path = WienerPath::generate(77, -20.0, 150.0, 1e-2).unwrap();
        let avg = sys.ergodic_rate_average(&path, 150.0).unwrap();
        assert!(
            (avg - sys.lyapunov_exact()).abs() < 0.3,
            "time average {avg} vs exact {}",
            sys.lyapunov_exact()
        );

        // Deterministic limit: the trajectory sits at rho = 1 exactly.
        let sys0 = PitchforkCircle::new(0.0);
        let flat = WienerPath::zeros(-30.0, 10.0, 1e-3).unwrap();
        let avg0 = sys0.ergodic_rate_average(&flat, 10.0).unwrap();
        assert!((avg0 + 2.0).abs() < 1e-6, "deterministic average {avg0}");
    }

    #[test]
    fn numerical_flow_tracks_closed_form() {
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(2024, 0.0, BENCH_T1, period_grid()).unwrap();
        let start = LiftedPoint::new(0.0, vec![0.4]);
        let sampled = sys
            .closed_form_radius_sampled(&path, 0.0, BENCH_T1, 0.4, 100)
            .unwrap();
        let mut max_err: f64 = 0.0;
        for (t, rho_closed) in &sampled {
            let end = sys.flow(&path, 0.0, *t, &start).unwrap();
            max_err = max_err.max((end.y[0] - rho_closed).abs());
        }
        assert!(
            max_err < 2e-3,
            "max deviation from closed form: {max_err:.3e}"
        );
    }

    #[test]
    fn angle_advances_uniformly() {
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(7, 0.0, BENCH_T1, period_grid()).unwrap();
        let start = LiftedPoint::new(0.25, vec![1.0]);
        let end = sys.flow(&path, 0.0, BENCH_T1, &start).unwrap();
        assert!(
            (end.s_lift - 1.25).abs() < 1e-9,
            "one revolution in time 2 pi, got s_lift = {}",
            end.s_lift
        );
    }

    #[test]
    fn stationary_radius_is_invariant_under_the_flow() {
        // rho(t, rho*(omega), omega) = rho*(theta_t omega), both sides from
        // the same quadrature data.
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(42, -30.0, 10.0, 1e-3).unwrap();
        let rho_star = sys.stationary_radius(&path, 0.0).unwrap();
        assert!(rho_star > 0.0);
        for t in [0.5, 2.5, 7.0] {
            let lhs = sys.closed_form_radius(&path, 0.0, t, rho_star).unwrap();
            let rhs = sys.stationary_radius(&path, t).unwrap();
            assert!(
                (lhs - rhs).abs() < 1e-9,
                "invariance residual at t = {t}: {:.3e}",
                (lhs - rhs).abs()
            );
        }
        // and through the shifted path, as the shift-covariance states it
        let shifted = path.shift(2.5).unwrap();
        let rhs_shifted = sys.stationary_radius(&shifted, 0.0).unwrap();
        let lhs = sys.closed_form_radius(&path, 0.0, 2.5, rho_star).unwrap();
        assert!((lhs - rhs_shifted).abs() < 1e-9);
    }

    #[test]
    fn closed_form_has_the_semigroup_property() {
        let sys = PitchforkCircle::new(0.7);
        let path = WienerPath::generate(9, 0.0, 4.0, 1e-3).unwrap();
        let direct = sys.closed_form_radius(&path, 0.0, 4.0, 0.8).unwrap();
        let mid = sys.closed_form_radius(&path, 0.0, 1.5, 0.8).unwrap();
        let relay = sys.closed_form_radius(&path, 1.5, 4.0, mid).unwrap();
        assert!(
            (direct - relay).abs() < 1e-9,
            "semigroup residual {:.3e}",
            (direct - relay).abs()
        );
    }

    #[test]
    fn mirror_symmetry_and_zero_invariance() {
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(13, 0.0, 2.0, 1e-3).unwrap();
        let plus = sys.closed_form_radius(&path, 0.0, 2.0, 0.6).unwrap();
        let minus = sys.closed_form_radius(&path, 0.0, 2.0, -0.6).unwrap();
        assert_eq!(plus, -minus);
        assert_eq!(sys.closed_form_radius(&path, 0.0, 2.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn flow_laws_hold_bit_exactly() {
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(5, -1.0, 5.0, 1e-2).unwrap();
        let x = LiftedPoint::new(0.1, vec![0.9]);
        assert_eq!(identity_residual(&sys, &path, 1.0, &x).unwrap(), 0.0);
        assert_eq!(
            composition_residual(&sys, &path, 0.0, 2.0, 5.0, &x).unwrap(),
            0.0
        );
        assert_eq!(
            shifted_composition_residual(&sys, &path, 0.0, 2.0, 5.0, &x).unwrap(),
            0.0
        );
    }

    #[test]
    fn period_map_contracts_like_exp_minus_4pi() {
        // With nu = 0 the invariant circle sits at rho = 1 and the fiber
        // derivative of the one-revolution map is exp(-2 * 2 pi).
        let sys = PitchforkCircle::new(0.0);
        let path = WienerPath::zeros(0.0, BENCH_T1, period_grid()).unwrap();
        let start = LiftedPoint::new(0.0, vec![1.0]);
        let (_, jac) = sys.tangent_flow(&path, 0.0, BENCH_T1, &start).unwrap();
        let rel = (jac[0] - EXP_MINUS_4PI).abs() / EXP_MINUS_4PI;
        assert!(
            rel < 1e-4,
            "fiber derivative {} vs {}, rel {rel:.2e}",
            jac[0],
            EXP_MINUS_4PI
        );
    }

    #[test]
    fn sampled_closed_form_agrees_with_endpoint_evaluation() {
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(77, 0.0, 3.0, 1e-3).unwrap();
        let sampled = sys
            .closed_form_radius_sampled(&path, 0.0, 3.0, 0.7, 500)
            .unwrap();
        for (t, rho) in &sampled {
            let direct = sys.closed_form_radius(&path, 0.0, *t, 0.7).unwrap();
            assert_eq!(*rho, direct, "mismatch at t = {t}");
        }
    }

    #[test]
    fn pullback_start_forgetting() {
        // two different starts converge toward each other at time 0 as the
        // start time recedes: the closed form has a one-point attractor
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(3, -16.0, 1.0, 1e-3).unwrap();
        let mut prev_gap = f64::INFINITY;
        for t_start in [-2.0, -4.0, -8.0, -16.0] {
            let a = sys.closed_form_radius(&path, t_start, 0.0, 0.5).unwrap();
            let b = sys.closed_form_radius(&path, t_start, 0.0, 2.5).unwrap();
            let gap = (a - b).abs();
            assert!(gap < prev_gap, "gap should shrink: {gap} vs {prev_gap}");
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-9, "terminal gap {prev_gap:.3e}");
    }

    #[test]
    fn default_seeds_are_positive_and_spread() {
        let sys = PitchforkCircle::new(0.5);
        let seeds = sys.default_fiber_seeds(16);
        assert_eq!(seeds.len(), 16);
        assert!(seeds.iter().all(|y| y[0] > 0.0));
        let min = seeds.iter().map(|y| y[0]).fold(f64::INFINITY, f64::min);
        let max = seeds
            .iter()
            .map(|y| y[0])
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(max - min > 1.0);
    }
}
