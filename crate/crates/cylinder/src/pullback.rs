//! Pullback convergence to the random attractor.
//!
//! Instead of running one trajectory forward and waiting, the pullback view
//! fixes the arrival time and starts the flow ever earlier along the same
//! noise realization. As the start recedes, the arrival state of a fixed
//! initial condition converges to a point on the random attractor — the
//! same point for every initial condition in its basin. Successive arrival
//! states at increasing horizons measure that convergence directly.
//!
//! Runs here target a fixed arrival *angle*: for horizon `T` the start
//! angle is set back by `T * angle_speed` so every run lands on the same
//! fiber, and distances between arrivals are meaningful. The angle speed is
//! the reciprocal of the system's full-circle time.

use crate::cocycle::{Cocycle, LiftedPoint};
use crate::error::{Error, Result};
use crate::noise::WienerPath;

/// Result of a pullback sweep over increasing horizons.
#[derive(Debug, Clone)]
pub struct PullbackRun {
    /// Horizons, ascending (time distances from start to arrival).
    pub horizons: Vec<f64>,
    /// Arrival state for each horizon.
    pub states: Vec<LiftedPoint>,
    /// Distances between consecutive arrival states
    /// (`errors[i]` compares horizons `i` and `i+1`; length is one less
    /// than `horizons`).
    pub errors: Vec<f64>,
    /// Least-squares slope of `ln(error)` against horizon, when enough
    /// errors sit above the rounding floor. Negative means convergence;
    /// for an attractor with fiber Lyapunov exponent `lambda` it
    /// approaches `lambda`.
    pub rate_estimate: Option<f64>,
    /// Whether the final successive difference is at or below `tolerance`.
    pub converged: bool,
    pub tolerance: f64,
}

/// Pullback sweep: flow `y0` into the fiber over `s_star` at time `t_star`
/// from starts `t_star - T` for each horizon `T`.
///
/// `angle_speed` is the angular advance per unit time (`1 / t1`). Horizons
/// must be positive, ascending, and grid-aligned along with `t_star`. The
/// path is extended automatically when it has a generator stream; an
/// imported path must already cover
/// `[t_star - max(T) - history, t_star]`.
pub fn pullback(
    system: &dyn Cocycle,
    path: &WienerPath,
    t_star: f64,
    s_star: f64,
    y0: &[f64],
    horizons: &[f64],
    tolerance: f64,
    angle_speed: f64,
) -> Result<PullbackRun> {
    if horizons.is_empty() {
        return Err(Error::InvalidArgument("no horizons given".into()));
    }
    if horizons.windows(2).any(|w| w[1] <= w[0]) || horizons[0] <= 0.0 {
        return Err(Error::InvalidArgument(
            "horizons must be positive and strictly ascending".into(),
        ));
    }
    if y0.len() != system.fiber_dim() {
        return Err(Error::InvalidArgument(format!(
            "fiber seed has dimension {}, system has {}",
            y0.len(),
            system.fiber_dim()
        )));
    }
    let max_t = horizons[horizons.len() - 1];
    let needed_min = t_star - max_t - system.history_needed();
    let path = if path.has_stream() {
        path.ensure_domain(needed_min, t_star)?
    } else {
        if needed_min < path.t_min() - 1e-9 || t_star > path.t_max() + 1e-9 {
            return Err(Error::DomainExceeded {
                t: needed_min,
                t_min: path.t_min(),
                t_max: path.t_max(),
            });
        }
        path.clone()
    };
    let mut states = Vec::with_capacity(horizons.len());
    for &t in horizons {
        let start = LiftedPoint::new(s_star - t * angle_speed, y0.to_vec());
        let end = system.flow(&path, t_star - t, t_star, &start)?;
        states.push(end);
    }
    let errors: Vec<f64> = states
        .windows(2)
        .map(|w| w[0].dist(&w[1]))
        .collect();
    let scale = states
        .iter()
        .map(|p| crate::linalg::norm(&p.y))
        .fold(1.0f64, f64::max);
    let rate_estimate = fit_log_rate(&horizons[1..], &errors, 1e-13 * scale);
    let converged = errors.last().map(|&e| e <= tolerance).unwrap_or(false);
    Ok(PullbackRun {
        horizons: horizons.to_vec(),
        states,
        errors,
        rate_estimate,
        converged,
        tolerance,
    })
}

/// Least-squares slope of `ln(err)` against `t`, ignoring entries at or
/// below `floor` (rounding noise). Needs at least two usable points.
pub fn fit_log_rate(ts: &[f64], errs: &[f64], floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(errs)
        .filter(|(_, &e)| e > floor && e.is_finite())
        .map(|(&t, &e)| (t, e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::example::PitchforkCircle;
    use crate::fixtures::TrackedSinusoid;

    #[test]
    fn benchmark_pullback_converges_to_stationary_radius() {
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(77, -22.0, 1.0, 1e-3).unwrap();
        let run = pullback(
            &sys,
            &path,
            0.0,
            0.25,
            &[0.8],
            &[1.0, 2.0, 4.0, 8.0, 16.0],
            1e-3,
            1.0 / sys.t1(),
        )
        .unwrap();
        assert!(run.converged, "errors: {:?}", run.errors);
        // successive differences shrink
        assert!(run.errors.windows(2).all(|w| w[1] < w[0]));
        // the arrival fiber is the stationary radius
        let rho_star = sys.stationary_radius(&path, 0.0).unwrap();
        let last = run.states.last().unwrap();
        assert!(
            (last.y[0] - rho_star).abs() < 5e-3,
            "arrival {} vs stationary {}",
            last.y[0],
            rho_star
        );
        // arrival angle is pinned
        assert!((crate::cocycle::wrap_unit(last.s_lift) - 0.25).abs() < 1e-6);
    }

    #[test]
    fn tracked_sinusoid_rate_matches_contraction_exponent() {
        // deterministic contraction exp(-kappa t): the fitted rate is clean
        let sys = TrackedSinusoid::default();
        let path = WienerPath::generate(5, -24.0, 1.0, 0.0625).unwrap();
        let horizons: Vec<f64> = (1..=10).map(|k| 2.0 * k as f64).collect();
        let run = pullback(&sys, &path, 0.0, 0.5, &[4.0], &horizons, 1e-9, 1.0).unwrap();
        let rate = run.rate_estimate.expect("rate should fit");
        let kappa = std::f64::consts::LN_2;
        assert!(
            (rate + kappa).abs() < 0.15,
            "fitted rate {rate} vs -kappa {}",
            -kappa
        );
        let curve = sys.curve_value(&path, 0.0, 0.5).unwrap();
        assert!((run.states.last().unwrap().y[0] - curve).abs() < 1e-4);
    }

    #[test]
    fn imported_paths_must_cover_the_sweep() {
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(1, -2.0, 1.0, 0.01).unwrap();
        let mut buf = Vec::new();
        path.export_csv(&mut buf).unwrap();
        let imported = WienerPath::import_csv(&buf[..]).unwrap();
        let err = pullback(
            &sys,
            &imported,
            0.0,
            0.0,
            &[1.0],
            &[1.0, 4.0],
            1e-3,
            1.0 / sys.t1(),
        );
        assert!(matches!(err, Err(Error::DomainExceeded { .. })));
    }

    #[test]
    fn horizon_validation() {
        let sys = PitchforkCircle::new(0.5);
        let path = WienerPath::generate(1, -4.0, 1.0, 0.01).unwrap();
        for bad in [vec![], vec![-1.0, 2.0], vec![2.0, 2.0], vec![3.0, 1.0]] {
            assert!(pullback(
                &sys,
                &path,
                0.0,
                0.0,
                &[1.0],
                &bad,
                1e-3,
                1.0 / sys.t1()
            )
            .is_err());
        }
    }

    #[test]
    fn log_rate_fit_recovers_slope() {
        let ts = [1.0, 2.0, 3.0, 4.0];
        let errs: Vec<f64> = ts.iter().map(|t: &f64| 0.7 * (-2.0 * t).exp()).collect();
        let slope = fit_log_rate(&ts, &errs, 0.0).unwrap();
        assert!((slope + 2.0).abs() < 1e-12);
        // entries at the floor are ignored; too few points -> None
        assert!(fit_log_rate(&ts[..1], &errs[..1], 0.0).is_none());
        let tiny = [1e-16, 1e-16, 1e-16, 1e-16];
        assert!(fit_log_rate(&ts, &tiny, 1e-13).is_none());
    }
}
