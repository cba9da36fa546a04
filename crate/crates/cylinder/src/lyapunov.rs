//! Contraction estimation and asymptotic Lyapunov exponents of the fiber
//! dynamics.
//!
//! Two quantities with two distinct routes:
//!
//! - [`estimate_contraction`] measures the *finite-block* contraction of the
//!   fiber over `n0` windings by transporting exact tangent maps and taking
//!   operator norms — the quantitative hypothesis behind curve extraction.
//!   This is deliberately independent of the diameter-ratio bootstrap inside
//!   the winding module, so the two can cross-check each other.
//! - [`lyapunov_exponent`] measures the *asymptotic* exponential rate along
//!   one trajectory, with periodic renormalization so the tangent norm never
//!   under- or overflows.
//!
//! Both report empirical maxima over finite seed and sample sets. They are
//! estimates, never certificates: the supremum over noise realizations is
//! replaced by a maximum over the seeds the caller supplies.

use crate::cocycle::CylinderPoint;
use crate::error::{Error, Result};
use crate::linalg::{dist, matvec, norm, operator_norm};
use crate::noise::WienerPath;
use crate::winding::{sample_fiber, RandomCurve, WindingSystem, DEFAULT_FIBER_SEEDS};

/// Central finite-difference step for the angle derivative.
const ANGLE_FD_STEP: f64 = 1e-4;

/// Smallest fiber diameter bound we ever report; guards the degenerate case
/// where every supplied sample sits on a single point.
const B_STAR_FLOOR: f64 = 1e-3;

/// Safety margin on the measured diameter bound.
const B_STAR_MARGIN: f64 = 1.2;

/// Contraction data of the fiber dynamics over `n0`-winding blocks.
///
/// `lambda_hat` and `c_hat` are empirical maxima over the supplied samples
/// and seeds; `l_derived` and `n_bound` are the derived Lipschitz constant
/// and pullback-depth bound that the curve machinery consumes.
#[derive(Debug, Clone, PartialEq)]
pub struct ContractionReport {
    /// Number of windings per block the estimate is taken over.
    pub n0: usize,
    /// Max over samples and seeds of the operator norm of the fiber
    /// derivative of the block map.
    pub lambda_hat: f64,
    /// Max over samples and seeds of the norm of the angle derivative of
    /// the block map's fiber image (central finite differences).
    pub c_hat: f64,
    /// Derived Lipschitz bound for invariant curves: `c_hat / (1 - lambda_hat)`.
    pub l_derived: f64,
    /// Smallest integer `N` with `2 lambda_hat^N b_star < gap`.
    pub n_bound: usize,
    /// Fiber diameter bound: covers both the sampled neighborhood and the
    /// default pullback launch set, with a 20% margin.
    pub b_star: f64,
    /// Observed fiber gap between distinct components at angle 0
    /// (infinite when the fiber is a single component).
    pub gap: f64,
    /// Number of cylinder points sampled.
    pub sample_count: usize,
    /// Noise seeds the maxima were taken over. Empty when the estimate ran
    /// on the winding system's own path only.
    pub seeds_used: Vec<u64>,
}

/// Largest pairwise distance within a set of fiber vectors.
fn spread(points: &[Vec<f64>]) -> f64 {
    let mut out = 0.0f64;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            out = out.max(dist(&points[i], &points[j]));
        }
    }
    out
}

/// Estimate the block contraction `lambda`, the angle coupling `c`, and the
/// derived constants `L = c / (1 - lambda)` and the depth bound `N` over
/// `n0`-winding blocks.
///
/// For every supplied sample and every seed (each seed drives a freshly
/// generated path on the winding grid; an empty seed list uses the system's
/// own path), the fiber derivative of the block map is transported exactly
/// via the flow's tangent map and measured in operator norm — exact for
/// fiber dimension up to 3, power iteration beyond. The angle derivative is
/// a central finite difference of the block map's fiber image with step
/// 1e-4 in the start angle.
///
/// When `n0` matches the winding system's own block count, the result is
/// cached on the system (first writer wins) so subsequent fiber sampling
/// and extraction use these certified constants for their cutoffs.
///
/// Errors with [`Error::ContractionFailed`] when the measured `lambda_hat`
/// is not below 1 — the sampled region does not contract uniformly at this
/// block count, and a larger `n0` (or a tighter sample tube) is needed.
pub fn estimate_contraction(
    ws: &WindingSystem,
    region_samples: &[CylinderPoint],
    n0: usize,
    seeds: &[u64],
) -> Result<ContractionReport> {
    if n0 == 0 {
        return Err(Error::InvalidArgument(
            "contraction estimation needs n0 >= 1".into(),
        ));
    }
    if region_samples.is_empty() {
        return Err(Error::InvalidArgument(
            "contraction estimation needs at least one sample point".into(),
        ));
    }
    let d = ws.base.fiber_dim();
    for z in region_samples {
        if z.y.len() != d {
            return Err(Error::InvalidArgument(format!(
                "sample fiber dimension {} does not match the system's {}",
                z.y.len(),
                d
            )));
        }
    }

    let span = ws.block_time(n0 as i64);
    let dt = ws.path.dt();
    let hist = ws.base.history_needed();
    // Whole-cell domain bounds around [0, span] plus history.
    let lo = -dt * ((hist / dt).ceil() + 1.0);
    let hi = span + dt;

    let paths: Vec<WienerPath> = if seeds.is_empty() {
        vec![ws.path.ensure_domain(lo, hi)?]
    } else {
        seeds
            .iter()
            .map(|&seed| WienerPath::generate(seed, lo, hi, dt))
            .collect::<Result<_>>()?
    };

    let mut lambda_hat = 0.0f64;
    let mut c_hat = 0.0f64;
    for path in &paths {
        for z in region_samples {
            let start = z.lift(0);
            let (_, jac) = ws.base.tangent_flow(path, 0.0, span, &start)?;
            lambda_hat = lambda_hat.max(operator_norm(&jac, d));

            let mut fwd = start.clone();
            fwd.s_lift += ANGLE_FD_STEP;
            let mut bwd = start.clone();
            bwd.s_lift -= ANGLE_FD_STEP;
            let plus = ws.base.flow(path, 0.0, span, &fwd)?;
            let minus = ws.base.flow(path, 0.0, span, &bwd)?;
            c_hat = c_hat.max(dist(&plus.y, &minus.y) / (2.0 * ANGLE_FD_STEP));
        }
    }

    if !(lambda_hat < 1.0) {
        return Err(Error::ContractionFailed { lambda: lambda_hat });
    }

    // Diameter bound: the pullback error estimate 2 lambda^m b* charges the
    // full displacement of whatever starting set is pulled back, so b* must
    // cover the default launch seeds as well as the sampled tube.
    let sample_spread = spread(
        &region_samples
            .iter()
            .map(|z| z.y.clone())
            .collect::<Vec<_>>(),
    );
    let launch = ws.base.default_fiber_seeds(DEFAULT_FIBER_SEEDS);
    let b_star = (B_STAR_MARGIN * sample_spread.max(spread(&launch))).max(B_STAR_FLOOR);

    if n0 == ws.n0 {
        ws.set_contraction(lambda_hat, b_star);
    }

    // Fiber gap at angle 0, sampled deep enough that the pullback error is
    // far below the component separation the depth bound must resolve.
    let mut m_gap = 2usize;
    while lambda_hat.powi(m_gap as i32) * b_star >= crate::winding::DEFAULT_GAP_FLOOR / 4.0
        && m_gap < 60
    {
        m_gap += 1;
    }
    let fiber = sample_fiber(ws, 0.0, m_gap, &launch)?;
    let gap = fiber.gap;

    let mut n_bound = 0usize;
    while !(2.0 * lambda_hat.powi(n_bound as i32) * b_star < gap) {
        n_bound += 1;
        if n_bound > 100_000 {
            return Err(Error::ContractionFailed { lambda: lambda_hat });
        }
    }

    Ok(ContractionReport {
        n0,
        lambda_hat,
        c_hat,
        l_derived: c_hat / (1.0 - lambda_hat),
        n_bound,
        b_star,
        gap,
        sample_count: region_samples.len(),
        seeds_used: seeds.to_vec(),
    })
}

/// Sample cylinder points in a tube around extracted curves, for feeding
/// [`estimate_contraction`].
///
/// At `n_angles` evenly spaced angles, every strand of every curve
/// contributes its own point plus two axis offsets per fiber coordinate at
/// distance `tube_scale` times the local gap between strands (or a fixed
/// offset of `0.25 (1 + |y|)` when there is a single strand and the gap is
/// infinite).
///
/// The default scale of 0.5 reaches halfway to the nearest other strand;
/// for systems with a repelling set between curves that midpoint does not
/// contract, and [`estimate_contraction`] will honestly report the failure.
/// Pass a smaller scale to sample a tighter tube.
pub fn curve_tube_samples(
    curves: &[RandomCurve],
    n_angles: usize,
    tube_scale: f64,
) -> Vec<CylinderPoint> {
    let n_angles = n_angles.max(1);
    let mut out = Vec::new();
    for g in 0..n_angles {
        let s = g as f64 / n_angles as f64;
        let mut strands: Vec<Vec<f64>> = Vec::new();
        for curve in curves {
            for w in 0..curve.tau {
                strands.push(curve.eval(s + w as f64));
            }
        }
        for (i, y) in strands.iter().enumerate() {
            let mut local_gap = f64::INFINITY;
            for (j, other) in strands.iter().enumerate() {
                if i != j {
                    local_gap = local_gap.min(dist(y, other));
                }
            }
            let half = if local_gap.is_finite() {
                tube_scale * local_gap
            } else {
                0.25 * (1.0 + norm(y))
            };
            out.push(CylinderPoint::new(s, y.clone()));
            for axis in 0..y.len() {
                for sign in [-1.0, 1.0] {
                    let mut off = y.clone();
                    off[axis] += sign * half;
                    out.push(CylinderPoint::new(s, off));
                }
            }
        }
    }
    out
}

/// Asymptotic Lyapunov exponent of the fiber dynamics along one trajectory,
/// with the tangent vector renormalized after every winding.
///
/// Flows from `z0` for (approximately) `t_max` time units — rounded to a
/// whole number of windings, at least one — transporting a unit fiber
/// tangent block by block, accumulating the log of its growth, and
/// resetting it to unit length after each block. Returns the accumulated
/// log divided by the actual time flowed.
pub fn lyapunov_exponent(ws: &WindingSystem, z0: &CylinderPoint, t_max: f64) -> Result<f64> {
    lyapunov_exponent_cadence(ws, z0, t_max, 1)
}

/// [`lyapunov_exponent`] with the renormalization cadence exposed:
/// the tangent is reset to unit length every `blocks_per_renorm` windings.
/// The estimate itself must not depend on the cadence (a round-off-level
/// effect only), which is exactly what makes the cadence worth exposing:
/// agreement across cadences is a consistency check on the transport.
pub fn lyapunov_exponent_cadence(
    ws: &WindingSystem,
    z0: &CylinderPoint,
    t_max: f64,
    blocks_per_renorm: usize,
) -> Result<f64> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument(
            "lyapunov horizon must be positive".into(),
        ));
    }
    let cadence = blocks_per_renorm.max(1);
    let blocks = ((t_max / ws.t1).round() as i64).max(1);
    let dt = ws.path.dt();
    let hist = ws.base.history_needed();
    let path = ws
        .path
        .ensure_domain(-dt * ((hist / dt).ceil() + 1.0), ws.block_time(blocks) + dt)?;

    let d = ws.base.fiber_dim();
    let mut v = vec![0.0; d];
    v[0] = 1.0;
    let mut z = z0.lift(0);
    let mut total_log = 0.0f64;
    let mut k: i64 = 0;
    while k < blocks {
        let step = cadence.min((blocks - k) as usize) as i64;
        let t0 = ws.block_time(k);
        let t1 = ws.block_time(k + step);
        let (end, jac) = ws.base.tangent_flow(&path, t0, t1, &z)?;
        v = matvec(&jac, &v, d);
        let growth = norm(&v);
        if !growth.is_finite() || growth == 0.0 {
            return Err(Error::BlowUp { t: t1, norm: growth });
        }
        total_log += growth.ln();
        for c in &mut v {
            *c /= growth;
        }
        z = end;
        k += step;
    }
    Ok(total_log / ws.block_time(blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cocycle::{Cocycle, LiftedPoint};
    use crate::example::PitchforkCircle;

    /// exp(-4 pi): deterministic fiber derivative of the one-revolution map
    /// at the stationary radius.
    const EXP_MINUS_4PI: f64 = 3.4873423562089973e-6;
    use crate::fixtures::{DoubleWell, TrackedSinusoid};
    use crate::winding::build_winding_system;
    use std::sync::Arc;

    fn fixture_path(seed: u64) -> WienerPath {
        WienerPath::generate(seed, -2.0, 3.0, 1.0 / 512.0).unwrap()
    }

    fn sinusoid_ws(seed: u64) -> WindingSystem {
        build_winding_system(Arc::new(TrackedSinusoid::default()), &fixture_path(seed), &[]).unwrap()
    }

    fn double_well_ws(seed: u64) -> WindingSystem {
        build_winding_system(Arc::new(DoubleWell::default()), &fixture_path(seed), &[]).unwrap()
    }

    fn benchmark_ws(seed: u64, dt: f64, t_hi: f64) -> WindingSystem {
        let path = WienerPath::generate(seed, -1.0, t_hi, dt).unwrap();
        build_winding_system(Arc::new(PitchforkCircle::new(0.5)), &path, &[]).unwrap()
    }

    /// Fiber frozen in place under a uniform rotation: every exponent is 0.
    #[derive(Debug)]
    struct FrozenFiber;

    impl Cocycle for FrozenFiber {
        fn fiber_dim(&self) -> usize {
            1
        }
        fn name(&self) -> &str {
            "frozen-fiber"
        }
        fn flow(
            &self,
            _path: &WienerPath,
            t0: f64,
            t1: f64,
            start: &LiftedPoint,
        ) -> Result<LiftedPoint> {
            Ok(LiftedPoint::new(start.s_lift + (t1 - t0), start.y.clone()))
        }
        fn tangent_flow(
            &self,
            path: &WienerPath,
            t0: f64,
            t1: f64,
            start: &LiftedPoint,
        ) -> Result<(LiftedPoint, Vec<f64>)> {
            Ok((self.flow(path, t0, t1, start)?, vec![1.0]))
        }
    }

    #[test]
    fn sinusoid_contraction_matches_the_analytic_derivatives() {
        let fixture = TrackedSinusoid::default();
        let ws = sinusoid_ws(11);
        // Samples must include angle 0, where the angle coupling peaks.
        let samples = vec![
            CylinderPoint::new(0.0, vec![0.3]),
            CylinderPoint::new(0.25, vec![-1.0]),
            CylinderPoint::new(0.6, vec![2.0]),
        ];
        let report = estimate_contraction(&ws, &samples, 1, &[3, 4]).unwrap();
        assert!(
            (report.lambda_hat - fixture.contraction_per_winding()).abs() < 1e-12,
            "lambda_hat = {}",
            report.lambda_hat
        );
        assert!(
            (report.c_hat - fixture.angle_coupling()).abs() < 1e-6,
            "c_hat = {} vs {}",
            report.c_hat,
            fixture.angle_coupling()
        );
        let l_expected = fixture.angle_coupling() / (1.0 - fixture.contraction_per_winding());
        assert!((report.l_derived - l_expected).abs() < 1e-5);
        assert_eq!(report.sample_count, 3);
        assert_eq!(report.seeds_used, vec![3, 4]);
        // Single curve: infinite gap, so no depth is needed to separate it.
        assert!(report.gap.is_infinite());
        assert_eq!(report.n_bound, 0);
    }

    #[test]
    fn two_winding_blocks_square_the_contraction() {
        let fixture = TrackedSinusoid::default();
        let ws = sinusoid_ws(11);
        let samples = vec![CylinderPoint::new(0.0, vec![0.3])];
        let report = estimate_contraction(&ws, &samples, 2, &[3]).unwrap();
        let expected = fixture.contraction_per_winding().powi(2);
        assert!(
            (report.lambda_hat - expected).abs() < 1e-12,
            "lambda_hat = {} vs {}",
            report.lambda_hat,
            expected
        );
    }

    #[test]
    fn contraction_estimate_is_cached_on_the_winding_system() {
        let ws = sinusoid_ws(11);
        assert!(ws.contraction_data().is_none());
        let samples = vec![CylinderPoint::new(0.0, vec![0.3])];
        let report = estimate_contraction(&ws, &samples, 1, &[]).unwrap();
        let (lambda, b_star) = ws.contraction_data().unwrap();
        assert_eq!(lambda, report.lambda_hat);
        assert_eq!(b_star, report.b_star);
        // A mismatched block count must not clobber the cache.
        let ws2 = sinusoid_ws(12);
        estimate_contraction(&ws2.clone().with_n0(1), &samples, 2, &[]).ok();
        assert!(ws2.contraction_data().is_none());
    }

    #[test]
    fn double_well_gap_and_depth_bound_are_consistent() {
        let ws = double_well_ws(5);
        // Tight tube around both wells: contraction holds at one winding.
        let samples = vec![
            CylinderPoint::new(0.0, vec![1.0]),
            CylinderPoint::new(0.0, vec![0.9]),
            CylinderPoint::new(0.5, vec![1.1]),
            CylinderPoint::new(0.0, vec![-1.0]),
            CylinderPoint::new(0.5, vec![-0.9]),
            CylinderPoint::new(0.25, vec![-1.1]),
        ];
        let report = estimate_contraction(&ws, &samples, 1, &[]).unwrap();
        assert!(report.lambda_hat < 1.0);
        // The wells sit at y = -1 and y = +1: a gap of about 2 at this depth.
        assert!(
            (report.gap - 2.0).abs() < 0.2,
            "gap = {}",
            report.gap
        );
        // The defining inequality, exactly as computed.
        let n = report.n_bound;
        assert!(2.0 * report.lambda_hat.powi(n as i32) * report.b_star < report.gap);
        assert!(
            n == 0
                || 2.0 * report.lambda_hat.powi(n as i32 - 1) * report.b_star
                    >= report.gap
        );
    }

    #[test]
    fn sampling_through_the_repeller_reports_failure() {
        let ws = double_well_ws(5);
        // y = 0 is an invariant repelling set: no block count contracts there.
        let samples = vec![CylinderPoint::new(0.0, vec![0.0])];
        let err = estimate_contraction(&ws, &samples, 1, &[]).unwrap_err();
        match err {
            Error::ContractionFailed { lambda } => assert!(lambda >= 1.0),
            other => panic!("expected contraction failure, got {other:?}"),
        }
    }

    #[test]
    fn benchmark_contracts_at_one_winding_with_the_predicted_rate() {
        // Noise-free path: the fiber derivative at the stationary radius 1
        // is exactly the deterministic linearization over one revolution.
        let system = PitchforkCircle::new(0.5);
        let path = WienerPath::zeros(-1.0, 8.0, 1e-3).unwrap();
        let ws = build_winding_system(Arc::new(system), &path, &[]).unwrap();
        let samples = vec![CylinderPoint::new(0.0, vec![1.0])];
        let report = estimate_contraction(&ws, &samples, 1, &[]).unwrap();
        assert!(
            (report.lambda_hat / EXP_MINUS_4PI - 1.0).abs() < 1e-3,
            "lambda_hat = {:.6e} vs {:.6e}",
            report.lambda_hat,
            EXP_MINUS_4PI
        );

        // Noisy paths still contract strictly at one winding.
        let ws = benchmark_ws(2, 1e-2, 8.0);
        let samples = vec![
            CylinderPoint::new(0.0, vec![0.8]),
            CylinderPoint::new(0.3, vec![1.0]),
            CylinderPoint::new(0.7, vec![1.3]),
        ];
        let report = estimate_contraction(&ws, &samples, 1, &[1, 2, 3, 4, 5]).unwrap();
        assert!(report.lambda_hat < 1.0, "lambda = {}", report.lambda_hat);
    }

    #[test]
    fn block_contraction_rate_trends_toward_the_exponent() {
        // log(lambda_hat(n0)) / n0 approaches (exponent) * t1 = -4 pi as n0
        // grows; at n0 = 10 it must already be within a factor of 3.
        let ws = benchmark_ws(9, 1e-2, 80.0);
        let samples = vec![
            CylinderPoint::new(0.0, vec![0.9]),
            CylinderPoint::new(0.5, vec![1.1]),
        ];
        let report = estimate_contraction(&ws, &samples, 10, &[21, 22, 23]).unwrap();
        let rate = report.lambda_hat.ln() / 10.0;
        let target = -4.0 * std::f64::consts::PI;
        assert!(
            rate / target > 1.0 / 3.0 && rate / target < 3.0,
            "per-winding log-contraction {rate} vs asymptotic {target}"
        );
    }

    #[test]
    fn tube_samples_cover_curves_and_respect_the_local_gap() {
        let flat = |tau: usize, level: f64, res: usize| RandomCurve {
            tau,
            s_grid: (0..res).map(|g| g as f64 / res as f64).collect(),
            values: vec![vec![level]; res],
            lipschitz_estimate: 0.0,
        };
        let curves = vec![flat(1, 1.0, 8), flat(1, -1.0, 8)];
        let samples = curve_tube_samples(&curves, 4, 0.25);
        // 4 angles x 2 strands x (1 + 2 offsets).
        assert_eq!(samples.len(), 4 * 2 * 3);
        for z in &samples {
            let d_up = (z.y[0] - 1.0).abs();
            let d_dn = (z.y[0] + 1.0).abs();
            assert!(d_up.min(d_dn) <= 0.5 + 1e-12, "sample at {}", z.y[0]);
        }
        // Single curve: offsets fall back to the fixed tube width.
        let lone = curve_tube_samples(&curves[..1], 1, 0.5);
        assert_eq!(lone.len(), 3);
        assert!((lone[1].y[0] - 1.0).abs() <= 0.5 + 1e-12);
    }

    #[test]
    fn exponent_of_the_benchmark_under_noise() {
        let ws = benchmark_ws(31, 1e-2, 220.0);
        let z0 = CylinderPoint::new(0.0, vec![1.0]);
        let exponent = lyapunov_exponent(&ws, &z0, 200.0).unwrap();
        assert!(
            (exponent - PitchforkCircle::new(0.5).lyapunov_exact()).abs() < 0.4,
            "exponent = {exponent}"
        );
    }

    #[test]
    fn deterministic_limit_gives_exactly_minus_two() {
        let path = WienerPath::zeros(-1.0, 70.0, 1e-3).unwrap();
        let ws = build_winding_system(Arc::new(PitchforkCircle::new(0.5)), &path, &[]).unwrap();
        let z0 = CylinderPoint::new(0.0, vec![1.0]);
        let exponent = lyapunov_exponent(&ws, &z0, 60.0).unwrap();
        assert!((exponent + 2.0).abs() < 1e-3, "exponent = {exponent}");
    }

    #[test]
    fn frozen_fiber_has_zero_exponent() {
        let path = WienerPath::generate(3, -1.0, 40.0, 1.0 / 258.0).unwrap();
        let ws = build_winding_system(Arc::new(FrozenFiber), &path, &[]).unwrap();
        let z0 = CylinderPoint::new(0.0, vec![0.7]);
        let exponent = lyapunov_exponent(&ws, &z0, 30.0).unwrap();
        assert_eq!(exponent, 0.0);
    }

    #[test]
    fn renormalization_cadence_does_not_move_the_estimate() {
        let ws = benchmark_ws(17, 1e-2, 60.0);
        let z0 = CylinderPoint::new(0.0, vec![1.0]);
        let every_block = lyapunov_exponent_cadence(&ws, &z0, 50.0, 1).unwrap();
        let every_other = lyapunov_exponent_cadence(&ws, &z0, 50.0, 2).unwrap();
        assert!(
            (every_block - every_other).abs() < 1e-3,
            "{every_block} vs {every_other}"
        );
    }

    #[test]
    fn sinusoid_exponent_matches_its_contraction_rate() {
        // Per winding the fiber contracts by exactly exp(-kappa), so the
        // asymptotic exponent is -kappa (t1 = 1) for every realization.
        let ws = sinusoid_ws(8);
        let z0 = CylinderPoint::new(0.0, vec![0.4]);
        let exponent = lyapunov_exponent(&ws, &z0, 3.0).unwrap();
        assert!((exponent + TrackedSinusoid::default().kappa).abs() < 1e-12);
    }

    #[test]
    fn rejects_empty_samples_and_zero_blocks() {
        let ws = sinusoid_ws(11);
        assert!(estimate_contraction(&ws, &[], 1, &[]).is_err());
        let samples = vec![CylinderPoint::new(0.0, vec![0.3])];
        assert!(estimate_contraction(&ws, &samples, 0, &[]).is_err());
        let z0 = CylinderPoint::new(0.0, vec![0.3]);
        assert!(lyapunov_exponent(&ws, &z0, 0.0).is_err());
        assert!(lyapunov_exponent(&ws, &z0, -1.0).is_err());
    }
}
