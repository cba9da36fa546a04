//! The discrete winding view of a cylinder flow.
//!
//! Quotient the continuous flow by full revolutions of the angle: if every
//! trajectory advances the lifted angle by exactly 1 in a common time `t1`
//! (independent of the start point — verified here, never assumed), then the
//! time-`t1` map is a skew product over the angle shift, and questions about
//! invariant curves become questions about a finite set of fiber components
//! and the permutation one winding induces on them.
//!
//! The pipeline:
//!
//! 1. [`build_winding_system`] probes the flow to find `t1`, checks that it
//!    is shared by all probe states, and re-grids the driving path so `t1`
//!    is a whole number of cells (a third of a block is also whole, so
//!    fractional-period shifts stay grid-aligned).
//! 2. [`WindingSystem::apply_h`] is the block map: flow for `k` blocks,
//!    with the angle advancing by exactly `k`.
//! 3. [`sample_fiber`] pulls a spread of fiber seeds back `m` blocks and
//!    flows them to a target angle: arrivals land within `2 lambda^m b*` of
//!    the true invariant fiber, then single-linkage clustering splits them
//!    into components.
//! 4. [`trace_permutation`] matches components across one pullback span and
//!    returns the induced bijection.
//! 5. [`extract_curves`] traces each component continuously around the
//!    circle, detects when it returns to itself, and assembles the invariant
//!    curves with their winding numbers.
//! 6. [`verify_invariance`] checks that curves extracted on a shifted
//!    realization are carried onto today's curves by the flow, with the
//!    winding numbers and curve count unchanged.

use std::sync::OnceLock;

use crate::cocycle::{wrap_unit, CylinderPoint, LiftedPoint, SystemHandle};
use crate::error::{Error, Result};
use crate::linalg::dist;
use crate::noise::WienerPath;

/// Angle tolerance for the full-revolution checks.
pub const ANGLE_TOL: f64 = 1e-9;

/// Default number of fiber seeds when the caller does not choose.
pub const DEFAULT_FIBER_SEEDS: usize = 16;

/// Default cluster-gap floor for standalone fiber sampling.
pub const DEFAULT_GAP_FLOOR: f64 = 1e-6;

/// The time-`t1` block view of a cylinder flow along one noise realization.
pub struct WindingSystem {
    /// The underlying continuous flow.
    pub base: SystemHandle,
    /// Driving path on a grid where one block is exactly
    /// `cells_per_block` cells.
    pub path: WienerPath,
    /// Full-circle time: one block advances the angle by exactly 1.
    pub t1: f64,
    /// Number of blocks composed when estimating contraction
    /// (the block map may need several windings to contract uniformly).
    pub n0: usize,
    cells_per_block: usize,
    /// Cached contraction data `(lambda, b_star)`: operator-norm bound of
    /// the fiber derivative over one `n0`-block, and fiber diameter bound.
    contraction: OnceLock<(f64, f64)>,
}

impl std::fmt::Debug for WindingSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WindingSystem")
            .field("base", &self.base.name())
            .field("t1", &self.t1)
            .field("n0", &self.n0)
            .field("cells_per_block", &self.cells_per_block)
            .field("contraction", &self.contraction.get())
            .finish()
    }
}

impl Clone for WindingSystem {
    fn clone(&self) -> Self {
        let contraction = OnceLock::new();
        if let Some(&c) = self.contraction.get() {
            let _ = contraction.set(c);
        }
        WindingSystem {
            base: self.base.clone(),
            path: self.path.clone(),
            t1: self.t1,
            n0: self.n0,
            cells_per_block: self.cells_per_block,
            contraction,
        }
    }
}

/// The fiber over one angle, sampled by pullback and clustered.
#[derive(Debug, Clone)]
pub struct FiberSample {
    /// Target angle in `[0, 1)`.
    pub s_star: f64,
    /// Arrival fiber vectors, one per seed, in seed order.
    pub points: Vec<Vec<f64>>,
    /// Partition of point indices into clusters, sorted by lexicographic
    /// order of the cluster centroids (the labeling convention everywhere).
    pub components: Vec<Vec<usize>>,
    /// Smallest distance between points of different clusters
    /// (infinite when there is a single cluster).
    pub gap: f64,
    /// Largest intra-cluster diameter.
    pub diameter_bound: f64,
}

impl FiberSample {
    /// Centroid of component `i`.
    pub fn centroid(&self, i: usize) -> Vec<f64> {
        let pts = &self.components[i];
        let d = self.points[pts[0]].len();
        let mut c = vec![0.0; d];
        for &p in pts {
            for k in 0..d {
                c[k] += self.points[p][k];
            }
        }
        for v in &mut c {
            *v /= pts.len() as f64;
        }
        c
    }

    /// Index of the component whose centroid is nearest to `y`, with the
    /// distance and the runner-up distance.
    pub fn nearest_component(&self, y: &[f64]) -> (usize, f64, f64) {
        let mut best = (0usize, f64::INFINITY);
        let mut second = f64::INFINITY;
        for i in 0..self.components.len() {
            let d = dist(&self.centroid(i), y);
            if d < best.1 {
                second = best.1;
                best = (i, d);
            } else if d < second {
                second = d;
            }
        }
        (best.0, best.1, second)
    }
}

/// Bijection induced on fiber components by a pullback span.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationTrace {
    /// Pullback depth (in `n0`-blocks) the trace spans.
    pub m: usize,
    /// `mapping[i]` is the component index that past component `i` lands in.
    pub mapping: Vec<usize>,
}

impl PermutationTrace {
    pub fn is_bijection(&self) -> bool {
        let n = self.mapping.len();
        let mut seen = vec![false; n];
        for &j in &self.mapping {
            if j >= n || seen[j] {
                return false;
            }
            seen[j] = true;
        }
        true
    }
}

/// A periodic invariant curve: a section of the cylinder over `[0, tau)`
/// in the lifted angle, closing onto itself after `tau` windings.
#[derive(Debug, Clone)]
pub struct RandomCurve {
    /// Winding number: least number of revolutions after which the curve
    /// closes.
    pub tau: usize,
    /// Uniform grid on `[0, tau)`.
    pub s_grid: Vec<f64>,
    /// Fiber value over each grid angle.
    pub values: Vec<Vec<f64>>,
    /// Max slope between adjacent grid points (closure step included).
    pub lipschitz_estimate: f64,
}

impl RandomCurve {
    /// Linear interpolation along the curve, periodic with period `tau`.
    pub fn eval(&self, sigma: f64) -> Vec<f64> {
        let n = self.s_grid.len();
        let tau = self.tau as f64;
        let s = sigma.rem_euclid(tau);
        let pos = s / tau * n as f64;
        let i = (pos.floor() as usize).min(n - 1);
        let frac = pos - i as f64;
        let a = &self.values[i];
        let b = &self.values[(i + 1) % n];
        a.iter()
            .zip(b)
            .map(|(&x, &y)| x + frac * (y - x))
            .collect()
    }

    /// Distance from `(s, y)` to the curve: minimum over the `tau` strands
    /// that sit over the projected angle `s`.
    pub fn fiber_distance(&self, s: f64, y: &[f64]) -> f64 {
        let base = wrap_unit(s);
        (0..self.tau)
            .map(|k| dist(&self.eval(base + k as f64), y))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Knobs for curve extraction.
#[derive(Debug, Clone)]
pub struct ExtractionConfig {
    /// Hard cap on the pullback depth (in blocks).
    pub m_max: usize,
    /// Smallest inter-cluster gap treated as resolved.
    pub cluster_gap_floor: f64,
    /// Grid points per unit angle for traced curves.
    pub s_resolution: usize,
    /// Number of pullback seeds per fiber.
    pub fiber_seed_count: usize,
    /// Matching tolerance for curve closure on returns.
    pub tolerance: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        ExtractionConfig {
            m_max: 60,
            cluster_gap_floor: 1e-6,
            s_resolution: 256,
            fiber_seed_count: DEFAULT_FIBER_SEEDS,
            tolerance: 1e-3,
        }
    }
}

/// Everything [`extract_curves`] learns, for reporting.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub curves: Vec<RandomCurve>,
    /// Closure residual per curve: distance between the traced end of the
    /// last winding and the curve's starting point.
    pub residuals: Vec<f64>,
    /// Pullback depth used (blocks).
    pub depth: usize,
    /// Contraction data `(lambda, b_star)` that chose the depth.
    pub contraction: (f64, f64),
    pub t1: f64,
}

// ---------------------------------------------------------------------------
// construction
// ---------------------------------------------------------------------------

/// Find the common full-circle time by probing, verify it is shared by all
/// probe states, and re-grid the path so one revolution is a whole number of
/// cells (divisible by 3, keeping third-of-a-turn shifts grid-aligned).
///
/// Probes default to three spread fiber seeds at angle 0 when none are
/// given. The detection walks each probe forward cell by cell until its
/// lifted angle has advanced by 1, interpolates the crossing time, and
/// demands agreement across probes within 1e-9 — a system whose angular
/// speed depends on the fiber is rejected here, not silently averaged.
pub fn build_winding_system(
    system: SystemHandle,
    path: &WienerPath,
    probe_states: &[CylinderPoint],
) -> Result<WindingSystem> {
    let probes: Vec<CylinderPoint> = if probe_states.is_empty() {
        system
            .default_fiber_seeds(3)
            .into_iter()
            .map(|y| CylinderPoint::new(0.0, y))
            .collect()
    } else {
        probe_states.to_vec()
    };
    let dt = path.dt();
    // budget: a revolution should not take more than ~10^7 cells
    let budget = 20_000_000usize;
    let mut estimates = Vec::with_capacity(probes.len());
    let mut work = path.clone();
    for p in &probes {
        let mut t = 0.0;
        let mut x = LiftedPoint::new(p.s, p.y.clone());
        let s0 = x.s_lift;
        let mut steps = 0usize;
        let t1 = loop {
            let t_next = work.time_at(work.grid_index(t)? + 1);
            if t_next > work.t_max() {
                work = work.ensure_domain(-system.history_needed(), t_next + 1024.0 * dt)?;
            }
            let x_next = system.flow(&work, t, t_next, &x)?;
            if x_next.s_lift <= x.s_lift {
                return Err(Error::AngleNotMonotone);
            }
            if x_next.s_lift - s0 >= 1.0 {
                // linear interpolation of the crossing inside this cell
                let a = x.s_lift - s0;
                let b = x_next.s_lift - s0;
                break t + dt * (1.0 - a) / (b - a);
            }
            x = x_next;
            t = t_next;
            steps += 1;
            if steps > budget {
                return Err(Error::InvalidArgument(
                    "angle did not complete a revolution within the probe budget".into(),
                ));
            }
        };
        estimates.push(t1);
    }
    let mut sorted = estimates.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let t1_est = sorted[sorted.len() / 2];
    let spread = sorted[sorted.len() - 1] - sorted[0];
    if spread > ANGLE_TOL * t1_est.max(1.0) {
        return Err(Error::AngleNotUniform {
            details: format!(
                "full-circle times per probe: {estimates:?} (spread {spread:.3e})"
            ),
        });
    }
    // re-grid: cells per block divisible by 3, spacing as close to the
    // caller's dt as that allows
    let k = 3 * ((t1_est / (3.0 * dt)).round() as i64).max(1);
    let dt_w = t1_est / k as f64;
    // window bounds snapped outward to the new grid
    let lo = ((path.t_min() / dt_w).floor() * dt_w).min(-dt_w);
    let hi = ((path.t_max() / dt_w).ceil() * dt_w).max(dt_w);
    let aligned = if (t1_est / dt - (t1_est / dt).round()).abs() <= ANGLE_TOL / dt.min(1.0)
        && (k as f64 * dt - t1_est).abs() <= ANGLE_TOL
    {
        // the original grid already fits
        path.clone()
    } else if let Some(seed) = path.seed() {
        // regenerate the base realization on the new grid, carrying over any
        // accumulated origin shift (it must land on the new grid too)
        let shift_t = path.shift_time();
        let sigma_cells = (shift_t / dt_w).round();
        if (shift_t - sigma_cells * dt_w).abs() > ANGLE_TOL * shift_t.abs().max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "path shift {shift_t} does not land on the revolution-aligned grid \
                 (dt = {dt_w}); shift the winding system's own path instead"
            )));
        }
        let sigma = sigma_cells * dt_w;
        let base_lo = (((lo + sigma) / dt_w).floor() * dt_w).min(-dt_w);
        let base_hi = (((hi + sigma) / dt_w).ceil() * dt_w).max(dt_w);
        WienerPath::generate(seed, base_lo, base_hi, dt_w)?.shift(sigma)?
    } else if !path.has_stream() {
        return Err(Error::InvalidArgument(format!(
            "path grid (dt = {dt}) is incommensurable with the detected full-circle time {t1_est}; \
             imported paths cannot be re-gridded"
        )));
    } else {
        WienerPath::zeros(lo, hi, dt_w)?
    };
    let cells_per_block = (t1_est / aligned.dt()).round() as usize;
    let t1 = cells_per_block as f64 * aligned.dt();
    let ws = WindingSystem {
        base: system,
        path: aligned,
        t1,
        n0: 1,
        cells_per_block,
        contraction: OnceLock::new(),
    };
    // verify the revolution law on the aligned grid for every probe
    let checked = ws.with_domain(-ws.base.history_needed(), ws.t1)?;
    for p in &probes {
        let start = LiftedPoint::new(p.s, p.y.clone());
        let end = checked.base.flow(&checked.path, 0.0, checked.t1, &start)?;
        let advance = end.s_lift - start.s_lift;
        if (advance - 1.0).abs() > ANGLE_TOL {
            return Err(Error::AngleNotUniform {
                details: format!(
                    "probe at (s = {}, y = {:?}) advances by {advance} over one block",
                    p.s, p.y
                ),
            });
        }
    }
    Ok(ws)
}

impl WindingSystem {
    /// Time spanned by `k` blocks (grid-exact by construction).
    pub fn block_time(&self, k: i64) -> f64 {
        (k * self.cells_per_block as i64) as f64 * self.path.dt()
    }

    /// Number of path cells per block.
    pub fn cells_per_block(&self) -> usize {
        self.cells_per_block
    }

    /// Set the composition count used for contraction estimates.
    pub fn with_n0(mut self, n0: usize) -> Self {
        self.n0 = n0.max(1);
        self
    }

    /// Record contraction data `(lambda, b_star)`; first writer wins.
    pub fn set_contraction(&self, lambda: f64, b_star: f64) {
        let _ = self.contraction.set((lambda, b_star));
    }

    pub fn contraction_data(&self) -> Option<(f64, f64)> {
        self.contraction.get().copied()
    }

    /// Clone with the path extended to cover `[lo, hi]`.
    pub fn with_domain(&self, lo: f64, hi: f64) -> Result<Self> {
        let mut out = self.clone();
        out.path = out.path.ensure_domain(lo, hi)?;
        Ok(out)
    }

    /// Clone with the realization advanced by `j` blocks (negative for the
    /// past): the block view over the shifted noise.
    pub fn shifted_blocks(&self, j: i64) -> Result<Self> {
        let t = self.block_time(j);
        let mut out = self.with_domain(t.min(0.0), t.max(0.0))?;
        out.path = out.path.shift(t)?;
        Ok(out)
    }

    /// The block map: flow for `k` blocks from time 0, asserting that the
    /// lifted angle advances by exactly `k` (within tolerance).
    pub fn apply_h(&self, k: usize, z: &LiftedPoint) -> Result<LiftedPoint> {
        let t_end = self.block_time(k as i64);
        let path = self
            .path
            .ensure_domain(-self.base.history_needed(), t_end)?;
        let end = self.base.flow(&path, 0.0, t_end, z)?;
        let advance = end.s_lift - z.s_lift;
        if (advance - k as f64).abs() > ANGLE_TOL * (k as f64).max(1.0) {
            return Err(Error::AngleNotUniform {
                details: format!("{k} blocks advanced the angle by {advance}"),
            });
        }
        Ok(end)
    }
}

// ---------------------------------------------------------------------------
// fiber sampling
// ---------------------------------------------------------------------------

/// Pull `seeds` back `m` blocks and flow them into the fiber over `s_star`,
/// then cluster the arrivals into components.
///
/// The arrivals lie within `2 lambda^m b*` of the true invariant fiber.
/// Clustering is single-linkage; the cut distance is
/// `max(floor, 10 * 2 lambda^m b*)` when contraction data is cached on the
/// system, otherwise the largest relative jump in the merge sequence.
pub fn sample_fiber(
    ws: &WindingSystem,
    s_star: f64,
    m: usize,
    seeds: &[Vec<f64>],
) -> Result<FiberSample> {
    sample_fiber_with_floor(ws, s_star, m, seeds, DEFAULT_GAP_FLOOR)
}

fn sample_fiber_with_floor(
    ws: &WindingSystem,
    s_star: f64,
    m: usize,
    seeds: &[Vec<f64>],
    gap_floor: f64,
) -> Result<FiberSample> {
    if seeds.is_empty() {
        return Err(Error::InvalidArgument("no fiber seeds given".into()));
    }
    let d = ws.base.fiber_dim();
    if seeds.iter().any(|y| y.len() != d) {
        return Err(Error::InvalidArgument(format!(
            "fiber seeds must have dimension {d}"
        )));
    }
    let blocks = (m * ws.n0) as i64;
    let t_back = ws.block_time(-blocks);
    let local = ws.with_domain(t_back - ws.base.history_needed(), 0.0)?;
    let mut points = Vec::with_capacity(seeds.len());
    for y in seeds {
        let start = LiftedPoint::new(s_star - blocks as f64, y.clone());
        let end = local.base.flow(&local.path, t_back, 0.0, &start)?;
        if (end.s_lift - s_star).abs() > ANGLE_TOL * (blocks as f64).max(1.0) {
            return Err(Error::AngleNotUniform {
                details: format!(
                    "pullback arrival angle {} differs from target {s_star}",
                    end.s_lift
                ),
            });
        }
        points.push(end.y);
    }
    let cutoff = ws
        .contraction_data()
        .map(|(lambda, b_star)| (10.0 * 2.0 * lambda.powi(m as i32) * b_star).max(gap_floor));
    let (components, gap, diameter_bound) = cluster(&points, cutoff, gap_floor);
    Ok(FiberSample {
        s_star: wrap_unit(s_star),
        points,
        components,
        gap,
        diameter_bound,
    })
}

/// Single-linkage clustering. With a `cutoff`, pairs closer than it are
/// linked; without one, the merge sequence is cut at its largest relative
/// jump whose upper side clears `gap_floor` (at least 20x, otherwise
/// everything is one cluster — gaps below the floor are never split).
fn cluster(
    points: &[Vec<f64>],
    cutoff: Option<f64>,
    gap_floor: f64,
) -> (Vec<Vec<usize>>, f64, f64) {
    let n = points.len();
    let mut pairs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((dist(&points[i], &points[j]), i, j));
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let cut = match cutoff {
        Some(c) => c,
        None => {
            // run the full merge sequence; cut at the largest relative jump
            let mut uf = UnionFind::new(n);
            let mut merges = Vec::new();
            for &(d, i, j) in &pairs {
                if uf.union(i, j) {
                    merges.push(d);
                }
            }
            let mut best: Option<(f64, f64)> = None; // (ratio, cut position)
            for w in merges.windows(2) {
                let lo = w[0].max(1e-14);
                let ratio = w[1] / lo;
                if w[1] >= gap_floor
                    && ratio >= 20.0
                    && best.map(|(r, _)| ratio > r).unwrap_or(true)
                {
                    best = Some((ratio, (w[0].max(1e-14) * w[1]).sqrt()));
                }
            }
            match best {
                Some((_, cut)) => cut,
                None => f64::INFINITY, // no separation: one cluster
            }
        }
    };
    let mut uf = UnionFind::new(n);
    for &(d, i, j) in &pairs {
        if d <= cut {
            uf.union(i, j);
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_of: Vec<Option<usize>> = vec![None; n];
    for i in 0..n {
        let r = uf.find(i);
        match root_of[r] {
            Some(g) => groups[g].push(i),
            None => {
                root_of[r] = Some(groups.len());
                groups.push(vec![i]);
            }
        }
    }
    // label components by lexicographic order of their centroids
    let centroid = |g: &Vec<usize>| -> Vec<f64> {
        let d = points[g[0]].len();
        let mut c = vec![0.0; d];
        for &p in g {
            for k in 0..d {
                c[k] += points[p][k];
            }
        }
        for v in &mut c {
            *v /= g.len() as f64;
        }
        c
    };
    groups.sort_by(|a, b| {
        let ca = centroid(a);
        let cb = centroid(b);
        ca.partial_cmp(&cb).unwrap()
    });
    let mut gap = f64::INFINITY;
    let mut diameter: f64 = 0.0;
    for &(d, i, j) in &pairs {
        if uf.find(i) == uf.find(j) {
            diameter = diameter.max(d);
        } else {
            gap = gap.min(d);
        }
    }
    (groups, gap, diameter)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

// ---------------------------------------------------------------------------
// permutation tracing
// ---------------------------------------------------------------------------

/// Map each fiber component of the realization `m * n0` blocks in the past
/// to the component it lands in now. `fiber` is the sample over `s_star` at
/// the current realization.
pub fn trace_permutation(
    ws: &WindingSystem,
    fiber: &FiberSample,
    m: usize,
) -> Result<PermutationTrace> {
    let blocks = (m * ws.n0) as i64;
    let seeds = ws.base.default_fiber_seeds(DEFAULT_FIBER_SEEDS);
    // resolve the past fiber at the same quality extraction would use,
    // independent of the transport depth m
    let (lambda, b_star) = ensure_contraction(ws, &seeds)?;
    let m_resolve = resolve_depth(lambda, b_star, DEFAULT_GAP_FLOOR, 60);
    let past = ws.shifted_blocks(-blocks)?;
    let (past_fiber, _) = resolved_fiber(
        &past,
        fiber.s_star,
        &seeds,
        DEFAULT_GAP_FLOOR,
        m_resolve,
        60,
        lambda,
        b_star,
    )?;
    if past_fiber.components.len() != fiber.components.len() {
        return Err(Error::NotBijective {
            details: format!(
                "{} components in the past vs {} now",
                past_fiber.components.len(),
                fiber.components.len()
            ),
        });
    }
    let accept = if fiber.gap.is_finite() {
        fiber.gap / 3.0
    } else {
        f64::INFINITY
    };
    let mut mapping = Vec::with_capacity(past_fiber.components.len());
    for i in 0..past_fiber.components.len() {
        // representative: the component point nearest its centroid
        let c = past_fiber.centroid(i);
        let &rep = past_fiber.components[i]
            .iter()
            .min_by(|&&a, &&b| {
                dist(&past_fiber.points[a], &c)
                    .partial_cmp(&dist(&past_fiber.points[b], &c))
                    .unwrap()
            })
            .unwrap();
        let start = LiftedPoint::new(fiber.s_star, past_fiber.points[rep].clone());
        let end = past.apply_h(blocks as usize, &start)?;
        let (j, d1, d2) = fiber.nearest_component(&end.y);
        if d1 > accept {
            return Err(Error::UnmatchedComponent {
                nearest: d1,
                tol: accept,
            });
        }
        if d2 - d1 < accept / 10.0 {
            return Err(Error::AmbiguousMatch {
                d1,
                d2,
                tol: accept,
            });
        }
        mapping.push(j);
    }
    let trace = PermutationTrace { m, mapping };
    if !trace.is_bijection() {
        return Err(Error::NotBijective {
            details: format!("mapping {:?} is not a bijection", trace.mapping),
        });
    }
    Ok(trace)
}

// ---------------------------------------------------------------------------
// curve extraction
// ---------------------------------------------------------------------------

/// Estimate `(lambda, b_star)` from fiber samples at two depths when no
/// contraction data is cached: the diameter ratio between depths gives the
/// per-block contraction; `b_star` must cover both the fiber extent and the
/// distance from the seed spread to the fiber, since the pullback error
/// bound `2 lambda^m b*` charges the full initial displacement.
fn bootstrap_contraction(ws: &WindingSystem, seeds: &[Vec<f64>]) -> Result<(f64, f64)> {
    // deep enough that seeds started near repelling sets have escaped and
    // the diameter ratio reflects the asymptotic contraction
    let (m1, m2) = (8usize, 16usize);
    let f1 = sample_fiber(ws, 0.0, m1, seeds)?;
    let f2 = sample_fiber(ws, 0.0, m2, seeds)?;
    let spread_of = |pts: &[Vec<f64>]| {
        let mut s: f64 = 0.0;
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                s = s.max(dist(&pts[i], &pts[j]));
            }
        }
        s
    };
    let b_star = (1.2 * spread_of(seeds).max(spread_of(&f2.points))).max(1e-3);
    let lambda = if f1.diameter_bound > 1e-12 && f2.diameter_bound > 1e-14 {
        (f2.diameter_bound / f1.diameter_bound)
            .powf(1.0 / (m2 - m1) as f64)
            .clamp(1e-3, 0.95)
    } else {
        // both depths already at the rounding floor: contraction is strong
        1e-3
    };
    Ok((lambda, b_star))
}

/// Contraction data from the cache, bootstrapping (and caching) if absent.
fn ensure_contraction(ws: &WindingSystem, seeds: &[Vec<f64>]) -> Result<(f64, f64)> {
    match ws.contraction_data() {
        Some(c) => Ok(c),
        None => {
            let c = bootstrap_contraction(ws, seeds)?;
            ws.set_contraction(c.0, c.1);
            Ok(c)
        }
    }
}

/// Smallest depth with `lambda^m b* < floor/4`, clamped to `[2, m_max]`.
fn resolve_depth(lambda: f64, b_star: f64, floor: f64, m_max: usize) -> usize {
    let target = 0.25 * floor / b_star.max(1e-300);
    let m = if target >= 1.0 {
        2.0
    } else {
        (target.ln() / lambda.min(0.999_999).ln()).ceil()
    };
    (m as usize).clamp(2, m_max.max(2))
}

/// Sample a fiber, deepening the pullback while the cluster structure looks
/// like a late-converging straggler rather than genuine components: a gap
/// far below the scale of real separations (relative to the contraction
/// bound at this depth) shrinks to nothing under more pullback, while a
/// true gap survives.
fn resolved_fiber(
    ws: &WindingSystem,
    s_star: f64,
    seeds: &[Vec<f64>],
    gap_floor: f64,
    m_start: usize,
    m_max: usize,
    lambda: f64,
    b_star: f64,
) -> Result<(FiberSample, usize)> {
    let mut m = m_start.min(m_max.max(2));
    loop {
        let fiber = sample_fiber_with_floor(ws, s_star, m, seeds, gap_floor)?;
        let bound = 2.0 * lambda.powi(m as i32) * b_star;
        let suspicious = fiber.components.len() > 1
            && fiber.gap < (1000.0 * bound).max(10.0 * gap_floor);
        if !suspicious || m >= m_max {
            return Ok((fiber, m));
        }
        m = (2 * m).min(m_max);
    }
}

/// Extract every periodic invariant curve of the winding system.
///
/// See the module docs for the pipeline. Curves are returned sorted by
/// their starting component (lexicographic centroid order at angle 0).
pub fn extract_curves(ws: &WindingSystem, config: &ExtractionConfig) -> Result<Vec<RandomCurve>> {
    Ok(extract_curves_detailed(ws, config)?.curves)
}

/// [`extract_curves`] plus diagnostics (depth, contraction, residuals).
pub fn extract_curves_detailed(
    ws: &WindingSystem,
    config: &ExtractionConfig,
) -> Result<Extraction> {
    let seeds = ws.base.default_fiber_seeds(config.fiber_seed_count.max(2));
    let (lambda, b_star) = ensure_contraction(ws, &seeds)?;
    let m_start = resolve_depth(lambda, b_star, config.cluster_gap_floor, config.m_max);
    let (fiber, m) = resolved_fiber(
        ws,
        0.0,
        &seeds,
        config.cluster_gap_floor,
        m_start,
        config.m_max,
        lambda,
        b_star,
    )?;
    let unresolved = (fiber.gap.is_finite() && fiber.gap < config.cluster_gap_floor)
        || (fiber.components.len() > 1 && 2.0 * fiber.diameter_bound >= fiber.gap);
    if unresolved {
        return Err(Error::FiberUnresolved {
            depth: m,
            gap: fiber.gap,
            floor: config.cluster_gap_floor,
        });
    }
    // scale below which any matching failure is a resolution artifact
    // (separations hidden by the clustering cutoff), not an algorithm bug
    let cutoff_used =
        (10.0 * 2.0 * lambda.powi(m as i32) * b_star).max(config.cluster_gap_floor);
    let r = fiber.components.len();
    // basin-locked representative seed per component: the seed whose
    // pullback landed nearest the component centroid keeps the whole traced
    // section on one strand
    let mut rep_seed = Vec::with_capacity(r);
    for i in 0..r {
        let c = fiber.centroid(i);
        let &idx = fiber.components[i]
            .iter()
            .min_by(|&&a, &&b| {
                dist(&fiber.points[a], &c)
                    .partial_cmp(&dist(&fiber.points[b], &c))
                    .unwrap()
            })
            .unwrap();
        rep_seed.push(seeds[idx].clone());
    }
    // trace a section over [0, 1] for each component by continuation: each
    // grid angle's pullback starts from the previous angle's arrival, so the
    // trace stays locked to one strand even where a fixed seed would drift
    // across a basin boundary as the start angle sweeps
    let blocks = (m * ws.n0) as i64;
    let t_back = ws.block_time(-blocks);
    let local = ws.with_domain(t_back - ws.base.history_needed(), 0.0)?;
    let n_grid = config.s_resolution.max(4);
    let mut sections: Vec<Vec<Vec<f64>>> = Vec::with_capacity(r);
    let mut endpoints: Vec<Vec<f64>> = Vec::with_capacity(r);
    for (i, seed_y) in rep_seed.iter().enumerate() {
        let mut section = Vec::with_capacity(n_grid + 1);
        let mut carry = seed_y.clone();
        for g in 0..=n_grid {
            let s_g = g as f64 / n_grid as f64;
            let start = LiftedPoint::new(s_g - blocks as f64, carry.clone());
            let end = local.base.flow(&local.path, t_back, 0.0, &start)?;
            carry = end.y.clone();
            section.push(end.y);
        }
        // the continuation must have stayed on the attractor: arrivals at
        // angle 0 and the traced start must agree to the clustering scale
        let d0 = dist(&section[0], &fiber.centroid(i));
        if d0 > config.tolerance.max(2.0 * cutoff_used) {
            return Err(Error::FiberUnresolved {
                depth: m,
                gap: d0,
                floor: config.cluster_gap_floor,
            });
        }
        let endpoint = section.pop().unwrap(); // value at s = 1
        sections.push(section);
        endpoints.push(endpoint);
    }
    // sanity: the section start must sit in its own component; a mismatch
    // at the clustering scale means merged fibers, not broken tracing
    for i in 0..r {
        let (j, d1, _) = fiber.nearest_component(&sections[i][0]);
        if j != i {
            if d1 <= 2.0 * cutoff_used || fiber.diameter_bound > config.tolerance {
                return Err(Error::FiberUnresolved {
                    depth: m,
                    gap: d1,
                    floor: config.cluster_gap_floor,
                });
            }
            return Err(Error::NotBijective {
                details: format!(
                    "traced section {i} starts in component {j} (distance {d1:.3e})"
                ),
            });
        }
    }
    // where does each section land after one winding?
    let mut next = Vec::with_capacity(r);
    for endpoint in &endpoints {
        let (j, d1, d2) = fiber.nearest_component(endpoint);
        if d1 > config.tolerance {
            if fiber.diameter_bound > config.tolerance || d1 <= 2.0 * cutoff_used {
                // the fiber components themselves are wider than the match
                // tolerance: the resolution, not the tracing, failed
                return Err(Error::FiberUnresolved {
                    depth: m,
                    gap: d1,
                    floor: config.cluster_gap_floor,
                });
            }
            return Err(Error::UnmatchedComponent {
                nearest: d1,
                tol: config.tolerance,
            });
        }
        if r > 1 && d2 <= config.tolerance {
            return Err(Error::AmbiguousMatch {
                d1,
                d2,
                tol: config.tolerance,
            });
        }
        next.push(j);
    }
    let return_map = PermutationTrace {
        m: 1,
        mapping: next.clone(),
    };
    if !return_map.is_bijection() {
        return Err(Error::NotBijective {
            details: format!("return map {next:?} is not a bijection"),
        });
    }
    // orbits of the return map are the curves
    let mut visited = vec![false; r];
    let mut curves = Vec::new();
    let mut residuals = Vec::new();
    for start in 0..r {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        loop {
            if cycle.len() > config.m_max {
                return Err(Error::WindingBudget {
                    budget: config.m_max,
                });
            }
            visited[i] = true;
            cycle.push(i);
            i = next[i];
            if i == start {
                break;
            }
        }
        let tau = cycle.len();
        let mut s_grid = Vec::with_capacity(tau * n_grid);
        let mut values = Vec::with_capacity(tau * n_grid);
        for (w, &comp) in cycle.iter().enumerate() {
            for g in 0..n_grid {
                s_grid.push(w as f64 + g as f64 / n_grid as f64);
                values.push(sections[comp][g].clone());
            }
        }
        // closure residual: end of the last winding against the start
        let residual = dist(&endpoints[cycle[tau - 1]], &values[0]);
        let mut lip: f64 = 0.0;
        let ds = 1.0 / n_grid as f64;
        for k in 0..values.len() {
            let a = &values[k];
            let b = &values[(k + 1) % values.len()];
            lip = lip.max(dist(a, b) / ds);
        }
        curves.push(RandomCurve {
            tau,
            s_grid,
            values,
            lipschitz_estimate: lip,
        });
        residuals.push(residual);
    }
    Ok(Extraction {
        curves,
        residuals,
        depth: m,
        contraction: (lambda, b_star),
        t1: ws.t1,
    })
}

// ---------------------------------------------------------------------------
// invariance verification
// ---------------------------------------------------------------------------

/// Result of checking a curve extracted on the `(-t)`-shifted realization
/// against the curves of the current one.
#[derive(Debug, Clone)]
pub struct InvarianceCheck {
    /// Sup over the curve grid of the fiber distance between the flowed
    /// shifted curve and today's curve at the transported angle.
    pub curve_residual: f64,
    /// Winding numbers agree across the shift.
    pub tau_match: bool,
    /// Curve count agrees across the shift.
    pub r_match: bool,
    /// Period of the input curve: `tau * t1`.
    pub period: f64,
}

/// Verify that the flow carries a curve of the `(-t)`-shifted realization
/// onto a curve of the current one.
///
/// All shifting happens on the revolution-aligned grid, so `t` must land on
/// it (multiples of `t1` and `t1/3` always do). `curve` must have been
/// extracted on the `(-t)`-shifted aligned path — extract it from
/// `build_winding_system(system, &ws.path.shift(-t)?, ..)` with `ws` the
/// winding system over `path`. This function re-extracts both realizations'
/// curves to compare counts and winding numbers, then flows every grid
/// point of `curve` forward by `t` under the shifted realization and
/// measures how far the arrivals land from today's curves at the
/// transported angles.
pub fn verify_invariance(
    curve: &RandomCurve,
    system: SystemHandle,
    path: &WienerPath,
    t: f64,
    config: &ExtractionConfig,
) -> Result<InvarianceCheck> {
    let ws_now = build_winding_system(system.clone(), path, &[])?;
    let now = extract_curves_detailed(&ws_now, config)?;
    // Pad the domain by a few revolutions beyond the shift so that flows
    // with noise memory (targets reading the recent past of the path) stay
    // inside it after relabeling; extensions reuse the stream, so the
    // realization is unchanged.
    let reach = t.abs() + 3.0 * ws_now.t1 + ws_now.path.dt();
    let shifted_path = ws_now.path.ensure_domain(-reach, reach)?.shift(-t)?;
    let ws_then = build_winding_system(system.clone(), &shifted_path, &[])?;
    let then = extract_curves_detailed(&ws_then, config)?;
    let r_match = now.curves.len() == then.curves.len();
    let mut taus_now: Vec<usize> = now.curves.iter().map(|c| c.tau).collect();
    let mut taus_then: Vec<usize> = then.curves.iter().map(|c| c.tau).collect();
    taus_now.sort_unstable();
    taus_then.sort_unstable();
    let tau_match = taus_now == taus_then;
    // flow the input curve's grid forward by t under the shifted realization
    let flow_path = ws_then.path.ensure_domain(
        -system.history_needed(),
        t.max(ws_then.t1),
    )?;
    let angle_advance = t / ws_then.t1;
    let mut residual: f64 = 0.0;
    let stride = (curve.s_grid.len() / 64).max(1);
    for idx in (0..curve.s_grid.len()).step_by(stride) {
        let s = curve.s_grid[idx];
        let start = LiftedPoint::new(s, curve.values[idx].clone());
        let end = system.flow(&flow_path, 0.0, t, &start)?;
        let s_arr = start.s_lift + angle_advance;
        let d = now
            .curves
            .iter()
            .map(|c| c.fiber_distance(s_arr, &end.y))
            .fold(f64::INFINITY, f64::min);
        residual = residual.max(d);
    }
    Ok(InvarianceCheck {
        curve_residual: residual,
        tau_match,
        r_match,
        period: curve.tau as f64 * ws_then.t1,
    })
}
