//! Two-sided Wiener paths on a uniform grid.
//!
//! A path covers `[t_min, t_max]` with `t_min <= 0 <= t_max` and stores one
//! Gaussian increment per grid cell together with the running values
//! `W(t_k)`, pinned so that `W(0) == 0` exactly. Only grid points are
//! addressable: there is no interpolation, so quadrature and integration
//! downstream see exactly the stored data.
//!
//! Determinism is the core contract. Every increment is a pure function of
//! the generator seed and the *absolute* cell index (the index the cell
//! would have on an unshifted path), via a counter-style generator: a
//! splitmix64-finalized key feeds a Box-Muller draw. Consequences:
//!
//! * regenerating a path on a wider window reproduces the old increments
//!   bit-for-bit on the shared cells,
//! * `extend_left`/`extend_right` agree with direct generation regardless of
//!   how many extension steps were taken or in which order,
//! * `shift` re-keys nothing: it only moves the origin and re-accumulates
//!   values, so shifted and unshifted paths share increment bits.
//!
//! `refine` subdivides every cell by Brownian-bridge sampling conditioned on
//! the existing endpoints. Refinement factors are decomposed into ascending
//! prime levels, so `refine(p, 4)` and `refine(refine(p, 2), 2)` draw the
//! same bridge variables and agree on the common grid.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};

const PHI64: u64 = 0x9E37_79B9_7F4A_7C15;
const ROOT_SALT: u64 = 0x57_49_45_4E_45_52_00_01; // root-level increment draws
const BRIDGE_SALT: u64 = 0x42_52_49_44_47_45_00_01; // bridge refinement draws
const GRID_TOL: f64 = 1e-9;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn key2(a: u64, b: u64) -> u64 {
    mix(mix(a).wrapping_add(b.wrapping_mul(PHI64)))
}

/// Minimal counter RNG: splitmix64 stream with Box-Muller normals.
struct SubStream(u64);

impl SubStream {
    fn new(key: u64) -> Self {
        SubStream(key)
    }

    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(PHI64);
        mix(self.0)
    }

    /// Uniform on (0, 1].
    fn next_open01(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Uniform on [0, 1).
    fn next_half_open01(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64) * (1.0 / 9007199254740992.0)
    }

    /// Standard normal via Box-Muller.
    fn gauss(&mut self) -> f64 {
        let u1 = self.next_open01();
        let u2 = self.next_half_open01();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Stream {
    /// Increments derive from this seed; extension and refinement work.
    Seeded(u64),
    /// The zero path W == 0 (deterministic dynamics); extension works.
    Zero,
    /// Values imported from external data; no generator available.
    External,
}

/// A realization of two-sided Brownian motion sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct WienerPath {
    dt: f64,
    /// Grid width at the root (un-refined) level.
    root_dt: f64,
    /// Refinement factors applied so far, innermost last; each is prime.
    lineage: Vec<u32>,
    /// Local index of the first cell; local cell `c` covers
    /// `[c * dt, (c+1) * dt)` in this path's own time.
    lo: i64,
    /// Offset between local and absolute cell indices (absolute = local +
    /// shift_cells), in current-level cells. Shifting changes only this and
    /// the anchoring of `values`.
    shift_cells: i64,
    increments: Vec<f64>,
    /// `values[i]` = W at local grid index `lo + i`; `values[-lo]` == 0.
    values: Vec<f64>,
    stream: Stream,
}

impl WienerPath {
    /// Sample a fresh realization of W on `[t_min, t_max]` with spacing `dt`.
    ///
    /// The window must straddle zero; `W(0) == 0` exactly.
    pub fn generate(seed: u64, t_min: f64, t_max: f64, dt: f64) -> Result<Self> {
        Self::build(Stream::Seeded(seed), t_min, t_max, dt)
    }

    /// The deterministic path W == 0 on the same kind of grid.
    pub fn zeros(t_min: f64, t_max: f64, dt: f64) -> Result<Self> {
        Self::build(Stream::Zero, t_min, t_max, dt)
    }

    fn build(stream: Stream, t_min: f64, t_max: f64, dt: f64) -> Result<Self> {
        if !(dt > 0.0) || !t_min.is_finite() || !t_max.is_finite() || t_min > 0.0 || t_max < 0.0 {
            return Err(Error::InvalidGrid { t_min, t_max, dt });
        }
        let lo = cell_of(t_min, dt)?;
        let hi = cell_of(t_max, dt)?;
        if hi <= lo {
            return Err(Error::InvalidGrid { t_min, t_max, dt });
        }
        let mut path = WienerPath {
            dt,
            root_dt: dt,
            lineage: Vec::new(),
            lo,
            shift_cells: 0,
            increments: Vec::new(),
            values: Vec::new(),
            stream,
        };
        path.increments = (lo..hi).map(|c| path.cell_increment_abs(c)).collect();
        path.rebuild_values();
        Ok(path)
    }

    /// Pure per-cell generator, keyed by absolute cell index at the current
    /// refinement level.
    fn cell_increment_abs(&self, abs_cell: i64) -> f64 {
        match self.stream {
            Stream::Zero => 0.0,
            Stream::External => unreachable!("external paths are never regenerated"),
            Stream::Seeded(seed) => {
                gen_increment(seed, &self.lineage, self.root_dt, self.lineage.len(), abs_cell)
            }
        }
    }

    fn rebuild_values(&mut self) {
        let n = self.increments.len();
        let origin = (-self.lo) as usize;
        let mut v = vec![0.0; n + 1];
        for i in origin..n {
            v[i + 1] = v[i] + self.increments[i];
        }
        for i in (0..origin).rev() {
            v[i] = v[i + 1] - self.increments[i];
        }
        self.values = v;
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn t_min(&self) -> f64 {
        self.lo as f64 * self.dt
    }

    pub fn t_max(&self) -> f64 {
        (self.lo + self.increments.len() as i64) as f64 * self.dt
    }

    /// Number of grid cells (one increment each).
    pub fn n_cells(&self) -> usize {
        self.increments.len()
    }

    /// Index of t = 0 in the grid of values.
    pub fn origin_offset(&self) -> usize {
        (-self.lo) as usize
    }

    /// Seed of the generator stream, if this path still has one.
    pub fn seed(&self) -> Option<u64> {
        match self.stream {
            Stream::Seeded(s) => Some(s),
            _ => None,
        }
    }

    /// Accumulated origin shift relative to the seed realization: this path
    /// equals the freshly generated one shifted by this time.
    pub fn shift_time(&self) -> f64 {
        self.shift_cells as f64 * self.dt
    }

    /// True if the path can be extended or refined (has a generator).
    pub fn has_stream(&self) -> bool {
        !matches!(self.stream, Stream::External)
    }

    /// Map a time to its grid index, requiring alignment within 1e-9.
    pub fn grid_index(&self, t: f64) -> Result<usize> {
        let k = cell_of(t, self.dt)?;
        if k < self.lo || k > self.lo + self.increments.len() as i64 {
            return Err(Error::DomainExceeded {
                t,
                t_min: self.t_min(),
                t_max: self.t_max(),
            });
        }
        Ok((k - self.lo) as usize)
    }

    /// W at a grid-aligned time.
    pub fn value(&self, t: f64) -> Result<f64> {
        Ok(self.values[self.grid_index(t)?])
    }

    /// W at a grid index (0 = leftmost sample).
    pub fn value_at(&self, idx: usize) -> f64 {
        self.values[idx]
    }

    /// Time of a grid index.
    pub fn time_at(&self, idx: usize) -> f64 {
        (self.lo + idx as i64) as f64 * self.dt
    }

    /// Increment over cell `idx` (between grid indices `idx` and `idx + 1`).
    pub fn increment_at(&self, idx: usize) -> f64 {
        self.increments[idx]
    }

    pub fn increments(&self) -> &[f64] {
        &self.increments
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The shifted realization `theta_t: s -> W(t + s) - W(t)`.
    ///
    /// `t` must be grid-aligned and inside the domain (the new window must
    /// still straddle its own zero). Increments are shared bit-for-bit; only
    /// the origin moves.
    pub fn shift(&self, t: f64) -> Result<Self> {
        let k = cell_of(t, self.dt)?;
        if k < self.lo || k > self.lo + self.increments.len() as i64 {
            return Err(Error::DomainExceeded {
                t,
                t_min: self.t_min(),
                t_max: self.t_max(),
            });
        }
        let mut out = WienerPath {
            dt: self.dt,
            root_dt: self.root_dt,
            lineage: self.lineage.clone(),
            lo: self.lo - k,
            shift_cells: self.shift_cells + k,
            increments: self.increments.clone(),
            values: Vec::new(),
            stream: self.stream.clone(),
        };
        out.rebuild_values();
        Ok(out)
    }

    /// Extend the covered window to the left, drawing the missing increments
    /// from the same per-cell stream. Existing values are unchanged
    /// bit-for-bit.
    pub fn extend_left(&self, new_t_min: f64) -> Result<Self> {
        if matches!(self.stream, Stream::External) {
            return Err(Error::NoStream { op: "extend_left" });
        }
        let new_lo = cell_of(new_t_min, self.dt)?;
        if new_lo >= self.lo {
            return Ok(self.clone());
        }
        let added = (self.lo - new_lo) as usize;
        let mut inc = Vec::with_capacity(added + self.increments.len());
        for c in new_lo..self.lo {
            inc.push(self.cell_increment_abs(c + self.shift_cells));
        }
        inc.extend_from_slice(&self.increments);
        let mut values = vec![0.0; inc.len() + 1];
        values[added..].copy_from_slice(&self.values);
        for i in (0..added).rev() {
            values[i] = values[i + 1] - inc[i];
        }
        Ok(WienerPath {
            dt: self.dt,
            root_dt: self.root_dt,
            lineage: self.lineage.clone(),
            lo: new_lo,
            shift_cells: self.shift_cells,
            increments: inc,
            values,
            stream: self.stream.clone(),
        })
    }

    /// Extend the covered window to the right; mirror of `extend_left`.
    pub fn extend_right(&self, new_t_max: f64) -> Result<Self> {
        if matches!(self.stream, Stream::External) {
            return Err(Error::NoStream { op: "extend_right" });
        }
        let old_hi = self.lo + self.increments.len() as i64;
        let new_hi = cell_of(new_t_max, self.dt)?;
        if new_hi <= old_hi {
            return Ok(self.clone());
        }
        let mut inc = self.increments.clone();
        let mut values = self.values.clone();
        for c in old_hi..new_hi {
            let d = self.cell_increment_abs(c + self.shift_cells);
            inc.push(d);
            values.push(values[values.len() - 1] + d);
        }
        Ok(WienerPath {
            dt: self.dt,
            root_dt: self.root_dt,
            lineage: self.lineage.clone(),
            lo: self.lo,
            shift_cells: self.shift_cells,
            increments: inc,
            values,
            stream: self.stream.clone(),
        })
    }

    /// Extend in whichever directions are needed so that the domain covers
    /// `[t_min, t_max]`.
    pub fn ensure_domain(&self, t_min: f64, t_max: f64) -> Result<Self> {
        let mut p = if t_min < self.t_min() {
            self.extend_left(t_min)?
        } else {
            self.clone()
        };
        if t_max > p.t_max() {
            p = p.extend_right(t_max)?;
        }
        Ok(p)
    }

    /// Subdivide every cell by `factor` using Brownian-bridge draws
    /// conditioned on the existing endpoints; coarse-grid values are
    /// preserved (the last sub-increment absorbs the rounding remainder).
    ///
    /// The factor is decomposed into ascending primes, one refinement level
    /// per prime, so dyadic refinements compose exactly: `refine(p, 4)` draws
    /// the same variables as `refine(refine(p, 2), 2)`.
    pub fn refine(&self, factor: u32) -> Result<Self> {
        if factor < 2 {
            return Err(Error::InvalidArgument(format!(
                "refinement factor must be >= 2, got {factor}"
            )));
        }
        if matches!(self.stream, Stream::External) {
            return Err(Error::NoStream { op: "refine" });
        }
        let mut out = self.clone();
        for f in prime_factors(factor) {
            out = out.refine_one_level(f);
        }
        Ok(out)
    }

    fn refine_one_level(&self, f: u32) -> Self {
        let mut out = WienerPath {
            dt: self.dt / f as f64,
            root_dt: self.root_dt,
            lineage: {
                let mut l = self.lineage.clone();
                l.push(f);
                l
            },
            lo: self.lo * f as i64,
            shift_cells: self.shift_cells * f as i64,
            increments: Vec::with_capacity(self.increments.len() * f as usize),
            values: Vec::new(),
            stream: self.stream.clone(),
        };
        let hi = out.lo + (self.increments.len() * f as usize) as i64;
        out.increments = (out.lo..hi)
            .map(|c| out.cell_increment_abs(c + out.shift_cells))
            .collect();
        // Anchor every coarse node at its existing value (bit-for-bit) and
        // accumulate only within each coarse cell; the sub-increments of a
        // cell sum exactly to its coarse increment, so the two agree to
        // rounding at the seam while the nodes themselves never move.
        let fpu = f as usize;
        let mut values = vec![0.0; out.increments.len() + 1];
        for (k, w) in self.values.iter().enumerate() {
            values[k * fpu] = *w;
        }
        for k in 0..self.increments.len() {
            let base = k * fpu;
            for j in 0..fpu - 1 {
                values[base + j + 1] = values[base + j] + out.increments[base + j];
            }
        }
        out.values = values;
        out
    }

    /// Write the sampled values as CSV with header `t,W`.
    pub fn export_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,W")?;
        for i in 0..self.values.len() {
            writeln!(w, "{},{}", self.time_at(i), self.values[i])?;
        }
        Ok(())
    }

    /// Read a path back from `t,W` CSV. The grid must be uniform and contain
    /// t = 0. Imported paths have no generator stream: they can be shifted
    /// and used to drive flows, but not extended or refined.
    pub fn import_csv<R: Read>(r: R) -> Result<Self> {
        let reader = BufReader::new(r);
        let mut times = Vec::new();
        let mut vals = Vec::new();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if lineno == 0 || (times.is_empty() && line.starts_with('t')) {
                // header
                if line != "t,W" {
                    return Err(Error::Csv {
                        line: lineno + 1,
                        msg: format!("expected header 't,W', found '{line}'"),
                    });
                }
                continue;
            }
            let mut parts = line.split(',');
            let (a, b) = (parts.next(), parts.next());
            match (a, b) {
                (Some(a), Some(b)) => {
                    let t: f64 = a.trim().parse().map_err(|e| Error::Csv {
                        line: lineno + 1,
                        msg: format!("bad time '{a}': {e}"),
                    })?;
                    let v: f64 = b.trim().parse().map_err(|e| Error::Csv {
                        line: lineno + 1,
                        msg: format!("bad value '{b}': {e}"),
                    })?;
                    times.push(t);
                    vals.push(v);
                }
                _ => {
                    return Err(Error::Csv {
                        line: lineno + 1,
                        msg: "expected two comma-separated columns".into(),
                    })
                }
            }
        }
        if times.len() < 2 {
            return Err(Error::Csv {
                line: 0,
                msg: "need at least two samples".into(),
            });
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::Csv {
                line: 2,
                msg: "time column must be strictly increasing".into(),
            });
        }
        for (i, w) in times.windows(2).enumerate() {
            if ((w[1] - w[0]) - dt).abs() > GRID_TOL * dt.max(1.0) {
                return Err(Error::Csv {
                    line: i + 3,
                    msg: "grid spacing is not uniform".into(),
                });
            }
        }
        let lo = cell_of(times[0], dt).map_err(|_| Error::Csv {
            line: 2,
            msg: "grid does not contain t = 0".into(),
        })?;
        let n = vals.len() - 1;
        if lo > 0 || lo + (n as i64) < 0 {
            return Err(Error::Csv {
                line: 0,
                msg: "grid does not straddle t = 0".into(),
            });
        }
        let increments: Vec<f64> = vals.windows(2).map(|w| w[1] - w[0]).collect();
        let mut path = WienerPath {
            dt,
            root_dt: dt,
            lineage: Vec::new(),
            lo,
            shift_cells: 0,
            increments,
            values: Vec::new(),
            stream: Stream::External,
        };
        // Re-anchor: imported values may carry an offset; W(0) = 0 holds
        // after rebuilding from increments.
        path.rebuild_values();
        Ok(path)
    }
}

/// Recursive per-cell increment at a refinement level.
///
/// Level 0 draws the root increment directly from the seed and the cell
/// counter. Level `l > 0` subdivides the parent cell's increment into
/// `lineage[l-1]` bridge pieces, drawing the bridge variables from a
/// substream keyed by (seed, level, parent cell). The final piece is the
/// remainder, so the pieces sum to the parent increment exactly.
fn gen_increment(seed: u64, lineage: &[u32], root_dt: f64, level: usize, cell: i64) -> f64 {
    if level == 0 {
        let mut s = SubStream::new(key2(seed ^ ROOT_SALT, cell as u64));
        return root_dt.sqrt() * s.gauss();
    }
    let f = lineage[level - 1] as i64;
    let parent = cell.div_euclid(f);
    let j = cell.rem_euclid(f);
    let parent_inc = gen_increment(seed, lineage, root_dt, level - 1, parent);
    let mut dt_sub = root_dt;
    for &l in &lineage[..level] {
        dt_sub /= l as f64;
    }
    let mut rng = SubStream::new(key2(
        seed ^ BRIDGE_SALT,
        (level as u64).wrapping_mul(PHI64) ^ (parent as u64),
    ));
    let mut rem = parent_inc;
    for i in 0..f {
        let left = (f - i) as f64;
        let d = if i == f - 1 {
            rem
        } else {
            rem / left + (dt_sub * (left - 1.0) / left).sqrt() * rng.gauss()
        };
        if i == j {
            return d;
        }
        rem -= d;
    }
    unreachable!()
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        while n % d == 0 {
            out.push(d);
            n /= d;
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Convert a grid-aligned time to its cell index; errors if `t` is more than
/// 1e-9 (absolute, scaled by max(1, |t|)) off the grid.
fn cell_of(t: f64, dt: f64) -> Result<i64> {
    let k = (t / dt).round();
    if (t - k * dt).abs() > GRID_TOL * t.abs().max(1.0) {
        return Err(Error::GridMisaligned { t, dt });
    }
    Ok(k as i64)
}
