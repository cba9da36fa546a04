//! Heun integration of Stratonovich SDEs along a stored Wiener path.
//!
//! Systems are autonomous with scalar driving noise:
//!
//! ```text
//! dx = f(x) dt + g(x) ∘ dW,    x in R^n.
//! ```
//!
//! The scheme is the Stratonovich predictor-corrector (Heun): an Euler
//! predictor followed by trapezoidal averaging of both coefficients. For
//! scalar noise it converges pathwise at first order in the step size, and
//! it needs no derivatives of `g`.
//!
//! The integrator walks the path cell by cell, so runs over `[t0, t2]` and
//! over `[t0, t1] + [t1, t2]` execute identical float operations on
//! identical stored increments: flow composition holds bit-for-bit, not just
//! approximately.
//!
//! [`integrate_with_tangent`] transports tangent vectors by applying the
//! same scheme to the variational system `dV = Df(x)V dt + Dg(x)V ∘ dW`.
//! Base-state updates are the same expressions as in [`integrate`], so the
//! base trajectory is bit-identical with and without tangents. When
//! analytic Jacobians are not supplied, the tangent step falls back to a
//! directional finite difference of the one-step map.

use crate::error::{Error, Result};
use crate::linalg::norm;
use crate::noise::WienerPath;

/// Norm beyond which a trajectory is declared blown up.
pub const BLOW_UP_GUARD: f64 = 1e12;

type Field = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;

/// An autonomous Stratonovich SDE with scalar noise.
///
/// `drift` and `diffusion` write `f(x)` and `g(x)` into their output slice
/// (length `n`). The optional Jacobians write row-major `n x n` matrices;
/// when present they make tangent transport exact to the order of the
/// scheme, otherwise a finite-difference fallback is used.
pub struct SdeSpec {
    pub n: usize,
    pub drift: Field,
    pub diffusion: Field,
    pub drift_jacobian: Option<Field>,
    pub diffusion_jacobian: Option<Field>,
}

impl SdeSpec {
    pub fn new(n: usize, drift: Field, diffusion: Field) -> Self {
        SdeSpec {
            n,
            drift,
            diffusion,
            drift_jacobian: None,
            diffusion_jacobian: None,
        }
    }

    pub fn with_jacobians(mut self, drift_jac: Field, diffusion_jac: Field) -> Self {
        self.drift_jacobian = Some(drift_jac);
        self.diffusion_jacobian = Some(diffusion_jac);
        self
    }
}

struct StepScratch {
    f0: Vec<f64>,
    g0: Vec<f64>,
    f1: Vec<f64>,
    g1: Vec<f64>,
    xb: Vec<f64>,
}

impl StepScratch {
    fn new(n: usize) -> Self {
        StepScratch {
            f0: vec![0.0; n],
            g0: vec![0.0; n],
            f1: vec![0.0; n],
            g1: vec![0.0; n],
            xb: vec![0.0; n],
        }
    }
}

/// One Heun step of the base state. `x` is updated in place.
fn heun_step(spec: &SdeSpec, x: &mut [f64], dt: f64, dw: f64, s: &mut StepScratch) {
    (spec.drift)(x, &mut s.f0);
    (spec.diffusion)(x, &mut s.g0);
    for i in 0..spec.n {
        s.xb[i] = x[i] + s.f0[i] * dt + s.g0[i] * dw;
    }
    (spec.drift)(&s.xb, &mut s.f1);
    (spec.diffusion)(&s.xb, &mut s.g1);
    for i in 0..spec.n {
        x[i] += 0.5 * (s.f0[i] + s.f1[i]) * dt + 0.5 * (s.g0[i] + s.g1[i]) * dw;
    }
}

fn check_guard(x: &[f64], t: f64) -> Result<()> {
    let n = norm(x);
    if !n.is_finite() || n > BLOW_UP_GUARD {
        return Err(Error::BlowUp { t, norm: n });
    }
    Ok(())
}

/// Integrate from `t0` to `t1` (both grid-aligned, `t0 <= t1`), returning
/// the terminal state.
pub fn integrate(spec: &SdeSpec, path: &WienerPath, t0: f64, t1: f64, x0: &[f64]) -> Result<Vec<f64>> {
    let (i0, i1) = leg_indices(spec, path, t0, t1, x0)?;
    let dt = path.dt();
    let mut x = x0.to_vec();
    let mut scratch = StepScratch::new(spec.n);
    for i in i0..i1 {
        heun_step(spec, &mut x, dt, path.increment_at(i), &mut scratch);
        check_guard(&x, path.time_at(i + 1))?;
    }
    Ok(x)
}

/// Integrate and record the state every `stride` cells (first and last
/// samples always included). Returns `(time, state)` pairs.
pub fn integrate_sampled(
    spec: &SdeSpec,
    path: &WienerPath,
    t0: f64,
    t1: f64,
    x0: &[f64],
    stride: usize,
) -> Result<Vec<(f64, Vec<f64>)>> {
    let (i0, i1) = leg_indices(spec, path, t0, t1, x0)?;
    let stride = stride.max(1);
    let dt = path.dt();
    let mut x = x0.to_vec();
    let mut scratch = StepScratch::new(spec.n);
    let mut out = Vec::with_capacity((i1 - i0) / stride + 2);
    out.push((path.time_at(i0), x.clone()));
    for i in i0..i1 {
        heun_step(spec, &mut x, dt, path.increment_at(i), &mut scratch);
        check_guard(&x, path.time_at(i + 1))?;
        if (i + 1 - i0) % stride == 0 || i + 1 == i1 {
            out.push((path.time_at(i + 1), x.clone()));
        }
    }
    Ok(out)
}

/// Integrate the base state and transport tangent vectors alongside.
///
/// `v0` holds tangent columns (each of length `n`). Returns the terminal
/// state and the transported columns. The base state sees exactly the same
/// operations as in [`integrate`].
pub fn integrate_with_tangent(
    spec: &SdeSpec,
    path: &WienerPath,
    t0: f64,
    t1: f64,
    x0: &[f64],
    v0: &[Vec<f64>],
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let (i0, i1) = leg_indices(spec, path, t0, t1, x0)?;
    for v in v0 {
        if v.len() != spec.n {
            return Err(Error::InvalidArgument(format!(
                "tangent column has length {}, state has length {}",
                v.len(),
                spec.n
            )));
        }
    }
    let dt = path.dt();
    let n = spec.n;
    let mut x = x0.to_vec();
    let mut v: Vec<Vec<f64>> = v0.to_vec();
    let mut scratch = StepScratch::new(n);
    let analytic = spec.drift_jacobian.is_some() && spec.diffusion_jacobian.is_some();
    let mut a0 = vec![0.0; n * n];
    let mut b0 = vec![0.0; n * n];
    let mut a1 = vec![0.0; n * n];
    let mut b1 = vec![0.0; n * n];
    let mut vb = vec![0.0; n];
    let mut av = vec![0.0; n];
    let mut bv = vec![0.0; n];
    let mut av1 = vec![0.0; n];
    let mut bv1 = vec![0.0; n];
    for i in i0..i1 {
        let dw = path.increment_at(i);
        let x_in = x.clone();
        if analytic {
            let aj = spec.drift_jacobian.as_ref().unwrap();
            let bj = spec.diffusion_jacobian.as_ref().unwrap();
            // base step (same expressions as heun_step)
            heun_step(spec, &mut x, dt, dw, &mut scratch);
            // variational step through the same predictor point
            aj(&x_in, &mut a0);
            bj(&x_in, &mut b0);
            aj(&scratch.xb, &mut a1);
            bj(&scratch.xb, &mut b1);
            for col in v.iter_mut() {
                matvec_into(&a0, col, &mut av, n);
                matvec_into(&b0, col, &mut bv, n);
                for k in 0..n {
                    vb[k] = col[k] + av[k] * dt + bv[k] * dw;
                }
                matvec_into(&a1, &vb, &mut av1, n);
                matvec_into(&b1, &vb, &mut bv1, n);
                for k in 0..n {
                    col[k] += 0.5 * (av[k] + av1[k]) * dt + 0.5 * (bv[k] + bv1[k]) * dw;
                }
            }
        } else {
            // base step first, then finite differences of the one-step map
            heun_step(spec, &mut x, dt, dw, &mut scratch);
            for col in v.iter_mut() {
                let vnorm = norm(col);
                if vnorm == 0.0 {
                    continue;
                }
                let h = 1e-6 * norm(&x_in).max(1.0) / vnorm;
                let mut xp: Vec<f64> = (0..n).map(|k| x_in[k] + h * col[k]).collect();
                heun_step(spec, &mut xp, dt, dw, &mut scratch);
                for k in 0..n {
                    col[k] = (xp[k] - x[k]) / h;
                }
            }
        }
        check_guard(&x, path.time_at(i + 1))?;
    }
    Ok((x, v))
}

/// Transport the identity matrix: the full `n x n` Jacobian (row-major) of
/// the time-`t0 -> t1` solution map.
pub fn integrate_with_jacobian(
    spec: &SdeSpec,
    path: &WienerPath,
    t0: f64,
    t1: f64,
    x0: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = spec.n;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| (0..n).map(|k| if k == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let (x, v) = integrate_with_tangent(spec, path, t0, t1, x0, &cols)?;
    // columns back to row-major
    let mut jac = vec![0.0; n * n];
    for (j, col) in v.iter().enumerate() {
        for k in 0..n {
            jac[k * n + j] = col[k];
        }
    }
    Ok((x, jac))
}

fn matvec_into(a: &[f64], x: &[f64], out: &mut [f64], n: usize) {
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            acc += a[i * n + j] * x[j];
        }
        out[i] = acc;
    }
}

fn leg_indices(
    spec: &SdeSpec,
    path: &WienerPath,
    t0: f64,
    t1: f64,
    x0: &[f64],
) -> Result<(usize, usize)> {
    if x0.len() != spec.n {
        return Err(Error::InvalidArgument(format!(
            "state has length {}, system dimension is {}",
            x0.len(),
            spec.n
        )));
    }
    let i0 = path.grid_index(t0)?;
    let i1 = path.grid_index(t1)?;
    if i1 < i0 {
        return Err(Error::InvalidArgument(format!(
            "backward integration requested: t0 = {t0}, t1 = {t1}"
        )));
    }
    Ok((i0, i1))
}
