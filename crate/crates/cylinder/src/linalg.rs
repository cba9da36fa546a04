//! Small dense linear algebra helpers for fiber dimensions of 1-3.
//!
//! Jacobians are stored row-major in a flat `Vec<f64>`. Operator norms are
//! exact (largest singular value) up to 3x3 via the eigenvalues of A^T A;
//! larger matrices fall back to power iteration on A^T A.

/// Euclidean norm.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Euclidean distance.
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// C = A * B for row-major n x n matrices.
pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// y = A * x for a row-major n x n matrix.
pub fn matvec(a: &[f64], x: &[f64], n: usize) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        for j in 0..n {
            y[i] += a[i * n + j] * x[j];
        }
    }
    y
}

pub fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// Largest singular value of a row-major n x n matrix.
///
/// Exact for n <= 3 (closed-form eigenvalues of the Gram matrix); power
/// iteration with a fixed budget of 20 sweeps otherwise.
pub fn operator_norm(a: &[f64], n: usize) -> f64 {
    match n {
        0 => 0.0,
        1 => a[0].abs(),
        2 => {
            // Gram matrix [[p, q], [q, r]]; largest eigenvalue in closed form.
            let p = a[0] * a[0] + a[2] * a[2];
            let q = a[0] * a[1] + a[2] * a[3];
            let r = a[1] * a[1] + a[3] * a[3];
            let mean = 0.5 * (p + r);
            let disc = (0.25 * (p - r) * (p - r) + q * q).sqrt();
            (mean + disc).max(0.0).sqrt()
        }
        3 => {
            // Characteristic cubic of the symmetric Gram matrix, solved by
            // the trigonometric method.
            let mut g = [0.0; 9];
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = 0.0;
                    for k in 0..3 {
                        s += a[k * 3 + i] * a[k * 3 + j];
                    }
                    g[i * 3 + j] = s;
                }
            }
            largest_sym3_eigenvalue(&g).max(0.0).sqrt()
        }
        _ => power_iteration_norm(a, n, 20),
    }
}

fn largest_sym3_eigenvalue(g: &[f64; 9]) -> f64 {
    let tr = g[0] + g[4] + g[8];
    let q = tr / 3.0;
    let b = [
        g[0] - q, g[1], g[2], //
        g[3], g[4] - q, g[5], //
        g[6], g[7], g[8] - q,
    ];
    let p2 = b.iter().map(|x| x * x).sum::<f64>() / 6.0;
    let p = p2.sqrt();
    if p < 1e-300 {
        return q;
    }
    // det(B) / 2 p^3, clamped into [-1, 1] against rounding.
    let det = b[0] * (b[4] * b[8] - b[5] * b[7]) - b[1] * (b[3] * b[8] - b[5] * b[6])
        + b[2] * (b[3] * b[7] - b[4] * b[6]);
    let r = (det / (2.0 * p * p * p)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    q + 2.0 * p * phi.cos()
}

fn power_iteration_norm(a: &[f64], n: usize, iters: usize) -> f64 {
    // Power iteration on A^T A with a deterministic start vector.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64) * 0.5).collect();
    let nv = norm(&v);
    v.iter_mut().for_each(|x| *x /= nv);
    let mut sigma = 0.0;
    for _ in 0..iters {
        let av = matvec(a, &v, n);
        // w = A^T (A v)
        let mut w = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                w[j] += a[i * n + j] * av[i];
            }
        }
        let nw = norm(&w);
        if nw < 1e-300 {
            return 0.0;
        }
        sigma = nw.sqrt();
        for (x, y) in v.iter_mut().zip(&w) {
            *x = y / nw;
        }
    }
    sigma
}
