//! The benchmark system's radial equation has a closed-form pathwise
//! solution, which makes it an oracle for the general-purpose integrator:
//! both are driven by the *same* Brownian path, so they must agree up to
//! discretization error — and refining the step (same realization, bridge
//! refinement) must shrink the gap at first order.
//!
//! Run with: cargo run --example oracle_comparison

use cylinder::example::PitchforkCircle;
use cylinder::integrate::integrate_sampled;
use cylinder::noise::WienerPath;

fn main() {
    let sys = PitchforkCircle::new(0.5);
    let spec = sys.sde_spec();
    let (t_max, rho0) = (5.0, 1.0);

    println!("radial SDE vs closed form, seed 7, rho0 = {rho0}, t in [0, {t_max}]");
    println!("{:>10} {:>14} {:>14} {:>12}", "t", "closed form", "integrator", "abs err");
    let path = WienerPath::generate(7, 0.0, t_max, 1e-3).unwrap();
    let stride = 1000;
    let closed = sys
        .closed_form_radius_sampled(&path, 0.0, t_max, rho0, stride)
        .unwrap();
    let numeric = integrate_sampled(&spec, &path, 0.0, t_max, &[0.0, rho0], stride).unwrap();
    for ((t, c), (_, x)) in closed.iter().zip(&numeric) {
        println!("{t:>10.3} {c:>14.8} {:>14.8} {:>12.3e}", x[1], (c - x[1]).abs());
    }

    // Error under step refinement, one realization.
    println!("\nmax |closed - numeric| over [0, {t_max}] as the step halves:");
    let mut p = path;
    for _ in 0..4 {
        let closed = sys
            .closed_form_radius_sampled(&p, 0.0, t_max, rho0, 1)
            .unwrap();
        let numeric = integrate_sampled(&spec, &p, 0.0, t_max, &[0.0, rho0], 1).unwrap();
        let err = closed
            .iter()
            .zip(&numeric)
            .map(|((_, c), (_, x))| (c - x[1]).abs())
            .fold(0.0, f64::max);
        println!("  dt = {:>9.2e}  ->  {err:.3e}", p.dt());
        p = p.refine(2).unwrap();
    }
}
