//! Pullback convergence: start the system further and further in the past
//! and look at where it arrives *now*. On a contracting fiber the arrivals
//! form a Cauchy sequence whose limit is the random attractor's section at
//! the present time — and the successive differences decay like the fiber
//! Lyapunov exponent.
//!
//! Run with: cargo run --example pullback_convergence

use std::sync::Arc;

use cylinder::cocycle::SystemHandle;
use cylinder::example::PitchforkCircle;
use cylinder::noise::WienerPath;
use cylinder::pullback::pullback;

fn main() {
    let sys = PitchforkCircle::new(0.5);
    let handle: SystemHandle = Arc::new(PitchforkCircle::new(0.5));
    let dt = 1e-3;
    let path = WienerPath::generate(7, -20.0, dt, dt).unwrap();
    let horizons = [0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0];
    let rho_star = sys.stationary_radius(&path, 0.0).unwrap();

    println!("pullback to t = 0, seed 7; target rho*(omega) = {rho_star:.8}\n");
    for rho0 in [0.1, 1.0, 5.0] {
        let run = pullback(
            handle.as_ref(),
            &path,
            0.0,
            0.0,
            &[rho0],
            &horizons,
            1e-6,
            1.0 / std::f64::consts::TAU,
        )
        .unwrap();
        println!("start rho0 = {rho0}");
        println!("{:>9} {:>14} {:>14}", "horizon", "arrival", "step diff");
        for (i, (t, state)) in run.horizons.iter().zip(&run.states).enumerate() {
            let diff = if i == 0 {
                String::from("-")
            } else {
                format!("{:.3e}", run.errors[i - 1])
            };
            println!("{t:>9.1} {:>14.8} {:>14}", state.y[0], diff);
        }
        println!(
            "converged: {}; fitted decay rate {:?}\n",
            run.converged, run.rate_estimate
        );
    }
    println!(
        "note: the global fit blends the early nonlinear transient with the\n\
         integrator's small-step floor. Restricting to mid horizons on a\n\
         refined grid recovers the fiber exponent -2."
    );
}
