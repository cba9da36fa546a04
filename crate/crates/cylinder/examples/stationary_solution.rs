//! The stationary radius rho*(omega) of the benchmark system: a random
//! fixed point measurable with respect to the past of the noise. Flowing
//! it forward lands exactly on the stationary radius of the shifted
//! realization — the defining identity of a random steady state — and the
//! time average of the linearization rate along it recovers the fiber
//! Lyapunov exponent -2 by ergodicity.
//!
//! Run with: cargo run --example stationary_solution

use std::sync::Arc;

use cylinder::cocycle::{LiftedPoint, SystemHandle};
use cylinder::example::PitchforkCircle;
use cylinder::noise::WienerPath;

fn main() {
    let sys = PitchforkCircle::new(0.5);
    let handle: SystemHandle = Arc::new(PitchforkCircle::new(0.5));
    let path = WienerPath::generate(7, -30.0, 6.0, 1e-3).unwrap();

    let rho_star = sys.stationary_radius(&path, 0.0).unwrap();
    println!("rho*(omega) at t = 0 (seed 7, nu = 0.5): {rho_star:.8}");

    println!("\nfixed-point identity: flow rho*(omega) for t, compare to rho*(theta_t omega)");
    println!("{:>6} {:>14} {:>14} {:>12}", "t", "flowed", "stationary", "defect");
    for t in [0.5, 1.0, 2.0, 5.0] {
        let end = handle
            .flow(&path, 0.0, t, &LiftedPoint::new(0.0, vec![rho_star]))
            .unwrap();
        let expect = sys.stationary_radius(&path, t).unwrap();
        println!(
            "{t:>6.1} {:>14.8} {expect:>14.8} {:>12.3e}",
            end.y[0],
            (end.y[0] - expect).abs()
        );
    }

    // Ergodic route to the Lyapunov exponent: the average of the
    // linearization rate 1 - 3 rho^2 along the stationary trajectory.
    let long = WienerPath::generate(7, -20.0, 150.0, 1e-2).unwrap();
    let avg = sys.ergodic_rate_average(&long, 140.0).unwrap();
    println!("\ntime average of (1 - 3 rho^2) over [0, 140]: {avg:.4}  (exponent is exactly -2)");

    // In the deterministic limit the radius settles at 1 and the average
    // is exactly -2.
    let flat = WienerPath::zeros(-20.0, 150.0, 1e-2).unwrap();
    let det = PitchforkCircle::new(0.0).ergodic_rate_average(&flat, 140.0).unwrap();
    println!("same average with the noise switched off: {det:.6}");
}
