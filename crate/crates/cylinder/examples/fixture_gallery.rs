//! A tour of the built-in fixture families, each with analytically known
//! answers: a sinusoidal tracking system (one curve, winding one, explicit
//! noise-dependent graph), a double-well fiber (two flat curves), and a
//! planar band whose attractor winds twice around the cylinder before
//! closing — the half-twist. The permutation trace shows how fiber
//! components are carried from past realizations to the present one.
//!
//! Run with: cargo run --example fixture_gallery

use std::sync::Arc;

use cylinder::cocycle::SystemHandle;
use cylinder::fixtures::{DoubleWell, HalfTwistBand, TrackedSinusoid};
use cylinder::noise::WienerPath;
use cylinder::winding::{
    build_winding_system, extract_curves_detailed, sample_fiber, trace_permutation,
    ExtractionConfig,
};

fn main() {
    let path = WienerPath::generate(4, -2.0, 3.0, 1.0 / 512.0).unwrap();
    let config = ExtractionConfig::default();
    let systems: Vec<(SystemHandle, &str)> = vec![
        (Arc::new(TrackedSinusoid::default()), "one sinusoidal curve, winding 1"),
        (Arc::new(DoubleWell::default()), "two flat curves at +-1, winding 1 each"),
        (Arc::new(HalfTwistBand::default()), "one curve closing after winding 2"),
    ];

    for (system, expected) in systems {
        let name = system.name().to_string();
        let ws = build_winding_system(system, &path, &[]).unwrap();
        let ex = extract_curves_detailed(&ws, &config).unwrap();
        let taus: Vec<usize> = ex.curves.iter().map(|c| c.tau).collect();
        println!("{name}: expected {expected}");
        println!(
            "  detected r = {} curve(s), tau = {:?}, depth {}, t1 = {:.4}",
            ex.curves.len(),
            taus,
            ex.depth,
            ex.t1
        );
        for (curve, residual) in ex.curves.iter().zip(&ex.residuals) {
            println!(
                "  value at angle 0: {:?}  (closure residual {:.1e})",
                curve
                    .eval(0.0)
                    .iter()
                    .map(|v| format!("{v:+.5}"))
                    .collect::<Vec<_>>()
                    .join(", "),
                residual
            );
        }

        // How the fiber components of past realizations map to today's:
        // a bijection at every depth; for the half-twist band the two
        // strand points swap on odd depths.
        let seeds = ws.base.default_fiber_seeds(16);
        let fiber = sample_fiber(&ws, 0.0, ex.depth, &seeds).unwrap();
        if fiber.components.len() > 1 {
            for m in [1usize, 2, 3] {
                let trace = trace_permutation(&ws, &fiber, m).unwrap();
                println!(
                    "  permutation {m} block(s) back: {:?} (bijection: {})",
                    trace.mapping,
                    trace.is_bijection()
                );
            }
        }
        println!();
    }
}
