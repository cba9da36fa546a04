//! Randomized property checks for the foundations everything else leans
//! on: driving-path surgery must be exact (not merely accurate) under
//! arbitrary parameters, and the small geometric helpers must satisfy
//! their algebraic laws on the whole input space, not just on the values
//! unit tests happen to pick.

use proptest::prelude::*;

use cylinder::cocycle::{circle_dist, wrap_unit, CylinderPoint};
use cylinder::linalg::{dist, norm, operator_norm};
use cylinder::noise::WienerPath;

/// dt drawn from exact binary fractions so grid arithmetic is reproducible.
fn dt_strategy() -> impl Strategy<Value = f64> {
    (3u32..8).prop_map(|k| 1.0 / f64::from(1u32 << k))
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 64,
        // Integration tests have no src/ to persist regressions into; the
        // minimal failing inputs print on failure instead.
        failure_persistence: None,
        .. ProptestConfig::default()
    })]

    /// Extending a path in either direction never rewrites an existing
    /// sample: the old window is bit-identical in the wider path.
    #[test]
    fn extension_preserves_existing_samples(
        seed in any::<u64>(),
        dt in dt_strategy(),
        left in 1u32..40,
        right in 1u32..40,
        grow_l in 1u32..40,
        grow_r in 1u32..40,
    ) {
        let t_min = -f64::from(left) * dt;
        let t_max = f64::from(right) * dt;
        let base = WienerPath::generate(seed, t_min, t_max, dt).unwrap();
        let wide = base
            .ensure_domain(t_min - f64::from(grow_l) * dt, t_max + f64::from(grow_r) * dt)
            .unwrap();
        for i in 0..=base.n_cells() {
            prop_assert_eq!(
                wide.value(base.time_at(i)).unwrap().to_bits(),
                base.value_at(i).to_bits()
            );
        }
    }

    /// Shifting relabels cells exactly: every increment is the same float,
    /// the shifted path anchors at zero, and shifting back is the identity
    /// on the increment stream.
    #[test]
    fn shift_relabels_cells_exactly(
        seed in any::<u64>(),
        dt in dt_strategy(),
        span in 8u32..64,
        cells in -30i32..30,
    ) {
        let half = f64::from(span) * dt;
        let base = WienerPath::generate(seed, -half, half, dt).unwrap();
        let sigma = f64::from(cells) * dt;
        let wide = base
            .ensure_domain(-half - sigma.abs() - dt, half + sigma.abs() + dt)
            .unwrap();
        let shifted = wide.shift(sigma).unwrap();
        prop_assert_eq!(shifted.value(0.0).unwrap().to_bits(), 0f64.to_bits());
        // The cell that starts at time t of the shifted realization is the
        // cell that starts at t + sigma of the original one.
        for i in 0..base.n_cells() {
            let t = base.time_at(i);
            let a = shifted.increment_at(shifted.grid_index(t).unwrap());
            let b = wide.increment_at(wide.grid_index(t + sigma).unwrap());
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
        // Round trip: shift back and compare increments over the original
        // window again.
        let back = shifted.shift(-sigma).unwrap();
        for i in 0..base.n_cells() {
            let t = base.time_at(i);
            let a = back.increment_at(back.grid_index(t).unwrap());
            prop_assert_eq!(a.to_bits(), base.increment_at(i).to_bits());
        }
    }

    /// Refinement keeps every coarse node bit-identical, splits each cell
    /// into increments that sum back to the coarse increment exactly, and
    /// composes across prime factorizations: refine(4) == refine(2) twice.
    #[test]
    fn refinement_is_consistent(
        seed in any::<u64>(),
        dt in dt_strategy(),
        span in 4u32..24,
        factor in 2u32..6,
    ) {
        let half = f64::from(span) * dt;
        let base = WienerPath::generate(seed, -half, half, dt).unwrap();
        let fine = base.refine(factor).unwrap();
        for i in 0..=base.n_cells() {
            prop_assert_eq!(
                fine.value(base.time_at(i)).unwrap().to_bits(),
                base.value_at(i).to_bits()
            );
        }
        if factor == 4 {
            let twice = base.refine(2).unwrap().refine(2).unwrap();
            prop_assert_eq!(twice.increments(), fine.increments());
        }
    }

    /// Angle wrapping lands in [0, 1) and never moves a point by a
    /// non-integer amount; circular distance is a metric bounded by 1/2.
    #[test]
    fn angle_arithmetic_laws(
        a in -1e6f64..1e6,
        b in -1e6f64..1e6,
        c in -1e6f64..1e6,
    ) {
        let w = wrap_unit(a);
        prop_assert!((0.0..1.0).contains(&w));
        let moved = a - w;
        prop_assert!((moved - moved.round()).abs() < 1e-6);

        let dab = circle_dist(a, b);
        prop_assert!((0.0..=0.5 + 1e-12).contains(&dab));
        prop_assert!((dab - circle_dist(b, a)).abs() <= 1e-12);
        prop_assert!(dab <= circle_dist(a, c) + circle_dist(c, b) + 1e-9);
    }

    /// The operator norm dominates the stretch of every vector and is
    /// dominated by the Frobenius norm, in all the dimensions the library
    /// solves exactly.
    #[test]
    fn operator_norm_bounds_hold(
        entries in prop::collection::vec(-10.0f64..10.0, 9),
        probe in prop::collection::vec(-1.0f64..1.0, 3),
        d in 1usize..=3,
    ) {
        let a: Vec<f64> = (0..d * d)
            .map(|k| entries[(k / d) * 3 + (k % d)])
            .collect();
        let v = &probe[..d];
        let vn = norm(v);
        prop_assume!(vn > 1e-6);
        let mut av = vec![0.0; d];
        for i in 0..d {
            for j in 0..d {
                av[i] += a[i * d + j] * v[j];
            }
        }
        let op = operator_norm(&a, d);
        prop_assert!(norm(&av) / vn <= op * (1.0 + 1e-9) + 1e-12);
        let frob = norm(&a);
        prop_assert!(op <= frob * (1.0 + 1e-9) + 1e-12);
    }

    /// Projecting a lifted point to the cylinder and lifting it back with
    /// its own winding count is the identity.
    #[test]
    fn lift_project_round_trip(
        s in -50.0f64..50.0,
        y in prop::collection::vec(-5.0f64..5.0, 1..3),
    ) {
        let p = cylinder::cocycle::LiftedPoint::new(s, y.clone());
        let (cyl, winding) = p.project();
        let back = cyl.lift(winding);
        prop_assert!((back.s_lift - s).abs() <= 1e-9 * s.abs().max(1.0));
        prop_assert_eq!(back.y, y);
        let again = CylinderPoint::new(cyl.s, cyl.y.clone());
        prop_assert!(dist(&again.y, &cyl.y) == 0.0);
        prop_assert!((0.0..1.0).contains(&cyl.s));
    }
}
