use proptest::prelude::*;
use quadbell::linalg::C64;
use quadbell::pauli::{pauli_observable, UnitVector3};
use quadbell::settings::MeasurementSettings;
use quadbell::state::{QuantumState, StateJson};
use quadbell::witness::chsh_quadratic;

prop_compose! {
    fn direction()(theta in 0.0..std::f64::consts::PI, phi in 0.0..(2.0 * std::f64::consts::PI))
        -> UnitVector3 {
        UnitVector3::from_angles(theta, phi)
    }
}

prop_compose! {
    fn two_qubit_pure()(raw in prop::collection::vec(-1.0..1.0f64, 8)) -> QuantumState {
        let mut amps: Vec<C64> = raw.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
        let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-6 {
            amps = vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)];
        } else {
            for z in &mut amps {
                *z /= norm;
            }
        }
        QuantumState::pure(2, amps.into()).unwrap()
    }
}

proptest! {
    #[test]
    fn spin_observables_square_to_identity(dir in direction()) {
        let m = pauli_observable(&dir);
        let sq = m.dot(&m);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                prop_assert!((sq[(i, j)] - C64::new(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn state_json_round_trip(state in two_qubit_pure()) {
        let json = serde_json::to_string(&StateJson::from(&state)).unwrap();
        let back: StateJson = serde_json::from_str(&json).unwrap();
        let rebuilt = back.into_state().unwrap();
        let a = state.pure_amplitudes().unwrap();
        let b = rebuilt.pure_amplitudes().unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            prop_assert!((x - y).norm() < 1e-12);
        }
        prop_assert_eq!(state.digest(), rebuilt.digest());
    }

    #[test]
    fn quadratic_quantity_never_exceeds_cap(
        state in two_qubit_pure(),
        a in direction(), ap in direction(), b in direction(), bp in direction(),
    ) {
        let settings = MeasurementSettings::new(vec![(a, ap), (b, bp)]).unwrap();
        let (x, y, q) = chsh_quadratic(&state, &settings).unwrap();
        prop_assert!((x * x + y * y - q).abs() < 1e-12);
        prop_assert!(q <= 4.0 + 1e-9);
    }
}
