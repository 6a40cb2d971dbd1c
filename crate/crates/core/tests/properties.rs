use std::f64::consts::PI;

use proptest::prelude::*;

use quadgate::prep::equilibrium_state;
use quadgate::pulse::{hard_pulse, selective_pulse, selective_z_diagonal, selective_z_pulse, Axis};
use quadgate::qudit::{
    expm_hermitian, gate_fidelity_global_phase, spin_operators, ComplexMatrix, Spin,
};
use quadgate::relaxation::{apply_relaxation, RelaxationParams};
use quadgate::sequence::{compile_unitary, parse_sequence, print_sequence};
use quadgate::SpinSystem;

fn axis() -> impl Strategy<Value = Axis> {
    prop_oneof![
        Just(Axis::X),
        Just(Axis::MinusX),
        Just(Axis::Y),
        Just(Axis::MinusY)
    ]
}

fn level() -> impl Strategy<Value = usize> {
    0usize..3
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotations_are_unitary(twice in 1u32..=7, theta in -PI..PI, nx in -1.0..1.0f64, ny in -1.0..1.0f64, nz in -1.0..1.0f64) {
        let ops = spin_operators(Spin::from_twice(twice).unwrap());
        let gen = &(&ops.ix.scale_real(nx) + &ops.iy.scale_real(ny)) + &ops.iz.scale_real(nz);
        let u = expm_hermitian(&gen, theta).unwrap();
        prop_assert!(u.is_unitary(1e-12));
        let back = expm_hermitian(&gen, -theta).unwrap();
        prop_assert!((&u * &back).approx_eq(&ComplexMatrix::identity(ops.ix.dim()), 1e-12));
    }

    #[test]
    fn selective_pulse_leaves_spectators(k in level(), ax in axis(), angle in -2.0 * PI..2.0 * PI) {
        let sys = SpinSystem::default();
        let t = &sys.observable_transitions()[k];
        let u = selective_pulse(&sys, t, ax, angle).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let inside = (i == t.upper() || i == t.lower()) && (j == t.upper() || j == t.lower());
                if !inside {
                    let want = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((u.get(i, j).re - want).abs() < 1e-12 && u.get(i, j).im.abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn z_composite_matches_closed_form(k in level(), phi in -2.0 * PI..2.0 * PI) {
        let sys = SpinSystem::default();
        let t = &sys.observable_transitions()[k];
        let u = selective_z_pulse(&sys, t, phi).unwrap();
        prop_assert!(u.approx_eq(&selective_z_diagonal(&sys, t, phi), 1e-12));
    }

    #[test]
    fn relaxation_is_a_semigroup(a in 0.0..20e-3f64, b in 0.0..20e-3f64, theta in -PI..PI) {
        let sys = SpinSystem::default();
        let rho = equilibrium_state(&sys).evolve(&hard_pulse(&sys, Axis::X, theta).unwrap()).unwrap();
        let p = RelaxationParams::default();
        let two = apply_relaxation(&apply_relaxation(&rho, a, &p, &sys).unwrap(), b, &p, &sys).unwrap();
        let one = apply_relaxation(&rho, a + b, &p, &sys).unwrap();
        prop_assert!(two.matrix().approx_eq(one.matrix(), 1e-12));
    }

    #[test]
    fn printed_sequences_reparse(
        angles in proptest::collection::vec(-10.0..10.0f64, 1..6),
        delay_us in 0.0..500.0f64,
        offset in -5000.0..5000.0f64,
    ) {
        let mut text = format!("system I=3/2 splitting=16kHz offset={offset}Hz\n");
        for (k, a) in angles.iter().enumerate() {
            match k % 3 {
                0 => text.push_str(&format!("pulse hard x {a}\n")),
                1 => text.push_str(&format!("zpulse 01-11 {a}\n")),
                _ => text.push_str(&format!("pulse sel 00-01 -y {a}\n")),
            }
        }
        text.push_str(&format!("delay quad {delay_us}us\n"));
        let ir = parse_sequence(&text).unwrap();
        let again = parse_sequence(&print_sequence(&ir)).unwrap();
        prop_assert_eq!(&ir, &again);
        let sys = ir.system.spin_system();
        let u = compile_unitary(&ir, &sys).unwrap();
        let v = compile_unitary(&again, &sys).unwrap();
        prop_assert!((gate_fidelity_global_phase(&u, &v).unwrap() - 1.0).abs() < 1e-12);
    }
}
