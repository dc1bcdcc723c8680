//! Randomized invariants of the model, the propagator and the concurrence.

use std::f64::consts::PI;

use proptest::prelude::*;

use dirac_entangle::basis::pseudo_spin;
use dirac_entangle::dynamics::{evolve, make_propagator};
use dirac_entangle::entanglement::concurrence;
use dirac_entangle::linalg::{inner, mat_vec, C64, Mat2};
use dirac_entangle::model::{build_hamiltonian, eigensystem, numeric_eigensystem, ModelParams};
use dirac_entangle::state::{ensemble_rng, random_haar_state, SpinorState};

/// SU(2) element exp(-i a n·σ/2) with n from spherical angles.
fn su2(a: f64, theta: f64, phi: f64) -> Mat2 {
    let (c, s) = ((a / 2.0).cos(), (a / 2.0).sin());
    let (nx, ny, nz) = (theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos());
    [
        [C64::new(c, -s * nz), C64::new(-s * ny, -s * nx)],
        [C64::new(s * ny, -s * nx), C64::new(c, s * nz)],
    ]
}

fn params() -> impl Strategy<Value = ModelParams> {
    (0.0..500.0f64, -PI..PI, 1.0..400.0f64, prop_oneof![Just(1i8), Just(-1i8)])
        .prop_map(|(e, th, l, tau)| ModelParams::new(e, th, l, tau).unwrap())
}

fn state() -> impl Strategy<Value = SpinorState> {
    any::<u64>().prop_map(|seed| random_haar_state(&mut ensemble_rng(seed, 0)))
}

fn energy(p: &ModelParams, s: &SpinorState) -> f64 {
    let h = build_hamiltonian(p);
    inner(s.amplitudes(), &mat_vec(h.entries(), s.amplitudes())).re
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn concurrence_is_local_unitary_invariant(
        s in state(),
        a in (0.0..2.0 * PI, 0.0..PI, 0.0..2.0 * PI),
        b in (0.0..2.0 * PI, 0.0..PI, 0.0..2.0 * PI),
    ) {
        let u = pseudo_spin(&su2(a.0, a.1, a.2), &su2(b.0, b.1, b.2));
        let rotated = SpinorState::new(mat_vec(&u, s.amplitudes())).unwrap();
        prop_assert!((concurrence(&rotated).value() - concurrence(&s).value()).abs() < 1e-12);
    }

    #[test]
    fn evolution_is_unitary(p in params(), s in state(), t in -5.0..5.0f64) {
        let psi = evolve(&make_propagator(&p).unwrap(), &s, t / p.lambda_r());
        prop_assert!((psi.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_composes(p in params(), s in state(), t1 in 0.0..3.0f64, t2 in 0.0..3.0f64) {
        let prop = make_propagator(&p).unwrap();
        let (t1, t2) = (t1 / p.lambda_r(), t2 / p.lambda_r());
        let direct = evolve(&prop, &s, t1 + t2);
        let stepped = evolve(&prop, &evolve(&prop, &s, t1), t2);
        prop_assert!(1.0 - inner(direct.amplitudes(), stepped.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn energy_is_conserved(p in params(), s in state(), t in 0.0..10.0f64) {
        let psi = evolve(&make_propagator(&p).unwrap(), &s, t / p.lambda_r());
        let scale = p.band_energies().0;
        prop_assert!((energy(&p, &psi) - energy(&p, &s)).abs() < 1e-11 * scale);
    }

    #[test]
    fn spectrum_is_symmetric_and_direction_free(p in params(), theta in -PI..PI) {
        let e = numeric_eigensystem(&build_hamiltonian(&p)).unwrap().energies();
        let scale = p.band_energies().0;
        for k in 0..4 {
            prop_assert!((e[k] + e[3 - k]).abs() < 1e-12 * scale);
        }
        let rotated = ModelParams::new(p.epsilon(), theta, p.lambda_r(), -p.tau()).unwrap();
        let f = numeric_eigensystem(&build_hamiltonian(&rotated)).unwrap().energies();
        for k in 0..4 {
            prop_assert!((e[k] - f[k]).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn eigenstates_follow_the_concurrence_law(p in params()) {
        let expect = p.lambda_r() / p.epsilon().hypot(p.lambda_r());
        for level in eigensystem(&p).unwrap().levels() {
            prop_assert!((concurrence(&level.state).value() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenstates_are_stationary(p in params(), t in 0.0..10.0f64) {
        let prop = make_propagator(&p).unwrap();
        for level in eigensystem(&p).unwrap().levels() {
            let psi = evolve(&prop, &level.state, t / p.lambda_r());
            prop_assert!(1.0 - inner(level.state.amplitudes(), psi.amplitudes()).norm() < 1e-12);
        }
    }
}
