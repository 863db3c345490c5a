mod common;

use std::f64::consts::PI;

use ga2d::bath::{apply_bath_propagator, to_momentum, to_real, BathPropagator};
use ga2d::oracle::ExactPropagator;
use ga2d::{dispersion, LatticeSpec, MomentumGrid, SystemConfig, SystemState};
use num_complex::Complex64;
use proptest::prelude::*;

fn bath_only(n: usize) -> SystemConfig {
    SystemConfig::new(LatticeSpec::new(n, 1.0).unwrap(), Vec::new()).unwrap()
}

fn random_field(n: usize, seed: &[(f64, f64)]) -> SystemState {
    common::state_from(&bath_only(n), seed)
}

proptest! {
    #[test]
    fn norm_is_conserved(n in 4usize..24, dt in -3.0..3.0f64, seed in common::arb_seed()) {
        let lattice = LatticeSpec::new(n, 1.0).unwrap();
        let s = random_field(n, &seed);
        let out = apply_bath_propagator(&s, &lattice, dt).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn steps_compose(n in 4usize..16, a in -2.0..2.0f64, b in -2.0..2.0f64, seed in common::arb_seed()) {
        let lattice = LatticeSpec::new(n, 1.3).unwrap();
        let s = random_field(n, &seed);
        let two = apply_bath_propagator(&apply_bath_propagator(&s, &lattice, a).unwrap(), &lattice, b).unwrap();
        let one = apply_bath_propagator(&s, &lattice, a + b).unwrap();
        prop_assert!(two.max_abs_diff(&one) < 1e-10);
    }

    #[test]
    fn fourier_round_trip(n in 4usize..32, seed in common::arb_seed()) {
        let s = random_field(n, &seed);
        let k = to_momentum(&s.field, n);
        let back = to_real(&k, n);
        let err = back.iter().zip(&s.field).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        prop_assert!(err < 1e-12);
        let norm: f64 = k.iter().map(|c| c.norm_sqr()).sum();
        prop_assert!((norm - 1.0).abs() < 1e-12);
    }
}

#[test]
fn every_plane_wave_is_an_eigenmode() {
    let n = 8;
    let lattice = LatticeSpec::new(n, 0.7).unwrap();
    let grid = MomentumGrid::new(&lattice);
    let dt = 0.9;
    let mut prop = BathPropagator::new(&lattice, dt);
    for qy in 0..n {
        for qx in 0..n {
            let k = grid.wave_vector(qx, qy);
            let mut field: Vec<Complex64> = (0..n * n)
                .map(|i| {
                    let s = lattice.site(i);
                    Complex64::from_polar(1.0 / n as f64, -(k[0] * s.x as f64 + k[1] * s.y as f64))
                })
                .collect();
            let before = field.clone();
            prop.apply_field(&mut field).unwrap();
            let phase = Complex64::from_polar(1.0, -dispersion(k, 0.7) * dt);
            for (a, b) in field.iter().zip(&before) {
                assert!((a - b * phase).norm() < 1e-13, "mode ({qx}, {qy})");
            }
        }
    }
}

#[test]
fn band_center_plane_wave_matches_dense_exponential() {
    let n = 8;
    let config = bath_only(n);
    let lattice = config.lattice();
    let field: Vec<Complex64> = (0..n * n)
        .map(|i| {
            let s = lattice.site(i);
            Complex64::from_polar(1.0 / n as f64, -(PI / 2.0) * (s.x + s.y) as f64)
        })
        .collect();
    let s = SystemState { atoms: Vec::new(), field };
    let exact = ExactPropagator::new(&config).unwrap().evolve(&s, &[2.5]).unwrap();
    let fast = apply_bath_propagator(&s, lattice, 2.5).unwrap();
    assert!(fast.max_abs_diff(&exact[0]) < 1e-12);
    assert!(fast.max_abs_diff(&s) < 1e-12);
}

#[test]
fn random_field_matches_dense_exponential() {
    let config = bath_only(10);
    let s = random_field(10, &[(0.3, -0.2), (0.5, 0.1), (-0.4, 0.7)]);
    let exact = ExactPropagator::new(&config).unwrap().evolve(&s, &[3.0]).unwrap();
    let fast = apply_bath_propagator(&s, config.lattice(), 3.0).unwrap();
    assert!(fast.max_abs_diff(&exact[0]) < 1e-12);
}

#[test]
fn grid_energies_lie_in_band_and_are_even() {
    let lattice = LatticeSpec::new(12, 1.5).unwrap();
    let grid = MomentumGrid::new(&lattice);
    assert_eq!(grid.energies().len(), 144);
    for qy in 0..12 {
        for qx in 0..12 {
            let e = grid.energy(qx, qy);
            assert!(e.abs() <= 6.0 + 1e-12);
            let k = grid.wave_vector(qx, qy);
            assert!((dispersion([-k[0], -k[1]], 1.5) - e).abs() < 1e-12);
        }
    }
}
