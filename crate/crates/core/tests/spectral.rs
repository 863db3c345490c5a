mod common;

use ga2d::geometry::{self, DiagonalRectangle};
use ga2d::oracle::{build_dense, ExactPropagator};
use ga2d::spectral::{self, dressed_state, interference_factor, self_energy, self_energy_derivative_band_center};
use ga2d::{initial_state, presets, CouplingPoint, GiantAtomSpec, InitialKind, LatticeSpec, Site, SystemConfig};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

fn rect(center: Site, np: i64, nm: i64, g: f64) -> GiantAtomSpec {
    GiantAtomSpec::new(0.0, DiagonalRectangle::odd(center, np, nm, g).points().unwrap()).unwrap()
}

/// `⟨e|(z - H)^{-1}|e⟩` for a real `z` outside the spectrum.
fn dense_resolvent(config: &SystemConfig, z: f64) -> f64 {
    let h = build_dense(config).unwrap().matrix;
    let dim = h.nrows();
    let a = DMatrix::<f64>::identity(dim, dim) * z - h;
    let mut e = DVector::zeros(dim);
    e[0] = 1.0;
    a.lu().solve(&e).unwrap()[0]
}

#[test]
fn self_energy_matches_dense_resolvent_outside_band() {
    for (n, z) in [(16, 5.0), (24, -4.5), (32, 6.0)] {
        let lattice = LatticeSpec::new(n, 1.0).unwrap();
        let c = lattice.center();
        let atom = GiantAtomSpec::new(
            0.3,
            vec![CouplingPoint { site: c, strength: 0.4 }, CouplingPoint { site: c.offset(2, -1), strength: -0.25 }],
        )
        .unwrap();
        let config = SystemConfig::new(lattice, vec![atom.clone()]).unwrap();
        let sigma = self_energy(&atom, &atom, Complex64::new(z, 0.0), 128, 1.0).unwrap();
        let expected = 1.0 / (z - 0.3 - sigma.re);
        let dense = dense_resolvent(&config, z);
        // wrap-around on the finite torus decays like e^{-N}
        assert!((dense - expected).abs() < 1e-7, "N={n}: {dense} vs {expected}");
        assert!(sigma.im.abs() < 1e-14);
    }
}

#[test]
fn subradiant_self_energy_vanishes_as_grid_grows() {
    let atom = rect(Site::new(3, 3), 1, 0, 0.2);
    for grid in [64, 128, 256, 512] {
        let s = self_energy(&atom, &atom, Complex64::ZERO, grid, 1.0).unwrap();
        assert!(s.norm() < 1e-12);
    }
}

#[test]
fn singular_grid_points_are_reported() {
    let small = GiantAtomSpec::new(0.0, vec![CouplingPoint::new(0, 0, 0.1)]).unwrap();
    // ω = -4 is hit exactly at k = (0, 0) of an unshifted axis, never of the shifted one
    let z = Complex64::new(-2.0 * (1.0 + (std::f64::consts::PI / 64.0).cos()), 0.0);
    let err = self_energy(&small, &small, z, 64, 1.0).unwrap_err();
    assert!(matches!(err, ga2d::Error::QuadratureSingularity { .. }));
}

#[test]
fn quadrature_converges_to_closed_form() {
    for a in 0..4 {
        for b in 0..3 {
            let atom = rect(Site::new(0, 0), a, b, 0.1);
            let closed = 0.01 * ((2 * a + 1) * (2 * b + 1)) as f64;
            let coarse = self_energy_derivative_band_center(&atom, 1024, 1.0).unwrap();
            let fine = self_energy_derivative_band_center(&atom, 2048, 1.0).unwrap();
            assert!((coarse - fine).abs() / fine < 1e-3);
            assert!((fine - closed).abs() / closed < 1e-3);
        }
    }
}

#[test]
fn interference_predictions_order() {
    let o = Site::new(0, 0);
    let constructive = interference_factor(&rect(o, 1, 0, 0.2), &rect(o, 0, 1, 0.2)).unwrap();
    let destructive = interference_factor(&rect(o, 1, 0, 0.2), &rect(o, 0, 0, 0.2)).unwrap();
    assert_eq!(constructive.xi, 1);
    assert_eq!(destructive.xi, -1);
    let plateau = |name| spectral::steady_state_population(&presets::preset(name).unwrap().atoms()[0], 1.0).unwrap();
    assert!(plateau("single8_destructive") > plateau("single8_none"));
    assert!(plateau("single8_none") > plateau("single8_constructive"));
}

#[test]
fn dressed_states_of_every_preset_are_zero_modes() {
    for name in presets::PRESET_NAMES {
        let config = presets::preset(name).unwrap();
        for (i, atom) in config.atoms().iter().enumerate() {
            // embed the atom alone on a lattice small enough for the dense check
            let lattice = LatticeSpec::new(24, 1.0).unwrap();
            let (sx, sy) = atom.sites().fold((0, 0), |(x, y), s| (x + s.x, y + s.y));
            let k = atom.num_points() as i64;
            let moved = atom.translated(12 - sx / k, 12 - sy / k);
            let single = SystemConfig::new(lattice, vec![moved.clone()]).unwrap();
            let d = dressed_state(&moved, 1.0).unwrap();
            assert!((d.norm_sqr() - 1.0).abs() < 1e-10, "{name} atom {i}");

            let state = initial_state(&single, InitialKind::Dressed(0)).unwrap();
            let residual = build_dense(&single).unwrap().apply(&state).norm();
            assert!(residual < 1e-10, "{name} atom {i}: residual {residual}");

            let support = geometry::bic_support(&moved).unwrap();
            assert_eq!(support.len(), d.bic_weights.len(), "{name} atom {i}");
            for (site, w) in &d.bic_weights {
                assert_eq!(support.sign(*site), Some(if w.re > 0.0 { 1 } else { -1 }), "{name} atom {i} at {site}");
            }
        }
    }
}

#[test]
fn dense_zero_mode_matches_dressed_state() {
    let lattice = LatticeSpec::new(14, 1.0).unwrap();
    let atom = rect(Site::new(7, 7), 1, 0, 0.2);
    let config = SystemConfig::new(lattice, vec![atom.clone()]).unwrap();
    let exact = ExactPropagator::new(&config).unwrap();
    let d = initial_state(&config, InitialKind::Dressed(0)).unwrap();
    // the projection of the dressed state onto the zero-energy eigenspace is the state itself
    let modes = exact.zero_modes(1e-9);
    assert!(!modes.is_empty());
    let weight: f64 = modes.iter().map(|m| m.inner(&d).norm_sqr()).sum();
    assert!((weight - 1.0).abs() < 1e-9, "{weight}");
}

#[test]
fn merged_layouts_have_bound_states() {
    for name in ["merged6", "merged7"] {
        let config = presets::preset(name).unwrap();
        let atom = &config.atoms()[0];
        assert!(geometry::is_perfectly_subradiant(atom, 512, 1e-10));
        let predicted = spectral::steady_state_population(atom, 1.0).unwrap();
        let d = dressed_state(atom, 1.0).unwrap();
        // ‖φ‖² equals -∂Σ(0)
        let s = 1.0 / predicted.sqrt() - 1.0;
        let ratio = d.photonic_weight() / d.atom_weight.norm_sqr();
        assert!((ratio - s).abs() < 1e-10, "{name}: {ratio} vs {s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn merging_subradiant_layouts_stays_subradiant(
        c1 in (-6i64..6, -6i64..6), c2 in (-6i64..6, -6i64..6),
        n1 in (0i64..3, 0i64..3), n2 in (0i64..3, 0i64..3),
        g1 in prop_oneof![-0.5..-0.05f64, 0.05..0.5f64], g2 in prop_oneof![-0.5..-0.05f64, 0.05..0.5f64],
    ) {
        let a = DiagonalRectangle::odd(Site::new(c1.0, c1.1), n1.0, n1.1, g1).points().unwrap();
        let b = DiagonalRectangle::odd(Site::new(c2.0, c2.1), n2.0, n2.1, g2).points().unwrap();
        let merged = ga2d::merge_coupling_points(&[a, b].concat());
        prop_assume!(!merged.is_empty());
        let atom = GiantAtomSpec::new(0.0, merged).unwrap();
        prop_assert!(geometry::is_perfectly_subradiant(&atom, 512, 1e-10));
    }

    #[test]
    fn slope_closed_form_matches_bound_state_norm(np in 0i64..4, nm in 0i64..4, g in 0.05..0.4f64) {
        let atom = rect(Site::new(0, 0), np, nm, g);
        let support = geometry::bic_support(&atom).unwrap();
        let closed = spectral::band_center_slope(&atom, 1.0).unwrap();
        prop_assert!((support.norm_sqr() - closed).abs() < 1e-12 * closed.max(1.0));
    }
}
