use ga2d::geometry::{self, DiagonalFrame, DiagonalRectangle};
use ga2d::{presets, CouplingPoint, GiantAtomSpec, Site, SystemConfig};
use proptest::prelude::*;

proptest! {
    #[test]
    fn diagonal_frame_round_trip(x in -1000i64..1000, y in -1000i64..1000) {
        let s = Site::new(x, y);
        prop_assert_eq!(DiagonalFrame::from_site(s).to_site(), Some(s));
    }

    #[test]
    fn rectangles_are_detected(cx in -20i64..20, cy in -20i64..20, np in 0i64..4, nm in 0i64..4, g in 0.01..1.0f64) {
        let r = DiagonalRectangle::odd(Site::new(cx, cy), np, nm, g);
        let pts = r.points().unwrap();
        prop_assert_eq!(DiagonalRectangle::detect(&pts), Some(r));
        let atom = GiantAtomSpec::new(0.0, pts).unwrap();
        prop_assert!(geometry::is_subradiant(&atom));
        prop_assert!(geometry::is_perfectly_subradiant(&atom, 256, 1e-10));
        prop_assert_eq!(geometry::bic_support(&atom).unwrap().len() as i64, (2 * np + 1) * (2 * nm + 1));
    }

    #[test]
    fn parity_rule_agrees_with_spectral_test(a in 1i64..8, b in 1i64..8) {
        let minus = (a + b).rem_euclid(2);
        let r = DiagonalRectangle { center: DiagonalFrame { plus: 0, minus }, plus_side: a, minus_side: b, strength: 0.2 };
        let atom = GiantAtomSpec::new(0.0, r.points().unwrap()).unwrap();
        prop_assert_eq!(geometry::is_perfectly_subradiant(&atom, 512, 1e-10), a % 2 == 1 && b % 2 == 1);
    }

    #[test]
    fn bound_state_peaks_alternate_along_diagonals(np in 0i64..4, nm in 0i64..4) {
        let atom = GiantAtomSpec::new(0.0, DiagonalRectangle::odd(Site::new(0, 0), np, nm, 0.3).points().unwrap()).unwrap();
        let support = geometry::bic_support(&atom).unwrap();
        for site in support.peaks.keys() {
            for step in [(1, 1), (1, -1)] {
                if let Some(next) = support.sign(site.offset(step.0, step.1)) {
                    prop_assert_eq!(next, -support.sign(*site).unwrap());
                }
            }
        }
    }
}

#[test]
fn superradiant_example_fails_predicate() {
    let points = vec![
        CouplingPoint::new(2, 0, 0.2),
        CouplingPoint::new(1, 1, 0.2),
        CouplingPoint::new(0, -2, 0.2),
        CouplingPoint::new(-1, -1, 0.2),
    ];
    let atom = GiantAtomSpec::new(0.0, points).unwrap();
    assert!(!geometry::is_perfectly_subradiant(&atom, 512, 1e-10));
    assert!(geometry::bic_support(&atom).is_err());
}

#[test]
fn dfi_pairs_are_symmetric_under_reordering() {
    for name in presets::PRESET_NAMES {
        let config = presets::preset(name).unwrap();
        let pairs = geometry::dfi_pairs(&config).unwrap();
        let m = config.num_atoms();
        let reversed = SystemConfig::new(*config.lattice(), config.atoms().iter().rev().cloned().collect()).unwrap();
        let mut mirrored: Vec<(usize, usize)> =
            geometry::dfi_pairs(&reversed).unwrap().into_iter().map(|(i, j)| (m - 1 - j, m - 1 - i)).collect();
        mirrored.sort_unstable();
        assert_eq!(pairs, mirrored, "{name}");
        assert!(pairs.iter().all(|(i, j)| i < j));
    }
}

#[test]
fn preset_examples() {
    let single = presets::preset("single4_1x1").unwrap();
    assert_eq!(single.atoms()[0].num_points(), 4);
    assert!(geometry::is_perfectly_subradiant(&single.atoms()[0], 512, 1e-10));
    assert_eq!(geometry::dfi_pairs(&presets::preset("pair_braided").unwrap()).unwrap(), vec![(0, 1)]);
    assert_eq!(geometry::dfi_pairs(&presets::preset("pair_separate").unwrap()).unwrap(), vec![]);
    assert_eq!(geometry::dfi_pairs(&presets::preset("pair_nested").unwrap()).unwrap(), vec![]);
    assert_eq!(
        geometry::dfi_pairs(&presets::preset("triad_all_to_all").unwrap()).unwrap(),
        vec![(0, 1), (0, 2), (1, 2)]
    );
    let chain = geometry::dfi_pairs(&presets::preset("chain7_tight").unwrap()).unwrap();
    for far in [(1, 4), (0, 3), (3, 6), (2, 5)] {
        assert!(!chain.contains(&far));
    }
    for name in presets::PRESET_NAMES {
        let config = presets::preset(name).unwrap();
        let info = presets::preset_info(name).unwrap();
        assert_eq!(config.lattice().size(), info.lattice_size);
        assert!((100..=250).contains(&info.lattice_size));
        assert!(!info.chosen_defaults.is_empty());
    }
}

#[test]
fn detuned_atoms_are_rejected_for_dfi() {
    let config = presets::preset("pair_braided").unwrap();
    let atoms = vec![config.atoms()[0].with_detuning(0.5), config.atoms()[1].clone()];
    let detuned = SystemConfig::new(*config.lattice(), atoms).unwrap();
    assert!(geometry::dfi_pairs(&detuned).is_err());
}
