#![allow(dead_code)]

use ga2d::{CouplingPoint, GiantAtomSpec, LatticeSpec, SystemConfig, SystemState};
use num_complex::Complex64;
use proptest::prelude::*;

/// Random valid configuration: up to three atoms with signed strengths on
/// distinct cavities of a small lattice.
pub fn arb_config(sizes: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = SystemConfig> {
    sizes.prop_flat_map(|n| {
        let cells = n * n;
        (
            Just(n),
            proptest::sample::subsequence((0..cells).collect::<Vec<_>>(), 1..=8usize.min(cells)),
            proptest::collection::vec(prop_oneof![-0.6..-0.05f64, 0.05..0.6f64], 8),
            proptest::collection::vec(-1.0..1.0f64, 3),
            1usize..=3,
        )
            .prop_map(|(n, mut cells, strengths, detunings, atoms)| {
                let lattice = LatticeSpec::new(n, 1.0).unwrap();
                cells.reverse();
                let atoms = atoms.min(cells.len());
                let mut groups: Vec<Vec<CouplingPoint>> = vec![Vec::new(); atoms];
                for (k, (cell, g)) in cells.iter().zip(&strengths).enumerate() {
                    let site = lattice.site(*cell);
                    groups[k % atoms].push(CouplingPoint { site, strength: *g });
                }
                let specs =
                    groups.into_iter().zip(&detunings).map(|(p, d)| GiantAtomSpec::new(*d, p).unwrap()).collect();
                SystemConfig::new(lattice, specs).unwrap()
            })
    })
}

/// Random normalized state for a configuration, from a seed vector.
pub fn state_from(config: &SystemConfig, seed: &[(f64, f64)]) -> SystemState {
    let m = config.num_atoms();
    let cells = config.lattice().num_cavities();
    let amp = |k: usize| {
        let (a, b) = seed[k % seed.len()];
        Complex64::new(a + 0.01 * k as f64, b - 0.003 * k as f64)
    };
    SystemState { atoms: (0..m).map(amp).collect(), field: (m..m + cells).map(amp).collect() }.normalized().unwrap()
}

pub fn arb_seed() -> impl Strategy<Value = Vec<(f64, f64)>> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 1..16)
}
