//! Catalog of ready-made configurations.
//!
//! Every layout is built around the origin and then shifted to the lattice
//! center. Unless noted otherwise all coupling strengths are `0.2 J` and all
//! atoms sit at the band center.

use serde::Serialize;

use crate::atoms::{CouplingPoint, GiantAtomSpec, SystemConfig};
use crate::error::{Error, Result};
use crate::geometry::{DiagonalFrame, DiagonalRectangle};
use crate::lattice::{LatticeSpec, Site};

/// Coupling strength used where no other value is documented.
pub const DEFAULT_STRENGTH: f64 = 0.2;

/// Names accepted by [`preset`].
pub const PRESET_NAMES: [&str; 14] = [
    "single4_1x1",
    "single4_3x1",
    "single8_constructive",
    "single8_destructive",
    "single8_none",
    "merged6",
    "merged7",
    "pair_braided",
    "pair_separate",
    "pair_nested",
    "chain7_loose",
    "chain7_tight",
    "triad_all_to_all",
    "grid9",
];

/// Description of a preset and of the parameters chosen for it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    pub lattice_size: usize,
    pub hopping: f64,
    /// Strengths in units of `J`; two values for the merged layouts.
    pub strengths: Vec<f64>,
    /// Values picked here rather than taken from a documented source.
    pub chosen_defaults: Vec<&'static str>,
}

const G_CHOSEN: &str = "coupling strength g/J";
const GEOMETRY_CHOSEN: &str = "exact placement of the atoms";

/// Metadata for a preset.
pub fn preset_info(name: &str) -> Result<PresetInfo> {
    let g = DEFAULT_STRENGTH;
    let (description, size, strengths, chosen): (&'static str, usize, Vec<f64>, Vec<&'static str>) = match name {
        "single4_1x1" => {
            ("one atom, four points on a 1x1 diagonal rectangle, one bound-state peak", 100, vec![g], vec![G_CHOSEN])
        }
        "single4_3x1" => (
            "one atom, four points on a 3x1 diagonal rectangle, three alternating peaks",
            100,
            vec![g],
            vec![G_CHOSEN, "lattice size"],
        ),
        "single8_constructive" => (
            "concentric 3x1 and 1x3 rectangles; the bound-state peaks add",
            200,
            vec![g],
            vec![G_CHOSEN, "lattice size"],
        ),
        "single8_destructive" => (
            "concentric 3x1 and 1x1 rectangles; the shared peak cancels",
            200,
            vec![g],
            vec![G_CHOSEN, "lattice size", GEOMETRY_CHOSEN],
        ),
        "single8_none" => (
            "3x1 and 1x3 rectangles with disjoint peaks",
            200,
            vec![g],
            vec![G_CHOSEN, "lattice size", GEOMETRY_CHOSEN],
        ),
        "merged6" => (
            "two 1x1 rectangles sharing two points, strengths g1, g2 and g1+g2",
            100,
            vec![0.1, 0.2],
            vec![G_CHOSEN, "lattice size", GEOMETRY_CHOSEN],
        ),
        "merged7" => (
            "two 1x1 rectangles sharing one point, strengths g1, g2 and g1+g2",
            100,
            vec![0.1, 0.2],
            vec![G_CHOSEN, "lattice size", GEOMETRY_CHOSEN],
        ),
        "pair_braided" => {
            ("two 1x1 atoms, each with one point on the other's peak", 200, vec![g], vec![G_CHOSEN, GEOMETRY_CHOSEN])
        }
        "pair_separate" => ("two 1x1 atoms far apart", 200, vec![g], vec![G_CHOSEN, GEOMETRY_CHOSEN]),
        "pair_nested" => (
            "a 1x1 atom with all points inside the bound state of a 3x3 atom",
            200,
            vec![g],
            vec![G_CHOSEN, GEOMETRY_CHOSEN],
        ),
        "chain7_loose" => (
            "seven 3x3 atoms, each braided with its neighbours through single corners",
            200,
            vec![g],
            vec![G_CHOSEN, "lattice size", GEOMETRY_CHOSEN],
        ),
        "chain7_tight" => (
            "seven 3x1 atoms displaced by one site each",
            200,
            vec![g],
            vec![G_CHOSEN, "lattice size", GEOMETRY_CHOSEN],
        ),
        "triad_all_to_all" => (
            "three eight-point atoms; every pair is braided in its own region",
            250,
            vec![g],
            vec![G_CHOSEN, GEOMETRY_CHOSEN],
        ),
        "grid9" => (
            "nine 3x3 atoms interacting as a 3x3 square grid",
            200,
            vec![g],
            vec![G_CHOSEN, "lattice size", GEOMETRY_CHOSEN],
        ),
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    let name = PRESET_NAMES.iter().copied().find(|n| *n == name).expect("catalog name");
    Ok(PresetInfo { name, description, lattice_size: size, hopping: 1.0, strengths, chosen_defaults: chosen })
}

fn rect(center: Site, np: i64, nm: i64, g: f64) -> Vec<CouplingPoint> {
    DiagonalRectangle::odd(center, np, nm, g).points().expect("odd rectangles sit on the lattice")
}

fn atom(points: Vec<CouplingPoint>) -> GiantAtomSpec {
    GiantAtomSpec::new(0.0, points).expect("preset atoms are valid")
}

fn merged(parts: &[Vec<CouplingPoint>]) -> GiantAtomSpec {
    GiantAtomSpec::merged(0.0, &parts.concat()).expect("preset atoms are valid")
}

/// Site with diagonal coordinates `(plus, minus)`.
fn diag(plus: i64, minus: i64) -> Site {
    DiagonalFrame { plus, minus }.to_site().expect("even diagonal coordinates")
}

/// Atoms of a preset, laid out around the origin.
fn layout(name: &str) -> Result<Vec<GiantAtomSpec>> {
    let g = DEFAULT_STRENGTH;
    let o = Site::new(0, 0);
    Ok(match name {
        "single4_1x1" => vec![atom(rect(o, 0, 0, g))],
        "single4_3x1" => vec![atom(rect(o, 1, 0, g))],
        "single8_constructive" => vec![atom([rect(o, 1, 0, g), rect(o, 0, 1, g)].concat())],
        "single8_destructive" => vec![atom([rect(o, 1, 0, g), rect(o, 0, 0, g)].concat())],
        "single8_none" => vec![atom([rect(o, 1, 0, g), rect(Site::new(4, -4), 0, 1, g)].concat())],
        "merged6" => vec![merged(&[rect(o, 0, 0, 0.1), rect(Site::new(1, 1), 0, 0, 0.2)])],
        "merged7" => vec![merged(&[rect(o, 0, 0, 0.1), rect(Site::new(2, 0), 0, 0, 0.2)])],
        "pair_braided" => vec![atom(rect(o, 0, 0, g)), atom(rect(Site::new(1, 0), 0, 0, g))],
        "pair_separate" => vec![atom(rect(Site::new(-5, 0), 0, 0, g)), atom(rect(Site::new(5, 0), 0, 0, g))],
        "pair_nested" => vec![atom(rect(o, 1, 1, g)), atom(rect(Site::new(1, 0), 0, 0, g))],
        "chain7_loose" => (-3..=3).map(|i| atom(rect(diag(5 * i, i), 1, 1, g))).collect(),
        "chain7_tight" => (-3..=3).map(|i| atom(rect(Site::new(i, 0), 1, 0, g))).collect(),
        "triad_all_to_all" => {
            // pairs (0,1), (0,2) and (1,2) are braided in three separate regions
            let (r01, r02, r12) = (Site::new(-4, -3), Site::new(-4, 5), Site::new(4, -3));
            vec![
                atom([rect(r01, 0, 0, g), rect(r02, 0, 0, g)].concat()),
                atom([rect(r01.offset(1, 0), 0, 0, g), rect(r12, 0, 0, g)].concat()),
                atom([rect(r02.offset(1, 0), 0, 0, g), rect(r12.offset(1, 0), 0, 0, g)].concat()),
            ]
        }
        "grid9" => {
            let mut atoms = Vec::with_capacity(9);
            for j in -1..=1 {
                for i in -1..=1 {
                    atoms.push(atom(rect(diag(5 * i + j, i - 5 * j), 1, 1, g)));
                }
            }
            atoms
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}

/// A validated preset centered on its lattice.
pub fn preset(name: &str) -> Result<SystemConfig> {
    let info = preset_info(name)?;
    let lattice = LatticeSpec::new(info.lattice_size, info.hopping)?;
    let c = lattice.center();
    let atoms = layout(name)?.iter().map(|a| a.translated(c.x, c.y)).collect();
    SystemConfig::new(lattice, atoms)
}

/// The interaction graph a preset is built to realize, as sorted pairs.
pub fn expected_dfi_pairs(name: &str) -> Result<Vec<(usize, usize)>> {
    preset_info(name)?;
    Ok(match name {
        "pair_braided" => vec![(0, 1)],
        "chain7_loose" | "chain7_tight" => (0..6).map(|i| (i, i + 1)).collect(),
        "triad_all_to_all" => vec![(0, 1), (0, 2), (1, 2)],
        "grid9" => {
            // atoms are numbered row by row on a 3x3 grid
            let mut pairs = Vec::new();
            for r in 0..3 {
                for c in 0..3 {
                    let k = 3 * r + c;
                    if c < 2 {
                        pairs.push((k, k + 1));
                    }
                    if r < 2 {
                        pairs.push((k, k + 3));
                    }
                }
            }
            pairs.sort_unstable();
            pairs
        }
        _ => Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{dfi_pairs, is_subradiant};

    #[test]
    fn every_preset_builds_and_is_subradiant() {
        for name in PRESET_NAMES {
            let config = preset(name).unwrap();
            for (i, a) in config.atoms().iter().enumerate() {
                assert!(is_subradiant(a), "{name} atom {i}");
            }
        }
    }

    #[test]
    fn dfi_pairs_match_design() {
        for name in PRESET_NAMES {
            let config = preset(name).unwrap();
            assert_eq!(dfi_pairs(&config).unwrap(), expected_dfi_pairs(name).unwrap(), "{name}");
        }
    }

    #[test]
    fn merged_point_counts() {
        assert_eq!(preset("merged6").unwrap().atoms()[0].num_points(), 6);
        assert_eq!(preset("merged7").unwrap().atoms()[0].num_points(), 7);
        let strengths: Vec<f64> = preset("merged7").unwrap().atoms()[0].points().iter().map(|p| p.strength).collect();
        assert!(strengths.iter().any(|g| (g - 0.3).abs() < 1e-15));
    }

    #[test]
    fn unknown_name() {
        assert!(matches!(preset("single5"), Err(Error::UnknownPreset(_))));
    }
}
