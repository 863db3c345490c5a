//! Giant atoms, their coupling points, and validated system configurations.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, Site};

/// One connection between an atom and a cavity.
///
/// Strengths are real and may be negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingPoint {
    pub site: Site,
    pub strength: f64,
}

impl CouplingPoint {
    pub const fn new(x: i64, y: i64, strength: f64) -> Self {
        Self { site: Site::new(x, y), strength }
    }
}

/// Replaces points sharing a cavity by a single point with the summed strength.
///
/// Points whose strengths cancel are dropped. The output is ordered by first
/// appearance of each cavity.
pub fn merge_coupling_points(points: &[CouplingPoint]) -> Vec<CouplingPoint> {
    let mut order: Vec<Site> = Vec::new();
    let mut sums: HashMap<Site, f64> = HashMap::new();
    for p in points {
        let entry = sums.entry(p.site).or_insert_with(|| {
            order.push(p.site);
            0.0
        });
        *entry += p.strength;
    }
    let scale = points.iter().map(|p| p.strength.abs()).fold(0.0, f64::max);
    order
        .into_iter()
        .filter_map(|site| {
            let strength = sums[&site];
            (strength.abs() > 1e-14 * scale).then_some(CouplingPoint { site, strength })
        })
        .collect()
}

/// A two-level giant atom: detuning from the band center plus its coupling points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GiantAtomSpec {
    detuning: f64,
    points: Vec<CouplingPoint>,
}

impl GiantAtomSpec {
    /// Zero-strength points are dropped; repeated cavities are rejected.
    pub fn new(detuning: f64, points: Vec<CouplingPoint>) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::InvalidParams(format!("detuning {detuning} is not finite")));
        }
        let points: Vec<CouplingPoint> = points.into_iter().filter(|p| p.strength != 0.0).collect();
        if points.is_empty() {
            return Err(Error::EmptyAtom);
        }
        let mut seen = std::collections::HashSet::new();
        for p in &points {
            if !p.strength.is_finite() {
                return Err(Error::InvalidParams(format!("coupling strength {} is not finite", p.strength)));
            }
            if !seen.insert(p.site) {
                return Err(Error::DuplicateCouplingPoint { x: p.site.x, y: p.site.y });
            }
        }
        Ok(Self { detuning, points })
    }

    /// Merges overlapping points before construction.
    pub fn merged(detuning: f64, points: &[CouplingPoint]) -> Result<Self> {
        Self::new(detuning, merge_coupling_points(points))
    }

    /// Equal strength `g` at every listed site.
    pub fn uniform(detuning: f64, sites: &[Site], strength: f64) -> Result<Self> {
        Self::new(detuning, sites.iter().map(|&site| CouplingPoint { site, strength }).collect())
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn points(&self) -> &[CouplingPoint] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        self.points.iter().map(|p| p.site)
    }

    /// `G = sqrt(Σ_p g_p²)`, the strength of the single collective coupling.
    pub fn effective_coupling(&self) -> f64 {
        self.points.iter().fold(0.0, |acc, p| acc.hypot(p.strength))
    }

    pub fn with_detuning(&self, detuning: f64) -> Self {
        Self { detuning, points: self.points.clone() }
    }

    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        Self {
            detuning: self.detuning,
            points: self
                .points
                .iter()
                .map(|p| CouplingPoint { site: p.site.offset(dx, dy), strength: p.strength })
                .collect(),
        }
    }
}

/// A lattice plus the atoms coupled to it.
///
/// Validation guarantees that all coupling points lie on the lattice and that
/// no cavity is shared between atoms, which the linear-cost atom propagator
/// relies on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    lattice: LatticeSpec,
    atoms: Vec<GiantAtomSpec>,
}

impl SystemConfig {
    pub fn new(lattice: LatticeSpec, atoms: Vec<GiantAtomSpec>) -> Result<Self> {
        let mut owner: BTreeMap<Site, usize> = BTreeMap::new();
        for (i, atom) in atoms.iter().enumerate() {
            for site in atom.sites() {
                if !lattice.contains(site) {
                    return Err(Error::OutOfLattice { atom: i, x: site.x, y: site.y, size: lattice.size() });
                }
                if let Some(&first) = owner.get(&site) {
                    return Err(Error::SharedCavity { x: site.x, y: site.y, first, second: i });
                }
                owner.insert(site, i);
            }
        }
        Ok(Self { lattice, atoms })
    }

    pub fn lattice(&self) -> &LatticeSpec {
        &self.lattice
    }

    pub fn atoms(&self) -> &[GiantAtomSpec] {
        &self.atoms
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, index: usize) -> Result<&GiantAtomSpec> {
        self.atoms.get(index).ok_or(Error::AtomIndex { index, count: self.atoms.len() })
    }

    /// Same atoms on a lattice of different size, recentred on the new lattice.
    pub fn resized(&self, size: usize) -> Result<Self> {
        let lattice = LatticeSpec::new(size, self.lattice.hopping())?;
        let shift = lattice.center().x - self.lattice.center().x;
        Self::new(lattice, self.atoms.iter().map(|a| a.translated(shift, shift)).collect())
    }

    /// Same geometry with every coupling strength multiplied by `factor`.
    pub fn scaled_couplings(&self, factor: f64) -> Result<Self> {
        let atoms = self
            .atoms
            .iter()
            .map(|a| {
                let points =
                    a.points().iter().map(|p| CouplingPoint { site: p.site, strength: p.strength * factor }).collect();
                GiantAtomSpec::new(a.detuning(), points)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.lattice, atoms)
    }
}
