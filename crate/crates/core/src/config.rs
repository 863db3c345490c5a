//! Run manifests in TOML.
//!
//! ```toml
//! [lattice]
//! N = 100
//! J = 1.0
//!
//! [[atoms]]
//! detuning = 0.0
//! points = [{ x = 51, y = 50, g = 0.2 }, { x = 49, y = 50, g = 0.2 }]
//!
//! [initial]
//! kind = "bare_excited"
//! atom = 0
//!
//! [evolution]
//! dt = 0.01
//! t_max = 40.0
//! record_stride = 10
//! snapshot_times = [1.0, 20.0]
//!
//! [outputs]
//! dir = "out"
//! ```

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atoms::{CouplingPoint, GiantAtomSpec, SystemConfig};
use crate::error::{Error, Result};
use crate::evolver::{EvolutionParams, InitialKind, DEFAULT_DT};
use crate::lattice::{LatticeSpec, Site};
use crate::presets;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSection {
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointEntry {
    pub x: i64,
    pub y: i64,
    pub g: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomEntry {
    #[serde(default)]
    pub detuning: f64,
    pub points: Vec<PointEntry>,
}

/// One nonzero cavity amplitude of a custom initial state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldEntry {
    pub x: i64,
    pub y: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSection {
    BareExcited {
        atom: usize,
    },
    Dressed {
        atom: usize,
    },
    /// Unnormalized amplitudes; normalized on load.
    Custom {
        #[serde(default)]
        atoms: Vec<[f64; 2]>,
        #[serde(default)]
        field: Vec<FieldEntry>,
    },
}

impl Default for InitialSection {
    fn default() -> Self {
        Self::BareExcited { atom: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionSection {
    #[serde(default = "default_dt")]
    pub dt: f64,
    pub t_max: f64,
    #[serde(default = "default_stride")]
    pub record_stride: usize,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_stride() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsSection {
    pub dir: PathBuf,
}

impl Default for OutputsSection {
    fn default() -> Self {
        Self { dir: PathBuf::from("out") }
    }
}

/// A complete run: system, initial state, integration and output settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub lattice: LatticeSection,
    pub atoms: Vec<AtomEntry>,
    #[serde(default)]
    pub initial: InitialSection,
    pub evolution: EvolutionSection,
    #[serde(default)]
    pub outputs: OutputsSection,
}

impl RunConfig {
    /// Parses TOML. Syntax and type errors carry the line and field.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Manifest for an existing system.
    pub fn from_system(config: &SystemConfig, initial: InitialSection, evolution: EvolutionSection) -> Self {
        Self {
            lattice: LatticeSection { n: config.lattice().size(), j: config.lattice().hopping() },
            atoms: config
                .atoms()
                .iter()
                .map(|a| AtomEntry {
                    detuning: a.detuning(),
                    points: a.points().iter().map(|p| PointEntry { x: p.site.x, y: p.site.y, g: p.strength }).collect(),
                })
                .collect(),
            initial,
            evolution,
            outputs: OutputsSection::default(),
        }
    }

    /// Default run of a preset: atom 0 starts excited and the run lasts
    /// `40 / J`.
    pub fn from_preset(name: &str) -> Result<Self> {
        let config = presets::preset(name)?;
        let evolution = EvolutionSection {
            dt: DEFAULT_DT / config.lattice().hopping(),
            t_max: 40.0 / config.lattice().hopping(),
            record_stride: default_stride(),
            snapshot_times: Vec::new(),
        };
        let mut run = Self::from_system(&config, InitialSection::default(), evolution);
        run.outputs.dir = PathBuf::from(name);
        Ok(run)
    }

    /// The validated system.
    pub fn system(&self) -> Result<SystemConfig> {
        let lattice = LatticeSpec::new(self.lattice.n, self.lattice.j)?;
        let atoms = self
            .atoms
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let points: Vec<CouplingPoint> = a.points.iter().map(|p| CouplingPoint::new(p.x, p.y, p.g)).collect();
                GiantAtomSpec::new(a.detuning, points).map_err(|e| Error::Config(format!("atoms[{i}]: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        SystemConfig::new(lattice, atoms)
    }

    /// Validated integration parameters.
    pub fn params(&self) -> Result<EvolutionParams> {
        let e = &self.evolution;
        let params = EvolutionParams::new(e.dt, e.t_max, e.record_stride).with_snapshots(e.snapshot_times.clone());
        params.validate(self.lattice.j)?;
        Ok(params)
    }

    /// Initial-state request for [`crate::evolver::initial_state`].
    pub fn initial_kind(&self, config: &SystemConfig) -> Result<InitialKind> {
        Ok(match &self.initial {
            InitialSection::BareExcited { atom } => InitialKind::BareExcited(*atom),
            InitialSection::Dressed { atom } => InitialKind::Dressed(*atom),
            InitialSection::Custom { atoms, field } => {
                let lattice = config.lattice();
                if atoms.len() > config.num_atoms() {
                    return Err(Error::Config(format!(
                        "initial.atoms has {} entries for {} atoms",
                        atoms.len(),
                        config.num_atoms()
                    )));
                }
                let mut a = vec![Complex64::ZERO; config.num_atoms()];
                for (slot, [re, im]) in a.iter_mut().zip(atoms) {
                    *slot = Complex64::new(*re, *im);
                }
                let mut f = vec![Complex64::ZERO; lattice.num_cavities()];
                for entry in field {
                    let site = Site::new(entry.x, entry.y);
                    if !lattice.contains(site) {
                        return Err(Error::Config(format!("initial.field entry {site} is off the lattice")));
                    }
                    f[lattice.index(site)] += Complex64::new(entry.re, entry.im);
                }
                InitialKind::Custom { atoms: a, field: f }
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[lattice]
N = 20
J = 1.0

[[atoms]]
detuning = 0.0
points = [{ x = 11, y = 10, g = 0.2 }, { x = 9, y = 10, g = 0.2 }, { x = 10, y = 11, g = 0.2 }, { x = 10, y = 9, g = 0.2 }]

[initial]
kind = "dressed"
atom = 0

[evolution]
dt = 0.01
t_max = 5.0
record_stride = 5
snapshot_times = [1.0]

[outputs]
dir = "out"
"#;

    #[test]
    fn parses_example() {
        let run = RunConfig::from_toml_str(EXAMPLE).unwrap();
        let system = run.system().unwrap();
        assert_eq!(system.lattice().size(), 20);
        assert_eq!(system.atoms()[0].num_points(), 4);
        assert_eq!(run.initial, InitialSection::Dressed { atom: 0 });
        assert_eq!(run.params().unwrap().num_steps(), 500);
    }

    #[test]
    fn preset_round_trip_is_exact() {
        for name in presets::PRESET_NAMES {
            let run = RunConfig::from_preset(name).unwrap();
            let text = run.to_toml_string().unwrap();
            let back = RunConfig::from_toml_str(&text).unwrap();
            assert_eq!(back, run, "{name}");
            assert_eq!(back.system().unwrap(), presets::preset(name).unwrap(), "{name}");
        }
    }

    #[test]
    fn errors_name_the_field() {
        let broken = EXAMPLE.replace("t_max = 5.0", "t_max = \"long\"");
        let err = RunConfig::from_toml_str(&broken).unwrap_err().to_string();
        assert!(err.contains("t_max"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn shared_cavity_is_rejected() {
        let two = EXAMPLE.replace("[initial]", "[[atoms]]\npoints = [{ x = 11, y = 10, g = 0.2 }]\n\n[initial]");
        let err = RunConfig::from_toml_str(&two).unwrap().system().unwrap_err();
        assert!(err.to_string().contains("cavity coupled to multiple atoms"));
    }

    #[test]
    fn custom_initial_state() {
        let custom = EXAMPLE.replace(
            "kind = \"dressed\"\natom = 0",
            "kind = \"custom\"\nfield = [{ x = 0, y = 0, re = 1.0 }, { x = 1, y = 0, re = 1.0 }]",
        );
        let run = RunConfig::from_toml_str(&custom).unwrap();
        let system = run.system().unwrap();
        let state = crate::evolver::initial_state(&system, run.initial_kind(&system).unwrap()).unwrap();
        assert!((state.norm() - 1.0).abs() < 1e-15);
        assert!((state.field[1].re - 0.5f64.sqrt()).abs() < 1e-15);
    }
}
