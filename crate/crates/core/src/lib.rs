//! Single-excitation dynamics of giant atoms on a square lattice of coupled
//! cavities.
//!
//! The [`evolver`] integrates the Schrödinger equation with a second-order
//! split-operator scheme: the bath is propagated exactly in momentum space
//! ([`bath`]) and each atom together with its coupling points is propagated
//! through an effective two-level system ([`atom_kernel`]). The [`spectral`]
//! module predicts steady states from the resolvent, [`geometry`] classifies
//! layouts, and [`oracle`] provides exact diagonalization for small lattices.

pub mod atom_kernel;
pub mod atoms;
pub mod bath;
pub mod config;
pub mod error;
pub mod evolver;
pub mod geometry;
pub mod lattice;
pub mod oracle;
pub mod output;
pub mod presets;
pub mod spectral;
pub mod state;

pub use atoms::{merge_coupling_points, CouplingPoint, GiantAtomSpec, SystemConfig};
pub use error::{Error, Result};
pub use evolver::{evolve, initial_state, wrap_time, EvolutionParams, InitialKind, Snapshot, TimeSeries};
pub use lattice::{dispersion, group_velocity, LatticeSpec, MomentumGrid, Site};
pub use state::SystemState;
