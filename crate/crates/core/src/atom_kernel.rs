//! The combined atom + interaction propagator `U_A(Δt) = exp(-i(H_A + H_int)Δt)`.
//!
//! Each atom only talks to its own cavities, and only through the normalized
//! coupling vector `v_p = g_p / G`. The dynamics of atom `i` therefore reduce
//! to a two-level problem between `|e_i⟩` and the collective cavity mode
//! `Σ_p v_p |n_p⟩`, with Hamiltonian `[[Δ, G], [G, 0]]`. Cavity amplitudes
//! orthogonal to the collective mode are left untouched. The cost of one
//! application is `O(M + Σ_i P_i)`.

use num_complex::Complex64;

use crate::atoms::{GiantAtomSpec, SystemConfig};
use crate::error::Result;
use crate::state::SystemState;

/// `G_i = sqrt(Σ_p g_ip²)`.
pub fn effective_coupling(atom: &GiantAtomSpec) -> f64 {
    atom.effective_coupling()
}

/// `exp(-i H Δt)` for `H = [[detuning, coupling], [coupling, 0]]`.
pub fn two_level_propagator(detuning: f64, coupling: f64, dt: f64) -> [[Complex64; 2]; 2] {
    let half = 0.5 * detuning;
    let omega = (half * half + coupling * coupling).sqrt();
    let (sin, cos) = (omega * dt).sin_cos();
    // sin(Ωt)/Ω, continuous through Ω = 0
    let sinc = if omega * dt.abs() > 1e-12 { sin / omega } else { dt };
    let global = Complex64::from_polar(1.0, -half * dt);
    let i = Complex64::I;
    let u11 = global * (cos - i * sinc * half);
    let u22 = global * (cos + i * sinc * half);
    let u12 = global * (-i * sinc * coupling);
    [[u11, u12], [u12, u22]]
}

/// The effective two-level propagator of one atom.
pub fn effective_two_level_propagator(atom: &GiantAtomSpec, dt: f64) -> [[Complex64; 2]; 2] {
    two_level_propagator(atom.detuning(), atom.effective_coupling(), dt)
}

#[derive(Debug, Clone)]
struct AtomBlock {
    u11: Complex64,
    u12: Complex64,
    /// `u22 - 1`: the collective-mode update is applied as a rank-1 correction.
    u22_minus_one: Complex64,
    cavities: Vec<usize>,
    weights: Vec<f64>,
}

/// Precomputed `U_A(Δt)` for a validated configuration.
#[derive(Debug, Clone)]
pub struct AtomPropagator {
    blocks: Vec<AtomBlock>,
    num_cavities: usize,
    dt: f64,
}

impl AtomPropagator {
    pub fn new(config: &SystemConfig, dt: f64) -> Self {
        let lattice = config.lattice();
        let blocks = config
            .atoms()
            .iter()
            .map(|atom| {
                let g = atom.effective_coupling();
                let [[u11, u12], [_, u22]] = effective_two_level_propagator(atom, dt);
                AtomBlock {
                    u11,
                    u12,
                    u22_minus_one: u22 - 1.0,
                    cavities: atom.sites().map(|s| lattice.index(s)).collect(),
                    weights: atom.points().iter().map(|p| p.strength / g).collect(),
                }
            })
            .collect();
        Self { blocks, num_cavities: lattice.num_cavities(), dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, state: &mut SystemState) -> Result<()> {
        state.check_dims(self.blocks.len(), self.num_cavities)?;
        for (block, amp) in self.blocks.iter().zip(state.atoms.iter_mut()) {
            let projection: Complex64 =
                block.cavities.iter().zip(&block.weights).map(|(&n, &w)| state.field[n] * w).sum();
            let c = *amp;
            *amp = block.u11 * c + block.u12 * projection;
            let shift = block.u22_minus_one * projection + block.u12 * c;
            for (&n, &w) in block.cavities.iter().zip(&block.weights) {
                state.field[n] += shift * w;
            }
        }
        Ok(())
    }
}

/// One-off application of `U_A(Δt)`.
pub fn apply_atom_propagator(state: &SystemState, config: &SystemConfig, dt: f64) -> Result<SystemState> {
    let mut out = state.clone();
    AtomPropagator::new(config, dt).apply(&mut out)?;
    Ok(out)
}
