//! Exact bath evolution in momentum space.
//!
//! The field is taken to momentum space with the convention
//! `a_n = (1/N) Σ_k a_k e^{-ik·n}`, so a mode amplitude is
//! `a_k = (1/N) Σ_n a_n e^{+ik·n}`. Both directions are unitary.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, MomentumGrid};
use crate::state::SystemState;

/// Row count above which row transforms are spread over the rayon pool.
const PARALLEL_ROWS: usize = 96;

/// Planned row transforms for one lattice size.
#[derive(Clone)]
struct RowTransforms {
    size: usize,
    /// `e^{+i...}` kernel: real space to momentum space.
    to_momentum: Arc<dyn Fft<f64>>,
    /// `e^{-i...}` kernel: momentum space to real space.
    to_real: Arc<dyn Fft<f64>>,
}

impl RowTransforms {
    fn new(size: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { size, to_momentum: planner.plan_fft_inverse(size), to_real: planner.plan_fft_forward(size) }
    }

    fn rows(fft: &Arc<dyn Fft<f64>>, data: &mut [Complex64], size: usize) {
        let scratch_len = fft.get_inplace_scratch_len();
        if size >= PARALLEL_ROWS {
            data.par_chunks_mut(size).for_each_init(
                || vec![Complex64::ZERO; scratch_len],
                |scratch, row| fft.process_with_scratch(row, scratch),
            );
        } else {
            let mut scratch = vec![Complex64::ZERO; scratch_len];
            fft.process_with_scratch(data, &mut scratch);
        }
    }
}

/// Square out-of-place transpose.
fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    const BLOCK: usize = 16;
    for rb in (0..n).step_by(BLOCK) {
        for cb in (0..n).step_by(BLOCK) {
            for r in rb..(rb + BLOCK).min(n) {
                for c in cb..(cb + BLOCK).min(n) {
                    dst[c * n + r] = src[r * n + c];
                }
            }
        }
    }
}

/// Unitary transform of a row-major field to momentum space.
///
/// Output index `ky * N + kx` holds the amplitude of the mode whose wave
/// vector is [`MomentumGrid::wave_vector`]`(kx, ky)`.
pub fn to_momentum(field: &[Complex64], size: usize) -> Vec<Complex64> {
    transform(field, size, true)
}

/// Inverse of [`to_momentum`].
pub fn to_real(modes: &[Complex64], size: usize) -> Vec<Complex64> {
    transform(modes, size, false)
}

fn transform(data: &[Complex64], size: usize, forward: bool) -> Vec<Complex64> {
    assert_eq!(data.len(), size * size, "field is not {size}x{size}");
    let plans = RowTransforms::new(size);
    let fft = if forward { &plans.to_momentum } else { &plans.to_real };
    let mut a = data.to_vec();
    let mut b = vec![Complex64::ZERO; a.len()];
    RowTransforms::rows(fft, &mut a, size);
    transpose(&a, &mut b, size);
    RowTransforms::rows(fft, &mut b, size);
    transpose(&b, &mut a, size);
    let scale = 1.0 / size as f64;
    a.iter_mut().for_each(|v| *v *= scale);
    a
}

/// `U_B(Δt) = exp(-i H_B Δt)` for a fixed lattice and step.
///
/// Each application costs two 2D transforms. The mode phases carry the
/// `1/N²` normalisation of the transform pair so no separate rescaling pass
/// is needed.
#[derive(Clone)]
pub struct BathPropagator {
    plans: RowTransforms,
    /// Mode phases in transposed (`kx * N + ky`) layout.
    phases: Vec<Complex64>,
    work: Vec<Complex64>,
    dt: f64,
}

impl BathPropagator {
    pub fn new(lattice: &LatticeSpec, dt: f64) -> Self {
        let n = lattice.size();
        let grid = MomentumGrid::new(lattice);
        let norm = 1.0 / (n * n) as f64;
        let mut phases = vec![Complex64::ZERO; n * n];
        for ky in 0..n {
            for kx in 0..n {
                phases[kx * n + ky] = Complex64::from_polar(norm, -grid.energy(kx, ky) * dt);
            }
        }
        Self { plans: RowTransforms::new(n), phases, work: vec![Complex64::ZERO; n * n], dt }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn size(&self) -> usize {
        self.plans.size
    }

    /// Propagates a row-major field in place.
    pub fn apply_field(&mut self, field: &mut [Complex64]) -> Result<()> {
        let n = self.plans.size;
        if field.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: field.len() });
        }
        RowTransforms::rows(&self.plans.to_momentum, field, n);
        transpose(field, &mut self.work, n);
        RowTransforms::rows(&self.plans.to_momentum, &mut self.work, n);
        self.work.iter_mut().zip(&self.phases).for_each(|(a, p)| *a *= p);
        RowTransforms::rows(&self.plans.to_real, &mut self.work, n);
        transpose(&self.work, field, n);
        RowTransforms::rows(&self.plans.to_real, field, n);
        Ok(())
    }

    /// Propagates the field part of a state; atomic amplitudes are untouched.
    pub fn apply(&mut self, state: &mut SystemState) -> Result<()> {
        self.apply_field(&mut state.field)
    }
}

/// One-off application of `U_B(Δt)` to a state.
pub fn apply_bath_propagator(state: &SystemState, lattice: &LatticeSpec, dt: f64) -> Result<SystemState> {
    let mut out = state.clone();
    BathPropagator::new(lattice, dt).apply(&mut out)?;
    Ok(out)
}
