//! Single-excitation state vectors.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Amplitudes of the single-excitation manifold: one per atom (bare excited
/// state) followed by one per cavity, cavities row-major as in
/// [`crate::lattice::LatticeSpec::index`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SystemState {
    pub atoms: Vec<Complex64>,
    pub field: Vec<Complex64>,
}

impl SystemState {
    pub fn zeros(num_atoms: usize, num_cavities: usize) -> Self {
        Self { atoms: vec![Complex64::ZERO; num_atoms], field: vec![Complex64::ZERO; num_cavities] }
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidState(format!("cannot normalize a state of norm {norm}")));
        }
        let inv = 1.0 / norm;
        self.atoms.iter_mut().chain(self.field.iter_mut()).for_each(|a| *a *= inv);
        Ok(self)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.atom_norm_sqr() + self.field_norm_sqr()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn atom_norm_sqr(&self) -> f64 {
        self.atoms.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn field_norm_sqr(&self) -> f64 {
        self.field.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn atom_population(&self, index: usize) -> f64 {
        self.atoms[index].norm_sqr()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.atoms.iter().zip(&other.atoms).chain(self.field.iter().zip(&other.field)).map(|(a, b)| a.conj() * b).sum()
    }

    /// Largest componentwise amplitude difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.atoms
            .iter()
            .zip(&other.atoms)
            .chain(self.field.iter().zip(&other.field))
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn check_dims(&self, num_atoms: usize, num_cavities: usize) -> Result<()> {
        if self.atoms.len() != num_atoms {
            return Err(Error::DimensionMismatch { expected: num_atoms, found: self.atoms.len() });
        }
        if self.field.len() != num_cavities {
            return Err(Error::DimensionMismatch { expected: num_cavities, found: self.field.len() });
        }
        Ok(())
    }
}
