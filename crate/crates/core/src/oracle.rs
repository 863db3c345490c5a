//! Dense exact diagonalization of the full single-excitation Hamiltonian.
//!
//! Couplings and hopping are real, so `H` is real symmetric and a real
//! eigendecomposition suffices. Only meant for small lattices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::atoms::SystemConfig;
use crate::error::{Error, Result};
use crate::lattice::Site;
use crate::state::SystemState;

/// Largest lattice side accepted by the dense routines.
pub const MAX_DENSE_SIZE: usize = 40;

/// `H = H_B + H_A + H_int` with atoms first, then cavities row-major.
#[derive(Debug, Clone)]
pub struct DenseHamiltonian {
    pub matrix: DMatrix<f64>,
    pub num_atoms: usize,
}

impl DenseHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, state: &SystemState) -> SystemState {
        let re = &self.matrix * DVector::from_iterator(self.dim(), flatten(state).iter().map(|c| c.re));
        let im = &self.matrix * DVector::from_iterator(self.dim(), flatten(state).iter().map(|c| c.im));
        unflatten(re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect(), self.num_atoms)
    }

    /// `⟨ψ|H|ψ⟩`.
    pub fn expectation(&self, state: &SystemState) -> f64 {
        state.inner(&self.apply(state)).re
    }
}

pub fn build_dense(config: &SystemConfig) -> Result<DenseHamiltonian> {
    let lattice = config.lattice();
    if lattice.size() > MAX_DENSE_SIZE {
        return Err(Error::LatticeTooLarge { size: lattice.size(), limit: MAX_DENSE_SIZE });
    }
    let m = config.num_atoms();
    let dim = m + lattice.num_cavities();
    let j = lattice.hopping();
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..lattice.num_cavities() {
        let site = lattice.site(n);
        // +x and +y bonds only; the mirrored entries come from symmetry.
        for nb in [lattice.neighbors(site)[0], lattice.neighbors(site)[2]] {
            let k = lattice.index(nb);
            h[(m + n, m + k)] -= j;
            h[(m + k, m + n)] -= j;
        }
    }
    for (i, atom) in config.atoms().iter().enumerate() {
        h[(i, i)] = atom.detuning();
        for p in atom.points() {
            let n = m + lattice.index(p.site);
            h[(i, n)] = p.strength;
            h[(n, i)] = p.strength;
        }
    }
    Ok(DenseHamiltonian { matrix: h, num_atoms: m })
}

/// Eigendecomposition of a dense Hamiltonian, reusable for any set of times.
#[derive(Debug, Clone)]
pub struct ExactPropagator {
    eigen: SymmetricEigen<f64, nalgebra::Dyn>,
    num_atoms: usize,
}

impl ExactPropagator {
    pub fn new(config: &SystemConfig) -> Result<Self> {
        let h = build_dense(config)?;
        Ok(Self { eigen: h.matrix.symmetric_eigen(), num_atoms: h.num_atoms })
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigen.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigen.eigenvectors
    }

    /// `exp(-iHt) ψ` for every requested time.
    pub fn evolve(&self, initial: &SystemState, times: &[f64]) -> Result<Vec<SystemState>> {
        let dim = self.eigen.eigenvalues.len();
        let psi = flatten(initial);
        if psi.len() != dim || initial.atoms.len() != self.num_atoms {
            return Err(Error::DimensionMismatch { expected: dim, found: psi.len() });
        }
        let v = &self.eigen.eigenvectors;
        let re = v.transpose() * DVector::from_iterator(dim, psi.iter().map(|c| c.re));
        let im = v.transpose() * DVector::from_iterator(dim, psi.iter().map(|c| c.im));
        let coeffs: Vec<Complex64> = re.iter().zip(im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Ok(times
            .iter()
            .map(|&t| {
                let phased: Vec<Complex64> = coeffs
                    .iter()
                    .zip(self.eigen.eigenvalues.iter())
                    .map(|(c, &e)| c * Complex64::from_polar(1.0, -e * t))
                    .collect();
                let out_re = v * DVector::from_iterator(dim, phased.iter().map(|c| c.re));
                let out_im = v * DVector::from_iterator(dim, phased.iter().map(|c| c.im));
                unflatten(
                    out_re.iter().zip(out_im.iter()).map(|(&r, &i)| Complex64::new(r, i)).collect(),
                    self.num_atoms,
                )
            })
            .collect())
    }

    /// Eigenvectors with `|E| < tol`, as states.
    pub fn zero_modes(&self, tol: f64) -> Vec<SystemState> {
        self.eigen
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, e)| e.abs() < tol)
            .map(|(i, _)| {
                unflatten(
                    self.eigen.eigenvectors.column(i).iter().map(|&x| Complex64::new(x, 0.0)).collect(),
                    self.num_atoms,
                )
            })
            .collect()
    }
}

/// Exact evolution by full diagonalization.
pub fn exact_evolve(config: &SystemConfig, initial: &SystemState, times: &[f64]) -> Result<Vec<SystemState>> {
    ExactPropagator::new(config)?.evolve(initial, times)
}

/// Amplitude of a state on a given cavity.
pub fn cavity_amplitude(config: &SystemConfig, state: &SystemState, site: Site) -> Complex64 {
    state.field[config.lattice().index(site)]
}

fn flatten(state: &SystemState) -> Vec<Complex64> {
    state.atoms.iter().chain(&state.field).copied().collect()
}

fn unflatten(mut v: Vec<Complex64>, num_atoms: usize) -> SystemState {
    let field = v.split_off(num_atoms);
    SystemState { atoms: v, field }
}
