//! Resolvent quantities: self-energies, steady-state populations, dressed
//! bound states and BIC interference.
//!
//! Brillouin-zone sums use an `N_k x N_k` grid with `kx` offset by half a
//! step, `kx = -π + 2π(i + 1/2)/N_k`, `ky = -π + 2πj/N_k`. For even `N_k` no
//! grid point lies on the band-center contour `kx ± ky = ±π`.

mod fit;

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atoms::{CouplingPoint, GiantAtomSpec};
use crate::error::{Error, Result};
use crate::geometry::{self, DiagonalRectangle};
use crate::lattice::{dispersion, Site};

pub use fit::{default_fit_start, fit_rabi, fit_rabi_samples, RabiFit};

/// Smallest quadrature grid accepted.
pub const MIN_GRID: usize = 64;

/// Grid used when a closed form is not available.
pub const DEFAULT_GRID: usize = 2048;

const SINGULAR_DISTANCE: f64 = 1e-12;

/// Self-energy of one atom at a probe energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfEnergyReport {
    pub z: Complex64,
    pub value: Complex64,
    pub derivative: Complex64,
    pub grid_size: usize,
}

fn check_grid(grid_size: usize) -> Result<()> {
    if grid_size < MIN_GRID || !grid_size.is_multiple_of(2) {
        return Err(Error::InvalidGrid(grid_size));
    }
    Ok(())
}

/// Per-point phase tables `e^{-ik x}` along each axis of the offset grid.
struct PhaseTable {
    strengths: Vec<f64>,
    along_x: Vec<Vec<Complex64>>,
    along_y: Vec<Vec<Complex64>>,
}

impl PhaseTable {
    fn new(points: &[CouplingPoint], grid: usize) -> Self {
        let kx: Vec<f64> = (0..grid).map(|i| kx_value(i, grid)).collect();
        let ky: Vec<f64> = (0..grid).map(|j| ky_value(j, grid)).collect();
        let table = |k: &[f64], r: i64| k.iter().map(|&k| Complex64::from_polar(1.0, -k * r as f64)).collect();
        Self {
            strengths: points.iter().map(|p| p.strength).collect(),
            along_x: points.iter().map(|p| table(&kx, p.site.x)).collect(),
            along_y: points.iter().map(|p| table(&ky, p.site.y)).collect(),
        }
    }

    fn row(&self, j: usize, out: &mut [Complex64]) {
        out.fill(Complex64::ZERO);
        for (p, g) in self.strengths.iter().enumerate() {
            let c = self.along_y[p][j] * g;
            for (o, e) in out.iter_mut().zip(&self.along_x[p]) {
                *o += c * e;
            }
        }
    }
}

fn kx_value(i: usize, grid: usize) -> f64 {
    -PI + 2.0 * PI * (i as f64 + 0.5) / grid as f64
}

fn ky_value(j: usize, grid: usize) -> f64 {
    -PI + 2.0 * PI * j as f64 / grid as f64
}

/// `(1/N_k²) Σ_k w(ω(k), F_a(k) F_b(k)*)`.
fn bz_sum<W>(a: &[CouplingPoint], b: &[CouplingPoint], grid: usize, hopping: f64, weight: W) -> Result<Complex64>
where
    W: Fn(f64, Complex64) -> Result<Complex64> + Sync,
{
    let ta = PhaseTable::new(a, grid);
    let tb = PhaseTable::new(b, grid);
    let total = (0..grid)
        .into_par_iter()
        .map(|j| {
            let mut fa = vec![Complex64::ZERO; grid];
            let mut fb = vec![Complex64::ZERO; grid];
            ta.row(j, &mut fa);
            tb.row(j, &mut fb);
            let ky = ky_value(j, grid);
            let mut acc = Complex64::ZERO;
            for i in 0..grid {
                let omega = dispersion([kx_value(i, grid), ky], hopping);
                acc += weight(omega, fa[i] * fb[i].conj())?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    // rows are summed in order so results do not depend on scheduling
    Ok(total.into_iter().sum::<Complex64>() / (grid * grid) as f64)
}

fn strength_scale(points: &[CouplingPoint]) -> f64 {
    points.iter().map(|p| p.strength.abs()).sum()
}

/// `Σ_ab(z) = (1/N_k²) Σ_k F_a(k) F_b(k)* / (z - ω(k))`.
pub fn self_energy(
    a: &GiantAtomSpec,
    b: &GiantAtomSpec,
    z: Complex64,
    grid_size: usize,
    hopping: f64,
) -> Result<Complex64> {
    check_grid(grid_size)?;
    let tiny = 1e-12 * strength_scale(a.points()) * strength_scale(b.points());
    bz_sum(a.points(), b.points(), grid_size, hopping, |omega, num| {
        let d = z - omega;
        if d.norm() < SINGULAR_DISTANCE {
            if num.norm() > tiny {
                return Err(Error::QuadratureSingularity { z: format!("{z}") });
            }
            return Ok(Complex64::ZERO);
        }
        Ok(num / d)
    })
}

/// `∂_zΣ_ab(z) = -(1/N_k²) Σ_k F_a F_b* / (z - ω)²`.
pub fn self_energy_slope(
    a: &GiantAtomSpec,
    b: &GiantAtomSpec,
    z: Complex64,
    grid_size: usize,
    hopping: f64,
) -> Result<Complex64> {
    check_grid(grid_size)?;
    let tiny = 1e-12 * strength_scale(a.points()) * strength_scale(b.points());
    bz_sum(a.points(), b.points(), grid_size, hopping, |omega, num| {
        let d = z - omega;
        if d.norm() < SINGULAR_DISTANCE {
            if num.norm() > tiny {
                return Err(Error::QuadratureSingularity { z: format!("{z}") });
            }
            return Ok(Complex64::ZERO);
        }
        Ok(-num / (d * d))
    })
}

/// Value and slope of an atom's self-energy at `z`.
pub fn self_energy_report(
    atom: &GiantAtomSpec,
    z: Complex64,
    grid_size: usize,
    hopping: f64,
) -> Result<SelfEnergyReport> {
    Ok(SelfEnergyReport {
        z,
        value: self_energy(atom, atom, z, grid_size, hopping)?,
        derivative: self_energy_slope(atom, atom, z, grid_size, hopping)?,
        grid_size,
    })
}

/// `-∂_zΣ(0)` by quadrature of `|F(k)|² / ω(k)²`.
pub fn self_energy_derivative_band_center(atom: &GiantAtomSpec, grid_size: usize, hopping: f64) -> Result<f64> {
    check_grid(grid_size)?;
    if !geometry::is_subradiant(atom) {
        return Err(Error::NotSubradiant);
    }
    let s = bz_sum(atom.points(), atom.points(), grid_size, hopping, |omega, num| Ok(num / (omega * omega)))?;
    Ok(s.re)
}

/// Cross term `2 Re (1/N_k²) Σ F_a F_b* / ω²` of `-∂_zΣ(0)` for the union of
/// two subradiant layouts.
pub fn interference_slope(a: &GiantAtomSpec, b: &GiantAtomSpec, grid_size: usize, hopping: f64) -> Result<f64> {
    check_grid(grid_size)?;
    if !geometry::is_subradiant(a) || !geometry::is_subradiant(b) {
        return Err(Error::NotSubradiant);
    }
    let s = bz_sum(a.points(), b.points(), grid_size, hopping, |omega, num| Ok(num / (omega * omega)))?;
    Ok(2.0 * s.re)
}

/// Closed form `(g/J)² (2n⁺+1)(2n⁻+1)` for an odd diagonal rectangle.
pub fn rectangle_slope(rect: &DiagonalRectangle, hopping: f64) -> Option<f64> {
    rect.is_odd().then(|| (rect.strength / hopping).powi(2) * (rect.plus_side * rect.minus_side) as f64)
}

/// Sign and diagonal overlaps of the bound-state peaks of two concentric
/// rectangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interference {
    pub xi: i32,
    pub overlap_plus: i64,
    pub overlap_minus: i64,
}

impl Interference {
    /// `ξ · 2g²/J² · ∩⁺∩⁻`.
    pub fn slope(&self, strength: f64, hopping: f64) -> f64 {
        self.xi as f64 * 2.0 * (strength / hopping).powi(2) * (self.overlap_plus * self.overlap_minus) as f64
    }
}

fn as_odd_rectangle(atom: &GiantAtomSpec) -> Result<(DiagonalRectangle, i64, i64)> {
    let rect = DiagonalRectangle::detect(atom.points()).ok_or(Error::NotRectangle)?;
    let (np, nm) = rect.half_sides().ok_or(Error::NotSubradiant)?;
    Ok((rect, np, nm))
}

/// Interference sign `ξ` and overlaps `∩±` of two concentric subsets.
pub fn interference_factor(a: &GiantAtomSpec, b: &GiantAtomSpec) -> Result<Interference> {
    let (ra, pa, ma) = as_odd_rectangle(a)?;
    let (rb, pb, mb) = as_odd_rectangle(b)?;
    if ra.center != rb.center {
        return Err(Error::NotConcentric);
    }
    Ok(Interference {
        xi: if (pa + pb + ma + mb) % 2 == 0 { 1 } else { -1 },
        overlap_plus: 2 * pa.min(pb) + 1,
        overlap_minus: 2 * ma.min(mb) + 1,
    })
}

/// Quadrature grid large enough to integrate a subradiant atom exactly.
fn exact_grid(atom: &GiantAtomSpec) -> usize {
    let xs = atom.points().iter().map(|p| p.site.x);
    let ys = atom.points().iter().map(|p| p.site.y);
    let extent = (xs.clone().max().unwrap_or(0) - xs.min().unwrap_or(0))
        .max(ys.clone().max().unwrap_or(0) - ys.min().unwrap_or(0)) as usize;
    (4 * extent + 8).next_power_of_two().max(256)
}

/// `-∂_zΣ(0)`, from the closed forms where they apply and by quadrature
/// otherwise.
pub fn band_center_slope(atom: &GiantAtomSpec, hopping: f64) -> Result<f64> {
    if let Some(rect) = DiagonalRectangle::detect(atom.points()) {
        return rectangle_slope(&rect, hopping).ok_or(Error::NotSubradiant);
    }
    if let Some((ra, rb)) = geometry::split_into_rectangles(atom) {
        if ra.center == rb.center {
            let a = GiantAtomSpec::new(0.0, ra.points()?)?;
            let b = GiantAtomSpec::new(0.0, rb.points()?)?;
            let cross = interference_factor(&a, &b)?.slope(ra.strength, hopping);
            let sa = rectangle_slope(&ra, hopping).ok_or(Error::NotSubradiant)?;
            let sb = rectangle_slope(&rb, hopping).ok_or(Error::NotSubradiant)?;
            return Ok(sa + sb + cross);
        }
    }
    self_energy_derivative_band_center(atom, exact_grid(atom), hopping)
}

/// `|C_e(∞)|² = 1 / (1 + s)²` with `s = -∂_zΣ(0)`.
pub fn steady_state_population(atom: &GiantAtomSpec, hopping: f64) -> Result<f64> {
    if atom.detuning() != 0.0 {
        return Err(Error::NonZeroDetuning(atom.detuning()));
    }
    let s = band_center_slope(atom, hopping)?;
    Ok(1.0 / (1.0 + s).powi(2))
}

/// Steady-state population for a given `s = -∂_zΣ(0)`.
pub fn plateau_from_slope(slope: f64) -> f64 {
    1.0 / (1.0 + slope).powi(2)
}

/// Normalized zero-energy eigenstate `α|e⟩ + Σ_n β_n|n⟩` of a subradiant atom.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedState {
    pub atom_weight: Complex64,
    pub bic_weights: BTreeMap<Site, Complex64>,
}

impl DressedState {
    pub fn photonic_weight(&self) -> f64 {
        self.bic_weights.values().map(|w| w.norm_sqr()).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.atom_weight.norm_sqr() + self.photonic_weight()
    }
}

/// Solves for the dressed bound state of a subradiant atom at `Δ = 0`.
///
/// The field is restricted to the bound-state support; the zero mode is the
/// null vector of `H` applied to that subspace, evaluated on every site the
/// result can reach.
pub fn dressed_state(atom: &GiantAtomSpec, hopping: f64) -> Result<DressedState> {
    if atom.detuning() != 0.0 {
        return Err(Error::NonZeroDetuning(atom.detuning()));
    }
    let support = geometry::bic_support_with_hopping(atom, hopping)?;
    let columns: Vec<Site> = support.peaks.keys().copied().collect();
    let coupling: BTreeMap<Site, f64> = atom.points().iter().map(|p| (p.site, p.strength)).collect();

    let mut rows: BTreeSet<Site> = coupling.keys().copied().collect();
    for s in &columns {
        rows.insert(*s);
        for (dx, dy) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            rows.insert(s.offset(dx, dy));
        }
    }

    // row 0 and column 0 belong to the atom
    let mut h = DMatrix::<f64>::zeros(rows.len() + 1, columns.len() + 1);
    for (c, s) in columns.iter().enumerate() {
        if let Some(g) = coupling.get(s) {
            h[(0, c + 1)] = *g;
        }
    }
    for (r, site) in rows.iter().enumerate() {
        if let Some(g) = coupling.get(site) {
            h[(r + 1, 0)] = *g;
        }
        for (c, s) in columns.iter().enumerate() {
            if (s.x - site.x).abs() + (s.y - site.y).abs() == 1 {
                h[(r + 1, c + 1)] = -hopping;
            }
        }
    }

    let svd = h.svd(false, true);
    let v_t = svd.v_t.ok_or_else(|| Error::InvalidState("singular value decomposition failed".into()))?;
    let (k, sigma) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::NoZeroMode(f64::NAN))?;
    let scale = hopping + atom.effective_coupling();
    if sigma > 1e-10 * scale {
        return Err(Error::NoZeroMode(sigma));
    }
    let mut v: Vec<f64> = v_t.row(k).iter().copied().collect();
    if v[0].abs() < 1e-12 {
        return Err(Error::NoZeroMode(sigma));
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt() * v[0].signum();
    v.iter_mut().for_each(|x| *x /= norm);

    Ok(DressedState {
        atom_weight: Complex64::new(v[0], 0.0),
        bic_weights: columns.iter().zip(&v[1..]).map(|(s, w)| (*s, Complex64::new(*w, 0.0))).collect(),
    })
}

/// `τ = (2 max(n⁺, n⁻) + 1) / (2J)`, the time for light to cross a rectangle.
pub fn buildup_time(n_plus: i64, n_minus: i64, hopping: f64) -> f64 {
    (2 * n_plus.max(n_minus) + 1) as f64 / (2.0 * hopping)
}
