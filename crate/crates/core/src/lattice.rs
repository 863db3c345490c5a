//! The square cavity lattice: geometry, dispersion and momentum grid.
//!
//! Energies are measured from the band center (the frame rotating at the
//! cavity frequency), so the bare cavity frequency never appears.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A cavity position in lattice units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Site {
    pub x: i64,
    pub y: i64,
}

impl Site {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn offset(self, dx: i64, dy: i64) -> Self {
        Self::new(self.x + dx, self.y + dy)
    }
}

impl std::fmt::Display for Site {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// An `N x N` periodic lattice of cavities with nearest-neighbour hopping `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    size: usize,
    hopping: f64,
}

impl LatticeSpec {
    pub const MIN_SIZE: usize = 4;

    pub fn new(size: usize, hopping: f64) -> Result<Self> {
        if size < Self::MIN_SIZE {
            return Err(Error::InvalidLattice(format!("N = {size} is below the minimum of {}", Self::MIN_SIZE)));
        }
        if !(hopping.is_finite() && hopping > 0.0) {
            return Err(Error::InvalidLattice(format!("J = {hopping} must be positive")));
        }
        Ok(Self { size, hopping })
    }

    /// Cavities per side.
    pub fn size(&self) -> usize {
        self.size
    }

    /// Hopping rate `J`.
    pub fn hopping(&self) -> f64 {
        self.hopping
    }

    pub fn num_cavities(&self) -> usize {
        self.size * self.size
    }

    pub fn contains(&self, site: Site) -> bool {
        let n = self.size as i64;
        (0..n).contains(&site.x) && (0..n).contains(&site.y)
    }

    /// Row-major index of a site: rows are `y`, columns are `x`.
    pub fn index(&self, site: Site) -> usize {
        debug_assert!(self.contains(site));
        site.y as usize * self.size + site.x as usize
    }

    pub fn site(&self, index: usize) -> Site {
        Site::new((index % self.size) as i64, (index / self.size) as i64)
    }

    /// Lattice center, `(N/2, N/2)`.
    pub fn center(&self) -> Site {
        let c = (self.size / 2) as i64;
        Site::new(c, c)
    }

    /// The four periodic nearest neighbours of `site`.
    pub fn neighbors(&self, site: Site) -> [Site; 4] {
        let n = self.size as i64;
        let wrap = |v: i64| v.rem_euclid(n);
        [
            Site::new(wrap(site.x + 1), site.y),
            Site::new(wrap(site.x - 1), site.y),
            Site::new(site.x, wrap(site.y + 1)),
            Site::new(site.x, wrap(site.y - 1)),
        ]
    }
}

/// Band energy `ω(k) = -2J (cos kx + cos ky)`.
pub fn dispersion(k: [f64; 2], hopping: f64) -> f64 {
    -2.0 * hopping * (k[0].cos() + k[1].cos())
}

/// Group velocity `∇ω(k) = 2J (sin kx, sin ky)`.
pub fn group_velocity(k: [f64; 2], hopping: f64) -> [f64; 2] {
    [2.0 * hopping * k[0].sin(), 2.0 * hopping * k[1].sin()]
}

/// Largest group speed on the lattice, reached along the diagonals.
pub fn max_group_speed(hopping: f64) -> f64 {
    2.0 * std::f64::consts::SQRT_2 * hopping
}

/// Wave vectors of an `N x N` periodic lattice and their band energies.
///
/// Index `m` along an axis holds `k = 2πm/N`, folded into `[-π, π)`; this is
/// the ordering produced by the discrete transforms in [`crate::bath`].
/// Mode energies are stored row-major with rows indexed by `ky`.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    size: usize,
    axis: Vec<f64>,
    energies: Vec<f64>,
}

impl MomentumGrid {
    pub fn new(lattice: &LatticeSpec) -> Self {
        let n = lattice.size();
        let axis: Vec<f64> = (0..n).map(|m| fold_wavenumber(m, n)).collect();
        let mut energies = Vec::with_capacity(n * n);
        for &ky in &axis {
            for &kx in &axis {
                energies.push(dispersion([kx, ky], lattice.hopping()));
            }
        }
        Self { size: n, axis, energies }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Wave numbers along one axis, in transform order.
    pub fn axis(&self) -> &[f64] {
        &self.axis
    }

    pub fn wave_vector(&self, kx_index: usize, ky_index: usize) -> [f64; 2] {
        [self.axis[kx_index], self.axis[ky_index]]
    }

    /// Mode energies, `energies()[ky_index * N + kx_index]`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn energy(&self, kx_index: usize, ky_index: usize) -> f64 {
        self.energies[ky_index * self.size + kx_index]
    }
}

fn fold_wavenumber(m: usize, n: usize) -> f64 {
    let k = 2.0 * PI * m as f64 / n as f64;
    if 2 * m < n {
        k
    } else {
        k - 2.0 * PI
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn dispersion_band_edges_and_center() {
        assert_abs_diff_eq!(dispersion([0.0, 0.0], 1.0), -4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dispersion([PI, PI], 1.0), 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dispersion([PI / 2.0, PI / 2.0], 1.0), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn group_velocity_matches_finite_difference() {
        assert_eq!(group_velocity([0.0, 0.0], 1.0), [0.0, 0.0]);
        let v = group_velocity([PI / 2.0, PI / 2.0], 1.0);
        assert_abs_diff_eq!(v[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], 2.0, epsilon = 1e-15);

        let k = [PI / 2.0, -PI / 2.0];
        let v = group_velocity(k, 1.0);
        let h = 1e-5;
        let fd = |axis: usize| {
            let mut kp = k;
            let mut km = k;
            kp[axis] += h;
            km[axis] -= h;
            (dispersion(kp, 1.0) - dispersion(km, 1.0)) / (2.0 * h)
        };
        assert_abs_diff_eq!(v[0], 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v[1], -2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fd(0), v[0], epsilon = 1e-8);
        assert_abs_diff_eq!(fd(1), v[1], epsilon = 1e-8);
    }

    #[test]
    fn band_center_velocity_is_diagonal() {
        for i in 0..64 {
            let kx = -PI + 2.0 * PI * i as f64 / 64.0;
            for ky in [PI - kx, kx - PI, kx + PI, -PI - kx] {
                let v = group_velocity([kx, ky], 1.3);
                assert!((v[0].abs() - v[1].abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn momentum_grid_covers_band() {
        let lattice = LatticeSpec::new(8, 1.0).unwrap();
        let grid = MomentumGrid::new(&lattice);
        assert_eq!(grid.energies().len(), 64);
        assert_abs_diff_eq!(grid.axis()[4], -PI, epsilon = 1e-15);
        assert!(grid.axis().iter().all(|&k| (-PI..PI).contains(&k)));
        for iy in 0..8 {
            for ix in 0..8 {
                let e = grid.energy(ix, iy);
                assert!((-4.0..=4.0).contains(&e));
                // ω(-k) = ω(k)
                assert_abs_diff_eq!(e, grid.energy((8 - ix) % 8, (8 - iy) % 8), epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn lattice_validation() {
        assert!(LatticeSpec::new(3, 1.0).is_err());
        assert!(LatticeSpec::new(4, 0.0).is_err());
        assert!(LatticeSpec::new(4, f64::NAN).is_err());
        let l = LatticeSpec::new(10, 1.0).unwrap();
        assert_eq!(l.site(l.index(Site::new(3, 7))), Site::new(3, 7));
        assert_eq!(l.neighbors(Site::new(0, 9))[1], Site::new(9, 9));
    }
}
