//! Coupling-point layouts: diagonal coordinates, subradiance, bound-state
//! support and braiding.
//!
//! At the band center excitations only travel along the `(1, 1)` and
//! `(1, -1)` diagonals. Most layout questions are therefore easiest in the
//! diagonal frame `u = x + y`, `v = x - y`, where the two propagation
//! directions are the coordinate axes.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::atoms::{CouplingPoint, GiantAtomSpec, SystemConfig};
use crate::error::{Error, Result};
use crate::lattice::Site;

/// Default number of samples per band-center contour line.
pub const DEFAULT_CONTOUR_SAMPLES: usize = 512;

/// Default relative tolerance for the subradiance test.
pub const DEFAULT_SUBRADIANCE_TOL: f64 = 1e-10;

/// Position in the diagonal frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DiagonalFrame {
    /// `x + y`, the coordinate along the `(1, 1)` diagonal.
    pub plus: i64,
    /// `x - y`, the coordinate along the `(1, -1)` diagonal.
    pub minus: i64,
}

impl DiagonalFrame {
    pub fn from_site(site: Site) -> Self {
        Self { plus: site.x + site.y, minus: site.x - site.y }
    }

    /// Only frames with `plus ≡ minus (mod 2)` correspond to cavities.
    pub fn to_site(self) -> Option<Site> {
        ((self.plus - self.minus).rem_euclid(2) == 0)
            .then(|| Site::new((self.plus + self.minus) / 2, (self.plus - self.minus) / 2))
    }
}

/// Four equal-strength points on the corners of a rectangle whose sides run
/// along the diagonals.
///
/// Side lengths count lattice steps along each diagonal; a layout is
/// subradiant exactly when both are odd, `2n⁺ + 1` and `2n⁻ + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagonalRectangle {
    /// Center in the diagonal frame.
    pub center: DiagonalFrame,
    pub plus_side: i64,
    pub minus_side: i64,
    pub strength: f64,
}

impl DiagonalRectangle {
    /// Rectangle of sides `(2n⁺+1, 2n⁻+1)` centered on a cavity.
    pub fn odd(center: Site, n_plus: i64, n_minus: i64, strength: f64) -> Self {
        Self {
            center: DiagonalFrame::from_site(center),
            plus_side: 2 * n_plus + 1,
            minus_side: 2 * n_minus + 1,
            strength,
        }
    }

    /// Recognises a four-point equal-strength diagonal rectangle.
    pub fn detect(points: &[CouplingPoint]) -> Option<Self> {
        if points.len() != 4 {
            return None;
        }
        let g = points[0].strength;
        if points.iter().any(|p| (p.strength - g).abs() > 1e-12 * g.abs()) {
            return None;
        }
        let frames: BTreeSet<(i64, i64)> =
            points.iter().map(|p| DiagonalFrame::from_site(p.site)).map(|f| (f.plus, f.minus)).collect();
        let plus: BTreeSet<i64> = frames.iter().map(|f| f.0).collect();
        let minus: BTreeSet<i64> = frames.iter().map(|f| f.1).collect();
        if frames.len() != 4 || plus.len() != 2 || minus.len() != 2 {
            return None;
        }
        let (p0, p1) = (*plus.first()?, *plus.last()?);
        let (m0, m1) = (*minus.first()?, *minus.last()?);
        Some(Self {
            center: DiagonalFrame { plus: (p0 + p1) / 2, minus: (m0 + m1) / 2 },
            plus_side: (p1 - p0) / 2,
            minus_side: (m1 - m0) / 2,
            strength: g,
        })
    }

    pub fn is_odd(&self) -> bool {
        self.plus_side % 2 == 1 && self.minus_side % 2 == 1
    }

    /// `(n⁺, n⁻)` for odd rectangles.
    pub fn half_sides(&self) -> Option<(i64, i64)> {
        self.is_odd().then_some(((self.plus_side - 1) / 2, (self.minus_side - 1) / 2))
    }

    pub fn center_site(&self) -> Option<Site> {
        self.center.to_site()
    }

    pub fn points(&self) -> Result<Vec<CouplingPoint>> {
        let mut out = Vec::with_capacity(4);
        for sp in [1, -1] {
            for sm in [1, -1] {
                let frame = DiagonalFrame {
                    plus: self.center.plus + sp * self.plus_side,
                    minus: self.center.minus + sm * self.minus_side,
                };
                let site = frame.to_site().ok_or_else(|| {
                    Error::InvalidParams(format!(
                        "rectangle corners off the lattice sublattice (sides {}, {})",
                        self.plus_side, self.minus_side
                    ))
                })?;
                out.push(CouplingPoint { site, strength: self.strength });
            }
        }
        Ok(out)
    }

    /// Alternating-sign peaks of the bound state, `φ_n` relative to the
    /// atomic amplitude (see [`bic_support`]).
    pub fn peaks(&self, hopping: f64) -> Option<BTreeMap<Site, f64>> {
        let (np, nm) = self.half_sides()?;
        let mut peaks = BTreeMap::new();
        for i in -np..=np {
            for j in -nm..=nm {
                let frame = DiagonalFrame { plus: self.center.plus + 2 * i, minus: self.center.minus + 2 * j };
                let sign = if (i + np + j + nm) % 2 == 0 { 1.0 } else { -1.0 };
                peaks.insert(frame.to_site()?, sign * self.strength / hopping);
            }
        }
        Some(peaks)
    }
}

/// `F(k) = Σ_p g_p e^{-ik·(n_p - n_0)}`, the atom's form factor.
pub fn form_factor(points: &[CouplingPoint], origin: Site, k: [f64; 2]) -> Complex64 {
    points
        .iter()
        .map(|p| {
            let dx = (p.site.x - origin.x) as f64;
            let dy = (p.site.y - origin.y) as f64;
            Complex64::from_polar(p.strength, -(k[0] * dx + k[1] * dy))
        })
        .sum()
}

/// Wave vectors on the band-center contour `kx ± ky = ±π`.
pub fn band_center_contour(samples: usize) -> impl Iterator<Item = [f64; 2]> {
    (0..samples).flat_map(move |i| {
        let t = -PI + 2.0 * PI * (i as f64 + 0.5) / samples as f64;
        [[t, PI - t], [t, -PI - t], [t, t - PI], [t, t + PI]]
    })
}

/// True iff the form factor vanishes on the whole band-center contour, i.e.
/// emission at `ω = 0` cancels in every direction.
///
/// Only the layout matters; the atom's detuning is ignored.
pub fn is_perfectly_subradiant(atom: &GiantAtomSpec, samples: usize, tol: f64) -> bool {
    let points = atom.points();
    let origin = points[0].site;
    let scale: f64 = points.iter().map(|p| p.strength.abs()).sum();
    band_center_contour(samples.max(1)).all(|k| form_factor(points, origin, k).norm() < tol * scale)
}

/// [`is_perfectly_subradiant`] with default sampling and tolerance.
pub fn is_subradiant(atom: &GiantAtomSpec) -> bool {
    if let Some(rect) = DiagonalRectangle::detect(atom.points()) {
        return rect.is_odd();
    }
    is_perfectly_subradiant(atom, DEFAULT_CONTOUR_SAMPLES, DEFAULT_SUBRADIANCE_TOL)
}

/// The photonic part of an atom's bound state in the continuum.
///
/// `peaks[n] = φ_n` solves `H_B φ = -Σ_p g_p |n_p⟩` with `φ` localized, so the
/// unnormalized dressed state is `|e⟩ + Σ_n φ_n |n⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct BicSupport {
    pub peaks: BTreeMap<Site, f64>,
}

impl BicSupport {
    pub fn len(&self) -> usize {
        self.peaks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.peaks.is_empty()
    }

    pub fn contains(&self, site: Site) -> bool {
        self.peaks.contains_key(&site)
    }

    pub fn sign(&self, site: Site) -> Option<i8> {
        self.peaks.get(&site).map(|w| if *w > 0.0 { 1 } else { -1 })
    }

    /// `Σ φ_n²`, which equals `-∂_zΣ(0)`.
    pub fn norm_sqr(&self) -> f64 {
        self.peaks.values().map(|w| w * w).sum()
    }
}

/// Photonic support of the bound state of a perfectly subradiant atom.
///
/// Solved on a twisted torus (`kx` shifted by half a grid step), which has no
/// zero-energy modes, by one forward and one inverse 2D transform. The torus
/// is large enough that the localized solution does not overlap its images.
///
/// Weights are given for unit hopping; use [`bic_support_with_hopping`] for
/// other values of `J`.
pub fn bic_support(atom: &GiantAtomSpec) -> Result<BicSupport> {
    bic_support_with_hopping(atom, 1.0)
}

/// [`bic_support`] for hopping `J` (weights scale as `1/J`).
pub fn bic_support_with_hopping(atom: &GiantAtomSpec, hopping: f64) -> Result<BicSupport> {
    if !is_subradiant(atom) {
        return Err(Error::NotSubradiant);
    }
    let points = atom.points();
    let min_x = points.iter().map(|p| p.site.x).min().unwrap_or(0);
    let max_x = points.iter().map(|p| p.site.x).max().unwrap_or(0);
    let min_y = points.iter().map(|p| p.site.y).min().unwrap_or(0);
    let max_y = points.iter().map(|p| p.site.y).max().unwrap_or(0);
    let extent = ((max_x - min_x).max(max_y - min_y) + 1) as usize;
    let size = (2 * extent + 8).next_power_of_two().max(16);
    let pad = ((size - extent) / 2) as i64;
    let origin = Site::new(min_x - pad, min_y - pad);

    let twist = PI / size as f64;
    let mut grid = vec![Complex64::ZERO; size * size];
    for p in points {
        let x = (p.site.x - origin.x) as usize;
        let y = (p.site.y - origin.y) as usize;
        grid[y * size + x] = Complex64::from_polar(p.strength, -twist * x as f64);
    }

    let mut planner = FftPlanner::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let fft2 = |data: &mut Vec<Complex64>, plan: &std::sync::Arc<dyn rustfft::Fft<f64>>| {
        plan.process(data);
        let mut t = vec![Complex64::ZERO; size * size];
        for r in 0..size {
            for c in 0..size {
                t[c * size + r] = data[r * size + c];
            }
        }
        plan.process(&mut t);
        for r in 0..size {
            for c in 0..size {
                data[c * size + r] = t[r * size + c];
            }
        }
    };

    fft2(&mut grid, &forward);
    for qy in 0..size {
        let cy = (2.0 * PI * qy as f64 / size as f64).cos();
        for qx in 0..size {
            let cx = (2.0 * PI * qx as f64 / size as f64 + twist).cos();
            grid[qy * size + qx] /= 2.0 * hopping * (cx + cy);
        }
    }
    fft2(&mut grid, &inverse);

    let norm = 1.0 / (size * size) as f64;
    let scale = points.iter().map(|p| p.strength.abs()).fold(0.0, f64::max) / hopping;
    let mut peaks = BTreeMap::new();
    for y in 0..size {
        for x in 0..size {
            let phi = grid[y * size + x] * Complex64::from_polar(norm, twist * x as f64);
            if phi.norm() > 1e-9 * scale {
                peaks.insert(Site::new(origin.x + x as i64, origin.y + y as i64), phi.re);
            }
        }
    }
    Ok(BicSupport { peaks })
}

/// Splits an eight-point equal-strength atom into two odd diagonal rectangles.
pub fn split_into_rectangles(atom: &GiantAtomSpec) -> Option<(DiagonalRectangle, DiagonalRectangle)> {
    let points = atom.points();
    if points.len() != 8 {
        return None;
    }
    // point 0 always goes in the first subset
    for a in 1..8 {
        for b in (a + 1)..8 {
            for c in (b + 1)..8 {
                let first: Vec<CouplingPoint> = [0, a, b, c].iter().map(|&i| points[i]).collect();
                let second: Vec<CouplingPoint> =
                    (0..8).filter(|i| ![0, a, b, c].contains(i)).map(|i| points[i]).collect();
                if let (Some(r1), Some(r2)) = (DiagonalRectangle::detect(&first), DiagonalRectangle::detect(&second)) {
                    if r1.is_odd() && r2.is_odd() && (r1.strength - r2.strength).abs() <= 1e-12 * r1.strength.abs() {
                        return Some((r1, r2));
                    }
                }
            }
        }
    }
    None
}

/// Pairs of atoms that interact without decoherence.
///
/// `(i, j)` is reported when each atom has at least one coupling point on the
/// other's bound-state support, but neither has all of its points there.
/// Pairs are ordered `i < j`.
pub fn dfi_pairs(config: &SystemConfig) -> Result<Vec<(usize, usize)>> {
    let supports = config
        .atoms()
        .iter()
        .map(|a| {
            if a.detuning() != 0.0 {
                return Err(Error::NonZeroDetuning(a.detuning()));
            }
            bic_support(a)
        })
        .collect::<Result<Vec<_>>>()?;
    let inside = |i: usize, j: usize| config.atoms()[i].sites().filter(|s| supports[j].contains(*s)).count();
    let mut pairs = Vec::new();
    for i in 0..config.num_atoms() {
        for j in (i + 1)..config.num_atoms() {
            let (ij, ji) = (inside(i, j), inside(j, i));
            let all_i = ij == config.atoms()[i].num_points();
            let all_j = ji == config.atoms()[j].num_points();
            if ij > 0 && ji > 0 && !all_i && !all_j {
                pairs.push((i, j));
            }
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rect_atom(center: Site, np: i64, nm: i64, g: f64) -> GiantAtomSpec {
        GiantAtomSpec::new(0.0, DiagonalRectangle::odd(center, np, nm, g).points().unwrap()).unwrap()
    }

    #[test]
    fn diagonal_frame_round_trip() {
        for x in -5..5 {
            for y in -5..5 {
                let s = Site::new(x, y);
                assert_eq!(DiagonalFrame::from_site(s).to_site(), Some(s));
            }
        }
        assert_eq!(DiagonalFrame { plus: 1, minus: 0 }.to_site(), None);
    }

    #[test]
    fn rectangle_corners_and_detection() {
        let r = DiagonalRectangle::odd(Site::new(0, 0), 0, 0, 0.1);
        let sites: BTreeSet<Site> = r.points().unwrap().iter().map(|p| p.site).collect();
        let expected: BTreeSet<Site> = [Site::new(1, 0), Site::new(-1, 0), Site::new(0, 1), Site::new(0, -1)].into();
        assert_eq!(sites, expected);

        let r3 = DiagonalRectangle::odd(Site::new(2, 1), 1, 0, 0.1);
        let pts = r3.points().unwrap();
        let sites: BTreeSet<Site> = pts.iter().map(|p| p.site).collect();
        let expected: BTreeSet<Site> = [Site::new(4, 2), Site::new(3, 3), Site::new(1, -1), Site::new(0, 0)].into();
        assert_eq!(sites, expected);
        assert_eq!(DiagonalRectangle::detect(&pts), Some(r3));
        assert_eq!(r3.half_sides(), Some((1, 0)));
    }

    #[test]
    fn odd_separations_are_subradiant() {
        let atom = rect_atom(Site::new(10, 10), 1, 0, 0.2);
        assert!(is_perfectly_subradiant(&atom, 512, 1e-10));
        assert!(is_subradiant(&atom));
    }

    #[test]
    fn even_separation_is_not_subradiant() {
        let rect = DiagonalRectangle {
            center: DiagonalFrame { plus: 20, minus: 1 },
            plus_side: 2,
            minus_side: 1,
            strength: 0.2,
        };
        let atom = GiantAtomSpec::new(0.0, rect.points().unwrap()).unwrap();
        assert!(!is_perfectly_subradiant(&atom, 512, 1e-10));
        assert!(!is_subradiant(&atom));
    }

    #[test]
    fn single_peak_support() {
        let atom = rect_atom(Site::new(5, 5), 0, 0, 0.1);
        let support = bic_support(&atom).unwrap();
        assert_eq!(support.len(), 1);
        assert!((support.peaks[&Site::new(5, 5)] - 0.1).abs() < 1e-12);
    }

    #[test]
    fn three_peak_support_alternates() {
        let atom = rect_atom(Site::new(0, 0), 1, 0, 0.1);
        let support = bic_support(&atom).unwrap();
        assert_eq!(support.len(), 3);
        assert_eq!(support.sign(Site::new(1, 1)), Some(1));
        assert_eq!(support.sign(Site::new(0, 0)), Some(-1));
        assert_eq!(support.sign(Site::new(-1, -1)), Some(1));
        for w in support.peaks.values() {
            assert!((w.abs() - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn fft_support_matches_rectangle_rule() {
        for np in 0..4 {
            for nm in 0..3 {
                let rect = DiagonalRectangle::odd(Site::new(3, -2), np, nm, 0.17);
                let atom = GiantAtomSpec::new(0.0, rect.points().unwrap()).unwrap();
                let fft = bic_support_with_hopping(&atom, 1.3).unwrap();
                let rule = rect.peaks(1.3).unwrap();
                assert_eq!(fft.len() as i64, (2 * np + 1) * (2 * nm + 1));
                for (site, w) in &rule {
                    assert!((fft.peaks[site] - w).abs() < 1e-12, "{site}");
                }
            }
        }
    }

    #[test]
    fn non_subradiant_support_is_an_error() {
        let atom = GiantAtomSpec::new(0.0, vec![CouplingPoint::new(0, 0, 0.1)]).unwrap();
        assert!(matches!(bic_support(&atom), Err(Error::NotSubradiant)));
    }

    #[test]
    fn eight_point_split() {
        let a = DiagonalRectangle::odd(Site::new(0, 0), 1, 0, 0.2);
        let b = DiagonalRectangle::odd(Site::new(0, 0), 0, 1, 0.2);
        let mut pts = a.points().unwrap();
        pts.extend(b.points().unwrap());
        pts.swap(1, 6);
        let atom = GiantAtomSpec::new(0.0, pts).unwrap();
        let (r1, r2) = split_into_rectangles(&atom).unwrap();
        let halves: BTreeSet<(i64, i64)> = [r1, r2].iter().map(|r| (r.plus_side, r.minus_side)).collect();
        assert_eq!(halves, [(3, 1), (1, 3)].into());
    }
}
