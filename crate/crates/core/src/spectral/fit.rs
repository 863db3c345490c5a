//! Fits of damped population exchange `A cos²(z_R (t - t₀)) e^{-2 z_I t}`.

use std::f64::consts::PI;

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::{storage::Owned, DVector, Dyn, OMatrix, OVector, U4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atoms::SystemConfig;
use crate::error::{Error, Result};
use crate::evolver::TimeSeries;
use crate::geometry::{self, DiagonalRectangle};

use super::buildup_time;

const MIN_SAMPLES: usize = 8;

/// Result of [`fit_rabi`].
///
/// A fit that did not converge has `converged == false` and an infinite
/// residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RabiFit {
    pub z_r: f64,
    pub z_i: f64,
    pub t0: f64,
    pub amplitude: f64,
    pub fit_start: f64,
    /// Root-mean-square deviation of the model from the samples.
    pub residual: f64,
    pub converged: bool,
}

impl RabiFit {
    /// Period of the population exchange, `π / z_R`.
    pub fn period(&self) -> f64 {
        PI / self.z_r
    }
}

struct Model<'a> {
    t: &'a [f64],
    y: &'a [f64],
    p: OVector<f64, U4>,
}

impl Model<'_> {
    fn eval(&self, t: f64) -> f64 {
        let [a, zr, t0, zi] = [self.p[0], self.p[1], self.p[2], self.p[3]];
        a * (zr * (t - t0)).cos().powi(2) * (-2.0 * zi * t).exp()
    }
}

impl LeastSquaresProblem<f64, Dyn, U4> for Model<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, U4>;
    type ParameterStorage = Owned<f64, U4>;

    fn set_params(&mut self, p: &OVector<f64, U4>) {
        self.p.copy_from(p);
    }

    fn params(&self) -> OVector<f64, U4> {
        self.p
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        Some(DVector::from_iterator(self.t.len(), self.t.iter().zip(self.y).map(|(&t, &y)| self.eval(t) - y)))
    }

    fn jacobian(&self) -> Option<OMatrix<f64, Dyn, U4>> {
        let [a, zr, t0, zi] = [self.p[0], self.p[1], self.p[2], self.p[3]];
        let mut j = OMatrix::<f64, Dyn, U4>::zeros(self.t.len());
        for (r, &t) in self.t.iter().enumerate() {
            let phase = zr * (t - t0);
            let c2 = phase.cos().powi(2);
            let s2 = (2.0 * phase).sin();
            let e = (-2.0 * zi * t).exp();
            j[(r, 0)] = c2 * e;
            j[(r, 1)] = -a * e * s2 * (t - t0);
            j[(r, 2)] = a * e * s2 * zr;
            j[(r, 3)] = -2.0 * t * a * c2 * e;
        }
        Some(j)
    }
}

/// Frequency and phase of the strongest periodogram component.
fn dominant_component(t: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let span = t[t.len() - 1] - t[0];
    let step = span / (t.len() - 1) as f64;
    let df = 2.0 * PI / span / 8.0;
    let nyquist = PI / step;
    let spectrum =
        |w: f64| -> Complex64 { t.iter().zip(y).map(|(&t, &y)| Complex64::from_polar(y - mean, -w * t)).sum() };
    let mut best = (0.0, 0.0);
    let mut w = df;
    while w < nyquist {
        let p = spectrum(w).norm_sqr();
        if p > best.1 {
            best = (w, p);
        }
        w += df;
    }
    (best.1 > 0.0).then(|| (best.0, spectrum(best.0).arg()))
}

/// Fits `A cos²(z_R (t - t₀)) e^{-2 z_I t}` to samples with `t ≥ fit_start`.
pub fn fit_rabi_samples(times: &[f64], values: &[f64], fit_start: f64) -> Result<RabiFit> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch { expected: times.len(), found: values.len() });
    }
    let (t, y): (Vec<f64>, Vec<f64>) =
        times.iter().zip(values).filter(|(t, _)| **t >= fit_start).map(|(t, y)| (*t, *y)).unzip();
    if t.len() < MIN_SAMPLES {
        return Err(Error::FitFailed(format!("{} samples after t = {fit_start}; need {MIN_SAMPLES}", t.len())));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let spread = y.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max);
    if spread <= 1e-12 * mean.abs().max(1e-300) {
        return Ok(RabiFit {
            z_r: 0.0,
            z_i: 0.0,
            t0: 0.0,
            amplitude: mean,
            fit_start,
            residual: spread,
            converged: true,
        });
    }

    let (w, phase) = dominant_component(&t, &y).ok_or_else(|| Error::FitFailed("no oscillating component".into()))?;
    let start = OVector::<f64, U4>::new(2.0 * mean, w / 2.0, -phase / w, 0.0);
    let (model, report) = LevenbergMarquardt::new().minimize(Model { t: &t, y: &y, p: start });

    let p = model.p;
    let rms = model.residuals().map(|r| (r.norm_squared() / t.len() as f64).sqrt()).unwrap_or(f64::INFINITY);
    let converged = report.termination.was_successful() && rms.is_finite();
    Ok(RabiFit {
        z_r: p[1].abs(),
        // decay estimates that come out slightly negative are clamped
        z_i: p[3].max(0.0),
        t0: p[2],
        amplitude: p[0],
        fit_start,
        residual: if converged { rms } else { f64::INFINITY },
        converged,
    })
}

/// Fits the population of one atom from `fit_start` on.
pub fn fit_rabi(series: &TimeSeries, atom_index: usize, fit_start: f64) -> Result<RabiFit> {
    let pops = series
        .atom_populations
        .get(atom_index)
        .ok_or(Error::AtomIndex { index: atom_index, count: series.atom_populations.len() })?;
    fit_rabi_samples(&series.times, pops, fit_start)
}

/// Buildup time of one atom: the largest light-crossing time of its
/// rectangular subsets, or zero when it has none.
pub fn default_fit_start(config: &SystemConfig, atom_index: usize) -> Result<f64> {
    let atom = config.atom(atom_index)?;
    let hopping = config.lattice().hopping();
    let rects: Vec<DiagonalRectangle> = match DiagonalRectangle::detect(atom.points()) {
        Some(r) => vec![r],
        None => geometry::split_into_rectangles(atom).map(|(a, b)| vec![a, b]).unwrap_or_default(),
    };
    Ok(rects.iter().filter_map(|r| r.half_sides()).map(|(np, nm)| buildup_time(np, nm, hopping)).fold(0.0, f64::max))
}
