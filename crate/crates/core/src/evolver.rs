//! Second-order split-operator time evolution and observable recording.
//!
//! One Strang step is `U_A(Δt/2) U_B(Δt) U_A(Δt/2)`. Between consecutive
//! steps the two half steps are fused into one `U_A(Δt)`, so a run of `n`
//! steps is `U_A(Δt/2) [U_B U_A(Δt)]^{n-1} U_B U_A(Δt/2)`. Observables are
//! read from a copy that receives the closing half step.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::atom_kernel::AtomPropagator;
use crate::atoms::SystemConfig;
use crate::bath::BathPropagator;
use crate::error::{Error, Result};
use crate::geometry;
use crate::lattice::{max_group_speed, Site};
use crate::spectral;
use crate::state::SystemState;

/// Default time step in units of `1/J`.
pub const DEFAULT_DT: f64 = 0.01;

/// Largest accepted `Δt·J`.
pub const MAX_DT_J: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolutionParams {
    pub dt: f64,
    pub t_max: f64,
    pub record_stride: usize,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
}

impl EvolutionParams {
    pub fn new(dt: f64, t_max: f64, record_stride: usize) -> Self {
        Self { dt, t_max, record_stride, snapshot_times: Vec::new() }
    }

    pub fn with_snapshots(mut self, times: Vec<f64>) -> Self {
        self.snapshot_times = times;
        self
    }

    pub fn validate(&self, hopping: f64) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::InvalidParams(format!("dt = {} must be positive", self.dt)));
        }
        if self.dt * hopping > MAX_DT_J * (1.0 + 1e-12) {
            return Err(Error::InvalidParams(format!(
                "dt*J = {} exceeds the accuracy limit {MAX_DT_J}",
                self.dt * hopping
            )));
        }
        if !(self.t_max.is_finite() && self.t_max >= self.dt) {
            return Err(Error::InvalidParams(format!("t_max = {} must be at least dt", self.t_max)));
        }
        if self.record_stride == 0 {
            return Err(Error::InvalidParams("record_stride must be positive".into()));
        }
        if let Some(t) = self.snapshot_times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(Error::InvalidParams(format!("snapshot time {t} is invalid")));
        }
        Ok(())
    }

    pub fn num_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }
}

/// A named set of cavities whose summed population is tracked.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    pub name: String,
    pub sites: Vec<Site>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeries {
    pub times: Vec<f64>,
    /// `atom_populations[i][s]` is `|C_i|²` at sample `s`.
    pub atom_populations: Vec<Vec<f64>>,
    pub region_names: Vec<String>,
    pub region_populations: Vec<Vec<f64>>,
    pub bath_norm: Vec<f64>,
}

impl TimeSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn region(&self, name: &str) -> Option<&[f64]> {
        self.region_names.iter().position(|n| n == name).map(|i| self.region_populations[i].as_slice())
    }

    /// Total norm at one sample.
    pub fn total_norm(&self, sample: usize) -> f64 {
        self.atom_populations.iter().map(|p| p[sample]).sum::<f64>() + self.bath_norm[sample]
    }
}

/// `|ψ_n|²` over the whole lattice at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub size: usize,
    /// Row-major, rows indexed by `y`.
    pub grid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub wrap_time: f64,
    pub steps: usize,
    pub wrap_warning: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Evolution {
    pub series: TimeSeries,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Diagnostics,
    pub final_state: SystemState,
}

/// Earliest time a wavefront from a centered source can reach the lattice
/// edge and wrap around, `N / (2 v_max)` with `v_max = 2√2 J`.
pub fn wrap_time(config: &SystemConfig) -> f64 {
    let lattice = config.lattice();
    lattice.size() as f64 / (2.0 * max_group_speed(lattice.hopping()))
}

/// Strang-split stepper for a fixed configuration and step. Negative steps
/// run the dynamics backwards.
pub struct SplitStepper {
    bath: BathPropagator,
    full: AtomPropagator,
    half: AtomPropagator,
}

impl SplitStepper {
    pub fn new(config: &SystemConfig, dt: f64) -> Self {
        Self {
            bath: BathPropagator::new(config.lattice(), dt),
            full: AtomPropagator::new(config, dt),
            half: AtomPropagator::new(config, 0.5 * dt),
        }
    }

    /// Applies `steps` Strang steps in place.
    pub fn run(&mut self, state: &mut SystemState, steps: usize) -> Result<()> {
        if steps == 0 {
            return Ok(());
        }
        self.half.apply(state)?;
        for m in 1..=steps {
            self.bath.apply(state)?;
            if m < steps {
                self.full.apply(state)?;
            }
        }
        self.half.apply(state)
    }
}

pub enum InitialKind {
    BareExcited(usize),
    Dressed(usize),
    Custom { atoms: Vec<Complex64>, field: Vec<Complex64> },
}

pub fn initial_state(config: &SystemConfig, kind: InitialKind) -> Result<SystemState> {
    let lattice = config.lattice();
    let mut state = SystemState::zeros(config.num_atoms(), lattice.num_cavities());
    match kind {
        InitialKind::BareExcited(i) => {
            config.atom(i)?;
            state.atoms[i] = Complex64::ONE;
        }
        InitialKind::Dressed(i) => {
            let dressed = spectral::dressed_state(config.atom(i)?, lattice.hopping())?;
            state.atoms[i] = dressed.atom_weight;
            for (&site, &w) in &dressed.bic_weights {
                if !lattice.contains(site) {
                    return Err(Error::InvalidState(format!("dressed-state peak {site} is off the lattice")));
                }
                state.field[lattice.index(site)] = w;
            }
        }
        InitialKind::Custom { atoms, field } => {
            state = SystemState { atoms, field };
            state.check_dims(config.num_atoms(), lattice.num_cavities())?;
        }
    }
    state.normalized()
}

/// One `bic_<i>` region per atom that has a bound state in the continuum.
pub fn default_regions(config: &SystemConfig) -> Vec<Region> {
    config
        .atoms()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.detuning() == 0.0)
        .filter_map(|(i, a)| {
            let support = geometry::bic_support(a).ok()?;
            let sites = support.peaks.keys().copied().filter(|s| config.lattice().contains(*s)).collect();
            Some(Region { name: format!("bic_{i}"), sites })
        })
        .collect()
}

/// Evolves with the default BIC regions.
pub fn evolve(config: &SystemConfig, initial: &SystemState, params: &EvolutionParams) -> Result<Evolution> {
    evolve_with_regions(config, initial, params, &default_regions(config))
}

pub fn evolve_with_regions(
    config: &SystemConfig,
    initial: &SystemState,
    params: &EvolutionParams,
    regions: &[Region],
) -> Result<Evolution> {
    let lattice = config.lattice();
    params.validate(lattice.hopping())?;
    initial.check_dims(config.num_atoms(), lattice.num_cavities())?;
    let region_indices: Vec<Vec<usize>> = regions
        .iter()
        .map(|r| {
            r.sites
                .iter()
                .map(|&s| {
                    if lattice.contains(s) {
                        Ok(lattice.index(s))
                    } else {
                        Err(Error::InvalidParams(format!("region {} has off-lattice site {s}", r.name)))
                    }
                })
                .collect()
        })
        .collect::<Result<_>>()?;

    let steps = params.num_steps().max(1);
    let dt = params.dt;
    let snapshot_steps: Vec<usize> =
        params.snapshot_times.iter().map(|t| ((t / dt).round() as usize).min(steps)).collect();

    let mut series = TimeSeries {
        atom_populations: vec![Vec::new(); config.num_atoms()],
        region_names: regions.iter().map(|r| r.name.clone()).collect(),
        region_populations: vec![Vec::new(); regions.len()],
        ..Default::default()
    };
    let mut snapshots: Vec<Option<Snapshot>> = vec![None; snapshot_steps.len()];

    let mut observe = |step: usize, state: &SystemState| {
        let t = step as f64 * dt;
        if step.is_multiple_of(params.record_stride) || step == steps {
            series.times.push(t);
            for (pops, amp) in series.atom_populations.iter_mut().zip(&state.atoms) {
                pops.push(amp.norm_sqr());
            }
            for (pops, idx) in series.region_populations.iter_mut().zip(&region_indices) {
                pops.push(idx.iter().map(|&n| state.field[n].norm_sqr()).sum());
            }
            series.bath_norm.push(state.field_norm_sqr());
        }
        for (slot, &s) in snapshots.iter_mut().zip(&snapshot_steps) {
            if s == step {
                *slot = Some(Snapshot {
                    t,
                    size: lattice.size(),
                    grid: state.field.iter().map(|a| a.norm_sqr()).collect(),
                });
            }
        }
    };

    let mut bath = BathPropagator::new(lattice, dt);
    let full = AtomPropagator::new(config, dt);
    let half = AtomPropagator::new(config, 0.5 * dt);

    observe(0, initial);
    let mut w = initial.clone();
    half.apply(&mut w)?;
    let mut final_state = None;
    for m in 1..=steps {
        bath.apply(&mut w)?;
        let wanted = m % params.record_stride == 0 || snapshot_steps.contains(&m);
        if m == steps {
            half.apply(&mut w)?;
            observe(m, &w);
            final_state = Some(std::mem::take(&mut w));
            break;
        }
        if wanted {
            let mut synced = w.clone();
            half.apply(&mut synced)?;
            observe(m, &synced);
        }
        full.apply(&mut w)?;
    }

    let wrap = wrap_time(config);
    let t_end = steps as f64 * dt;
    let wrap_warning = (t_end > wrap).then(|| {
        format!("t_max = {t_end:.3} exceeds the wrap-around time {wrap:.3}; late-time dynamics may include finite-size revivals")
    });
    Ok(Evolution {
        series,
        snapshots: snapshots.into_iter().flatten().collect(),
        diagnostics: Diagnostics { wrap_time: wrap, steps, wrap_warning },
        final_state: final_state.expect("at least one step"),
    })
}
