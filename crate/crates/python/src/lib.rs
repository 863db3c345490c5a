use std::collections::BTreeMap;

use engine::config::RunConfig;
use engine::evolver::{self, EvolutionParams, InitialKind, SplitStepper};
use engine::{
    geometry, oracle, presets, spectral, CouplingPoint, Error, GiantAtomSpec, LatticeSpec, SystemConfig, SystemState,
};
use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

/// `(detuning, [(x, y, g), ...])`
type AtomTuple = (f64, Vec<(i64, i64, f64)>);
type FieldMap<T> = BTreeMap<(i64, i64), T>;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for engine::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Lattice, hopping and giant atoms.
#[pyclass(name = "System", module = "ga2d", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySystem {
    inner: SystemConfig,
}

#[pymethods]
impl PySystem {
    /// `atoms` is a list of `(detuning, [(x, y, g), ...])`.
    #[new]
    #[pyo3(signature = (size, atoms, hopping = 1.0))]
    fn new(size: usize, atoms: Vec<AtomTuple>, hopping: f64) -> PyResult<Self> {
        let lattice = LatticeSpec::new(size, hopping).py()?;
        let specs = atoms
            .into_iter()
            .map(|(detuning, pts)| {
                GiantAtomSpec::new(detuning, pts.into_iter().map(|(x, y, g)| CouplingPoint::new(x, y, g)).collect())
            })
            .collect::<engine::Result<Vec<_>>>()
            .py()?;
        Ok(Self { inner: SystemConfig::new(lattice, specs).py()? })
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self { inner: presets::preset(name).py()? })
    }

    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self { inner: RunConfig::from_toml_str(text).and_then(|r| r.system()).py()? })
    }

    fn resized(&self, size: usize) -> PyResult<Self> {
        Ok(Self { inner: self.inner.resized(size).py()? })
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.lattice().size()
    }

    #[getter]
    fn hopping(&self) -> f64 {
        self.inner.lattice().hopping()
    }

    #[getter]
    fn num_atoms(&self) -> usize {
        self.inner.num_atoms()
    }

    fn atom_points(&self, atom: usize) -> PyResult<Vec<(i64, i64, f64)>> {
        let a = self.inner.atom(atom).py()?;
        Ok(a.points().iter().map(|p| (p.site.x, p.site.y, p.strength)).collect())
    }

    fn wrap_time(&self) -> f64 {
        evolver::wrap_time(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("System(size={}, hopping={}, atoms={})", self.size(), self.hopping(), self.num_atoms())
    }
}

/// Atom amplitudes and the cavity field, row-major in `y`.
#[pyclass(name = "State", module = "ga2d", skip_from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: SystemState,
}

#[pymethods]
impl PyState {
    #[new]
    fn new(atoms: Vec<Complex64>, field: Vec<Complex64>) -> Self {
        Self { inner: SystemState { atoms, field } }
    }

    #[staticmethod]
    fn bare(system: &PySystem, atom: usize) -> PyResult<Self> {
        Ok(Self { inner: evolver::initial_state(&system.inner, InitialKind::BareExcited(atom)).py()? })
    }

    #[staticmethod]
    fn dressed(system: &PySystem, atom: usize) -> PyResult<Self> {
        Ok(Self { inner: evolver::initial_state(&system.inner, InitialKind::Dressed(atom)).py()? })
    }

    #[getter]
    fn atoms(&self) -> Vec<Complex64> {
        self.inner.atoms.clone()
    }

    #[getter]
    fn field(&self) -> Vec<Complex64> {
        self.inner.field.clone()
    }

    fn norm(&self) -> f64 {
        self.inner.norm()
    }

    fn atom_population(&self, atom: usize) -> PyResult<f64> {
        if atom >= self.inner.atoms.len() {
            return Err(PyValueError::new_err(format!("atom index {atom} out of range")));
        }
        Ok(self.inner.atom_population(atom))
    }

    fn max_abs_diff(&self, other: &PyState) -> f64 {
        self.inner.max_abs_diff(&other.inner)
    }
}

/// Recorded observables of a run.
#[pyclass(name = "Evolution", module = "ga2d", frozen, get_all)]
struct PyEvolution {
    times: Vec<f64>,
    atom_populations: Vec<Vec<f64>>,
    regions: BTreeMap<String, Vec<f64>>,
    bath_norm: Vec<f64>,
    snapshots: Vec<(f64, Vec<f64>)>,
    wrap_time: f64,
    wrap_warning: Option<String>,
    final_state: PyState,
}

#[pyfunction]
#[pyo3(signature = (system, state, dt, t_max, record_stride = 10, snapshot_times = Vec::new()))]
fn evolve(
    py: Python<'_>,
    system: &PySystem,
    state: &PyState,
    dt: f64,
    t_max: f64,
    record_stride: usize,
    snapshot_times: Vec<f64>,
) -> PyResult<PyEvolution> {
    let params = EvolutionParams::new(dt, t_max, record_stride).with_snapshots(snapshot_times);
    let run = py.detach(|| engine::evolve(&system.inner, &state.inner, &params)).py()?;
    let series = run.series;
    Ok(PyEvolution {
        regions: series.region_names.into_iter().zip(series.region_populations).collect(),
        times: series.times,
        atom_populations: series.atom_populations,
        bath_norm: series.bath_norm,
        snapshots: run.snapshots.into_iter().map(|s| (s.t, s.grid)).collect(),
        wrap_time: run.diagnostics.wrap_time,
        wrap_warning: run.diagnostics.wrap_warning,
        final_state: PyState { inner: run.final_state },
    })
}

/// Advances `state` by `steps` split-operator steps.
#[pyfunction]
fn step(py: Python<'_>, system: &PySystem, state: &PyState, dt: f64, steps: usize) -> PyResult<PyState> {
    let mut w = state.inner.clone();
    py.detach(|| SplitStepper::new(&system.inner, dt).run(&mut w, steps)).py()?;
    Ok(PyState { inner: w })
}

/// Exact-diagonalization reference at each of `times`.
#[pyfunction]
fn exact_evolve(py: Python<'_>, system: &PySystem, state: &PyState, times: Vec<f64>) -> PyResult<Vec<PyState>> {
    let out = py.detach(|| oracle::exact_evolve(&system.inner, &state.inner, &times)).py()?;
    Ok(out.into_iter().map(|inner| PyState { inner }).collect())
}

fn atom_of(system: &PySystem, atom: usize) -> PyResult<&GiantAtomSpec> {
    system.inner.atom(atom).py()
}

#[pyfunction]
#[pyo3(signature = (system, atom, z, grid_size = spectral::DEFAULT_GRID))]
fn self_energy(system: &PySystem, atom: usize, z: Complex64, grid_size: usize) -> PyResult<Complex64> {
    let a = atom_of(system, atom)?;
    spectral::self_energy(a, a, z, grid_size, system.hopping()).py()
}

/// `-dΣ/dz` at the band center.
#[pyfunction]
fn band_center_slope(system: &PySystem, atom: usize) -> PyResult<f64> {
    spectral::band_center_slope(atom_of(system, atom)?, system.hopping()).py()
}

#[pyfunction]
fn steady_state_population(system: &PySystem, atom: usize) -> PyResult<f64> {
    spectral::steady_state_population(atom_of(system, atom)?, system.hopping()).py()
}

#[pyfunction]
fn is_subradiant(system: &PySystem, atom: usize) -> PyResult<bool> {
    Ok(geometry::is_perfectly_subradiant(
        atom_of(system, atom)?,
        geometry::DEFAULT_CONTOUR_SAMPLES,
        geometry::DEFAULT_SUBRADIANCE_TOL,
    ))
}

/// Field of the bound state as `{(x, y): amplitude}`, atom amplitude 1.
#[pyfunction]
fn bic_support(system: &PySystem, atom: usize) -> PyResult<FieldMap<f64>> {
    let support = geometry::bic_support_with_hopping(atom_of(system, atom)?, system.hopping()).py()?;
    Ok(support.peaks.into_iter().map(|(s, w)| ((s.x, s.y), w)).collect())
}

/// Normalized dressed state as `(atom_amplitude, {(x, y): amplitude})`.
#[pyfunction]
fn dressed_state(system: &PySystem, atom: usize) -> PyResult<(Complex64, FieldMap<Complex64>)> {
    let d = spectral::dressed_state(atom_of(system, atom)?, system.hopping()).py()?;
    Ok((d.atom_weight, d.bic_weights.into_iter().map(|(s, w)| ((s.x, s.y), w)).collect()))
}

#[pyfunction]
fn dfi_pairs(system: &PySystem) -> PyResult<Vec<(usize, usize)>> {
    geometry::dfi_pairs(&system.inner).py()
}

#[pyfunction]
fn buildup_time(n_plus: i64, n_minus: i64, hopping: f64) -> f64 {
    spectral::buildup_time(n_plus, n_minus, hopping)
}

/// Fits `A cos²(z_R (t - t0)) e^{-2 z_I t}` to samples with `t >= fit_start`.
#[pyfunction]
fn fit_rabi(times: Vec<f64>, values: Vec<f64>, fit_start: f64) -> PyResult<BTreeMap<&'static str, f64>> {
    let fit = spectral::fit_rabi_samples(&times, &values, fit_start).py()?;
    Ok(BTreeMap::from([
        ("z_r", fit.z_r),
        ("z_i", fit.z_i),
        ("t0", fit.t0),
        ("amplitude", fit.amplitude),
        ("residual", fit.residual),
        ("period", fit.period()),
    ]))
}

#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    presets::PRESET_NAMES.to_vec()
}

#[pymodule]
fn ga2d(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyState>()?;
    m.add_class::<PyEvolution>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(exact_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(self_energy, m)?)?;
    m.add_function(wrap_pyfunction!(band_center_slope, m)?)?;
    m.add_function(wrap_pyfunction!(steady_state_population, m)?)?;
    m.add_function(wrap_pyfunction!(is_subradiant, m)?)?;
    m.add_function(wrap_pyfunction!(bic_support, m)?)?;
    m.add_function(wrap_pyfunction!(dressed_state, m)?)?;
    m.add_function(wrap_pyfunction!(dfi_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(buildup_time, m)?)?;
    m.add_function(wrap_pyfunction!(fit_rabi, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    Ok(())
}
