//! Python bindings: slab geometry, spin configurations, the coarsening
//! dynamics, stability certificates, the column projection, and bootstrap
//! percolation, driven in-process from Python.
//!
//! Build the extension with `cargo build -p slabsim-py --release`; the
//! resulting `libslabsim_py.so` imports as the module `slabsim_py` once
//! renamed/copied onto `sys.path` (see `python/smoke_test.py`).

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use slabsim::bootstrap;
use slabsim::certify as cert;
use slabsim::config::SpinConfig;
use slabsim::dynamics::{self, replica_rng, DynamicsState, StopRule};
use slabsim::initial::{self, ConstructionKind};
use slabsim::lattice::{Site, SlabGeometry, VerticalBc};
use slabsim::tau;

fn err(e: slabsim::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn site(t: (usize, usize, usize)) -> Site {
    Site::new(t.0, t.1, t.2)
}

/// Slab geometry: thickness k, even torus side L, and the vertical boundary
/// condition ("free" or "periodic").
#[pyclass(name = "Geometry", skip_from_py_object)]
#[derive(Clone)]
struct PyGeometry {
    inner: SlabGeometry,
}

#[pymethods]
impl PyGeometry {
    #[new]
    #[pyo3(signature = (k, side, bc="free"))]
    fn new(k: usize, side: usize, bc: &str) -> PyResult<Self> {
        let bc = VerticalBc::parse(bc).map_err(err)?;
        Ok(PyGeometry { inner: SlabGeometry::new(k, side, bc).map_err(err)? })
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn side(&self) -> usize {
        self.inner.side()
    }

    #[getter]
    fn bc(&self) -> &'static str {
        self.inner.vertical_bc().as_str()
    }

    fn site_count(&self) -> usize {
        self.inner.site_count()
    }

    fn degree(&self, v: (usize, usize, usize)) -> PyResult<usize> {
        self.inner.degree(site(v)).map_err(err)
    }

    /// Neighbor multiset of a site; a doubled edge lists its partner twice.
    fn neighbors(&self, v: (usize, usize, usize)) -> PyResult<Vec<(usize, usize, usize)>> {
        Ok(self
            .inner
            .neighbors(site(v))
            .map_err(err)?
            .into_iter()
            .map(|w| (w.x, w.y, w.z))
            .collect())
    }

    fn __repr__(&self) -> String {
        format!(
            "Geometry(k={}, side={}, bc='{}')",
            self.inner.k(),
            self.inner.side(),
            self.inner.vertical_bc().as_str()
        )
    }
}

/// A full spin assignment in {-1, +1} on the slab.
#[pyclass(name = "Config", skip_from_py_object)]
#[derive(Clone)]
struct PyConfig {
    inner: SpinConfig,
}

#[pymethods]
impl PyConfig {
    /// Constant configuration.
    #[staticmethod]
    #[pyo3(signature = (geometry, spin=1))]
    fn constant(geometry: &PyGeometry, spin: i8) -> PyResult<Self> {
        Ok(PyConfig { inner: SpinConfig::constant(geometry.inner, spin).map_err(err)? })
    }

    /// I.i.d. sample with P(+1) = p on ChaCha stream `stream` of `seed`.
    #[staticmethod]
    #[pyo3(signature = (geometry, p, seed, stream=0))]
    fn product(geometry: &PyGeometry, p: f64, seed: u64, stream: u64) -> PyResult<Self> {
        let mut rng = replica_rng(seed, stream);
        Ok(PyConfig { inner: initial::sample_product(geometry.inner, p, &mut rng).map_err(err)? })
    }

    /// Parse the slab snapshot text format; returns (config, time).
    #[staticmethod]
    fn from_snapshot(text: &str) -> PyResult<(Self, f64)> {
        let (inner, t) = SpinConfig::parse_snapshot(text).map_err(err)?;
        Ok((PyConfig { inner }, t))
    }

    #[pyo3(signature = (t=0.0))]
    fn snapshot(&self, t: f64) -> String {
        self.inner.write_snapshot(t)
    }

    #[getter]
    fn geometry(&self) -> PyGeometry {
        PyGeometry { inner: *self.inner.geometry() }
    }

    fn get(&self, v: (usize, usize, usize)) -> PyResult<i8> {
        self.inner.get(site(v)).map_err(err)
    }

    fn set(&mut self, v: (usize, usize, usize), spin: i8) -> PyResult<()> {
        self.inner.set(site(v), spin).map_err(err)
    }

    fn local_energy(&self, v: (usize, usize, usize)) -> PyResult<i32> {
        self.inner.local_energy(site(v)).map_err(err)
    }

    fn hamiltonian(&self) -> i64 {
        self.inner.hamiltonian()
    }

    fn is_absorbing(&self) -> bool {
        self.inner.is_absorbing()
    }

    /// Apply a scaffold construction ("event-a", "event-a-prime",
    /// "event-periodic") centered at `(cx, cy)` (defaults to the torus
    /// middle). Returns the written sites.
    #[pyo3(signature = (kind, cx=None, cy=None))]
    fn apply_construction(
        &mut self,
        kind: &str,
        cx: Option<i64>,
        cy: Option<i64>,
    ) -> PyResult<Vec<(usize, usize, usize)>> {
        let kind = ConstructionKind::parse(kind).map_err(err)?;
        let geom = *self.inner.geometry();
        let default = initial::default_center(&geom);
        let center = (cx.unwrap_or(default.0), cy.unwrap_or(default.1));
        let inv = initial::apply_construction(kind, &mut self.inner, center).map_err(err)?;
        Ok(inv.sites.into_iter().map(|s| (s.x, s.y, s.z)).collect())
    }

    /// The designated blinker sites for a construction centered at (cx, cy).
    #[pyo3(signature = (cx=None, cy=None))]
    fn blinker_sites(
        &self,
        cx: Option<i64>,
        cy: Option<i64>,
    ) -> PyResult<Vec<(usize, usize, usize)>> {
        let geom = self.inner.geometry();
        let default = initial::default_center(geom);
        let center = (cx.unwrap_or(default.0), cy.unwrap_or(default.1));
        Ok(initial::blinker_sites(geom, center)
            .map_err(err)?
            .into_iter()
            .map(|s| (s.x, s.y, s.z))
            .collect())
    }

    /// True iff flipping the listed sites in order is a positive-probability
    /// trajectory (each flip at nonnegative local energy).
    fn is_legal_flip_sequence(&self, sites: Vec<(usize, usize, usize)>) -> PyResult<bool> {
        let sites: Vec<Site> = sites.into_iter().map(site).collect();
        dynamics::is_legal_flip_sequence(&self.inner, &sites).map_err(err)
    }

    /// Column projection for k = 2, as the tau snapshot text.
    #[pyo3(signature = (t=0.0))]
    fn tau_snapshot(&self, t: f64) -> PyResult<String> {
        Ok(tau::project(&self.inner).map_err(err)?.write_snapshot(t))
    }

    /// Column class counts for k = 2: plus, minus, grey_pm, grey_mp.
    fn grey_stats<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let stats = tau::grey_stats(&tau::project(&self.inner).map_err(err)?);
        let d = PyDict::new(py);
        d.set_item("plus", stats.count_plus)?;
        d.set_item("minus", stats.count_minus)?;
        d.set_item("grey_pm", stats.count_grey_pm)?;
        d.set_item("grey_mp", stats.count_grey_mp)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let g = self.inner.geometry();
        format!(
            "Config(k={}, side={}, bc='{}', H={})",
            g.k(),
            g.side(),
            g.vertical_bc().as_str(),
            self.inner.hamiltonian()
        )
    }
}

/// Greatest subset of `candidate` in which every site keeps a strict
/// majority of same-spin neighbors inside the subset. Returns
/// [(x, y, z, pinned_spin), ...].
#[pyfunction]
fn certify(
    config: &PyConfig,
    candidate: Vec<(usize, usize, usize)>,
) -> PyResult<Vec<(usize, usize, usize, i8)>> {
    let sites: Vec<Site> = candidate.into_iter().map(site).collect();
    let cert = cert::certify(&config.inner, &sites).map_err(err)?;
    Ok(cert.iter().map(|(s, pin)| (s.x, s.y, s.z, pin)).collect())
}

/// True iff the candidate equals its own certificate.
#[pyfunction]
fn is_stable_set(config: &PyConfig, candidate: Vec<(usize, usize, usize)>) -> PyResult<bool> {
    let sites: Vec<Site> = candidate.into_iter().map(site).collect();
    cert::is_stable_set(&config.inner, &sites).map_err(err)
}

/// A running simulation with per-site flip counters and exact energy
/// bookkeeping.
#[pyclass(name = "Dynamics")]
struct PyDynamics {
    inner: DynamicsState,
}

#[pymethods]
impl PyDynamics {
    #[new]
    #[pyo3(signature = (config, seed, stream=0))]
    fn new(config: &PyConfig, seed: u64, stream: u64) -> Self {
        PyDynamics { inner: DynamicsState::new(config.inner.clone(), replica_rng(seed, stream)) }
    }

    /// Advance one clock ring; returns (site, pre_energy, flipped).
    fn step(&mut self) -> ((usize, usize, usize), i32, bool) {
        let out = self.inner.step();
        let v = self.inner.config().geometry().index_site(out.site).expect("index valid");
        ((v.x, v.y, v.z), out.pre_energy, out.flipped)
    }

    /// Run for `sweeps` additional sweeps (absolute event target).
    fn run_sweeps(&mut self, sweeps: u64) {
        let target = self.inner.sweeps().ceil() as u64 + sweeps;
        self.inner.run(StopRule::SweepLimit(target));
    }

    /// Run until absorption; `guard_sweeps` bounds the run if given.
    /// Returns True iff absorbed.
    #[pyo3(signature = (guard_sweeps=None))]
    fn run_to_absorption(&mut self, guard_sweeps: Option<u64>) -> bool {
        matches!(
            self.inner.run(StopRule::Absorption { sweep_guard: guard_sweeps }),
            dynamics::RunStatus::Absorbed
        )
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t()
    }

    #[getter]
    fn sweeps(&self) -> f64 {
        self.inner.sweeps()
    }

    #[getter]
    fn events(&self) -> u64 {
        self.inner.events()
    }

    #[getter]
    fn total_flips(&self) -> u64 {
        self.inner.total_flips()
    }

    #[getter]
    fn hamiltonian(&self) -> i64 {
        self.inner.cached_hamiltonian()
    }

    fn is_absorbed(&self) -> bool {
        self.inner.is_absorbed()
    }

    fn flip_count(&self, v: (usize, usize, usize)) -> PyResult<u64> {
        let i = self.inner.config().geometry().site_index(site(v)).map_err(err)?;
        Ok(self.inner.flip_counts()[i])
    }

    fn config(&self) -> PyConfig {
        PyConfig { inner: self.inner.config().clone() }
    }

    fn __repr__(&self) -> String {
        format!(
            "Dynamics(sweeps={:.3}, flips={}, H={}, absorbed={})",
            self.inner.sweeps(),
            self.inner.total_flips(),
            self.inner.cached_hamiltonian(),
            self.inner.is_absorbed()
        )
    }
}

/// 0/1 block-occupation field on the block torus.
#[pyclass(name = "Eta", skip_from_py_object)]
#[derive(Clone)]
struct PyEta {
    inner: bootstrap::EtaConfig,
}

#[pymethods]
impl PyEta {
    /// Occupation from monochromatic 2x2x2 blocks of a k = 2 configuration.
    #[staticmethod]
    fn extract(config: &PyConfig) -> PyResult<Self> {
        Ok(PyEta { inner: bootstrap::extract_eta(&config.inner).map_err(err)? })
    }

    /// I.i.d. field at the given density.
    #[staticmethod]
    #[pyo3(signature = (side, density, seed, stream=0))]
    fn sample(side: usize, density: f64, seed: u64, stream: u64) -> PyResult<Self> {
        let mut rng = replica_rng(seed, stream);
        Ok(PyEta { inner: bootstrap::sample_eta(side, density, &mut rng).map_err(err)? })
    }

    #[getter]
    fn side(&self) -> usize {
        self.inner.side()
    }

    fn occupation_fraction(&self) -> f64 {
        bootstrap::occupation_fraction(&self.inner)
    }

    fn is_full(&self) -> bool {
        self.inner.is_full()
    }

    /// One synchronous update.
    fn step(&self) -> PyEta {
        PyEta { inner: bootstrap::bootstrap_step(&self.inner) }
    }

    /// Iterate to the fixed point; returns (closure, steps).
    fn closure(&self) -> (PyEta, u64) {
        let closed = bootstrap::closure(&self.inner);
        let steps = closed.step_index();
        (PyEta { inner: closed }, steps)
    }

    fn snapshot(&self) -> String {
        self.inner.write_snapshot()
    }

    fn __repr__(&self) -> String {
        format!(
            "Eta(side={}, fraction={:.6})",
            self.inner.side(),
            bootstrap::occupation_fraction(&self.inner)
        )
    }
}

#[pymodule]
fn slabsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyGeometry>()?;
    m.add_class::<PyConfig>()?;
    m.add_class::<PyDynamics>()?;
    m.add_class::<PyEta>()?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(is_stable_set, m)?)?;
    Ok(())
}
