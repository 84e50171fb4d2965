//! Python bindings. Ids are 0-based on this side, as in the Rust API; the text
//! formats (`Instance.to_text`, `Matching.to_text`) stay 1-based.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use popmatch::generators::{self, GeneratorParams, Model};
use popmatch::harness::experiment::{run_experiment, ExperimentConfig, ExperimentKind};
use popmatch::harness::{Algorithm, Property};
use popmatch::metrics::{self, MetricsReport};
use popmatch::oracle::{self, Domain};
use popmatch::solvers::{envyfree, hr, hrlq};
use popmatch::{io, Error, Feasibility};

create_exception!(pypopmatch, InfeasibleError, PyException, "The instance admits no feasible matching.");

fn to_py(e: Error) -> PyErr {
    match e {
        Error::InfeasibleInstance => InfeasibleError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

#[pyclass(name = "Instance", module = "pypopmatch", frozen, eq)]
#[derive(PartialEq)]
struct PyInstance(popmatch::Instance);

#[pymethods]
impl PyInstance {
    #[new]
    #[pyo3(signature = (resident_prefs, hospital_prefs, upper_quotas, lower_quotas=None))]
    fn new(
        resident_prefs: Vec<Vec<usize>>,
        hospital_prefs: Vec<Vec<usize>>,
        upper_quotas: Vec<u32>,
        lower_quotas: Option<Vec<u32>>,
    ) -> PyResult<Self> {
        let lower = lower_quotas.unwrap_or_else(|| vec![0; upper_quotas.len()]);
        popmatch::Instance::new(resident_prefs, hospital_prefs, lower, upper_quotas).map(PyInstance).map_err(to_py)
    }

    /// Reads the `HRLQ 1` text format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        io::parse_instance(text).map(PyInstance).map_err(to_py)
    }

    /// Reads a hospitals-residents-with-couples file; returns the instance
    /// and the list of warnings.
    #[staticmethod]
    fn from_hrc(text: &str) -> PyResult<(Self, Vec<String>)> {
        let out = io::ingest_hrc(text).map_err(to_py)?;
        Ok((PyInstance(out.instance), out.warnings.iter().map(ToString::to_string).collect()))
    }

    fn to_text(&self) -> String {
        io::serialize_instance(&self.0)
    }

    #[getter]
    fn n_residents(&self) -> usize {
        self.0.n_residents()
    }

    #[getter]
    fn n_hospitals(&self) -> usize {
        self.0.n_hospitals()
    }

    #[getter]
    fn n_edges(&self) -> usize {
        self.0.n_edges()
    }

    #[getter]
    fn lower_quotas(&self) -> Vec<u32> {
        self.0.lower_quotas().to_vec()
    }

    #[getter]
    fn upper_quotas(&self) -> Vec<u32> {
        self.0.upper_quotas().to_vec()
    }

    fn resident_prefs(&self, r: usize) -> PyResult<Vec<usize>> {
        if r >= self.0.n_residents() {
            return Err(PyValueError::new_err(format!("no resident {r}")));
        }
        Ok(self.0.resident_prefs(r).to_vec())
    }

    fn hospital_prefs(&self, h: usize) -> PyResult<Vec<usize>> {
        if h >= self.0.n_hospitals() {
            return Err(PyValueError::new_err(format!("no hospital {h}")));
        }
        Ok(self.0.hospital_prefs(h).to_vec())
    }

    fn without_lower_quotas(&self) -> Self {
        PyInstance(self.0.without_lower_quotas())
    }

    fn is_feasible(&self, m: &PyMatching) -> bool {
        self.0.is_feasible(&m.0)
    }

    /// One of `infeasible`, `feasible-stable`, `feasible-no-stable`.
    fn classify(&self) -> &'static str {
        match generators::classify(&self.0) {
            Feasibility::Infeasible => "infeasible",
            Feasibility::FeasibleStable => "feasible-stable",
            Feasibility::FeasibleNoStable => "feasible-no-stable",
        }
    }

    fn __repr__(&self) -> String {
        format!("Instance(residents={}, hospitals={}, edges={})", self.0.n_residents(), self.0.n_hospitals(), self.0.n_edges())
    }
}

#[pyclass(name = "Matching", module = "pypopmatch", frozen, eq)]
#[derive(PartialEq)]
struct PyMatching(popmatch::Matching);

#[pymethods]
impl PyMatching {
    #[new]
    fn new(n_residents: usize, pairs: Vec<(usize, usize)>) -> PyResult<Self> {
        popmatch::Matching::from_pairs(n_residents, pairs).map(PyMatching).map_err(to_py)
    }

    #[staticmethod]
    fn parse(instance: &PyInstance, text: &str) -> PyResult<Self> {
        io::parse_matching(&instance.0, text).map(PyMatching).map_err(to_py)
    }

    fn to_text(&self) -> String {
        io::serialize_matching(&self.0)
    }

    fn pairs(&self) -> Vec<(usize, usize)> {
        self.0.pairs().collect()
    }

    fn hospital_of(&self, r: usize) -> Option<usize> {
        self.0.assignment().get(r).copied().flatten()
    }

    #[getter]
    fn size(&self) -> usize {
        self.0.size()
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }

    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

/// Runs a named algorithm (`gs-res`, `gs-hosp`, `popular-max`,
/// `max-popular`, `hrlq-popular`, `envy-free-yokoi`, `envy-free-maximal`).
/// Returns `None` when no envy-free matching exists.
#[pyfunction]
#[pyo3(signature = (instance, algorithm, level_cap=None))]
fn solve(instance: &PyInstance, algorithm: &str, level_cap: Option<usize>) -> PyResult<Option<PyMatching>> {
    let algo: Algorithm = algorithm.parse().map_err(to_py)?;
    Ok(algo.run(&instance.0, level_cap).map_err(to_py)?.map(PyMatching))
}

#[pyfunction]
fn gs_resident(instance: &PyInstance) -> PyMatching {
    PyMatching(hr::gs_resident(&instance.0.without_lower_quotas()))
}

#[pyfunction]
fn gs_hospital(instance: &PyInstance) -> PyMatching {
    PyMatching(hr::gs_hospital(&instance.0.without_lower_quotas()))
}

#[pyfunction]
fn max_card_popular(instance: &PyInstance) -> PyMatching {
    PyMatching(hr::max_card_popular(&instance.0.without_lower_quotas()))
}

#[pyfunction]
#[pyo3(signature = (instance, level_cap=None))]
fn popular_among_maxcard(instance: &PyInstance, level_cap: Option<usize>) -> PyResult<PyMatching> {
    hr::popular_among_maxcard(&instance.0.without_lower_quotas(), level_cap).map(PyMatching).map_err(to_py)
}

/// Popular among feasible matchings; raises `InfeasibleError` if none is feasible.
#[pyfunction]
fn hrlq_popular(instance: &PyInstance) -> PyResult<PyMatching> {
    hrlq::hrlq_popular(&instance.0).map(PyMatching).map_err(to_py)
}

#[pyfunction]
fn yokoi(instance: &PyInstance) -> Option<PyMatching> {
    envyfree::yokoi(&instance.0).map(PyMatching)
}

#[pyfunction]
fn maximal_envy_free(instance: &PyInstance) -> Option<PyMatching> {
    envyfree::maximal_envy_free(&instance.0).map(PyMatching)
}

#[pyfunction]
fn blocking_pairs(instance: &PyInstance, m: &PyMatching) -> Vec<(usize, usize)> {
    metrics::blocking_pairs(&instance.0, &m.0)
}

#[pyfunction]
fn envy_pairs(instance: &PyInstance, m: &PyMatching) -> Vec<(usize, usize)> {
    metrics::envy_pairs(&instance.0, &m.0)
}

#[pyfunction]
fn deficiency(instance: &PyInstance, m: &PyMatching) -> u64 {
    metrics::deficiency(&instance.0, &m.0)
}

/// Size, blocking pairs, blocking residents, first choices and deficiency of
/// `m`; with a baseline also the percentage columns (strings, `NA` when
/// undefined).
#[pyfunction]
#[pyo3(signature = (instance, m, baseline=None))]
fn report<'py>(py: Python<'py>, instance: &PyInstance, m: &PyMatching, baseline: Option<&PyMatching>) -> PyResult<Bound<'py, PyDict>> {
    let row = match baseline {
        Some(b) => metrics::paired_report(&instance.0, &m.0, &b.0),
        None => metrics::report(&instance.0, &m.0),
    };
    let d = PyDict::new(py);
    d.set_item("size", row.size)?;
    d.set_item("bpc", row.bpc)?;
    d.set_item("br", row.br)?;
    d.set_item("r1", row.r1)?;
    d.set_item("deficiency", row.deficiency)?;
    if row.comparison.is_some() {
        let cells = row.csv_row();
        for (key, value) in MetricsReport::CSV_HEADER.split(',').zip(cells.split(',')).skip(5) {
            d.set_item(key, value)?;
        }
    }
    Ok(d)
}

/// Checks `stable`, `feasible`, `popular-all`, `popular-feasible`,
/// `envy-free` or `maximal-envy-free`. Returns `(holds, detail, witness)`.
#[pyfunction]
fn verify(instance: &PyInstance, m: &PyMatching, property: &str) -> PyResult<(bool, String, Option<PyMatching>)> {
    let property: Property = property.parse().map_err(to_py)?;
    let out = property.check(&instance.0, &m.0).map_err(to_py)?;
    Ok((out.holds, out.detail, out.witness.map(PyMatching)))
}

/// Exhaustive popularity check for small instances; `domain` is `all`,
/// `feasible` or `max-cardinality`.
#[pyfunction]
#[pyo3(signature = (instance, m, domain="feasible"))]
fn is_popular(instance: &PyInstance, m: &PyMatching, domain: &str) -> PyResult<bool> {
    let domain = match domain {
        "all" => Domain::AllMatchings,
        "feasible" => Domain::FeasibleMatchings,
        "max-cardinality" => Domain::MaxCardinalityMatchings,
        other => return Err(PyValueError::new_err(format!("unknown domain `{other}`"))),
    };
    Ok(oracle::is_popular(&instance.0, &m.0, domain).map_err(to_py)?.is_popular())
}

/// Generates a seeded instance. `lower_quotas` adds lower quotas; `filtered`
/// keeps drawing until the instance is feasible without a feasible stable
/// matching.
#[pyfunction]
#[pyo3(signature = (residents, hospitals, k=5, seed=0, model="master", capacity=None, lower_quotas=false, filtered=false, max_retries=1000))]
#[allow(clippy::too_many_arguments)]
fn generate(
    residents: usize,
    hospitals: usize,
    k: usize,
    seed: u64,
    model: &str,
    capacity: Option<u32>,
    lower_quotas: bool,
    filtered: bool,
    max_retries: usize,
) -> PyResult<PyInstance> {
    let model: Model = model.parse().map_err(to_py)?;
    let params = GeneratorParams { capacity, ..GeneratorParams::new(model, residents, hospitals, k, seed) };
    let g = if filtered {
        generators::gen_hrlq_filtered(&params, max_retries)
    } else {
        generators::generate(&params).and_then(|g| if lower_quotas { generators::assign_lower_quotas(&g, &params) } else { Ok(g) })
    };
    g.map(PyInstance).map_err(to_py)
}

/// Runs an experiment grid and returns the summary CSV.
#[pyfunction]
#[pyo3(signature = (kind, residents, hospitals, k=5, reps=10, seed=0, model="master", stddev=false))]
#[allow(clippy::too_many_arguments)]
fn experiment(
    py: Python<'_>,
    kind: &str,
    residents: usize,
    hospitals: Vec<usize>,
    k: usize,
    reps: usize,
    seed: u64,
    model: &str,
    stddev: bool,
) -> PyResult<String> {
    let kind = match kind {
        "hr" => ExperimentKind::Hr,
        "hrlq" => ExperimentKind::Hrlq,
        other => return Err(PyValueError::new_err(format!("unknown experiment kind `{other}`"))),
    };
    let model: Model = model.parse().map_err(to_py)?;
    let config = ExperimentConfig { reps, seed, stddev, ..ExperimentConfig::new(kind, model, residents, hospitals, k) };
    let out = py.detach(|| run_experiment(&config)).map_err(to_py)?;
    Ok(out.summary_csv)
}

#[pymodule]
fn pypopmatch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyMatching>()?;
    m.add("InfeasibleError", m.py().get_type::<InfeasibleError>())?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(gs_resident, m)?)?;
    m.add_function(wrap_pyfunction!(gs_hospital, m)?)?;
    m.add_function(wrap_pyfunction!(max_card_popular, m)?)?;
    m.add_function(wrap_pyfunction!(popular_among_maxcard, m)?)?;
    m.add_function(wrap_pyfunction!(hrlq_popular, m)?)?;
    m.add_function(wrap_pyfunction!(yokoi, m)?)?;
    m.add_function(wrap_pyfunction!(maximal_envy_free, m)?)?;
    m.add_function(wrap_pyfunction!(blocking_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(envy_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(deficiency, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(is_popular, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(experiment, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
