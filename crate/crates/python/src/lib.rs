//! Python bindings. Procedure specs and simulation configs cross the
//! boundary as JSON strings.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use optcs::cli::RunConfig;
use optcs::problem::{LabeledSample, TestSample};
use optcs::procedures::ProcedureSpec;
use optcs::simlab::{DgpFamily, DgpSpec};
use optcs::PruneMode;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn prune(mode: &str) -> PyResult<PruneMode> {
    mode.parse().map_err(err)
}

/// Outcome of a selection run. Indices are 0-based.
#[pyclass(name = "Selection", frozen, get_all)]
pub struct Selection {
    selected: Vec<usize>,
    pvalues: Vec<f64>,
    aux_sizes: Vec<f64>,
    thresholds: Vec<f64>,
    xi: Vec<f64>,
    r_star: usize,
    selected_models: Option<Vec<usize>>,
}

impl From<optcs::SelectionOutcome> for Selection {
    fn from(o: optcs::SelectionOutcome) -> Self {
        Self {
            selected: o.selected,
            pvalues: o.pvalues,
            aux_sizes: o.aux_sizes,
            thresholds: o.thresholds,
            xi: o.xi,
            r_star: o.r_star,
            selected_models: o.selected_models,
        }
    }
}

#[pymethods]
impl Selection {
    fn __len__(&self) -> usize {
        self.selected.len()
    }

    fn __repr__(&self) -> String {
        format!("Selection(selected={:?}, r_star={})", self.selected, self.r_star)
    }
}

/// Labeled rows split into preparatory (first `n1`) and calibration blocks,
/// plus unlabeled test rows.
#[pyclass(name = "Problem", frozen)]
pub struct Problem {
    inner: optcs::Problem,
}

#[pymethods]
impl Problem {
    #[new]
    #[pyo3(signature = (x, y, x_test, c=0.0, c_test=0.0, n1=0, y_test=None))]
    fn new(
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        x_test: Vec<Vec<f64>>,
        c: f64,
        c_test: f64,
        n1: usize,
        y_test: Option<Vec<f64>>,
    ) -> PyResult<Self> {
        if x.len() != y.len() {
            return Err(err(format!("{} feature rows but {} labels", x.len(), y.len())));
        }
        if let Some(t) = &y_test {
            if t.len() != x_test.len() {
                return Err(err(format!("{} test rows but {} test labels", x_test.len(), t.len())));
            }
        }
        let labeled = x.into_iter().zip(y).map(|(x, y)| LabeledSample::new(x, y, c)).collect();
        let test = x_test
            .into_iter()
            .enumerate()
            .map(|(j, x)| match &y_test {
                Some(t) => TestSample::with_truth(x, c_test, t[j]),
                None => TestSample::new(x, c_test),
            })
            .collect();
        let inner = optcs::Problem::with_preparatory(labeled, test, n1).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n1(&self) -> usize {
        self.inner.n1()
    }

    #[getter]
    fn n2(&self) -> usize {
        self.inner.n2()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        let s = self.inner.split();
        format!("Problem(n1={}, n2={}, m={}, d={})", s.n1, s.n2, s.m, self.inner.dim())
    }
}

#[pyfunction]
fn bh(pvalues: Vec<f64>, q: f64) -> Vec<usize> {
    optcs::bh(&pvalues, q)
}

#[pyfunction]
fn conformal_pvalue(cal_scores: Vec<f64>, test_score: f64) -> PyResult<f64> {
    optcs::conformal_pvalue(&cal_scores, test_score).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (pvalues, aux_sizes, q, prune_mode="homo", seed=0))]
fn optcs_select(pvalues: Vec<f64>, aux_sizes: Vec<f64>, q: f64, prune_mode: &str, seed: u64) -> PyResult<Selection> {
    optcs::optcs_select(&pvalues, &aux_sizes, q, prune(prune_mode)?, seed)
        .map(Selection::from)
        .map_err(err)
}

/// Runs a procedure described by a JSON spec, e.g.
/// `{"kind": "scs", "candidates": [{"trainer": {"family": "ridge", "lambda": 1.0}, "score": {"kind": "clipped_mean"}}]}`.
#[pyfunction]
#[pyo3(signature = (spec_json, problem, q, prune_mode="homo", seed=0))]
fn run_procedure(spec_json: &str, problem: &Problem, q: f64, prune_mode: &str, seed: u64) -> PyResult<Selection> {
    let spec: ProcedureSpec = serde_json::from_str(spec_json).map_err(err)?;
    optcs::run_procedure(&spec, &problem.inner, q, prune(prune_mode)?, seed)
        .map(Selection::from)
        .map_err(err)
}

/// Draws `n` samples; returns `(x, y)`.
#[pyfunction]
#[pyo3(signature = (family, n, seed=0, d=None))]
fn sample_dgp(family: &str, n: usize, seed: u64, d: Option<usize>) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let family: DgpFamily = family.parse().map_err(err)?;
    let mut spec = DgpSpec::new(family);
    if let Some(d) = d {
        spec.d = d;
    }
    let mut rng = optcs::rng::stream(seed, &[]);
    let data = optcs::simlab::sample_dgp(&spec, n, &mut rng).map_err(err)?;
    Ok(data.into_iter().map(|s| (s.x, s.y)).unzip())
}

/// Runs a simulation from a JSON run config; returns the summaries as JSON.
#[pyfunction]
fn simulate(config_json: &str) -> PyResult<String> {
    let config = RunConfig::from_json(config_json).map_err(err)?;
    let report = optcs::simlab::run_experiment(&config.experiment().map_err(err)?).map_err(err)?;
    serde_json::to_string(&report.summaries).map_err(err)
}

#[pymodule]
fn pyoptcs(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Problem>()?;
    m.add_class::<Selection>()?;
    m.add_function(wrap_pyfunction!(bh, m)?)?;
    m.add_function(wrap_pyfunction!(conformal_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(optcs_select, m)?)?;
    m.add_function(wrap_pyfunction!(run_procedure, m)?)?;
    m.add_function(wrap_pyfunction!(sample_dgp, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    Ok(())
}
