//! Python bindings: quantum states, measurement settings, the Bell-family
//! expectations, the quadratic witness, settings optimization, and the
//! hidden-variable demo. Structured reports cross the boundary as JSON
//! strings so the Python side sees exactly the CLI schema.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use quadbell::error::QbError;
use quadbell::operators::verify_identities;
use quadbell::optimizer::{optimize_settings, Objective, OptimizationConfig};
use quadbell::random::{random_settings, rng_for, StateKind};
use quadbell::schmidt::schmidt_decompose;
use quadbell::settings::MeasurementSettings;
use quadbell::state::StateJson;
use quadbell::witness;

fn err(e: QbError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_err(e: serde_json::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// An n-qubit pure or mixed state.
#[pyclass(name = "State")]
#[derive(Clone)]
struct PyState {
    inner: quadbell::state::QuantumState,
}

#[pymethods]
impl PyState {
    #[staticmethod]
    #[pyo3(signature = (n, plus=true))]
    fn ghz(n: usize, plus: bool) -> PyResult<Self> {
        Ok(Self { inner: quadbell::state::ghz_state(n, plus).map_err(err)? })
    }

    #[staticmethod]
    fn singlet() -> Self {
        Self { inner: quadbell::state::singlet() }
    }

    #[staticmethod]
    fn all_up(n: usize) -> Self {
        Self { inner: quadbell::state::all_up(n) }
    }

    #[staticmethod]
    fn w(n: usize) -> PyResult<Self> {
        Ok(Self { inner: quadbell::state::w_state(n).map_err(err)? })
    }

    #[staticmethod]
    fn maximally_mixed(n: usize) -> Self {
        Self { inner: quadbell::state::maximally_mixed(n) }
    }

    /// kind: "pure-haar" | "mixed-ginibre" | "biseparable".
    #[staticmethod]
    #[pyo3(signature = (n, kind, seed=0, stream=0))]
    fn random(n: usize, kind: &str, seed: u64, stream: u64) -> PyResult<Self> {
        let kind = match kind {
            "pure-haar" => StateKind::PureHaar,
            "mixed-ginibre" => StateKind::MixedGinibre,
            "biseparable" => StateKind::Biseparable,
            other => return Err(PyValueError::new_err(format!("unknown kind {other:?}"))),
        };
        Ok(Self {
            inner: quadbell::random::random_state(n, kind, seed, stream).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let json: StateJson = serde_json::from_str(text).map_err(json_err)?;
        Ok(Self { inner: json.into_state().map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.num_particles()
    }

    #[getter]
    fn is_pure(&self) -> bool {
        self.inner.is_pure()
    }

    fn digest(&self) -> String {
        self.inner.digest()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&StateJson::from(&self.inner)).map_err(json_err)
    }

    /// Pure-state amplitudes as (re, im) pairs.
    fn amplitudes(&self) -> PyResult<Vec<(f64, f64)>> {
        self.inner
            .pure_amplitudes()
            .map(|v| v.iter().map(|z| (z.re, z.im)).collect())
            .ok_or_else(|| PyValueError::new_err("state is mixed"))
    }

    fn __repr__(&self) -> String {
        format!(
            "State(n={}, {})",
            self.inner.num_particles(),
            if self.inner.is_pure() { "pure" } else { "mixed" }
        )
    }
}

/// Per-particle measurement direction pairs (a_j, a'_j).
#[pyclass(name = "Settings")]
#[derive(Clone)]
struct PySettings {
    inner: MeasurementSettings,
}

#[pymethods]
impl PySettings {
    /// A_j = sigma_y, A'_j = sigma_x everywhere.
    #[staticmethod]
    fn mermin_xy(n: usize) -> Self {
        Self { inner: MeasurementSettings::mermin_xy(n) }
    }

    #[staticmethod]
    fn all_z(n: usize) -> Self {
        Self { inner: MeasurementSettings::all_z(n) }
    }

    /// Planar settings maximizing |<S+/-_3>| on the GHZ state.
    #[staticmethod]
    fn svetlichny_opt(n: usize) -> Self {
        Self { inner: quadbell::optimizer::svetlichny_opt_settings(n) }
    }

    #[staticmethod]
    #[pyo3(signature = (n, seed=0))]
    fn random(n: usize, seed: u64) -> Self {
        let mut rng = rng_for(seed, 0);
        Self { inner: random_settings(n, &mut rng) }
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(text).map_err(json_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.num_particles()
    }

    /// [((ax, ay, az), (ax', ay', az')), ...] per particle.
    fn directions(&self) -> Vec<((f64, f64, f64), (f64, f64, f64))> {
        self.inner
            .pairs()
            .iter()
            .map(|(a, ap)| ((a.x, a.y, a.z), (ap.x, ap.y, ap.z)))
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(json_err)
    }

    fn __repr__(&self) -> String {
        format!("Settings(n={})", self.inner.num_particles())
    }
}

/// (<F>, <F'>, <S+>, <S->) on one state.
#[pyfunction]
fn family_expectations(state: &PyState, settings: &PySettings) -> PyResult<(f64, f64, f64, f64)> {
    quadbell::operators::family_expectations(state.inner.num_particles(), &settings.inner, &state.inner)
        .map_err(err)
}

/// Full witness report as a JSON string (same schema as the CLI).
#[pyfunction]
fn witness_report(state: &PyState, settings: &PySettings) -> PyResult<String> {
    let report = witness::evaluate(&state.inner, &settings.inner).map_err(err)?;
    serde_json::to_string(&report).map_err(json_err)
}

/// (x, y, q) with q = x^2 + y^2 <= 4 at n = 2.
#[pyfunction]
fn chsh_quadratic(state: &PyState, settings: &PySettings) -> PyResult<(f64, f64, f64)> {
    witness::chsh_quadratic(&state.inner, &settings.inner).map_err(err)
}

/// (biseparable q_s, global q_s, biseparable q_f, global q_f).
#[pyfunction]
fn bounds(n: usize) -> (f64, f64, f64, f64) {
    witness::bounds(n)
}

fn parse_objective(name: &str) -> PyResult<Objective> {
    serde_json::from_value(serde_json::Value::String(name.into()))
        .map_err(|_| PyValueError::new_err(format!("unknown objective {name:?}")))
}

/// Maximize an objective ("q-s" | "q-f" | "abs-f" | "abs-s-plus" |
/// "abs-s-minus" | "chsh" | "chsh-quadratic") over settings; returns
/// (value, Settings).
#[pyfunction]
#[pyo3(signature = (state, objective, restarts=10, seed=0))]
fn optimize(
    state: &PyState,
    objective: &str,
    restarts: usize,
    seed: u64,
) -> PyResult<(f64, PySettings)> {
    let mut config = OptimizationConfig::new(parse_objective(objective)?);
    config.restarts = restarts;
    config.seed = seed;
    let result = optimize_settings(&state.inner, &config).map_err(err)?;
    Ok((result.value, PySettings { inner: result.settings }))
}

/// Identity residual report for one n as a JSON string.
#[pyfunction]
#[pyo3(signature = (n, samples=50, seed=0))]
fn identities(n: usize, samples: usize, seed: u64) -> PyResult<String> {
    let mut rng = rng_for(seed, 0);
    let settings = random_settings(n, &mut rng);
    let report = verify_identities(n, &settings, samples, seed).map_err(err)?;
    serde_json::to_string(&report).map_err(json_err)
}

/// Schmidt coefficients (p, q) of a two-qubit pure state.
#[pyfunction]
fn schmidt_coefficients(state: &PyState) -> PyResult<(f64, f64)> {
    let form = schmidt_decompose(&state.inner).map_err(err)?;
    Ok((form.p, form.q))
}

/// The partially separable hidden-variable counterexample, as JSON:
/// expectations, q values, and which bounds it satisfies/violates.
#[pyfunction]
fn hv_demo() -> PyResult<String> {
    let s = MeasurementSettings::mermin_xy(3);
    let model = quadbell::hv::paper_example_model();
    let get = |family: &str| -> PyResult<f64> {
        let expansion = match family {
            "f" => quadbell::operators::build_f(3, &s, false),
            "fprime" => quadbell::operators::build_f(3, &s, true),
            "splus" => quadbell::operators::build_s(3, &s, true),
            _ => quadbell::operators::build_s(3, &s, false),
        }
        .map_err(err)?
        .expansion();
        quadbell::hv::eval_hv(&model, &expansion).map_err(err)
    };
    let (f, fprime, splus, sminus) = (get("f")?, get("fprime")?, get("splus")?, get("sminus")?);
    let q_s = splus * splus + sminus * sminus;
    let (bisep_s, _, _, _) = witness::bounds(3);
    let value = serde_json::json!({
        "f": f, "fprime": fprime, "splus": splus, "sminus": sminus,
        "q_s": q_s, "q_f": f * f + fprime * fprime,
        "satisfies_linear_svetlichny": splus.abs() <= 4.0 && sminus.abs() <= 4.0,
        "violates_quadratic_biseparable": q_s > bisep_s,
    });
    serde_json::to_string(&value).map_err(json_err)
}

#[pymodule]
fn quadbell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PySettings>()?;
    m.add_function(wrap_pyfunction!(family_expectations, m)?)?;
    m.add_function(wrap_pyfunction!(witness_report, m)?)?;
    m.add_function(wrap_pyfunction!(chsh_quadratic, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(optimize, m)?)?;
    m.add_function(wrap_pyfunction!(identities, m)?)?;
    m.add_function(wrap_pyfunction!(schmidt_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(hv_demo, m)?)?;
    Ok(())
}
