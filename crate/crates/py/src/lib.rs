//! Python bindings for the switch-protocol simulator: protocol runs and
//! closed-form branches, the entanglement classifier, the loss model, the
//! photonic equivalence audit, and the graph-state constructions.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyModule};

use ico_netsim::efficiency::EfficiencyParams;
use ico_netsim::entanglement::Classification;
use ico_netsim::graphstate::{Graph, IcoSign};
use ico_netsim::protocol::ProtocolConfig;
use ico_netsim::qcore::StateVector;
use ico_netsim::SimError;

fn sim_err(e: SimError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_phase(text: &str) -> PyResult<Complex64> {
    match text.trim() {
        "1" => Ok(Complex64::new(1.0, 0.0)),
        "i" => Ok(Complex64::new(0.0, 1.0)),
        other => Err(PyValueError::new_err(format!(
            "shared_phase must be \"1\" or \"i\", got \"{other}\""
        ))),
    }
}

fn parse_sign(text: &str) -> PyResult<IcoSign> {
    match text.trim() {
        "plus" | "+" => Ok(IcoSign::Plus),
        "minus" | "-" => Ok(IcoSign::Minus),
        other => Err(PyValueError::new_err(format!(
            "sign must be \"plus\" or \"minus\", got \"{other}\""
        ))),
    }
}

fn config(n_parties: usize, theta: f64, alphas: Vec<f64>, shared_phase: &str) -> PyResult<ProtocolConfig> {
    ProtocolConfig::new(n_parties, theta, alphas, parse_phase(shared_phase)?).map_err(sim_err)
}

fn amplitudes_of(state: &StateVector) -> Vec<Complex64> {
    state.amplitudes().to_vec()
}

fn state_from_amplitudes(amplitudes: Vec<Complex64>) -> PyResult<StateVector> {
    StateVector::new(amplitudes).map_err(sim_err)
}

fn classification_dict<'py>(
    py: Python<'py>,
    cl: &Classification,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("class", cl.class.to_string())?;
    d.set_item("concurrence", cl.witness.concurrence)?;
    d.set_item("ghz_fidelity", cl.witness.ghz_fidelity)?;
    d.set_item(
        "max_reduction_purity_deficit",
        cl.witness.max_reduction_purity_deficit,
    )?;
    Ok(d)
}

/// Run the N-party protocol and return every measurement outcome as a dict
/// with keys outcome, parity, probability, class, amplitudes (None for
/// vanished branches).
#[pyfunction]
#[pyo3(signature = (n_parties, theta, alphas, shared_phase="1"))]
fn run_protocol<'py>(
    py: Python<'py>,
    n_parties: usize,
    theta: f64,
    alphas: Vec<f64>,
    shared_phase: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let cfg = config(n_parties, theta, alphas, shared_phase)?;
    let records = ico_netsim::run(&cfg).map_err(sim_err)?;
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        let d = PyDict::new(py);
        d.set_item("outcome", &r.outcome)?;
        d.set_item("parity", r.parity.to_string())?;
        d.set_item("probability", r.probability)?;
        let cl = ico_netsim::classify(r.collapsed.as_ref()).map_err(sim_err)?;
        d.set_item("class", cl.class.to_string())?;
        d.set_item("amplitudes", r.collapsed.as_ref().map(amplitudes_of))?;
        out.push(d);
    }
    Ok(out)
}

/// Closed-form heralded branches: dict with keys even, odd (amplitude lists
/// or None), even_prob, odd_prob.
#[pyfunction]
#[pyo3(signature = (n_parties, theta, alphas, shared_phase="1"))]
fn branch_states<'py>(
    py: Python<'py>,
    n_parties: usize,
    theta: f64,
    alphas: Vec<f64>,
    shared_phase: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let cfg = config(n_parties, theta, alphas, shared_phase)?;
    let b = ico_netsim::branch_states(&cfg).map_err(sim_err)?;
    let d = PyDict::new(py);
    d.set_item("even", b.even.as_ref().map(amplitudes_of))?;
    d.set_item("odd", b.odd.as_ref().map(amplitudes_of))?;
    d.set_item("even_prob", b.even_prob)?;
    d.set_item("odd_prob", b.odd_prob)?;
    Ok(d)
}

/// Classify a pure state given its amplitude vector (length 2^n); None
/// classifies the vanished branch.
#[pyfunction]
fn classify_state<'py>(
    py: Python<'py>,
    amplitudes: Option<Vec<Complex64>>,
) -> PyResult<Bound<'py, PyDict>> {
    let state = amplitudes.map(state_from_amplitudes).transpose()?;
    let cl = ico_netsim::classify(state.as_ref()).map_err(sim_err)?;
    classification_dict(py, &cl)
}

/// Spin-flip concurrence of a two-qubit amplitude vector.
#[pyfunction]
fn concurrence(amplitudes: Vec<Complex64>) -> PyResult<f64> {
    ico_netsim::concurrence(&state_from_amplitudes(amplitudes)?).map_err(sim_err)
}

/// |⟨GHZ±|state⟩|² for an N-qubit amplitude vector.
#[pyfunction]
#[pyo3(signature = (amplitudes, plus=true))]
fn ghz_fidelity(amplitudes: Vec<Complex64>, plus: bool) -> PyResult<f64> {
    ico_netsim::ghz_fidelity(&state_from_amplitudes(amplitudes)?, plus).map_err(sim_err)
}

fn efficiency_params(
    n: usize,
    l_km: f64,
    eta0: f64,
    eta_d: f64,
    attenuation: f64,
) -> EfficiencyParams {
    EfficiencyParams {
        n,
        l_km,
        eta0,
        eta_d,
        attenuation,
    }
}

/// Heralding efficiency of the single-photon-bus baseline.
#[pyfunction]
#[pyo3(signature = (n, l_km, eta0=0.96, eta_d=0.96, attenuation=1.0/22.0))]
fn eta_prior(n: usize, l_km: f64, eta0: f64, eta_d: f64, attenuation: f64) -> PyResult<f64> {
    ico_netsim::efficiency::eta_prior(&efficiency_params(n, l_km, eta0, eta_d, attenuation))
        .map_err(sim_err)
}

/// Heralding efficiency of the shared-resource layout.
#[pyfunction]
#[pyo3(signature = (n, l_km, eta0=0.96, eta_d=0.96, attenuation=1.0/22.0))]
fn eta_ours(n: usize, l_km: f64, eta0: f64, eta_d: f64, attenuation: f64) -> PyResult<f64> {
    ico_netsim::efficiency::eta_ours(&efficiency_params(n, l_km, eta0, eta_d, attenuation))
        .map_err(sim_err)
}

/// Closed-form efficiency ratio.
#[pyfunction]
#[pyo3(signature = (n, l_km, eta0=0.96, eta_d=0.96, attenuation=1.0/22.0))]
fn enhancement(n: usize, l_km: f64, eta0: f64, eta_d: f64, attenuation: f64) -> PyResult<f64> {
    ico_netsim::efficiency::enhancement(&efficiency_params(n, l_km, eta0, eta_d, attenuation))
        .map_err(sim_err)
}

/// Distance at which the enhancement crosses 1, or None when it never does.
#[pyfunction]
#[pyo3(signature = (n, eta0=0.96, eta_d=0.96, attenuation=1.0/22.0))]
fn crossover_distance(n: usize, eta0: f64, eta_d: f64, attenuation: f64) -> PyResult<Option<f64>> {
    let base = efficiency_params(n, 0.0, eta0, eta_d, attenuation);
    ico_netsim::efficiency::crossover_distance(n, &base).map_err(sim_err)
}

/// Simulate the two-photon layout; one dict per detector coincidence with
/// keys pair, probability, polarization (amplitudes or None).
#[pyfunction]
fn simulate_two_photon_layout<'py>(
    py: Python<'py>,
    theta: f64,
    lambda1_deg: f64,
    lambda2_deg: f64,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let outcomes =
        ico_netsim::optical::simulate_two_photon_layout(theta, lambda1_deg, lambda2_deg).map_err(sim_err)?;
    let mut out = Vec::with_capacity(outcomes.len());
    for o in outcomes {
        let d = PyDict::new(py);
        d.set_item("pair", o.pair.label())?;
        d.set_item("heralds", o.pair.plus_minus())?;
        d.set_item("probability", o.probability)?;
        d.set_item(
            "polarization",
            o.polarization_state.as_ref().map(amplitudes_of),
        )?;
        out.push(d);
    }
    Ok(out)
}

/// Audit the photonic layout against the abstract engine; dict with keys
/// max_infidelity and total_variation_distance.
#[pyfunction]
#[pyo3(signature = (theta, lambda1_deg, lambda2_deg, tol=1e-9))]
fn optical_report<'py>(
    py: Python<'py>,
    theta: f64,
    lambda1_deg: f64,
    lambda2_deg: f64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let report = ico_netsim::optical::verify_against_abstract(theta, lambda1_deg, lambda2_deg, tol)
        .map_err(sim_err)?;
    let d = PyDict::new(py);
    d.set_item("max_infidelity", report.max_infidelity)?;
    d.set_item("total_variation_distance", report.total_variation_distance)?;
    d.set_item("passes", report.passes(tol))?;
    Ok(d)
}

/// Amplitudes of the graph state for the given edge list.
#[pyfunction]
fn graph_state(vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Vec<Complex64>> {
    let g = Graph::new(vertices, &edges).map_err(sim_err)?;
    Ok(ico_netsim::graphstate::build_graph_state(&g)
        .map_err(sim_err)?
        .amplitudes()
        .to_vec())
}

/// Amplitudes of the order-superposed construction, with or without the
/// interleaved local corrections.
#[pyfunction]
#[pyo3(signature = (vertices, edges, sign="plus", corrections=true))]
fn ico_graph_state(
    vertices: usize,
    edges: Vec<(usize, usize)>,
    sign: &str,
    corrections: bool,
) -> PyResult<Vec<Complex64>> {
    let g = Graph::new(vertices, &edges).map_err(sim_err)?;
    Ok(
        ico_netsim::graphstate::build_ico_graph_state(&g, parse_sign(sign)?, corrections)
            .map_err(sim_err)?
            .amplitudes()
            .to_vec(),
    )
}

/// Max entry deviation of the corrected edge operation from CZ.
#[pyfunction]
#[pyo3(signature = (sign="plus"))]
fn correction_identity_residual(sign: &str) -> PyResult<f64> {
    ico_netsim::graphstate::correction_identity_residual(parse_sign(sign)?).map_err(sim_err)
}

/// True iff every tabulated two-party cell reproduces.
#[pyfunction]
fn table1_passes() -> PyResult<bool> {
    Ok(ico_netsim::protocol::verify_table1()
        .map_err(sim_err)?
        .iter()
        .all(|r| r.pass))
}

/// True iff every tabulated three-party cell reproduces.
#[pyfunction]
fn table2_passes() -> PyResult<bool> {
    Ok(ico_netsim::protocol::verify_table2()
        .map_err(sim_err)?
        .iter()
        .all(|r| r.pass))
}

#[pymodule]
fn ico_netsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(branch_states, m)?)?;
    m.add_function(wrap_pyfunction!(classify_state, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(ghz_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(eta_prior, m)?)?;
    m.add_function(wrap_pyfunction!(eta_ours, m)?)?;
    m.add_function(wrap_pyfunction!(enhancement, m)?)?;
    m.add_function(wrap_pyfunction!(crossover_distance, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_two_photon_layout, m)?)?;
    m.add_function(wrap_pyfunction!(optical_report, m)?)?;
    m.add_function(wrap_pyfunction!(graph_state, m)?)?;
    m.add_function(wrap_pyfunction!(ico_graph_state, m)?)?;
    m.add_function(wrap_pyfunction!(correction_identity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(table1_passes, m)?)?;
    m.add_function(wrap_pyfunction!(table2_passes, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
