//! Python bindings for the fqc crate.
//!
//! The module mirrors the Rust surface closely: immutable Pauli strings and
//! Fock vectors, a mutable circuit builder, the three mode-to-qubit
//! encodings, the edge-operator construction on graphs, the Majorana pair
//! codes, and the verification suites. Matrices cross the boundary as lists
//! of lists of complex numbers, states as flat lists; report structures
//! arrive as plain dicts.

use fqc::circuit::{Circuit as CoreCircuit, CircuitKind, GateDef};
use fqc::codes::MajoranaCode as CoreCode;
use fqc::fock::FockVector as CoreFock;
use fqc::linalg::{CMat, CVec};
use fqc::pauli::PauliString as CorePauli;
use fqc::superfast::{EdgeOperatorSet, GraphSpec};
use fqc::{encodings, protocols, superfast, verify};
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyList};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Inconsistent internal state surfaces as RuntimeError, everything a caller
/// could have passed differently as ValueError.
fn pyerr(e: fqc::Error) -> PyErr {
    use fqc::Error::*;
    match e {
        InconsistentStabilizers(_) | NotQuadratic { .. } | OutsideCode { .. }
        | ImprobableBranch { .. } => PyRuntimeError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(match v {
        Value::Null => py.None(),
        Value::Bool(b) => PyBool::new(py, *b).to_owned().into_any().unbind(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any().unbind()
            }
        }
        Value::String(s) => s.as_str().into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, val) in map {
                dict.set_item(k, json_to_py(py, val)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

fn mat_to_rows(m: &CMat) -> Vec<Vec<Complex64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

fn rows_to_mat(rows: Vec<Vec<Complex64>>) -> PyResult<CMat> {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    if n == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err("matrix rows must be nonempty and equal length"));
    }
    let flat: Vec<Complex64> = rows.into_iter().flatten().collect();
    CMat::from_shape_vec((n, cols), flat)
        .map_err(|e| PyValueError::new_err(e.to_string()))
}

// ---------------------------------------------------------------------------
// Pauli strings
// ---------------------------------------------------------------------------

#[pyclass(name = "PauliString", frozen, eq, hash)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyPauli(CorePauli);

#[pymethods]
impl PyPauli {
    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyPauli(CorePauli::identity(n))
    }

    #[staticmethod]
    fn x(n: usize, q: usize) -> Self {
        PyPauli(CorePauli::x(n, q))
    }

    #[staticmethod]
    fn y(n: usize, q: usize) -> Self {
        PyPauli(CorePauli::y(n, q))
    }

    #[staticmethod]
    fn z(n: usize, q: usize) -> Self {
        PyPauli(CorePauli::z(n, q))
    }

    #[staticmethod]
    fn parity(n: usize) -> Self {
        PyPauli(CorePauli::parity(n))
    }

    /// Parse the display form, e.g. "+i XZ.Y".
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        CorePauli::parse(text).map(PyPauli).map_err(pyerr)
    }

    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn weight(&self) -> usize {
        self.0.weight()
    }

    /// Letter on qubit `q` as one of "I", "X", "Y", "Z".
    fn letter(&self, q: usize) -> String {
        ["I", "X", "Y", "Z"][self.0.letter(q) as usize].to_string()
    }

    fn commutes_with(&self, other: &PyPauli) -> bool {
        self.0.commutes_with(&other.0)
    }

    fn adjoint(&self) -> Self {
        PyPauli(self.0.adjoint())
    }

    fn is_hermitian(&self) -> bool {
        self.0.is_hermitian()
    }

    /// Whether the string commutes with the global parity operator.
    fn is_physical(&self) -> bool {
        self.0.is_physical()
    }

    fn to_matrix(&self) -> Vec<Vec<Complex64>> {
        mat_to_rows(&self.0.to_dense())
    }

    fn apply(&self, state: Vec<Complex64>) -> Vec<Complex64> {
        self.0.apply(&CVec::from(state)).to_vec()
    }

    fn __mul__(&self, other: &PyPauli) -> PyResult<Self> {
        if self.0.num_qubits() != other.0.num_qubits() {
            return Err(PyValueError::new_err("operands act on different widths"));
        }
        Ok(PyPauli(self.0.mul(&other.0)))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PauliString({:?})", self.0.to_string())
    }
}

/// The Majorana generator `c_j` on `m` modes as a Pauli string.
#[pyfunction]
fn majorana(j: usize, m: usize) -> PyPauli {
    PyPauli(CorePauli::majorana(j, m))
}

// ---------------------------------------------------------------------------
// Fock vectors
// ---------------------------------------------------------------------------

#[pyclass(name = "FockVector", frozen)]
#[derive(Clone)]
struct PyFock(CoreFock);

#[pymethods]
impl PyFock {
    /// State with the given amplitudes over occupation-number basis states;
    /// bit `j` of the index is the occupation of mode `j`.
    #[new]
    fn new(m: usize, amplitudes: Vec<Complex64>) -> PyResult<Self> {
        CoreFock::new(m, CVec::from(amplitudes)).map(PyFock).map_err(pyerr)
    }

    #[staticmethod]
    fn basis(m: usize, index: usize) -> PyResult<Self> {
        CoreFock::basis(m, index).map(PyFock).map_err(pyerr)
    }

    #[staticmethod]
    fn vacuum(m: usize) -> PyResult<Self> {
        CoreFock::vacuum(m).map(PyFock).map_err(pyerr)
    }

    #[staticmethod]
    fn from_occupations(occupations: Vec<u8>) -> PyResult<Self> {
        CoreFock::from_occupations(&occupations).map(PyFock).map_err(pyerr)
    }

    #[getter]
    fn num_modes(&self) -> usize {
        self.0.num_modes()
    }

    fn amplitudes(&self) -> Vec<Complex64> {
        self.0.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn inner(&self, other: &PyFock) -> Complex64 {
        self.0.inner(&other.0)
    }

    fn normalized(&self) -> PyResult<Self> {
        self.0.normalized().map(PyFock).map_err(pyerr)
    }

    /// Apply the annihilator `a_j`.
    fn annihilate(&self, j: usize) -> PyResult<Self> {
        self.0.apply_ladder(j, false).map(PyFock).map_err(pyerr)
    }

    /// Apply the creator `a_j^dagger`.
    fn create(&self, j: usize) -> PyResult<Self> {
        self.0.apply_ladder(j, true).map(PyFock).map_err(pyerr)
    }

    fn apply_pauli(&self, p: &PyPauli) -> Self {
        PyFock(self.0.apply_pauli(&p.0))
    }

    /// Squared weight in the even and odd particle-number sectors.
    fn sector_weights(&self) -> (f64, f64) {
        self.0.sector_weights()
    }

    fn __repr__(&self) -> String {
        format!("FockVector(modes={})", self.0.num_modes())
    }
}

// ---------------------------------------------------------------------------
// Circuits and encodings
// ---------------------------------------------------------------------------

#[pyclass(name = "Circuit")]
#[derive(Clone)]
struct PyCircuit(CoreCircuit);

#[pymethods]
impl PyCircuit {
    /// `kind` is "fermionic", "qubit", or "majorana".
    #[new]
    #[pyo3(signature = (kind, width, ancillas = 0))]
    fn new(kind: &str, width: usize, ancillas: usize) -> PyResult<Self> {
        let kind: CircuitKind =
            serde_json::from_value(Value::String(kind.to_string()))
                .map_err(|_| PyValueError::new_err(format!("unknown circuit kind {kind:?}")))?;
        Ok(PyCircuit(CoreCircuit::new(kind, width).with_ancillas(ancillas)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        CoreCircuit::from_json_str(text).map(PyCircuit).map_err(pyerr)
    }

    fn to_json(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        json_to_py(py, &self.0.to_json())
    }

    fn to_json_string(&self) -> String {
        self.0.to_json_string()
    }

    /// Append a library gate by name.
    fn push(&mut self, name: &str, params: Vec<f64>, targets: Vec<usize>) {
        self.0.push(name, params, targets);
    }

    /// Append a gate given by an explicit unitary on the targets.
    fn push_matrix(
        &mut self,
        name: &str,
        matrix: Vec<Vec<Complex64>>,
        targets: Vec<usize>,
    ) -> PyResult<()> {
        self.0.push_raw(name, rows_to_mat(matrix)?, targets);
        Ok(())
    }

    #[getter]
    fn kind(&self) -> String {
        serde_json::to_value(self.0.kind)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    }

    #[getter]
    fn width(&self) -> usize {
        self.0.width
    }

    #[getter]
    fn ancillas(&self) -> usize {
        self.0.ancillas
    }

    fn gate_count(&self) -> usize {
        self.0.gate_count()
    }

    /// Dense unitary of the whole circuit (small widths only).
    fn evaluate(&self) -> PyResult<Vec<Vec<Complex64>>> {
        self.0.evaluate().map(|m| mat_to_rows(&m)).map_err(pyerr)
    }

    fn apply(&self, state: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        self.0.apply(&CVec::from(state)).map(|v| v.to_vec()).map_err(pyerr)
    }

    fn then(&self, other: &PyCircuit) -> PyResult<Self> {
        self.0.then(&other.0).map(PyCircuit).map_err(pyerr)
    }

    fn __repr__(&self) -> String {
        format!(
            "Circuit(kind={:?}, width={}, gates={})",
            self.kind(),
            self.0.width,
            self.0.gate_count()
        )
    }
}

/// Compile a circuit under an encoding ("standard", "tree", or "pair").
/// Returns the output circuit and a report dict.
#[pyfunction]
fn transpile(py: Python<'_>, circuit: &PyCircuit, encoding: &str) -> PyResult<(PyCircuit, Py<PyAny>)> {
    let enc: encodings::Encoding = encoding.parse().map_err(pyerr)?;
    let (out, report) = encodings::transpile(&circuit.0, enc).map_err(pyerr)?;
    let report = serde_json::to_value(&report).map_err(|e| pyerr(e.into()))?;
    Ok((PyCircuit(out), json_to_py(py, &report)?))
}

/// Qubit circuit moving mode `j` of a tree-encoded register onto a fresh
/// ancilla, with the fermionic extraction sign.
#[pyfunction]
fn tree_extraction_circuit(j: usize, m: usize) -> PyResult<PyCircuit> {
    encodings::tree_extraction_circuit(j, m).map(PyCircuit).map_err(pyerr)
}

/// Occupation pattern to stored partial-sum bits.
#[pyfunction]
fn tree_encode(n: u64, m: usize) -> u64 {
    encodings::tree_encode(n, m).x
}

/// Stored partial-sum bits back to the occupation pattern.
#[pyfunction]
fn tree_decode(x: u64, m: usize) -> u64 {
    encodings::tree_decode(&encodings::TreeEncodedState { m, x })
}

// ---------------------------------------------------------------------------
// Edge operators on graphs
// ---------------------------------------------------------------------------

#[pyclass(name = "Graph", frozen)]
#[derive(Clone)]
struct PyGraph(GraphSpec);

#[pymethods]
impl PyGraph {
    #[new]
    fn new(vertices: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        GraphSpec::new(vertices, &edges).map(PyGraph).map_err(pyerr)
    }

    #[getter]
    fn vertices(&self) -> usize {
        self.0.vertex_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().to_vec()
    }

    fn degree(&self, k: usize) -> usize {
        self.0.degree(k)
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.0.vertex_count(), self.0.edge_count())
    }
}

/// The vertex and edge operators of a connected graph, one qubit per edge.
#[pyclass(name = "EdgeOperators", frozen)]
struct PyEdgeOperators(EdgeOperatorSet);

#[pymethods]
impl PyEdgeOperators {
    #[new]
    fn new(graph: &PyGraph) -> PyResult<Self> {
        superfast::build_edge_operators(&graph.0).map(PyEdgeOperators).map_err(pyerr)
    }

    #[getter]
    fn edge_qubits(&self) -> usize {
        self.0.edge_qubits()
    }

    /// The vertex operator at `k`.
    fn btilde(&self, k: usize) -> PyPauli {
        PyPauli(self.0.btilde(k).clone())
    }

    /// The edge operator for the oriented edge `(j, k)`.
    fn atilde(&self, j: usize, k: usize) -> PyResult<PyPauli> {
        self.0.atilde(j, k).map(PyPauli).map_err(pyerr)
    }

    /// Fundamental cycle stabilizers; the codespace is their joint
    /// +1 eigenspace.
    fn stabilizers(&self) -> Vec<PyPauli> {
        self.0.stabilizers().iter().cloned().map(PyPauli).collect()
    }
}

/// Dimension of the joint +1 eigenspace of the cycle stabilizers.
#[pyfunction]
fn superfast_dimension(graph: &PyGraph) -> PyResult<u128> {
    superfast::codespace_dimension(&graph.0).map_err(pyerr)
}

/// Compile a two-mode library gate on the edge `(j, k)` into a qubit
/// circuit acting only on qubits of edges incident to `j` or `k`.
#[pyfunction]
fn superfast_transpile(
    graph: &PyGraph,
    name: &str,
    params: Vec<f64>,
    j: usize,
    k: usize,
) -> PyResult<PyCircuit> {
    let gate = GateDef::named(name, params).resolve().map_err(pyerr)?;
    superfast::transpile_local_gate(&gate, j, k, &graph.0).map(PyCircuit).map_err(pyerr)
}

/// The encoded vacuum: its amplitudes over edge-qubit basis states and the
/// preparation circuit that builds it from |0...0>.
#[pyfunction]
fn superfast_vacuum(graph: &PyGraph) -> PyResult<(Vec<Complex64>, PyCircuit)> {
    let (state, prep) = superfast::vacuum_state(&graph.0).map_err(pyerr)?;
    Ok((state.to_vec(), PyCircuit(prep)))
}

// ---------------------------------------------------------------------------
// Majorana pair codes
// ---------------------------------------------------------------------------

#[pyclass(name = "MajoranaCode", frozen)]
struct PyCode(CoreCode);

#[pymethods]
impl PyCode {
    #[getter]
    fn num_qubits(&self) -> usize {
        self.0.num_qubits()
    }

    fn stabilizers(&self) -> Vec<PyPauli> {
        self.0.stabilizers().iter().cloned().map(PyPauli).collect()
    }

    fn logical_x(&self) -> PyPauli {
        PyPauli(self.0.logical_x().clone())
    }

    fn logical_y(&self) -> PyPauli {
        PyPauli(self.0.logical_y().clone())
    }

    fn __repr__(&self) -> String {
        format!(
            "MajoranaCode(qubits={}, stabilizers={})",
            self.0.num_qubits(),
            self.0.stabilizers().len()
        )
    }
}

/// One logical qubit from `m` modes: stabilizers pair consecutive Majorana
/// generators under the permutation `tau`, the first two become logicals.
#[pyfunction]
fn permutation_code(tau: Vec<usize>) -> PyResult<PyCode> {
    if tau.len() % 2 != 0 {
        return Err(PyValueError::new_err("the pairing needs an even number of indices"));
    }
    let m = tau.len() / 2;
    fqc::codes::permutation_code(&tau, m).map(PyCode).map_err(pyerr)
}

/// The distance-`l` rectangular pairing on `l^2` modes.
#[pyfunction]
fn shor_like_code(l: usize) -> PyResult<PyCode> {
    fqc::codes::shor_like_code(l).map(PyCode).map_err(pyerr)
}

/// Weight-ordered search for the code distance. Returns a dict with the
/// distance and a minimal logical witness.
#[pyfunction]
#[pyo3(signature = (code, max_weight = 4))]
fn code_distance(py: Python<'_>, code: &PyCode, max_weight: usize) -> PyResult<Py<PyAny>> {
    let report = fqc::codes::code_distance(&code.0, max_weight).map_err(pyerr)?;
    let dict = PyDict::new(py);
    dict.set_item("distance", report.distance)?;
    dict.set_item("witness", report.witness.to_string())?;
    Ok(dict.into_any().unbind())
}

// ---------------------------------------------------------------------------
// Measurement protocol
// ---------------------------------------------------------------------------

/// A random normalized input for the protocol: the ancilla mode (mode 2)
/// empty, everything else generic.
#[pyfunction]
#[pyo3(signature = (seed, m = 4))]
fn random_protocol_input(seed: u64, m: usize) -> PyResult<PyFock> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    protocols::random_protocol_input(&mut rng, m).map(PyFock).map_err(pyerr)
}

/// Run the measurement-assisted quartic gate. `force` pins the two outcomes
/// as a pair from {+1, -1} x {+1, -1} instead of sampling them. Returns the
/// output state and a branch record dict.
#[pyfunction]
#[pyo3(signature = (input, seed, force = None))]
fn run_protocol(
    py: Python<'_>,
    input: &PyFock,
    seed: u64,
    force: Option<(i8, i8)>,
) -> PyResult<(PyFock, Py<PyAny>)> {
    if let Some((z, y)) = force {
        if z.abs() != 1 || y.abs() != 1 {
            return Err(PyValueError::new_err("forced outcomes must be +1 or -1"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (out, record) = protocols::run_protocol(&input.0, force, &mut rng).map_err(pyerr)?;
    let dict = PyDict::new(py);
    dict.set_item("z", record.z)?;
    dict.set_item("y", record.y)?;
    dict.set_item("probability", record.probability)?;
    dict.set_item("correction", record.correction)?;
    Ok((PyFock(out), dict.into_any().unbind()))
}

/// The state the protocol must produce for a given input.
#[pyfunction]
fn protocol_target(input: &PyFock) -> PyResult<PyFock> {
    protocols::protocol_target(&input.0).map(PyFock).map_err(pyerr)
}

/// |<target|output>|, phase-insensitive.
#[pyfunction]
fn protocol_fidelity(input: &PyFock, output: &PyFock) -> PyResult<f64> {
    protocols::protocol_fidelity(&input.0, &output.0).map_err(pyerr)
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

#[pyfunction]
fn suite_names() -> Vec<String> {
    verify::Suite::EVERY.iter().map(|s| s.name().to_string()).collect()
}

/// Run one named verification suite and return its report as a dict.
#[pyfunction]
#[pyo3(signature = (name, seed = 42, tolerance = 1e-10, trials = 100))]
fn run_suite(
    py: Python<'_>,
    name: &str,
    seed: u64,
    tolerance: f64,
    trials: usize,
) -> PyResult<Py<PyAny>> {
    let suite: verify::Suite = name.parse().map_err(pyerr)?;
    let report = verify::run_suite(suite, &verify::SuiteOptions { seed, tolerance, trials });
    json_to_py(py, &serde_json::to_value(&report).map_err(|e| pyerr(e.into()))?)
}

#[pymodule]
fn fqc_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyPauli>()?;
    m.add_class::<PyFock>()?;
    m.add_class::<PyCircuit>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyEdgeOperators>()?;
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(majorana, m)?)?;
    m.add_function(wrap_pyfunction!(transpile, m)?)?;
    m.add_function(wrap_pyfunction!(tree_extraction_circuit, m)?)?;
    m.add_function(wrap_pyfunction!(tree_encode, m)?)?;
    m.add_function(wrap_pyfunction!(tree_decode, m)?)?;
    m.add_function(wrap_pyfunction!(superfast_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(superfast_transpile, m)?)?;
    m.add_function(wrap_pyfunction!(superfast_vacuum, m)?)?;
    m.add_function(wrap_pyfunction!(permutation_code, m)?)?;
    m.add_function(wrap_pyfunction!(shor_like_code, m)?)?;
    m.add_function(wrap_pyfunction!(code_distance, m)?)?;
    m.add_function(wrap_pyfunction!(random_protocol_input, m)?)?;
    m.add_function(wrap_pyfunction!(run_protocol, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_target, m)?)?;
    m.add_function(wrap_pyfunction!(protocol_fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(suite_names, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
