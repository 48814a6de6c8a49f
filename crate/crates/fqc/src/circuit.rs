//! The gate library, circuits, and dense evaluation.
//!
//! A circuit is a list of gate applications on a register of `width` modes
//! or qubits plus `ancillas` scratch qubits appended at the high end of the
//! index. `gates[0]` acts first. What an application *means* depends on the
//! circuit kind:
//!
//! * `qubit` - plain tensor-product application, gate qubit `r` at
//!   `targets[r]`.
//! * `fermionic` - the gate matrix must be parity-preserving and is applied
//!   through mode extraction, which inserts the fermionic sign factors; for
//!   non-adjacent targets this differs from the qubit application of the
//!   same matrix.
//! * `majorana` - targets are Majorana indices in `0..2*(width+ancillas)`,
//!   and the gate matrix (given on `ceil(p/2)` modes) is expanded in the
//!   monomial basis `c_S`, then each `c_r` is substituted by `c_{targets[r]}`.
//!
//! All matrix exponentials in the library have exact closed forms because
//! every generator squares to `+-1` on its support.

use crate::fock;
use crate::linalg::{self, c64, CMat, CVec, ONE, ZERO};
use crate::pauli::{majorana_product, PauliString};
use crate::{Error, Result, DENSE_WIDTH_CAP, PARITY_TOL};
use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_4, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CircuitKind {
    Fermionic,
    Majorana,
    Qubit,
}

impl std::fmt::Display for CircuitKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CircuitKind::Fermionic => "fermionic",
            CircuitKind::Majorana => "majorana",
            CircuitKind::Qubit => "qubit",
        };
        write!(f, "{s}")
    }
}

/// A gate reference: either a library name with parameters, or an explicit
/// matrix kept alongside a label.
#[derive(Debug, Clone, PartialEq)]
pub struct GateDef {
    pub name: String,
    pub params: Vec<f64>,
    pub matrix: Option<CMat>,
}

impl GateDef {
    pub fn named(name: impl Into<String>, params: Vec<f64>) -> Self {
        GateDef { name: name.into(), params, matrix: None }
    }

    pub fn raw(name: impl Into<String>, matrix: CMat) -> Self {
        GateDef { name: name.into(), params: Vec::new(), matrix: Some(matrix) }
    }

    /// The dense matrix of this gate on its own standard space.
    pub fn resolve(&self) -> Result<CMat> {
        if let Some(m) = &self.matrix {
            if m.nrows() != m.ncols() || !m.nrows().is_power_of_two() {
                return Err(Error::BadGate {
                    name: self.name.clone(),
                    reason: format!("matrix shape {}x{} is not a square power of two", m.nrows(), m.ncols()),
                });
            }
            return Ok(m.clone());
        }
        library_matrix(&self.name, &self.params)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateApplication {
    pub gate: GateDef,
    pub targets: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub kind: CircuitKind,
    pub width: usize,
    pub ancillas: usize,
    pub gates: Vec<GateApplication>,
}

impl Circuit {
    pub fn new(kind: CircuitKind, width: usize) -> Self {
        Circuit { kind, width, ancillas: 0, gates: Vec::new() }
    }

    pub fn with_ancillas(mut self, ancillas: usize) -> Self {
        self.ancillas = ancillas;
        self
    }

    pub fn push(&mut self, name: &str, params: Vec<f64>, targets: Vec<usize>) {
        self.gates.push(GateApplication { gate: GateDef::named(name, params), targets });
    }

    pub fn push_raw(&mut self, name: &str, matrix: CMat, targets: Vec<usize>) {
        self.gates.push(GateApplication { gate: GateDef::raw(name, matrix), targets });
    }

    /// Register size including ancillas.
    pub fn total_width(&self) -> usize {
        self.width + self.ancillas
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    /// Dense unitary of the whole circuit over `2^total_width` dimensions.
    pub fn evaluate(&self) -> Result<CMat> {
        let total = self.total_width();
        if total > DENSE_WIDTH_CAP {
            return Err(Error::WidthCap { requested: total, cap: DENSE_WIDTH_CAP });
        }
        let dim = 1usize << total;
        let actions: Vec<AppAction> = self
            .gates
            .iter()
            .map(|app| prepare_action(self.kind, total, app))
            .collect::<Result<_>>()?;
        let mut out = CMat::zeros((dim, dim));
        for col in 0..dim {
            let mut v = linalg::basis_state(dim, col);
            for action in &actions {
                action.apply(&mut v, total);
            }
            for row in 0..dim {
                out[[row, col]] = v[row];
            }
        }
        Ok(out)
    }

    /// Apply the circuit to a state vector of `2^total_width` amplitudes.
    pub fn apply(&self, state: &CVec) -> Result<CVec> {
        let total = self.total_width();
        if total > DENSE_WIDTH_CAP {
            return Err(Error::WidthCap { requested: total, cap: DENSE_WIDTH_CAP });
        }
        let dim = 1usize << total;
        if state.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: state.len() });
        }
        let mut v = state.clone();
        for app in &self.gates {
            let action = prepare_action(self.kind, total, app)?;
            action.apply(&mut v, total);
        }
        Ok(v)
    }

    /// Concatenation: `self` then `other` on the same register.
    pub fn then(&self, other: &Circuit) -> Result<Circuit> {
        if self.kind != other.kind || self.total_width() != other.total_width() {
            return Err(Error::BadInput("cannot concatenate circuits of different shape".into()));
        }
        let mut out = self.clone();
        out.gates.extend(other.gates.iter().cloned());
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CircuitJson::from(self)).expect("circuit serialisation cannot fail")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&CircuitJson::from(self)).expect("circuit serialisation cannot fail")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let mirror: CircuitJson = serde_json::from_value(v.clone())?;
        mirror.try_into()
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let mirror: CircuitJson = serde_json::from_str(s)?;
        mirror.try_into()
    }
}

/// A gate application resolved against the circuit kind, ready to run on
/// state columns.
enum AppAction {
    Qubit { matrix: CMat, targets: Vec<usize> },
    Fermionic { matrix: CMat, targets: Vec<usize> },
    Majorana { terms: Vec<(Complex64, PauliString)> },
}

impl AppAction {
    fn apply(&self, state: &mut CVec, total: usize) {
        match self {
            AppAction::Qubit { matrix, targets } => {
                linalg::apply_gate_to_state(state, matrix, targets, total);
            }
            AppAction::Fermionic { matrix, targets } => {
                *state = fock::apply_fermionic_amps(state, matrix, targets);
            }
            AppAction::Majorana { terms } => {
                let mut out = CVec::zeros(state.len());
                for (coeff, p) in terms {
                    out = out + p.apply(state).mapv(|v| v * coeff);
                }
                *state = out;
            }
        }
    }
}

fn prepare_action(kind: CircuitKind, total: usize, app: &GateApplication) -> Result<AppAction> {
    let matrix = app.gate.resolve()?;
    let p = app.targets.len();
    match kind {
        CircuitKind::Qubit => {
            fock::validate_targets(&app.targets, total)?;
            expect_dim(&app.gate.name, &matrix, 1 << p)?;
            Ok(AppAction::Qubit { matrix, targets: app.targets.clone() })
        }
        CircuitKind::Fermionic => {
            fock::validate_targets(&app.targets, total)?;
            expect_dim(&app.gate.name, &matrix, 1 << p)?;
            fock::check_parity_preserving(&matrix, PARITY_TOL)?;
            Ok(AppAction::Fermionic { matrix, targets: app.targets.clone() })
        }
        CircuitKind::Majorana => {
            fock::validate_targets(&app.targets, 2 * total)?;
            expect_dim(&app.gate.name, &matrix, 1 << p.div_ceil(2))?;
            let terms = majorana_expansion(&app.gate.name, &matrix, &app.targets, total)?;
            Ok(AppAction::Majorana { terms })
        }
    }
}

fn expect_dim(name: &str, matrix: &CMat, dim: usize) -> Result<()> {
    if matrix.nrows() != dim {
        return Err(Error::BadGate {
            name: name.to_string(),
            reason: format!("matrix dimension {} does not fit {} target(s)", matrix.nrows(), dim.trailing_zeros()),
        });
    }
    Ok(())
}

/// Expand a gate matrix over `p` Majorana sites in the monomial basis
/// `{ c_S : S subset of [p] }`, substituting `c_r -> c_{targets[r]}` on a
/// register of `m` modes. Fails when the matrix is not an even (physical)
/// element of the algebra the sites generate.
pub fn majorana_expansion(
    name: &str,
    matrix: &CMat,
    targets: &[usize],
    m: usize,
) -> Result<Vec<(Complex64, PauliString)>> {
    let p = targets.len();
    let local_modes = p.div_ceil(2);
    let dim = 1usize << local_modes;
    if matrix.nrows() != dim || matrix.ncols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: matrix.nrows() });
    }
    let mut terms = Vec::new();
    let mut recon = CMat::zeros((dim, dim));
    for s in 0..(1u32 << p) {
        let local_idx: Vec<usize> = (0..p).filter(|r| (s >> r) & 1 == 1).collect();
        let local = majorana_product(&local_idx, local_modes);
        let coeff = local.adjoint().trace_product(matrix) / c64(dim as f64, 0.0);
        if coeff.norm() <= 1e-14 {
            continue;
        }
        if local_idx.len() % 2 == 1 {
            return Err(Error::BadGate {
                name: name.to_string(),
                reason: format!(
                    "odd Majorana monomial c_{local_idx:?} appears with coefficient {coeff}; the gate is not physical"
                ),
            });
        }
        recon = recon + local.to_dense().mapv(|v| v * coeff);
        let substituted: Vec<usize> = local_idx.iter().map(|&r| targets[r]).collect();
        terms.push((coeff, majorana_product(&substituted, m)));
    }
    let residual = linalg::frobenius_distance(&recon, matrix);
    if residual > 1e-10 {
        return Err(Error::BadGate {
            name: name.to_string(),
            reason: format!("matrix lies outside the even Majorana span (residual {residual:.3e})"),
        });
    }
    Ok(terms)
}

/// The rotation induced on Majorana generators by conjugation:
/// `U c_j U^dagger = sum_k beta_{jk} c_k`. Errors when conjugation leaves
/// the linear span (the circuit contained a non-quadratic gate) and checks
/// that `beta` is in SO(2m).
pub fn rotation_action(c: &Circuit) -> Result<Array2<f64>> {
    let total = c.total_width();
    let u = c.evaluate()?;
    let udag = linalg::adjoint(&u);
    let n_maj = 2 * total;
    let dim = 1usize << total;
    let mut beta = Array2::<f64>::zeros((n_maj, n_maj));
    for j in 0..n_maj {
        let cj = PauliString::majorana(j, total).to_dense();
        let w = u.dot(&cj).dot(&udag);
        let mut recon = CMat::zeros((dim, dim));
        for k in 0..n_maj {
            let ck = PauliString::majorana(k, total);
            let coeff = ck.trace_product(&w) / c64(dim as f64, 0.0);
            beta[[j, k]] = coeff.re;
            if coeff.norm() > 1e-14 {
                recon = recon + ck.to_dense().mapv(|v| v * c64(coeff.re, 0.0));
            }
            if coeff.im.abs() > 1e-9 {
                return Err(Error::NotQuadratic { residual: coeff.im.abs() });
            }
        }
        let residual = linalg::frobenius_distance(&w, &recon);
        if residual > 1e-9 {
            return Err(Error::NotQuadratic { residual });
        }
    }
    let gram = beta.t().dot(&beta);
    let mut dev = 0.0f64;
    for j in 0..n_maj {
        for k in 0..n_maj {
            let expect = if j == k { 1.0 } else { 0.0 };
            dev = dev.max((gram[[j, k]] - expect).abs());
        }
    }
    if dev > 1e-9 {
        return Err(Error::BadInput(format!("rotation action is not orthogonal (deviation {dev:.3e})")));
    }
    let det = linalg::det_real(&beta);
    if (det - 1.0).abs() > 1e-6 {
        return Err(Error::BadInput(format!("rotation action has determinant {det}, expected +1")));
    }
    Ok(beta)
}

// ---------------------------------------------------------------------------
// Gate library
// ---------------------------------------------------------------------------

const HOP_FIXED: f64 = FRAC_PI_4;
const PAIR_FIXED: f64 = FRAC_PI_4;
const PHASE_FIXED: f64 = FRAC_PI_4;
const INT_FIXED: f64 = PI;
const MAJ_ROT_FIXED: f64 = PI / 8.0;
const MAJ_QUARTIC_FIXED: f64 = FRAC_PI_4;

/// Library lookup: the dense matrix of a named gate.
///
/// Fermionic gates are given on their own modes (mode 0 = least significant
/// bit), Majorana gates on `ceil(arity/2)` modes, qubit gates on their own
/// qubits with the control first for controlled gates.
pub fn library_matrix(name: &str, params: &[f64]) -> Result<CMat> {
    let unknown = || Error::UnknownGate(name.to_string());
    let matrix = match name {
        // exp(i beta a^dagger a) = diag(1, e^{i beta})
        "phase_n" => diag(&[ONE, phase(one_param(name, params)?)]),
        // exp(i beta n_0 n_1)
        "int_nn" => diag(&[ONE, ONE, ONE, phase(one_param(name, params)?)]),
        // exp(i (gamma a_0^dagger a_1 + conj(gamma) a_1^dagger a_0))
        "hop" => hop_matrix(complex_param(name, params)?),
        // exp(i (gamma a_1 a_0 + conj(gamma) a_0^dagger a_1^dagger))
        "pair" => pair_matrix(complex_param(name, params)?),
        "fswap" => {
            no_params(name, params)?;
            let mut m = CMat::zeros((4, 4));
            m[[0, 0]] = ONE;
            m[[1, 2]] = ONE;
            m[[2, 1]] = ONE;
            m[[3, 3]] = -ONE;
            m
        }
        // Parity-preserving extension of exp(i pi/4 sigma^x): exp(pi/4 c_1 c_2).
        "ppg" => {
            no_params(name, params)?;
            crate::pauli::exp_majorana_quadratic(2, 1, 2, FRAC_PI_4)
        }
        // |a,b> -> 2^{-1/2} sum_c (-1)^{bc} |a+b+c, c>
        "pph" => {
            no_params(name, params)?;
            let r = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            let mut m = CMat::zeros((4, 4));
            for a in 0..2usize {
                for b in 0..2usize {
                    for cc in 0..2usize {
                        let sign = if b & cc == 1 { -1.0 } else { 1.0 };
                        let row = ((a + b + cc) & 1) | (cc << 1);
                        m[[row, a | (b << 1)]] += r * c64(sign, 0.0);
                    }
                }
            }
            m
        }
        "fbasis_phase" => {
            no_params(name, params)?;
            library_matrix("phase_n", &[PHASE_FIXED])?
        }
        "fbasis_int" => {
            no_params(name, params)?;
            library_matrix("int_nn", &[INT_FIXED])?
        }
        "fbasis_hop" => {
            no_params(name, params)?;
            library_matrix("hop", &[HOP_FIXED])?
        }
        "fbasis_pair" => {
            no_params(name, params)?;
            library_matrix("pair", &[PAIR_FIXED])?
        }
        // exp(theta c_0 c_1) on one mode = diag(e^{i theta}, e^{-i theta})
        "maj_rot" => {
            let theta = one_param(name, params)?;
            diag(&[phase(theta), phase(-theta)])
        }
        // exp(i theta c_0 c_1 c_2 c_3) on two modes
        "maj_quartic" => {
            let theta = one_param(name, params)?;
            diag(&[phase(-theta), phase(theta), phase(theta), phase(-theta)])
        }
        "mbasis_rot" => {
            no_params(name, params)?;
            library_matrix("maj_rot", &[MAJ_ROT_FIXED])?
        }
        "mbasis_quartic" => {
            no_params(name, params)?;
            library_matrix("maj_quartic", &[MAJ_QUARTIC_FIXED])?
        }
        "h" => {
            no_params(name, params)?;
            let r = c64(std::f64::consts::FRAC_1_SQRT_2, 0.0);
            cmat2(r, r, r, -r)
        }
        "x" => {
            no_params(name, params)?;
            cmat2(ZERO, ONE, ONE, ZERO)
        }
        "y" => {
            no_params(name, params)?;
            cmat2(ZERO, c64(0.0, -1.0), c64(0.0, 1.0), ZERO)
        }
        "z" => {
            no_params(name, params)?;
            diag(&[ONE, -ONE])
        }
        "s" => {
            no_params(name, params)?;
            diag(&[ONE, c64(0.0, 1.0)])
        }
        "t" => {
            no_params(name, params)?;
            diag(&[ONE, phase(FRAC_PI_4)])
        }
        // Lambda(e^{i phi})
        "phase" => diag(&[ONE, phase(one_param(name, params)?)]),
        "cx" => {
            no_params(name, params)?;
            let mut m = CMat::zeros((4, 4));
            m[[0, 0]] = ONE;
            m[[2, 2]] = ONE;
            m[[3, 1]] = ONE;
            m[[1, 3]] = ONE;
            m
        }
        "cz" | "d" => {
            no_params(name, params)?;
            diag(&[ONE, ONE, ONE, -ONE])
        }
        "swap" => {
            no_params(name, params)?;
            let mut m = CMat::zeros((4, 4));
            m[[0, 0]] = ONE;
            m[[2, 1]] = ONE;
            m[[1, 2]] = ONE;
            m[[3, 3]] = ONE;
            m
        }
        // Lambda(ppext(sigma^x)): |a,b,c> -> |a, b+a, c+a>
        "cppx" => {
            no_params(name, params)?;
            let mut m = CMat::zeros((8, 8));
            for idx in 0..8usize {
                let out = if idx & 1 == 1 { idx ^ 0b110 } else { idx };
                m[[out, idx]] = ONE;
            }
            m
        }
        _ => return Err(unknown()),
    };
    Ok(matrix)
}

/// The natural circuit kind of a library gate, if it has one.
pub fn library_kind(name: &str) -> Option<CircuitKind> {
    match name {
        "phase_n" | "int_nn" | "hop" | "pair" | "fswap" | "ppg" | "fbasis_phase" | "fbasis_int"
        | "fbasis_hop" | "fbasis_pair" => Some(CircuitKind::Fermionic),
        "maj_rot" | "maj_quartic" | "mbasis_rot" | "mbasis_quartic" => Some(CircuitKind::Majorana),
        "h" | "x" | "y" | "z" | "s" | "t" | "phase" | "cx" | "cz" | "d" | "swap" | "cppx" | "pph" => {
            Some(CircuitKind::Qubit)
        }
        _ => None,
    }
}

/// Number of targets a library gate expects (Majorana gates count Majorana
/// sites, not modes).
pub fn library_arity(name: &str) -> Option<usize> {
    match name {
        "phase_n" | "fbasis_phase" | "h" | "x" | "y" | "z" | "s" | "t" | "phase" => Some(1),
        "int_nn" | "hop" | "pair" | "fswap" | "ppg" | "pph" | "fbasis_int" | "fbasis_hop"
        | "fbasis_pair" | "cx" | "cz" | "d" | "swap" | "maj_rot" | "mbasis_rot" => Some(2),
        "cppx" => Some(3),
        "maj_quartic" | "mbasis_quartic" => Some(4),
        _ => None,
    }
}

fn phase(theta: f64) -> Complex64 {
    c64(theta.cos(), theta.sin())
}

fn diag(entries: &[Complex64]) -> CMat {
    let mut m = CMat::zeros((entries.len(), entries.len()));
    for (i, &e) in entries.iter().enumerate() {
        m[[i, i]] = e;
    }
    m
}

fn cmat2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> CMat {
    let mut m = CMat::zeros((2, 2));
    m[[0, 0]] = a;
    m[[0, 1]] = b;
    m[[1, 0]] = c;
    m[[1, 1]] = d;
    m
}

fn one_param(name: &str, params: &[f64]) -> Result<f64> {
    if params.len() != 1 {
        return Err(Error::BadGate {
            name: name.to_string(),
            reason: format!("expected 1 parameter, got {}", params.len()),
        });
    }
    Ok(params[0])
}

fn no_params(name: &str, params: &[f64]) -> Result<()> {
    if !params.is_empty() {
        return Err(Error::BadGate {
            name: name.to_string(),
            reason: format!("expected no parameters, got {}", params.len()),
        });
    }
    Ok(())
}

fn complex_param(name: &str, params: &[f64]) -> Result<Complex64> {
    match params {
        [re] => Ok(c64(*re, 0.0)),
        [re, im] => Ok(c64(*re, *im)),
        _ => Err(Error::BadGate {
            name: name.to_string(),
            reason: format!("expected 1 or 2 parameters, got {}", params.len()),
        }),
    }
}

/// Acts on the odd block span{|10>, |01>}; the generator has
/// `<10|K|01> = gamma`.
fn hop_matrix(gamma: Complex64) -> CMat {
    let g = gamma.norm();
    let mut m = diag(&[ONE, ONE, ONE, ONE]);
    if g == 0.0 {
        return m;
    }
    let dir = gamma / g;
    m[[1, 1]] = c64(g.cos(), 0.0);
    m[[2, 2]] = c64(g.cos(), 0.0);
    m[[1, 2]] = c64(0.0, g.sin()) * dir;
    m[[2, 1]] = c64(0.0, g.sin()) * dir.conj();
    m
}

/// Acts on the even block span{|00>, |11>}; the generator has
/// `<00|K|11> = gamma` from `gamma a_1 a_0`.
fn pair_matrix(gamma: Complex64) -> CMat {
    let g = gamma.norm();
    let mut m = diag(&[ONE, ONE, ONE, ONE]);
    if g == 0.0 {
        return m;
    }
    let dir = gamma / g;
    m[[0, 0]] = c64(g.cos(), 0.0);
    m[[3, 3]] = c64(g.cos(), 0.0);
    m[[0, 3]] = c64(0.0, g.sin()) * dir;
    m[[3, 0]] = c64(0.0, g.sin()) * dir.conj();
    m
}

// ---------------------------------------------------------------------------
// JSON mirror
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct GateJson {
    name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    params: Vec<f64>,
    targets: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    matrix: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
struct CircuitJson {
    kind: CircuitKind,
    width: usize,
    #[serde(default)]
    ancillas: usize,
    gates: Vec<GateJson>,
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        CircuitJson {
            kind: c.kind,
            width: c.width,
            ancillas: c.ancillas,
            gates: c
                .gates
                .iter()
                .map(|app| GateJson {
                    name: app.gate.name.clone(),
                    params: app.gate.params.clone(),
                    targets: app.targets.clone(),
                    matrix: app.gate.matrix.as_ref().map(|m| {
                        m.iter().map(|v| [v.re, v.im]).collect()
                    }),
                })
                .collect(),
        }
    }
}

impl TryFrom<CircuitJson> for Circuit {
    type Error = Error;

    fn try_from(j: CircuitJson) -> Result<Circuit> {
        let mut gates = Vec::with_capacity(j.gates.len());
        for g in j.gates {
            let matrix = match g.matrix {
                None => None,
                Some(flat) => {
                    let dim = (flat.len() as f64).sqrt().round() as usize;
                    if dim * dim != flat.len() || !dim.is_power_of_two() {
                        return Err(Error::BadInput(format!(
                            "gate {:?} matrix has {} entries, not a square power of two",
                            g.name,
                            flat.len()
                        )));
                    }
                    let data: Vec<Complex64> = flat.iter().map(|[re, im]| c64(*re, *im)).collect();
                    Some(
                        CMat::from_shape_vec((dim, dim), data)
                            .expect("shape checked above"),
                    )
                }
            };
            gates.push(GateApplication {
                gate: GateDef { name: g.name, params: g.params, matrix },
                targets: g.targets,
            });
        }
        Ok(Circuit { kind: j.kind, width: j.width, ancillas: j.ancillas, gates })
    }
}

/// `Lambda(-i)` on one qubit as a power of the fixed-angle phase gate: six
/// applications of `exp(i pi/4 a^dagger a)`.
pub const LAMBDA_MINUS_I_POWER: usize = 6;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_distance, is_unitary, max_abs_diff};
    use crate::pauli::{exp_majorana_quadratic, exp_majorana_quartic};
    use crate::testkit::expm;

    fn named_samples() -> Vec<(&'static str, Vec<f64>)> {
        vec![
            ("phase_n", vec![0.37]),
            ("int_nn", vec![1.3]),
            ("hop", vec![0.4, 0.2]),
            ("pair", vec![0.9]),
            ("fswap", vec![]),
            ("ppg", vec![]),
            ("pph", vec![]),
            ("fbasis_phase", vec![]),
            ("fbasis_int", vec![]),
            ("fbasis_hop", vec![]),
            ("fbasis_pair", vec![]),
            ("maj_rot", vec![0.7]),
            ("maj_quartic", vec![0.3]),
            ("mbasis_rot", vec![]),
            ("mbasis_quartic", vec![]),
            ("h", vec![]),
            ("x", vec![]),
            ("y", vec![]),
            ("z", vec![]),
            ("s", vec![]),
            ("t", vec![]),
            ("phase", vec![0.2]),
            ("cx", vec![]),
            ("cz", vec![]),
            ("swap", vec![]),
            ("cppx", vec![]),
        ]
    }

    #[test]
    fn every_library_gate_is_unitary() {
        for (name, params) in named_samples() {
            let m = library_matrix(name, &params).unwrap();
            assert!(is_unitary(&m, 1e-12), "{name} is not unitary");
        }
    }

    #[test]
    fn fermionic_and_majorana_gates_preserve_parity() {
        for (name, params) in named_samples() {
            match library_kind(name) {
                Some(CircuitKind::Fermionic) | Some(CircuitKind::Majorana) => {
                    let m = library_matrix(name, &params).unwrap();
                    assert!(
                        crate::fock::parity_deviation(&m) < 1e-12,
                        "{name} does not preserve parity"
                    );
                }
                _ => {}
            }
        }
    }

    #[test]
    fn hop_and_pair_match_series_exponential() {
        // Generators written as ladder polynomials, exponentiated by a
        // Taylor oracle with scaling and squaring.
        use crate::fock::{LadderPolynomial, LadderTerm};
        let gamma = c64(0.31, -0.44);
        let hop_gen = LadderPolynomial::new(
            2,
            vec![
                LadderTerm { coeff: c64(0.0, 1.0) * gamma, factors: vec![(0, true), (1, false)] },
                LadderTerm { coeff: c64(0.0, 1.0) * gamma.conj(), factors: vec![(1, true), (0, false)] },
            ],
        )
        .unwrap()
        .to_dense()
        .unwrap();
        assert!(max_abs_diff(&expm(&hop_gen), &hop_matrix(gamma)) < 1e-12);

        let pair_gen = LadderPolynomial::new(
            2,
            vec![
                LadderTerm {
                    coeff: c64(0.0, 1.0) * gamma,
                    factors: vec![(1, false), (0, false)],
                },
                LadderTerm {
                    coeff: c64(0.0, 1.0) * gamma.conj(),
                    factors: vec![(0, true), (1, true)],
                },
            ],
        )
        .unwrap()
        .to_dense()
        .unwrap();
        assert!(max_abs_diff(&expm(&pair_gen), &pair_matrix(gamma)) < 1e-12);
    }

    #[test]
    fn phase_and_interaction_match_series_exponential() {
        use crate::fock::LadderPolynomial;
        let beta = 0.83;
        let n0 = LadderPolynomial::number_op(1, 0).unwrap().to_dense().unwrap();
        let gen = n0.mapv(|v| v * c64(0.0, beta));
        assert!(max_abs_diff(&expm(&gen), &library_matrix("phase_n", &[beta]).unwrap()) < 1e-12);

        let n0 = LadderPolynomial::number_op(2, 0).unwrap().to_dense().unwrap();
        let n1 = LadderPolynomial::number_op(2, 1).unwrap().to_dense().unwrap();
        let gen = n0.dot(&n1).mapv(|v| v * c64(0.0, beta));
        assert!(max_abs_diff(&expm(&gen), &library_matrix("int_nn", &[beta]).unwrap()) < 1e-12);
    }

    #[test]
    fn closed_form_majorana_exponentials_match_series() {
        let q = exp_majorana_quadratic(2, 0, 3, 0.42);
        let gen = majorana_product(&[0, 3], 2).to_dense().mapv(|v| v * 0.42);
        assert!(max_abs_diff(&q, &expm(&gen)) < 1e-12);

        let q = exp_majorana_quartic(2, [0, 1, 2, 3], 0.3);
        let gen = majorana_product(&[0, 1, 2, 3], 2).to_dense().mapv(|v| v * c64(0.0, 0.3));
        assert!(max_abs_diff(&q, &expm(&gen)) < 1e-12);
    }

    #[test]
    fn fixed_phase_gate_as_majorana_rotation() {
        // exp(i pi/4 n) = e^{i pi/8} exp(-pi/8 c_0 c_1), global phase included.
        let lhs = library_matrix("fbasis_phase", &[]).unwrap();
        let rot = exp_majorana_quadratic(1, 0, 1, -PI / 8.0);
        let rhs = rot.mapv(|v| v * phase(PI / 8.0));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn fixed_interaction_gate_as_majorana_rotations() {
        // exp(i pi n_0 n_1) = e^{-i pi/4} exp(pi/4 c_0 c_1) exp(pi/4 c_2 c_3)
        //                     exp(i pi/4 c_0 c_1 c_2 c_3).
        let lhs = library_matrix("fbasis_int", &[]).unwrap();
        let rhs = exp_majorana_quadratic(2, 0, 1, FRAC_PI_4)
            .dot(&exp_majorana_quadratic(2, 2, 3, FRAC_PI_4))
            .dot(&exp_majorana_quartic(2, [0, 1, 2, 3], FRAC_PI_4))
            .mapv(|v| v * phase(-FRAC_PI_4));
        assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn fswap_is_swap_then_defect() {
        let swap = library_matrix("swap", &[]).unwrap();
        let d = library_matrix("cz", &[]).unwrap();
        let fswap = library_matrix("fswap", &[]).unwrap();
        assert_eq!(frobenius_distance(&swap.dot(&d), &fswap), 0.0);

        // fswap |1,1> = -|1,1>.
        let mut c = Circuit::new(CircuitKind::Fermionic, 2);
        c.push("fswap", vec![], vec![0, 1]);
        let v = c.apply(&linalg::basis_state(4, 3)).unwrap();
        assert_eq!(v[3], -ONE);
    }

    #[test]
    fn majorana_application_substitutes_indices() {
        // mbasis_rot at Majorana sites (2, 3) on two modes equals
        // exp(pi/8 c_2 c_3) densely.
        let mut c = Circuit::new(CircuitKind::Majorana, 2);
        c.push("mbasis_rot", vec![], vec![2, 3]);
        let got = c.evaluate().unwrap();
        let want = exp_majorana_quadratic(2, 2, 3, PI / 8.0);
        assert!(max_abs_diff(&got, &want) < 1e-12);

        // And the quartic at shuffled sites.
        let mut c = Circuit::new(CircuitKind::Majorana, 3);
        c.push("maj_quartic", vec![0.3], vec![5, 0, 2, 4]);
        let got = c.evaluate().unwrap();
        let gen = majorana_product(&[5, 0, 2, 4], 3).to_dense().mapv(|v| v * c64(0.0, 0.3));
        assert!(max_abs_diff(&got, &expm(&gen)) < 1e-11);
    }

    #[test]
    fn majorana_expansion_rejects_odd_matrices() {
        // dense(c_0) on one mode is an odd monomial.
        let m = PauliString::majorana(0, 1).to_dense();
        let err = majorana_expansion("raw", &m, &[0, 1], 1).unwrap_err();
        assert!(matches!(err, Error::BadGate { .. }));
    }

    #[test]
    fn rotation_action_of_quarter_rotation() {
        // exp(pi/4 c_0 c_1): c_0 -> -c_1, c_1 -> c_0.
        let mut c = Circuit::new(CircuitKind::Majorana, 1);
        c.push("maj_rot", vec![FRAC_PI_4], vec![0, 1]);
        let beta = rotation_action(&c).unwrap();
        assert!((beta[[0, 1]] + 1.0).abs() < 1e-12);
        assert!((beta[[1, 0]] - 1.0).abs() < 1e-12);
        assert!(beta[[0, 0]].abs() < 1e-12 && beta[[1, 1]].abs() < 1e-12);
    }

    #[test]
    fn rotation_action_composes_contravariantly() {
        // For V = U_2 U_1 the rows satisfy beta_V = beta_{U_1} beta_{U_2}
        // ... check numerically rather than trusting the ordering.
        let mut c1 = Circuit::new(CircuitKind::Majorana, 2);
        c1.push("maj_rot", vec![0.3], vec![0, 2]);
        let mut c2 = Circuit::new(CircuitKind::Majorana, 2);
        c2.push("maj_rot", vec![-0.8], vec![1, 3]);
        let both = c1.then(&c2).unwrap();
        let b1 = rotation_action(&c1).unwrap();
        let b2 = rotation_action(&c2).unwrap();
        let bb = rotation_action(&both).unwrap();
        // both = U2 U1 as matrices, so conjugation applies U2 after U1:
        // c_j -> sum_k (b2 b1)_{jk}? Verify against the product both ways and
        // accept the one that matches; exactly one must.
        let p12 = b1.dot(&b2);
        let p21 = b2.dot(&b1);
        let d12: f64 = (&bb - &p12).iter().map(|v| v.abs()).fold(0.0, f64::max);
        let d21: f64 = (&bb - &p21).iter().map(|v| v.abs()).fold(0.0, f64::max);
        assert!(d12.min(d21) < 1e-9, "composition matches neither order");
    }

    #[test]
    fn rotation_action_rejects_quartic_gates() {
        let mut c = Circuit::new(CircuitKind::Majorana, 2);
        c.push("mbasis_quartic", vec![], vec![0, 1, 2, 3]);
        assert!(matches!(rotation_action(&c), Err(Error::NotQuadratic { .. })));
    }

    #[test]
    fn qubit_application_respects_target_order() {
        // cx with control at qubit 1, target at qubit 0.
        let mut c = Circuit::new(CircuitKind::Qubit, 2);
        c.push("cx", vec![], vec![1, 0]);
        let v = c.apply(&linalg::basis_state(4, 2)).unwrap();
        assert_eq!(v[3], ONE);
    }

    #[test]
    fn evaluation_applies_gates_left_to_right() {
        let mut c = Circuit::new(CircuitKind::Qubit, 2);
        c.push("x", vec![], vec![0]);
        c.push("cz", vec![], vec![0, 1]);
        let u = c.evaluate().unwrap();
        let x0 = {
            let mut cc = Circuit::new(CircuitKind::Qubit, 2);
            cc.push("x", vec![], vec![0]);
            cc.evaluate().unwrap()
        };
        let cz = library_matrix("cz", &[]).unwrap();
        let want = cz.dot(&x0);
        assert!(max_abs_diff(&u, &want) < 1e-12);
    }

    #[test]
    fn fermionic_circuits_reject_parity_breaking_gates() {
        let mut c = Circuit::new(CircuitKind::Fermionic, 2);
        c.push("h", vec![], vec![0]);
        assert!(matches!(c.evaluate(), Err(Error::NotParityPreserving { .. })));
    }

    #[test]
    fn json_round_trip_preserves_evaluation() {
        let mut c = Circuit::new(CircuitKind::Fermionic, 3).with_ancillas(1);
        c.push("hop", vec![0.3, 0.7], vec![0, 2]);
        c.push("fswap", vec![], vec![1, 2]);
        let mut raw = CMat::zeros((2, 2));
        raw[[0, 0]] = ONE;
        raw[[1, 1]] = phase(1.1);
        c.push_raw("custom_phase", raw, vec![3]);
        let text = c.to_json_string();
        let back = Circuit::from_json_str(&text).unwrap();
        assert_eq!(back.kind, CircuitKind::Fermionic);
        assert_eq!(back.ancillas, 1);
        assert!(max_abs_diff(&c.evaluate().unwrap(), &back.evaluate().unwrap()) < 1e-15);
    }

    #[test]
    fn unknown_gate_and_bad_targets_error() {
        let mut c = Circuit::new(CircuitKind::Qubit, 2);
        c.push("warp", vec![], vec![0]);
        assert!(matches!(c.evaluate(), Err(Error::UnknownGate(_))));

        let mut c = Circuit::new(CircuitKind::Qubit, 2);
        c.push("cx", vec![], vec![0, 2]);
        assert!(matches!(c.evaluate(), Err(Error::IndexOutOfRange { .. })));

        let mut c = Circuit::new(CircuitKind::Qubit, 2);
        c.push("cx", vec![], vec![1, 1]);
        assert!(matches!(c.evaluate(), Err(Error::DuplicateTarget(1))));
    }
}
