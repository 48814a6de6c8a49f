//! Mode-to-qubit encodings and per-gate transpilation.
//!
//! Three schemes, with different cost profiles per transpiled gate:
//!
//! * `standard` - occupation numbers map to qubits directly; a two-mode gate
//!   on modes `(j, k)` costs `2(k-j-1) + 1` qubit gates through conjugation
//!   by controlled-sign defects.
//! * `tree` - qubits store partial sums of occupations over a binary
//!   indexing tree, so extracting any mode touches `O(log m)` qubits.
//! * `pair` - goes the other way: each qubit of a qubit circuit is encoded
//!   in two modes of equal occupation, and every gate becomes exactly one
//!   fermionic gate, signs cancelling on the doubled register.

use crate::circuit::{Circuit, CircuitKind, GateApplication, GateDef};
use crate::fock;
use crate::linalg::{CMat, CVec, ONE, ZERO};
use crate::{Error, Result, PARITY_TOL};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Standard,
    Tree,
    Pair,
}

impl std::str::FromStr for Encoding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Encoding::Standard),
            "tree" => Ok(Encoding::Tree),
            "pair" => Ok(Encoding::Pair),
            other => Err(Error::BadInput(format!("unknown encoding {other:?}"))),
        }
    }
}

impl std::fmt::Display for Encoding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Encoding::Standard => "standard",
            Encoding::Tree => "tree",
            Encoding::Pair => "pair",
        };
        write!(f, "{s}")
    }
}

/// Gate and ancilla accounting for one transpilation run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingReport {
    pub encoding: Encoding,
    pub gates: usize,
    pub ancillas: usize,
}

// ---------------------------------------------------------------------------
// The partial order on mode indices and its derived index sets
// ---------------------------------------------------------------------------

/// `j` precedes `k` when `k`'s binary expansion ends in ones through the
/// highest bit where the two differ. Reflexive; implies `j <= k`.
pub fn preceq(j: usize, k: usize) -> bool {
    if j == k {
        return true;
    }
    let h = usize::BITS - 1 - (j ^ k).leading_zeros();
    let mask = if h + 1 >= usize::BITS { usize::MAX } else { (1usize << (h + 1)) - 1 };
    j < k && k & mask == mask
}

/// The strict predecessors of `j` whose partial sums, together with bit `j`
/// itself, recover the occupation of mode `j`: clear one bit inside the
/// trailing run of ones.
pub fn k_set(j: usize) -> Vec<usize> {
    let mut out: Vec<usize> =
        (0..(j as u64).trailing_ones() as usize).map(|l| j ^ (1usize << l)).collect();
    out.sort_unstable();
    out
}

/// The indices whose stored bits sum to the prefix parity
/// `n_0 + ... + n_{j-1}`: for each set bit of `j`, clear it and saturate
/// everything below.
pub fn l_set(j: usize) -> Vec<usize> {
    let mut out = Vec::new();
    for l in 0..usize::BITS as usize {
        if j >> l & 1 == 1 {
            out.push((j ^ (1usize << l)) | ((1usize << l) - 1));
        }
    }
    out.sort_unstable();
    out
}

/// All `k < m` with `j` preceding `k`: the stored bits that include mode `j`
/// in their partial sum. Walks the indexing tree upward, so the result has
/// at most `ceil(log2 m) + 1` entries.
pub fn successors(j: usize, m: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut i = j + 1;
    while i <= m {
        out.push(i - 1);
        i += i & i.wrapping_neg();
    }
    out
}

// ---------------------------------------------------------------------------
// Tree encoding of basis states
// ---------------------------------------------------------------------------

/// A basis occupation pattern stored as partial sums: bit `j` holds
/// `sum of n_s over s preceding j, mod 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TreeEncodedState {
    pub m: usize,
    pub x: u64,
}

/// Occupation bits to partial-sum bits. Each stored bit covers the
/// contiguous block ending at `j` whose length is the trailing-ones run.
pub fn tree_encode(n: u64, m: usize) -> TreeEncodedState {
    assert!(m <= 64, "basis indices are stored in 64 bits");
    let mut x = 0u64;
    for j in 0..m {
        let t = (j as u64).trailing_ones() as usize;
        let lo = j & !((1usize << t) - 1);
        let mask = block_mask(lo, j);
        if (n & mask).count_ones() % 2 == 1 {
            x |= 1 << j;
        }
    }
    TreeEncodedState { m, x }
}

/// Partial-sum bits back to occupation bits.
pub fn tree_decode(s: &TreeEncodedState) -> u64 {
    let mut n = 0u64;
    for j in 0..s.m {
        let mut bit = s.x >> j & 1;
        for c in k_set(j) {
            bit ^= s.x >> c & 1;
        }
        n |= bit << j;
    }
    n
}

fn block_mask(lo: usize, hi: usize) -> u64 {
    let upper = if hi + 1 >= 64 { u64::MAX } else { (1u64 << (hi + 1)) - 1 };
    upper & !((1u64 << lo) - 1)
}

/// Permute a dense state vector from occupation basis to tree basis.
pub fn tree_encode_state(v: &CVec, m: usize) -> Result<CVec> {
    permute_state(v, m, |idx| tree_encode(idx as u64, m).x as usize)
}

/// Permute a dense state vector from tree basis back to occupation basis.
pub fn tree_decode_state(v: &CVec, m: usize) -> Result<CVec> {
    permute_state(v, m, |idx| tree_decode(&TreeEncodedState { m, x: idx as u64 }) as usize)
}

fn permute_state(v: &CVec, m: usize, f: impl Fn(usize) -> usize) -> Result<CVec> {
    let dim = 1usize << m;
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    let mut out = CVec::zeros(dim);
    for idx in 0..dim {
        out[f(idx)] = v[idx];
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Tree extraction
// ---------------------------------------------------------------------------

/// The gate list that moves mode `j` of a tree-encoded register onto the
/// qubit `anc` (which must start in |0>), leaves the register encoding the
/// pattern with mode `j` emptied, and applies the fermionic extraction sign
/// `(-1)^{n_j (n_0 + ... + n_{j-1})}`. Three phases: load the occupation
/// onto the ancilla, strike it from every partial sum containing it, then
/// imprint the sign against the prefix parity.
fn extraction_gates(j: usize, m: usize, anc: usize) -> Vec<GateApplication> {
    let mut gates = Vec::new();
    let mut loads = k_set(j);
    loads.push(j);
    loads.sort_unstable();
    for s in loads {
        gates.push(GateApplication { gate: GateDef::named("cx", vec![]), targets: vec![s, anc] });
    }
    for k in successors(j, m) {
        gates.push(GateApplication { gate: GateDef::named("cx", vec![]), targets: vec![anc, k] });
    }
    for s in l_set(j) {
        gates.push(GateApplication { gate: GateDef::named("cz", vec![]), targets: vec![anc, s] });
    }
    gates
}

/// The extraction as a standalone qubit circuit on `m` register qubits plus
/// one ancilla appended at index `m`. Gate count is at most
/// `3 ceil(log2 m) + 3`.
pub fn tree_extraction_circuit(j: usize, m: usize) -> Result<Circuit> {
    if j >= m {
        return Err(Error::IndexOutOfRange { index: j, width: m });
    }
    let mut c = Circuit::new(CircuitKind::Qubit, m).with_ancillas(1);
    c.gates = extraction_gates(j, m, m);
    Ok(c)
}

// ---------------------------------------------------------------------------
// Pair encoding
// ---------------------------------------------------------------------------

/// Spread each qubit bit onto a pair of mode bits with equal occupation.
fn spread_index(b: usize, n: usize) -> usize {
    let mut out = 0usize;
    for i in 0..n {
        if b >> i & 1 == 1 {
            out |= 0b11 << (2 * i);
        }
    }
    out
}

/// Isometry from an `n`-qubit state to `2n` modes: |b> goes to the basis
/// state occupying both modes of every pair whose qubit is 1.
pub fn pair_encode_state(v: &CVec, n: usize) -> Result<CVec> {
    let dim = 1usize << n;
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    let mut out = CVec::zeros(1 << (2 * n));
    for b in 0..dim {
        out[spread_index(b, n)] = v[b];
    }
    Ok(out)
}

/// Inverse of the pair isometry. Any amplitude on a basis state whose pairs
/// disagree is outside the code; rejecting it loudly keeps transpiler bugs
/// from hiding behind a projection.
pub fn pair_decode_state(v: &CVec, n: usize) -> Result<CVec> {
    let dim = 1usize << (2 * n);
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: v.len() });
    }
    let mut out = CVec::zeros(1 << n);
    let mut outside = 0.0f64;
    for idx in 0..dim {
        let mut b = 0usize;
        let mut in_code = true;
        for i in 0..n {
            match idx >> (2 * i) & 0b11 {
                0b00 => {}
                0b11 => b |= 1 << i,
                _ => {
                    in_code = false;
                    break;
                }
            }
        }
        if in_code {
            out[b] = v[idx];
        } else {
            outside += v[idx].norm_sqr();
        }
    }
    if outside > PARITY_TOL {
        return Err(Error::OutsideCode { weight: outside });
    }
    Ok(out)
}

/// Lift a `p`-qubit gate to `2p` modes: act as the gate on the doubled-bit
/// code states, as the identity elsewhere. The lift is unitary and parity
/// preserving since code states all have even weight.
pub fn pair_gate(matrix: &CMat) -> CMat {
    let p = matrix.nrows().trailing_zeros() as usize;
    let dim = 1usize << (2 * p);
    let mut out = CMat::zeros((dim, dim));
    for idx in 0..dim {
        let mut b = 0usize;
        let mut in_code = true;
        for i in 0..p {
            match idx >> (2 * i) & 0b11 {
                0b00 => {}
                0b11 => b |= 1 << i,
                _ => {
                    in_code = false;
                    break;
                }
            }
        }
        if in_code {
            for a in 0..matrix.nrows() {
                let v = matrix[[a, b]];
                if v != ZERO {
                    out[[spread_index(a, p), idx]] = v;
                }
            }
        } else {
            out[[idx, idx]] = ONE;
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Transpilation
// ---------------------------------------------------------------------------

/// Rewrite a circuit under the chosen encoding, gate by gate.
///
/// `standard` and `tree` consume fermionic circuits and emit qubit circuits
/// on the same register (tree adds ancillas at the high end); `pair`
/// consumes a qubit circuit and emits a fermionic circuit on twice the
/// register.
pub fn transpile(c: &Circuit, encoding: Encoding) -> Result<(Circuit, EncodingReport)> {
    match encoding {
        Encoding::Standard => transpile_standard(c),
        Encoding::Tree => transpile_tree(c),
        Encoding::Pair => transpile_pair(c),
    }
}

fn require_kind(c: &Circuit, want: CircuitKind, encoding: Encoding) -> Result<()> {
    if c.kind != want {
        return Err(Error::BadInput(format!(
            "{encoding} encoding transpiles {want} circuits, got {}",
            c.kind
        )));
    }
    Ok(())
}

fn transpile_standard(c: &Circuit) -> Result<(Circuit, EncodingReport)> {
    require_kind(c, CircuitKind::Fermionic, Encoding::Standard)?;
    let m = c.total_width();
    let mut out = Circuit::new(CircuitKind::Qubit, m);
    for app in &c.gates {
        let matrix = app.gate.resolve()?;
        fock::check_parity_preserving(&matrix, PARITY_TOL)?;
        fock::validate_targets(&app.targets, m)?;
        match *app.targets.as_slice() {
            [j] => {
                out.push_raw(&app.gate.name, matrix, vec![j]);
            }
            [t0, t1] => {
                // Relabelling the two modes is conjugation by the fermionic
                // swap, so a descending pair reduces to the ascending case.
                let (j, k, matrix) = if t0 < t1 {
                    (t0, t1, matrix)
                } else {
                    let f = crate::circuit::library_matrix("fswap", &[])?;
                    (t1, t0, f.dot(&matrix).dot(&f))
                };
                for s in (j + 1..k).rev() {
                    out.push("cz", vec![], vec![s, k]);
                }
                out.push_raw(&app.gate.name, matrix, vec![j, k]);
                for s in j + 1..k {
                    out.push("cz", vec![], vec![s, k]);
                }
            }
            _ => {
                return Err(Error::BadInput(
                    "standard transpilation handles gates on one or two modes".into(),
                ))
            }
        }
    }
    let report =
        EncodingReport { encoding: Encoding::Standard, gates: out.gates.len(), ancillas: 0 };
    Ok((out, report))
}

fn transpile_tree(c: &Circuit) -> Result<(Circuit, EncodingReport)> {
    require_kind(c, CircuitKind::Fermionic, Encoding::Tree)?;
    let m = c.total_width();
    let mut out = Circuit::new(CircuitKind::Qubit, m);
    let mut ancillas = 0usize;
    for app in &c.gates {
        let matrix = app.gate.resolve()?;
        fock::check_parity_preserving(&matrix, PARITY_TOL)?;
        fock::validate_targets(&app.targets, m)?;
        let p = app.targets.len();
        if p == 0 || p > 2 {
            return Err(Error::BadInput(
                "tree transpilation handles gates on one or two modes".into(),
            ));
        }
        if p == 1 {
            // A parity-preserving gate on one mode is diagonal in n_j, and
            // n_j is the parity of the stored bits k_set(j) + {j}. Fold that
            // parity onto qubit j, apply the gate there, unfold. Cost
            // 2 |k_set(j)| + 1 <= 2 ceil(log2 m) + 1, no ancilla.
            let j = app.targets[0];
            let folds = k_set(j);
            for &s in &folds {
                out.gates.push(GateApplication {
                    gate: GateDef::named("cx", vec![]),
                    targets: vec![s, j],
                });
            }
            out.push_raw(&app.gate.name, matrix, vec![j]);
            for &s in folds.iter().rev() {
                out.gates.push(GateApplication {
                    gate: GateDef::named("cx", vec![]),
                    targets: vec![s, j],
                });
            }
            continue;
        }
        ancillas = ancillas.max(p);
        let fragments: Vec<Vec<GateApplication>> = app
            .targets
            .iter()
            .enumerate()
            .map(|(r, &t)| extraction_gates(t, m, m + r))
            .collect();
        for fragment in &fragments {
            out.gates.extend(fragment.iter().cloned());
        }
        let anc_targets: Vec<usize> = (0..p).map(|r| m + r).collect();
        out.push_raw(&app.gate.name, matrix, anc_targets);
        for fragment in fragments.iter().rev() {
            out.gates.extend(fragment.iter().rev().cloned());
        }
    }
    out.ancillas = ancillas;
    let report =
        EncodingReport { encoding: Encoding::Tree, gates: out.gates.len(), ancillas };
    Ok((out, report))
}

fn transpile_pair(c: &Circuit) -> Result<(Circuit, EncodingReport)> {
    require_kind(c, CircuitKind::Qubit, Encoding::Pair)?;
    let total = c.total_width();
    let mut out = Circuit::new(CircuitKind::Fermionic, 2 * c.width)
        .with_ancillas(2 * c.ancillas);
    for app in &c.gates {
        let matrix = app.gate.resolve()?;
        fock::validate_targets(&app.targets, total)?;
        let targets: Vec<usize> =
            app.targets.iter().flat_map(|&q| [2 * q, 2 * q + 1]).collect();
        out.push_raw(&app.gate.name, pair_gate(&matrix), targets);
    }
    let report = EncodingReport {
        encoding: Encoding::Pair,
        gates: out.gates.len(),
        ancillas: 2 * c.ancillas,
    };
    Ok((out, report))
}
