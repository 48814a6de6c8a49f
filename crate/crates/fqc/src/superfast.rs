//! The edge-operator encoding for even fermionic algebras on a graph.
//!
//! One qubit per edge of a connected interaction graph. Every vertex carries
//! `B~_k`, a sigma^z product over its incident edges, and every oriented edge
//! carries `A~_jk`, a sigma^x on the edge dressed with sigma^z factors over
//! the earlier incident edges at both endpoints. These satisfy the on-site
//! relations of `B_k = 1 - 2 n_k` and `A_jk = -i c_{2j} c_{2k}` exactly; the
//! closed-path relation is deliberately not satisfied on the full edge-qubit
//! space and is restored by restricting to the subspace stabilized by the
//! fundamental-cycle generators. The codespace has dimension `2^{m-1}`,
//! matching the even-parity Fock sector, and a parity-preserving gate on an
//! edge transpiles to a constant-depth conjugated two-qubit gate whose
//! Clifford dressing grows linearly in the local degree.

use crate::circuit::{library_matrix, Circuit, CircuitKind, GateApplication, GateDef};
use crate::fock;
use crate::linalg::{basis_state, c64, CMat, CVec, ZERO};
use crate::pauli::{majorana_product, PauliString};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A finite simple connected graph with an edge orientation and, at every
/// vertex, a total order on the incident edges. Orientation and local order
/// are arbitrary choices; the defaults orient each edge from its smaller
/// endpoint and sort incident edges by the opposite endpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    m: usize,
    edges: Vec<(usize, usize)>,
    /// epsilon for each edge in its stored direction; reversing negates.
    orientation: Vec<i8>,
    /// Incident edge ids at each vertex, earliest first.
    local_order: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: usize,
    edges: Vec<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    orientation: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    local_order: Option<Vec<Vec<usize>>>,
}

impl GraphSpec {
    pub fn new(m: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if m == 0 {
            return Err(Error::BadGraph("graph needs at least one vertex".into()));
        }
        if edges.len() > 64 {
            return Err(Error::BadGraph(format!(
                "{} edges exceed the 64 edge qubits supported",
                edges.len()
            )));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::BadGraph(format!("self-loop at vertex {a}")));
            }
            if a >= m || b >= m {
                return Err(Error::BadGraph(format!(
                    "edge ({a},{b}) out of range for {m} vertices"
                )));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(Error::BadGraph(format!("duplicate edge ({a},{b})")));
            }
        }
        let orientation = default_orientation(edges);
        let local_order = default_local_order(m, edges);
        let g = GraphSpec { m, edges: edges.to_vec(), orientation, local_order };
        g.check_connected()?;
        Ok(g)
    }

    /// Replace the orientation; one epsilon per edge, in the stored
    /// direction. Antisymmetry is then automatic.
    pub fn with_orientation(mut self, eps: &[i8]) -> Result<Self> {
        if eps.len() != self.edges.len() {
            return Err(Error::BadGraph(format!(
                "expected {} orientation entries, got {}",
                self.edges.len(),
                eps.len()
            )));
        }
        if eps.iter().any(|&e| e != 1 && e != -1) {
            return Err(Error::BadGraph("orientation entries must be +1 or -1".into()));
        }
        self.orientation = eps.to_vec();
        Ok(self)
    }

    /// Replace the local orders; entry `k` must be a permutation of the
    /// edge ids incident to vertex `k`.
    pub fn with_local_order(mut self, order: Vec<Vec<usize>>) -> Result<Self> {
        if order.len() != self.m {
            return Err(Error::BadGraph(format!(
                "expected {} local orders, got {}",
                self.m,
                order.len()
            )));
        }
        for (k, given) in order.iter().enumerate() {
            let mut want: Vec<usize> = self.default_incident(k);
            let mut got = given.clone();
            want.sort_unstable();
            got.sort_unstable();
            if want != got {
                return Err(Error::BadGraph(format!(
                    "local order at vertex {k} is not a permutation of its incident edges"
                )));
            }
        }
        self.local_order = order;
        Ok(self)
    }

    fn default_incident(&self, k: usize) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| a == k || b == k)
            .map(|(e, _)| e)
            .collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.m
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_index(&self, j: usize, k: usize) -> Option<usize> {
        self.edges
            .iter()
            .position(|&(a, b)| (a, b) == (j, k) || (a, b) == (k, j))
    }

    /// epsilon_jk for the requested direction.
    pub fn epsilon(&self, j: usize, k: usize) -> Result<i8> {
        let e = self
            .edge_index(j, k)
            .ok_or_else(|| Error::BadInput(format!("no edge ({j},{k})")))?;
        Ok(if self.edges[e] == (j, k) {
            self.orientation[e]
        } else {
            -self.orientation[e]
        })
    }

    /// Incident edge ids at vertex `k`, earliest first.
    pub fn incident(&self, k: usize) -> &[usize] {
        &self.local_order[k]
    }

    pub fn degree(&self, k: usize) -> usize {
        self.local_order[k].len()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.m).map(|k| self.degree(k)).max().unwrap_or(0)
    }

    /// Edge ids incident to `j` or `k`: the support any transpiled gate on
    /// edge (j,k) is allowed to touch.
    pub fn support(&self, j: usize, k: usize) -> Vec<usize> {
        let mut s: Vec<usize> = self.local_order[j]
            .iter()
            .chain(self.local_order[k].iter())
            .copied()
            .collect();
        s.sort_unstable();
        s.dedup();
        s
    }

    /// Neighbors of each vertex with the connecting edge id, ascending.
    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.m];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            adj[a].push((b, e));
            adj[b].push((a, e));
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        adj
    }

    fn check_connected(&self) -> Result<()> {
        let adj = self.adjacency();
        let mut seen = vec![false; self.m];
        let mut queue = std::collections::VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::BadGraph("graph is not connected".into()))
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphJson = serde_json::from_str(text)?;
        let edges: Vec<(usize, usize)> = raw.edges.iter().map(|&[a, b]| (a, b)).collect();
        let mut g = GraphSpec::new(raw.vertices, &edges)?;
        if let Some(eps) = raw.orientation {
            g = g.with_orientation(&eps)?;
        }
        if let Some(order) = raw.local_order {
            g = g.with_local_order(order)?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        let raw = GraphJson {
            vertices: self.m,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            orientation: Some(self.orientation.clone()),
            local_order: Some(self.local_order.clone()),
        };
        serde_json::to_string_pretty(&raw).expect("graph serializes")
    }
}

fn default_orientation(edges: &[(usize, usize)]) -> Vec<i8> {
    edges.iter().map(|&(a, b)| if a < b { 1 } else { -1 }).collect()
}

fn default_local_order(m: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    (0..m)
        .map(|k| {
            let mut inc: Vec<(usize, usize)> = edges
                .iter()
                .enumerate()
                .filter_map(|(e, &(a, b))| {
                    if a == k {
                        Some((b, e))
                    } else if b == k {
                        Some((a, e))
                    } else {
                        None
                    }
                })
                .collect();
            inc.sort_unstable();
            inc.into_iter().map(|(_, e)| e).collect()
        })
        .collect()
}

/// The vertex and edge operators of a graph, together with the stabilizer
/// generators that carve out the codespace.
#[derive(Debug, Clone)]
pub struct EdgeOperatorSet {
    graph: GraphSpec,
    u: usize,
    btilde: Vec<PauliString>,
    /// Stored-direction operator per edge; the reverse direction negates.
    atilde: Vec<PauliString>,
    stabilizers: Vec<PauliString>,
}

impl EdgeOperatorSet {
    pub fn graph(&self) -> &GraphSpec {
        &self.graph
    }

    pub fn edge_qubits(&self) -> usize {
        self.u
    }

    pub fn btilde(&self, k: usize) -> &PauliString {
        &self.btilde[k]
    }

    /// The oriented edge operator; `atilde(k, j) = -atilde(j, k)`.
    pub fn atilde(&self, j: usize, k: usize) -> Result<PauliString> {
        let e = self
            .graph
            .edge_index(j, k)
            .ok_or_else(|| Error::BadInput(format!("no edge ({j},{k})")))?;
        Ok(if self.graph.edges[e] == (j, k) {
            self.atilde[e]
        } else {
            self.atilde[e].scaled(2)
        })
    }

    pub fn stabilizers(&self) -> &[PauliString] {
        &self.stabilizers
    }

    /// Encoded image of a word over the on-site generators.
    pub fn encoded_word(&self, word: &[WordLetter]) -> Result<PauliString> {
        let mut acc = PauliString::identity(self.u);
        for &letter in word {
            let factor = match letter {
                WordLetter::B(k) => {
                    if k >= self.graph.m {
                        return Err(Error::BadInput(format!("vertex {k} out of range")));
                    }
                    self.btilde[k]
                }
                WordLetter::A(j, k) => self.atilde(j, k)?,
            };
            acc = acc.mul(&factor);
        }
        Ok(acc)
    }

    /// Trace over the codespace: the stabilizer projector expands into the
    /// sum over products of cycle generators.
    pub fn codespace_trace(&self, p: &PauliString) -> Complex64 {
        let g = self.stabilizers.len();
        let mut acc = ZERO;
        for subset in 0u64..(1 << g) {
            let mut prod = *p;
            for (i, stab) in self.stabilizers.iter().enumerate() {
                if subset >> i & 1 == 1 {
                    prod = prod.mul(stab);
                }
            }
            acc += prod.trace();
        }
        acc / c64((1u64 << g) as f64, 0.0)
    }
}

fn btilde_raw(g: &GraphSpec, k: usize) -> PauliString {
    let mut z = 0u128;
    for &e in g.incident(k) {
        z |= 1 << e;
    }
    PauliString::from_masks(g.edge_count(), 0, 0, z)
}

fn atilde_raw(g: &GraphSpec, j: usize, k: usize) -> Result<PauliString> {
    let e = g
        .edge_index(j, k)
        .ok_or_else(|| Error::BadInput(format!("no edge ({j},{k})")))?;
    let mut z = 0u128;
    for endpoint in [j, k] {
        for &f in g.incident(endpoint) {
            if f == e {
                break;
            }
            z |= 1 << f;
        }
    }
    let phase = if g.epsilon(j, k)? > 0 { 0 } else { 2 };
    Ok(PauliString::from_masks(g.edge_count(), phase, 1 << e, z))
}

pub fn build_edge_operators(g: &GraphSpec) -> Result<EdgeOperatorSet> {
    let u = g.edge_count();
    let btilde: Vec<PauliString> = (0..g.m).map(|k| btilde_raw(g, k)).collect();
    let atilde: Vec<PauliString> = g
        .edges
        .iter()
        .map(|&(a, b)| atilde_raw(g, a, b))
        .collect::<Result<_>>()?;

    let fail = |msg: String| Err(Error::InconsistentStabilizers(msg));

    // Vertex operators commute pairwise and multiply to the identity.
    for j in 0..g.m {
        for k in j + 1..g.m {
            if !btilde[j].commutes_with(&btilde[k]) {
                return fail(format!("B~_{j} and B~_{k} do not commute"));
            }
        }
    }
    let total = PauliString::product(u, &btilde);
    if total != PauliString::identity(u) {
        return fail("product of all B~ is not the identity".into());
    }

    // Edge operators are Hermitian involutions, anticommute with the vertex
    // operators at their endpoints only, and anticommute with each other
    // exactly when they share one endpoint.
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        let at = &atilde[e];
        if !at.is_hermitian() || at.mul(at) != PauliString::identity(u) {
            return fail(format!("A~ on edge ({a},{b}) is not a Hermitian involution"));
        }
        for l in 0..g.m {
            let want_anticommute = l == a || l == b;
            if at.commutes_with(&btilde[l]) == want_anticommute {
                return fail(format!("A~ on edge ({a},{b}) has the wrong relation to B~_{l}"));
            }
        }
        for (f, &(c, d)) in g.edges.iter().enumerate().skip(e + 1) {
            let shared = [a, b].iter().filter(|v| **v == c || **v == d).count();
            let want_anticommute = shared == 1;
            if atilde[e].commutes_with(&atilde[f]) == want_anticommute {
                return fail(format!(
                    "A~ on edges ({a},{b}) and ({c},{d}) have the wrong relation"
                ));
            }
        }
    }

    let stabilizers = stabilizer_generators(g)?;
    for (i, s) in stabilizers.iter().enumerate() {
        if !s.is_hermitian() {
            return fail(format!("cycle generator {i} is not Hermitian"));
        }
        for t in stabilizers.iter().skip(i + 1) {
            if !s.commutes_with(t) {
                return fail("cycle generators do not commute".into());
            }
        }
        if btilde.iter().any(|b| !s.commutes_with(b))
            || atilde.iter().any(|a| !s.commutes_with(a))
        {
            return fail(format!("cycle generator {i} moves an encoded operator"));
        }
    }

    Ok(EdgeOperatorSet { graph: g.clone(), u, btilde, atilde, stabilizers })
}

/// One generator per fundamental cycle of a breadth-first spanning tree
/// rooted at vertex 0: for the cycle (j_0, ..., j_{p-1}) the generator is
/// `i^p A~_{j_0 j_1} ... A~_{j_{p-1} j_0}`.
pub fn stabilizer_generators(g: &GraphSpec) -> Result<Vec<PauliString>> {
    let u = g.edge_count();
    let adj = g.adjacency();
    let mut parent: Vec<Option<usize>> = vec![None; g.m];
    let mut depth = vec![0usize; g.m];
    let mut in_tree = vec![false; u];
    let mut seen = vec![false; g.m];
    let mut queue = std::collections::VecDeque::from([0usize]);
    seen[0] = true;
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                depth[w] = depth[v] + 1;
                in_tree[e] = true;
                queue.push_back(w);
            }
        }
    }

    let mut gens = Vec::new();
    for (e, &(a, b)) in g.edges.iter().enumerate() {
        if in_tree[e] {
            continue;
        }
        // Walk both endpoints up to their lowest common ancestor.
        let (mut left, mut right) = (vec![a], vec![b]);
        let (mut x, mut y) = (a, b);
        while depth[x] > depth[y] {
            x = parent[x].expect("tree path");
            left.push(x);
        }
        while depth[y] > depth[x] {
            y = parent[y].expect("tree path");
            right.push(y);
        }
        while x != y {
            x = parent[x].expect("tree path");
            y = parent[y].expect("tree path");
            left.push(x);
            right.push(y);
        }
        right.pop();
        right.reverse();
        left.extend(right);
        let cycle = left;

        let p = cycle.len();
        let mut gen = PauliString::identity(u);
        for i in 0..p {
            gen = gen.mul(&atilde_raw(g, cycle[i], cycle[(i + 1) % p])?);
        }
        gen = gen.scaled((p % 4) as u8);
        if !gen.is_hermitian() {
            return Err(Error::InconsistentStabilizers(format!(
                "cycle through edge ({a},{b}) gave a non-Hermitian generator"
            )));
        }
        gens.push(gen);
    }
    Ok(gens)
}

/// `2^(u - rank)` for the stabilizer generator set, tracking signs so that a
/// subset multiplying to `-identity` is reported instead of miscounted.
pub fn codespace_dimension(g: &GraphSpec) -> Result<u128> {
    let gens = stabilizer_generators(g)?;
    let u = g.edge_count();
    let mut pivots: Vec<(u32, PauliString)> = Vec::new();
    for gen in &gens {
        let mut cur = *gen;
        loop {
            let row = cur.symplectic_row();
            if row == 0 {
                if cur.phase_exponent() != 0 {
                    return Err(Error::InconsistentStabilizers(
                        "a product of cycle generators is -identity".into(),
                    ));
                }
                break;
            }
            let lead = 127 - row.leading_zeros();
            match pivots.iter().find(|(l, _)| *l == lead) {
                Some((_, basis)) => cur = cur.mul(basis),
                None => {
                    pivots.push((lead, cur));
                    break;
                }
            }
        }
    }
    Ok(1u128 << (u - pivots.len()))
}

/// A word over the on-site fermionic generators: `B_k = 1 - 2 n_k` and
/// `A_jk = -i c_{2j} c_{2k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordLetter {
    B(usize),
    A(usize, usize),
}

/// Fock-side Pauli form of a word on `m` modes.
pub fn fock_word(word: &[WordLetter], m: usize) -> Result<PauliString> {
    let mut acc = PauliString::identity(m);
    for &letter in word {
        let factor = match letter {
            WordLetter::B(k) => {
                if k >= m {
                    return Err(Error::BadInput(format!("vertex {k} out of range")));
                }
                majorana_product(&[2 * k, 2 * k + 1], m).scaled(3)
            }
            WordLetter::A(j, k) => {
                if j >= m || k >= m || j == k {
                    return Err(Error::BadInput(format!("bad edge letter ({j},{k})")));
                }
                majorana_product(&[2 * j, 2 * k], m).scaled(3)
            }
        };
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

/// Trace of a generator word over the even-parity Fock sector and over the
/// codespace. The two representations are isomorphic, so agreement across a
/// spanning family of words certifies the encoding without constructing the
/// intertwiner explicitly.
pub fn trace_check(g: &GraphSpec, word: &[WordLetter]) -> Result<(Complex64, Complex64)> {
    let m = g.vertex_count();
    if m > 6 {
        return Err(Error::BadInput(format!(
            "trace check supports at most 6 modes, got {m}"
        )));
    }
    for &letter in word {
        if let WordLetter::A(j, k) = letter {
            if g.edge_index(j, k).is_none() {
                return Err(Error::BadInput(format!("no edge ({j},{k})")));
            }
        }
    }
    let ops = build_edge_operators(g)?;

    let fock_side = {
        let p = fock_word(word, m)?;
        let even = p.mul(&PauliString::parity(m));
        (p.trace() + even.trace()) / c64(2.0, 0.0)
    };
    let encoded = ops.encoded_word(word)?;
    Ok((fock_side, ops.codespace_trace(&encoded)))
}

/// Emits elementary Clifford gates while conjugating a set of tracked Pauli
/// strings through each one, so `tracked` always holds the image of the
/// original strings under the circuit emitted so far.
struct CliffordBuilder {
    gates: Vec<GateApplication>,
}

impl CliffordBuilder {
    fn new() -> Self {
        CliffordBuilder { gates: Vec::new() }
    }

    fn h(&mut self, q: usize, tracked: &mut [PauliString]) {
        self.gates.push(GateApplication {
            gate: GateDef::named("h", vec![]),
            targets: vec![q],
        });
        for p in tracked.iter_mut() {
            p.conj_h(q);
        }
    }

    fn s(&mut self, q: usize, tracked: &mut [PauliString]) {
        self.gates.push(GateApplication {
            gate: GateDef::named("s", vec![]),
            targets: vec![q],
        });
        for p in tracked.iter_mut() {
            p.conj_s(q);
        }
    }

    fn s_dagger(&mut self, q: usize, tracked: &mut [PauliString]) {
        for _ in 0..3 {
            self.s(q, tracked);
        }
    }

    fn cx(&mut self, c: usize, t: usize, tracked: &mut [PauliString]) {
        self.gates.push(GateApplication {
            gate: GateDef::named("cx", vec![]),
            targets: vec![c, t],
        });
        for p in tracked.iter_mut() {
            p.conj_cx(c, t);
        }
    }

    fn swap(&mut self, a: usize, b: usize, tracked: &mut [PauliString]) {
        self.cx(a, b, tracked);
        self.cx(b, a, tracked);
        self.cx(a, b, tracked);
    }

    fn pauli_z(&mut self, q: usize, tracked: &mut [PauliString]) {
        self.s(q, tracked);
        self.s(q, tracked);
    }

    fn pauli_x(&mut self, q: usize, tracked: &mut [PauliString]) {
        self.h(q, tracked);
        self.pauli_z(q, tracked);
        self.h(q, tracked);
    }

    /// Rotate the letter of `tracked[i]` at `q` to X by single-qubit gates.
    fn letter_to_x(&mut self, i: usize, q: usize, tracked: &mut [PauliString]) {
        match tracked[i].letter(q) {
            1 => {}
            2 => self.s_dagger(q, tracked),
            3 => self.h(q, tracked),
            _ => unreachable!("letter_to_x needs support at the qubit"),
        }
    }

    /// Rotate the letter of `tracked[i]` at `q` to Z; fixes an X letter of
    /// any other tracked string living only on other qubits.
    fn letter_to_z(&mut self, i: usize, q: usize, tracked: &mut [PauliString]) {
        match tracked[i].letter(q) {
            3 => {}
            1 => self.h(q, tracked),
            2 => {
                self.h(q, tracked);
                self.s(q, tracked);
                self.h(q, tracked);
            }
            _ => unreachable!("letter_to_z needs support at the qubit"),
        }
    }
}

fn support_qubits(p: &PauliString) -> Vec<usize> {
    let mask = p.x_mask() | p.z_mask();
    (0..p.num_qubits()).filter(|q| mask >> q & 1 == 1).collect()
}

/// Conjugate the tracked triple (P, Q, R) to exactly (X_a, Z_a, Z_a Z_b),
/// assuming P anticommutes with Q and with R while Q and R commute. The
/// sign of every target is fixed, so two triples reduced by this routine
/// are mapped onto each other by composing one circuit with the inverse of
/// the other.
fn reduce_triple(
    bld: &mut CliffordBuilder,
    trip: &mut [PauliString; 3],
    a: usize,
    b: usize,
) -> Result<()> {
    let bug = |msg: &str| Error::InconsistentStabilizers(format!("triple reduction: {msg}"));

    // P -> X_a. Rotate its support to X letters, fold onto one qubit, move
    // it to `a`, fix the sign.
    for q in support_qubits(&trip[0]) {
        bld.letter_to_x(0, q, trip);
    }
    let sup = support_qubits(&trip[0]);
    let &p = sup.iter().find(|&&q| q == a).or_else(|| sup.first()).ok_or_else(|| bug("empty P"))?;
    for q in sup {
        if q != p {
            bld.cx(p, q, trip);
        }
    }
    if p != a {
        bld.swap(p, a, trip);
    }
    if trip[0].phase_exponent() == 2 {
        bld.pauli_z(a, trip);
    }
    if trip[0] != PauliString::x(trip[0].num_qubits(), a) {
        return Err(bug("P did not reduce to X"));
    }

    // Q -> Z_a. Its letter at `a` is Y or Z by the commutation pattern; the
    // h-s-h turn fixes X_a while rotating Y to Z there.
    if trip[1].letter(a) == 2 {
        bld.h(a, trip);
        bld.s(a, trip);
        bld.h(a, trip);
    }
    if trip[1].letter(a) != 3 {
        return Err(bug("Q does not anticommute with P at the pivot"));
    }
    for q in support_qubits(&trip[1]) {
        if q != a {
            bld.letter_to_z(1, q, trip);
        }
    }
    for q in support_qubits(&trip[1]) {
        if q != a {
            bld.cx(q, a, trip);
        }
    }
    if trip[1].phase_exponent() == 2 {
        bld.pauli_x(a, trip);
    }
    if trip[1] != PauliString::z(trip[1].num_qubits(), a) {
        return Err(bug("Q did not reduce to Z"));
    }

    // R -> Z_a Z_b. Its letter at `a` is pinned to Z; the rest reduces to a
    // single Z which is moved to `b`.
    if trip[2].letter(a) != 3 {
        return Err(bug("R has the wrong letter at the pivot"));
    }
    let rest: Vec<usize> = support_qubits(&trip[2]).into_iter().filter(|&q| q != a).collect();
    if rest.is_empty() {
        return Err(bug("R is not independent of Q"));
    }
    for &q in &rest {
        bld.letter_to_z(2, q, trip);
    }
    let p2 = if rest.contains(&b) { b } else { rest[0] };
    for &q in &rest {
        if q != p2 {
            bld.cx(q, p2, trip);
        }
    }
    if p2 != b {
        bld.swap(p2, b, trip);
    }
    if trip[2].phase_exponent() == 2 {
        bld.pauli_x(b, trip);
    }
    let n = trip[2].num_qubits();
    if trip[2] != PauliString::z(n, a).mul(&PauliString::z(n, b)) {
        return Err(bug("R did not reduce to ZZ"));
    }
    Ok(())
}

/// Inverse of an emitted Clifford gate sequence; only h, s and cx appear.
fn invert_gates(gates: &[GateApplication]) -> Vec<GateApplication> {
    let mut out = Vec::new();
    for app in gates.iter().rev() {
        match app.gate.name.as_str() {
            "h" | "cx" => out.push(app.clone()),
            "s" => {
                for _ in 0..3 {
                    out.push(app.clone());
                }
            }
            other => unreachable!("unexpected gate {other} in a Clifford layer"),
        }
    }
    out
}

/// Local even monomials of a two-mode gate and their encoded images at edge
/// (j,k): `c_0 c_1 -> i B~_j`, `c_2 c_3 -> i B~_k`, `c_0 c_2 -> i A~_jk`,
/// everything else by multiplying those out.
pub(crate) fn encoded_gate_expansion(
    gate: &CMat,
    j: usize,
    k: usize,
    ops: &EdgeOperatorSet,
) -> Result<Vec<(Complex64, PauliString)>> {
    if gate.nrows() != 4 || gate.ncols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: gate.nrows() });
    }
    fock::check_parity_preserving(gate, crate::PARITY_TOL)?;

    let enc01 = ops.btilde(j).scaled(1);
    let enc23 = ops.btilde(k).scaled(1);
    let enc02 = ops.atilde(j, k)?.scaled(1);
    let enc03 = enc02.mul(&enc23);
    let enc12 = enc01.scaled(2).mul(&enc02);
    let enc13 = enc01.scaled(2).mul(&enc03);
    let u = ops.edge_qubits();

    let subsets: [(&[usize], PauliString); 8] = [
        (&[], PauliString::identity(u)),
        (&[0, 1], enc01),
        (&[2, 3], enc23),
        (&[0, 2], enc02),
        (&[0, 3], enc03),
        (&[1, 2], enc12),
        (&[1, 3], enc13),
        (&[0, 1, 2, 3], enc01.mul(&enc23)),
    ];
    let mut terms = Vec::new();
    for (indices, image) in subsets {
        let local = majorana_product(indices, 2);
        let coeff = local.adjoint().trace_product(gate) / c64(4.0, 0.0);
        if coeff.norm() > 1e-14 {
            terms.push((coeff, image));
        }
    }
    Ok(terms)
}

/// Transpile a parity-preserving two-mode gate acting on the modes of an
/// edge into a qubit circuit on the edge qubits around (j,k): a Clifford
/// layer rotates `(A~_jk, B~_j, B~_k)` onto the two-qubit images of
/// `(-i c_0 c_2, -i c_0 c_1, -i c_2 c_3)`, the gate matrix is applied on
/// those two qubits, and the layer is undone.
pub fn transpile_local_gate(
    gate: &CMat,
    j: usize,
    k: usize,
    g: &GraphSpec,
) -> Result<Circuit> {
    if g.vertex_count() <= 2 {
        return Err(Error::BadInput(
            "local transpilation needs at least three vertices".into(),
        ));
    }
    let e = g
        .edge_index(j, k)
        .ok_or_else(|| Error::BadInput(format!("no edge ({j},{k})")))?;
    if gate.nrows() != 4 || gate.ncols() != 4 {
        return Err(Error::DimensionMismatch { expected: 4, got: gate.nrows() });
    }
    fock::check_parity_preserving(gate, crate::PARITY_TOL)?;

    // The auxiliary edge sits at the first mode of the applied gate; if
    // vertex j is a leaf, swap roles, which conjugates the gate by the
    // fermionic swap.
    let (j, k, gate) = if g.degree(j) >= 2 {
        (j, k, gate.clone())
    } else if g.degree(k) >= 2 {
        let f = library_matrix("fswap", &[])?;
        (k, j, f.dot(gate).dot(&f))
    } else {
        return Err(Error::BadInput(format!(
            "no auxiliary edge at either endpoint of ({j},{k})"
        )));
    };
    let aux = *g
        .incident(j)
        .iter()
        .find(|&&f| f != e)
        .expect("degree checked above");

    let ops = build_edge_operators(g)?;
    let u = ops.edge_qubits();
    let (a, b) = (aux, e);

    let mut input = [ops.atilde(j, k)?, *ops.btilde(j), *ops.btilde(k)];
    let mut target = [
        PauliString::y(u, a).mul(&PauliString::x(u, b)).scaled(2),
        PauliString::z(u, a),
        PauliString::z(u, b),
    ];
    let mut bld_in = CliffordBuilder::new();
    reduce_triple(&mut bld_in, &mut input, a, b)?;
    let mut bld_t = CliffordBuilder::new();
    reduce_triple(&mut bld_t, &mut target, a, b)?;

    // Conjugation by w maps the encoded triple onto the two-qubit triple,
    // so the encoded gate is w^dagger (gate at (a,b)) w.
    let mut w = bld_in.gates;
    w.extend(invert_gates(&bld_t.gates));
    let w_dagger = invert_gates(&w);

    let mut circuit = Circuit::new(CircuitKind::Qubit, u);
    for app in w {
        circuit.push(&app.gate.name, vec![], app.targets);
    }
    circuit.push_raw("local", gate, vec![a, b]);
    for app in w_dagger {
        circuit.push(&app.gate.name, vec![], app.targets);
    }
    Ok(circuit)
}

/// The unique state stabilized by every cycle generator and every vertex
/// operator: the encoded vacuum, since `B_k = 1 - 2 n_k`. Returns the dense
/// state on the edge qubits together with a preparation circuit mapping
/// `|0...0>` to it.
pub fn vacuum_state(g: &GraphSpec) -> Result<(CVec, Circuit)> {
    let ops = build_edge_operators(g)?;
    let u = ops.edge_qubits();
    if u > crate::DENSE_WIDTH_CAP {
        return Err(Error::WidthCap { requested: u, cap: crate::DENSE_WIDTH_CAP });
    }

    let mut tracked: Vec<PauliString> = Vec::new();
    tracked.extend_from_slice(&ops.btilde);
    tracked.extend_from_slice(&ops.stabilizers);

    let mut bld = CliffordBuilder::new();
    let mut done = 0usize;
    for idx in 0..tracked.len() {
        // Row-reduce against the finished pivots, which sit at Z_q for
        // q < done by construction.
        let mut cur = tracked[idx];
        for q in 0..done {
            if cur.z_mask() >> q & 1 == 1 {
                cur = cur.mul(&PauliString::z(u, q));
            }
        }
        tracked[idx] = cur;
        if cur.is_identity_up_to_phase() {
            if cur.phase_exponent() != 0 {
                return Err(Error::InconsistentStabilizers(
                    "a product of vacuum stabilizers is -identity".into(),
                ));
            }
            continue;
        }
        let finished = (1u128 << done) - 1;
        if (cur.x_mask() | cur.z_mask()) & finished != 0 {
            return Err(Error::InconsistentStabilizers(
                "vacuum stabilizer clashes with a finished pivot".into(),
            ));
        }

        if cur.x_mask() == 0 {
            // Pure Z string: fold onto one qubit without leaving the z basis.
            let sup = support_qubits(&tracked[idx]);
            let p = sup[0];
            let rest: Vec<usize> = sup[1..].to_vec();
            for q in rest {
                bld.cx(q, p, &mut tracked);
            }
            if p != done {
                bld.swap(p, done, &mut tracked);
            }
        } else {
            for q in support_qubits(&tracked[idx]) {
                bld.letter_to_x(idx, q, &mut tracked);
            }
            let sup = support_qubits(&tracked[idx]);
            let p = sup[0];
            for &q in &sup[1..] {
                bld.cx(p, q, &mut tracked);
            }
            bld.h(p, &mut tracked);
            if p != done {
                bld.swap(p, done, &mut tracked);
            }
        }
        if tracked[idx].phase_exponent() == 2 {
            bld.pauli_x(done, &mut tracked);
        }
        if tracked[idx] != PauliString::z(u, done) {
            return Err(Error::InconsistentStabilizers(
                "vacuum reduction failed to produce a Z pivot".into(),
            ));
        }
        done += 1;
    }
    if done != u {
        return Err(Error::InconsistentStabilizers(format!(
            "vacuum stabilizers fix only {done} of {u} qubits"
        )));
    }

    let mut prep = Circuit::new(CircuitKind::Qubit, u);
    for app in invert_gates(&bld.gates) {
        prep.push(&app.gate.name, vec![], app.targets);
    }
    let state = prep.apply(&basis_state(1usize << u, 0))?;
    Ok((state, prep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::library_matrix;
    use crate::linalg::{adjoint, frobenius_distance, identity, max_abs_diff, random_parity_unitary};
    use crate::testkit;
    use rand::Rng;

    fn path(n: usize) -> GraphSpec {
        let edges: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
        GraphSpec::new(n, &edges).unwrap()
    }

    fn star(d: usize) -> GraphSpec {
        let edges: Vec<(usize, usize)> = (1..=d).map(|i| (0, i)).collect();
        GraphSpec::new(d + 1, &edges).unwrap()
    }

    fn triangle() -> GraphSpec {
        GraphSpec::new(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    fn square() -> GraphSpec {
        GraphSpec::new(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()
    }

    fn complete(m: usize) -> GraphSpec {
        let mut edges = Vec::new();
        for j in 0..m {
            for k in j + 1..m {
                edges.push((j, k));
            }
        }
        GraphSpec::new(m, &edges).unwrap()
    }

    fn zoo() -> Vec<GraphSpec> {
        vec![path(2), path(3), path(5), star(3), star(5), triangle(), square(), complete(4), complete(5)]
    }

    #[test]
    fn graph_validation_and_defaults() {
        assert!(matches!(GraphSpec::new(3, &[(0, 0)]), Err(Error::BadGraph(_))));
        assert!(matches!(GraphSpec::new(3, &[(0, 1), (1, 0)]), Err(Error::BadGraph(_))));
        assert!(matches!(GraphSpec::new(3, &[(0, 3)]), Err(Error::BadGraph(_))));
        assert!(matches!(GraphSpec::new(4, &[(0, 1), (2, 3)]), Err(Error::BadGraph(_))));

        let g = triangle();
        assert_eq!(g.epsilon(0, 1).unwrap(), 1);
        assert_eq!(g.epsilon(1, 0).unwrap(), -1);
        assert_eq!(g.incident(1), &[0, 2]);
        assert_eq!(g.max_degree(), 2);
        assert_eq!(g.support(0, 1), vec![0, 1, 2]);

        // Supplying an edge against the default direction flips its epsilon.
        let h = GraphSpec::new(3, &[(1, 0), (0, 2), (1, 2)]).unwrap();
        assert_eq!(h.epsilon(0, 1).unwrap(), 1);
    }

    #[test]
    fn graph_custom_choices_are_validated() {
        let g = triangle().with_orientation(&[-1, 1, 1]).unwrap();
        assert_eq!(g.epsilon(0, 1).unwrap(), -1);
        assert!(triangle().with_orientation(&[1, 1]).is_err());
        assert!(triangle().with_orientation(&[1, 0, 1]).is_err());

        let g = triangle().with_local_order(vec![vec![1, 0], vec![0, 2], vec![1, 2]]).unwrap();
        assert_eq!(g.incident(0), &[1, 0]);
        assert!(triangle().with_local_order(vec![vec![0, 1], vec![0, 2]]).is_err());
        assert!(triangle()
            .with_local_order(vec![vec![1, 1], vec![0, 2], vec![1, 2]])
            .is_err());
    }

    #[test]
    fn graph_json_round_trip() {
        let g = complete(4).with_orientation(&[1, -1, 1, 1, -1, 1]).unwrap();
        let back = GraphSpec::from_json(&g.to_json()).unwrap();
        assert_eq!(g, back);

        let minimal = r#"{"vertices": 3, "edges": [[0,1],[1,2]]}"#;
        let g = GraphSpec::from_json(minimal).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.epsilon(2, 1).unwrap(), -1);
    }

    #[test]
    fn single_edge_operators() {
        let g = path(2);
        let ops = build_edge_operators(&g).unwrap();
        assert_eq!(*ops.btilde(0), PauliString::z(1, 0));
        assert_eq!(*ops.btilde(1), PauliString::z(1, 0));
        assert_eq!(ops.atilde(0, 1).unwrap(), PauliString::x(1, 0));
        assert_eq!(ops.atilde(1, 0).unwrap(), PauliString::x(1, 0).scaled(2));
        assert!(ops.stabilizers().is_empty());
    }

    #[test]
    fn triangle_operators() {
        let ops = build_edge_operators(&triangle()).unwrap();
        for k in 0..3 {
            assert_eq!(ops.btilde(k).weight(), 2);
        }
        // A~_01 has no earlier incident edges at either endpoint.
        assert_eq!(ops.atilde(0, 1).unwrap(), PauliString::x(3, 0));
        // A~_12 is preceded by edge 0 at vertex 1 and edge 1 at vertex 2.
        assert_eq!(
            ops.atilde(1, 2).unwrap(),
            PauliString::from_masks(3, 0, 0b100, 0b011)
        );
    }

    #[test]
    fn atilde_antisymmetry() {
        let g = complete(4);
        let ops = build_edge_operators(&g).unwrap();
        for &(j, k) in g.edges() {
            assert_eq!(ops.atilde(k, j).unwrap(), ops.atilde(j, k).unwrap().scaled(2));
        }
    }

    #[test]
    fn relation_suite_exact_on_zoo() {
        // build_edge_operators verifies all algebraic relations with exact
        // symbolic arithmetic; construction succeeding is the assertion.
        for g in zoo() {
            build_edge_operators(&g).unwrap();
        }
    }

    #[test]
    fn stabilizer_counts_and_forms() {
        assert!(stabilizer_generators(&path(4)).unwrap().is_empty());
        assert!(stabilizer_generators(&star(5)).unwrap().is_empty());

        let tri = stabilizer_generators(&triangle()).unwrap();
        assert_eq!(tri.len(), 1);
        // i^3 A~_10 A~_02 A~_21 collapses to -X Y X on the three edge qubits.
        assert_eq!(tri[0], PauliString::from_masks(3, 3, 0b111, 0b010));
        assert_eq!(tri[0].to_string(), "-1 XYX");
        assert_eq!(tri[0].mul(&tri[0]), PauliString::identity(3));

        let sq = stabilizer_generators(&square()).unwrap();
        assert_eq!(sq.len(), 1);
        assert_eq!(sq[0].weight(), 4);
        assert!(sq[0].is_hermitian());

        assert_eq!(stabilizer_generators(&complete(4)).unwrap().len(), 3);
    }

    #[test]
    fn codespace_dimensions_match_even_sector() {
        for g in zoo() {
            let m = g.vertex_count() as u32;
            assert_eq!(codespace_dimension(&g).unwrap(), 1u128 << (m - 1), "graph on {m} vertices");
        }
    }

    #[test]
    fn cycle_relation_violated_globally_restored_on_codespace() {
        let ops = build_edge_operators(&triangle()).unwrap();
        let gen = &ops.stabilizers()[0];
        // Not the identity on the full edge-qubit space.
        assert!(!gen.is_identity_up_to_phase());
        // Trace over the codespace equals the codespace dimension, and the
        // generator is unitary, so its restriction is the identity.
        let dim = c64(4.0, 0.0);
        assert!((ops.codespace_trace(gen) - dim).norm() < 1e-12);
        assert!((ops.codespace_trace(&PauliString::identity(3)) - dim).norm() < 1e-12);
    }

    #[test]
    fn encoded_pair_images_multiply_like_majorana_pairs() {
        let ops = build_edge_operators(&triangle()).unwrap();
        let (j, k) = (0usize, 1usize);
        let enc01 = ops.btilde(j).scaled(1);
        let enc23 = ops.btilde(k).scaled(1);
        let enc02 = ops.atilde(j, k).unwrap().scaled(1);
        let enc03 = enc02.mul(&enc23);
        let enc12 = enc01.scaled(2).mul(&enc02);
        let enc13 = enc01.scaled(2).mul(&enc03);
        let minus_one = PauliString::identity(3).scaled(2);

        for pair in [enc01, enc23, enc02, enc03, enc12, enc13] {
            assert_eq!(pair.mul(&pair), minus_one, "squares to -1 like c_a c_b");
        }
        assert_eq!(enc01.mul(&enc12), enc02);
        assert_eq!(enc02.mul(&enc23), enc03);
        assert_eq!(enc12.mul(&enc23), enc13);
        assert_eq!(enc01.mul(&enc13), enc03);
        // c_0 c_1 c_2 c_3 = -(c_0 c_2)(c_1 c_3).
        assert_eq!(enc01.mul(&enc23), enc02.mul(&enc13).scaled(2));
    }

    #[test]
    fn trace_check_empty_word() {
        let (f, e) = trace_check(&triangle(), &[]).unwrap();
        assert!((f - c64(4.0, 0.0)).norm() < 1e-12);
        assert!((e - c64(4.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn trace_check_single_letter() {
        // Tr over the even sector of 1 - 2 n_0 on three modes vanishes.
        let (f, e) = trace_check(&triangle(), &[WordLetter::B(0)]).unwrap();
        assert!(f.norm() < 1e-12);
        assert!(e.norm() < 1e-12);
    }

    #[test]
    fn trace_check_random_words_on_k4() {
        let g = complete(4);
        let edges: Vec<(usize, usize)> = g.edges().to_vec();
        let mut rng = testkit::rng(0x5f_ae);
        for _ in 0..50 {
            let len = rng.gen_range(0..=6);
            let word: Vec<WordLetter> = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        WordLetter::B(rng.gen_range(0..4))
                    } else {
                        let (j, k) = edges[rng.gen_range(0..edges.len())];
                        if rng.gen_bool(0.5) {
                            WordLetter::A(j, k)
                        } else {
                            WordLetter::A(k, j)
                        }
                    }
                })
                .collect();
            let (f, e) = trace_check(&g, &word).unwrap();
            assert!((f - e).norm() < 1e-9, "word {word:?}: fock {f}, encoded {e}");
        }
    }

    #[test]
    fn trace_check_input_validation() {
        assert!(matches!(
            trace_check(&triangle(), &[WordLetter::A(0, 0)]),
            Err(Error::BadInput(_))
        ));
        assert!(matches!(
            trace_check(&square(), &[WordLetter::A(0, 2)]),
            Err(Error::BadInput(_))
        ));
        assert!(matches!(trace_check(&path(7), &[]), Err(Error::BadInput(_))));
    }

    fn expansion_dense(terms: &[(num_complex::Complex64, PauliString)], u: usize) -> CMat {
        let dim = 1usize << u;
        let mut acc = CMat::zeros((dim, dim));
        for (coeff, p) in terms {
            acc = acc + p.to_dense().mapv(|v| v * *coeff);
        }
        acc
    }

    #[test]
    fn transpile_identity_gate() {
        let circuit = transpile_local_gate(&identity(4), 0, 1, &triangle()).unwrap();
        let got = circuit.evaluate().unwrap();
        assert!(frobenius_distance(&got, &identity(8)) < 1e-12);
    }

    #[test]
    fn transpile_matches_encoded_expansion() {
        let mut rng = testkit::rng(0xc0de);
        let cases: Vec<(GraphSpec, Vec<(usize, usize)>)> = vec![
            (path(3), vec![(0, 1), (1, 2), (2, 1)]),
            (triangle(), vec![(0, 1), (1, 2), (2, 0)]),
            (complete(4), vec![(0, 1), (2, 3), (1, 3)]),
        ];
        for (g, edges) in cases {
            let ops = build_edge_operators(&g).unwrap();
            for (j, k) in edges {
                let mut gates = vec![
                    library_matrix("int_nn", &[std::f64::consts::PI]).unwrap(),
                    library_matrix("hop", &[0.7]).unwrap(),
                    library_matrix("pair", &[0.3]).unwrap(),
                    library_matrix("fswap", &[]).unwrap(),
                ];
                gates.push(random_parity_unitary(&mut rng, 2));
                for gate in gates {
                    let circuit = transpile_local_gate(&gate, j, k, &g).unwrap();
                    let got = circuit.evaluate().unwrap();
                    let want =
                        expansion_dense(&encoded_gate_expansion(&gate, j, k, &ops).unwrap(), ops.edge_qubits());
                    assert!(
                        max_abs_diff(&got, &want) < 1e-9,
                        "gate mismatch on edge ({j},{k})"
                    );
                }
            }
        }
    }

    #[test]
    fn transpile_against_fock_oracle_by_traces() {
        // Dual-side check: traces of (gate word) agree between the Fock
        // representation on the even sector and the transpiled circuit on
        // the codespace, over a family of probe words.
        for (g, j, k) in [(path(3), 0usize, 1usize), (triangle(), 1, 2)] {
            let m = g.vertex_count();
            let gate = library_matrix("int_nn", &[std::f64::consts::PI]).unwrap();
            let ops = build_edge_operators(&g).unwrap();
            let circuit = transpile_local_gate(&gate, j, k, &g).unwrap();
            let encoded = circuit.evaluate().unwrap();

            // Dense Fock-side gate via the simulator.
            let dim = 1usize << m;
            let mut fock_gate = CMat::zeros((dim, dim));
            for col in 0..dim {
                let v = fock::FockVector::basis(m, col).unwrap();
                let w = fock::apply_fermionic_gate(&v, &gate, &[j, k]).unwrap();
                for row in 0..dim {
                    fock_gate[[row, col]] = w.amplitudes()[row];
                }
            }

            let mut rng = testkit::rng(0xfeed);
            let edges: Vec<(usize, usize)> = g.edges().to_vec();
            for _ in 0..20 {
                let len = rng.gen_range(0..=4);
                let word: Vec<WordLetter> = (0..len)
                    .map(|_| {
                        if rng.gen_bool(0.5) {
                            WordLetter::B(rng.gen_range(0..m))
                        } else {
                            let (a, b) = edges[rng.gen_range(0..edges.len())];
                            WordLetter::A(a, b)
                        }
                    })
                    .collect();

                let probe_fock = fock_word(&word, m).unwrap().to_dense();
                let even = PauliString::parity(m).to_dense();
                let prod = fock_gate.dot(&probe_fock);
                let tf = (trace_of(&prod) + trace_of(&prod.dot(&even))) / 2.0;

                let probe_enc = ops.encoded_word(&word).unwrap().to_dense();
                let dim_l = 1usize << ops.edge_qubits();
                let mut projector = identity(dim_l);
                for s in ops.stabilizers() {
                    let p = (identity(dim_l) + s.to_dense()).mapv(|v| v * 0.5);
                    projector = projector.dot(&p);
                }
                let te = trace_of(&encoded.dot(&probe_enc).dot(&projector));
                assert!((tf - te).norm() < 1e-9, "word {word:?}");
            }
        }
    }

    fn trace_of(m: &CMat) -> num_complex::Complex64 {
        (0..m.nrows()).map(|i| m[[i, i]]).sum()
    }

    #[test]
    fn transpile_errors() {
        let gate = identity(4);
        assert!(matches!(
            transpile_local_gate(&gate, 0, 1, &path(2)),
            Err(Error::BadInput(_))
        ));
        assert!(matches!(
            transpile_local_gate(&gate, 0, 2, &path(3)),
            Err(Error::BadInput(_))
        ));
        let odd = library_matrix("h", &[]).unwrap(); // wrong dimension
        assert!(matches!(
            transpile_local_gate(&odd, 0, 1, &triangle()),
            Err(Error::DimensionMismatch { .. })
        ));
        // A parity-violating 4x4: X on the first mode.
        let mut x0 = CMat::zeros((4, 4));
        for b in 0..4 {
            x0[[b ^ 1, b]] = c64(1.0, 0.0);
        }
        assert!(matches!(
            transpile_local_gate(&x0, 0, 1, &triangle()),
            Err(Error::NotParityPreserving { .. })
        ));
    }

    #[test]
    fn transpile_stays_on_local_support() {
        let g = complete(5);
        let gate = library_matrix("hop", &[0.4]).unwrap();
        for &(j, k) in g.edges() {
            let allowed = g.support(j, k);
            let circuit = transpile_local_gate(&gate, j, k, &g).unwrap();
            for app in &circuit.gates {
                for &t in &app.targets {
                    assert!(allowed.contains(&t), "edge ({j},{k}) touched qubit {t}");
                }
            }
        }
    }

    #[test]
    fn transpile_cost_linear_in_degree() {
        // Star graphs push one endpoint to the maximum degree; the Clifford
        // dressing must stay linear in it.
        for d in 3..=8 {
            let g = star(d);
            let gate = library_matrix("hop", &[0.4]).unwrap();
            let circuit = transpile_local_gate(&gate, 0, 1, &g).unwrap();
            let clifford = circuit.gate_count() - 1;
            assert!(
                clifford <= 4 * d + 70,
                "degree {d} needed {clifford} Clifford gates"
            );
        }
    }

    #[test]
    fn vacuum_on_trees_is_all_zeros() {
        for g in [path(2), path(4), star(4)] {
            let u = g.edge_count();
            let (state, prep) = vacuum_state(&g).unwrap();
            let expect = basis_state(1 << u, 0);
            assert!(crate::linalg::vec_distance(&state, &expect) < 1e-12);
            assert!(prep.gate_count() <= 4 * u * u + 8);
        }
    }

    #[test]
    fn vacuum_is_stabilized_on_cyclic_graphs() {
        for g in [triangle(), square(), complete(4)] {
            let ops = build_edge_operators(&g).unwrap();
            let (state, prep) = vacuum_state(&g).unwrap();
            let u = g.edge_count();
            assert!((crate::linalg::norm(&state) - 1.0).abs() < 1e-12);
            for k in 0..g.vertex_count() {
                let moved = ops.btilde(k).apply(&state);
                assert!(crate::linalg::vec_distance(&moved, &state) < 1e-12, "B~_{k}");
            }
            for (i, s) in ops.stabilizers().iter().enumerate() {
                let moved = s.apply(&state);
                assert!(crate::linalg::vec_distance(&moved, &state) < 1e-12, "C~_{i}");
            }
            let replay = prep.apply(&basis_state(1 << u, 0)).unwrap();
            assert!(crate::linalg::vec_distance(&replay, &state) < 1e-12);
            assert!(prep.gate_count() <= 4 * u * u + 8);
        }
    }

    #[test]
    fn vacuum_state_is_deterministic() {
        let (a, _) = vacuum_state(&complete(4)).unwrap();
        let (b, _) = vacuum_state(&complete(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn clifford_reduction_maps_triple_exactly() {
        // The transpiler relies on conjugation sending the encoded triple to
        // the two-qubit triple; check it on a dense example.
        let g = complete(4);
        let ops = build_edge_operators(&g).unwrap();
        let (j, k) = (1usize, 3usize);
        let e = g.edge_index(j, k).unwrap();
        let aux = *g.incident(j).iter().find(|&&f| f != e).unwrap();
        let u = ops.edge_qubits();

        let mut input = [ops.atilde(j, k).unwrap(), *ops.btilde(j), *ops.btilde(k)];
        let originals = input;
        let mut bld = CliffordBuilder::new();
        reduce_triple(&mut bld, &mut input, aux, e).unwrap();
        assert_eq!(input[0], PauliString::x(u, aux));
        assert_eq!(input[1], PauliString::z(u, aux));
        assert_eq!(input[2], PauliString::z(u, aux).mul(&PauliString::z(u, e)));


        let mut circuit = Circuit::new(CircuitKind::Qubit, u);
        for app in &bld.gates {
            circuit.push(&app.gate.name, vec![], app.targets.clone());
        }
        let w = circuit.evaluate().unwrap();
        for (orig, reduced) in originals.iter().zip(input.iter()) {
            let lhs = w.dot(&orig.to_dense()).dot(&adjoint(&w));
            assert!(frobenius_distance(&lhs, &reduced.to_dense()) < 1e-9);
        }
    }
}
