#!/usr/bin/env python3
"""Smoke test for the fqc_py extension module.

Touches every exposed surface once: the Majorana algebra, Fock vectors,
circuit transpilation under all three encodings, the edge-operator
construction, the pair codes, the measurement protocol, and one
verification suite. Exits nonzero on the first failure.
"""

import math

import fqc_py as f


def close(a, b, tol=1e-10):
    return abs(a - b) <= tol


# Majorana generators anticommute and square to one.
m = 3
gens = [f.majorana(a, m) for a in range(2 * m)]
for a in range(2 * m):
    assert str(gens[a] * gens[a]) == str(f.PauliString.identity(m))
    for b in range(a + 1, 2 * m):
        assert not gens[a].commutes_with(gens[b])

# A Pauli string round-trips through its display form and acts correctly.
p = f.PauliString.parse("+i XZ.")
assert p == f.PauliString.x(3, 0) * f.PauliString.z(3, 1).__mul__(
    f.PauliString.identity(3)
).__mul__(f.PauliString.parse("+i ..."))
v = f.FockVector.basis(3, 0b000)
w = v.apply_pauli(f.majorana(0, 3))  # c_0 |vac> = |100...>
assert close(abs(w.amplitudes()[0b001]), 1.0)

# Ladder operators: a_0^dagger twice annihilates.
occ = f.FockVector.vacuum(2).create(0)
assert close(occ.create(0).norm(), 0.0)
assert close(occ.norm(), 1.0)

# Hopping between modes 0 and 3 of six: the defect count law gives
# 2 (k - j - 1) + 1 qubit gates under the standard encoding.
c = f.Circuit("fermionic", 6)
c.push("hop", [0.3, -0.55], [0, 3])
q, report = f.transpile(c, "standard")
assert report["gates"] == 2 * (3 - 0 - 1) + 1, report
assert q.kind == "qubit"

# The tree encoding keeps single-mode gates logarithmic and is a bijection
# on basis patterns.
c = f.Circuit("fermionic", 8)
c.push("phase_n", [0.9], [5])
_, report = f.transpile(c, "tree")
assert report["gates"] <= 2 * math.ceil(math.log2(8)) + 1, report
for n in range(256):
    assert f.tree_decode(f.tree_encode(n, 8), 8) == n

# Extraction circuit cost bound.
assert f.tree_extraction_circuit(5, 8).gate_count() <= 3 * 3 + 3

# Pair encoding: one fermionic gate per qubit gate.
c = f.Circuit("qubit", 2)
c.push("cz", [], [0, 1])
_, report = f.transpile(c, "pair")
assert report["gates"] == 1

# Edge operators on the triangle: three mutually valid generators, one
# cycle stabilizer, a four-dimensional codespace, and local transpilation.
g = f.Graph(3, [(0, 1), (1, 2), (2, 0)])
ops = f.EdgeOperators(g)
assert ops.edge_qubits == 3
assert len(ops.stabilizers()) == 1
assert f.superfast_dimension(g) == 4
circuit = f.superfast_transpile(g, "hop", [0.3, -0.55], 0, 1)
assert circuit.width == 3
state, prep = f.superfast_vacuum(g)
assert close(sum(abs(a) ** 2 for a in state), 1.0)
applied = prep.apply([1.0 + 0.0j] + [0.0j] * (2 ** prep.width - 1))
assert close(max(abs(x - y) for x, y in zip(applied, state)), 0.0, 1e-9)

# Pair codes: the rectangular family reaches distance l.
code = f.shor_like_code(2)
assert code.num_qubits == 4
assert [str(s) for s in code.stabilizers()] == ["+1 XZZX", "+1 YY..", "+1 ..YY"]
report = f.code_distance(code, max_weight=3)
assert report["distance"] == 2, report
tau = f.permutation_code([3, 2, 1, 0, 5, 4])
assert all(s.is_hermitian() and s.is_physical() for s in tau.stabilizers())

# Measurement protocol: every forced branch returns the target state with
# unit fidelity at probability 1/4.
psi = f.random_protocol_input(seed=7)
target = f.protocol_target(psi)
for z in (1, -1):
    for y in (1, -1):
        out, record = f.run_protocol(psi, seed=11, force=(z, y))
        assert close(record["probability"], 0.25, 1e-12), record
        assert close(f.protocol_fidelity(psi, out), 1.0, 1e-10)
        assert close(abs(out.inner(target)), 1.0, 1e-10)

# One full verification suite.
report = f.run_suite("codes", seed=42)
assert report["passed"], report
assert all(check["passed"] for check in report["checks"])

print("fqc_py smoke test: ok")
