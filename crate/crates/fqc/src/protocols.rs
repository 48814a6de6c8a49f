//! Parity-preserving extensions, sector-pair synthesis, and the adaptive
//! measurement protocol that replaces the four-generator Majorana rotation.
//!
//! The register convention throughout: qubit 0 is the parity qubit, the
//! working qubits sit at indices 1 and above. The involution V routes the
//! global parity onto qubit 0; conjugating `I (x) X` by V yields the
//! parity-preserving extension of X.

use crate::circuit::{Circuit, CircuitKind};
use crate::fock::FockVector;
use crate::linalg::{self, c64, CMat, ONE, ZERO};
use crate::pauli::majorana_product;
use crate::{Error, Result};
use rand::Rng;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

/// The basis involution putting the global parity on bit 0.
#[inline]
fn route_parity(b: usize) -> usize {
    (b & !1) | (b.count_ones() as usize & 1)
}

/// Lift an operator on the working qubits to a parity-preserving operator
/// on one extra (parity) qubit: conjugate `I (x) X` by the parity routing.
/// The lift is a *-algebra homomorphism, and fixes operators that already
/// preserve parity.
pub fn ppext(x: &CMat) -> CMat {
    let d = x.nrows();
    let mut out = CMat::zeros((2 * d, 2 * d));
    for bh in 0..d {
        for ah in 0..d {
            let v = x[[ah, bh]];
            if v == ZERO {
                continue;
            }
            for c in 0..2usize {
                out[[route_parity(c | ah << 1), route_parity(c | bh << 1)]] = v;
            }
        }
    }
    out
}

/// Quantum control: block identity plus the gate, control at gate qubit 0.
pub fn controlled(u: &CMat) -> CMat {
    let d = u.nrows();
    let mut out = CMat::zeros((2 * d, 2 * d));
    for rest in 0..d {
        out[[rest << 1, rest << 1]] = ONE;
    }
    for a in 0..d {
        for b in 0..d {
            let v = u[[a, b]];
            if v != ZERO {
                out[[1 | a << 1, 1 | b << 1]] = v;
            }
        }
    }
    out
}

/// A parity-preserving operator written as its two sector blocks, sectors
/// identified with the working-qubit space through the parity routing.
#[derive(Debug, Clone)]
pub struct SectorPair {
    pub u0: CMat,
    pub u1: CMat,
}

impl SectorPair {
    /// Assemble the block pair into a dense operator on the full register
    /// (parity qubit at index 0).
    pub fn assemble(&self) -> Result<CMat> {
        let d = self.u0.nrows();
        if self.u1.nrows() != d {
            return Err(Error::DimensionMismatch { expected: d, got: self.u1.nrows() });
        }
        let mut out = CMat::zeros((2 * d, 2 * d));
        for (p, block) in [(0usize, &self.u0), (1usize, &self.u1)] {
            for a in 0..d {
                for b in 0..d {
                    let v = block[[a, b]];
                    if v != ZERO {
                        out[[route_parity(p | a << 1), route_parity(p | b << 1)]] = v;
                    }
                }
            }
        }
        Ok(out)
    }
}

/// A circuit acting as the identity on the even sector and as `y` on the
/// odd sector, using one ancilla at index `m`. The cascade routes the
/// global parity onto qubit 0 while parking the working parity on the
/// ancilla; the controlled lift in the middle then fires only on odd
/// inputs, and the unwound cascade hands the ancilla back untouched.
pub fn odd_sector_circuit(y: &CMat, m: usize) -> Result<Circuit> {
    if m < 2 {
        return Err(Error::BadInput("sector synthesis needs at least two qubits".into()));
    }
    let d = 1usize << (m - 1);
    if y.nrows() != d {
        return Err(Error::DimensionMismatch { expected: d, got: y.nrows() });
    }
    if !linalg::is_unitary(y, 1e-9) {
        return Err(Error::BadInput("sector block is not unitary".into()));
    }
    let mut c = Circuit::new(CircuitKind::Qubit, m).with_ancillas(1);
    for r in 1..m {
        c.push("cppx", vec![], vec![r, 0, m]);
    }
    let mut targets = vec![0, m];
    targets.extend(1..m);
    c.push_raw("ctrl_ppext", controlled(&ppext(y)), targets);
    for r in (1..m).rev() {
        c.push("cppx", vec![], vec![r, 0, m]);
    }
    Ok(c)
}

// ---------------------------------------------------------------------------
// The adaptive protocol
// ---------------------------------------------------------------------------

/// One run's branch data: the two measurement outcomes, the probability of
/// the branch taken, and the correction applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchRecord {
    /// Outcome of the four-generator observable, "+1" or "-1".
    pub z: String,
    /// Outcome of the two-generator observable, "+i" or "-i".
    pub y: String,
    pub probability: f64,
    pub correction: String,
}

/// `exp(theta c_a c_b)` applied to a state, using the closed form.
fn apply_quadratic_exp(v: &FockVector, a: usize, b: usize, theta: f64) -> FockVector {
    let rotated = v.apply_pauli(&majorana_product(&[a, b], v.num_modes()));
    v.scaled(c64(theta.cos(), 0.0)).add(&rotated.scaled(c64(theta.sin(), 0.0)))
}

/// The operation the protocol synthesizes: `exp(i pi/4 c_0c_1c_2c_3)`.
pub fn protocol_target(v: &FockVector) -> Result<FockVector> {
    if v.num_modes() < 3 {
        return Err(Error::BadInput("the protocol needs at least three modes".into()));
    }
    let prod = v.apply_pauli(&majorana_product(&[0, 1, 2, 3], v.num_modes()));
    Ok(v
        .scaled(c64(FRAC_PI_4.cos(), 0.0))
        .add(&prod.scaled(c64(0.0, FRAC_PI_4.sin()))))
}

fn correction_label(y_plus: bool, z_plus: bool) -> String {
    match (y_plus, z_plus) {
        (true, true) => "exp(+pi/4 c2c5)".into(),
        (false, false) => "exp(-pi/4 c2c5)".into(),
        (true, false) => "i exp(pi/2 c0c1) exp(pi/2 c2c3) exp(+pi/4 c2c5)".into(),
        (false, true) => "i exp(pi/2 c0c1) exp(pi/2 c2c3) exp(-pi/4 c2c5)".into(),
    }
}

fn apply_correction(v: &FockVector, y_plus: bool, z_plus: bool) -> FockVector {
    let quad_sign = if y_plus { 1.0 } else { -1.0 };
    let mut out = apply_quadratic_exp(v, 2, 5, quad_sign * FRAC_PI_4);
    if y_plus != z_plus {
        out = apply_quadratic_exp(&out, 2, 3, FRAC_PI_2);
        out = apply_quadratic_exp(&out, 0, 1, FRAC_PI_2);
        out = out.scaled(c64(0.0, 1.0));
    }
    out
}

/// Run the measurement protocol on a state whose ancilla mode (mode 2,
/// generators c_4 and c_5) is empty. Measures the four-generator observable
/// (outcome z), then the two-generator observable (outcome y), applies the
/// branch's correction, and returns the state with the branch record. Each
/// branch occurs with probability exactly 1/4 and, after correction, yields
/// `exp(i pi/4 c_0c_1c_2c_3)` applied to the input, up to a global phase.
///
/// `forced` pins the outcomes `(z, y)` as signs instead of sampling them.
pub fn run_protocol(
    psi: &FockVector,
    forced: Option<(i8, i8)>,
    rng: &mut impl Rng,
) -> Result<(FockVector, BranchRecord)> {
    let m = psi.num_modes();
    if m < 3 {
        return Err(Error::BadInput("the protocol needs at least three modes".into()));
    }
    if (psi.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition("input state must be normalized".into()));
    }
    let annihilated = psi.apply_ladder(2, false)?;
    if annihilated.norm() > 1e-10 {
        return Err(Error::Precondition(
            "the ancilla mode (generators c_4, c_5) must be empty".into(),
        ));
    }
    if let Some((z, y)) = forced {
        if !(z == 1 || z == -1) || !(y == 1 || y == -1) {
            return Err(Error::BadInput("forced outcomes must be +1 or -1 signs".into()));
        }
    }

    // first measurement: c_0 c_1 c_3 c_4, eigenvalues +-1
    let obs4 = majorana_product(&[0, 1, 3, 4], m);
    let rotated = psi.apply_pauli(&obs4);
    let branch = |plus: bool| -> FockVector {
        let sign = if plus { 1.0 } else { -1.0 };
        psi.add(&rotated.scaled(c64(sign, 0.0))).scaled(c64(0.5, 0.0))
    };
    let p_plus = branch(true).norm().powi(2);
    let z_plus = match forced {
        Some((z, _)) => z == 1,
        None => rng.gen::<f64>() < p_plus,
    };
    let p_z = if z_plus { p_plus } else { 1.0 - p_plus };
    let z_label = if z_plus { "+1" } else { "-1" };
    if p_z < 1e-12 {
        return Err(Error::ImprobableBranch {
            z: z_label.into(),
            y: "?".into(),
            probability: p_z,
        });
    }
    let psi_z = branch(z_plus).scaled(c64(1.0 / p_z.sqrt(), 0.0));

    // second measurement: c_2 c_4, eigenvalues +-i
    let obs2 = majorana_product(&[2, 4], m);
    let rotated = psi_z.apply_pauli(&obs2);
    let branch2 = |plus: bool| -> FockVector {
        // the +i eigenprojector is (1 - i c_2c_4)/2
        let coeff = if plus { c64(0.0, -1.0) } else { c64(0.0, 1.0) };
        psi_z.add(&rotated.scaled(coeff)).scaled(c64(0.5, 0.0))
    };
    let q_plus = branch2(true).norm().powi(2);
    let y_plus = match forced {
        Some((_, y)) => y == 1,
        None => rng.gen::<f64>() < q_plus,
    };
    let p_y = if y_plus { q_plus } else { 1.0 - q_plus };
    let y_label = if y_plus { "+i" } else { "-i" };
    if p_y < 1e-12 {
        return Err(Error::ImprobableBranch {
            z: z_label.into(),
            y: y_label.into(),
            probability: p_y,
        });
    }
    let psi_y = branch2(y_plus).scaled(c64(1.0 / p_y.sqrt(), 0.0));

    let out = apply_correction(&psi_y, y_plus, z_plus);
    let record = BranchRecord {
        z: z_label.into(),
        y: y_label.into(),
        probability: p_z * p_y,
        correction: correction_label(y_plus, z_plus),
    };
    Ok((out, record))
}

/// Fidelity |<target|out>| of a protocol output against the closed-form
/// target.
pub fn protocol_fidelity(input: &FockVector, output: &FockVector) -> Result<f64> {
    let target = protocol_target(input)?;
    Ok(output.inner(&target).norm())
}

/// A random normalized state on `m` modes with the ancilla mode (mode 2)
/// empty: a valid protocol input.
pub fn random_protocol_input(rng: &mut impl Rng, m: usize) -> Result<FockVector> {
    if m < 3 {
        return Err(Error::BadInput("the protocol needs at least three modes".into()));
    }
    let mut amps = crate::linalg::CVec::zeros(1 << m);
    for idx in 0..(1usize << m) {
        if idx >> 2 & 1 == 0 {
            amps[idx] = c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    FockVector::new(m, amps)?.normalized()
}

// ---------------------------------------------------------------------------
// Rewriting a qubit basis into the fixed fermionic basis
// ---------------------------------------------------------------------------

/// Rewrite a qubit circuit over the universal basis {t, cz, h} into a
/// fermionic circuit over the four fixed-angle gates, acting on one extra
/// mode (mode 0 carries the parity). Each gate is replaced by its
/// parity-preserving extension:
///
/// * t on qubit r: one fixed phase gate on mode r+1.
/// * cz on (r1, r2): one fixed interaction gate, diagonal so no defects.
/// * h on qubit r: the extension entangles mode 0 with mode r+1; the
///   factorization through the fixed hop and pair gates needs `Lambda(-i)`
///   on each side (six phase gates apiece) and an interaction-defect chain
///   to bridge the non-adjacent mode pair.
///
/// The output evaluates densely to the parity-preserving extension of the
/// input circuit's unitary.
pub fn rewrite_to_fbasis(c: &Circuit) -> Result<Circuit> {
    if c.kind != CircuitKind::Qubit {
        return Err(Error::BadInput("the fixed-basis rewrite consumes qubit circuits".into()));
    }
    let n = c.total_width();
    let mut out = Circuit::new(CircuitKind::Fermionic, n + 1);
    for app in &c.gates {
        match (app.gate.name.as_str(), app.targets.as_slice()) {
            ("t", [r]) => {
                out.push("fbasis_phase", vec![], vec![r + 1]);
            }
            ("cz", [r1, r2]) | ("d", [r1, r2]) => {
                out.push("fbasis_int", vec![], vec![r1 + 1, r2 + 1]);
            }
            ("h", [r]) => {
                let k = r + 1;
                for s in (1..k).rev() {
                    out.push("fbasis_int", vec![], vec![s, k]);
                }
                for _ in 0..6 {
                    out.push("fbasis_phase", vec![], vec![k]);
                }
                out.push("fbasis_pair", vec![], vec![0, k]);
                out.push("fbasis_hop", vec![], vec![0, k]);
                for _ in 0..6 {
                    out.push("fbasis_phase", vec![], vec![k]);
                }
                for s in 1..k {
                    out.push("fbasis_int", vec![], vec![s, k]);
                }
            }
            (name, targets) => {
                return Err(Error::BadGate {
                    name: name.to_string(),
                    reason: format!(
                        "outside the rewrite basis {{t, cz, h}} or wrong arity {}",
                        targets.len()
                    ),
                });
            }
        }
    }
    Ok(out)
}
