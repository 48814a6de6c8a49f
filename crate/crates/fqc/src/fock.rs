//! Dense Fock-space states and operators for `m` local fermionic modes.
//!
//! A basis state is an occupation string `|n_0, ..., n_{m-1}>` packed into
//! an index with bit `s = n_s`. Ladder operators carry the Jordan-Wigner
//! style sign `(-1)^{n_0 + ... + n_{j-1}}`, which is what distinguishes a
//! fermionic gate application from a plain tensor-product application: a
//! `p`-mode gate is applied by extracting each target mode (with its sign)
//! into a scratch register, acting there, and re-inserting in reverse order.

use crate::linalg::{c64, CMat, CVec, ONE, ZERO};
use crate::pauli::PauliString;
use crate::{Error, Result, DENSE_WIDTH_CAP, PARITY_TOL};
use num_complex::Complex64;

/// A dense state of `m` local fermionic modes.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    m: usize,
    amps: CVec,
}

/// Pack an occupation string (mode 0 first) into a basis index.
pub fn index_from_occupations(occ: &[u8]) -> usize {
    occ.iter()
        .enumerate()
        .fold(0, |acc, (s, &n)| acc | ((n as usize & 1) << s))
}

fn low_bits(j: usize) -> usize {
    (1usize << j) - 1
}

/// Sign `(-1)^{n_0 + ... + n_{j-1}}` of the basis index `b`.
#[inline]
pub(crate) fn jw_sign(b: usize, j: usize) -> f64 {
    if (b & low_bits(j)).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl FockVector {
    pub fn new(m: usize, amps: CVec) -> Result<Self> {
        check_width(m)?;
        if amps.len() != 1 << m {
            return Err(Error::DimensionMismatch { expected: 1 << m, got: amps.len() });
        }
        Ok(FockVector { m, amps })
    }

    pub fn zeros(m: usize) -> Result<Self> {
        check_width(m)?;
        Ok(FockVector { m, amps: CVec::zeros(1 << m) })
    }

    /// Basis state from its packed index.
    pub fn basis(m: usize, index: usize) -> Result<Self> {
        check_width(m)?;
        if index >= 1 << m {
            return Err(Error::IndexOutOfRange { index, width: 1 << m });
        }
        let mut v = FockVector::zeros(m)?;
        v.amps[index] = ONE;
        Ok(v)
    }

    /// Basis state from an occupation string, `occupations[s] = n_s`.
    pub fn from_occupations(occupations: &[u8]) -> Result<Self> {
        Self::basis(occupations.len(), index_from_occupations(occupations))
    }

    pub fn vacuum(m: usize) -> Result<Self> {
        Self::basis(m, 0)
    }

    pub fn num_modes(&self) -> usize {
        self.m
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amps
    }

    pub fn into_amplitudes(self) -> CVec {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm(&self.amps)
    }

    pub fn inner(&self, other: &FockVector) -> Complex64 {
        crate::linalg::inner(&self.amps, &other.amps)
    }

    pub fn scaled(&self, factor: Complex64) -> FockVector {
        FockVector { m: self.m, amps: self.amps.mapv(|a| a * factor) }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        FockVector { m: self.m, amps: &self.amps + &other.amps }
    }

    pub fn normalized(&self) -> Result<FockVector> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(Error::Precondition("cannot normalise the zero vector".into()));
        }
        Ok(self.scaled(c64(1.0 / n, 0.0)))
    }

    /// Apply `a_j` (`dagger = false`) or `a_j^dagger` (`dagger = true`).
    pub fn apply_ladder(&self, j: usize, dagger: bool) -> Result<FockVector> {
        if j >= self.m {
            return Err(Error::IndexOutOfRange { index: j, width: self.m });
        }
        let mut out = FockVector::zeros(self.m)?;
        for b in 0..self.amps.len() {
            let amp = self.amps[b];
            if amp == ZERO {
                continue;
            }
            let occupied = (b >> j) & 1 == 1;
            if occupied == dagger {
                continue; // annihilating empty or creating occupied gives 0
            }
            out.amps[b ^ (1 << j)] += amp * c64(jw_sign(b, j), 0.0);
        }
        Ok(out)
    }

    /// Weight of the state in the even and odd parity sectors.
    pub fn sector_weights(&self) -> (f64, f64) {
        let mut even = 0.0;
        let mut odd = 0.0;
        for (b, amp) in self.amps.iter().enumerate() {
            if b.count_ones() % 2 == 0 {
                even += amp.norm_sqr();
            } else {
                odd += amp.norm_sqr();
            }
        }
        (even, odd)
    }

    /// Project onto the parity sector (`0` even, `1` odd), no renormalisation.
    pub fn sector_project(&self, sector: u8) -> FockVector {
        let mut out = self.clone();
        for (b, amp) in out.amps.iter_mut().enumerate() {
            if b.count_ones() as u8 % 2 != sector & 1 {
                *amp = ZERO;
            }
        }
        out
    }

    /// Apply a Pauli string on the same number of modes.
    pub fn apply_pauli(&self, p: &PauliString) -> FockVector {
        assert_eq!(p.num_qubits(), self.m);
        FockVector { m: self.m, amps: p.apply(&self.amps) }
    }
}

fn check_width(m: usize) -> Result<()> {
    if m > DENSE_WIDTH_CAP {
        return Err(Error::WidthCap { requested: m, cap: DENSE_WIDTH_CAP });
    }
    Ok(())
}

/// Dense matrix of `a_j` or `a_j^dagger` on `m` modes.
pub fn ladder_dense(m: usize, j: usize, dagger: bool) -> Result<CMat> {
    check_width(m)?;
    if j >= m {
        return Err(Error::IndexOutOfRange { index: j, width: m });
    }
    let dim = 1usize << m;
    let mut out = CMat::zeros((dim, dim));
    for b in 0..dim {
        let occupied = (b >> j) & 1 == 1;
        if occupied == dagger {
            continue;
        }
        out[[b ^ (1 << j), b]] = c64(jw_sign(b, j), 0.0);
    }
    Ok(out)
}

/// One summand of a ladder polynomial: `coeff * f_0 f_1 ... f_{k-1}` where
/// each factor is `(mode, dagger)` and factors are written in operator
/// order, so the rightmost factor acts first.
#[derive(Debug, Clone)]
pub struct LadderTerm {
    pub coeff: Complex64,
    pub factors: Vec<(usize, bool)>,
}

/// A polynomial in ladder operators on `m` modes.
#[derive(Debug, Clone)]
pub struct LadderPolynomial {
    m: usize,
    terms: Vec<LadderTerm>,
}

impl LadderPolynomial {
    pub fn new(m: usize, terms: Vec<LadderTerm>) -> Result<Self> {
        check_width(m)?;
        for t in &terms {
            for &(j, _) in &t.factors {
                if j >= m {
                    return Err(Error::IndexOutOfRange { index: j, width: m });
                }
            }
        }
        Ok(LadderPolynomial { m, terms })
    }

    /// `n_j = a_j^dagger a_j`.
    pub fn number_op(m: usize, j: usize) -> Result<Self> {
        Self::new(m, vec![LadderTerm { coeff: ONE, factors: vec![(j, true), (j, false)] }])
    }

    pub fn num_modes(&self) -> usize {
        self.m
    }

    pub fn apply(&self, v: &FockVector) -> Result<FockVector> {
        if v.num_modes() != self.m {
            return Err(Error::DimensionMismatch { expected: 1 << self.m, got: 1 << v.num_modes() });
        }
        let mut out = FockVector::zeros(self.m)?;
        for term in &self.terms {
            let mut w = v.clone();
            for &(j, dagger) in term.factors.iter().rev() {
                w = w.apply_ladder(j, dagger)?;
            }
            out = out.add(&w.scaled(term.coeff));
        }
        Ok(out)
    }

    pub fn to_dense(&self) -> Result<CMat> {
        let dim = 1usize << self.m;
        let mut out = CMat::zeros((dim, dim));
        for b in 0..dim {
            let col = self.apply(&FockVector::basis(self.m, b)?)?;
            for r in 0..dim {
                out[[r, b]] = col.amplitudes()[r];
            }
        }
        Ok(out)
    }
}

/// Frobenius norm of the commutator of `u` with the parity operator.
pub fn parity_deviation(u: &CMat) -> f64 {
    let mut acc = 0.0;
    for i in 0..u.nrows() {
        for j in 0..u.ncols() {
            if (i.count_ones() + j.count_ones()) % 2 == 1 {
                // Commutator entry is u_ij ((-1)^{p_i} - (-1)^{p_j}) = +-2 u_ij.
                acc += 4.0 * u[[i, j]].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn check_parity_preserving(u: &CMat, tol: f64) -> Result<()> {
    let deviation = parity_deviation(u);
    if deviation > tol {
        return Err(Error::NotParityPreserving { deviation });
    }
    Ok(())
}

/// Apply a parity-preserving `p`-mode gate at the (ordered, distinct) modes
/// `targets`: extract each target in order with the sign
/// `(-1)^{n_j sum_{s<j} n_s}`, act with the gate on the extracted register
/// (extraction order = gate qubit order), and re-insert in reverse order.
pub fn apply_fermionic_gate(v: &FockVector, gate: &CMat, targets: &[usize]) -> Result<FockVector> {
    let m = v.num_modes();
    let p = targets.len();
    validate_targets(targets, m)?;
    if gate.nrows() != 1 << p || gate.ncols() != 1 << p {
        return Err(Error::DimensionMismatch { expected: 1 << p, got: gate.nrows() });
    }
    check_parity_preserving(gate, PARITY_TOL)?;
    Ok(FockVector { m, amps: apply_fermionic_amps(&v.amps, gate, targets) })
}

/// Core of [`apply_fermionic_gate`] on raw amplitudes; the caller has
/// already validated targets, dimensions and parity.
pub(crate) fn apply_fermionic_amps(amps: &CVec, gate: &CMat, targets: &[usize]) -> CVec {
    let p = targets.len();
    let mut out = CVec::zeros(amps.len());
    for b in 0..amps.len() {
        let amp = amps[b];
        if amp == ZERO {
            continue;
        }
        let mut rest = b;
        let mut sign_ex = 1.0f64;
        let mut x = 0usize;
        for (r, &mode) in targets.iter().enumerate() {
            if (rest >> mode) & 1 == 1 {
                sign_ex *= jw_sign(rest, mode);
                rest ^= 1 << mode;
                x |= 1 << r;
            }
        }
        for y in 0..(1 << p) {
            let g = gate[[y, x]];
            if g == ZERO {
                continue;
            }
            let mut filled = rest;
            let mut sign_in = 1.0f64;
            for r in (0..p).rev() {
                if (y >> r) & 1 == 1 {
                    let mode = targets[r];
                    sign_in *= jw_sign(filled, mode);
                    filled |= 1 << mode;
                }
            }
            out[filled] += amp * g * c64(sign_ex * sign_in, 0.0);
        }
    }
    out
}

pub(crate) fn validate_targets(targets: &[usize], width: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= width {
            return Err(Error::IndexOutOfRange { index: t, width });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}
