//! Phase-tracked Pauli strings in binary-symplectic form.
//!
//! A string on `n` qubits is stored as `i^phase * prod_q X_q^{x_q} Z_q^{z_q}`
//! with the X factor written before the Z factor on every qubit. Under this
//! convention multiplication only ever picks up signs from commuting a Z
//! past an X, so the phase exponent stays exact. `sigma^y = i sigma^x sigma^z`
//! is recovered at rendering time.
//!
//! Majorana operators are Pauli strings:
//! `c_{2k} = sigma^x_k prod_{q<k} sigma^z_q` and
//! `c_{2k+1} = sigma^y_k prod_{q<k} sigma^z_q`, which gives the
//! anti-commutation relation `{c_j, c_k} = 2 delta_{jk}` on the nose.

use crate::linalg::{c64, i_pow, CMat, CVec, ZERO};
use crate::{Error, Result};
use num_complex::Complex64;
use std::fmt;

/// Maximum number of qubits a string can carry (mask width).
pub const MAX_QUBITS: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    /// Exponent of the global factor i^phase, kept mod 4.
    phase: u8,
    x: u128,
    z: u128,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        assert!(n <= MAX_QUBITS);
        PauliString { n, phase: 0, x: 0, z: 0 }
    }

    pub fn from_masks(n: usize, phase: u8, x: u128, z: u128) -> Self {
        assert!(n <= MAX_QUBITS);
        let mask = ones(n);
        PauliString { n, phase: phase & 3, x: x & mask, z: z & mask }
    }

    /// Single sigma^x at qubit `q`.
    pub fn x(n: usize, q: usize) -> Self {
        Self::from_masks(n, 0, 1 << q, 0)
    }

    /// Single sigma^z at qubit `q`.
    pub fn z(n: usize, q: usize) -> Self {
        Self::from_masks(n, 0, 0, 1 << q)
    }

    /// Single sigma^y at qubit `q` (stored as i * XZ).
    pub fn y(n: usize, q: usize) -> Self {
        Self::from_masks(n, 1, 1 << q, 1 << q)
    }

    /// Majorana generator `c_j` on `m` modes, `j < 2m`.
    pub fn majorana(j: usize, m: usize) -> Self {
        assert!(j < 2 * m, "majorana index {j} out of range for {m} modes");
        let k = j / 2;
        let zlow = ones(k);
        if j % 2 == 0 {
            Self::from_masks(m, 0, 1 << k, zlow)
        } else {
            Self::from_masks(m, 1, 1 << k, zlow | (1 << k))
        }
    }

    /// Parity operator `prod_q sigma^z_q`.
    pub fn parity(n: usize) -> Self {
        Self::from_masks(n, 0, 0, ones(n))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    pub fn phase(&self) -> Complex64 {
        i_pow(self.phase)
    }

    pub fn x_mask(&self) -> u128 {
        self.x
    }

    pub fn z_mask(&self) -> u128 {
        self.z
    }

    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        (self.x | self.z).count_ones() as usize
    }

    pub fn scaled(&self, extra_i_exponent: u8) -> Self {
        PauliString { phase: (self.phase + extra_i_exponent) & 3, ..*self }
    }

    pub fn mul(&self, rhs: &PauliString) -> PauliString {
        assert_eq!(self.n, rhs.n, "qubit counts differ");
        // Z^{z1} past X^{x2} contributes (-1)^{|z1 & x2|}.
        let swaps = (self.z & rhs.x).count_ones() as u8;
        PauliString {
            n: self.n,
            phase: (self.phase + rhs.phase + 2 * swaps) & 3,
            x: self.x ^ rhs.x,
            z: self.z ^ rhs.z,
        }
    }

    /// Product of a slice of strings, left to right.
    pub fn product(n: usize, factors: &[PauliString]) -> PauliString {
        factors
            .iter()
            .fold(PauliString::identity(n), |acc, f| acc.mul(f))
    }

    pub fn adjoint(&self) -> PauliString {
        // (i^k X Z)^dagger = i^{-k} Z X = i^{-k} (-1)^{|x & z|} X Z.
        let swaps = (self.x & self.z).count_ones() as u8;
        PauliString {
            n: self.n,
            phase: ((4 - self.phase) + 2 * swaps) & 3,
            x: self.x,
            z: self.z,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.adjoint()
    }

    /// True when the strings commute; Pauli strings either commute or
    /// anti-commute, decided by the symplectic inner product of the masks.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let s = (self.x & other.z).count_ones() + (self.z & other.x).count_ones();
        s % 2 == 0
    }

    /// True when the string commutes with the global parity operator,
    /// i.e. it is a physical (even) operator.
    pub fn is_physical(&self) -> bool {
        self.x.count_ones() % 2 == 0
    }

    /// Conjugate in place by a Hadamard on qubit `q`: swaps the X and Z
    /// bits there, picking up a sign on Y.
    pub fn conj_h(&mut self, q: usize) {
        let bit = 1u128 << q;
        if self.x & self.z & bit != 0 {
            self.phase = (self.phase + 2) & 3;
        } else if (self.x ^ self.z) & bit != 0 {
            self.x ^= bit;
            self.z ^= bit;
        }
    }

    /// Conjugate in place by the phase gate diag(1, i) on qubit `q`.
    pub fn conj_s(&mut self, q: usize) {
        let bit = 1u128 << q;
        if self.x & bit != 0 {
            self.z ^= bit;
            self.phase = (self.phase + 1) & 3;
        }
    }

    /// Conjugate in place by diag(1, -i) on qubit `q`.
    pub fn conj_s_dagger(&mut self, q: usize) {
        let bit = 1u128 << q;
        if self.x & bit != 0 {
            self.z ^= bit;
            self.phase = (self.phase + 3) & 3;
        }
    }

    /// Conjugate in place by a controlled-X with control `c`, target `t`.
    /// In the X-before-Z convention this is phase-free: the X propagates
    /// from control to target and the Z from target to control.
    pub fn conj_cx(&mut self, c: usize, t: usize) {
        debug_assert_ne!(c, t);
        if self.x & (1 << c) != 0 {
            self.x ^= 1 << t;
        }
        if self.z & (1 << t) != 0 {
            self.z ^= 1 << c;
        }
    }

    /// Conjugate in place by a swap of qubits `a` and `b`.
    pub fn conj_swap(&mut self, a: usize, b: usize) {
        self.conj_cx(a, b);
        self.conj_cx(b, a);
        self.conj_cx(a, b);
    }

    /// Conjugate in place by another Pauli string: a sign flip exactly
    /// when the two anticommute.
    pub fn conj_pauli(&mut self, g: &PauliString) {
        if !self.commutes_with(g) {
            self.phase = (self.phase + 2) & 3;
        }
    }

    /// Apply to a dense state: `P |b> = i^phase (-1)^{|b & z|} |b ^ x>`.
    pub fn apply(&self, state: &CVec) -> CVec {
        let dim = 1usize << self.n;
        assert_eq!(state.len(), dim);
        let mut out = CVec::zeros(dim);
        let ph = self.phase();
        for b in 0..dim {
            let amp = state[b];
            if amp == ZERO {
                continue;
            }
            let sign = if ((b as u128) & self.z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            out[b ^ (self.x as usize)] += amp * ph * c64(sign, 0.0);
        }
        out
    }

    pub fn to_dense(&self) -> CMat {
        let dim = 1usize << self.n;
        let mut out = CMat::zeros((dim, dim));
        let ph = self.phase();
        for b in 0..dim {
            let sign = if ((b as u128) & self.z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            out[[b ^ (self.x as usize), b]] = ph * c64(sign, 0.0);
        }
        out
    }

    /// Trace of the dense form: `i^phase 2^n` for a (scaled) identity,
    /// zero otherwise.
    pub fn trace(&self) -> Complex64 {
        if self.is_identity_up_to_phase() {
            self.phase() * c64((1u128 << self.n) as f64, 0.0)
        } else {
            ZERO
        }
    }

    /// The masks as one row for GF(2) elimination, X half low, Z half high.
    pub fn symplectic_row(&self) -> u128 {
        assert!(self.n * 2 <= MAX_QUBITS);
        self.x | (self.z << self.n)
    }

    /// Letter at qubit `q` in 0=I, 1=X, 2=Y, 3=Z.
    pub fn letter(&self, q: usize) -> u8 {
        match ((self.x >> q) & 1, (self.z >> q) & 1) {
            (0, 0) => 0,
            (1, 0) => 1,
            (1, 1) => 2,
            _ => 3,
        }
    }

    /// Trace of `self * m` without materialising the string: the string has
    /// one entry per column, so this is a single pass over `m`.
    pub fn trace_product(&self, m: &CMat) -> Complex64 {
        let dim = 1usize << self.n;
        assert_eq!(m.nrows(), dim);
        let ph = self.phase();
        let x = self.x as usize;
        let mut acc = ZERO;
        for b in 0..dim {
            let sign = if (((b ^ x) as u128) & self.z).count_ones() % 2 == 0 {
                1.0
            } else {
                -1.0
            };
            acc += ph * c64(sign, 0.0) * m[[b ^ x, b]];
        }
        acc
    }

    /// Parse the `Display` form, e.g. `"+i XZ..Y"` or `"-1 YY"`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::BadInput(format!("malformed pauli string {text:?}"));
        let mut parts = text.split_whitespace();
        let phase_tok = parts.next().ok_or_else(bad)?;
        let letters = parts.next().unwrap_or("");
        if parts.next().is_some() {
            return Err(bad());
        }
        let display_phase: u8 = match phase_tok {
            "+1" => 0,
            "+i" => 1,
            "-1" => 2,
            "-i" => 3,
            _ => return Err(bad()),
        };
        let mut x = 0u128;
        let mut z = 0u128;
        let mut ys = 0u8;
        let n = letters.len();
        if n > MAX_QUBITS {
            return Err(bad());
        }
        for (q, ch) in letters.chars().enumerate() {
            match ch {
                '.' | 'I' => {}
                'X' => x |= 1 << q,
                'Y' => {
                    x |= 1 << q;
                    z |= 1 << q;
                    ys = (ys + 1) & 3;
                }
                'Z' => z |= 1 << q,
                _ => return Err(bad()),
            }
        }
        // Display phase is i^{phase - #Y}, so phase = display + #Y.
        Ok(PauliString::from_masks(n, (display_phase + ys) & 3, x, z))
    }
}

fn ones(n: usize) -> u128 {
    if n == 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

impl fmt::Display for PauliString {
    /// Renders as phase token then one letter per qubit, qubit 0 leftmost,
    /// `.` for identity: `+i XZ..Y`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ys = (self.x & self.z).count_ones() as u8;
        let display_phase = (self.phase + 4 - (ys & 3)) & 3;
        let tok = match display_phase {
            0 => "+1",
            1 => "+i",
            2 => "-1",
            _ => "-i",
        };
        write!(f, "{tok} ")?;
        for q in 0..self.n {
            let ch = match self.letter(q) {
                0 => '.',
                1 => 'X',
                2 => 'Y',
                _ => 'Z',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// Ordered product of Majorana generators `c_{j_0} c_{j_1} ...` on `m` modes.
pub fn majorana_product(indices: &[usize], m: usize) -> PauliString {
    indices
        .iter()
        .fold(PauliString::identity(m), |acc, &j| {
            acc.mul(&PauliString::majorana(j, m))
        })
}

/// Dense `exp(theta c_a c_b)` on `m` modes. For `a != b` the product
/// squares to `-1`, so the exponential is `cos(theta) + sin(theta) c_a c_b`
/// in closed form.
pub fn exp_majorana_quadratic(m: usize, a: usize, b: usize, theta: f64) -> CMat {
    assert_ne!(a, b);
    let prod = majorana_product(&[a, b], m).to_dense();
    let dim = prod.nrows();
    let mut out = prod.mapv(|v| v * theta.sin());
    for i in 0..dim {
        out[[i, i]] += c64(theta.cos(), 0.0);
    }
    out
}

/// Dense `exp(i theta c_a c_b c_c c_d)` on `m` modes for distinct indices.
/// The quartic squares to `+1`, so this is
/// `cos(theta) + i sin(theta) c_a c_b c_c c_d`.
pub fn exp_majorana_quartic(m: usize, idx: [usize; 4], theta: f64) -> CMat {
    let prod = majorana_product(&idx, m).to_dense();
    let dim = prod.nrows();
    let mut out = prod.mapv(|v| v * c64(0.0, theta.sin()));
    for i in 0..dim {
        out[[i, i]] += c64(theta.cos(), 0.0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{frobenius_distance, identity};
    use proptest::prelude::*;

    fn dense_mul(a: &PauliString, b: &PauliString) -> CMat {
        a.to_dense().dot(&b.to_dense())
    }

    #[test]
    fn majorana_of_single_mode() {
        // c_0 = X, c_1 = Y on one mode.
        assert_eq!(PauliString::majorana(0, 1), PauliString::x(1, 0));
        assert_eq!(PauliString::majorana(1, 1), PauliString::y(1, 0));
    }

    #[test]
    fn majorana_index_four_is_zz_x() {
        // c_4 on 3 modes: sigma^z_0 sigma^z_1 sigma^x_2.
        let c4 = PauliString::majorana(4, 3);
        assert_eq!(c4, PauliString::from_masks(3, 0, 0b100, 0b011));
        assert_eq!(c4.to_string(), "+1 ZZX");
    }

    #[test]
    fn minus_i_c0_c1_is_sigma_z() {
        let prod = majorana_product(&[0, 1], 1).scaled(3);
        assert_eq!(prod, PauliString::z(1, 0));
        assert_eq!(prod.to_string(), "+1 Z");
    }

    #[test]
    fn anti_commutation_relations_dense_exact() {
        for m in 1..=5 {
            let dim = 1usize << m;
            for j in 0..2 * m {
                for k in j..2 * m {
                    let cj = PauliString::majorana(j, m).to_dense();
                    let ck = PauliString::majorana(k, m).to_dense();
                    let anti = cj.dot(&ck) + ck.dot(&cj);
                    let expected = if j == k {
                        identity(dim).mapv(|v| v * 2.0)
                    } else {
                        CMat::zeros((dim, dim))
                    };
                    // Entries are integers, so demand exact equality.
                    assert!(
                        frobenius_distance(&anti, &expected) == 0.0,
                        "CAR failed at j={j} k={k} m={m}"
                    );
                }
            }
        }
    }

    #[test]
    fn commutes_matches_symplectic_rule() {
        let m = 4;
        for j in 0..2 * m {
            for k in 0..2 * m {
                let cj = PauliString::majorana(j, m);
                let ck = PauliString::majorana(k, m);
                assert_eq!(cj.commutes_with(&ck), j == k);
            }
        }
    }

    #[test]
    fn rendering_and_parse_round_trip() {
        let p = PauliString::y(5, 4)
            .mul(&PauliString::x(5, 0))
            .mul(&PauliString::z(5, 1))
            .scaled(1);
        let text = p.to_string();
        assert_eq!(text, "+i XZ..Y");
        assert_eq!(PauliString::parse(&text).unwrap(), p);
    }

    #[test]
    fn hermitian_and_physical_flags() {
        assert!(PauliString::majorana(3, 2).is_hermitian());
        assert!(!PauliString::majorana(3, 2).is_physical());
        let even = majorana_product(&[0, 3], 2);
        assert!(even.is_physical());
        assert!(!even.is_hermitian());
        assert!(even.scaled(3).is_hermitian()); // -i c_0 c_3
    }

    proptest! {
        #[test]
        fn multiplication_matches_dense(seed in 0u64..500) {
            // Cheap deterministic pseudo-random strings on 4 qubits.
            let n = 4usize;
            let mix = |s: u64| {
                let mut v = s.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
                v ^= v >> 31;
                v
            };
            let a = mix(seed);
            let b = mix(seed ^ 0xabcdef);
            let p = PauliString::from_masks(n, (a >> 8) as u8 & 3, (a & 0xf) as u128, ((a >> 4) & 0xf) as u128);
            let q = PauliString::from_masks(n, (b >> 8) as u8 & 3, (b & 0xf) as u128, ((b >> 4) & 0xf) as u128);
            let sym = p.mul(&q).to_dense();
            let dense = dense_mul(&p, &q);
            prop_assert!(frobenius_distance(&sym, &dense) == 0.0);
        }

        #[test]
        fn adjoint_matches_dense(seed in 0u64..200) {
            let n = 3usize;
            let v = seed.wrapping_mul(0x2545f4914f6cdd1d);
            let p = PauliString::from_masks(n, (v >> 6) as u8 & 3, (v & 7) as u128, ((v >> 3) & 7) as u128);
            let sym = p.adjoint().to_dense();
            let dense = crate::linalg::adjoint(&p.to_dense());
            prop_assert!(frobenius_distance(&sym, &dense) == 0.0);
        }

        #[test]
        fn clifford_conjugation_matches_dense(seed in 0u64..300) {
            use crate::circuit::{Circuit, CircuitKind};
            use crate::linalg::adjoint;

            let n = 3usize;
            let v = seed.wrapping_mul(0x9e3779b97f4a7c15) ^ (seed << 17);
            let p = PauliString::from_masks(n, (v >> 6) as u8 & 3, (v & 7) as u128, ((v >> 3) & 7) as u128);

            let gate_dense = |name: &str, targets: Vec<usize>| -> CMat {
                let mut c = Circuit::new(CircuitKind::Qubit, n);
                c.push(name, vec![], targets);
                c.evaluate().unwrap()
            };
            let mut cases: Vec<(PauliString, CMat)> = Vec::new();
            for q in 0..n {
                let mut r = p;
                r.conj_h(q);
                cases.push((r, gate_dense("h", vec![q])));
                let mut r = p;
                r.conj_s(q);
                cases.push((r, gate_dense("s", vec![q])));
                let mut r = p;
                r.conj_s_dagger(q);
                let s3 = {
                    let mut c = Circuit::new(CircuitKind::Qubit, n);
                    for _ in 0..3 {
                        c.push("s", vec![], vec![q]);
                    }
                    c.evaluate().unwrap()
                };
                cases.push((r, s3));
                let mut r = p;
                r.conj_pauli(&PauliString::x(n, q));
                cases.push((r, gate_dense("x", vec![q])));
            }
            for (c, t) in [(0usize, 1usize), (1, 0), (1, 2), (2, 0)] {
                let mut r = p;
                r.conj_cx(c, t);
                cases.push((r, gate_dense("cx", vec![c, t])));
                let mut r = p;
                r.conj_swap(c, t);
                cases.push((r, gate_dense("swap", vec![c, t])));
            }
            for (got, u) in cases {
                let expect = u.dot(&p.to_dense()).dot(&adjoint(&u));
                prop_assert!(frobenius_distance(&got.to_dense(), &expect) < 1e-12);
            }
        }
    }
}
