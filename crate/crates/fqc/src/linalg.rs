//! Small dense-matrix helpers shared by the simulator modules.
//!
//! Everything here works on `ndarray` arrays of `Complex64`. Gate
//! application is done column-wise on state vectors instead of building
//! full `2^n x 2^n` gate matrices, which keeps dense evaluation usable at
//! the width cap.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub type CVec = Array1<Complex64>;
pub type CMat = Array2<Complex64>;

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// i^k for k taken mod 4.
#[inline]
pub fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => ONE,
        1 => I,
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

pub fn identity(dim: usize) -> CMat {
    CMat::eye(dim)
}

pub fn basis_state(dim: usize, index: usize) -> CVec {
    let mut v = CVec::zeros(dim);
    v[index] = ONE;
    v
}

/// Apply a gate matrix on `targets` (bit positions, gate qubit r <-> bit
/// `targets[r]`) to a state vector of `n` qubits, in place.
///
/// The gate acts on its own standard space where gate qubit 0 is the least
/// significant bit of the gate-local index.
pub fn apply_gate_to_state(state: &mut CVec, gate: &CMat, targets: &[usize], n: usize) {
    let p = targets.len();
    debug_assert_eq!(gate.nrows(), 1 << p);
    let dim = 1usize << n;
    debug_assert_eq!(state.len(), dim);
    let rest_mask: usize = {
        let mut m = dim - 1;
        for &t in targets {
            m &= !(1 << t);
        }
        m
    };
    // Enumerate the base indices with zeros at every target bit.
    let mut scratch = vec![ZERO; 1 << p];
    let mut base = 0usize;
    loop {
        for x in 0..(1 << p) {
            let mut idx = base;
            for (r, &t) in targets.iter().enumerate() {
                if (x >> r) & 1 == 1 {
                    idx |= 1 << t;
                }
            }
            scratch[x] = state[idx];
        }
        for y in 0..(1 << p) {
            let mut acc = ZERO;
            for x in 0..(1 << p) {
                let g = gate[[y, x]];
                if g != ZERO {
                    acc += g * scratch[x];
                }
            }
            let mut idx = base;
            for (r, &t) in targets.iter().enumerate() {
                if (y >> r) & 1 == 1 {
                    idx |= 1 << t;
                }
            }
            state[idx] = acc;
        }
        // Next base index within rest_mask (standard subset-increment trick).
        if base == rest_mask {
            break;
        }
        base = (base.wrapping_sub(rest_mask)) & rest_mask;
    }
}

pub fn adjoint(m: &CMat) -> CMat {
    let mut out = CMat::zeros((m.ncols(), m.nrows()));
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[[j, i]] = m[[i, j]].conj();
        }
    }
    out
}

pub fn frobenius_distance(a: &CMat, b: &CMat) -> f64 {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn vec_distance(a: &CVec, b: &CVec) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn norm(v: &CVec) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

pub fn inner(a: &CVec, b: &CVec) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// Distance between `a` and `e^{i phi} b` minimised over the phase `phi`.
pub fn distance_up_to_phase(a: &CMat, b: &CMat) -> f64 {
    let mut best = ZERO;
    let mut mag = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        if y.norm() > mag {
            mag = y.norm();
            best = x / y;
        }
    }
    if mag == 0.0 {
        return frobenius_distance(a, b);
    }
    let phase = if best.norm() == 0.0 { ONE } else { best / best.norm() };
    let rotated = b.mapv(|v| v * phase);
    frobenius_distance(a, &rotated)
}

pub fn is_unitary(m: &CMat, tol: f64) -> bool {
    let prod = adjoint(m).dot(m);
    frobenius_distance(&prod, &identity(m.nrows())) <= tol
}

/// Determinant of a small real matrix by LU with partial pivoting.
pub fn det_real(m: &Array2<f64>) -> f64 {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if a[[row, col]].abs() > a[[pivot, col]].abs() {
                pivot = row;
            }
        }
        if a[[pivot, col]].abs() < 1e-12 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                let tmp = a[[col, k]];
                a[[col, k]] = a[[pivot, k]];
                a[[pivot, k]] = tmp;
            }
            det = -det;
        }
        det *= a[[col, col]];
        for row in col + 1..n {
            let f = a[[row, col]] / a[[col, col]];
            for k in col..n {
                let sub = f * a[[col, k]];
                a[[row, k]] -= sub;
            }
        }
    }
    det
}

/// Standard-normal sample via Box-Muller.
fn normal(rng: &mut impl rand::Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Haar-ish random unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary(rng: &mut impl rand::Rng, dim: usize) -> CMat {
    let mut cols: Vec<CVec> = (0..dim)
        .map(|_| CVec::from_iter((0..dim).map(|_| c64(normal(rng), normal(rng)))))
        .collect();
    for i in 0..dim {
        // Two passes of projection for numerical stability.
        for _ in 0..2 {
            for j in 0..i {
                let proj = inner(&cols[j], &cols[i]);
                let prev = cols[j].clone();
                cols[i].zip_mut_with(&prev, |a, b| *a -= proj * b);
            }
        }
        let nrm = norm(&cols[i]);
        cols[i].mapv_inplace(|v| v / nrm);
    }
    let mut out = CMat::zeros((dim, dim));
    for (j, col) in cols.iter().enumerate() {
        for i in 0..dim {
            out[[i, j]] = col[i];
        }
    }
    out
}

/// Random unitary on `n` qubits commuting with the parity operator: an
/// independent Haar-ish block on each parity sector.
pub fn random_parity_unitary(rng: &mut impl rand::Rng, n: usize) -> CMat {
    let dim = 1usize << n;
    let mut out = CMat::zeros((dim, dim));
    for sector in 0..2u32 {
        let indices: Vec<usize> = (0..dim).filter(|b| b.count_ones() % 2 == sector).collect();
        let block = random_unitary(rng, indices.len());
        for (bi, &gi) in indices.iter().enumerate() {
            for (bj, &gj) in indices.iter().enumerate() {
                out[[gi, gj]] = block[[bi, bj]];
            }
        }
    }
    out
}

/// Random normalised state vector.
pub fn random_state(rng: &mut impl rand::Rng, dim: usize) -> CVec {
    let mut v = CVec::from_iter((0..dim).map(|_| c64(normal(rng), normal(rng))));
    let nrm = norm(&v);
    v.mapv_inplace(|x| x / nrm);
    v
}

/// GF(2) row space of bitmask rows, kept in echelon form.
#[derive(Debug, Clone, Default)]
pub struct F2RowSpace {
    rows: Vec<u128>,
}

impl F2RowSpace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce `row` against the basis; returns the residual.
    pub fn reduce(&self, mut row: u128) -> u128 {
        for &r in &self.rows {
            let lead = 127 - r.leading_zeros() as usize;
            if (row >> lead) & 1 == 1 {
                row ^= r;
            }
        }
        row
    }

    /// Insert `row`; returns true if it enlarged the span.
    pub fn insert(&mut self, row: u128) -> bool {
        let residual = self.reduce(row);
        if residual == 0 {
            return false;
        }
        self.rows.push(residual);
        self.rows.sort_by_key(|r| std::cmp::Reverse(*r));
        true
    }

    pub fn contains(&self, row: u128) -> bool {
        self.reduce(row) == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn gate_application_matches_direct_matrix_action() {
        // 2-qubit gate applied at (2, 0) of a 3-qubit register.
        let g = array![
            [c64(1.0, 0.0), ZERO, ZERO, ZERO],
            [ZERO, ZERO, c64(0.0, 1.0), ZERO],
            [ZERO, c64(0.0, -1.0), ZERO, ZERO],
            [ZERO, ZERO, ZERO, c64(-1.0, 0.0)],
        ];
        let mut state = CVec::zeros(8);
        // |n_0 n_1 n_2> = |1,1,0> -> index 3; gate qubits read (n_2, n_0) = (0,1) -> x=2.
        state[3] = ONE;
        apply_gate_to_state(&mut state, &g, &[2, 0], 3);
        // Gate sends x=2 -> i at y=1, i.e. (n_2, n_0) = (1,0): index bit2=1, bit0=0, bit1 kept.
        assert_eq!(state[6], c64(0.0, 1.0));
        assert_eq!(norm(&state), 1.0);
    }

    #[test]
    fn det_real_signs() {
        let m = array![[0.0, -1.0], [1.0, 0.0]];
        assert!((det_real(&m) - 1.0).abs() < 1e-12);
        let m = array![[0.0, 1.0], [1.0, 0.0]];
        assert!((det_real(&m) + 1.0).abs() < 1e-12);
    }

    #[test]
    fn f2_rowspace_rank_and_membership() {
        let mut space = F2RowSpace::new();
        assert!(space.insert(0b101));
        assert!(space.insert(0b011));
        assert!(!space.insert(0b110));
        assert_eq!(space.rank(), 2);
        assert!(space.contains(0b110));
        assert!(!space.contains(0b001));
    }
}
