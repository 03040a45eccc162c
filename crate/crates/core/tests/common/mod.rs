//! Dense-matrix reference implementation used as an independent oracle.
//!
//! Operators are built element by element from their definitions and applied
//! by full matrix-vector products; nothing here calls into the projection
//! code under test.

#![allow(dead_code)]

use num_complex::Complex64 as C;

pub type Mat = Vec<Vec<C>>;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn identity(dim: usize) -> Mat {
    (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn pauli_x() -> Mat {
    vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]]
}

pub fn pauli_z() -> Mat {
    vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]]
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum()).collect())
        .collect()
}

pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca, rb, cb) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![c(0.0, 0.0); ca * cb]; ra * rb];
    for i in 0..ra {
        for j in 0..ca {
            for k in 0..rb {
                for l in 0..cb {
                    out[i * rb + k][j * cb + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

pub fn kron_vec(a: &[C], b: &[C]) -> Vec<C> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

pub fn apply(m: &Mat, v: &[C]) -> Vec<C> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// `σ_z^z σ_x^x` as a 2×2 matrix.
pub fn correction(z: u8, x: u8) -> Mat {
    let mut m = identity(2);
    if x == 1 {
        m = matmul(&pauli_x(), &m);
    }
    if z == 1 {
        m = matmul(&pauli_z(), &m);
    }
    m
}

/// Bell vectors written out from their definitions, labelled `(z, x)`.
pub fn bell(z: u8, x: u8) -> Vec<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match (z, x) {
        (0, 0) => vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
        (0, 1) => vec![c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)],
        (1, 0) => vec![c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-h, 0.0)],
        _ => vec![c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)],
    }
}

pub fn delta(bit: u8) -> Vec<C> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = if bit == 0 { 1.0 } else { -1.0 };
    vec![c(h, 0.0), c(0.0, s * h)]
}

fn bit_of(index: usize, q: usize, k: usize) -> usize {
    index >> (k - 1 - q) & 1
}

/// Projector `|b⟩⟨b|` on qubits `(qi, qj)` of a `k`-qubit register, as a full
/// `2^k × 2^k` matrix.
pub fn pair_projector(b: &[C], qi: usize, qj: usize, k: usize) -> Mat {
    let dim = 1 << k;
    let rest_mask: usize = (0..k)
        .filter(|&q| q != qi && q != qj)
        .map(|q| 1 << (k - 1 - q))
        .sum();
    let mut p = vec![vec![c(0.0, 0.0); dim]; dim];
    for (r, row) in p.iter_mut().enumerate() {
        for (col, entry) in row.iter_mut().enumerate() {
            if r & rest_mask != col & rest_mask {
                continue;
            }
            let br = bit_of(r, qi, k) * 2 + bit_of(r, qj, k);
            let bc = bit_of(col, qi, k) * 2 + bit_of(col, qj, k);
            *entry = b[br] * b[bc].conj();
        }
    }
    p
}

pub fn norm_sqr(v: &[C]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub fn normalize(v: Vec<C>) -> Vec<C> {
    let n = norm_sqr(&v).sqrt();
    v.into_iter().map(|a| a / n).collect()
}

/// `max over unit λ` fidelity test: `|⟨a|b⟩| ≈ 1` for unit vectors.
pub fn same_ray(a: &[C], b: &[C], tol: f64) -> bool {
    let ov: C = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    (1.0 - ov.norm()).abs() <= tol
}

/// Reorders a vector's qubits: output qubit `i` is input qubit `order[i]`.
pub fn permute_qubits(v: &[C], order: &[usize]) -> Vec<C> {
    let k = order.len();
    let mut out = vec![c(0.0, 0.0); v.len()];
    for (idx, a) in v.iter().enumerate() {
        let mut new_idx = 0;
        for (i, &src) in order.iter().enumerate() {
            new_idx |= bit_of(idx, src, k) << (k - 1 - i);
        }
        out[new_idx] = *a;
    }
    out
}
