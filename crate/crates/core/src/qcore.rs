//! Exact small-dimension state-vector engine.
//!
//! States are dense complex vectors over `k` qubits with qubit 0 stored as the
//! most significant bit of the basis index. Everything the signature protocol
//! needs lives here: Bell states, the δ basis `{(|0⟩ ± i|1⟩)/√2}`, Pauli
//! corrections, Bell-state measurement and δ-basis measurement.
//!
//! Bell outcomes are reported as `(z_bit, x_bit)` pairs:
//!
//! | label      | bits  |
//! |------------|-------|
//! | `PhiPlus`  | (0,0) |
//! | `PsiPlus`  | (0,1) |
//! | `PhiMinus` | (1,0) |
//! | `PsiMinus` | (1,1) |
//!
//! With this labelling, teleporting `ψ` over `|Φ+⟩` and observing `(z, x)`
//! leaves the receiver holding `σ_z^z σ_x^x ψ` up to a global phase.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

/// Complex amplitude.
pub type Amplitude = Complex64;

/// Tolerance used when comparing states.
pub const STATE_TOL: f64 = 1e-10;
/// Tolerance used for exact algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Default upper bound on the qubit count of a tensor product.
pub const DEFAULT_QUBIT_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("qubit index {index} out of range for a {num_qubits}-qubit state")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("measurement needs two distinct qubits, got {0} twice")]
    SameQubit(usize),
    #[error("impossible outcome: Born probability is zero")]
    ImpossibleOutcome,
    #[error("tensor product of {requested} qubits exceeds the cap of {cap}")]
    QubitCapExceeded { requested: usize, cap: usize },
    #[error("amplitude vector of length {0} is not a power of two")]
    BadLength(usize),
    #[error("amplitudes must be finite and have unit norm (norm² = {0})")]
    NotNormalized(f64),
    #[error("qubit count mismatch: {0} vs {1}")]
    QubitCountMismatch(usize, usize),
    #[error("qubit {0} is entangled with the rest of the register")]
    NotProduct(usize),
    #[error("tensor product of zero states")]
    EmptyProduct,
}

pub type QResult<T> = Result<T, QError>;

/// Normalized pure state over `num_qubits` qubits.
#[derive(Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Amplitude>,
}

impl fmt::Debug for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateVector[{}](", self.num_qubits)?;
        for (i, a) in self.amps.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{:.6}{:+.6}i", a.re, a.im)?;
        }
        write!(f, ")")
    }
}

impl StateVector {
    /// Builds a state from raw amplitudes, checking length and norm.
    pub fn from_amplitudes(amps: Vec<Amplitude>) -> QResult<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(QError::BadLength(len));
        }
        if amps.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(QError::NotNormalized(f64::NAN));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > STATE_TOL {
            return Err(QError::NotNormalized(norm_sqr));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Like [`StateVector::from_amplitudes`] but rescales to unit norm first.
    pub fn normalized(mut amps: Vec<Amplitude>) -> QResult<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(QError::NotNormalized(norm * norm));
        }
        for a in &mut amps {
            *a /= norm;
        }
        Self::from_amplitudes(amps)
    }

    /// Computational basis state `|index⟩` over `num_qubits` qubits.
    pub fn basis(num_qubits: usize, index: usize) -> QResult<Self> {
        let dim = 1usize << num_qubits;
        if num_qubits == 0 || index >= dim {
            return Err(QError::QubitOutOfRange {
                index,
                num_qubits,
            });
        }
        let mut amps = vec![Amplitude::new(0.0, 0.0); dim];
        amps[index] = Amplitude::new(1.0, 0.0);
        Ok(Self { num_qubits, amps })
    }

    pub fn zero() -> Self {
        Self::basis(1, 0).expect("|0⟩ is valid")
    }

    pub fn one() -> Self {
        Self::basis(1, 1).expect("|1⟩ is valid")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> QResult<Amplitude> {
        self.same_size(other)?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Multiplies every amplitude by a unit-modulus scalar.
    pub fn with_global_phase(&self, phase: Amplitude) -> QResult<Self> {
        Self::from_amplitudes(self.amps.iter().map(|a| a * phase).collect())
    }

    fn same_size(&self, other: &Self) -> QResult<()> {
        if self.num_qubits != other.num_qubits {
            return Err(QError::QubitCountMismatch(self.num_qubits, other.num_qubits));
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> QResult<()> {
        if q >= self.num_qubits {
            return Err(QError::QubitOutOfRange {
                index: q,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    /// Bit mask selecting qubit `q` in a basis index.
    fn mask(&self, q: usize) -> usize {
        1 << (self.num_qubits - 1 - q)
    }
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellLabel {
    PhiPlus,
    PsiPlus,
    PhiMinus,
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PsiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiMinus,
    ];

    pub fn bits(self) -> Bits2 {
        match self {
            BellLabel::PhiPlus => Bits2::new(0, 0),
            BellLabel::PsiPlus => Bits2::new(0, 1),
            BellLabel::PhiMinus => Bits2::new(1, 0),
            BellLabel::PsiMinus => Bits2::new(1, 1),
        }
    }

    pub fn from_bits(bits: Bits2) -> Self {
        match (bits.z_bit, bits.x_bit) {
            (0, 0) => BellLabel::PhiPlus,
            (0, 1) => BellLabel::PsiPlus,
            (1, 0) => BellLabel::PhiMinus,
            _ => BellLabel::PsiMinus,
        }
    }

    /// Amplitudes over `|00⟩, |01⟩, |10⟩, |11⟩`.
    fn amplitudes(self) -> [Amplitude; 4] {
        let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
        let o = Amplitude::new(0.0, 0.0);
        match self {
            BellLabel::PhiPlus => [h, o, o, h],
            BellLabel::PsiPlus => [o, h, h, o],
            BellLabel::PhiMinus => [h, o, o, -h],
            BellLabel::PsiMinus => [o, h, -h, o],
        }
    }
}

/// A two-bit measurement record `(z_bit, x_bit)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Bits2 {
    pub z_bit: u8,
    pub x_bit: u8,
}

impl Bits2 {
    /// Builds a pair; any nonzero input is read as 1.
    pub fn new(z_bit: u8, x_bit: u8) -> Self {
        Self {
            z_bit: (z_bit != 0) as u8,
            x_bit: (x_bit != 0) as u8,
        }
    }

    pub const ALL: [Bits2; 4] = [
        Bits2 { z_bit: 0, x_bit: 0 },
        Bits2 { z_bit: 0, x_bit: 1 },
        Bits2 { z_bit: 1, x_bit: 0 },
        Bits2 { z_bit: 1, x_bit: 1 },
    ];

    /// `z_bit ⊕ x_bit`.
    pub fn parity(self) -> u8 {
        self.z_bit ^ self.x_bit
    }

    pub fn xor(self, other: Bits2) -> Bits2 {
        Bits2::new(self.z_bit ^ other.z_bit, self.x_bit ^ other.x_bit)
    }
}

impl fmt::Display for Bits2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.z_bit, self.x_bit)
    }
}

/// `σ_z^{z_exp} σ_x^{x_exp}`; σ_x acts on the ket first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PauliCorrection {
    pub z_exp: u8,
    pub x_exp: u8,
}

impl PauliCorrection {
    pub const IDENTITY: PauliCorrection = PauliCorrection { z_exp: 0, x_exp: 0 };

    pub fn new(z_exp: u8, x_exp: u8) -> Self {
        Self {
            z_exp: (z_exp != 0) as u8,
            x_exp: (x_exp != 0) as u8,
        }
    }
}

impl From<Bits2> for PauliCorrection {
    fn from(b: Bits2) -> Self {
        PauliCorrection::new(b.z_bit, b.x_bit)
    }
}

pub fn make_bell(label: BellLabel) -> StateVector {
    StateVector {
        num_qubits: 2,
        amps: label.amplitudes().to_vec(),
    }
}

/// `δ_b` amplitudes over `|0⟩, |1⟩`.
fn delta_amplitudes(bit: u8) -> [Amplitude; 2] {
    let sign = if bit == 0 { 1.0 } else { -1.0 };
    [
        Amplitude::new(FRAC_1_SQRT_2, 0.0),
        Amplitude::new(0.0, sign * FRAC_1_SQRT_2),
    ]
}

/// `δ_bit = (|0⟩ + (−1)^bit i|1⟩)/√2`.
pub fn delta_encode(bit: u8) -> StateVector {
    StateVector {
        num_qubits: 1,
        amps: delta_amplitudes((bit != 0) as u8).to_vec(),
    }
}

pub fn apply_correction(
    state: &StateVector,
    qubit: usize,
    corr: PauliCorrection,
) -> QResult<StateVector> {
    state.check_qubit(qubit)?;
    let mask = state.mask(qubit);
    let mut amps = state.amps.clone();
    if corr.x_exp == 1 {
        for i in 0..amps.len() {
            if i & mask == 0 {
                amps.swap(i, i | mask);
            }
        }
    }
    if corr.z_exp == 1 {
        for (i, a) in amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *a = -*a;
            }
        }
    }
    Ok(StateVector {
        num_qubits: state.num_qubits,
        amps,
    })
}

/// Kronecker product in argument order, capped at [`DEFAULT_QUBIT_CAP`] qubits.
pub fn tensor(states: &[&StateVector]) -> QResult<StateVector> {
    tensor_with_cap(states, DEFAULT_QUBIT_CAP)
}

pub fn tensor_with_cap(states: &[&StateVector], cap: usize) -> QResult<StateVector> {
    let (first, rest) = states.split_first().ok_or(QError::EmptyProduct)?;
    let requested: usize = states.iter().map(|s| s.num_qubits).sum();
    if requested > cap {
        return Err(QError::QubitCapExceeded { requested, cap });
    }
    let mut amps = first.amps.clone();
    for s in rest {
        amps = amps
            .iter()
            .flat_map(|a| s.amps.iter().map(move |b| a * b))
            .collect();
    }
    Ok(StateVector {
        num_qubits: requested,
        amps,
    })
}

/// Projects qubits `(qi, qj)` onto the two-qubit vector `target` (given over
/// `|00⟩..|11⟩` with `qi` as the high bit). Returns the Born probability and
/// the unnormalized collapsed amplitudes.
fn project_pair(
    state: &StateVector,
    qi: usize,
    qj: usize,
    target: &[Amplitude; 4],
) -> (f64, Vec<Amplitude>) {
    let (mi, mj) = (state.mask(qi), state.mask(qj));
    let pair_index = |bi: usize, bj: usize| (if bi == 1 { mi } else { 0 }) | (if bj == 1 { mj } else { 0 });
    let offsets = [pair_index(0, 0), pair_index(0, 1), pair_index(1, 0), pair_index(1, 1)];
    let mut out = vec![Amplitude::new(0.0, 0.0); state.amps.len()];
    let mut prob = 0.0;
    for base in 0..state.amps.len() {
        if base & (mi | mj) != 0 {
            continue;
        }
        let overlap: Amplitude = offsets
            .iter()
            .zip(target)
            .map(|(&off, t)| t.conj() * state.amps[base | off])
            .sum();
        prob += overlap.norm_sqr();
        for (&off, t) in offsets.iter().zip(target) {
            out[base | off] = overlap * t;
        }
    }
    (prob, out)
}

/// Same as [`project_pair`] for a single qubit.
fn project_single(state: &StateVector, q: usize, target: &[Amplitude; 2]) -> (f64, Vec<Amplitude>) {
    let m = state.mask(q);
    let mut out = vec![Amplitude::new(0.0, 0.0); state.amps.len()];
    let mut prob = 0.0;
    for base in 0..state.amps.len() {
        if base & m != 0 {
            continue;
        }
        let overlap = target[0].conj() * state.amps[base] + target[1].conj() * state.amps[base | m];
        prob += overlap.norm_sqr();
        out[base] = overlap * target[0];
        out[base | m] = overlap * target[1];
    }
    (prob, out)
}

fn renormalize(num_qubits: usize, prob: f64, mut amps: Vec<Amplitude>) -> StateVector {
    let scale = prob.sqrt().recip();
    for a in &mut amps {
        *a *= scale;
    }
    StateVector { num_qubits, amps }
}

/// Below this Born probability an outcome is treated as impossible.
const PROB_FLOOR: f64 = 1e-14;

/// Picks an index from `probs` by inverse-CDF sampling, never returning a
/// (numerically) zero-probability entry.
fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let total: f64 = probs.iter().sum();
    let draw = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_possible = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p <= PROB_FLOOR {
            continue;
        }
        last_possible = i;
        acc += p;
        if draw < acc {
            return i;
        }
    }
    last_possible
}

fn check_pair(state: &StateVector, qi: usize, qj: usize) -> QResult<()> {
    state.check_qubit(qi)?;
    state.check_qubit(qj)?;
    if qi == qj {
        return Err(QError::SameQubit(qi));
    }
    Ok(())
}

/// Born probability of each Bell outcome on `(qi, qj)`, indexed like [`Bits2::ALL`].
pub fn bsm_probabilities(state: &StateVector, qi: usize, qj: usize) -> QResult<[f64; 4]> {
    check_pair(state, qi, qj)?;
    let mut probs = [0.0; 4];
    for (p, bits) in probs.iter_mut().zip(Bits2::ALL) {
        *p = project_pair(state, qi, qj, &BellLabel::from_bits(bits).amplitudes()).0;
    }
    Ok(probs)
}

/// Bell-state measurement on `(qi, qj)`, sampled by the Born rule.
pub fn bsm<R: Rng + ?Sized>(
    state: &StateVector,
    qi: usize,
    qj: usize,
    rng: &mut R,
) -> QResult<(Bits2, StateVector)> {
    let probs = bsm_probabilities(state, qi, qj)?;
    let outcome = Bits2::ALL[sample_index(&probs, rng)];
    let (_, post) = bsm_postselect(state, qi, qj, outcome)?;
    Ok((outcome, post))
}

/// Forces a Bell outcome. Fails with [`QError::ImpossibleOutcome`] when it has
/// zero probability.
pub fn bsm_postselect(
    state: &StateVector,
    qi: usize,
    qj: usize,
    outcome: Bits2,
) -> QResult<(f64, StateVector)> {
    check_pair(state, qi, qj)?;
    let target = BellLabel::from_bits(outcome).amplitudes();
    let (prob, amps) = project_pair(state, qi, qj, &target);
    if prob <= PROB_FLOOR {
        return Err(QError::ImpossibleOutcome);
    }
    Ok((prob, renormalize(state.num_qubits, prob, amps)))
}

/// Born probabilities of δ-basis outcomes `[P(0), P(1)]` on one qubit.
pub fn delta_probabilities(state: &StateVector, qubit: usize) -> QResult<[f64; 2]> {
    state.check_qubit(qubit)?;
    Ok([
        project_single(state, qubit, &delta_amplitudes(0)).0,
        project_single(state, qubit, &delta_amplitudes(1)).0,
    ])
}

/// Projective measurement of one qubit in `{δ_0, δ_1}`.
pub fn measure_delta<R: Rng + ?Sized>(
    state: &StateVector,
    qubit: usize,
    rng: &mut R,
) -> QResult<(u8, StateVector)> {
    let probs = delta_probabilities(state, qubit)?;
    let bit = sample_index(&probs, rng) as u8;
    let (prob, amps) = project_single(state, qubit, &delta_amplitudes(bit));
    Ok((bit, renormalize(state.num_qubits, prob, amps)))
}

/// True iff `s1 = λ·s2` for some unit `λ` within `tol` (Euclidean norm).
/// `λ` is taken from the amplitude pair of largest joint magnitude.
pub fn equal_up_to_global_phase(s1: &StateVector, s2: &StateVector, tol: f64) -> bool {
    if s1.num_qubits != s2.num_qubits {
        return false;
    }
    let pivot = (0..s1.amps.len())
        .max_by(|&i, &j| {
            let wi = s1.amps[i].norm() * s2.amps[i].norm();
            let wj = s1.amps[j].norm() * s2.amps[j].norm();
            wi.total_cmp(&wj)
        })
        .unwrap_or(0);
    let ratio = s1.amps[pivot] * s2.amps[pivot].conj();
    let phase = if ratio.norm() > 0.0 {
        ratio / ratio.norm()
    } else {
        Amplitude::new(1.0, 0.0)
    };
    let dist_sqr: f64 = s1
        .amps
        .iter()
        .zip(&s2.amps)
        .map(|(a, b)| (a - phase * b).norm_sqr())
        .sum();
    dist_sqr.sqrt() <= tol
}

/// Extracts the single-qubit factor of `qubit` when the register is a product
/// `φ_qubit ⊗ rest`. Used to inspect a receiver's qubit before measurement.
pub fn extract_qubit(state: &StateVector, qubit: usize) -> QResult<StateVector> {
    state.check_qubit(qubit)?;
    let m = state.mask(qubit);
    let pairs: Vec<[Amplitude; 2]> = (0..state.amps.len())
        .filter(|i| i & m == 0)
        .map(|i| [state.amps[i], state.amps[i | m]])
        .collect();
    let weight = |p: &[Amplitude; 2]| p[0].norm_sqr() + p[1].norm_sqr();
    let best = pairs
        .iter()
        .max_by(|a, b| weight(a).total_cmp(&weight(b)))
        .expect("state has at least one amplitude pair");
    let factor = StateVector::normalized(best.to_vec())?;
    // Each rest-configuration pair must be parallel to the factor.
    let residual: f64 = pairs
        .iter()
        .map(|p| {
            let ov = factor.amps[0].conj() * p[0] + factor.amps[1].conj() * p[1];
            weight(p) - ov.norm_sqr()
        })
        .sum();
    if residual > STATE_TOL {
        return Err(QError::NotProduct(qubit));
    }
    Ok(factor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Amplitude {
        Amplitude::new(re, im)
    }

    fn assert_amps(s: &StateVector, expected: &[Amplitude], tol: f64) {
        assert_eq!(s.amplitudes().len(), expected.len());
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - e).norm() <= tol, "{s:?} vs {expected:?}");
        }
    }

    #[test]
    fn bell_states_have_expected_amplitudes() {
        let h = FRAC_1_SQRT_2;
        assert_amps(
            &make_bell(BellLabel::PhiPlus),
            &[c(h, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(h, 0.0)],
            ALGEBRA_TOL,
        );
        assert_amps(
            &make_bell(BellLabel::PsiMinus),
            &[c(0.0, 0.0), c(h, 0.0), c(-h, 0.0), c(0.0, 0.0)],
            ALGEBRA_TOL,
        );
        for label in BellLabel::ALL {
            assert!((make_bell(label).norm_sqr() - 1.0).abs() < ALGEBRA_TOL);
            assert_eq!(BellLabel::from_bits(label.bits()), label);
        }
    }

    #[test]
    fn identity_correction_is_noop() {
        let phi = make_bell(BellLabel::PhiPlus);
        assert_eq!(apply_correction(&phi, 0, PauliCorrection::IDENTITY).unwrap(), phi);
    }

    #[test]
    fn delta_states_are_orthonormal() {
        let h = FRAC_1_SQRT_2;
        assert_amps(&delta_encode(0), &[c(h, 0.0), c(0.0, h)], ALGEBRA_TOL);
        assert_amps(&delta_encode(1), &[c(h, 0.0), c(0.0, -h)], ALGEBRA_TOL);
        let ov = delta_encode(0).inner(&delta_encode(1)).unwrap();
        assert!(ov.norm() < ALGEBRA_TOL);
    }

    #[test]
    fn correction_out_of_range() {
        let err = apply_correction(&delta_encode(0), 1, PauliCorrection::new(1, 0)).unwrap_err();
        assert!(matches!(err, QError::QubitOutOfRange { index: 1, .. }));
    }

    #[test]
    fn tensor_cases() {
        let d0 = delta_encode(0);
        assert_eq!(tensor(&[&d0]).unwrap(), d0);
        let t = tensor(&[&StateVector::zero(), &StateVector::one()]).unwrap();
        assert_amps(&t, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 0.0);
        let big: Vec<StateVector> = (0..13).map(|_| StateVector::zero()).collect();
        let refs: Vec<&StateVector> = big.iter().collect();
        assert_eq!(
            tensor(&refs).unwrap_err(),
            QError::QubitCapExceeded { requested: 13, cap: 12 }
        );
        assert_eq!(tensor(&[]).unwrap_err(), QError::EmptyProduct);
    }

    #[test]
    fn bsm_on_bell_state_is_deterministic() {
        let phi = make_bell(BellLabel::PhiPlus);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let (bits, post) = bsm(&phi, 0, 1, &mut rng).unwrap();
            assert_eq!(bits, Bits2::new(0, 0));
            assert!(equal_up_to_global_phase(&post, &phi, STATE_TOL));
        }
        let (p, post) = bsm_postselect(&phi, 0, 1, Bits2::new(0, 0)).unwrap();
        assert!((p - 1.0).abs() < ALGEBRA_TOL);
        assert_amps(&post, phi.amplitudes(), ALGEBRA_TOL);
    }

    #[test]
    fn bsm_on_00_only_yields_phi_outcomes() {
        // |00⟩ = (|Φ+⟩ + |Φ−⟩)/√2
        let s = StateVector::basis(2, 0).unwrap();
        let probs = bsm_probabilities(&s, 0, 1).unwrap();
        assert!((probs[0] - 0.5).abs() < ALGEBRA_TOL);
        assert!(probs[1].abs() < ALGEBRA_TOL);
        assert!((probs[2] - 0.5).abs() < ALGEBRA_TOL);
        assert!(probs[3].abs() < ALGEBRA_TOL);
        assert_eq!(
            bsm_postselect(&s, 0, 1, Bits2::new(0, 1)).unwrap_err(),
            QError::ImpossibleOutcome
        );
    }

    #[test]
    fn bsm_frequencies_on_00() {
        let s = StateVector::basis(2, 0).unwrap();
        let trials = 100_000u64;
        let mut counts = [0u64; 4];
        for seed in 0..trials {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (bits, _) = bsm(&s, 0, 1, &mut rng).unwrap();
            counts[(bits.z_bit * 2 + bits.x_bit) as usize] += 1;
        }
        assert_eq!(counts[1], 0);
        assert_eq!(counts[3], 0);
        // 3σ of Binomial(1e5, 0.5)
        let sigma = (trials as f64 * 0.25).sqrt();
        for &k in &[counts[0], counts[2]] {
            assert!((k as f64 - trials as f64 / 2.0).abs() <= 3.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn bsm_rejects_bad_indices() {
        let s = make_bell(BellLabel::PhiPlus);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(bsm(&s, 1, 1, &mut rng).unwrap_err(), QError::SameQubit(1));
        assert!(matches!(
            bsm(&s, 0, 2, &mut rng).unwrap_err(),
            QError::QubitOutOfRange { index: 2, .. }
        ));
    }

    #[test]
    fn delta_measurement_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            assert_eq!(measure_delta(&delta_encode(1), 0, &mut rng).unwrap().0, 1);
        }
        let zd0 = apply_correction(&delta_encode(0), 0, PauliCorrection::new(1, 0)).unwrap();
        assert!((delta_probabilities(&zd0, 0).unwrap()[1] - 1.0).abs() < ALGEBRA_TOL);
        let p = delta_probabilities(&StateVector::zero(), 0).unwrap();
        assert!((p[0] - 0.5).abs() < ALGEBRA_TOL && (p[1] - 0.5).abs() < ALGEBRA_TOL);
    }

    #[test]
    fn global_phase_equality() {
        let d0 = delta_encode(0);
        let id0 = d0.with_global_phase(c(0.0, 1.0)).unwrap();
        assert!(equal_up_to_global_phase(&d0, &id0, STATE_TOL));
        assert!(!equal_up_to_global_phase(&d0, &delta_encode(1), STATE_TOL));
        let zx = apply_correction(&d0, 0, PauliCorrection::new(1, 1)).unwrap();
        assert!(equal_up_to_global_phase(&d0, &zx, STATE_TOL));
        assert!(!equal_up_to_global_phase(&d0, &make_bell(BellLabel::PhiPlus), STATE_TOL));
    }

    #[test]
    fn extract_qubit_product_and_entangled() {
        let d1 = delta_encode(1);
        let s = tensor(&[&StateVector::zero(), &d1, &StateVector::one()]).unwrap();
        let f = extract_qubit(&s, 1).unwrap();
        assert!(equal_up_to_global_phase(&f, &d1, STATE_TOL));
        let phi = make_bell(BellLabel::PhiPlus);
        assert_eq!(extract_qubit(&phi, 0).unwrap_err(), QError::NotProduct(0));
    }

    #[test]
    fn from_amplitudes_validation() {
        assert_eq!(
            StateVector::from_amplitudes(vec![c(1.0, 0.0); 3]).unwrap_err(),
            QError::BadLength(3)
        );
        assert!(matches!(
            StateVector::from_amplitudes(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err(),
            QError::NotNormalized(_)
        ));
        assert!(StateVector::from_amplitudes(vec![c(f64::NAN, 0.0), c(0.0, 0.0)]).is_err());
    }
}
