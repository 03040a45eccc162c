//! Three-party signature protocol over multiparty-controlled EPR channels.
//!
//! Per message position the register holds, in qubit order:
//!
//! * after setup: `[A, C, B, C']`, with `|Φ+⟩` on `(A, C)` and on `(B, C')`;
//! * after teleportation: `[M, A, C, B, C']`, where `M` is Alice's input.
//!
//! Charlie measures `(C, C')` in the Bell basis, swapping a Pauli-twisted
//! `|Φ+⟩` onto `(A, B)`. Alice then teleports `M` over that pair, and Bob's
//! qubit ends up as `σ_z^{a⊕c} σ_x^{a'⊕c'} |ψ_a⟩` up to a global phase.
//!
//! # Classical verification
//!
//! A Pauli correction moves a δ-basis state to another δ-basis state up to a
//! phase, and both σ_z and σ_x flip the δ label (σ_zσ_x keeps it). So the
//! δ-outcome of `σ_z^z σ_x^x δ_m` is always `m ⊕ z ⊕ x`. All verification
//! functions therefore depend only on the parities `a_p = a ⊕ a'` and
//! `c_p = c ⊕ c'`:
//!
//! * announced signature `S_a^G = m ⊕ a_p`;
//! * Bob's string `S_b = m ⊕ a_p ⊕ c_p`;
//! * hence `S_a^G ⊕ S_b = c_p`, independent of Alice's Bell outcomes.
//!
//! This is why Bob only ever needs `a_p` from Alice, and why [`oracle_honest`]
//! predicts every honest run without touching amplitudes.

use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::bits::BitString;
use crate::qcore::{
    self, apply_correction, bsm, bsm_postselect, delta_encode, make_bell, measure_delta, tensor,
    BellLabel, Bits2, PauliCorrection, QError, StateVector,
};
use crate::transcript::{render_bits, render_pairs, render_pass, Actor, Transcript};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Phase {
    Init,
    ChannelsReady,
    Distributed,
    Announced,
    Transferred,
    Adjudicated,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("a session needs at least one position")]
    EmptySession,
    #[error("operation requires phase {expected}, session is in {found}")]
    WrongPhase { expected: Phase, found: Phase },
    #[error("expected {expected} positions, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("global signature has not been announced")]
    MissingAnnouncement,
    #[error("global signature was already announced")]
    AlreadyAnnounced,
    #[error("teleportation already performed")]
    AlreadyTeleported,
    #[error(transparent)]
    Quantum(#[from] QError),
}

pub type ProtocolResult<T> = Result<T, ProtocolError>;

fn check_len(expected: usize, found: usize) -> ProtocolResult<()> {
    if expected != found {
        return Err(ProtocolError::LengthMismatch { expected, found });
    }
    Ok(())
}

fn parities(pairs: &[Bits2]) -> BitString {
    pairs.iter().map(|p| p.parity()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharlieKey {
    pub c_full: Vec<Bits2>,
    pub c_p: BitString,
}

impl CharlieKey {
    pub fn new(c_full: Vec<Bits2>) -> Self {
        let c_p = parities(&c_full);
        Self { c_full, c_p }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AliceKey {
    pub a_full: Vec<Bits2>,
    pub a_p: BitString,
    pub message: BitString,
}

impl AliceKey {
    pub fn new(a_full: Vec<Bits2>, message: BitString) -> Self {
        let a_p = parities(&a_full);
        Self {
            a_full,
            a_p,
            message,
        }
    }

    pub fn pair(&self) -> AlicePair {
        AlicePair {
            message: self.message.clone(),
            a_p: self.a_p.clone(),
        }
    }
}

/// `{m, a_p}` as sent by Alice at verification time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlicePair {
    pub message: BitString,
    pub a_p: BitString,
}

/// `{m, a_p, S_b}` as forwarded by Bob to Charlie.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triplet {
    pub message: BitString,
    pub a_p: BitString,
    pub s_b: BitString,
}

impl Triplet {
    pub fn pair(&self) -> AlicePair {
        AlicePair {
            message: self.message.clone(),
            a_p: self.a_p.clone(),
        }
    }
}

/// Publicly declared setup pairs. Only `|Φ+⟩` is ever declared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EprDeclaration {
    PhiPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoardEvent {
    EprDeclared,
    SignatureAnnounced,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicBoard {
    n: usize,
    s_a_g: Option<BitString>,
    epr_declaration: EprDeclaration,
    announcement_order: Vec<(BoardEvent, Phase)>,
}

impl PublicBoard {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            s_a_g: None,
            epr_declaration: EprDeclaration::PhiPlus,
            announcement_order: vec![(BoardEvent::EprDeclared, Phase::Init)],
        }
    }

    /// Board with a signature already announced; for driving the verification
    /// functions directly.
    pub fn with_signature(s_a_g: BitString) -> Self {
        let mut board = Self::new(s_a_g.len());
        board
            .announce(s_a_g, Phase::Distributed)
            .expect("fresh board accepts one announcement");
        board
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn epr_declaration(&self) -> EprDeclaration {
        self.epr_declaration
    }

    pub fn global_signature(&self) -> Option<&BitString> {
        self.s_a_g.as_ref()
    }

    pub fn announcement_order(&self) -> &[(BoardEvent, Phase)] {
        &self.announcement_order
    }

    fn signature(&self) -> ProtocolResult<&BitString> {
        self.s_a_g.as_ref().ok_or(ProtocolError::MissingAnnouncement)
    }

    fn announce(&mut self, s_a_g: BitString, phase: Phase) -> ProtocolResult<()> {
        if self.s_a_g.is_some() {
            return Err(ProtocolError::AlreadyAnnounced);
        }
        check_len(self.n, s_a_g.len())?;
        self.s_a_g = Some(s_a_g);
        self.announcement_order
            .push((BoardEvent::SignatureAnnounced, phase));
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobRecord {
    pub s_b: BitString,
    pub c_p: BitString,
}

/// Bob's v1/v2 result on the pair he received from the signer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BobCheck {
    pub pair: AlicePair,
    pub v1_bits: Vec<bool>,
    pub v2_bits: Vec<bool>,
}

impl BobCheck {
    pub fn accepts(&self) -> bool {
        all(&self.v1_bits) && all(&self.v2_bits)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Blame {
    None,
    Alice,
    Bob,
    Inconclusive,
}

impl fmt::Display for Blame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Outcome of one session's verification.
///
/// `v1_bits`/`v2_bits` are Bob's checks. The Charlie-side fields are `None`
/// when nothing was transferred to him. Charlie's v2 on the forwarded `S_b'`
/// is the same predicate as v3 and is reported through `v3_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerdictReport {
    pub v1_bits: Vec<bool>,
    pub v2_bits: Vec<bool>,
    pub v3_bits: Option<Vec<bool>>,
    pub charlie_v1_bits: Option<Vec<bool>>,
    pub crosscheck_match: Option<bool>,
    pub bob_accepts: bool,
    pub charlie_accepts: bool,
    pub blamed: Blame,
}

impl VerdictReport {
    /// Report for a session Bob rejected and did not forward.
    pub fn rejected_by_bob(check: &BobCheck) -> Self {
        Self {
            v1_bits: check.v1_bits.clone(),
            v2_bits: check.v2_bits.clone(),
            v3_bits: None,
            charlie_v1_bits: None,
            crosscheck_match: None,
            bob_accepts: check.accepts(),
            charlie_accepts: false,
            blamed: Blame::Alice,
        }
    }
}

fn all(bits: &[bool]) -> bool {
    bits.iter().all(|&b| b)
}

/// Source of Bell-measurement outcomes: Born sampling or forced postselection.
enum Outcomes<'a, R: Rng + ?Sized> {
    Sampled(&'a mut R),
    Forced(&'a [Bits2]),
}

impl<R: Rng + ?Sized> Outcomes<'_, R> {
    fn measure(
        &mut self,
        pos: usize,
        state: &StateVector,
        qi: usize,
        qj: usize,
    ) -> ProtocolResult<(Bits2, StateVector)> {
        match self {
            Outcomes::Sampled(rng) => Ok(bsm(state, qi, qj, *rng)?),
            Outcomes::Forced(list) => {
                let outcome = list[pos];
                Ok((outcome, bsm_postselect(state, qi, qj, outcome)?.1))
            }
        }
    }
}

/// One message position's quantum register.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    pub state: StateVector,
    pub bob_qubit: usize,
}

const CHARLIE_QUBITS: (usize, usize) = (1, 3);
const BOB_QUBIT_AFTER_SETUP: usize = 2;

#[derive(Debug, Clone)]
pub struct SessionState {
    phase: Phase,
    channels: Vec<Channel>,
    teleported: bool,
    alice_outcomes: Option<Vec<Bits2>>,
    alice: Option<AliceKey>,
    charlie: CharlieKey,
    bob: BobRecord,
    board: PublicBoard,
    bob_check: Option<BobCheck>,
    triplet: Option<Triplet>,
    transcript: Transcript,
}

impl SessionState {
    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn n(&self) -> usize {
        self.board.n()
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    pub fn alice(&self) -> Option<&AliceKey> {
        self.alice.as_ref()
    }

    /// Alice's raw Bell outcomes from teleportation, if any.
    pub fn alice_outcomes(&self) -> Option<&[Bits2]> {
        self.alice_outcomes.as_deref()
    }

    pub fn charlie(&self) -> &CharlieKey {
        &self.charlie
    }

    pub fn bob(&self) -> &BobRecord {
        &self.bob
    }

    pub fn board(&self) -> &PublicBoard {
        &self.board
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn bob_check(&self) -> Option<&BobCheck> {
        self.bob_check.as_ref()
    }

    fn expect_phase(&self, expected: Phase) -> ProtocolResult<()> {
        if self.phase != expected {
            return Err(ProtocolError::WrongPhase {
                expected,
                found: self.phase,
            });
        }
        Ok(())
    }

    fn advance(&mut self, to: Phase) {
        debug_assert!(to > self.phase, "phases only move forward");
        self.phase = to;
        self.transcript
            .push(to, Actor::System, "phase", vec![("phase", to.to_string())], false);
    }

    fn setup_with<R: Rng + ?Sized>(n: usize, mut outcomes: Outcomes<'_, R>) -> ProtocolResult<Self> {
        if n == 0 {
            return Err(ProtocolError::EmptySession);
        }
        let mut transcript = Transcript::new();
        transcript.push(Phase::Init, Actor::System, "session_start", vec![("n", n.to_string())], false);
        transcript.push(
            Phase::Init,
            Actor::System,
            "epr_declared",
            vec![("pairs", "phi_plus".into()), ("count", n.to_string())],
            false,
        );
        let phi = make_bell(BellLabel::PhiPlus);
        let pair_of_pairs = tensor(&[&phi, &phi])?;
        let mut channels = Vec::with_capacity(n);
        let mut c_full = Vec::with_capacity(n);
        for pos in 0..n {
            let (c, post) =
                outcomes.measure(pos, &pair_of_pairs, CHARLIE_QUBITS.0, CHARLIE_QUBITS.1)?;
            c_full.push(c);
            channels.push(Channel {
                state: post,
                bob_qubit: BOB_QUBIT_AFTER_SETUP,
            });
        }
        let charlie = CharlieKey::new(c_full);
        transcript.push(
            Phase::Init,
            Actor::Charlie,
            "bsm",
            vec![("c", render_pairs(&charlie.c_full)), ("c_p", render_bits(&charlie.c_p))],
            true,
        );
        transcript.push(
            Phase::Init,
            Actor::Charlie,
            "send_c_p",
            vec![
                ("to", "Bob".into()),
                ("channel", "assumed_secure".into()),
                ("c_p", render_bits(&charlie.c_p)),
            ],
            true,
        );
        let bob = BobRecord {
            s_b: BitString::default(),
            c_p: charlie.c_p.clone(),
        };
        let mut session = Self {
            phase: Phase::Init,
            channels,
            teleported: false,
            alice_outcomes: None,
            alice: None,
            charlie,
            bob,
            board: PublicBoard::new(n),
            bob_check: None,
            triplet: None,
            transcript,
        };
        session.advance(Phase::ChannelsReady);
        Ok(session)
    }

    /// Alice teleports one input qubit per position over her channel half.
    /// Returns her Bell outcomes. Phase stays `ChannelsReady`.
    fn teleport_with<R: Rng + ?Sized>(
        &mut self,
        inputs: &[StateVector],
        mut outcomes: Outcomes<'_, R>,
    ) -> ProtocolResult<Vec<Bits2>> {
        self.expect_phase(Phase::ChannelsReady)?;
        if self.teleported {
            return Err(ProtocolError::AlreadyTeleported);
        }
        check_len(self.n(), inputs.len())?;
        let mut a_full = Vec::with_capacity(inputs.len());
        for (pos, input) in inputs.iter().enumerate() {
            let chan = &self.channels[pos];
            let joint = tensor(&[input, &chan.state])?;
            let (a, post) = outcomes.measure(pos, &joint, 0, 1)?;
            a_full.push(a);
            self.channels[pos] = Channel {
                state: post,
                bob_qubit: chan.bob_qubit + input.num_qubits(),
            };
        }
        self.teleported = true;
        self.alice_outcomes = Some(a_full.clone());
        self.transcript.push(
            self.phase,
            Actor::Alice,
            "bsm",
            vec![("a", render_pairs(&a_full)), ("a_p", render_bits(&parities(&a_full)))],
            true,
        );
        Ok(a_full)
    }

    pub fn teleport<R: Rng + ?Sized>(
        &mut self,
        inputs: &[StateVector],
        rng: &mut R,
    ) -> ProtocolResult<Vec<Bits2>> {
        self.teleport_with(inputs, Outcomes::Sampled(rng))
    }

    pub fn teleport_forced(
        &mut self,
        inputs: &[StateVector],
        outcomes: &[Bits2],
    ) -> ProtocolResult<Vec<Bits2>> {
        check_len(self.n(), outcomes.len())?;
        self.teleport_with::<rand_chacha::ChaCha8Rng>(inputs, Outcomes::Forced(outcomes))
    }

    /// Bob's qubit at `pos` as a single-qubit state; valid once it is
    /// unentangled from the rest of the register (after teleportation).
    pub fn bob_qubit_state(&self, pos: usize) -> ProtocolResult<StateVector> {
        let chan = &self.channels[pos];
        Ok(qcore::extract_qubit(&chan.state, chan.bob_qubit)?)
    }

    /// Bob measures each of his halves in the δ basis and stores `S_b`.
    pub fn bob_measure<R: Rng + ?Sized>(&mut self, rng: &mut R) -> ProtocolResult<()> {
        self.expect_phase(Phase::ChannelsReady)?;
        let mut s_b = Vec::with_capacity(self.n());
        for chan in &mut self.channels {
            let (bit, post) = measure_delta(&chan.state, chan.bob_qubit, rng)?;
            chan.state = post;
            s_b.push(bit);
        }
        self.bob.s_b = s_b.into_iter().collect();
        self.transcript.push(
            self.phase,
            Actor::Bob,
            "measure_delta",
            vec![("s_b", render_bits(&self.bob.s_b))],
            true,
        );
        self.advance(Phase::Distributed);
        Ok(())
    }

    /// Records Alice's key after an honest teleportation of `message`.
    fn store_alice_key(&mut self, message: &BitString, a_full: Vec<Bits2>) {
        self.alice = Some(AliceKey::new(a_full, message.clone()));
    }

    /// Writes `S_a^G` to the public board.
    pub fn announce(&mut self, actor: Actor, s_a_g: BitString) -> ProtocolResult<()> {
        self.expect_phase(Phase::Distributed)?;
        self.board.announce(s_a_g.clone(), self.phase)?;
        self.transcript
            .push(self.phase, actor, "announce", vec![("s_a_g", render_bits(&s_a_g))], false);
        self.advance(Phase::Announced);
        Ok(())
    }

    /// Bob runs v1 and v2 on the pair he received. Requires `Announced`.
    pub fn bob_verify(&mut self, pair: &AlicePair) -> ProtocolResult<BobCheck> {
        self.expect_phase(Phase::Announced)?;
        self.transcript.push(
            self.phase,
            Actor::Alice,
            "send_pair",
            vec![("to", "Bob".into()), ("m", render_bits(&pair.message)), ("a_p", render_bits(&pair.a_p))],
            true,
        );
        let v1_bits = verify_v1(&pair.message, &pair.a_p, &self.board)?;
        let v2_bits = verify_v2(&self.board, &self.bob.s_b, &self.bob.c_p)?;
        let check = BobCheck {
            pair: pair.clone(),
            v1_bits,
            v2_bits,
        };
        self.transcript.push(
            self.phase,
            Actor::Bob,
            "verify",
            vec![
                ("v1", render_pass(&check.v1_bits)),
                ("v2", render_pass(&check.v2_bits)),
                ("accept", check.accepts().to_string()),
            ],
            false,
        );
        self.bob_check = Some(check.clone());
        Ok(check)
    }

    /// Bob forwards a (possibly altered) triplet to Charlie.
    pub fn transfer(&mut self, triplet: Triplet) -> ProtocolResult<()> {
        self.expect_phase(Phase::Announced)?;
        check_len(self.n(), triplet.message.len())?;
        check_len(self.n(), triplet.a_p.len())?;
        check_len(self.n(), triplet.s_b.len())?;
        self.transcript.push(
            self.phase,
            Actor::Bob,
            "forward_triplet",
            vec![
                ("to", "Charlie".into()),
                ("m", render_bits(&triplet.message)),
                ("a_p", render_bits(&triplet.a_p)),
                ("s_b", render_bits(&triplet.s_b)),
            ],
            true,
        );
        self.triplet = Some(triplet);
        self.advance(Phase::Transferred);
        Ok(())
    }

    /// Charlie's decision on the forwarded triplet.
    ///
    /// Blame is assigned by the first matching rule:
    /// 1. v3 fails: the forwarded `S_b'` disagrees with the board and
    ///    Charlie's key, so Bob altered it.
    /// 2. Alice's direct pair differs from the forwarded one: Bob.
    /// 3. Bob's own v2 failed (his honest `S_b` disagrees with the board):
    ///    Alice.
    /// 4. The forwarded pair fails v1: Alice when her direct pair confirmed
    ///    it, otherwise inconclusive.
    /// 5. Otherwise Charlie accepts.
    pub fn adjudicate(&mut self, alice_direct: Option<&AlicePair>) -> ProtocolResult<VerdictReport> {
        self.expect_phase(Phase::Transferred)?;
        let triplet = self.triplet.clone().expect("set by transfer");
        let computed = charlie_compute_sb(&self.board, &self.charlie)?;
        let v3_bits = verify_v3(&computed, &triplet.s_b)?;
        let charlie_v1 = verify_v1(&triplet.message, &triplet.a_p, &self.board)?;
        let crosscheck_match = alice_direct.map(|p| *p == triplet.pair());

        let (bob_v1, bob_v2) = match &self.bob_check {
            Some(c) => (c.v1_bits.clone(), c.v2_bits.clone()),
            None => (
                charlie_v1.clone(),
                verify_v2(&self.board, &self.bob.s_b, &self.bob.c_p)?,
            ),
        };

        let blamed = if !all(&v3_bits) || crosscheck_match == Some(false) {
            Blame::Bob
        } else if !all(&bob_v2) {
            Blame::Alice
        } else if !all(&charlie_v1) {
            if crosscheck_match == Some(true) {
                Blame::Alice
            } else {
                Blame::Inconclusive
            }
        } else {
            Blame::None
        };

        let report = VerdictReport {
            bob_accepts: all(&bob_v1) && all(&bob_v2),
            v1_bits: bob_v1,
            v2_bits: bob_v2,
            v3_bits: Some(v3_bits),
            charlie_v1_bits: Some(charlie_v1),
            crosscheck_match,
            charlie_accepts: blamed == Blame::None,
            blamed,
        };
        let mut payload = vec![
            ("v1", render_pass(report.charlie_v1_bits.as_deref().unwrap_or(&[]))),
            ("v3", render_pass(report.v3_bits.as_deref().unwrap_or(&[]))),
        ];
        if let Some(m) = crosscheck_match {
            payload.push(("crosscheck", m.to_string()));
        }
        payload.push(("accept", report.charlie_accepts.to_string()));
        payload.push(("blamed", report.blamed.to_string()));
        self.transcript.push(self.phase, Actor::Charlie, "adjudicate", payload, false);
        self.advance(Phase::Adjudicated);
        Ok(report)
    }
}

/// Charlie's entanglement swap over `n` fresh `|Φ+⟩ ⊗ |Φ+⟩` positions.
pub fn setup_channels<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ProtocolResult<SessionState> {
    SessionState::setup_with(n, Outcomes::Sampled(rng))
}

/// [`setup_channels`] with Charlie's outcomes forced per position.
pub fn setup_channels_forced(c_outcomes: &[Bits2]) -> ProtocolResult<SessionState> {
    SessionState::setup_with::<rand_chacha::ChaCha8Rng>(c_outcomes.len(), Outcomes::Forced(c_outcomes))
}

/// Global signature bits: prepare `δ_{m_i}`, apply `σ_z^{a_i} σ_x^{a'_i}`,
/// measure in the δ basis.
pub fn global_signature<R: Rng + ?Sized>(
    message: &BitString,
    a_full: &[Bits2],
    rng: &mut R,
) -> ProtocolResult<BitString> {
    check_len(message.len(), a_full.len())?;
    message
        .iter()
        .zip(a_full)
        .map(|(m, &a)| {
            let corrected = apply_correction(&delta_encode(m), 0, PauliCorrection::from(a))?;
            Ok(measure_delta(&corrected, 0, rng)?.0)
        })
        .collect()
}

fn sign_distribute_with<R: Rng + ?Sized>(
    session: &mut SessionState,
    message: &BitString,
    forced: Option<&[Bits2]>,
    rng: &mut R,
) -> ProtocolResult<()> {
    session.expect_phase(Phase::ChannelsReady)?;
    check_len(session.n(), message.len())?;
    let inputs: Vec<StateVector> = message.iter().map(delta_encode).collect();
    let a_full = match forced {
        Some(list) => session.teleport_forced(&inputs, list)?,
        None => session.teleport(&inputs, rng)?,
    };
    session.bob_measure(rng)?;
    let s_a_g = global_signature(message, &a_full, rng)?;
    session.store_alice_key(message, a_full);
    session.announce(Actor::Alice, s_a_g)
}

/// Honest signing: teleport `δ_m`, let Bob measure, announce `S_a^G`.
pub fn sign_distribute<R: Rng + ?Sized>(
    session: &mut SessionState,
    message: &BitString,
    rng: &mut R,
) -> ProtocolResult<()> {
    sign_distribute_with(session, message, None, rng)
}

/// [`sign_distribute`] with Alice's Bell outcomes forced per position.
pub fn sign_distribute_forced<R: Rng + ?Sized>(
    session: &mut SessionState,
    message: &BitString,
    a_outcomes: &[Bits2],
    rng: &mut R,
) -> ProtocolResult<()> {
    check_len(session.n(), a_outcomes.len())?;
    sign_distribute_with(session, message, Some(a_outcomes), rng)
}

/// Classical prediction of an honest run: `(S_a^G, S_b)`.
pub fn oracle_honest(
    message: &BitString,
    a_p: &BitString,
    c_p: &BitString,
) -> ProtocolResult<(BitString, BitString)> {
    check_len(message.len(), a_p.len())?;
    check_len(message.len(), c_p.len())?;
    let s_a_g = message ^ a_p;
    let s_b = &s_a_g ^ c_p;
    Ok((s_a_g, s_b))
}

/// v1: the claimed pair reproduces the announced global signature.
pub fn verify_v1(
    m_claimed: &BitString,
    a_p_claimed: &BitString,
    board: &PublicBoard,
) -> ProtocolResult<Vec<bool>> {
    let s_a_g = board.signature()?;
    check_len(s_a_g.len(), m_claimed.len())?;
    check_len(s_a_g.len(), a_p_claimed.len())?;
    Ok((0..s_a_g.len())
        .map(|i| m_claimed[i] ^ a_p_claimed[i] == s_a_g[i])
        .collect())
}

/// v2: `S_a^G` equals `S_b` where `c_p = 0` and differs where `c_p = 1`.
pub fn verify_v2(
    board: &PublicBoard,
    s_b: &BitString,
    c_p: &BitString,
) -> ProtocolResult<Vec<bool>> {
    let s_a_g = board.signature()?;
    check_len(s_a_g.len(), s_b.len())?;
    check_len(s_a_g.len(), c_p.len())?;
    Ok((0..s_a_g.len())
        .map(|i| {
            if c_p[i] == 0 {
                s_a_g[i] == s_b[i]
            } else {
                s_a_g[i] != s_b[i]
            }
        })
        .collect())
}

/// Charlie's reconstruction of Bob's string from the board and his key.
pub fn charlie_compute_sb(board: &PublicBoard, key: &CharlieKey) -> ProtocolResult<BitString> {
    let s_a_g = board.signature()?;
    check_len(s_a_g.len(), key.c_p.len())?;
    Ok(s_a_g ^ &key.c_p)
}

/// v3: Charlie's computed `S_b` matches the forwarded one.
pub fn verify_v3(computed: &BitString, forwarded: &BitString) -> ProtocolResult<Vec<bool>> {
    check_len(computed.len(), forwarded.len())?;
    Ok(computed.iter().zip(forwarded.iter()).map(|(a, b)| a == b).collect())
}

/// Transfer and adjudication in one step: Bob forwards `triplet`, Charlie
/// decides, optionally cross-checking Alice's pair obtained directly.
pub fn transfer_adjudicate(
    session: &mut SessionState,
    triplet: Triplet,
    alice_direct: Option<&AlicePair>,
) -> ProtocolResult<VerdictReport> {
    session.transfer(triplet)?;
    session.adjudicate(alice_direct)
}

/// Runs a full honest session and returns it with its verdict.
pub fn run_honest<R: Rng + ?Sized>(
    message: &BitString,
    rng: &mut R,
) -> ProtocolResult<(SessionState, VerdictReport)> {
    let mut session = setup_channels(message.len(), rng)?;
    sign_distribute(&mut session, message, rng)?;
    let pair = session.alice().expect("signed").pair();
    session.bob_verify(&pair)?;
    let triplet = Triplet {
        message: pair.message.clone(),
        a_p: pair.a_p.clone(),
        s_b: session.bob().s_b.clone(),
    };
    let report = transfer_adjudicate(&mut session, triplet, Some(&pair))?;
    Ok((session, report))
}
