//! C ABI over `qdsig-core`.
//!
//! Every function returns a [`QdsStatus`] (or a value with a documented
//! sentinel) and never unwinds across the boundary. Bit strings cross the ABI
//! as `uint8_t` arrays holding 0 or 1 per position.

use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use qdsig_core::adversary::{monte_carlo_with_threads, AdversaryError, AttackKind, AttackParams, AttackSpec};
use qdsig_core::protocol::{
    oracle_honest, setup_channels, sign_distribute, transfer_adjudicate, Blame, Phase, ProtocolError, SessionState,
    Triplet, VerdictReport,
};
use qdsig_core::BitString;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Bit arrays holding something other than 0 or 1.
    InvalidBits = 3,
    LengthMismatch = 4,
    WrongPhase = 5,
    ProtocolFailure = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdsAttack {
    Honest = 0,
    NaiveFlip = 1,
    CompensatedFlip = 2,
    AmbiguousState = 3,
    FalseAnnouncement = 4,
    BobForgeSignature = 5,
    BobForgeMessage = 6,
    Masquerade = 7,
}

impl From<QdsAttack> for AttackKind {
    fn from(a: QdsAttack) -> Self {
        match a {
            QdsAttack::Honest => AttackKind::Honest,
            QdsAttack::NaiveFlip => AttackKind::NaiveFlip,
            QdsAttack::CompensatedFlip => AttackKind::CompensatedFlip,
            QdsAttack::AmbiguousState => AttackKind::AmbiguousState,
            QdsAttack::FalseAnnouncement => AttackKind::FalseAnnouncement,
            QdsAttack::BobForgeSignature => AttackKind::BobForgeSignature,
            QdsAttack::BobForgeMessage => AttackKind::BobForgeMessage,
            QdsAttack::Masquerade => AttackKind::Masquerade,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QdsBlame {
    None = 0,
    Alice = 1,
    Bob = 2,
    Inconclusive = 3,
}

impl From<Blame> for QdsBlame {
    fn from(b: Blame) -> Self {
        match b {
            Blame::None => QdsBlame::None,
            Blame::Alice => QdsBlame::Alice,
            Blame::Bob => QdsBlame::Bob,
            Blame::Inconclusive => QdsBlame::Inconclusive,
        }
    }
}

/// Outcome of an honest verification and adjudication.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QdsVerdict {
    pub bob_accepts: bool,
    pub charlie_accepts: bool,
    pub blamed: QdsBlame,
    /// Positions failing each check; v3 counts stay 0 when Bob rejected.
    pub v1_failures: usize,
    pub v2_failures: usize,
    pub v3_failures: usize,
    /// 1 match, 0 mismatch, -1 not performed.
    pub crosscheck: i32,
}

impl From<&VerdictReport> for QdsVerdict {
    fn from(v: &VerdictReport) -> Self {
        let fails = |b: &[bool]| b.iter().filter(|&&ok| !ok).count();
        Self {
            bob_accepts: v.bob_accepts,
            charlie_accepts: v.charlie_accepts,
            blamed: v.blamed.into(),
            v1_failures: fails(&v.v1_bits) + v.charlie_v1_bits.as_deref().map_or(0, fails),
            v2_failures: fails(&v.v2_bits),
            v3_failures: v.v3_bits.as_deref().map_or(0, fails),
            crosscheck: v.crosscheck_match.map_or(-1, i32::from),
        }
    }
}

/// Monte Carlo aggregate for one strategy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QdsTrialStats {
    pub n: usize,
    pub mask_weight: usize,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub wilson_99_low: f64,
    pub wilson_99_high: f64,
    pub v1_fail: u64,
    pub v2_fail: u64,
    pub v3_fail: u64,
    pub crosscheck_fail: u64,
    pub unexpected_fail: u64,
    /// Rate predicted for this strategy.
    pub expected_rate: f64,
    pub seed: u64,
}

/// Opaque session handle.
pub struct QdsSession {
    state: SessionState,
    rng: ChaCha8Rng,
    verdict: Option<VerdictReport>,
}

fn protocol_status(e: &ProtocolError) -> QdsStatus {
    match e {
        ProtocolError::WrongPhase { .. } | ProtocolError::AlreadyAnnounced | ProtocolError::AlreadyTeleported => {
            QdsStatus::WrongPhase
        }
        ProtocolError::MissingAnnouncement => QdsStatus::WrongPhase,
        ProtocolError::LengthMismatch { .. } => QdsStatus::LengthMismatch,
        ProtocolError::EmptySession => QdsStatus::InvalidArgument,
        ProtocolError::Quantum(_) => QdsStatus::ProtocolFailure,
    }
}

fn adversary_status(e: &AdversaryError) -> QdsStatus {
    match e {
        AdversaryError::Protocol(p) => protocol_status(p),
        AdversaryError::MaskLength { .. } | AdversaryError::SubstituteLength { .. } => QdsStatus::LengthMismatch,
        _ => QdsStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> QdsStatus) -> QdsStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or(QdsStatus::Panic)
}

/// # Safety
/// `p` must be null or point to `len` readable bytes.
unsafe fn read_bits(p: *const u8, len: usize) -> Result<BitString, QdsStatus> {
    if p.is_null() {
        return Err(QdsStatus::NullPointer);
    }
    let raw = slice::from_raw_parts(p, len);
    BitString::from_bits(raw.to_vec()).map_err(|_| QdsStatus::InvalidBits)
}

/// # Safety
/// `out` must be null or point to `len` writable bytes.
unsafe fn write_bits(bits: &BitString, out: *mut u8, len: usize) -> QdsStatus {
    if out.is_null() {
        return QdsStatus::NullPointer;
    }
    if len != bits.len() {
        return QdsStatus::LengthMismatch;
    }
    ptr::copy_nonoverlapping(bits.as_slice().as_ptr(), out, len);
    QdsStatus::Ok
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn qds_status_message(status: QdsStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        QdsStatus::Ok => b"ok\0",
        QdsStatus::NullPointer => b"null pointer argument\0",
        QdsStatus::InvalidArgument => b"invalid argument\0",
        QdsStatus::InvalidBits => b"bit array holds a value other than 0 or 1\0",
        QdsStatus::LengthMismatch => b"length mismatch\0",
        QdsStatus::WrongPhase => b"operation not allowed in the current session phase\0",
        QdsStatus::ProtocolFailure => b"protocol simulation failed\0",
        QdsStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Library version as a NUL-terminated string.
#[no_mangle]
pub extern "C" fn qds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Prepares `n` controlled channels seeded by `seed` and stores a new handle
/// in `*out`.
///
/// # Safety
/// `out` must be a valid pointer. The handle must be released with
/// [`qds_session_free`].
#[no_mangle]
pub unsafe extern "C" fn qds_session_new(n: usize, seed: u64, out: *mut *mut QdsSession) -> QdsStatus {
    guard(|| {
        if out.is_null() {
            return QdsStatus::NullPointer;
        }
        *out = ptr::null_mut();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match setup_channels(n, &mut rng) {
            Ok(state) => {
                *out = Box::into_raw(Box::new(QdsSession {
                    state,
                    rng,
                    verdict: None,
                }));
                QdsStatus::Ok
            }
            Err(e) => protocol_status(&e),
        }
    })
}

/// # Safety
/// `session` must be null or a handle from [`qds_session_new`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qds_session_free(session: *mut QdsSession) {
    if !session.is_null() {
        drop(Box::from_raw(session));
    }
}

/// Number of positions, or 0 for a null handle.
///
/// # Safety
/// `session` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qds_session_len(session: *const QdsSession) -> usize {
    session.as_ref().map_or(0, |s| s.state.n())
}

/// Alice signs `message` (`len` bits): teleportation, Bob's measurement and
/// the public announcement.
///
/// # Safety
/// `session` must be a live handle and `message` must point to `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn qds_session_sign(session: *mut QdsSession, message: *const u8, len: usize) -> QdsStatus {
    guard(|| {
        let Some(s) = session.as_mut() else {
            return QdsStatus::NullPointer;
        };
        let m = match read_bits(message, len) {
            Ok(m) => m,
            Err(e) => return e,
        };
        match sign_distribute(&mut s.state, &m, &mut s.rng) {
            Ok(()) => QdsStatus::Ok,
            Err(e) => protocol_status(&e),
        }
    })
}

/// Copies the announced global signature into `out`.
///
/// # Safety
/// `session` must be a live handle and `out` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qds_session_signature(session: *const QdsSession, out: *mut u8, len: usize) -> QdsStatus {
    guard(|| {
        let Some(s) = session.as_ref() else {
            return QdsStatus::NullPointer;
        };
        match s.state.board().global_signature() {
            Some(g) => write_bits(g, out, len),
            None => QdsStatus::WrongPhase,
        }
    })
}

/// Copies Bob's measured signature into `out`.
///
/// # Safety
/// `session` must be a live handle and `out` must point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qds_session_bob_signature(session: *const QdsSession, out: *mut u8, len: usize) -> QdsStatus {
    guard(|| {
        let Some(s) = session.as_ref() else {
            return QdsStatus::NullPointer;
        };
        if s.state.phase() < Phase::Distributed {
            return QdsStatus::WrongPhase;
        }
        write_bits(&s.state.bob().s_b, out, len)
    })
}

/// Bob verifies Alice's pair, forwards it, and Charlie adjudicates with the
/// direct cross-check when `crosscheck` is true. The verdict is written to
/// `*out`.
///
/// # Safety
/// `session` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qds_session_verify(session: *mut QdsSession, crosscheck: bool, out: *mut QdsVerdict) -> QdsStatus {
    guard(|| {
        let Some(s) = session.as_mut() else {
            return QdsStatus::NullPointer;
        };
        if out.is_null() {
            return QdsStatus::NullPointer;
        }
        if s.verdict.is_some() {
            return QdsStatus::WrongPhase;
        }
        let Some(alice) = s.state.alice() else {
            return QdsStatus::WrongPhase;
        };
        let pair = alice.pair();
        let check = match s.state.bob_verify(&pair) {
            Ok(c) => c,
            Err(e) => return protocol_status(&e),
        };
        let report = if check.accepts() {
            let triplet = Triplet {
                message: pair.message.clone(),
                a_p: pair.a_p.clone(),
                s_b: s.state.bob().s_b.clone(),
            };
            match transfer_adjudicate(&mut s.state, triplet, crosscheck.then_some(&pair)) {
                Ok(r) => r,
                Err(e) => return protocol_status(&e),
            }
        } else {
            VerdictReport::rejected_by_bob(&check)
        };
        *out = QdsVerdict::from(&report);
        s.verdict = Some(report);
        QdsStatus::Ok
    })
}

/// Classical prediction of an honest run from `message`, Alice's parities
/// and Charlie's parities, all `len` bits.
///
/// # Safety
/// Inputs must point to `len` readable bytes; outputs to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn qds_oracle_honest(
    message: *const u8,
    a_p: *const u8,
    c_p: *const u8,
    len: usize,
    out_global: *mut u8,
    out_bob: *mut u8,
) -> QdsStatus {
    guard(|| {
        let read = |p| read_bits(p, len);
        let (m, a, c) = match (read(message), read(a_p), read(c_p)) {
            (Ok(m), Ok(a), Ok(c)) => (m, a, c),
            (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return e,
        };
        let (g, b) = match oracle_honest(&m, &a, &c) {
            Ok(r) => r,
            Err(e) => return protocol_status(&e),
        };
        match write_bits(&g, out_global, len) {
            QdsStatus::Ok => write_bits(&b, out_bob, len),
            e => e,
        }
    })
}

/// Runs `trials` seeded sessions of `attack` on `n` positions.
///
/// `mask` selects the attacked positions (`n` bytes); null means all.
/// `threads` of 0 or 1 runs sequentially; results do not depend on it.
///
/// # Safety
/// `mask` must be null or point to `n` bytes; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qds_monte_carlo(
    attack: QdsAttack,
    n: usize,
    mask: *const u8,
    trials: u64,
    seed: u64,
    crosscheck: bool,
    threads: usize,
    out: *mut QdsTrialStats,
) -> QdsStatus {
    guard(|| {
        if out.is_null() {
            return QdsStatus::NullPointer;
        }
        if n == 0 {
            return QdsStatus::InvalidArgument;
        }
        let mask = if mask.is_null() {
            BitString::ones(n)
        } else {
            match read_bits(mask, n) {
                Ok(m) => m,
                Err(e) => return e,
            }
        };
        let params = AttackParams {
            substitute: None,
            crosscheck,
        };
        let spec = match AttackSpec::new(attack.into(), mask, params) {
            Ok(s) => s,
            Err(e) => return adversary_status(&e),
        };
        match monte_carlo_with_threads(&spec, trials, seed, threads.max(1)) {
            Ok(st) => {
                *out = QdsTrialStats {
                    n: st.n,
                    mask_weight: st.mask_weight,
                    trials: st.trials,
                    successes: st.successes,
                    success_rate: st.success_rate,
                    wilson_99_low: st.wilson_99_low,
                    wilson_99_high: st.wilson_99_high,
                    v1_fail: st.v1_fail,
                    v2_fail: st.v2_fail,
                    v3_fail: st.v3_fail,
                    crosscheck_fail: st.crosscheck_fail,
                    unexpected_fail: st.unexpected_fail,
                    expected_rate: spec.expected_rate(),
                    seed: st.seed,
                };
                QdsStatus::Ok
            }
            Err(e) => adversary_status(&e),
        }
    })
}
