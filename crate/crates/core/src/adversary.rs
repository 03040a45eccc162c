//! Attack strategies against the signature scheme and a seeded Monte Carlo
//! runner.
//!
//! Every strategy plays one full session (setup, distribution, Bob's checks,
//! optional transfer to Charlie) and reports whether its goal predicate held:
//!
//! | strategy              | attacker | goal                                   |
//! |-----------------------|----------|----------------------------------------|
//! | `Honest`              | none     | Bob and Charlie accept                 |
//! | `NaiveFlip`           | Alice    | Bob accepts `m` flipped, `a_p` honest  |
//! | `CompensatedFlip`     | Alice    | Bob and Charlie accept `m`, `a_p` both flipped |
//! | `AmbiguousState`      | Alice    | Bob accepts a message chosen after distribution |
//! | `FalseAnnouncement`   | Alice    | Bob accepts after a flipped announcement |
//! | `BobForgeSignature`   | Bob      | Charlie accepts a flipped `S_b'`       |
//! | `BobForgeMessage`     | Bob      | Charlie accepts a substituted message  |
//! | `Masquerade`          | Eve      | Bob accepts a signature Eve announced  |
//!
//! Bob forwards to Charlie only when his own v1/v2 checks pass.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::bits::BitString;
use crate::protocol::{
    self, global_signature, setup_channels, AlicePair, ProtocolError, SessionState, Triplet,
    VerdictReport,
};
use crate::qcore::{delta_encode, StateVector};
use crate::stats::wilson_99;
use crate::transcript::Actor;

/// Label carried by strategies that probe behavior no security claim covers.
pub const OUTSIDE_ANALYZED_STRATEGY: &str = "outside the analyzed strategy";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AdversaryError {
    #[error("{0} needs a nonempty target mask")]
    EmptyMask(AttackKind),
    #[error("mask covers {found} positions, session has {expected}")]
    MaskLength { expected: usize, found: usize },
    #[error("substitute message has {found} bits, session has {expected}")]
    SubstituteLength { expected: usize, found: usize },
    #[error("at least one trial is required")]
    NoTrials,
    #[error("unknown attack {0:?}")]
    UnknownAttack(String),
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
}

pub type AdversaryResult<T> = Result<T, AdversaryError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttackKind {
    Honest,
    NaiveFlip,
    CompensatedFlip,
    AmbiguousState,
    FalseAnnouncement,
    BobForgeSignature,
    BobForgeMessage,
    Masquerade,
}

impl AttackKind {
    pub const ALL: [AttackKind; 8] = [
        AttackKind::Honest,
        AttackKind::NaiveFlip,
        AttackKind::CompensatedFlip,
        AttackKind::AmbiguousState,
        AttackKind::FalseAnnouncement,
        AttackKind::BobForgeSignature,
        AttackKind::BobForgeMessage,
        AttackKind::Masquerade,
    ];

    /// Command-line and CSV name.
    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Honest => "honest",
            AttackKind::NaiveFlip => "naive-flip",
            AttackKind::CompensatedFlip => "compensated-flip",
            AttackKind::AmbiguousState => "ambiguous-state",
            AttackKind::FalseAnnouncement => "false-announcement",
            AttackKind::BobForgeSignature => "bob-forge-signature",
            AttackKind::BobForgeMessage => "bob-forge-message",
            AttackKind::Masquerade => "masquerade",
        }
    }

    fn uses_mask(self) -> bool {
        !matches!(self, AttackKind::Honest | AttackKind::Masquerade)
    }

    /// Free-form notes attached to reports.
    pub fn metadata(self) -> &'static [&'static str] {
        match self {
            AttackKind::CompensatedFlip => &[OUTSIDE_ANALYZED_STRATEGY],
            AttackKind::AmbiguousState => &["masked positions teleport |0>"],
            _ => &[],
        }
    }

    pub fn outside_analyzed_strategy(self) -> bool {
        self.metadata().contains(&OUTSIDE_ANALYZED_STRATEGY)
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = AdversaryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| AdversaryError::UnknownAttack(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackParams {
    /// Message bits used at masked positions by strategies that substitute a
    /// message (ambiguous-state, bob-forge-message, masquerade). Drawn at
    /// random when absent, except bob-forge-message which flips.
    pub substitute: Option<BitString>,
    /// Whether Charlie asks Alice for her pair directly.
    pub crosscheck: bool,
}

impl Default for AttackParams {
    fn default() -> Self {
        Self {
            substitute: None,
            crosscheck: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub target_positions: BitString,
    pub params: AttackParams,
}

impl AttackSpec {
    pub fn new(kind: AttackKind, target_positions: BitString, params: AttackParams) -> AdversaryResult<Self> {
        if kind.uses_mask() && target_positions.weight() == 0 {
            return Err(AdversaryError::EmptyMask(kind));
        }
        if let Some(sub) = &params.substitute {
            if sub.len() != target_positions.len() {
                return Err(AdversaryError::SubstituteLength {
                    expected: target_positions.len(),
                    found: sub.len(),
                });
            }
        }
        Ok(Self {
            kind,
            target_positions,
            params,
        })
    }

    pub fn full(kind: AttackKind, n: usize) -> AdversaryResult<Self> {
        Self::new(kind, BitString::ones(n), AttackParams::default())
    }

    pub fn n(&self) -> usize {
        self.target_positions.len()
    }

    /// Number of attacked positions; all positions for masquerade, none for
    /// honest runs.
    pub fn mask_weight(&self) -> usize {
        match self.kind {
            AttackKind::Honest => 0,
            AttackKind::Masquerade => self.n(),
            _ => self.target_positions.weight(),
        }
    }

    /// Success probability predicted by the protocol's algebra.
    pub fn expected_rate(&self) -> f64 {
        match self.kind {
            AttackKind::Honest | AttackKind::CompensatedFlip => 1.0,
            AttackKind::NaiveFlip | AttackKind::FalseAnnouncement | AttackKind::BobForgeSignature => 0.0,
            AttackKind::BobForgeMessage => {
                if self.params.crosscheck {
                    0.0
                } else {
                    1.0
                }
            }
            AttackKind::AmbiguousState | AttackKind::Masquerade => 0.5f64.powi(self.mask_weight() as i32),
        }
    }

    /// Checks this strategy is expected to trip when it is caught.
    pub fn predicted_failures(&self) -> CheckSet {
        match self.kind {
            AttackKind::Honest | AttackKind::CompensatedFlip => CheckSet::default(),
            AttackKind::NaiveFlip => CheckSet { v1: true, ..CheckSet::default() },
            AttackKind::AmbiguousState | AttackKind::FalseAnnouncement | AttackKind::Masquerade => {
                CheckSet { v2: true, ..CheckSet::default() }
            }
            AttackKind::BobForgeSignature => CheckSet { v3: true, ..CheckSet::default() },
            AttackKind::BobForgeMessage => CheckSet {
                crosscheck: self.params.crosscheck,
                ..CheckSet::default()
            },
        }
    }
}

/// Which verification checks failed somewhere in a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CheckSet {
    pub v1: bool,
    pub v2: bool,
    pub v3: bool,
    pub crosscheck: bool,
}

impl CheckSet {
    pub fn from_verdict(v: &VerdictReport) -> Self {
        let failed = |bits: &[bool]| bits.iter().any(|&b| !b);
        Self {
            v1: failed(&v.v1_bits) || v.charlie_v1_bits.as_deref().is_some_and(failed),
            v2: failed(&v.v2_bits),
            v3: v.v3_bits.as_deref().is_some_and(failed),
            crosscheck: v.crosscheck_match == Some(false),
        }
    }

    /// True when every failed check is in `allowed`.
    pub fn within(&self, allowed: &CheckSet) -> bool {
        (!self.v1 || allowed.v1)
            && (!self.v2 || allowed.v2)
            && (!self.v3 || allowed.v3)
            && (!self.crosscheck || allowed.crosscheck)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    pub verdict: VerdictReport,
    pub attack_succeeded: bool,
}

/// Produces fresh `n`-position sessions with a uniformly random message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionFactory {
    pub n: usize,
}

impl SessionFactory {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn session<R: Rng + ?Sized>(&self, rng: &mut R) -> AdversaryResult<(SessionState, BitString)> {
        let session = setup_channels(self.n, rng)?;
        let message = BitString::random(self.n, rng);
        Ok((session, message))
    }

    fn check_mask(&self, mask: &BitString) -> AdversaryResult<()> {
        if mask.len() != self.n {
            return Err(AdversaryError::MaskLength {
                expected: self.n,
                found: mask.len(),
            });
        }
        Ok(())
    }
}

fn require_mask(kind: AttackKind, factory: &SessionFactory, mask: &BitString) -> AdversaryResult<()> {
    factory.check_mask(mask)?;
    if mask.weight() == 0 {
        return Err(AdversaryError::EmptyMask(kind));
    }
    Ok(())
}

/// Teleports `inputs`, lets Bob measure, returns Alice's Bell outcomes.
fn distribute<R: Rng + ?Sized>(
    session: &mut SessionState,
    inputs: &[StateVector],
    rng: &mut R,
) -> AdversaryResult<Vec<crate::qcore::Bits2>> {
    let a_full = session.teleport(inputs, rng)?;
    session.bob_measure(rng)?;
    Ok(a_full)
}

fn honest_inputs(message: &BitString) -> Vec<StateVector> {
    message.iter().map(delta_encode).collect()
}

/// Bob checks `pair`; if he accepts he forwards `forward(triplet)` and Charlie
/// adjudicates, asking the signer for `direct` when given.
fn verify_and_transfer(
    session: &mut SessionState,
    pair: &AlicePair,
    forward: impl FnOnce(Triplet) -> Triplet,
    direct: Option<&AlicePair>,
) -> AdversaryResult<VerdictReport> {
    let check = session.bob_verify(pair)?;
    if !check.accepts() {
        return Ok(VerdictReport::rejected_by_bob(&check));
    }
    let honest = Triplet {
        message: pair.message.clone(),
        a_p: pair.a_p.clone(),
        s_b: session.bob().s_b.clone(),
    };
    Ok(protocol::transfer_adjudicate(session, forward(honest), direct)?)
}

fn finish(verdict: VerdictReport, goal: impl Fn(&VerdictReport) -> bool) -> TrialOutcome {
    TrialOutcome {
        attack_succeeded: goal(&verdict),
        verdict,
    }
}

fn both_accept(v: &VerdictReport) -> bool {
    v.bob_accepts && v.charlie_accepts
}

fn bob_accepts(v: &VerdictReport) -> bool {
    v.bob_accepts
}

fn charlie_accepts(v: &VerdictReport) -> bool {
    v.charlie_accepts
}

/// Replaces masked bits of `base` with `substitute` (or fresh random bits).
fn substitute_bits<R: Rng + ?Sized>(
    base: &BitString,
    mask: &BitString,
    substitute: Option<&BitString>,
    rng: &mut R,
) -> BitString {
    let fresh;
    let source = match substitute {
        Some(s) => s,
        None => {
            fresh = BitString::random(base.len(), rng);
            &fresh
        }
    };
    (0..base.len())
        .map(|i| if mask[i] == 1 { source[i] } else { base[i] })
        .collect()
}

/// Honest session; goal: Bob and Charlie both accept.
pub fn attack_honest<R: Rng + ?Sized>(factory: &SessionFactory, params: &AttackParams, rng: &mut R) -> AdversaryResult<TrialOutcome> {
    let (mut session, message) = factory.session(rng)?;
    protocol::sign_distribute(&mut session, &message, rng)?;
    let pair = session.alice().expect("signed").pair();
    let direct = params.crosscheck.then_some(&pair);
    let verdict = verify_and_transfer(&mut session, &pair, |t| t, direct)?;
    Ok(finish(verdict, both_accept))
}

/// Alice presents `m` with masked bits flipped and her honest `a_p`.
pub fn attack_naive_flip<R: Rng + ?Sized>(
    factory: &SessionFactory,
    mask: &BitString,
    params: &AttackParams,
    rng: &mut R,
) -> AdversaryResult<TrialOutcome> {
    require_mask(AttackKind::NaiveFlip, factory, mask)?;
    let (mut session, message) = factory.session(rng)?;
    protocol::sign_distribute(&mut session, &message, rng)?;
    let honest = session.alice().expect("signed").pair();
    let altered = AlicePair {
        message: honest.message.flipped(mask),
        a_p: honest.a_p,
    };
    let direct = params.crosscheck.then_some(&altered);
    let verdict = verify_and_transfer(&mut session, &altered, |t| t, direct)?;
    Ok(finish(verdict, bob_accepts))
}

/// Alice flips masked bits of both `m` and `a_p`, preserving `m ⊕ a_p`.
pub fn attack_compensated_flip<R: Rng + ?Sized>(
    factory: &SessionFactory,
    mask: &BitString,
    params: &AttackParams,
    rng: &mut R,
) -> AdversaryResult<TrialOutcome> {
    require_mask(AttackKind::CompensatedFlip, factory, mask)?;
    let (mut session, message) = factory.session(rng)?;
    protocol::sign_distribute(&mut session, &message, rng)?;
    let honest = session.alice().expect("signed").pair();
    let altered = AlicePair {
        message: honest.message.flipped(mask),
        a_p: honest.a_p.flipped(mask),
    };
    let direct = params.crosscheck.then_some(&altered);
    let verdict = verify_and_transfer(&mut session, &altered, |t| t, direct)?;
    let goal = |v: &VerdictReport| both_accept(v) && altered.message != message;
    Ok(finish(verdict, goal))
}

/// Alice teleports `|0⟩` at masked positions, then picks the message bits
/// there after distribution and announces a matching `S_a^G`.
pub fn attack_ambiguous_state<R: Rng + ?Sized>(
    factory: &SessionFactory,
    mask: &BitString,
    params: &AttackParams,
    rng: &mut R,
) -> AdversaryResult<TrialOutcome> {
    require_mask(AttackKind::AmbiguousState, factory, mask)?;
    let (mut session, message) = factory.session(rng)?;
    let inputs: Vec<StateVector> = (0..factory.n)
        .map(|i| {
            if mask[i] == 1 {
                StateVector::zero()
            } else {
                delta_encode(message[i])
            }
        })
        .collect();
    let a_full = distribute(&mut session, &inputs, rng)?;
    let claimed = substitute_bits(&message, mask, params.substitute.as_ref(), rng);
    let s_a_g = global_signature(&claimed, &a_full, rng)?;
    session.announce(Actor::Alice, s_a_g)?;
    let pair = AlicePair {
        message: claimed,
        a_p: a_full.iter().map(|a| a.parity()).collect(),
    };
    let direct = params.crosscheck.then_some(&pair);
    let verdict = verify_and_transfer(&mut session, &pair, |t| t, direct)?;
    Ok(finish(verdict, bob_accepts))
}

/// Honest distribution, but `S_a^G` is announced with masked bits flipped;
/// Alice presents `(m, a_p ⊕ mask)` to stay consistent with it.
pub fn attack_false_announcement<R: Rng + ?Sized>(
    factory: &SessionFactory,
    mask: &BitString,
    params: &AttackParams,
    rng: &mut R,
) -> AdversaryResult<TrialOutcome> {
    require_mask(AttackKind::FalseAnnouncement, factory, mask)?;
    let (mut session, message) = factory.session(rng)?;
    let a_full = distribute(&mut session, &honest_inputs(&message), rng)?;
    let s_a_g = global_signature(&message, &a_full, rng)?;
    session.announce(Actor::Alice, s_a_g.flipped(mask))?;
    let a_p: BitString = a_full.iter().map(|a| a.parity()).collect();
    let pair = AlicePair {
        message,
        a_p: a_p.flipped(mask),
    };
    let direct = params.crosscheck.then_some(&pair);
    let verdict = verify_and_transfer(&mut session, &pair, |t| t, direct)?;
    Ok(finish(verdict, bob_accepts))
}

/// Bob forwards his `S_b` with masked bits flipped.
pub fn attack_bob_forge_signature<R: Rng + ?Sized>(
    factory: &SessionFactory,
    mask: &BitString,
    params: &AttackParams,
    rng: &mut R,
) -> AdversaryResult<TrialOutcome> {
    require_mask(AttackKind::BobForgeSignature, factory, mask)?;
    let (mut session, message) = factory.session(rng)?;
    protocol::sign_distribute(&mut session, &message, rng)?;
    let pair = session.alice().expect("signed").pair();
    let direct = params.crosscheck.then_some(&pair);
    let forge = |t: Triplet| Triplet {
        s_b: t.s_b.flipped(mask),
        ..t
    };
    let verdict = verify_and_transfer(&mut session, &pair, forge, direct)?;
    Ok(finish(verdict, charlie_accepts))
}

/// Bob substitutes the message at masked positions and sets
/// `a_p' = m' ⊕ S_a^G` so the forwarded triplet is self-consistent.
pub fn attack_bob_forge_message<R: Rng + ?Sized>(
    factory: &SessionFactory,
    mask: &BitString,
    params: &AttackParams,
    rng: &mut R,
) -> AdversaryResult<TrialOutcome> {
    require_mask(AttackKind::BobForgeMessage, factory, mask)?;
    let (mut session, message) = factory.session(rng)?;
    protocol::sign_distribute(&mut session, &message, rng)?;
    let pair = session.alice().expect("signed").pair();
    let s_a_g = session.board().global_signature().expect("announced").clone();
    let forged_message = match &params.substitute {
        Some(sub) => substitute_bits(&message, mask, Some(sub), rng),
        None => message.flipped(mask),
    };
    let direct = params.crosscheck.then_some(&pair);
    let forge = |t: Triplet| Triplet {
        a_p: &forged_message ^ &s_a_g,
        message: forged_message.clone(),
        s_b: t.s_b,
    };
    let verdict = verify_and_transfer(&mut session, &pair, forge, direct)?;
    let goal = |v: &VerdictReport| v.charlie_accepts && forged_message != message;
    Ok(finish(verdict, goal))
}

/// Eve, holding none of Alice's halves, skips teleportation and announces a
/// self-consistent signature for a message of her choice.
pub fn attack_masquerade<R: Rng + ?Sized>(
    factory: &SessionFactory,
    params: &AttackParams,
    rng: &mut R,
) -> AdversaryResult<TrialOutcome> {
    let (mut session, _) = factory.session(rng)?;
    session.bob_measure(rng)?;
    let message = match &params.substitute {
        Some(sub) => sub.clone(),
        None => BitString::random(factory.n, rng),
    };
    let a_p = BitString::random(factory.n, rng);
    session.announce(Actor::Eve, &message ^ &a_p)?;
    let pair = AlicePair { message, a_p };
    let direct = params.crosscheck.then_some(&pair);
    let verdict = verify_and_transfer(&mut session, &pair, |t| t, direct)?;
    Ok(finish(verdict, bob_accepts))
}

/// Runs one session of `spec`.
pub fn run_trial<R: Rng + ?Sized>(spec: &AttackSpec, rng: &mut R) -> AdversaryResult<TrialOutcome> {
    let factory = SessionFactory::new(spec.n());
    let mask = &spec.target_positions;
    let p = &spec.params;
    match spec.kind {
        AttackKind::Honest => attack_honest(&factory, p, rng),
        AttackKind::NaiveFlip => attack_naive_flip(&factory, mask, p, rng),
        AttackKind::CompensatedFlip => attack_compensated_flip(&factory, mask, p, rng),
        AttackKind::AmbiguousState => attack_ambiguous_state(&factory, mask, p, rng),
        AttackKind::FalseAnnouncement => attack_false_announcement(&factory, mask, p, rng),
        AttackKind::BobForgeSignature => attack_bob_forge_signature(&factory, mask, p, rng),
        AttackKind::BobForgeMessage => attack_bob_forge_message(&factory, mask, p, rng),
        AttackKind::Masquerade => attack_masquerade(&factory, p, rng),
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed: `splitmix64(splitmix64(master) ^ index)`.
pub fn trial_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ index)
}

pub fn trial_rng(master_seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(master_seed, index))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialStats {
    pub attack: AttackKind,
    pub n: usize,
    pub mask_weight: usize,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub wilson_99_low: f64,
    pub wilson_99_high: f64,
    /// Trials in which v1 failed at some position (Bob's or Charlie's run).
    pub v1_fail: u64,
    pub v2_fail: u64,
    pub v3_fail: u64,
    pub crosscheck_fail: u64,
    /// Trials whose failures fell outside the strategy's predicted checks.
    pub unexpected_fail: u64,
    pub seed: u64,
}

impl TrialStats {
    pub fn contains(&self, p: f64) -> bool {
        self.wilson_99_low <= p && p <= self.wilson_99_high
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    trials: u64,
    successes: u64,
    v1: u64,
    v2: u64,
    v3: u64,
    crosscheck: u64,
    unexpected: u64,
}

impl Counts {
    fn record(outcome: &TrialOutcome, predicted: &CheckSet) -> Self {
        let failed = CheckSet::from_verdict(&outcome.verdict);
        Self {
            trials: 1,
            successes: outcome.attack_succeeded as u64,
            v1: failed.v1 as u64,
            v2: failed.v2 as u64,
            v3: failed.v3 as u64,
            crosscheck: failed.crosscheck as u64,
            unexpected: (!failed.within(predicted)) as u64,
        }
    }

    fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            successes: self.successes + o.successes,
            v1: self.v1 + o.v1,
            v2: self.v2 + o.v2,
            v3: self.v3 + o.v3,
            crosscheck: self.crosscheck + o.crosscheck,
            unexpected: self.unexpected + o.unexpected,
        }
    }
}

/// Runs `trials` independent sessions of `spec` sequentially.
pub fn monte_carlo(spec: &AttackSpec, trials: u64, master_seed: u64) -> AdversaryResult<TrialStats> {
    monte_carlo_with_threads(spec, trials, master_seed, 1)
}

/// [`monte_carlo`] over a dedicated pool of `threads` workers. The result does
/// not depend on the thread count.
pub fn monte_carlo_with_threads(
    spec: &AttackSpec,
    trials: u64,
    master_seed: u64,
    threads: usize,
) -> AdversaryResult<TrialStats> {
    if trials == 0 {
        return Err(AdversaryError::NoTrials);
    }
    let predicted = spec.predicted_failures();
    let one = |i: u64| -> AdversaryResult<Counts> {
        let outcome = run_trial(spec, &mut trial_rng(master_seed, i))?;
        Ok(Counts::record(&outcome, &predicted))
    };
    let counts = if threads <= 1 {
        (0..trials).try_fold(Counts::default(), |acc, i| Ok::<_, AdversaryError>(acc.merge(one(i)?)))?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| AdversaryError::ThreadPool(e.to_string()))?;
        pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(one)
                .try_reduce(Counts::default, |a, b| Ok(a.merge(b)))
        })?
    };
    let (low, high) = wilson_99(counts.successes, counts.trials);
    Ok(TrialStats {
        attack: spec.kind,
        n: spec.n(),
        mask_weight: spec.mask_weight(),
        trials: counts.trials,
        successes: counts.successes,
        success_rate: counts.successes as f64 / counts.trials as f64,
        wilson_99_low: low,
        wilson_99_high: high,
        v1_fail: counts.v1,
        v2_fail: counts.v2,
        v3_fail: counts.v3,
        crosscheck_fail: counts.crosscheck,
        unexpected_fail: counts.unexpected,
        seed: master_seed,
    })
}
