//! Ordered session event log.
//!
//! Rendered one record per line as `seq|phase|actor|event|k=v,k=v`. Records
//! carrying private key material are flagged and skipped unless explicitly
//! requested.

use std::fmt;

use crate::bits::BitString;
use crate::protocol::Phase;
use crate::qcore::Bits2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Actor {
    Alice,
    Bob,
    Charlie,
    Eve,
    System,
}

impl fmt::Display for Actor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Actor::Alice => "Alice",
            Actor::Bob => "Bob",
            Actor::Charlie => "Charlie",
            Actor::Eve => "Eve",
            Actor::System => "System",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptRecord {
    pub seq: u64,
    pub phase: Phase,
    pub actor: Actor,
    pub event: String,
    pub payload: Vec<(String, String)>,
    pub private: bool,
}

impl TranscriptRecord {
    pub fn render(&self) -> String {
        let payload: Vec<String> = self
            .payload
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!(
            "{}|{}|{}|{}|{}",
            self.seq,
            self.phase,
            self.actor,
            self.event,
            payload.join(",")
        )
    }
}

/// Renders per-position bit pairs as concatenated `zx` digit pairs.
pub fn render_pairs(pairs: &[Bits2]) -> String {
    pairs.iter().map(|p| p.to_string()).collect()
}

pub fn render_bits(bits: &BitString) -> String {
    bits.to_string()
}

pub fn render_pass(pass: &[bool]) -> String {
    pass.iter().map(|&p| if p { '1' } else { '0' }).collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Transcript {
    records: Vec<TranscriptRecord>,
}

impl Transcript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        phase: Phase,
        actor: Actor,
        event: &str,
        payload: Vec<(&str, String)>,
        private: bool,
    ) {
        let seq = self.records.len() as u64;
        self.records.push(TranscriptRecord {
            seq,
            phase,
            actor,
            event: event.to_string(),
            payload: payload
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            private,
        });
    }

    pub fn records(&self) -> &[TranscriptRecord] {
        &self.records
    }

    /// Text export. Private records are emitted only with `include_private`,
    /// and then carry a trailing `private=true` pair.
    pub fn export(&self, include_private: bool) -> String {
        let mut out = String::new();
        for rec in &self.records {
            if rec.private && !include_private {
                continue;
            }
            out.push_str(&rec.render());
            if rec.private {
                if rec.payload.is_empty() {
                    out.push_str("private=true");
                } else {
                    out.push_str(",private=true");
                }
            }
            out.push('\n');
        }
        out
    }
}
