//! Simulator for a quantum digital signature scheme built on
//! multiparty-controlled EPR channels.
//!
//! * [`qcore`]: exact state-vector engine (Bell states, δ basis, Pauli
//!   corrections, measurements).
//! * [`protocol`]: channel setup, signing, the verification functions and
//!   adjudication.
//! * [`adversary`]: attack strategies and a seeded Monte Carlo runner.
//! * [`cli`]: the `qdsig` command-line driver.

pub mod adversary;
pub mod bits;
pub mod cli;
pub mod protocol;
pub mod qcore;
pub mod stats;
pub mod transcript;

pub use bits::BitString;
