//! Synthesis of multi-controlled gates with one borrowed ancilla.
//!
//! The crate builds `C^nX` circuits (linear, recursive and the
//! cancellation-optimized recursive construction), multi-controlled SU(2)
//! and approximate multi-controlled U(2) gates on top of them, and ships the
//! simulators, optimizer, lowering and analysis tools needed to verify and
//! benchmark those circuits.

pub mod analysis;
pub mod circuit;
mod critical;
pub mod ctrl_u;
pub mod linalg;
pub mod lowering;
pub mod metrics;
pub mod optimizer;
pub mod sim;
pub mod synth;

pub use circuit::{Circuit, Control, Gate, GateKind, Polarity, Qubit};
pub use linalg::{Mat2, C64};
pub use synth::{Method, SynthesisConfig};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },
    #[error("qubit {0} used more than once in a gate or role set")]
    DuplicateQubit(usize),
    #[error("circuit widths differ ({left} vs {right})")]
    WidthMismatch { left: usize, right: usize },
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no base-case depth for {0} controls")]
    MissingTableEntry(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Default seed for sampled verification.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;
