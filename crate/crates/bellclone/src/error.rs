use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("party count {n} invalid: {reason}")]
    PartyCount { n: usize, reason: &'static str },

    #[error("{n} parties exceeds the dense-matrix cap of {cap}")]
    Capacity { n: usize, cap: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("expected {expected} party choices, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("matrix fails {check} check, residue {residue:e}")]
    Invariant { check: &'static str, residue: f64 },

    #[error("strategy space of {bits} bits exceeds enumeration cap of 2^{cap_bits}")]
    EnumerationCap { bits: u32, cap_bits: u32 },

    #[error("setting label {label} not declared for party {party}")]
    MissingLabel { party: usize, label: u8 },

    #[error("inequality document invalid: {0}")]
    BadSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
