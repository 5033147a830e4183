use thiserror::Error;

/// Errors produced by the simulation, learning and optimization layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=12")]
    QubitCount(usize),

    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("register size mismatch: expected {expected} qubits, got {actual}")]
    QubitMismatch { expected: usize, actual: usize },

    #[error("non-finite value for {0}")]
    NonFinite(&'static str),

    #[error("expectation has imaginary residue {0:e}")]
    ComplexExpectation(f64),

    #[error("duplicate two-body term on pair ({0}, {1})")]
    DuplicatePair(usize, usize),

    #[error("invalid two-body pair ({0}, {1})")]
    InvalidPair(usize, usize),

    #[error("length mismatch: {what} expects {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("value {value} out of range for {what}")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("matrix has rank 0; no filter can be fitted")]
    DegenerateRank,

    #[error("unknown waveform kind `{0}`")]
    UnknownWaveform(String),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("every fitness in the generation was non-finite")]
    GenerationRejected,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
