use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("index {index} out of range for {m} orbitals")]
    Range { index: usize, m: usize },
    #[error("non-finite coefficient {0}")]
    Value(f64),
    #[error("term vanishes identically: {0}")]
    ZeroTerm(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("resource cap exceeded: {needed} qubits > cap {cap}")]
    Cap { needed: usize, cap: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("coverage violation: {0}")]
    Coverage(String),
}

pub type Result<T> = core::result::Result<T, Error>;
