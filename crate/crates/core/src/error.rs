use thiserror::Error;

/// Errors surfaced by the arithmetic, inverse-image and orbit routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Input outside the operation's domain (zero, wrong parity, below a minimum).
    #[error("domain error: {0}")]
    Domain(String),

    /// An intermediate or final value does not fit the supported width.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    /// Pollard rho gave up on a wide cofactor.
    #[error("factorization effort exceeded; unfactored cofactor {cofactor}")]
    EffortExceeded { cofactor: u128 },

    /// No distinct-prime partition was found: a counterexample to the
    /// strong Goldbach hypothesis.
    #[error("no partition into two distinct primes found for {0}")]
    Counterexample(u64),

    /// Reading or writing a scan file failed.
    #[error("i/o error: {0}")]
    Io(String),

    /// A consistency check inside an algorithm failed. Always a bug.
    #[error("internal contradiction: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
