use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto its exit-code contract: structural weight errors
/// (band gaps, malformed families) exit 3, parameter/usage problems exit 2.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates a precondition (horizon too small, p < 1, ...).
    #[error("parameter error: {0}")]
    Parameter(String),

    /// A family or weight fails a construction invariant.
    #[error("malformed input: {0}")]
    Malformed(String),

    /// The family's interval blocks never become disjoint across k, so the
    /// exact density algorithm does not apply.
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),

    /// A shift index falls in no declared band of a piecewise weight.
    #[error("band partition violation: index n = {n} falls in no band")]
    BandGap { n: i64 },

    /// An operation mode does not support the given input (e.g. symbolic
    /// level sets for a non-basis probe).
    #[error("mode error: {0}")]
    Mode(String),

    /// An estimate came out internally inconsistent (cLo > cHi); carries the
    /// witnesses so the caller can inspect the offending probes.
    #[error("inconsistent estimate: {0}")]
    Inconsistent(String),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
