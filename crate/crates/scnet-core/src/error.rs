//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by this crate.
///
/// File-format problems are split into distinct variants (bad magic, version,
/// truncation, corruption) so callers can tell a wrong file apart from a
/// damaged one.
#[derive(Debug, Error)]
pub enum Error {
    /// Array or run configuration violates an invariant.
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A scenario violates its invariants (e.g. empty ray list).
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    /// Distribution parameters out of range (e.g. P = 0, negative spread).
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Vector or matrix dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Network layer sizes are unusable (too few, zero-sized, or unfair).
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    /// A dataset split would leave one side empty.
    #[error("invalid split: {0}")]
    InvalidSplit(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// File does not start with the expected magic bytes.
    #[error("bad magic: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },

    /// File format version not supported by this build.
    #[error("unsupported format version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },

    /// File ends before the header-declared payload.
    #[error("truncated file: {0}")]
    Truncated(String),

    /// Payload decodes but violates invariants (e.g. non-finite values).
    #[error("corrupt file: {0}")]
    Corrupt(String),

    /// Training produced a non-finite loss.
    #[error("training diverged at epoch {epoch}: loss is not finite")]
    TrainingDiverged { epoch: usize },
}
