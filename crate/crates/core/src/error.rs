//! Crate-wide error type.

use crate::alphabet::Stem;

/// Everything that can go wrong across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A strand contained a character outside `{A, C, G, T}` (case-insensitive).
    #[error("invalid base {found:?} at position {position}")]
    InvalidBase { found: char, position: usize },

    /// Strands need at least one stem, i.e. two bases.
    #[error("strand must have at least 2 bases, got {length}")]
    StrandTooShort { length: usize },

    /// Binary strand operations require equal lengths.
    #[error("strand lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Weight tables must be strictly positive.
    #[error("weight for stem {stem} must be strictly positive, got {value}")]
    NonPositiveWeight { stem: Stem, value: f64 },

    /// Weight tables must satisfy w(a,b) = w(complement(b), complement(a)).
    #[error(
        "weights not reverse-complement invariant: w({stem}) = {value} but \
         w({mirror}) = {mirror_value} (relative tolerance 1e-9)"
    )]
    WcInvariance {
        stem: Stem,
        value: f64,
        mirror: Stem,
        mirror_value: f64,
    },

    /// A weight-table scale (the absolute w(A,A) of a relative table) must be positive.
    #[error("table scale must be strictly positive, got {value}")]
    NonPositiveScale { value: f64 },

    /// Malformed weight-grid or code file content.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Unknown builtin weight-table name.
    #[error("unknown builtin table {name:?}; valid names: {valid}")]
    UnknownBuiltin { name: String, valid: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Stem distribution entries must be nonnegative.
    #[error("probability for stem {stem} is negative: {value}")]
    NegativeProbability { stem: Stem, value: f64 },

    /// Stem distribution entries must sum to 1.
    #[error("stem probabilities sum to {sum}, expected 1 (tolerance 1e-12)")]
    NotNormalized { sum: f64 },

    /// Transition-model rows (and the initial distribution) must be stochastic.
    #[error("{which} must sum to 1, got {sum} (tolerance 1e-12)")]
    NotStochastic { which: String, sum: f64 },

    /// Conditional models require equal first/second marginals.
    #[error(
        "marginals differ at base {base}: row sum {row_sum} vs column sum \
         {column_sum} (tolerance 1e-8)"
    )]
    MarginalMismatch {
        base: char,
        row_sum: f64,
        column_sum: f64,
    },

    /// Conditional models are undefined on bases with zero marginal mass.
    #[error("marginal probability of base {base} is zero; conditional model undefined")]
    ZeroMarginal { base: char },

    /// The optimizer failed to reach its residual tolerance. The problem is a
    /// bounded concave QP, so this signals a solver bug, never a model property.
    #[error(
        "optimizer did not converge after {iterations} iterations \
         (residual {residual}, tolerance {tolerance})"
    )]
    NonConvergence {
        iterations: u64,
        residual: f64,
        tolerance: f64,
    },

    /// Rate classification needs a positive relative distance.
    #[error("relative distance must be positive, got {value}")]
    NonPositiveDistance { value: f64 },

    /// The repetition construction exists only for odd lengths.
    #[error("n must be odd (got {n})")]
    EvenRepetitionLength { n: usize },

    /// The repetition construction needs room for at least one full period.
    #[error("repetition construction needs n >= 3, got {n}")]
    RepetitionLengthTooShort { n: usize },

    /// A code operation received a structurally broken code.
    #[error("invalid code: {message}")]
    InvalidCode { message: String },

    /// Operations over all ordered codeword pairs need a nonempty code.
    #[error("code is empty")]
    EmptyCode,

    /// Exhaustive search is gated on the full strand-space size.
    #[error("exhaustive search over 4^{n} strands exceeds the limit {limit}")]
    InstanceTooLarge { n: usize, limit: u64 },

    /// Markov-chain generation requires a model whose support reaches every
    /// ordered base pair within four steps.
    #[error("transition model does not satisfy the reachability condition")]
    ModelNotConnected,

    /// `trials` and friends must be meaningful.
    #[error("{what} must be at least {min}, got {got}")]
    ParameterTooSmall { what: String, min: u64, got: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
