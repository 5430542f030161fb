//! Additive stem similarity, critical distance, and DNA code construction
//! over the `{A, C, G, T}` alphabet.
//!
//! The model scores how strongly two DNA strands (or a strand and the
//! reverse complement of another, a duplex) are bound by counting *stems*:
//! ordered pairs of adjacent bases. Each stem carries a positive weight from
//! a thermodynamic table, and the similarity of two strands of equal length
//! is the total weight of positions at which they carry the same stem. The
//! induced distance `D_w(x, y) = S_w(x, x) - S_w(x, y)` measures how much
//! binding strength `x` loses when paired against `y` instead of itself.
//!
//! On top of the kernels the crate provides:
//!
//! - [`weights`]: validated stem-weight tables (eight published
//!   nearest-neighbor data sets plus file loading), all invariant under
//!   reverse complementation of the stem;
//! - [`similarity`]: the similarity/distance/duplex-energy kernels;
//! - [`critical`]: the critical relative distance `T_w`, computed by exact
//!   projected-gradient maximization of a concave quadratic over stem
//!   distributions with equal base marginals, plus the Markov reachability
//!   test that separates *regular* from non-regular weight tables and the
//!   resulting zero-rate/positive-rate classification;
//! - [`codes`]: DNA codes closed under reverse complementation: validity
//!   checking, minimum-distance computation, an explicit 16-word repetition
//!   construction, random generation from a base-level Markov chain, and
//!   exhaustive maximum-size search at small lengths.
//!
//! All floating-point behavior is deterministic: fixed iteration orders,
//! fixed seeds for randomized construction, and explicit tolerances.

pub mod alphabet;
pub mod codes;
pub mod critical;
pub mod error;
pub mod similarity;
pub mod weights;

pub use alphabet::{Base, Stem, Strand};
pub use codes::{
    code_min_distance, construct_repetition_code, exhaustive_max_code, generate_markov_code,
    is_valid_dna_code, load_code_file, parse_code_text, rate_estimate, sample_strand, CodeParams,
    DnaCode,
};
pub use critical::{
    classify_rate, conditional_model, markov_condition, maximize_critical, objective,
    CriticalReport, RateRegime, StemDistribution, TransitionModel,
};
pub use error::{Error, Result};
pub use similarity::{duplex_energy, stem_distance, stem_similarity};
pub use weights::{load_builtin, load_table_file, BuiltinTableId, WeightTable};
