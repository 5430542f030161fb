//! Additive stem similarity and distance kernels between equal-length strands.
//!
//! The similarity of two strands is the total weight of positions where both
//! strands carry the same stem:
//!
//! ```text
//! S_w(x, y) = Σ_{i=1}^{n-1} w(a, b)   where x_i = y_i = a and x_{i+1} = y_{i+1} = b
//! ```
//!
//! The induced distance `D_w(x, y) = S_w(x, x) - S_w(x, y)` is nonnegative but
//! not symmetric: it subtracts from the self-similarity of the *first*
//! argument. Duplex energy models hybridization strength as the similarity of
//! `x` with the reverse complement of `y`; reverse-complement invariance of the
//! weight table makes it symmetric in its two arguments.

use crate::alphabet::Strand;
use crate::error::{Error, Result};
use crate::weights::WeightTable;

fn check_lengths(x: &Strand, y: &Strand) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(())
}

/// Total weight of common positioned stems. Symmetric, maximized by `y = x`.
pub fn stem_similarity(w: &WeightTable, x: &Strand, y: &Strand) -> Result<f64> {
    check_lengths(x, y)?;
    Ok(x.stems()
        .zip(y.stems())
        .filter(|(a, b)| a == b)
        .map(|(a, _)| w.weight(a))
        .sum())
}

/// `S_w(x,x) - S_w(x,y)`: the similarity the first argument loses against the
/// second. Nonnegative; asymmetric whenever the self-similarities differ.
pub fn stem_distance(w: &WeightTable, x: &Strand, y: &Strand) -> Result<f64> {
    check_lengths(x, y)?;
    // term-by-term: position i contributes w(stem) when x carries the stem
    // and y does not match it, so the sum is exactly S(x,x) - S(x,y)
    Ok(x.stems()
        .zip(y.stems())
        .filter(|(a, b)| a != b)
        .map(|(a, _)| w.weight(a))
        .sum())
}

/// Hybridization strength: `S_w(x, reverse_complement(y))`. Symmetric in `x`
/// and `y` for the invariant tables this crate admits.
pub fn duplex_energy(w: &WeightTable, x: &Strand, y: &Strand) -> Result<f64> {
    check_lengths(x, y)?;
    stem_similarity(w, x, &y.reverse_complement())
}
