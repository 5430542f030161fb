//! DNA codes closed under reverse complementation: validity and minimum
//! distance, an explicit repetition construction, random generation from a
//! base-level Markov chain, exhaustive maximum-size search at small lengths,
//! and finite-length rate estimates.
//!
//! A DNA code here is a set of distinct strands of equal length that is
//! *closed*: the reverse complement of every codeword is also a codeword and
//! differs from it. Closure makes cross-hybridization constraints part of
//! the ordinary pairwise distance (the duplex energy `S_w(x, ȳ)` is just
//! the similarity of `x` with the codeword `ȳ`), so a single minimum over
//! ordered pairs controls both same-strand and duplex interactions.

use rand_core::{RngCore, SeedableRng};

use crate::alphabet::{Base, Strand};
use crate::critical::{markov_condition, TransitionModel};
use crate::error::{Error, Result};
use crate::similarity::stem_distance;
use crate::weights::WeightTable;

/// Absolute tolerance when comparing a distance against a threshold `D`:
/// a pair violates the threshold only if its distance is below `D - 1e-9`.
/// Absorbs floating-point noise in sums of two-decimal weights.
pub const DISTANCE_TOLERANCE: f64 = 1e-9;

/// Default cap on `4^n` for [`exhaustive_max_code`] (reached at n = 6).
pub const DEFAULT_SEARCH_LIMIT: u64 = 4096;

/// Internal node budget for the clique search; when exhausted the search
/// returns its incumbent with `exact = false`.
const CLIQUE_NODE_BUDGET: u64 = 20_000_000;

/// A set of distinct DNA strands of equal length, stored sorted.
///
/// The constructor enforces distinctness and equal lengths. Closure under
/// reverse complementation, required of a *valid* code, is verified by
/// [`code_min_distance`] (as an error) and [`is_valid_dna_code`] (as a
/// reported violation), so that incomplete codes can be represented and
/// diagnosed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DnaCode {
    words: Vec<Strand>,
}

impl DnaCode {
    pub fn new(mut words: Vec<Strand>) -> Result<Self> {
        if let Some(first) = words.first() {
            let n = first.len();
            for w in &words {
                if w.len() != n {
                    return Err(Error::InvalidCode {
                        message: format!(
                            "codewords have mixed lengths {n} and {} (word {w})",
                            w.len()
                        ),
                    });
                }
            }
        }
        words.sort();
        for pair in words.windows(2) {
            if pair[0] == pair[1] {
                return Err(Error::InvalidCode {
                    message: format!("duplicate codeword {}", pair[0]),
                });
            }
        }
        Ok(DnaCode { words })
    }

    /// Number of codewords `N`.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Common codeword length `n` (`None` for the empty code).
    pub fn word_length(&self) -> Option<usize> {
        self.words.first().map(Strand::len)
    }

    /// Codewords in lexicographic order.
    pub fn words(&self) -> &[Strand] {
        &self.words
    }

    pub fn contains(&self, word: &Strand) -> bool {
        self.words.binary_search(word).is_ok()
    }

    /// All closure violations: codewords that equal their own reverse
    /// complement, or whose reverse complement is absent.
    pub fn closure_violations(&self) -> Vec<ClosureViolation> {
        let mut out = Vec::new();
        for w in &self.words {
            let partner = w.reverse_complement();
            if partner == *w {
                out.push(ClosureViolation {
                    word: w.clone(),
                    missing_partner: None,
                });
            } else if !self.contains(&partner) {
                out.push(ClosureViolation {
                    word: w.clone(),
                    missing_partner: Some(partner),
                });
            }
        }
        out
    }
}

/// A codeword breaking reverse-complement closure. `missing_partner` is the
/// absent reverse complement, or `None` when the word is its own reverse
/// complement (forbidden regardless of the rest of the code).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureViolation {
    pub word: Strand,
    pub missing_partner: Option<Strand>,
}

impl std::fmt::Display for ClosureViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.missing_partner {
            Some(partner) => write!(
                f,
                "codeword {} lacks its reverse complement {partner}",
                self.word
            ),
            None => write!(
                f,
                "codeword {} is its own reverse complement",
                self.word
            ),
        }
    }
}

/// An ordered codeword pair whose distance falls below the threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct PairViolation {
    pub left: Strand,
    pub right: Strand,
    pub distance: f64,
}

impl std::fmt::Display for PairViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "D({}, {}) = {:.6} below threshold",
            self.left, self.right, self.distance
        )
    }
}

/// Everything wrong with a code at a given distance threshold.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ViolationReport {
    pub closure: Vec<ClosureViolation>,
    pub pairs: Vec<PairViolation>,
}

impl ViolationReport {
    pub fn is_empty(&self) -> bool {
        self.closure.is_empty() && self.pairs.is_empty()
    }
}

/// Length and distance threshold for code construction and search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeParams {
    n: usize,
    distance: f64,
}

impl CodeParams {
    pub fn new(n: usize, distance: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::StrandTooShort { length: n });
        }
        if !distance.is_finite() || distance <= 0.0 {
            return Err(Error::NonPositiveDistance { value: distance });
        }
        Ok(CodeParams { n, distance })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Relative distance `d = D / n`.
    pub fn relative_distance(&self) -> f64 {
        self.distance / self.n as f64
    }
}

/// Minimum of `D_w(x, y)` over ordered pairs of distinct codewords.
///
/// Errors on the empty code and on closure violations (naming the violating
/// codeword): the minimum is only meaningful for complete codes.
pub fn code_min_distance(w: &WeightTable, code: &DnaCode) -> Result<f64> {
    if code.is_empty() {
        return Err(Error::EmptyCode);
    }
    if let Some(violation) = code.closure_violations().into_iter().next() {
        return Err(Error::InvalidCode {
            message: violation.to_string(),
        });
    }
    let mut min = f64::INFINITY;
    for x in code.words() {
        for y in code.words() {
            if x != y {
                min = min.min(stem_distance(w, x, y)?);
            }
        }
    }
    Ok(min)
}

/// Checks a code against distance threshold `d_threshold`: true iff closure
/// holds and every ordered pair of distinct codewords has distance at least
/// `d_threshold` (minus [`DISTANCE_TOLERANCE`]). The report lists every
/// closure violation and every violating ordered pair with its distance.
pub fn is_valid_dna_code(
    w: &WeightTable,
    code: &DnaCode,
    d_threshold: f64,
) -> Result<(bool, ViolationReport)> {
    let mut report = ViolationReport {
        closure: code.closure_violations(),
        pairs: Vec::new(),
    };
    for x in code.words() {
        for y in code.words() {
            if x != y {
                let distance = stem_distance(w, x, y)?;
                if distance < d_threshold - DISTANCE_TOLERANCE {
                    report.pairs.push(PairViolation {
                        left: x.clone(),
                        right: y.clone(),
                        distance,
                    });
                }
            }
        }
    }
    Ok((report.is_empty(), report))
}

/// The 16-word repetition code `X_r` at odd length `n = 2t + 1`: for every
/// ordered base pair `(a₁, a₂)` the word `a₁a₂a₁a₂…a₁` alternating the two
/// bases and ending on `a₁`.
///
/// Two distinct words never share a stem at any position (a shared stem at
/// position `i` would force equal base pairs), so all cross-similarities are
/// exactly zero and the minimum distance equals the smallest self-similarity
/// `t·(w(a₁,a₂) + w(a₂,a₁))`. Odd length makes the construction closed: the
/// reverse complement of the `(a₁, a₂)` word is the `(ā₁, ā₂)` word, never
/// itself.
pub fn construct_repetition_code(n: usize) -> Result<DnaCode> {
    if n.is_multiple_of(2) {
        return Err(Error::EvenRepetitionLength { n });
    }
    if n < 3 {
        return Err(Error::RepetitionLengthTooShort { n });
    }
    let mut words = Vec::with_capacity(16);
    for a1 in Base::ALL {
        for a2 in Base::ALL {
            let bases: Vec<Base> = (0..n).map(|i| if i % 2 == 0 { a1 } else { a2 }).collect();
            words.push(Strand::new(bases)?);
        }
    }
    DnaCode::new(words)
}

/// Draws one strand of length `n` from the chain: first base from the
/// initial distribution, each subsequent base from the transition row of its
/// predecessor. Uses 53-bit uniform variates by cumulative inversion, so the
/// result is a pure function of the generator stream.
pub fn sample_strand<R: RngCore>(
    model: &TransitionModel,
    n: usize,
    rng: &mut R,
) -> Result<Strand> {
    if n < 2 {
        return Err(Error::StrandTooShort { length: n });
    }
    let mut bases = Vec::with_capacity(n);
    let mut current = sample_base(model.initial(), rng);
    bases.push(current);
    for _ in 1..n {
        current = sample_base(&model.transitions()[current.index()], rng);
        bases.push(current);
    }
    Strand::new(bases)
}

fn sample_base<R: RngCore>(distribution: &[f64; 4], rng: &mut R) -> Base {
    let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
    let mut acc = 0.0;
    for (i, &p) in distribution.iter().enumerate() {
        acc += p;
        if u < acc {
            return Base::from_index(i);
        }
    }
    // u landed in the rounding sliver above the accumulated sum: take the
    // last base that actually has positive probability
    let last = distribution.iter().rposition(|&p| p > 0.0).unwrap_or(3);
    Base::from_index(last)
}

/// Randomly grows a code by sampling `trials` strands from the chain and
/// greedily accepting, in sample order, each pair (sample, reverse
/// complement) that keeps every ordered distance at or above
/// `params.distance()` (within [`DISTANCE_TOLERANCE`]).
///
/// Samples equal to their own reverse complement, samples already present,
/// and samples breaking the distance threshold are discarded. The result is
/// closed by construction, possibly empty, and a pure function of the seed.
///
/// Requires a chain satisfying [`markov_condition`] (the regime in which
/// random codes achieve positive rates) and at least one trial.
pub fn generate_markov_code(
    w: &WeightTable,
    model: &TransitionModel,
    params: CodeParams,
    trials: u64,
    seed: u64,
) -> Result<DnaCode> {
    if !markov_condition(model) {
        return Err(Error::ModelNotConnected);
    }
    if trials < 1 {
        return Err(Error::ParameterTooSmall {
            what: "trials".to_string(),
            min: 1,
            got: trials,
        });
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let threshold = params.distance() - DISTANCE_TOLERANCE;
    let mut accepted: Vec<Strand> = Vec::new();
    for _ in 0..trials {
        let x = sample_strand(model, params.n(), &mut rng)?;
        let xbar = x.reverse_complement();
        if xbar == x || accepted.contains(&x) || accepted.contains(&xbar) {
            continue;
        }
        let mut ok = stem_distance(w, &x, &xbar)? >= threshold
            && stem_distance(w, &xbar, &x)? >= threshold;
        for y in &accepted {
            if !ok {
                break;
            }
            ok = stem_distance(w, &x, y)? >= threshold
                && stem_distance(w, y, &x)? >= threshold
                && stem_distance(w, &xbar, y)? >= threshold
                && stem_distance(w, y, &xbar)? >= threshold;
        }
        if ok {
            accepted.push(x);
            accepted.push(xbar);
        }
    }
    DnaCode::new(accepted)
}

/// Exhaustive maximum-size code search at small `n`.
///
/// Vertices are the unordered pairs `{x, x̄}` with `x ≠ x̄` whose two
/// internal ordered distances meet the threshold; two vertices are adjacent
/// when all four ordered cross-distances between their strands do (the
/// remaining four of the eight ordered pairs coincide with these by the
/// reverse-complement identity `D_w(ȳ, x̄) = D_w(y, x)`). A maximum clique,
/// found by branch and bound with a greedy-coloring upper bound, is then
/// exactly a maximum code, of size twice the clique.
///
/// Returns the code and an exactness flag: `true` when the search ran to
/// completion, `false` when it hit the internal node budget and the result
/// is only a lower bound. Refuses instances with `4^n > limit`.
pub fn exhaustive_max_code(
    w: &WeightTable,
    params: CodeParams,
    limit: u64,
) -> Result<(DnaCode, bool)> {
    let n = params.n();
    let space = 4u64.checked_pow(n.min(32) as u32).unwrap_or(u64::MAX);
    if n > 31 || space > limit {
        return Err(Error::InstanceTooLarge { n, limit });
    }
    let threshold = params.distance() - DISTANCE_TOLERANCE;

    // vertices: canonical (lexicographically smaller) strand of each
    // admissible pair, enumerated in lexicographic order
    let mut vertices: Vec<(Strand, Strand)> = Vec::new();
    for index in 0..space {
        let bases: Vec<Base> = (0..n)
            .rev()
            .map(|shift| Base::from_index(((index >> (2 * shift)) & 3) as usize))
            .collect();
        let x = Strand::new(bases)?;
        let xbar = x.reverse_complement();
        if x >= xbar {
            continue; // self-RC, or already seen under the canonical order
        }
        if stem_distance(w, &x, &xbar)? >= threshold && stem_distance(w, &xbar, &x)? >= threshold {
            vertices.push((x, xbar));
        }
    }

    let count = vertices.len();
    let mut adjacency = vec![vec![false; count]; count];
    for i in 0..count {
        for j in (i + 1)..count {
            let (x, _) = &vertices[i];
            let (y, ybar) = &vertices[j];
            let compatible = stem_distance(w, x, y)? >= threshold
                && stem_distance(w, y, x)? >= threshold
                && stem_distance(w, x, ybar)? >= threshold
                && stem_distance(w, ybar, x)? >= threshold;
            adjacency[i][j] = compatible;
            adjacency[j][i] = compatible;
        }
    }

    // search order: degree descending, ties by canonical strand
    let mut order: Vec<usize> = (0..count).collect();
    let degree: Vec<usize> = adjacency
        .iter()
        .map(|row| row.iter().filter(|&&a| a).count())
        .collect();
    order.sort_by(|&a, &b| degree[b].cmp(&degree[a]).then(vertices[a].0.cmp(&vertices[b].0)));

    let mut search = CliqueSearch {
        adjacency: &adjacency,
        best: Vec::new(),
        nodes: 0,
        exhausted: false,
    };
    search.expand(&mut Vec::new(), order);

    let mut words = Vec::with_capacity(2 * search.best.len());
    for &v in &search.best {
        words.push(vertices[v].0.clone());
        words.push(vertices[v].1.clone());
    }
    Ok((DnaCode::new(words)?, !search.exhausted))
}

struct CliqueSearch<'a> {
    adjacency: &'a [Vec<bool>],
    best: Vec<usize>,
    nodes: u64,
    exhausted: bool,
}

impl CliqueSearch<'_> {
    /// Branch and bound in the style of the classic max-clique algorithms:
    /// candidates are greedily colored, processed in descending color, and a
    /// branch is cut when |current| + color can no longer beat the incumbent.
    fn expand(&mut self, current: &mut Vec<usize>, candidates: Vec<usize>) {
        self.nodes += 1;
        if self.nodes > CLIQUE_NODE_BUDGET {
            self.exhausted = true;
            return;
        }
        if candidates.is_empty() {
            if current.len() > self.best.len() {
                self.best = current.clone();
            }
            return;
        }
        // greedy coloring: color classes are pairwise non-adjacent, so a
        // clique inside `candidates` uses each color at most once
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in &candidates {
            match classes
                .iter_mut()
                .find(|class| class.iter().all(|&u| !self.adjacency[v][u]))
            {
                Some(class) => class.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut ordered: Vec<(usize, usize)> = Vec::with_capacity(candidates.len());
        for (color, class) in classes.iter().enumerate() {
            for &v in class {
                ordered.push((v, color + 1));
            }
        }
        for i in (0..ordered.len()).rev() {
            let (v, color) = ordered[i];
            if current.len() + color <= self.best.len() {
                return;
            }
            current.push(v);
            let next: Vec<usize> = ordered[..i]
                .iter()
                .map(|&(u, _)| u)
                .filter(|&u| self.adjacency[v][u])
                .collect();
            self.expand(current, next);
            current.pop();
            if self.exhausted {
                return;
            }
        }
    }
}

/// Finite-length rate `log₄(N) / n` of a code with `N` words of length `n`.
/// Meaningful for `N ≥ 1` and `n ≥ 2` (a single-word code has rate 0).
pub fn rate_estimate(code_size: usize, n: usize) -> f64 {
    (code_size as f64).log2() / (2.0 * n as f64)
}

/// Parses a code from text: one strand per line, text after `#` ignored,
/// blank lines skipped. Errors carry 1-based line numbers.
pub fn parse_code_text(text: &str) -> Result<DnaCode> {
    let mut words = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let strand: Strand = line.parse().map_err(|e: Error| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        words.push(strand);
    }
    DnaCode::new(words)
}

/// Reads a code file in the [`parse_code_text`] format.
pub fn load_code_file(path: &std::path::Path) -> Result<DnaCode> {
    parse_code_text(&std::fs::read_to_string(path)?)
}
