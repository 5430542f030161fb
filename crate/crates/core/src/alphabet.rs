//! DNA bases, strands, stems, and the reverse-complement transformation.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A DNA base. The discriminant order `A < C < G < T` is used for stem
/// indexing and lexicographic strand comparison throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Base {
    A = 0,
    C = 1,
    G = 2,
    T = 3,
}

impl Base {
    pub const ALL: [Base; 4] = [Base::A, Base::C, Base::G, Base::T];

    /// Watson-Crick complement: A↔T, C↔G. An involution.
    pub fn complement(self) -> Base {
        match self {
            Base::A => Base::T,
            Base::C => Base::G,
            Base::G => Base::C,
            Base::T => Base::A,
        }
    }

    /// Index in `ALL`, equal to the enum discriminant.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Base {
        Base::ALL[i]
    }

    /// Parses one letter, accepting lowercase.
    pub fn from_char(c: char) -> Option<Base> {
        match c.to_ascii_uppercase() {
            'A' => Some(Base::A),
            'C' => Some(Base::C),
            'G' => Some(Base::G),
            'T' => Some(Base::T),
            _ => None,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Base::A => 'A',
            Base::C => 'C',
            Base::G => 'G',
            Base::T => 'T',
        }
    }
}

impl fmt::Display for Base {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Base::A => "A",
            Base::C => "C",
            Base::G => "G",
            Base::T => "T",
        })
    }
}

/// An ordered pair of adjacent bases. There are exactly 16 stems; weight
/// tables and stem distributions are indexed by [`Stem::index`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Stem {
    pub first: Base,
    pub second: Base,
}

impl Stem {
    pub const COUNT: usize = 16;

    pub fn new(first: Base, second: Base) -> Stem {
        Stem { first, second }
    }

    /// `4 * first + second`, ranging over `0..16` in the row-major order
    /// (A,A), (A,C), ..., (T,G), (T,T).
    pub fn index(self) -> usize {
        4 * self.first.index() + self.second.index()
    }

    pub fn from_index(i: usize) -> Stem {
        Stem::new(Base::from_index(i / 4), Base::from_index(i % 4))
    }

    /// All 16 stems in index order.
    pub fn all() -> impl Iterator<Item = Stem> {
        (0..Stem::COUNT).map(Stem::from_index)
    }

    /// The stem this one maps to under reverse complementation of any strand
    /// containing it: `(a,b) -> (complement(b), complement(a))`. An involution.
    pub fn wc_image(self) -> Stem {
        Stem::new(self.second.complement(), self.first.complement())
    }
}

impl fmt::Display for Stem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first, self.second)
    }
}

impl FromStr for Stem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Stem> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != 2 {
            return Err(Error::Parse {
                line: 0,
                message: format!("stem must be exactly two bases, got {s:?}"),
            });
        }
        let parse = |i: usize| {
            Base::from_char(chars[i]).ok_or(Error::InvalidBase {
                found: chars[i],
                position: i + 1,
            })
        };
        Ok(Stem::new(parse(0)?, parse(1)?))
    }
}

/// An oriented DNA sequence of length >= 2 (so that it contains at least one
/// stem). Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Strand {
    bases: Vec<Base>,
}

impl Strand {
    pub fn new(bases: Vec<Base>) -> Result<Strand> {
        if bases.len() < 2 {
            return Err(Error::StrandTooShort {
                length: bases.len(),
            });
        }
        Ok(Strand { bases })
    }

    /// Number of bases (always >= 2).
    pub fn len(&self) -> usize {
        self.bases.len()
    }

    /// Never true; present for completeness of the container interface.
    pub fn is_empty(&self) -> bool {
        self.bases.is_empty()
    }

    pub fn bases(&self) -> &[Base] {
        &self.bases
    }

    /// Reverses the strand and complements every base. An involution.
    pub fn reverse_complement(&self) -> Strand {
        Strand {
            bases: self.bases.iter().rev().map(|b| b.complement()).collect(),
        }
    }

    /// True iff the strand equals its own reverse complement. Impossible at
    /// odd length: the middle base would have to equal its own complement.
    pub fn is_self_reverse_complementary(&self) -> bool {
        let n = self.bases.len();
        (0..n).all(|i| self.bases[i] == self.bases[n - 1 - i].complement())
    }

    /// The `n - 1` adjacent pairs, in order.
    pub fn stems(&self) -> impl Iterator<Item = Stem> + '_ {
        self.bases.windows(2).map(|w| Stem::new(w[0], w[1]))
    }
}

impl FromStr for Strand {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strand> {
        let mut bases = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            bases.push(Base::from_char(c).ok_or(Error::InvalidBase {
                found: c,
                position: i + 1,
            })?);
        }
        Strand::new(bases)
    }
}

impl fmt::Display for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bases {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}
