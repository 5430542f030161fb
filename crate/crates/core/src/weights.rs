//! Stem weight tables: validation, relative form, builtin data sets, file I/O.
//!
//! A weight table assigns a strictly positive weight `w(a,b)` to each of the
//! 16 stems. Every table must be invariant under reverse complementation,
//! `w(a,b) = w(complement(b), complement(a))`, which is what makes similarity
//! well behaved under strand orientation (see the identities tested in
//! [`crate::similarity`]).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::alphabet::{Base, Stem};
use crate::error::{Error, Result};

/// Relative tolerance of the invariance check at construction. The builtin
/// data are exact two-decimal values, so any violation beyond rounding noise
/// signals a data-entry error rather than numerics.
const WC_TOLERANCE: f64 = 1e-9;

/// A validated stem weight function.
///
/// `scale` records the absolute value of w(A,A) when the entries are stored
/// in relative form (entries divided by w(A,A)); it is 1 for tables stored
/// with absolute entries. Absolute energies are `scale * entry` either way.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightTable {
    name: String,
    scale: f64,
    w: [f64; Stem::COUNT],
}

impl WeightTable {
    /// Validates positivity and reverse-complement invariance (relative
    /// tolerance 1e-9) and wraps the entries. Entries are indexed by
    /// [`Stem::index`].
    pub fn new(name: impl Into<String>, scale: f64, entries: [f64; Stem::COUNT]) -> Result<Self> {
        if !scale.is_finite() || scale <= 0.0 {
            return Err(Error::NonPositiveScale { value: scale });
        }
        for stem in Stem::all() {
            let value = entries[stem.index()];
            if !value.is_finite() || value <= 0.0 {
                return Err(Error::NonPositiveWeight { stem, value });
            }
        }
        for stem in Stem::all() {
            let mirror = stem.wc_image();
            let value = entries[stem.index()];
            let mirror_value = entries[mirror.index()];
            if (value - mirror_value).abs() > WC_TOLERANCE * value.abs().max(1.0) {
                return Err(Error::WcInvariance {
                    stem,
                    value,
                    mirror,
                    mirror_value,
                });
            }
        }
        Ok(WeightTable {
            name: name.into(),
            scale,
            w: entries,
        })
    }

    /// Builds a table from a 4x4 grid in row-major base order A, C, G, T
    /// (rows = first base, columns = second base).
    pub fn from_grid(name: impl Into<String>, scale: f64, grid: [[f64; 4]; 4]) -> Result<Self> {
        let mut entries = [0.0; Stem::COUNT];
        for (a, row) in grid.iter().enumerate() {
            for (b, &value) in row.iter().enumerate() {
                entries[4 * a + b] = value;
            }
        }
        WeightTable::new(name, scale, entries)
    }

    /// The constant table w ≡ `value` (trivially invariant). Useful as the
    /// unweighted stem-count model: similarity then counts common stems.
    pub fn constant(value: f64) -> Result<Self> {
        WeightTable::new("constant", 1.0, [value; Stem::COUNT])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Absolute value of w(A,A) for tables stored in relative form, else 1.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn weight(&self, stem: Stem) -> f64 {
        self.w[stem.index()]
    }

    /// All 16 entries in [`Stem::index`] order.
    pub fn entries(&self) -> &[f64; Stem::COUNT] {
        &self.w
    }

    /// Minimum entry (the quantity bounding repetition-code distances from
    /// below).
    pub fn min_weight(&self) -> f64 {
        self.w.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Maximum entry (sets the gradient Lipschitz constant of the critical
    /// objective, hence the optimizer step size).
    pub fn max_weight(&self) -> f64 {
        self.w.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Rescales so that w(A,A) = 1, folding the old w(A,A) into `scale`.
    /// Idempotent; keeps absolute energies `scale * entry` unchanged.
    pub fn relative(&self) -> WeightTable {
        let waa = self.w[Stem::new(Base::A, Base::A).index()];
        let mut entries = self.w;
        for e in entries.iter_mut() {
            *e /= waa;
        }
        WeightTable {
            name: self.name.clone(),
            scale: self.scale * waa,
            w: entries,
        }
    }
}

/// The eight embedded weight data sets. Entries for all but `Unified1998`
/// are stored in relative form (w(A,A) = 1) with the published scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinTableId {
    Unified1998,
    Gotoh1981,
    Vologodskii1984,
    Blake1991,
    Benight1992,
    SantaLucia1996,
    Sugimoto1996,
    Breslauer1986,
}

/// (id, name, scale, grid rows A/C/G/T by columns A/C/G/T)
const BUILTIN_TABLES: [(BuiltinTableId, &str, f64, [[f64; 4]; 4]); 8] = [
    (
        BuiltinTableId::Unified1998,
        "Unified1998",
        1.0,
        [
            [1.00, 1.44, 1.28, 0.88],
            [1.45, 1.84, 2.17, 1.28],
            [1.30, 2.24, 1.84, 1.44],
            [0.58, 1.30, 1.45, 1.00],
        ],
    ),
    (
        BuiltinTableId::Gotoh1981,
        "Gotoh1981",
        0.43,
        [
            [1.00, 2.28, 1.93, 0.63],
            [2.32, 2.84, 3.95, 1.93],
            [2.16, 3.81, 2.84, 2.28],
            [0.51, 2.16, 2.32, 1.00],
        ],
    ),
    (
        BuiltinTableId::Vologodskii1984,
        "Vologodskii1984",
        0.89,
        [
            [1.00, 1.35, 1.52, 0.91],
            [1.54, 1.84, 2.24, 1.52],
            [1.40, 2.20, 1.84, 1.35],
            [0.85, 1.40, 1.54, 1.00],
        ],
    ),
    (
        BuiltinTableId::Blake1991,
        "Blake1991",
        0.67,
        [
            [1.00, 1.69, 1.75, 0.93],
            [1.78, 2.31, 2.79, 1.75],
            [1.67, 2.76, 2.31, 1.69],
            [1.04, 1.67, 1.78, 1.00],
        ],
    ),
    (
        BuiltinTableId::Benight1992,
        "Benight1992",
        0.93,
        [
            [1.00, 1.63, 1.11, 0.89],
            [1.35, 1.80, 1.77, 1.11],
            [1.68, 2.62, 1.80, 1.63],
            [0.75, 1.68, 1.35, 1.00],
        ],
    ),
    (
        BuiltinTableId::SantaLucia1996,
        "SantaLucia1996",
        1.02,
        [
            [1.00, 1.40, 1.14, 0.72],
            [1.35, 1.74, 2.05, 1.14],
            [1.43, 2.24, 1.74, 1.40],
            [0.59, 1.43, 1.35, 1.00],
        ],
    ),
    (
        BuiltinTableId::Sugimoto1996,
        "Sugimoto1996",
        1.20,
        [
            [1.00, 1.25, 1.25, 0.75],
            [1.42, 1.75, 2.33, 1.25],
            [1.25, 1.92, 1.75, 1.25],
            [0.75, 1.25, 1.42, 1.00],
        ],
    ),
    (
        BuiltinTableId::Breslauer1986,
        "Breslauer1986",
        1.66,
        [
            [1.00, 0.68, 0.81, 0.72],
            [1.08, 1.66, 1.98, 0.81],
            [0.85, 1.70, 1.66, 0.68],
            [0.46, 0.85, 1.08, 1.00],
        ],
    ),
];

impl BuiltinTableId {
    pub const ALL: [BuiltinTableId; 8] = [
        BuiltinTableId::Unified1998,
        BuiltinTableId::Gotoh1981,
        BuiltinTableId::Vologodskii1984,
        BuiltinTableId::Blake1991,
        BuiltinTableId::Benight1992,
        BuiltinTableId::SantaLucia1996,
        BuiltinTableId::Sugimoto1996,
        BuiltinTableId::Breslauer1986,
    ];

    pub fn name(self) -> &'static str {
        BUILTIN_TABLES
            .iter()
            .find(|(id, ..)| *id == self)
            .map(|(_, name, ..)| *name)
            .expect("every id has a data row")
    }
}

impl fmt::Display for BuiltinTableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BuiltinTableId {
    type Err = Error;

    /// Case-insensitive lookup by name.
    fn from_str(s: &str) -> Result<BuiltinTableId> {
        BUILTIN_TABLES
            .iter()
            .find(|(_, name, ..)| name.eq_ignore_ascii_case(s))
            .map(|(id, ..)| *id)
            .ok_or_else(|| Error::UnknownBuiltin {
                name: s.to_string(),
                valid: BuiltinTableId::ALL.map(|id| id.name()).join(", "),
            })
    }
}

/// Returns the builtin table for `id`, exactly as published.
pub fn load_builtin(id: BuiltinTableId) -> WeightTable {
    let (_, name, scale, grid) = BUILTIN_TABLES
        .iter()
        .find(|(row_id, ..)| *row_id == id)
        .expect("every id has a data row");
    WeightTable::from_grid(*name, *scale, *grid).expect("builtin tables are valid")
}

/// Loads a weight table from a text file.
///
/// Format: an optional first line `scale <value>` (declares the absolute
/// w(A,A) of a relative table), followed by 4 rows of 4 numbers each,
/// whitespace- or comma-separated, in base order A, C, G, T (rows = first
/// base, columns = second base). Blank lines are ignored. The table is
/// validated like any other (positivity, invariance).
pub fn load_table_file(path: &Path) -> Result<WeightTable> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "table".to_string());
    parse_table(&text, name)
}

/// Parses the grid format of [`load_table_file`] from a string.
pub fn parse_table(text: &str, name: impl Into<String>) -> Result<WeightTable> {
    let mut scale = 1.0;
    let mut grid = [[0.0; 4]; 4];
    let mut rows_seen = 0;
    for (line_index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let lineno = line_index + 1;
        if let Some(rest) = line.strip_prefix("scale") {
            if rows_seen > 0 {
                return Err(Error::Parse {
                    line: lineno,
                    message: "scale line must precede the grid rows".to_string(),
                });
            }
            scale = rest.trim().parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("malformed scale value {:?}", rest.trim()),
            })?;
            continue;
        }
        if rows_seen == 4 {
            return Err(Error::Parse {
                line: lineno,
                message: "more than 4 grid rows".to_string(),
            });
        }
        let fields: Vec<&str> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 4 numbers in grid row, got {}", fields.len()),
            });
        }
        for (b, field) in fields.iter().enumerate() {
            grid[rows_seen][b] = field.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!(
                    "malformed number {:?} in cell ({},{})",
                    field,
                    Base::from_index(rows_seen),
                    Base::from_index(b)
                ),
            })?;
        }
        rows_seen += 1;
    }
    if rows_seen != 4 {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: format!("expected 4 grid rows, got {rows_seen}"),
        });
    }
    WeightTable::from_grid(name, scale, grid)
}
