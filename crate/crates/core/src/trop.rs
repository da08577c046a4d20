//! Min-plus projective geometry: points of tropical projective space,
//! tropical line segments, segment membership and the Barvinok rank
//! at-most-two decision.
//!
//! Tropical addition is `min` and tropical multiplication is `+`. A point of
//! projective space is a coordinate vector modulo adding a constant to every
//! coordinate; the canonical representative has first coordinate zero.
//! All arithmetic is exact.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Parses `"-3"`, `"5/2"` or `" 7 "` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty entry".into()));
    }
    Rational::from_str(t).map_err(|_| Error::Parse(format!("not a rational: {t:?}")))
}

/// A point of tropical projective space, stored as a coordinate vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TropPoint {
    coords: Vec<Rational>,
}

impl TropPoint {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Domain("a tropical point needs at least one coordinate".into()));
        }
        Ok(TropPoint { coords })
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        TropPoint::new(coords.iter().map(|&c| Rational::from_integer(c.into())).collect())
            .expect("nonempty coordinates")
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_canonical(&self) -> bool {
        self.coords[0].is_zero()
    }

    /// Subtracts the first coordinate from every coordinate.
    pub fn normalize(&self) -> TropPoint {
        let c0 = self.coords[0].clone();
        TropPoint { coords: self.coords.iter().map(|c| c - &c0).collect() }
    }

    /// `lambda ⊙ self`, i.e. `lambda` added to every coordinate.
    pub fn scale(&self, lambda: &Rational) -> TropPoint {
        TropPoint { coords: self.coords.iter().map(|c| c + lambda).collect() }
    }

    /// Coordinatewise minimum (tropical sum).
    pub fn oplus(&self, other: &TropPoint) -> TropPoint {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        TropPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| if a <= b { a.clone() } else { b.clone() })
                .collect(),
        }
    }
}

impl fmt::Display for TropPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Free function form of [`TropPoint::normalize`].
pub fn normalize_point(p: &TropPoint) -> TropPoint {
    p.normalize()
}

/// The pseudovertex path of a tropical line segment, from `x` to `y`.
///
/// `breakparams[k]` is the sweep parameter at which `pseudovertices[k]` is
/// reached under `lambda -> canonical(min(lambda + x, y))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropSegment {
    pub pseudovertices: Vec<TropPoint>,
    pub breakparams: Vec<Rational>,
}

impl TropSegment {
    /// Point of the segment at sweep parameter `lambda`, canonicalized.
    pub fn point_at(x: &TropPoint, y: &TropPoint, lambda: &Rational) -> TropPoint {
        x.scale(lambda).oplus(y).normalize()
    }

    /// Sweep parameter of a point known to lie on the segment between `x`
    /// and `y`, clamped to the parameter range of the segment.
    pub fn param_of(x: &TropPoint, y: &TropPoint, z: &TropPoint) -> Rational {
        let lam = max_diff(z, x);
        let mu = max_diff(z, y);
        let raw = lam - mu;
        let diffs = differences(x, y);
        let lo = diffs.first().cloned().expect("nonempty");
        let hi = diffs.last().cloned().expect("nonempty");
        if raw < lo {
            lo
        } else if raw > hi {
            hi
        } else {
            raw
        }
    }
}

/// Sorted distinct values of `y_i - x_i`.
fn differences(x: &TropPoint, y: &TropPoint) -> Vec<Rational> {
    let mut diffs: Vec<Rational> = x.coords.iter().zip(&y.coords).map(|(a, b)| b - a).collect();
    diffs.sort();
    diffs.dedup();
    diffs
}

/// `max_i (z_i - x_i)`: the largest scalar keeping `lambda ⊙ x >= z`.
fn max_diff(z: &TropPoint, x: &TropPoint) -> Rational {
    z.coords
        .iter()
        .zip(&x.coords)
        .map(|(a, b)| a - b)
        .max()
        .expect("nonempty")
}

/// The tropical line segment between two canonical points.
pub fn trop_segment(x: &TropPoint, y: &TropPoint) -> TropSegment {
    assert_eq!(x.dim(), y.dim(), "dimension mismatch");
    let mut pseudovertices: Vec<TropPoint> = Vec::new();
    let mut breakparams = Vec::new();
    for lam in differences(x, y) {
        let z = TropSegment::point_at(x, y, &lam);
        if pseudovertices.last() != Some(&z) {
            pseudovertices.push(z);
            breakparams.push(lam);
        }
    }
    TropSegment { pseudovertices, breakparams }
}

/// Whether `z` lies in the tropical convex hull of `x` and `y`.
///
/// Decided by residuation: with `lambda* = max(z - x)` and
/// `mu* = max(z - y)`, membership holds iff `min(lambda* + x, mu* + y) = z`.
/// Inputs need not be canonical; the test is projectively invariant.
pub fn segment_contains(x: &TropPoint, y: &TropPoint, z: &TropPoint) -> bool {
    assert!(x.dim() == y.dim() && y.dim() == z.dim(), "dimension mismatch");
    let lam = max_diff(z, x);
    let mu = max_diff(z, y);
    x.scale(&lam).oplus(&y.scale(&mu)) == *z
}

/// A dense `rows x cols` matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::Domain("matrix has no rows".into()));
        }
        let c = rows[0].len();
        if c == 0 {
            return Err(Error::Domain("matrix has no columns".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Parse("ragged matrix rows".into()));
        }
        Ok(RationalMatrix { rows: r, cols: c, entries: rows.into_iter().flatten().collect() })
    }

    pub fn from_ints(rows: &[&[i64]]) -> Result<Self> {
        RationalMatrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(BigInt::from(v))).collect())
                .collect(),
        )
    }

    /// Builds a matrix whose columns are the given points.
    pub fn from_columns(cols: &[TropPoint]) -> Result<Self> {
        let Some(first) = cols.first() else {
            return Err(Error::Domain("matrix has no columns".into()));
        };
        let d = first.dim();
        if cols.iter().any(|c| c.dim() != d) {
            return Err(Error::Domain("columns of different length".into()));
        }
        RationalMatrix::new(
            (0..d).map(|i| cols.iter().map(|c| c.coords[i].clone()).collect()).collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> TropPoint {
        TropPoint { coords: (0..self.rows).map(|i| self.get(i, j).clone()).collect() }
    }

    pub fn columns(&self) -> Vec<TropPoint> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn map(&self, f: impl Fn(usize, usize, &Rational) -> Rational) -> RationalMatrix {
        let mut entries = Vec::with_capacity(self.entries.len());
        for i in 0..self.rows {
            for j in 0..self.cols {
                entries.push(f(i, j, self.get(i, j)));
            }
        }
        RationalMatrix { rows: self.rows, cols: self.cols, entries }
    }

    /// Parses the CSV matrix format: one matrix row per line, entries such
    /// as `-3` or `5/2`, no header.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .flexible(true)
            .from_reader(text.as_bytes());
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.iter().all(|f| f.is_empty()) {
                continue;
            }
            rows.push(record.iter().map(parse_rational).collect::<Result<Vec<_>>>()?);
        }
        if rows.is_empty() {
            return Err(Error::Parse("no matrix rows".into()));
        }
        RationalMatrix::new(rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let line: Vec<String> = self.row(i).iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// A generating pair of columns, stored with zero-based indices.
/// `Display` prints the one-based pair, e.g. `(3,5)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorPair {
    pub first: usize,
    pub second: usize,
}

impl GeneratorPair {
    pub fn one_based(&self) -> (usize, usize) {
        (self.first + 1, self.second + 1)
    }
}

impl fmt::Display for GeneratorPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.one_based();
        write!(f, "({a},{b})")
    }
}

/// Finds the lexicographically least pair of columns `i < j` whose tropical
/// segment contains every column, or `(0,0)` for a single-column matrix.
/// `None` means the Barvinok rank exceeds two.
pub fn barvinok_rank_le2(m: &RationalMatrix) -> Option<GeneratorPair> {
    let cols: Vec<TropPoint> = m.columns().iter().map(TropPoint::normalize).collect();
    let n = cols.len();
    if n == 1 {
        return Some(GeneratorPair { first: 0, second: 0 });
    }
    for i in 0..n {
        for j in i + 1..n {
            if cols.iter().all(|z| segment_contains(&cols[i], &cols[j], z)) {
                return Some(GeneratorPair { first: i, second: j });
            }
        }
    }
    None
}

/// Canonical form of the coordinatewise minimum of the columns.
pub fn column_min_point(m: &RationalMatrix) -> TropPoint {
    m.columns()
        .iter()
        .map(TropPoint::normalize)
        .reduce(|a, b| a.oplus(&b))
        .expect("at least one column")
        .normalize()
}
