//! Sparse integer matrices in column-major form.
//!
//! Entries are `i64`; products use checked arithmetic and panic on
//! overflow. Smith normal form escalates to arbitrary precision internally
//! (see [`crate::smith`]), so elimination never overflows silently.

use std::fmt::Write as _;

use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    // per column: (row, value), ascending row, no zeros
    data: Vec<Vec<(usize, i64)>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        IntMatrix { rows: n, cols: n, data: (0..n).map(|i| vec![(i, 1)]).collect() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut m = IntMatrix::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                if v != 0 {
                    m.data[j].push((i, v));
                }
            }
        }
        m
    }

    /// Builds from `(row, col, value)` triplets; repeated positions add up.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, i64)]) -> Result<Self> {
        let mut m = IntMatrix::zeros(rows, cols);
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::Parse(format!("triplet ({i},{j}) outside {rows}x{cols}")));
            }
            m.data[j].push((i, v));
        }
        for col in &mut m.data {
            *col = normalize_column(std::mem::take(col));
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.data[j]
    }

    /// Replaces column `j`; entries may be unsorted and repeated.
    pub fn set_column(&mut self, j: usize, entries: Vec<(usize, i64)>) {
        assert!(entries.iter().all(|&(i, _)| i < self.rows), "row index out of range");
        self.data[j] = normalize_column(entries);
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        match self.data[j].binary_search_by_key(&i, |&(r, _)| r) {
            Ok(k) => self.data[j][k].1,
            Err(_) => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Vec::is_empty)
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |&(i, v)| (i, j, v)))
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut out = vec![vec![0; self.cols]; self.rows];
        for (i, j, v) in self.triplets() {
            out[i][j] = v;
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for (i, j, v) in self.triplets() {
            t.data[i].push((j, v));
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        let mut acc: Vec<i64> = vec![0; self.rows];
        let mut touched: Vec<usize> = Vec::new();
        for (j, col) in other.data.iter().enumerate() {
            for &(k, b) in col {
                for &(i, a) in &self.data[k] {
                    if acc[i] == 0 {
                        touched.push(i);
                    }
                    acc[i] = acc[i]
                        .checked_add(a.checked_mul(b).expect("overflow in matrix product"))
                        .expect("overflow in matrix product");
                }
            }
            touched.sort_unstable();
            touched.dedup();
            let mut entries = Vec::with_capacity(touched.len());
            for &i in &touched {
                if acc[i] != 0 {
                    entries.push((i, acc[i]));
                }
                acc[i] = 0;
            }
            touched.clear();
            out.data[j] = entries;
        }
        out
    }

    pub fn add(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.shape(), other.shape(), "shape mismatch in sum");
        let mut out = self.clone();
        for (j, col) in other.data.iter().enumerate() {
            let mut merged = out.data[j].clone();
            merged.extend_from_slice(col);
            out.data[j] = normalize_column(merged);
        }
        out
    }

    pub fn scale(&self, c: i64) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        if c != 0 {
            for (j, col) in self.data.iter().enumerate() {
                out.data[j] = col
                    .iter()
                    .map(|&(i, v)| (i, v.checked_mul(c).expect("overflow in scaling")))
                    .collect();
            }
        }
        out
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(-1)
    }

    /// Applies the matrix to a sparse vector.
    pub fn apply(&self, v: &[(usize, i64)]) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for &(k, b) in v {
            for &(i, a) in &self.data[k] {
                out.push((i, a.checked_mul(b).expect("overflow in matrix-vector product")));
            }
        }
        normalize_column(out)
    }

    /// Sub-matrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> IntMatrix {
        let mut pos = vec![usize::MAX; self.rows];
        for (new, &old) in rows.iter().enumerate() {
            pos[old] = new;
        }
        let mut out = IntMatrix::zeros(rows.len(), cols.len());
        for (new_j, &j) in cols.iter().enumerate() {
            out.data[new_j] = self.data[j]
                .iter()
                .filter(|&&(i, _)| pos[i] != usize::MAX)
                .map(|&(i, v)| (pos[i], v))
                .collect();
            out.data[new_j].sort_unstable_by_key(|&(i, _)| i);
        }
        out
    }

    /// Block matrix `[[a, b], [c, d]]`.
    pub fn block2(a: &IntMatrix, b: &IntMatrix, c: &IntMatrix, d: &IntMatrix) -> IntMatrix {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let mut out = IntMatrix::zeros(a.rows + c.rows, a.cols + b.cols);
        for (i, j, v) in a.triplets() {
            out.data[j].push((i, v));
        }
        for (i, j, v) in c.triplets() {
            out.data[j].push((a.rows + i, v));
        }
        for (i, j, v) in b.triplets() {
            out.data[a.cols + j].push((i, v));
        }
        for (i, j, v) in d.triplets() {
            out.data[a.cols + j].push((a.rows + i, v));
        }
        for col in &mut out.data {
            col.sort_unstable_by_key(|&(i, _)| i);
        }
        out
    }

    /// Kronecker product `self ⊗ other`: row `(i, k)` maps to
    /// `i * other.rows + k`, column likewise.
    pub fn kron(&self, other: &IntMatrix) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for (j, col) in self.data.iter().enumerate() {
            for (l, ocol) in other.data.iter().enumerate() {
                let mut entries = Vec::with_capacity(col.len() * ocol.len());
                for &(i, a) in col {
                    for &(k, b) in ocol {
                        entries.push((i * other.rows + k, a.checked_mul(b).expect("overflow in kron")));
                    }
                }
                out.data[j * other.cols + l] = entries;
            }
        }
        out
    }

    /// Sparse triplet CSV: header `row,col,value`, then one line per
    /// nonzero entry, column-major order. Shape is not recorded.
    pub fn to_triplet_csv(&self) -> String {
        let mut out = String::from("row,col,value\n");
        for (i, j, v) in self.triplets() {
            writeln!(out, "{i},{j},{v}").expect("string write");
        }
        out
    }

    pub fn from_triplet_csv(rows: usize, cols: usize, text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let mut triplets = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| Error::Parse(e.to_string()))?;
            if record.len() != 3 {
                return Err(Error::Parse(format!("expected 3 fields, got {}", record.len())));
            }
            let field = |k: usize| record[k].to_string();
            let i: usize = field(0).parse().map_err(|_| Error::Parse(format!("bad row {:?}", field(0))))?;
            let j: usize = field(1).parse().map_err(|_| Error::Parse(format!("bad col {:?}", field(1))))?;
            let v: i64 = field(2).parse().map_err(|_| Error::Parse(format!("bad value {:?}", field(2))))?;
            triplets.push((i, j, v));
        }
        IntMatrix::from_triplets(rows, cols, &triplets)
    }
}

/// JSON form `{rows, cols, entries: [[row, col, value], ...]}`.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<(usize, usize, i64)> = self.triplets().collect();
        let mut st = s.serialize_struct("IntMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

/// Sorts by row, sums duplicates, drops zeros.
pub(crate) fn normalize_column(mut entries: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    entries.sort_unstable_by_key(|&(i, _)| i);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(entries.len());
    for (i, v) in entries {
        match out.last_mut() {
            Some((li, lv)) if *li == i => *lv = lv.checked_add(v).expect("overflow in column sum"),
            _ => out.push((i, v)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    out
}
