//! Algebraic discrete Morse reduction.
//!
//! A splitting `C_k = A_k ⊕ B_k ⊕ U_k` in every degree, such that the
//! component `f = α∂ : B_k -> A_{k-1}` is invertible, yields a smaller
//! complex `Û` spanned by `û = u - β(u)`, where `β(u) ∈ B` is the unique
//! element with `α∂(u - β(u)) = 0`. `Û` has the homology of `C`.
//!
//! For `(V ⊗ W)^+` with `V` hemispherical of degree `D` and `W` structured
//! as `L × L`, the module also provides the standard splitting and the
//! closed forms of `β` and of the reduced boundaries.

use std::collections::HashMap;

use serde::Serialize;

use crate::equivariant::StructuredZ2Complex;
use crate::error::{Error, Result};
use crate::homology::ChainComplex;
use crate::matrix::{normalize_column, IntMatrix};
use crate::smith::unimodular_inverse;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Cell {
    A,
    B,
    U,
}

/// Assignment of every basis element of every degree to `A`, `B` or `U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorseSplitting {
    cells: Vec<Vec<Cell>>,
}

impl MorseSplitting {
    pub fn new(cells: Vec<Vec<Cell>>) -> Self {
        MorseSplitting { cells }
    }

    /// Everything in `U`.
    pub fn trivial(c: &ChainComplex) -> Self {
        MorseSplitting { cells: c.ranks().iter().map(|&r| vec![Cell::U; r]).collect() }
    }

    pub fn indices(&self, k: usize, cell: Cell) -> Vec<usize> {
        self.cells
            .get(k)
            .map(|v| v.iter().enumerate().filter(|(_, c)| **c == cell).map(|(i, _)| i).collect())
            .unwrap_or_default()
    }

    pub fn count(&self, k: usize, cell: Cell) -> usize {
        self.cells.get(k).map_or(0, |v| v.iter().filter(|c| **c == cell).count())
    }

    pub fn cell(&self, k: usize, idx: usize) -> Cell {
        self.cells[k][idx]
    }
}

/// The reduced complex together with the corrections `β(u)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedComplex {
    pub complex: ChainComplex,
    /// `generators[k][s]` is the index in `C_k` of the `s`-th `U` generator.
    pub generators: Vec<Vec<usize>>,
    /// `beta[k][s]` is `β(u)` as a sparse vector of `C_k`, supported on `B_k`.
    pub beta: Vec<Vec<Vec<(usize, i64)>>>,
}

impl ReducedComplex {
    /// `û = u - β(u)` as a sparse vector of `C_k`.
    pub fn hat(&self, k: usize, s: usize) -> Vec<(usize, i64)> {
        let mut v: Vec<(usize, i64)> = self.beta[k][s].iter().map(|&(i, x)| (i, -x)).collect();
        v.push((self.generators[k][s], 1));
        normalize_column(v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// Dense matrix-vector product with a sparse vector given in local
/// coordinates.
fn apply_dense(m: &[Vec<i64>], v: &[(usize, i64)]) -> Vec<i64> {
    let mut out = vec![0i64; m.len()];
    for (r, row) in m.iter().enumerate() {
        for &(c, x) in v {
            out[r] = out[r]
                .checked_add(row[c].checked_mul(x).expect("overflow in β"))
                .expect("overflow in β");
        }
    }
    out
}

/// Generic reduction. Fails with [`Error::NotInvertible`] naming the first
/// degree `k` where `α∂ : B_k -> A_{k-1}` is not unimodular.
pub fn morse_reduce(c: &ChainComplex, s: &MorseSplitting) -> Result<ReducedComplex> {
    let top = c.top();
    if s.cells.len() != top + 1 || (0..=top).any(|k| s.cells[k].len() != c.rank(k)) {
        return Err(Error::Domain("splitting does not match the complex".into()));
    }
    let a: Vec<Vec<usize>> = (0..=top).map(|k| s.indices(k, Cell::A)).collect();
    let b: Vec<Vec<usize>> = (0..=top).map(|k| s.indices(k, Cell::B)).collect();
    let u: Vec<Vec<usize>> = (0..=top).map(|k| s.indices(k, Cell::U)).collect();
    if !b[0].is_empty() {
        return Err(Error::NotInvertible { degree: 0 });
    }
    if !a[top].is_empty() {
        return Err(Error::NotInvertible { degree: top + 1 });
    }
    // position of a global index inside the A list of its degree
    let a_pos: Vec<HashMap<usize, usize>> =
        a.iter().map(|v| v.iter().enumerate().map(|(p, &i)| (i, p)).collect()).collect();

    let mut beta: Vec<Vec<Vec<(usize, i64)>>> = vec![vec![Vec::new(); u[0].len()]];
    for k in 1..=top {
        if a[k - 1].len() != b[k].len() {
            return Err(Error::NotInvertible { degree: k });
        }
        let h = if b[k].is_empty() {
            Vec::new()
        } else {
            let f = c.boundary(k).select(&a[k - 1], &b[k]);
            unimodular_inverse(&f).ok_or(Error::NotInvertible { degree: k })?.to_dense()
        };
        let mut row = Vec::with_capacity(u[k].len());
        for &ui in &u[k] {
            let alpha: Vec<(usize, i64)> = c
                .boundary(k)
                .column(ui)
                .iter()
                .filter_map(|&(r, x)| a_pos[k - 1].get(&r).map(|&p| (p, x)))
                .collect();
            let coords = if h.is_empty() { Vec::new() } else { apply_dense(&h, &alpha) };
            let v: Vec<(usize, i64)> =
                coords.iter().enumerate().filter(|(_, x)| **x != 0).map(|(t, &x)| (b[k][t], x)).collect();
            row.push(normalize_column(v));
        }
        beta.push(row);
    }

    let mut reduced = ReducedComplex {
        complex: ChainComplex::zero(),
        generators: u.clone(),
        beta,
    };
    let u_pos: Vec<HashMap<usize, usize>> =
        u.iter().map(|v| v.iter().enumerate().map(|(p, &i)| (i, p)).collect()).collect();
    let mut boundaries = Vec::with_capacity(top);
    for k in 1..=top {
        let mut m = IntMatrix::zeros(u[k - 1].len(), u[k].len());
        for sidx in 0..u[k].len() {
            let y = c.boundary(k).apply(&reduced.hat(k, sidx));
            if y.iter().any(|(r, _)| a_pos[k - 1].contains_key(r)) {
                return Err(Error::Internal(format!("∂û has an A-component in degree {k}")));
            }
            let coeffs: Vec<(usize, i64)> =
                y.iter().filter_map(|&(r, x)| u_pos[k - 1].get(&r).map(|&p| (p, x))).collect();
            let mut expect = Vec::new();
            for &(p, x) in &coeffs {
                expect.extend(reduced.hat(k - 1, p).into_iter().map(|(r, v)| (r, v * x)));
            }
            if normalize_column(expect) != y {
                return Err(Error::Internal(format!("∂û leaves Û in degree {k}")));
            }
            m.set_column(sidx, normalize_column(coeffs));
        }
        boundaries.push(m);
    }
    reduced.complex = ChainComplex::new(u.iter().map(Vec::len).collect(), boundaries)?;
    Ok(reduced)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Half {
    A,
    B,
}

/// The generator `e_t a_{i,j}` or `e_t b_{i,j}` of `(V ⊗ W)^+`, where `e_t`
/// is the `t`-th basis element of `L_j`. Its degree is `i + j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Gen {
    pub i: usize,
    pub j: usize,
    pub half: Half,
    pub t: usize,
}

impl Gen {
    pub fn degree(&self) -> usize {
        self.i + self.j
    }
}

/// `(V ⊗ W)^+` for `V` hemispherical of degree `D`, in the basis
/// `σ_i^+ ⊗ (L_j × L_j)`. In each degree the blocks run over ascending
/// `i`; inside a block all `a` generators precede all `b` generators.
#[derive(Clone, Debug)]
pub struct PlusTensor {
    dd: usize,
    w: StructuredZ2Complex,
    complex: ChainComplex,
    gens: Vec<Vec<Gen>>,
    index: HashMap<Gen, usize>,
}

impl PlusTensor {
    pub fn new(dd: usize, w: &StructuredZ2Complex) -> Result<Self> {
        let top = dd + w.top();
        let mut gens: Vec<Vec<Gen>> = vec![Vec::new(); top + 1];
        for (k, list) in gens.iter_mut().enumerate() {
            for i in k.saturating_sub(w.top())..=k.min(dd) {
                let j = k - i;
                for half in [Half::A, Half::B] {
                    list.extend((0..w.rank(j)).map(|t| Gen { i, j, half, t }));
                }
            }
        }
        let index: HashMap<Gen, usize> =
            gens.iter().flat_map(|l| l.iter().enumerate().map(|(p, g)| (*g, p))).collect();
        let p: Vec<Vec<Vec<(usize, i64)>>> = (0..=w.top()).map(|j| columns(&w.p(j))).collect();
        let q: Vec<Vec<Vec<(usize, i64)>>> = (0..=w.top()).map(|j| columns(&w.q(j))).collect();
        let mut boundaries = Vec::with_capacity(top);
        for k in 1..=top {
            let mut m = IntMatrix::zeros(gens[k - 1].len(), gens[k].len());
            for (col, g) in gens[k].iter().enumerate() {
                let mut entries: Vec<(usize, i64)> = Vec::new();
                let mut push = |gen: Gen, x: i64| entries.push((index[&gen], x));
                let (i, j, t) = (g.i, g.j, g.t);
                let si = sign(i);
                // (w0 + (-1)^i w1, w1 + (-1)^i w0) e_{i-1,j}
                if i >= 1 {
                    let (ca, cb) = match g.half {
                        Half::A => (1, si),
                        Half::B => (si, 1),
                    };
                    push(Gen { i: i - 1, j, half: Half::A, t }, ca);
                    push(Gen { i: i - 1, j, half: Half::B, t }, cb);
                }
                // (-1)^i (p w0 + q w1, p w1 + q w0) e_{i,j-1}
                if j >= 1 {
                    let (to_a, to_b) = match g.half {
                        Half::A => (&p[j][t], &q[j][t]),
                        Half::B => (&q[j][t], &p[j][t]),
                    };
                    for &(r, x) in to_a {
                        push(Gen { i, j: j - 1, half: Half::A, t: r }, si * x);
                    }
                    for &(r, x) in to_b {
                        push(Gen { i, j: j - 1, half: Half::B, t: r }, si * x);
                    }
                }
                m.set_column(col, normalize_column(entries));
            }
            boundaries.push(m);
        }
        let complex = ChainComplex::new(gens.iter().map(Vec::len).collect(), boundaries)?;
        Ok(PlusTensor { dd, w: w.clone(), complex, gens, index })
    }

    pub fn dd(&self) -> usize {
        self.dd
    }

    pub fn w(&self) -> &StructuredZ2Complex {
        &self.w
    }

    pub fn complex(&self) -> &ChainComplex {
        &self.complex
    }

    pub fn gens(&self, k: usize) -> &[Gen] {
        self.gens.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, g: &Gen) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// Which part of `U` a generator belongs to under the standard
    /// splitting: `Some(0)` for `U^(0)`, `Some(D)` for `U^(D)`.
    pub fn u_part(&self, g: &Gen) -> Option<usize> {
        match (g.half, g.i) {
            (Half::A, i) if i == self.dd => Some(self.dd),
            (Half::B, 0) => Some(0),
            _ => None,
        }
    }

    /// `a_{i<D} -> A`, `b_{i>=1} -> B`, `a_D -> U^(D)`, `b_0 -> U^(0)`,
    /// without checking the support condition.
    pub fn splitting(&self) -> MorseSplitting {
        MorseSplitting::new(
            self.gens
                .iter()
                .map(|l| {
                    l.iter()
                        .map(|g| match self.u_part(g) {
                            Some(_) => Cell::U,
                            None if g.half == Half::A => Cell::A,
                            None => Cell::B,
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

fn sign(i: usize) -> i64 {
    if i.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn columns(m: &IntMatrix) -> Vec<Vec<(usize, i64)>> {
    (0..m.cols()).map(|j| m.column(j).to_vec()).collect()
}

fn check_support(dd: usize, w: &StructuredZ2Complex) -> Result<()> {
    if dd == 0 {
        return Err(Error::Domain("the standard splitting needs D >= 1".into()));
    }
    if let Some(j) = (dd + 1..=w.top()).find(|&j| w.rank(j) != 0) {
        return Err(Error::Domain(format!("L_{j} is nonzero but the splitting needs L_j = 0 for j > {dd}")));
    }
    Ok(())
}

/// The standard splitting of `(V ⊗ W)^+`; requires `L_j = 0` for `j > D`.
pub fn standard_splitting(dd: usize, w: &StructuredZ2Complex) -> Result<(PlusTensor, MorseSplitting)> {
    check_support(dd, w)?;
    standard_splitting_unchecked(dd, w)
}

/// [`standard_splitting`] without the support check.
pub fn standard_splitting_unchecked(dd: usize, w: &StructuredZ2Complex) -> Result<(PlusTensor, MorseSplitting)> {
    let pt = PlusTensor::new(dd, w)?;
    let s = pt.splitting();
    Ok((pt, s))
}

/// `β(u)` for a `U` generator `u` of degree `k` at position `idx`, as a
/// sparse vector of `C_k`:
/// `β(w a_{D,j}) = -(-1)^{D+1} w b_{D,j}` and
/// `β(w b_{0,k}) = -Σ_{i=1..D} q^i(w) b_{i,k-i}`.
pub fn beta_closed_form(pt: &PlusTensor, k: usize, idx: usize) -> Result<Vec<(usize, i64)>> {
    let g = *pt.gens(k).get(idx).ok_or_else(|| Error::Domain(format!("no generator {idx} in degree {k}")))?;
    let dd = pt.dd;
    match pt.u_part(&g) {
        None => Err(Error::Domain(format!("{g:?} is not in U"))),
        Some(part) if part == dd && g.half == Half::A => {
            let b = pt.index_of(&Gen { half: Half::B, ..g }).expect("b partner");
            Ok(vec![(b, -sign(dd + 1))])
        }
        Some(_) => {
            let mut out = Vec::new();
            let mut w: Vec<(usize, i64)> = vec![(g.t, 1)];
            for i in 1..=dd.min(k) {
                let j = k - i;
                w = pt.w.q(j + 1).apply(&w);
                if w.is_empty() {
                    break;
                }
                for &(t, x) in &w {
                    let gen = Gen { i, j, half: Half::B, t };
                    out.push((pt.index_of(&gen).expect("generator in range"), -x));
                }
            }
            Ok(normalize_column(out))
        }
    }
}

/// The two summands `(Û^(D), Û^(0))` in closed form: `L` with boundary
/// `(-1)^D (p + (-1)^{D+1} q)` shifted up by `D`, and `L` with `p + q`.
pub fn reduced_boundaries(dd: usize, w: &StructuredZ2Complex) -> Result<(ChainComplex, ChainComplex)> {
    check_support(dd, w)?;
    let s_outer = sign(dd);
    let s_inner = sign(dd + 1);
    let top_d = (1..=w.top()).map(|j| w.p(j).add(&w.q(j).scale(s_inner)).scale(s_outer)).collect();
    let ud = ChainComplex::new(w.l().to_vec(), top_d)?.shift(dd);
    Ok((ud, w.plus_complex()))
}

/// Whether `∂` maps `Û^(0)` into itself, i.e. no `U^(D)` coefficient
/// appears in the boundary of any `U^(0)` generator.
pub fn u0_is_subcomplex(pt: &PlusTensor, r: &ReducedComplex) -> bool {
    (1..=r.complex.top()).all(|k| {
        let m = r.complex.boundary(k);
        r.generators[k].iter().enumerate().all(|(s, &gi)| {
            let g = pt.gens(k)[gi];
            if pt.u_part(&g) != Some(0) || g.half != Half::B {
                return true;
            }
            m.column(s).iter().all(|&(row, _)| {
                let h = pt.gens(k - 1)[r.generators[k - 1][row]];
                pt.u_part(&h) == Some(0) && h.half == Half::B
            })
        })
    })
}

/// Restriction of `Û` to the generators of one part, as a complex.
pub fn restrict_to_part(pt: &PlusTensor, r: &ReducedComplex, part: Half) -> Result<ChainComplex> {
    let keep = |k: usize, s: usize| {
        let g = pt.gens(k)[r.generators[k][s]];
        match part {
            Half::B => g.half == Half::B && g.i == 0,
            Half::A => g.half == Half::A && g.i == pt.dd,
        }
    };
    let top = r.complex.top();
    let sel: Vec<Vec<usize>> =
        (0..=top).map(|k| (0..r.generators[k].len()).filter(|&s| keep(k, s)).collect()).collect();
    let boundaries = (1..=top).map(|k| r.complex.boundary(k).select(&sel[k - 1], &sel[k])).collect();
    ChainComplex::new(sel.iter().map(Vec::len).collect(), boundaries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivariant::{hemispherical, plus_part, structured_to_z2, tensor};
    use crate::homology::homology_z;

    #[test]
    fn empty_matching_is_identity() {
        let pt = PlusTensor::new(2, &StructuredZ2Complex::hemispherical(2)).unwrap();
        let r = morse_reduce(pt.complex(), &MorseSplitting::trivial(pt.complex())).unwrap();
        assert_eq!(&r.complex, pt.complex());
    }

    #[test]
    fn interval_collapses_to_point() {
        let c = ChainComplex::new(vec![2, 1], vec![IntMatrix::from_dense(&[vec![-1], vec![1]])]).unwrap();
        let s = MorseSplitting::new(vec![vec![Cell::U, Cell::A], vec![Cell::B]]);
        let r = morse_reduce(&c, &s).unwrap();
        assert_eq!(r.complex.ranks(), &[1, 0]);
    }

    #[test]
    fn non_unimodular_matching_is_rejected() {
        let c = ChainComplex::new(vec![1, 1], vec![IntMatrix::from_dense(&[vec![2]])]).unwrap();
        let s = MorseSplitting::new(vec![vec![Cell::A], vec![Cell::B]]);
        assert_eq!(morse_reduce(&c, &s), Err(Error::NotInvertible { degree: 1 }));
    }

    #[test]
    fn structured_basis_matches_quotient() {
        for (dd, nn) in [(1, 1), (2, 2), (3, 2), (4, 3)] {
            let w = StructuredZ2Complex::hemispherical(nn);
            let pt = PlusTensor::new(dd, &w).unwrap();
            let generic = plus_part(&tensor(&hemispherical(dd), &structured_to_z2(&w).unwrap())).unwrap();
            assert_eq!(pt.complex().ranks(), generic.ranks());
            assert_eq!(homology_z(pt.complex(), false).unwrap(), homology_z(&generic, false).unwrap());
        }
    }

    #[test]
    fn standard_reduction_d2() {
        let w = StructuredZ2Complex::hemispherical(2);
        let (pt, s) = standard_splitting(2, &w).unwrap();
        for k in 0..=4 {
            let total = s.count(k, Cell::A) + s.count(k, Cell::B) + s.count(k, Cell::U);
            assert_eq!(total, pt.complex().rank(k));
        }
        let r = morse_reduce(pt.complex(), &s).unwrap();
        assert_eq!(r.complex.ranks(), &[1, 1, 2, 1, 1]);
        assert_eq!(homology_z(&r.complex, false).unwrap(), homology_z(pt.complex(), false).unwrap());
        assert!(u0_is_subcomplex(&pt, &r));
    }

    #[test]
    fn u_ranks_for_d1() {
        let (_, s) = standard_splitting(1, &StructuredZ2Complex::hemispherical(1)).unwrap();
        let u: Vec<usize> = (0..=2).map(|k| s.count(k, Cell::U)).collect();
        assert_eq!(u, vec![1, 2, 1]);
    }

    #[test]
    fn closed_form_beta_matches_generic() {
        for dd in 1..=5 {
            for nn in 0..=dd {
                let (pt, s) = standard_splitting(dd, &StructuredZ2Complex::hemispherical(nn)).unwrap();
                let r = morse_reduce(pt.complex(), &s).unwrap();
                for k in 0..=pt.complex().top() {
                    for (sidx, &gi) in r.generators[k].iter().enumerate() {
                        assert_eq!(beta_closed_form(&pt, k, gi).unwrap(), r.beta[k][sidx], "D={dd} N={nn} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn closed_form_boundaries() {
        let w = StructuredZ2Complex::hemispherical(2);
        let (pt, s) = standard_splitting(3, &w).unwrap();
        let r = morse_reduce(pt.complex(), &s).unwrap();
        let (ud, u0) = reduced_boundaries(3, &w).unwrap();
        assert_eq!(restrict_to_part(&pt, &r, Half::A).unwrap().trimmed(), ud.trimmed());
        assert_eq!(restrict_to_part(&pt, &r, Half::B).unwrap().trimmed(), u0.trimmed());
    }

    #[test]
    fn support_violation() {
        let w = StructuredZ2Complex::hemispherical(2);
        assert!(matches!(standard_splitting(1, &w), Err(Error::Domain(_))));
        assert!(matches!(reduced_boundaries(1, &w), Err(Error::Domain(_))));
        let (pt, s) = standard_splitting_unchecked(1, &w).unwrap();
        let r = morse_reduce(pt.complex(), &s).unwrap();
        assert!(!u0_is_subcomplex(&pt, &r));
        assert_eq!(homology_z(&r.complex, false).unwrap(), homology_z(pt.complex(), false).unwrap());
    }
}
