//! Smith normal form and exact ranks.
//!
//! Large boundary matrices are mostly eliminated by unit pivots. The sparse
//! phase picks, column by column, a pivot row holding a `±1` entry (any
//! nonzero entry over `Z/p`) with the fewest nonzeros, and clears the column
//! with row operations. Whatever cannot be pivoted on a unit is handed to a
//! dense Smith reduction over arbitrary-precision integers. The sparse phase
//! first runs on `i64` with checked arithmetic and restarts on `BigInt` if
//! any entry would overflow.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

trait Arith {
    type E: Clone;
    fn lift(&self, v: i64) -> Self::E;
    fn is_zero(&self, a: &Self::E) -> bool;
    fn is_unit(&self, a: &Self::E) -> bool;
    /// `a / u` for a unit `u`.
    fn div_unit(&self, a: &Self::E, u: &Self::E) -> Option<Self::E>;
    /// `a - f * b`.
    fn sub_mul(&self, a: &Self::E, f: &Self::E, b: &Self::E) -> Option<Self::E>;
    fn zero(&self) -> Self::E;
    fn to_big(&self, a: &Self::E) -> BigInt;
}

struct Checked;

impl Arith for Checked {
    type E = i64;
    fn lift(&self, v: i64) -> i64 {
        v
    }
    fn is_zero(&self, a: &i64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &i64) -> bool {
        *a == 1 || *a == -1
    }
    fn div_unit(&self, a: &i64, u: &i64) -> Option<i64> {
        a.checked_mul(*u)
    }
    fn sub_mul(&self, a: &i64, f: &i64, b: &i64) -> Option<i64> {
        a.checked_sub(f.checked_mul(*b)?)
    }
    fn zero(&self) -> i64 {
        0
    }
    fn to_big(&self, a: &i64) -> BigInt {
        BigInt::from(*a)
    }
}

struct Big;

impl Arith for Big {
    type E = BigInt;
    fn lift(&self, v: i64) -> BigInt {
        BigInt::from(v)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn is_unit(&self, a: &BigInt) -> bool {
        a.abs().is_one()
    }
    fn div_unit(&self, a: &BigInt, u: &BigInt) -> Option<BigInt> {
        Some(a * u)
    }
    fn sub_mul(&self, a: &BigInt, f: &BigInt, b: &BigInt) -> Option<BigInt> {
        Some(a - f * b)
    }
    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn to_big(&self, a: &BigInt) -> BigInt {
        a.clone()
    }
}

struct ModP(u64);

impl ModP {
    fn pow(&self, mut b: u64, mut e: u64) -> u64 {
        let p = self.0 as u128;
        let mut acc: u128 = 1;
        let mut base = b as u128 % p;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        b = acc as u64;
        b
    }
}

impl Arith for ModP {
    type E = u64;
    fn lift(&self, v: i64) -> u64 {
        v.rem_euclid(self.0 as i64) as u64
    }
    fn is_zero(&self, a: &u64) -> bool {
        *a == 0
    }
    fn is_unit(&self, a: &u64) -> bool {
        *a != 0
    }
    fn div_unit(&self, a: &u64, u: &u64) -> Option<u64> {
        let inv = self.pow(*u, self.0 - 2);
        Some(((*a as u128 * inv as u128) % self.0 as u128) as u64)
    }
    fn sub_mul(&self, a: &u64, f: &u64, b: &u64) -> Option<u64> {
        let p = self.0 as u128;
        let fb = (*f as u128 * *b as u128) % p;
        Some(((*a as u128 + p - fb) % p) as u64)
    }
    fn zero(&self) -> u64 {
        0
    }
    fn to_big(&self, a: &u64) -> BigInt {
        BigInt::from(*a)
    }
}

type Row<E> = Vec<(u32, E)>;

fn entry<E>(row: &Row<E>, c: u32) -> Option<&E> {
    row.binary_search_by_key(&c, |&(k, _)| k).ok().map(|k| &row[k].1)
}

/// Sparse unit-pivot elimination. Returns the number of unit pivots and the
/// remaining nonzero rows, which only involve unpivoted columns.
fn eliminate<A: Arith>(ar: &A, mut rows: Vec<Row<A::E>>, ncols: usize) -> Option<(usize, Vec<Row<A::E>>)> {
    let nrows = rows.len();
    let mut col_rows: Vec<Vec<u32>> = vec![Vec::new(); ncols];
    for (r, row) in rows.iter().enumerate() {
        for (c, _) in row {
            col_rows[*c as usize].push(r as u32);
        }
    }
    let mut alive = vec![true; nrows];
    let mut queue: Vec<u32> = (0..ncols as u32).collect();
    queue.sort_by_key(|&c| col_rows[c as usize].len());
    let mut pivots = 0;
    loop {
        let mut deferred = Vec::new();
        let mut progress = false;
        for &c in &queue {
            let mut live: Vec<u32> = std::mem::take(&mut col_rows[c as usize]);
            live.sort_unstable();
            live.dedup();
            live.retain(|&r| alive[r as usize] && entry(&rows[r as usize], c).is_some());
            if live.is_empty() {
                continue;
            }
            let pivot = live
                .iter()
                .copied()
                .filter(|&r| ar.is_unit(entry(&rows[r as usize], c).expect("live")))
                .min_by_key(|&r| rows[r as usize].len());
            let Some(p) = pivot else {
                col_rows[c as usize] = live;
                deferred.push(c);
                continue;
            };
            let prow = std::mem::take(&mut rows[p as usize]);
            alive[p as usize] = false;
            let u = entry(&prow, c).expect("pivot entry").clone();
            for &r in &live {
                if r == p {
                    continue;
                }
                let a = entry(&rows[r as usize], c).expect("live").clone();
                let f = ar.div_unit(&a, &u)?;
                let old = std::mem::take(&mut rows[r as usize]);
                rows[r as usize] = sub_row(ar, old, &f, &prow, r, &mut col_rows)?;
            }
            pivots += 1;
            progress = true;
        }
        if deferred.is_empty() || !progress {
            break;
        }
        queue = deferred;
    }
    let residual = rows
        .into_iter()
        .zip(alive)
        .filter(|(row, a)| *a && !row.is_empty())
        .map(|(row, _)| row)
        .collect();
    Some((pivots, residual))
}

/// `row - f * prow`, registering new fill-in positions under row id `r`.
fn sub_row<A: Arith>(
    ar: &A,
    row: Row<A::E>,
    f: &A::E,
    prow: &Row<A::E>,
    r: u32,
    col_rows: &mut [Vec<u32>],
) -> Option<Row<A::E>> {
    let mut out = Vec::with_capacity(row.len() + prow.len());
    let zero = ar.zero();
    let mut a = row.into_iter().peekable();
    let mut b = prow.iter().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (None, None) => break,
            (Some(_), None) => out.push(a.next().expect("peeked")),
            (None, Some(&&(cb, ref vb))) => {
                let v = ar.sub_mul(&zero, f, vb)?;
                if !ar.is_zero(&v) {
                    out.push((cb, v));
                    col_rows[cb as usize].push(r);
                }
                b.next();
            }
            (Some(&(ca, _)), Some(&&(cb, ref vb))) => {
                if ca < cb {
                    out.push(a.next().expect("peeked"));
                } else if cb < ca {
                    let v = ar.sub_mul(&zero, f, vb)?;
                    if !ar.is_zero(&v) {
                        out.push((cb, v));
                        col_rows[cb as usize].push(r);
                    }
                    b.next();
                } else {
                    let (_, va) = a.next().expect("peeked");
                    let v = ar.sub_mul(&va, f, vb)?;
                    if !ar.is_zero(&v) {
                        out.push((ca, v));
                    }
                    b.next();
                }
            }
        }
    }
    Some(out)
}

fn to_rows<A: Arith>(ar: &A, m: &IntMatrix) -> Vec<Row<A::E>> {
    let mut rows: Vec<Row<A::E>> = vec![Vec::new(); m.rows()];
    for (i, j, v) in m.triplets() {
        let e = ar.lift(v);
        if !ar.is_zero(&e) {
            rows[i].push((j as u32, e));
        }
    }
    rows
}

fn residual_dense<A: Arith>(ar: &A, residual: &[Row<A::E>]) -> Vec<Vec<BigInt>> {
    let mut cols: Vec<u32> = residual.iter().flatten().map(|(c, _)| *c).collect();
    cols.sort_unstable();
    cols.dedup();
    residual
        .iter()
        .map(|row| {
            let mut dense = vec![BigInt::zero(); cols.len()];
            for (c, v) in row {
                let k = cols.binary_search(c).expect("collected");
                dense[k] = ar.to_big(v);
            }
            dense
        })
        .collect()
}

fn invariant_factors_with<A: Arith>(ar: &A, m: &IntMatrix) -> Option<Vec<BigUint>> {
    let (units, residual) = eliminate(ar, to_rows(ar, m), m.cols())?;
    let dense = residual_dense(ar, &residual);
    let mut factors: Vec<BigUint> = vec![BigUint::one(); units];
    factors.extend(dense_invariant_factors(dense));
    Some(factors)
}

/// Invariant factors `d1 | d2 | ...` of an integer matrix; their number is
/// the rank.
pub fn smith_normal_form(m: &IntMatrix) -> Vec<BigUint> {
    invariant_factors_with(&Checked, m)
        .or_else(|| invariant_factors_with(&Big, m))
        .expect("arbitrary precision elimination cannot overflow")
}

/// Rank over the rationals.
pub fn rank_q(m: &IntMatrix) -> usize {
    smith_normal_form(m).len()
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut k = 2u64;
    while k.saturating_mul(k) <= p {
        if p.is_multiple_of(k) {
            return false;
        }
        k += 1;
    }
    true
}

/// Rank over `Z/p` for a prime `p`.
pub fn rank_mod_p(m: &IntMatrix, p: u64) -> Result<usize> {
    if !is_prime(p) || p > u32::MAX as u64 {
        return Err(Error::InvalidCharacteristic(p));
    }
    let ar = ModP(p);
    let (units, residual) = eliminate(&ar, to_rows(&ar, m), m.cols()).expect("modular arithmetic cannot overflow");
    debug_assert!(residual.is_empty());
    Ok(units)
}

/// Dense Smith reduction; returns the nonzero invariant factors as a
/// divisibility chain.
pub fn dense_invariant_factors(mut a: Vec<Vec<BigInt>>) -> Vec<BigUint> {
    let m = a.len();
    let n = a.first().map_or(0, Vec::len);
    let mut diag: Vec<BigInt> = Vec::new();
    for t in 0..m.min(n) {
        let Some((pi, pj)) = argmin_abs(&a, t, t) else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    let (top, rest) = a.split_at_mut(i);
                    for (x, y) in rest[0][t..].iter_mut().zip(&top[t][t..]) {
                        *x -= &q * y;
                    }
                    if !a[i][t].is_zero() {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for row in a[t..].iter_mut() {
                        let y = row[t].clone();
                        row[j] -= &q * y;
                    }
                    if !a[t][j].is_zero() {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
            // move the smallest remainder in row t / column t onto the pivot
            let mut best = (t, t);
            for i in t + 1..m {
                if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t + 1..n {
                if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
            } else if best.1 != t {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        diag.push(a[t][t].abs());
    }
    let mut d: Vec<BigUint> = diag.into_iter().map(|x| x.to_biguint().expect("nonnegative")).collect();
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            let g = d[i].gcd(&d[j]);
            let l = &d[i] / &g * &d[j];
            d[i] = g;
            d[j] = l;
        }
    }
    d
}

fn argmin_abs(a: &[Vec<BigInt>], r0: usize, c0: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for (i, row) in a.iter().enumerate().skip(r0) {
        for (j, v) in row.iter().enumerate().skip(c0) {
            if !v.is_zero() && best.is_none_or(|(bi, bj)| v.abs() < a[bi][bj].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

fn to_big_dense(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect()
}

fn from_big_dense(rows: &[Vec<BigInt>], ncols: usize) -> Result<IntMatrix> {
    let dense = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|v| v.to_i64().ok_or_else(|| Error::Internal("entry exceeds i64".into())))
                .collect::<Result<Vec<i64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut m = IntMatrix::from_dense(&dense);
    if dense.is_empty() {
        m = IntMatrix::zeros(0, ncols);
    }
    Ok(m)
}

/// Inverse of a square integer matrix, or `None` unless it is unimodular.
pub fn unimodular_inverse(m: &IntMatrix) -> Option<IntMatrix> {
    let n = m.rows();
    assert_eq!(n, m.cols(), "square matrix expected");
    let mut a: Vec<Vec<BigRational>> = m
        .to_dense()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> =
                row.into_iter().map(|v| BigRational::from_integer(v.into())).collect();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        let inv = a[c][c].recip();
        for v in a[c].iter_mut() {
            *v *= &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let (pivot_row, other) = if i < c {
                    let (lo, hi) = a.split_at_mut(c);
                    (&hi[0], &mut lo[i])
                } else {
                    let (lo, hi) = a.split_at_mut(i);
                    (&lo[c], &mut hi[0])
                };
                for (x, y) in other.iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let v = &a[i][n + j];
            if !v.is_integer() {
                return None;
            }
            out[i][j] = v.to_integer().to_i64()?;
        }
    }
    Some(if n == 0 { IntMatrix::zeros(0, 0) } else { IntMatrix::from_dense(&out) })
}

/// Basis data for `Z^n / span(columns of relations)` when that quotient is
/// free: a projection `π: Z^n -> Z^f` and a section `s: Z^f -> Z^n` with
/// `π s = id` and `ker π = span(relations)`.
#[derive(Clone, Debug)]
pub struct FreeQuotient {
    pub projection: IntMatrix,
    pub section: IntMatrix,
}

/// Computes [`FreeQuotient`] by unimodular row reduction of the relation
/// matrix. Fails if the quotient has torsion.
pub fn free_quotient(relations: &IntMatrix) -> Result<FreeQuotient> {
    let n = relations.rows();
    let m = relations.cols();
    let mut a = to_big_dense(relations);
    let ident = |n: usize| -> Vec<Vec<BigInt>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
            .collect()
    };
    let mut u = ident(n);
    let mut uinv = ident(n);
    let mut r = 0;
    for col in 0..m {
        if r == n {
            break;
        }
        loop {
            let best = (r..n)
                .filter(|&i| !a[i][col].is_zero())
                .min_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
            let Some(i) = best else { break };
            a.swap(r, i);
            u.swap(r, i);
            for row in uinv.iter_mut() {
                row.swap(r, i);
            }
            let mut cleared = true;
            for i in r + 1..n {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = a[i][col].div_floor(&a[r][col]);
                let (top, rest) = a.split_at_mut(i);
                for (x, y) in rest[0].iter_mut().zip(&top[r]) {
                    *x -= &q * y;
                }
                let (top, rest) = u.split_at_mut(i);
                for (x, y) in rest[0].iter_mut().zip(&top[r]) {
                    *x -= &q * y;
                }
                for row in uinv.iter_mut() {
                    let y = row[i].clone();
                    row[r] += &q * y;
                }
                if !a[i][col].is_zero() {
                    cleared = false;
                }
            }
            if cleared {
                r += 1;
                break;
            }
        }
    }
    let torsion = dense_invariant_factors(a[..r].to_vec());
    if torsion.iter().any(|f| !f.is_one()) {
        return Err(Error::Relation("quotient module has torsion".into()));
    }
    let free = n - r;
    let projection = from_big_dense(&u[r..], n)?;
    let section_rows: Vec<Vec<BigInt>> = uinv.iter().map(|row| row[r..].to_vec()).collect();
    let section = if free == 0 { IntMatrix::zeros(n, 0) } else { from_big_dense(&section_rows, free)? };
    let projection = if free == 0 { IntMatrix::zeros(0, n) } else { projection };
    Ok(FreeQuotient { projection, section })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nats(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&x| BigUint::from(x)).collect()
    }

    #[test]
    fn snf_examples() {
        let a = IntMatrix::from_dense(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(smith_normal_form(&a), nats(&[2, 4]));
        assert_eq!(smith_normal_form(&IntMatrix::identity(3)), nats(&[1, 1, 1]));
        assert!(smith_normal_form(&IntMatrix::zeros(3, 2)).is_empty());
        assert!(smith_normal_form(&IntMatrix::zeros(0, 0)).is_empty());
    }

    #[test]
    fn snf_divisibility_fix() {
        let a = IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(smith_normal_form(&a), nats(&[1, 6]));
        let b = IntMatrix::from_dense(&[vec![4, 0, 0], vec![0, 6, 0], vec![0, 0, 10]]);
        assert_eq!(smith_normal_form(&b), nats(&[2, 2, 60]));
    }

    #[test]
    fn overflow_escalates_to_bigint() {
        let big = i64::MAX / 2;
        let a = IntMatrix::from_dense(&[vec![1, big, 0], vec![big, 1, big], vec![0, big, 1]]);
        let f = smith_normal_form(&a);
        assert_eq!(f.len(), 3);
        // |det| = |1 - 2 big^2|
        let b = BigInt::from(big);
        let det = (BigInt::one() - BigInt::from(2) * &b * &b).abs();
        assert_eq!(f.iter().fold(BigUint::one(), |acc, x| acc * x), det.to_biguint().unwrap());
    }

    #[test]
    fn modular_ranks() {
        let a = IntMatrix::from_dense(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(rank_mod_p(&a, 2).unwrap(), 1);
        assert_eq!(rank_mod_p(&a, 3).unwrap(), 1);
        assert_eq!(rank_mod_p(&a, 5).unwrap(), 2);
        assert_eq!(rank_q(&a), 2);
        assert_eq!(rank_mod_p(&a, 4), Err(Error::InvalidCharacteristic(4)));
    }

    #[test]
    fn inverse_and_non_unimodular() {
        let a = IntMatrix::from_dense(&[vec![1, 2], vec![0, -1]]);
        let inv = unimodular_inverse(&a).unwrap();
        assert_eq!(a.mul(&inv), IntMatrix::identity(2));
        assert!(unimodular_inverse(&IntMatrix::from_dense(&[vec![2]])).is_none());
        assert!(unimodular_inverse(&IntMatrix::from_dense(&[vec![1, 1], vec![1, 1]])).is_none());
    }

    #[test]
    fn quotient_by_swap_relations() {
        // Z^2 / (e0 - e1) is free of rank one
        let rel = IntMatrix::from_dense(&[vec![1, -1], vec![-1, 1]]);
        let q = free_quotient(&rel).unwrap();
        assert_eq!(q.projection.shape(), (1, 2));
        assert_eq!(q.projection.mul(&q.section), IntMatrix::identity(1));
        assert!(q.projection.mul(&rel).is_zero());
        // Z / 2Z is not free
        assert!(free_quotient(&IntMatrix::from_dense(&[vec![2]])).is_err());
    }
}
