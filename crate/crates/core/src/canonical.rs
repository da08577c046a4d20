//! Canonical representatives of matrix classes.
//!
//! Two matrices are equivalent when one is obtained from the other by adding
//! constants to rows, adding constants to columns and multiplying by a
//! positive scalar. The representative has a zero first row, zero minimum in
//! every row, and is scaled to the primitive nonnegative integer matrix on
//! its ray. The unit-sphere representative is `G / sqrt(normsq)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::trop::{Rational, RationalMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CanonicalMatrix {
    pub d: usize,
    pub n: usize,
    #[serde(rename = "G", serialize_with = "crate::bigjson::int_rows")]
    g: Vec<Vec<BigInt>>,
    #[serde(serialize_with = "crate::bigjson::int")]
    normsq: BigInt,
}

impl CanonicalMatrix {
    /// Rows of the primitive integer matrix.
    pub fn g(&self) -> &[Vec<BigInt>] {
        &self.g
    }

    pub fn normsq(&self) -> &BigInt {
        &self.normsq
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.g[i][j]
    }

    pub fn to_rational_matrix(&self) -> RationalMatrix {
        RationalMatrix::new(
            self.g
                .iter()
                .map(|row| row.iter().map(|v| Rational::from_integer(v.clone())).collect())
                .collect(),
        )
        .expect("canonical matrices are nonempty")
    }

    /// The unit-sphere representative rendered with `digits` decimals.
    pub fn unit_sphere_display(&self, digits: usize) -> Vec<Vec<String>> {
        let norm = self.normsq.to_f64().unwrap_or(f64::INFINITY).sqrt();
        self.g
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| format!("{:.*}", digits, v.to_f64().unwrap_or(f64::NAN) / norm))
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    fn check_invariants(&self) -> bool {
        let first_row_zero = self.g[0].iter().all(Zero::is_zero);
        let row_min_zero = self.g.iter().all(|r| r.iter().min().is_some_and(Zero::is_zero));
        let gcd = self.g.iter().flatten().fold(BigInt::zero(), |acc, v| acc.gcd(v));
        let normsq: BigInt = self.g.iter().flatten().map(|v| v * v).sum();
        first_row_zero && row_min_zero && gcd.is_one() && normsq == self.normsq
    }
}

/// Canonical representative of the class of `m`.
pub fn canonicalize(m: &RationalMatrix) -> Result<CanonicalMatrix> {
    let (d, n) = (m.rows(), m.cols());
    let shifted = m.map(|_, j, v| v - m.get(0, j));
    let mins: Vec<Rational> = (0..d)
        .map(|i| shifted.row(i).iter().min().cloned().expect("nonempty row"))
        .collect();
    let reduced = shifted.map(|i, _, v| v - &mins[i]);

    let lcm = (0..d)
        .flat_map(|i| reduced.row(i).iter().map(|v| v.denom().clone()).collect::<Vec<_>>())
        .fold(BigInt::one(), |acc, den| acc.lcm(&den));
    let ints: Vec<Vec<BigInt>> = (0..d)
        .map(|i| {
            reduced
                .row(i)
                .iter()
                .map(|v| (v * Rational::from_integer(lcm.clone())).to_integer())
                .collect()
        })
        .collect();
    let gcd = ints.iter().flatten().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if gcd.is_zero() {
        return Err(Error::ZeroClass);
    }
    let g: Vec<Vec<BigInt>> =
        ints.into_iter().map(|row| row.into_iter().map(|v| v / &gcd).collect()).collect();
    debug_assert!(g.iter().flatten().all(|v| !v.is_negative()));
    let normsq = g.iter().flatten().map(|v| v * v).sum();
    let cm = CanonicalMatrix { d, n, g, normsq };
    debug_assert!(cm.check_invariants());
    Ok(cm)
}

/// Whether two matrices represent the same class.
pub fn equivalent(a: &RationalMatrix, b: &RationalMatrix) -> Result<bool> {
    let ca = canonicalize(a)?;
    let cb = canonicalize(b)?;
    Ok(ca == cb)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn example_matrix() -> RationalMatrix {
        RationalMatrix::from_ints(&[
            &[6, 1, 4, 6, 3],
            &[2, -3, -1, 2, -1],
            &[5, -2, 0, 4, 2],
            &[5, -2, 0, 4, 2],
            &[0, -5, -1, 0, -3],
            &[6, -2, 0, 4, 4],
        ])
        .unwrap()
    }

    #[test]
    fn neighbouring_matrix_has_other_class() {
        // bumping the corner entry separates columns 1 and 5
        let rows = example_matrix().map(|i, j, v| if (i, j) == (5, 0) { v + Rational::one() } else { v.clone() });
        let cm = canonicalize(&rows).unwrap();
        assert_eq!(ints(&cm)[5], vec![5, 1, 0, 2, 5]);
        assert_eq!(cm.normsq(), &BigInt::from(106));
    }

    fn ints(cm: &CanonicalMatrix) -> Vec<Vec<i64>> {
        cm.g().iter().map(|r| r.iter().map(|v| v.to_i64().unwrap()).collect()).collect()
    }

    #[test]
    fn example_canonical_form() {
        let cm = canonicalize(&example_matrix()).unwrap();
        assert_eq!(
            ints(&cm),
            vec![
                vec![0, 0, 0, 0, 0],
                vec![1, 1, 0, 1, 1],
                vec![3, 1, 0, 2, 3],
                vec![3, 1, 0, 2, 3],
                vec![0, 0, 1, 0, 0],
                vec![4, 1, 0, 2, 5],
            ]
        );
        assert_eq!(cm.normsq(), &BigInt::from(97));
        assert!(cm.check_invariants());
    }

    #[test]
    fn zero_class() {
        let z = RationalMatrix::from_ints(&[&[0, 0, 0], &[0, 0, 0], &[0, 0, 0]]).unwrap();
        assert_eq!(canonicalize(&z), Err(Error::ZeroClass));
        let constant_rows = RationalMatrix::from_ints(&[&[1, 1], &[5, 5]]).unwrap();
        assert_eq!(canonicalize(&constant_rows), Err(Error::ZeroClass));
    }

    #[test]
    fn idempotent_on_representative() {
        let cm = canonicalize(&example_matrix()).unwrap();
        let again = canonicalize(&cm.to_rational_matrix()).unwrap();
        assert_eq!(cm, again);
        assert!(equivalent(&example_matrix(), &cm.to_rational_matrix()).unwrap());
    }

    #[test]
    fn invariant_under_translation_and_scaling() {
        let m = example_matrix();
        let row_shift = m.map(|i, _, v| v + Rational::from_integer(BigInt::from(3 * i as i64 - 7)));
        let col_shift = m.map(|_, j, v| v + Rational::new(BigInt::from(j as i64), BigInt::from(2)));
        let scaled = m.map(|_, _, v| v * Rational::from_integer(BigInt::from(3)));
        assert!(equivalent(&m, &row_shift).unwrap());
        assert!(equivalent(&m, &col_shift).unwrap());
        assert!(equivalent(&m, &scaled).unwrap());
    }

    #[test]
    fn negation_is_a_different_class() {
        let m = example_matrix();
        let neg = m.map(|_, _, v| -v);
        assert!(!equivalent(&m, &neg).unwrap());
    }

    #[test]
    fn rational_entries_are_cleared() {
        let m = RationalMatrix::parse_csv("0,0\n1/2,1/3\n").unwrap();
        let cm = canonicalize(&m).unwrap();
        assert_eq!(ints(&cm), vec![vec![0, 0], vec![1, 0]]);
        assert_eq!(cm.normsq(), &BigInt::from(1));
    }

    #[test]
    fn json_shape() {
        let cm = canonicalize(&RationalMatrix::from_ints(&[&[0, 0], &[0, 2]]).unwrap()).unwrap();
        assert_eq!(cm.to_json(), r#"{"d":2,"n":2,"G":[[0,0],[0,1]],"normsq":1}"#);
    }
}
