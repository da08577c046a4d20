//! Closed-form homology of `B(d,n)` and of real projective space.
//!
//! `B(d,n)` is a closed manifold of dimension `d + n - 4`; every formula
//! here is supported in degrees `0..=d+n-4`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::HomologyProfile;
use crate::smith::is_prime;

/// Coefficient ring of a profile.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Coefficients {
    #[serde(rename = "Z")]
    Integers,
    /// A prime field, or `Q` for characteristic zero.
    #[serde(rename = "field")]
    Field(u64),
}

impl Coefficients {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "z" => Ok(Coefficients::Integers),
            "q" => Ok(Coefficients::Field(0)),
            other => {
                let p: u64 = other
                    .strip_prefix('z')
                    .and_then(|x| x.parse().ok())
                    .ok_or_else(|| Error::Parse(format!("unknown coefficients {s:?}")))?;
                if !is_prime(p) {
                    return Err(Error::InvalidCharacteristic(p));
                }
                Ok(Coefficients::Field(p))
            }
        }
    }

    pub fn characteristic(&self) -> u64 {
        match self {
            Coefficients::Integers => 0,
            Coefficients::Field(p) => *p,
        }
    }
}

impl std::fmt::Display for Coefficients {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coefficients::Integers => write!(f, "Z"),
            Coefficients::Field(0) => write!(f, "Q"),
            Coefficients::Field(p) => write!(f, "Z{p}"),
        }
    }
}

/// A predicted homology profile. Over a field, `free` holds dimensions and
/// torsion is empty.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormulaProfile {
    pub profile: HomologyProfile,
    pub reduced: bool,
    pub coefficients: Coefficients,
}

impl FormulaProfile {
    /// Same JSON shape as [`HomologyProfile`].
    pub fn to_json(&self) -> String {
        self.profile.to_json()
    }

    /// Field dimensions by degree.
    pub fn betti(&self) -> Vec<usize> {
        self.profile.free_ranks()
    }
}

fn check_dims(d: usize, n: usize) -> Result<()> {
    if d < 3 || n < 3 {
        return Err(Error::Domain(format!("need d, n >= 3, got d={d}, n={n}")));
    }
    Ok(())
}

/// Rank of the free part of `H̃_i(B(d,n); Z)`.
pub fn f(d: usize, n: usize, i: usize) -> usize {
    let odd = i % 2 == 1;
    if i + 2 == d && d == n && odd {
        2
    } else if (i + 2 == n && n != d && odd) || (i + 2 == d && d != n && odd) || (i + 4 == d + n && !odd) {
        1
    } else {
        0
    }
}

/// Number of `Z/2` summands of `H̃_i(B(d,n); Z)`.
pub fn t(d: usize, n: usize, i: usize) -> usize {
    let (lo, hi) = (d.min(n), d.max(n));
    let odd = i % 2 == 1;
    let first = odd && i >= 1 && i + 3 <= lo;
    let second = !odd && i + 2 >= hi && i + 5 <= d + n;
    usize::from(first || second)
}

/// Reduced integral homology of `B(d,n)`.
pub fn homology_formula(d: usize, n: usize) -> Result<FormulaProfile> {
    check_dims(d, n)?;
    let top = d + n - 4;
    let free: Vec<usize> = (0..=top).map(|i| f(d, n, i)).collect();
    let twos: Vec<usize> = (0..=top).map(|i| t(d, n, i)).collect();
    Ok(FormulaProfile {
        profile: HomologyProfile::from_counts(&free, &twos),
        reduced: true,
        coefficients: Coefficients::Integers,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Plus,
    Minus,
}

/// Homology of the plus or minus part of the hemispherical complex of
/// degree `dd` (for the plus part, cellular `RP^dd`), over `Z` or a field
/// of characteristic other than two.
pub fn rp_homology(dd: usize, part: Part, coefficients: Coefficients) -> Result<FormulaProfile> {
    if coefficients == Coefficients::Field(2) {
        return Err(Error::InvalidCharacteristic(2));
    }
    let mut free = vec![0usize; dd + 1];
    let mut twos = vec![0usize; dd + 1];
    let mut r_mod_2 = |i: usize| match coefficients {
        Coefficients::Integers => twos[i] += 1,
        Coefficients::Field(_) => {}
    };
    for i in 0..=dd {
        let odd = i % 2 == 1;
        match part {
            Part::Plus if i >= 1 && i < dd && odd => r_mod_2(i),
            Part::Minus if i < dd && !odd => r_mod_2(i),
            _ => {}
        }
    }
    match part {
        Part::Plus => {
            free[0] += 1;
            if dd % 2 == 1 {
                free[dd] += 1;
            }
        }
        Part::Minus => {
            if dd.is_multiple_of(2) {
                free[dd] += 1;
            }
        }
    }
    Ok(FormulaProfile { profile: HomologyProfile::from_counts(&free, &twos), reduced: false, coefficients })
}

/// Reduced homology of `B(d,n)` over a field of characteristic other than
/// two (`0` for `Q`).
pub fn freepart_formula(d: usize, n: usize, characteristic: u64) -> Result<FormulaProfile> {
    check_dims(d, n)?;
    if characteristic == 2 || (characteristic != 0 && !is_prime(characteristic)) {
        return Err(Error::InvalidCharacteristic(characteristic));
    }
    let top = d + n - 4;
    let free: Vec<usize> = (0..=top).map(|i| f(d, n, i)).collect();
    Ok(FormulaProfile {
        profile: HomologyProfile::from_counts(&free, &[]),
        reduced: true,
        coefficients: Coefficients::Field(characteristic),
    })
}

/// `Z/2` multiplicities of the torsion of `H_*(B(d,n); Z)` by degree,
/// trailing zeros dropped.
pub fn torsion_formula(d: usize, n: usize) -> Result<Vec<usize>> {
    check_dims(d, n)?;
    let (d, n) = (d.max(n), d.min(n));
    let mut out: Vec<usize> = (0..=d + n - 4)
        .map(|i| {
            let odd_range = i % 2 == 1 && 1 <= i && i + 3 <= n;
            let even_range = i % 2 == 0 && i + 2 >= d && i + 5 <= d + n;
            usize::from(odd_range || even_range)
        })
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    Ok(out)
}

/// Euler characteristic predicted by the free ranks.
pub fn euler_formula(d: usize, n: usize) -> Result<i64> {
    let h = homology_formula(d, n)?.profile.to_unreduced();
    Ok(h.free_ranks().iter().enumerate().map(|(k, &r)| if k % 2 == 0 { r as i64 } else { -(r as i64) }).sum())
}
