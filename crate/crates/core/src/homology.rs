//! Finitely generated chain complexes of free abelian groups and their
//! homology over `Z`, `Q` and `Z/p`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;
use crate::smith::{is_prime, rank_mod_p, smith_normal_form};

/// A bounded chain complex `C_0 <- C_1 <- ... <- C_top`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainComplex {
    ranks: Vec<usize>,
    // boundaries[k - 1] = ∂_k : C_k -> C_{k-1}
    boundaries: Vec<IntMatrix>,
}

impl ChainComplex {
    /// `boundaries[k - 1]` is `∂_k` of shape `ranks[k-1] x ranks[k]`.
    /// Verifies shapes and `∂∂ = 0`.
    pub fn new(ranks: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self> {
        let c = ChainComplex::new_unchecked(ranks, boundaries)?;
        for k in 2..c.ranks.len() {
            if !c.boundary(k - 1).mul(c.boundary(k)).is_zero() {
                return Err(Error::NotAComplex(format!("∂_{} ∂_{k} is nonzero", k - 1)));
            }
        }
        Ok(c)
    }

    /// Shape checks only.
    pub fn new_unchecked(mut ranks: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self> {
        if ranks.is_empty() {
            ranks.push(0);
        }
        if boundaries.len() + 1 != ranks.len() {
            return Err(Error::NotAComplex(format!(
                "{} boundary maps for {} degrees",
                boundaries.len(),
                ranks.len()
            )));
        }
        for (k, b) in boundaries.iter().enumerate() {
            if b.shape() != (ranks[k], ranks[k + 1]) {
                return Err(Error::NotAComplex(format!(
                    "∂_{} has shape {:?}, expected {:?}",
                    k + 1,
                    b.shape(),
                    (ranks[k], ranks[k + 1])
                )));
            }
        }
        Ok(ChainComplex { ranks, boundaries })
    }

    pub fn zero() -> Self {
        ChainComplex { ranks: vec![0], boundaries: Vec::new() }
    }

    /// Highest degree carried (possibly with rank zero).
    pub fn top(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn rank(&self, k: usize) -> usize {
        self.ranks.get(k).copied().unwrap_or(0)
    }

    /// `∂_k` for `1 <= k <= top`.
    pub fn boundary(&self, k: usize) -> &IntMatrix {
        &self.boundaries[k - 1]
    }

    /// `∂_k` for any `k`, zero outside the stored range.
    pub fn boundary_or_zero(&self, k: usize) -> IntMatrix {
        if k >= 1 && k <= self.top() {
            self.boundaries[k - 1].clone()
        } else {
            IntMatrix::zeros(if k == 0 { 0 } else { self.rank(k - 1) }, self.rank(k))
        }
    }

    pub fn boundaries(&self) -> &[IntMatrix] {
        &self.boundaries
    }

    /// Drops trailing degrees of rank zero.
    pub fn trimmed(&self) -> ChainComplex {
        let mut top = self.top();
        while top > 0 && self.ranks[top] == 0 {
            top -= 1;
        }
        ChainComplex { ranks: self.ranks[..=top].to_vec(), boundaries: self.boundaries[..top].to_vec() }
    }

    /// Degree shift: `C[s]_k = C_{k-s}`.
    pub fn shift(&self, s: usize) -> ChainComplex {
        let mut ranks = vec![0; s];
        ranks.extend_from_slice(&self.ranks);
        let boundaries = (1..ranks.len())
            .map(|k| {
                if k <= s {
                    IntMatrix::zeros(ranks[k - 1], ranks[k])
                } else {
                    self.boundaries[k - s - 1].clone()
                }
            })
            .collect();
        ChainComplex { ranks, boundaries }
    }

    /// Tensor product with the Koszul sign `∂(v⊗w) = ∂v⊗w + (-1)^i v⊗∂w`.
    /// The basis of degree `k` lists blocks `V_i ⊗ W_{k-i}` by ascending
    /// `i`, each in Kronecker order.
    pub fn tensor(&self, other: &ChainComplex) -> ChainComplex {
        let top = self.top() + other.top();
        let offsets = tensor_offsets(&self.ranks, &other.ranks, top);
        let ranks: Vec<usize> = offsets.iter().map(|o| o.last().copied().unwrap_or(0)).collect();
        let mut boundaries = Vec::with_capacity(top);
        for k in 1..=top {
            let mut triplets = Vec::new();
            for i in 0..=k.min(self.top()) {
                let j = k - i;
                if j > other.top() {
                    continue;
                }
                let col0 = offsets[k][i];
                if i >= 1 {
                    let block = self.boundary(i).kron(&IntMatrix::identity(other.rank(j)));
                    let row0 = offsets[k - 1][i - 1];
                    triplets.extend(block.triplets().map(|(r, c, v)| (row0 + r, col0 + c, v)));
                }
                if j >= 1 {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    let block = IntMatrix::identity(self.rank(i)).kron(other.boundary(j));
                    let row0 = offsets[k - 1][i];
                    triplets.extend(block.triplets().map(|(r, c, v)| (row0 + r, col0 + c, sign * v)));
                }
            }
            boundaries.push(
                IntMatrix::from_triplets(ranks[k - 1], ranks[k], &triplets).expect("blocks fit"),
            );
        }
        ChainComplex { ranks, boundaries }
    }

    /// Direct sum, degreewise block diagonal.
    pub fn direct_sum(&self, other: &ChainComplex) -> ChainComplex {
        let top = self.top().max(other.top());
        let ranks: Vec<usize> = (0..=top).map(|k| self.rank(k) + other.rank(k)).collect();
        let boundaries = (1..=top)
            .map(|k| {
                let a = self.boundary_or_zero(k);
                let b = other.boundary_or_zero(k);
                IntMatrix::block2(
                    &a,
                    &IntMatrix::zeros(a.rows(), b.cols()),
                    &IntMatrix::zeros(b.rows(), a.cols()),
                    &b,
                )
            })
            .collect();
        ChainComplex { ranks, boundaries }
    }

    /// Checks `ε ∂_1 = 0` for the augmentation `ε` sending each generator
    /// of degree zero to one.
    pub fn is_augmented(&self) -> bool {
        if self.top() == 0 {
            return true;
        }
        let d1 = self.boundary(1);
        (0..d1.cols()).all(|j| d1.column(j).iter().map(|&(_, v)| v).sum::<i64>() == 0)
    }
}

/// `offsets[k][i]` is the first index of block `V_i ⊗ W_{k-i}` in degree
/// `k`; the last entry of `offsets[k]` is the total rank.
pub(crate) fn tensor_offsets(v: &[usize], w: &[usize], top: usize) -> Vec<Vec<usize>> {
    (0..=top)
        .map(|k| {
            let mut off = Vec::with_capacity(k + 2);
            let mut acc = 0;
            for i in 0..=k {
                off.push(acc);
                let j = k - i;
                acc += v.get(i).copied().unwrap_or(0) * w.get(j).copied().unwrap_or(0);
            }
            off.push(acc);
            off
        })
        .collect()
}

/// One homology group `Z^free ⊕ Z/t_1 ⊕ ... ⊕ Z/t_r`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize)]
pub struct Group {
    pub free: usize,
    #[serde(serialize_with = "crate::bigjson::nat_seq")]
    pub torsion: Vec<BigUint>,
}

impl Group {
    pub fn is_trivial(&self) -> bool {
        self.free == 0 && self.torsion.is_empty()
    }
}

impl std::fmt::Display for Group {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.free {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|t| format!("Z_{t}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Homology groups by degree. Trailing trivial degrees are dropped so that
/// profiles compare by value.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HomologyProfile {
    groups: Vec<Group>,
}

impl HomologyProfile {
    pub fn new(mut groups: Vec<Group>) -> Self {
        for g in &mut groups {
            g.torsion.sort();
        }
        while groups.last().is_some_and(Group::is_trivial) {
            groups.pop();
        }
        HomologyProfile { groups }
    }

    /// Free ranks and `Z/2` multiplicities by degree.
    pub fn from_counts(free: &[usize], twos: &[usize]) -> Self {
        let len = free.len().max(twos.len());
        HomologyProfile::new(
            (0..len)
                .map(|k| Group {
                    free: free.get(k).copied().unwrap_or(0),
                    torsion: vec![BigUint::from(2u32); twos.get(k).copied().unwrap_or(0)],
                })
                .collect(),
        )
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn group(&self, k: usize) -> Group {
        self.groups.get(k).cloned().unwrap_or_default()
    }

    pub fn free_ranks(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.free).collect()
    }

    /// Reduced from unreduced homology of a nonempty augmented complex.
    pub fn to_reduced(&self) -> Result<Self> {
        let mut groups = self.groups.clone();
        match groups.first_mut() {
            Some(g) if g.free > 0 => g.free -= 1,
            _ => return Err(Error::Domain("H_0 has no free summand to remove".into())),
        }
        Ok(HomologyProfile::new(groups))
    }

    pub fn to_unreduced(&self) -> Self {
        let mut groups = self.groups.clone();
        if groups.is_empty() {
            groups.push(Group::default());
        }
        groups[0].free += 1;
        HomologyProfile::new(groups)
    }

    /// Shifts degrees up by `s`.
    pub fn shift(&self, s: usize) -> Self {
        let mut groups = vec![Group::default(); s];
        groups.extend(self.groups.iter().cloned());
        HomologyProfile::new(groups)
    }

    /// Degreewise direct sum.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let len = self.groups.len().max(other.groups.len());
        HomologyProfile::new(
            (0..len)
                .map(|k| {
                    let (a, b) = (self.group(k), other.group(k));
                    let mut torsion = a.torsion;
                    torsion.extend(b.torsion);
                    Group { free: a.free + b.free, torsion }
                })
                .collect(),
        )
    }

    /// Betti numbers over `Z/p` (or `Q` for `p = 0`) by the universal
    /// coefficient theorem.
    pub fn betti_numbers(&self, p: u64) -> Vec<usize> {
        let divisible = |g: &Group| {
            if p == 0 {
                0
            } else {
                let pp = BigUint::from(p);
                g.torsion.iter().filter(|t| (*t % &pp).is_zero()).count()
            }
        };
        let mut b: Vec<usize> = (0..self.groups.len() + 1)
            .map(|k| {
                let here = self.group(k);
                let below = if k == 0 { 0 } else { divisible(&self.group(k - 1)) };
                here.free + divisible(&here) + below
            })
            .collect();
        while b.last() == Some(&0) {
            b.pop();
        }
        b
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

impl Serialize for HomologyProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.groups.len()))?;
        for (k, g) in self.groups.iter().enumerate() {
            map.serialize_entry(&k.to_string(), g)?;
        }
        map.end()
    }
}

impl std::fmt::Display for HomologyProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.groups.iter().enumerate().map(|(k, g)| format!("H{k}={g}")).collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(", "))
        }
    }
}

/// Integral homology. With `reduced`, the complex is augmented by the map
/// sending every degree-zero generator to one, which must vanish on `∂_1`.
pub fn homology_z(c: &ChainComplex, reduced: bool) -> Result<HomologyProfile> {
    if reduced && !c.is_augmented() {
        return Err(Error::NotAComplex("augmentation does not vanish on ∂_1".into()));
    }
    let top = c.top();
    // factors[k] = invariant factors of ∂_k, k = 1..=top
    let mut factors: BTreeMap<usize, Vec<BigUint>> = BTreeMap::new();
    for k in 1..=top {
        factors.insert(k, smith_normal_form(c.boundary(k)));
    }
    let rank_of = |k: usize| -> usize {
        if k == 0 {
            usize::from(reduced && c.rank(0) > 0)
        } else {
            factors.get(&k).map_or(0, Vec::len)
        }
    };
    let groups = (0..=top)
        .map(|k| Group {
            free: c.rank(k) - rank_of(k) - rank_of(k + 1),
            torsion: factors
                .get(&(k + 1))
                .map(|f| f.iter().filter(|x| !x.is_one()).cloned().collect())
                .unwrap_or_default(),
        })
        .collect();
    Ok(HomologyProfile::new(groups))
}

/// Betti numbers over `Q` (`p = 0`) or `Z/p` for a prime `p`, trailing
/// zeros dropped.
pub fn homology_field(c: &ChainComplex, p: u64, reduced: bool) -> Result<Vec<usize>> {
    if p != 0 && !is_prime(p) {
        return Err(Error::InvalidCharacteristic(p));
    }
    if reduced && !c.is_augmented() {
        return Err(Error::NotAComplex("augmentation does not vanish on ∂_1".into()));
    }
    let top = c.top();
    let mut ranks = vec![usize::from(reduced && c.rank(0) > 0)];
    for k in 1..=top {
        ranks.push(if p == 0 { smith_normal_form(c.boundary(k)).len() } else { rank_mod_p(c.boundary(k), p)? });
    }
    ranks.push(0);
    let mut betti: Vec<usize> = (0..=top).map(|k| c.rank(k) - ranks[k] - ranks[k + 1]).collect();
    while betti.last() == Some(&0) {
        betti.pop();
    }
    Ok(betti)
}

pub fn euler_characteristic(c: &ChainComplex) -> i64 {
    c.ranks().iter().enumerate().map(|(k, &r)| if k % 2 == 0 { r as i64 } else { -(r as i64) }).sum()
}

/// Field Betti numbers predicted from integral homology.
pub fn universal_coefficients(h: &HomologyProfile, p: u64) -> Vec<usize> {
    h.betti_numbers(p)
}
