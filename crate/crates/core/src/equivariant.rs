//! Chain complexes with an involution.
//!
//! The plus part `C^+` is the quotient of `C` by the span of all
//! `x - ι(x)`, so that `c` and `ι(c)` are identified; the minus part `C^-`
//! divides out `x + ι(x)`. Both are computed over the integers and must
//! come out free.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homology::{homology_field, tensor_offsets, ChainComplex};
use crate::matrix::IntMatrix;
use crate::smith::{free_quotient, is_prime};

/// A chain complex with a degree-preserving involution commuting with `∂`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Z2ChainComplex {
    #[serde(flatten)]
    base: ChainComplex,
    involutions: Vec<IntMatrix>,
}

impl Z2ChainComplex {
    /// Verifies `ι² = 1` and `ι∂ = ∂ι` in every degree.
    pub fn new(base: ChainComplex, involutions: Vec<IntMatrix>) -> Result<Self> {
        if involutions.len() != base.ranks().len() {
            return Err(Error::NotAComplex("one involution per degree expected".into()));
        }
        for (k, iota) in involutions.iter().enumerate() {
            let r = base.rank(k);
            if iota.shape() != (r, r) {
                return Err(Error::NotAComplex(format!("involution in degree {k} has wrong shape")));
            }
            if iota.mul(iota) != IntMatrix::identity(r) {
                return Err(Error::NotAComplex(format!("ι² ≠ 1 in degree {k}")));
            }
            if k >= 1 && involutions[k - 1].mul(base.boundary(k)) != base.boundary(k).mul(iota) {
                return Err(Error::NotAComplex(format!("ι∂ ≠ ∂ι in degree {k}")));
            }
        }
        Ok(Z2ChainComplex { base, involutions })
    }

    pub fn base(&self) -> &ChainComplex {
        &self.base
    }

    pub fn involution(&self, k: usize) -> &IntMatrix {
        &self.involutions[k]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// The cell structure on `S^D` with cells `σ_i^+`, `σ_i^-` in each degree
/// `0..=D` (basis order `+, -`), `∂σ_i^ε = σ_{i-1}^ε + (-1)^i σ_{i-1}^{-ε}`
/// and the antipodal involution `σ^+ <-> σ^-`.
pub fn hemispherical(d: usize) -> Z2ChainComplex {
    let ranks = vec![2; d + 1];
    let boundaries = (1..=d)
        .map(|i| {
            let s = if i % 2 == 0 { 1 } else { -1 };
            IntMatrix::from_dense(&[vec![1, s], vec![s, 1]])
        })
        .collect();
    let swap = IntMatrix::from_dense(&[vec![0, 1], vec![1, 0]]);
    Z2ChainComplex::new(
        ChainComplex::new(ranks, boundaries).expect("hemispherical complex"),
        vec![swap; d + 1],
    )
    .expect("antipodal involution")
}

/// `V ⊗ W` with the diagonal involution `ι(v ⊗ w) = ι(v) ⊗ ι(w)`.
pub fn tensor(v: &Z2ChainComplex, w: &Z2ChainComplex) -> Z2ChainComplex {
    let base = v.base.tensor(&w.base);
    let top = base.top();
    let offsets = tensor_offsets(v.base.ranks(), w.base.ranks(), top);
    let involutions = (0..=top)
        .map(|k| {
            let mut triplets = Vec::new();
            for i in 0..=k.min(v.base.top()) {
                let j = k - i;
                if j > w.base.top() {
                    continue;
                }
                let block = v.involutions[i].kron(&w.involutions[j]);
                let o = offsets[k][i];
                triplets.extend(block.triplets().map(|(r, c, x)| (o + r, o + c, x)));
            }
            IntMatrix::from_triplets(base.rank(k), base.rank(k), &triplets).expect("blocks fit")
        })
        .collect();
    let base = ChainComplex::new(base.ranks().to_vec(), base.boundaries().to_vec())
        .expect("tensor product of complexes");
    Z2ChainComplex::new(base, involutions).expect("tensor product of involutions")
}

fn quotient(c: &Z2ChainComplex, sign: i64) -> Result<ChainComplex> {
    let top = c.base.top();
    let mut quotients = Vec::with_capacity(top + 1);
    for k in 0..=top {
        let r = c.base.rank(k);
        let relations = IntMatrix::identity(r).add(&c.involutions[k].scale(-sign));
        quotients.push(free_quotient(&relations)?);
    }
    let ranks = quotients.iter().map(|q| q.projection.rows()).collect();
    let boundaries = (1..=top)
        .map(|k| quotients[k - 1].projection.mul(c.base.boundary(k)).mul(&quotients[k].section))
        .collect();
    ChainComplex::new(ranks, boundaries)
}

/// `C^+ = C / (1 - ι)C`.
pub fn plus_part(c: &Z2ChainComplex) -> Result<ChainComplex> {
    quotient(c, 1)
}

/// `C^- = C / (1 + ι)C`.
pub fn minus_part(c: &Z2ChainComplex) -> Result<ChainComplex> {
    quotient(c, -1)
}

/// A complex `W_j = L_j × L_j` with `∂(w0, w1) = (p w0 + q w1, p w1 + q w0)`
/// and `ι(w0, w1) = (w1, w0)`. `p[j-1]`, `q[j-1]` map `L_j -> L_{j-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuredZ2Complex {
    l: Vec<usize>,
    p: Vec<IntMatrix>,
    q: Vec<IntMatrix>,
}

impl StructuredZ2Complex {
    /// Verifies shapes and the relations `p² + q² = 0`, `pq + qp = 0`.
    pub fn new(l: Vec<usize>, p: Vec<IntMatrix>, q: Vec<IntMatrix>) -> Result<Self> {
        let s = StructuredZ2Complex::new_unchecked(l, p, q)?;
        for j in 2..s.l.len() {
            let (p1, q1, p2, q2) = (&s.p[j - 2], &s.q[j - 2], &s.p[j - 1], &s.q[j - 1]);
            if !p1.mul(p2).add(&q1.mul(q2)).is_zero() {
                return Err(Error::Relation(format!("p² + q² ≠ 0 on L_{j}")));
            }
            if !p1.mul(q2).add(&q1.mul(p2)).is_zero() {
                return Err(Error::Relation(format!("pq + qp ≠ 0 on L_{j}")));
            }
        }
        Ok(s)
    }

    /// Shape checks only.
    pub fn new_unchecked(mut l: Vec<usize>, p: Vec<IntMatrix>, q: Vec<IntMatrix>) -> Result<Self> {
        if l.is_empty() {
            l.push(0);
        }
        if p.len() + 1 != l.len() || q.len() + 1 != l.len() {
            return Err(Error::Relation("one p and one q per positive degree expected".into()));
        }
        for j in 1..l.len() {
            let shape = (l[j - 1], l[j]);
            if p[j - 1].shape() != shape || q[j - 1].shape() != shape {
                return Err(Error::Relation(format!("p or q on L_{j} has wrong shape")));
            }
        }
        Ok(StructuredZ2Complex { l, p, q })
    }

    /// `L_j = Z`, `p = 1`, `q = (-1)^j` for `0 <= j <= n`: the hemispherical
    /// complex of `S^n`.
    pub fn hemispherical(n: usize) -> Self {
        let p = (1..=n).map(|_| IntMatrix::identity(1)).collect();
        let q = (1..=n).map(|j| IntMatrix::identity(1).scale(if j % 2 == 0 { 1 } else { -1 })).collect();
        StructuredZ2Complex::new(vec![1; n + 1], p, q).expect("hemispherical relations")
    }

    /// Highest degree carried.
    pub fn top(&self) -> usize {
        self.l.len() - 1
    }

    pub fn l(&self) -> &[usize] {
        &self.l
    }

    pub fn rank(&self, j: usize) -> usize {
        self.l.get(j).copied().unwrap_or(0)
    }

    /// `p : L_j -> L_{j-1}`, zero outside the stored range.
    pub fn p(&self, j: usize) -> IntMatrix {
        self.map_or_zero(&self.p, j)
    }

    pub fn q(&self, j: usize) -> IntMatrix {
        self.map_or_zero(&self.q, j)
    }

    fn map_or_zero(&self, maps: &[IntMatrix], j: usize) -> IntMatrix {
        if j >= 1 && j <= self.top() {
            maps[j - 1].clone()
        } else {
            IntMatrix::zeros(if j == 0 { 0 } else { self.rank(j - 1) }, self.rank(j))
        }
    }

    /// The complex `(L, p + sign·q)`.
    fn signed(&self, sign: i64) -> ChainComplex {
        let boundaries = (1..=self.top()).map(|j| self.p[j - 1].add(&self.q[j - 1].scale(sign))).collect();
        ChainComplex::new(self.l.clone(), boundaries).expect("(p ± q)² = p² + q² ± (pq + qp) = 0")
    }

    /// `(L, p + q)`, isomorphic to the plus part.
    pub fn plus_complex(&self) -> ChainComplex {
        self.signed(1)
    }

    /// `(L, p - q)`, isomorphic to the minus part.
    pub fn minus_complex(&self) -> ChainComplex {
        self.signed(-1)
    }
}

/// The underlying [`Z2ChainComplex`], with all `(w, 0)` generators listed
/// before all `(0, w)` generators in each degree.
pub fn structured_to_z2(s: &StructuredZ2Complex) -> Result<Z2ChainComplex> {
    let s = StructuredZ2Complex::new(s.l.clone(), s.p.clone(), s.q.clone())?;
    let ranks: Vec<usize> = s.l.iter().map(|r| 2 * r).collect();
    let boundaries = (1..=s.top())
        .map(|j| IntMatrix::block2(&s.p[j - 1], &s.q[j - 1], &s.q[j - 1], &s.p[j - 1]))
        .collect();
    let involutions = s
        .l
        .iter()
        .map(|&r| {
            let z = IntMatrix::zeros(r, r);
            let i = IntMatrix::identity(r);
            IntMatrix::block2(&z, &i, &i, &z)
        })
        .collect();
    Z2ChainComplex::new(ChainComplex::new(ranks, boundaries)?, involutions)
}

fn add_betti(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = (0..a.len().max(b.len()))
        .map(|k| a.get(k).copied().unwrap_or(0) + b.get(k).copied().unwrap_or(0))
        .collect();
    while out.last() == Some(&0) {
        out.pop();
    }
    out
}

/// Over a field of characteristic `p ≠ 2` (`0` for `Q`), checks that
/// `(V ⊗ W)^+` has the ranks and Betti numbers of
/// `V^+ ⊗ W^+ ⊕ V^- ⊗ W^-`.
pub fn split_decomposition_check(v: &Z2ChainComplex, w: &Z2ChainComplex, p: u64) -> Result<bool> {
    if p == 2 || (p != 0 && !is_prime(p)) {
        return Err(Error::InvalidCharacteristic(p));
    }
    let whole = plus_part(&tensor(v, w))?;
    let pp = plus_part(v)?.tensor(&plus_part(w)?);
    let mm = minus_part(v)?.tensor(&minus_part(w)?);
    let split = pp.direct_sum(&mm);
    let ranks_agree = (0..=whole.top().max(split.top())).all(|k| whole.rank(k) == split.rank(k));
    let lhs = homology_field(&whole, p, false)?;
    let rhs = add_betti(&homology_field(&pp, p, false)?, &homology_field(&mm, p, false)?);
    Ok(ranks_agree && lhs == rhs)
}
