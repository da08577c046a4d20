//! The combinatorial model of `B(d,n)`.
//!
//! Simplices of `B(d,n)` are caterpillar trees with leaves `p1..pd` and
//! `q1..qn`. Reading the leaves attached to each internal vertex along the
//! internal path gives a *balanced composition* of `P ∪ Q`: an ordered set
//! partition whose first and last blocks meet both `P` and `Q`. Balanced
//! compositions are in bijection with chains of `B'(P) × B'(Q)`, where
//! `B'(S)` is the poset of proper nonempty subsets of `S`, and a tree
//! corresponds to a composition together with its reverse. The reverse
//! corresponds to complementing every element of the chain, so `B(d,n)` is
//! the order complex of `B'(P) × B'(Q)` modulo simultaneous complement.
//!
//! Leaf and subset sets are bitmasks: bit `i` of a P-mask is `p(i+1)`, bit
//! `j` of a Q-mask is `q(j+1)`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;

use crate::canonical::CanonicalMatrix;
use crate::error::{Error, Result};
use crate::homology::ChainComplex;
use crate::matrix::IntMatrix;
use crate::trop::{self, Rational, TropPoint, TropSegment};

/// Largest `d` or `n` representable by the bitmask encoding.
pub const MAX_LABELS: usize = 63;

/// Default refusal threshold for complex construction.
pub const DEFAULT_SIMPLEX_CAP: u128 = 5_000_000;

fn full_mask(k: usize) -> u64 {
    (1u64 << k) - 1
}

fn check_sizes(d: usize, n: usize) -> Result<()> {
    if d == 0 || n == 0 || d > MAX_LABELS || n > MAX_LABELS {
        return Err(Error::Domain(format!("label counts d={d}, n={n} out of range 1..={MAX_LABELS}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LeafLabel {
    P(usize),
    Q(usize),
}

impl fmt::Display for LeafLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LeafLabel::P(i) => write!(f, "p{i}"),
            LeafLabel::Q(j) => write!(f, "q{j}"),
        }
    }
}

/// A vertex `(S,T)` of `B'(P) × B'(Q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    pub s: u64,
    pub t: u64,
}

impl Bipartition {
    pub fn new(d: usize, n: usize, s: u64, t: u64) -> Result<Self> {
        check_sizes(d, n)?;
        if s == 0 || s & !full_mask(d) != 0 || s == full_mask(d) {
            return Err(Error::Domain(format!("S-mask {s:#b} is not a proper nonempty subset of P")));
        }
        if t == 0 || t & !full_mask(n) != 0 || t == full_mask(n) {
            return Err(Error::Domain(format!("T-mask {t:#b} is not a proper nonempty subset of Q")));
        }
        Ok(Bipartition { s, t })
    }

    /// Builds from one-based index lists.
    pub fn from_indices(d: usize, n: usize, s: &[usize], t: &[usize]) -> Result<Self> {
        let mask = |idx: &[usize], k: usize| -> Result<u64> {
            idx.iter().try_fold(0u64, |m, &i| {
                if i == 0 || i > k {
                    Err(Error::Domain(format!("leaf index {i} out of range 1..={k}")))
                } else {
                    Ok(m | 1 << (i - 1))
                }
            })
        };
        Bipartition::new(d, n, mask(s, d)?, mask(t, n)?)
    }

    pub fn complement(&self, d: usize, n: usize) -> Bipartition {
        Bipartition { s: full_mask(d) & !self.s, t: full_mask(n) & !self.t }
    }

    /// Product order `S ⊆ S'` and `T ⊆ T'`.
    pub fn le(&self, other: &Bipartition) -> bool {
        self.s & !other.s == 0 && self.t & !other.t == 0
    }

    pub fn lt(&self, other: &Bipartition) -> bool {
        self != other && self.le(other)
    }

    pub fn comparable(&self, other: &Bipartition) -> bool {
        self.le(other) || other.le(self)
    }

    /// The orbit representative is the element whose P-part contains `p1`.
    pub fn orbit_rep(&self, d: usize, n: usize) -> Bipartition {
        if self.s & 1 == 1 {
            *self
        } else {
            self.complement(d, n)
        }
    }

    pub fn s_indices(&self) -> Vec<usize> {
        bits(self.s)
    }

    pub fn t_indices(&self) -> Vec<usize> {
        bits(self.t)
    }
}

/// One-based positions of set bits.
fn bits(mask: u64) -> Vec<usize> {
    (0..64).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

#[derive(Serialize)]
struct BipartitionJson {
    #[serde(rename = "S")]
    s: Vec<usize>,
    #[serde(rename = "T")]
    t: Vec<usize>,
}

/// A block of a composition: a set of leaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Block {
    pub p: u64,
    pub q: u64,
}

impl Block {
    fn is_empty(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    fn is_balanced(&self) -> bool {
        self.p != 0 && self.q != 0
    }

    /// Integer encoding: `p_i -> i`, `q_j -> d + j`, ascending.
    pub fn encode(&self, d: usize) -> Vec<u32> {
        bits(self.p)
            .into_iter()
            .map(|i| i as u32)
            .chain(bits(self.q).into_iter().map(|j| (d + j) as u32))
            .collect()
    }

    pub fn labels(&self) -> Vec<LeafLabel> {
        bits(self.p)
            .into_iter()
            .map(LeafLabel::P)
            .chain(bits(self.q).into_iter().map(LeafLabel::Q))
            .collect()
    }
}

/// Lexicographic comparison of the encodings of two blocks.
fn block_cmp(a: &Block, b: &Block) -> Ordering {
    // Encoded p-values all lie below q-values, so comparing the p-bit
    // sequences and then the q-bit sequences matches the list comparison.
    let mut ea = BitIter { p: a.p, q: a.q };
    let mut eb = BitIter { p: b.p, q: b.q };
    loop {
        match (ea.next(), eb.next()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x != y => return x.cmp(&y),
            _ => {}
        }
    }
}

struct BitIter {
    p: u64,
    q: u64,
}

impl Iterator for BitIter {
    // (0, i) for p-bits, (1, j) for q-bits
    type Item = (u8, u32);
    fn next(&mut self) -> Option<Self::Item> {
        if self.p != 0 {
            let i = self.p.trailing_zeros();
            self.p &= self.p - 1;
            Some((0, i))
        } else if self.q != 0 {
            let j = self.q.trailing_zeros();
            self.q &= self.q - 1;
            Some((1, j))
        } else {
            None
        }
    }
}

fn blocks_cmp(a: &[Block], b: &[Block]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match block_cmp(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// An ordered set partition of `P ∪ Q` whose first and last blocks meet both
/// `P` and `Q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BalancedComposition {
    d: usize,
    n: usize,
    blocks: Vec<Block>,
}

impl BalancedComposition {
    pub fn new(d: usize, n: usize, blocks: Vec<Block>) -> Result<Self> {
        check_sizes(d, n)?;
        let (mut p, mut q) = (0u64, 0u64);
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::Domain("empty block".into()));
            }
            if b.p & p != 0 || b.q & q != 0 {
                return Err(Error::Domain("blocks overlap".into()));
            }
            p |= b.p;
            q |= b.q;
        }
        if p != full_mask(d) || q != full_mask(n) {
            return Err(Error::Domain("blocks do not cover P and Q".into()));
        }
        let first_ok = blocks.first().is_some_and(Block::is_balanced);
        let last_ok = blocks.last().is_some_and(Block::is_balanced);
        if !first_ok || !last_ok {
            return Err(Error::Domain("first and last blocks must meet both P and Q".into()));
        }
        Ok(BalancedComposition { d, n, blocks })
    }

    /// Parses `"[p5 q3 | p1 | p2 q2]"`; brackets and whitespace are optional,
    /// so `"p5q3|p1|p2q2"` is accepted too.
    pub fn parse(d: usize, n: usize, text: &str) -> Result<Self> {
        let body = text.trim().trim_start_matches('[').trim_end_matches(']');
        let mut blocks = Vec::new();
        for part in body.split('|') {
            let mut block = Block { p: 0, q: 0 };
            let chars: Vec<char> = part.chars().filter(|c| !c.is_whitespace()).collect();
            let mut k = 0;
            while k < chars.len() {
                let kind = chars[k];
                let start = k + 1;
                let mut end = start;
                while end < chars.len() && chars[end].is_ascii_digit() {
                    end += 1;
                }
                let idx: usize = chars[start..end]
                    .iter()
                    .collect::<String>()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad leaf label in {part:?}")))?;
                match kind {
                    'p' if (1..=d).contains(&idx) => block.p |= 1 << (idx - 1),
                    'q' if (1..=n).contains(&idx) => block.q |= 1 << (idx - 1),
                    _ => return Err(Error::Parse(format!("bad leaf label {kind}{idx}"))),
                }
                k = end;
            }
            blocks.push(block);
        }
        BalancedComposition::new(d, n, blocks)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn reverse(&self) -> BalancedComposition {
        let mut blocks = self.blocks.clone();
        blocks.reverse();
        BalancedComposition { d: self.d, n: self.n, blocks }
    }

    pub fn encode(&self) -> Vec<Vec<u32>> {
        self.blocks.iter().map(|b| b.encode(self.d)).collect()
    }
}

impl fmt::Display for BalancedComposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, b) in self.blocks.iter().enumerate() {
            if k > 0 {
                write!(f, " | ")?;
            }
            let labels: Vec<String> = b.labels().iter().map(ToString::to_string).collect();
            write!(f, "{}", labels.join(" "))?;
        }
        write!(f, "]")
    }
}

/// The balanced composition of a strict chain `(S1,T1) < ... < (Sk,Tk)`.
pub fn chain_to_composition(d: usize, n: usize, chain: &[Bipartition]) -> Result<BalancedComposition> {
    check_sizes(d, n)?;
    for x in chain {
        Bipartition::new(d, n, x.s, x.t).map_err(|e| Error::NotAChain(e.to_string()))?;
    }
    for w in chain.windows(2) {
        if !w[0].lt(&w[1]) {
            return Err(Error::NotAChain(format!("{:?} is not below {:?}", w[0], w[1])));
        }
    }
    let mut blocks = Vec::with_capacity(chain.len() + 1);
    let (mut ps, mut qs) = (0u64, 0u64);
    for x in chain.iter().copied().chain([Bipartition { s: full_mask(d), t: full_mask(n) }]) {
        blocks.push(Block { p: x.s & !ps, q: x.t & !qs });
        ps = x.s;
        qs = x.t;
    }
    BalancedComposition::new(d, n, blocks)
}

/// Inverse of [`chain_to_composition`]: the proper prefix unions.
pub fn composition_to_chain(c: &BalancedComposition) -> Vec<Bipartition> {
    let (mut s, mut t) = (0u64, 0u64);
    let mut chain = Vec::with_capacity(c.blocks.len().saturating_sub(1));
    for b in &c.blocks[..c.blocks.len() - 1] {
        s |= b.p;
        t |= b.q;
        chain.push(Bipartition { s, t });
    }
    chain
}

/// The smaller of `c` and its reverse under the block encoding.
pub fn canonical_orbit(c: &BalancedComposition) -> BalancedComposition {
    let rev = c.reverse();
    if blocks_cmp(&rev.blocks, &c.blocks) == Ordering::Less {
        rev
    } else {
        c.clone()
    }
}

/// Whether `c` is its own orbit representative.
fn is_canonical_blocks(blocks: &[Block]) -> bool {
    let k = blocks.len();
    for i in 0..k {
        match block_cmp(&blocks[i], &blocks[k - 1 - i]) {
            Ordering::Less => return true,
            Ordering::Greater => return false,
            Ordering::Equal => {}
        }
    }
    true
}

/// The tree of a canonical matrix of Barvinok rank at most two, as the
/// canonical orbit of its balanced composition.
///
/// Internal vertices are the columns together with the breakpoints of the
/// segment spanned by the generating pair, ordered by the sweep parameter.
/// Leaf `q_k` sits at column `k`. Leaf `p_i` sits at the vertex closest (in
/// sweep parameter) to the origin among those maximizing coordinate `i`.
pub fn tree_from_matrix(cm: &CanonicalMatrix) -> Result<BalancedComposition> {
    let (d, n) = (cm.d, cm.n);
    if d < 2 || n < 2 {
        return Err(Error::Domain(format!("trees need d, n >= 2 (got d={d}, n={n})")));
    }
    check_sizes(d, n)?;
    let m = cm.to_rational_matrix();
    let pair = trop::barvinok_rank_le2(&m).ok_or(Error::Rank)?;
    let cols = m.columns();
    let (x, y) = (&cols[pair.first], &cols[pair.second]);
    let seg = trop::trop_segment(x, y);

    let mut vertices: BTreeMap<Rational, TropPoint> = BTreeMap::new();
    let mut insert = |lam: Rational, pt: &TropPoint| -> Result<()> {
        match vertices.get(&lam) {
            Some(existing) if existing != pt => {
                Err(Error::Internal(format!("parameter {lam} hit by two points")))
            }
            Some(_) => Ok(()),
            None => {
                vertices.insert(lam, pt.clone());
                Ok(())
            }
        }
    };
    for (pt, lam) in seg.pseudovertices.iter().zip(&seg.breakparams) {
        insert(lam.clone(), pt)?;
    }
    let col_params: Vec<Rational> = cols.iter().map(|c| TropSegment::param_of(x, y, c)).collect();
    for (c, lam) in cols.iter().zip(&col_params) {
        insert(lam.clone(), c)?;
    }

    let origin = trop::column_min_point(&m);
    let lam0 = TropSegment::param_of(x, y, &origin);
    if vertices.get(&lam0) != Some(&origin) {
        return Err(Error::Internal("origin is not an internal vertex".into()));
    }

    let params: Vec<Rational> = vertices.keys().cloned().collect();
    let points: Vec<TropPoint> = vertices.into_values().collect();
    let mut blocks = vec![Block { p: 0, q: 0 }; points.len()];
    for (k, lam) in col_params.iter().enumerate() {
        let v = params.binary_search(lam).expect("column parameter registered");
        blocks[v].q |= 1 << k;
    }
    for i in 0..d {
        let best = points.iter().map(|p| &p.coords()[i]).max().expect("nonempty");
        let maximizers: Vec<usize> =
            (0..points.len()).filter(|&v| &points[v].coords()[i] == best).collect();
        let contiguous = maximizers.windows(2).all(|w| w[1] == w[0] + 1);
        if !contiguous {
            return Err(Error::Internal(format!("maximizers of coordinate {} are not a subpath", i + 1)));
        }
        let v = *maximizers
            .iter()
            .min_by_key(|&&v| {
                let dist = &params[v] - &lam0;
                if dist < Rational::from_integer(0.into()) {
                    -dist
                } else {
                    dist
                }
            })
            .expect("nonempty");
        blocks[v].p |= 1 << i;
    }
    if blocks.iter().any(Block::is_empty) {
        return Err(Error::Internal("internal vertex without leaves".into()));
    }
    let c = BalancedComposition::new(d, n, blocks)
        .map_err(|e| Error::Internal(format!("tree is not a balanced caterpillar: {e}")))?;
    Ok(canonical_orbit(&c))
}

/// The order complex of `B'(P) × B'(Q)`, optionally modulo simultaneous
/// complement.
///
/// Simplices are stored as ascending vertex-id lists, grouped by dimension
/// and sorted. In the quotient, vertex `k` is the orbit of `vertices[k]`,
/// the representative containing `p1`.
#[derive(Clone, Debug)]
pub struct QuotientComplex {
    pub d: usize,
    pub n: usize,
    quotiented: bool,
    vertices: Vec<Bipartition>,
    vertex_index: HashMap<Bipartition, u32>,
    simplices: Vec<Vec<Vec<u32>>>,
}

#[derive(Serialize)]
struct ComplexJson<'a> {
    d: usize,
    n: usize,
    vertices: Vec<BipartitionJson>,
    simplices_by_dim: &'a [Vec<Vec<u32>>],
}

impl QuotientComplex {
    pub fn is_quotient(&self) -> bool {
        self.quotiented
    }

    pub fn vertices(&self) -> &[Bipartition] {
        &self.vertices
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<u32>] {
        self.simplices.get(dim).map_or(&[], Vec::as_slice)
    }

    pub fn dimension(&self) -> usize {
        self.simplices.len() - 1
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.counts()
            .iter()
            .enumerate()
            .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
            .sum()
    }

    /// Vertex id of the (orbit of the) given bipartition.
    pub fn vertex_id(&self, x: &Bipartition) -> Option<u32> {
        let key = if self.quotiented { x.orbit_rep(self.d, self.n) } else { *x };
        self.vertex_index.get(&key).copied()
    }

    /// Locates the simplex of a composition: `(dimension, index)`.
    pub fn find_simplex(&self, c: &BalancedComposition) -> Option<(usize, usize)> {
        let chain = composition_to_chain(c);
        if chain.is_empty() {
            return None;
        }
        let mut ids = chain.iter().map(|x| self.vertex_id(x)).collect::<Option<Vec<u32>>>()?;
        ids.sort_unstable();
        let dim = ids.len() - 1;
        self.simplices(dim).binary_search(&ids).ok().map(|i| (dim, i))
    }

    /// Lifts a simplex to its canonical chain representative.
    ///
    /// Each vertex orbit has exactly one element comparable to a fixed
    /// representative of the first vertex; those elements form the chain.
    pub fn orbit_rep(&self, dim: usize, idx: usize) -> Result<BalancedComposition> {
        let ids = &self.simplices(dim)[idx];
        let anchor = self.vertices[ids[0] as usize];
        let mut chain = vec![anchor];
        for &v in &ids[1..] {
            let x = self.vertices[v as usize];
            let choice = if !self.quotiented || x.comparable(&anchor) {
                x
            } else {
                x.complement(self.d, self.n)
            };
            if !choice.comparable(&anchor) {
                return Err(Error::Internal("simplex does not lift to a chain".into()));
            }
            chain.push(choice);
        }
        chain.sort_by(|a, b| {
            if a == b {
                Ordering::Equal
            } else if a.le(b) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        });
        let c = chain_to_composition(self.d, self.n, &chain)?;
        Ok(if self.quotiented { canonical_orbit(&c) } else { c })
    }

    /// Simplicial boundary `∂_k` as a sparse matrix (`k >= 1`).
    pub fn boundary_matrix(&self, k: usize) -> IntMatrix {
        let rows = self.simplices(k - 1);
        let index: HashMap<&[u32], usize> =
            rows.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let cols = self.simplices(k);
        let mut m = IntMatrix::zeros(rows.len(), cols.len());
        let mut face = Vec::with_capacity(k);
        for (j, s) in cols.iter().enumerate() {
            let mut col = Vec::with_capacity(k + 1);
            for i in 0..s.len() {
                face.clear();
                face.extend(s.iter().enumerate().filter(|&(l, _)| l != i).map(|(_, &v)| v));
                let r = index[face.as_slice()];
                col.push((r, if i % 2 == 0 { 1 } else { -1 }));
            }
            m.set_column(j, col);
        }
        m
    }

    /// The simplicial chain complex.
    pub fn chain_complex(&self) -> Result<ChainComplex> {
        let ranks = self.counts();
        let boundaries = (1..ranks.len()).map(|k| self.boundary_matrix(k)).collect();
        ChainComplex::new(ranks, boundaries)
    }

    pub fn to_json(&self) -> String {
        let vertices = self
            .vertices
            .iter()
            .map(|v| BipartitionJson { s: v.s_indices(), t: v.t_indices() })
            .collect();
        serde_json::to_string(&ComplexJson {
            d: self.d,
            n: self.n,
            vertices,
            simplices_by_dim: &self.simplices,
        })
        .expect("serializable")
    }
}

/// All vertices of `B'(P) × B'(Q)`, ascending by `(S, T)` masks.
fn product_vertices(d: usize, n: usize) -> Vec<Bipartition> {
    let mut v = Vec::new();
    for s in 1..full_mask(d) {
        for t in 1..full_mask(n) {
            v.push(Bipartition { s, t });
        }
    }
    v
}

fn binom(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Ordered partitions of `m` labelled elements into exactly `k` nonempty
/// blocks.
fn surjections(m: u128, k: u128) -> u128 {
    let mut total: i128 = 0;
    for j in 0..=k {
        let term = binom(k, j) as i128 * ((k - j) as i128).pow(m as u32);
        total += if j % 2 == 0 { term } else { -term };
    }
    total as u128
}

/// Number of chains of `B'(P) × B'(Q)` with `dim + 1` elements, counted as
/// balanced compositions into `dim + 2` blocks.
pub fn chain_counts(d: usize, n: usize) -> Vec<u128> {
    let (d, n) = (d as u128, n as u128);
    let top = (d + n).saturating_sub(4) as usize;
    let mut counts = Vec::new();
    for dim in 0..=top {
        let blocks = dim as u128 + 2;
        let mut total = 0u128;
        for a in 1..=d {
            for b in 1..=n {
                for c in 1..=d - a {
                    for e in 1..=n - b {
                        let rest = (d - a - c) + (n - b - e);
                        let middle = if blocks == 2 {
                            u128::from(rest == 0)
                        } else {
                            surjections(rest, blocks - 2)
                        };
                        total += binom(d, a) * binom(n, b) * binom(d - a, c) * binom(n - b, e) * middle;
                    }
                }
            }
        }
        counts.push(total);
    }
    counts
}

fn check_build(d: usize, n: usize, cap: u128, quotiented: bool) -> Result<()> {
    if d < 3 || n < 3 {
        return Err(Error::Domain(format!("complex needs d, n >= 3 (got d={d}, n={n})")));
    }
    if d > 16 || n > 16 {
        return Err(Error::Resource { estimated: u128::MAX, cap });
    }
    let total: u128 = chain_counts(d, n).iter().sum();
    let estimated = if quotiented { total / 2 } else { total };
    if estimated > cap {
        return Err(Error::Resource { estimated, cap });
    }
    Ok(())
}

/// Visits every strict chain of `B'(P) × B'(Q)` as an ascending list of
/// vertex ids.
fn for_each_chain(vertices: &[Bipartition], mut visit: impl FnMut(&[u32])) {
    let ups: Vec<Vec<u32>> = vertices
        .iter()
        .map(|x| {
            (0..vertices.len() as u32)
                .filter(|&w| x.lt(&vertices[w as usize]))
                .collect()
        })
        .collect();
    let mut stack: Vec<u32> = Vec::new();
    fn rec(ups: &[Vec<u32>], stack: &mut Vec<u32>, visit: &mut dyn FnMut(&[u32])) {
        visit(stack);
        let last = *stack.last().expect("nonempty");
        for &w in &ups[last as usize] {
            stack.push(w);
            rec(ups, stack, visit);
            stack.pop();
        }
    }
    for v in 0..vertices.len() as u32 {
        stack.push(v);
        rec(&ups, &mut stack, &mut visit);
        stack.pop();
    }
}

/// The simplicial model of `B(d,n)`: chains modulo simultaneous complement.
pub fn build_complex(d: usize, n: usize) -> Result<QuotientComplex> {
    build_complex_with_cap(d, n, DEFAULT_SIMPLEX_CAP)
}

pub fn build_complex_with_cap(d: usize, n: usize, cap: u128) -> Result<QuotientComplex> {
    check_build(d, n, cap, true)?;
    let all = product_vertices(d, n);
    let reps: Vec<Bipartition> = all.iter().copied().filter(|x| x.s & 1 == 1).collect();
    let vertex_index: HashMap<Bipartition, u32> =
        reps.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
    let orbit_of: Vec<u32> = all.iter().map(|x| vertex_index[&x.orbit_rep(d, n)]).collect();

    let mut simplices: Vec<Vec<Vec<u32>>> = vec![Vec::new(); d + n - 3];
    let mut blocks = Vec::with_capacity(d + n);
    for_each_chain(&all, |chain| {
        blocks.clear();
        let (mut ps, mut qs) = (0u64, 0u64);
        for &v in chain {
            let x = all[v as usize];
            blocks.push(Block { p: x.s & !ps, q: x.t & !qs });
            ps = x.s;
            qs = x.t;
        }
        blocks.push(Block { p: full_mask(d) & !ps, q: full_mask(n) & !qs });
        if !is_canonical_blocks(&blocks) {
            return;
        }
        let mut ids: Vec<u32> = chain.iter().map(|&v| orbit_of[v as usize]).collect();
        ids.sort_unstable();
        simplices[chain.len() - 1].push(ids);
    });
    for s in &mut simplices {
        s.sort_unstable();
    }
    Ok(QuotientComplex { d, n, quotiented: true, vertices: reps, vertex_index, simplices })
}

/// The full order complex of `B'(P) × B'(Q)` without the quotient; a
/// subdivision of the product of spheres `S^(d-2) × S^(n-2)`.
pub fn build_unquotiented(d: usize, n: usize) -> Result<QuotientComplex> {
    build_unquotiented_with_cap(d, n, DEFAULT_SIMPLEX_CAP)
}

pub fn build_unquotiented_with_cap(d: usize, n: usize, cap: u128) -> Result<QuotientComplex> {
    check_build(d, n, cap, false)?;
    let vertices = product_vertices(d, n);
    let vertex_index: HashMap<Bipartition, u32> =
        vertices.iter().enumerate().map(|(i, &x)| (x, i as u32)).collect();
    let mut simplices: Vec<Vec<Vec<u32>>> = vec![Vec::new(); d + n - 3];
    for_each_chain(&vertices, |chain| simplices[chain.len() - 1].push(chain.to_vec()));
    for s in &mut simplices {
        s.sort_unstable();
    }
    Ok(QuotientComplex { d, n, quotiented: false, vertices, vertex_index, simplices })
}

/// Checks that the simultaneous complement acts freely enough for the orbit
/// space to be simplicial: whenever `{x, y}` is an edge of the order
/// complex, `{x, ι(y)}` is not, and no vertex is comparable to its own
/// complement.
pub fn quotient_is_simplicial(d: usize, n: usize) -> Result<bool> {
    if d < 2 || n < 2 {
        return Err(Error::Domain(format!("need d, n >= 2 (got d={d}, n={n})")));
    }
    check_sizes(d, n)?;
    let vs = product_vertices(d, n);
    for x in &vs {
        if x.comparable(&x.complement(d, n)) {
            return Ok(false);
        }
        for y in &vs {
            if x.comparable(y) && x != y && x.comparable(&y.complement(d, n)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
