//! Edge-list graph representation and degree-sequence utilities.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Deref;

use crate::{Error, Result};

/// A node identifier. Valid ids fit in 28 bits so that two of them pack into
/// the 56-bit payload of a concurrent hash-set cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub const BITS: u32 = 28;
    pub const MAX: u32 = (1 << Self::BITS) - 1;

    pub fn new(id: u64) -> Result<Self> {
        if id > Self::MAX as u64 {
            return Err(Error::NodeIdOutOfRange(id));
        }
        Ok(NodeId(id as u32))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// An undirected edge stored as `(min, max)`.
///
/// Loops `(v, v)` are representable: the switch rewiring produces them and
/// callers reject them through [`CanonicalEdge::is_loop`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalEdge {
    u: u32,
    v: u32,
}

impl CanonicalEdge {
    /// Canonicalizes `{u, v}`. Both ids must fit in 28 bits.
    #[inline]
    pub fn new(u: u32, v: u32) -> Self {
        debug_assert!(u <= NodeId::MAX && v <= NodeId::MAX, "node id exceeds 28 bits");
        if u <= v {
            CanonicalEdge { u, v }
        } else {
            CanonicalEdge { u: v, v: u }
        }
    }

    pub fn from_nodes(u: NodeId, v: NodeId) -> Self {
        Self::new(u.get(), v.get())
    }

    #[inline]
    pub fn u(self) -> u32 {
        self.u
    }

    #[inline]
    pub fn v(self) -> u32 {
        self.v
    }

    #[inline]
    pub fn is_loop(self) -> bool {
        self.u == self.v
    }

    /// The edge as a directed pair in canonical orientation.
    #[inline]
    pub fn directed(self) -> (u32, u32) {
        (self.u, self.v)
    }

    /// `(u << 28) | v`, the 56-bit payload used by the hash sets.
    #[inline]
    pub fn pack(self) -> u64 {
        ((self.u as u64) << NodeId::BITS) | self.v as u64
    }

    #[inline]
    pub fn unpack(payload: u64) -> Self {
        CanonicalEdge {
            u: ((payload >> NodeId::BITS) & NodeId::MAX as u64) as u32,
            v: (payload & NodeId::MAX as u64) as u32,
        }
    }

    /// Targets of switching `self` with `other` in direction `g`, computed on
    /// the canonical orientations and re-canonicalized.
    #[inline]
    pub fn switch_targets(self, other: CanonicalEdge, g: bool) -> (CanonicalEdge, CanonicalEdge) {
        let ((a, x), (b, y)) = tau(self.directed(), other.directed(), g);
        (CanonicalEdge::new(a, x), CanonicalEdge::new(b, y))
    }
}

impl fmt::Display for CanonicalEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.u, self.v)
    }
}

/// The rewiring function of an edge switch on directed representations:
/// `g = false` yields `((a, x), (b, y))`, `g = true` yields `((a, y), (b, x))`.
#[inline]
pub fn tau(e1: (u32, u32), e2: (u32, u32), g: bool) -> ((u32, u32), (u32, u32)) {
    let (a, b) = e1;
    let (x, y) = e2;
    if g {
        ((a, y), (b, x))
    } else {
        ((a, x), (b, y))
    }
}

/// Shorthand for [`CanonicalEdge::new`].
#[inline]
pub fn canonicalize(u: u32, v: u32) -> CanonicalEdge {
    CanonicalEdge::new(u, v)
}

/// Node degrees `d_0, ..., d_{n-1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DegreeSequence(Vec<u32>);

impl DegreeSequence {
    pub fn new(degrees: Vec<u32>) -> Self {
        DegreeSequence(degrees)
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    pub fn sum(&self) -> u64 {
        self.0.iter().map(|&d| d as u64).sum()
    }

    pub fn max(&self) -> u32 {
        self.0.iter().copied().max().unwrap_or(0)
    }
}

impl Deref for DegreeSequence {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.0
    }
}

impl From<Vec<u32>> for DegreeSequence {
    fn from(v: Vec<u32>) -> Self {
        DegreeSequence(v)
    }
}

/// A graph as an indexed list of canonical edges over `nodes` nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeList {
    nodes: usize,
    edges: Vec<CanonicalEdge>,
}

impl EdgeList {
    /// Builds an edge list, checking that every endpoint is below `nodes` and
    /// that `nodes` ids fit in 28 bits.
    pub fn new(nodes: usize, edges: Vec<CanonicalEdge>) -> Result<Self> {
        if nodes > NodeId::MAX as usize + 1 {
            return Err(Error::NodeIdOutOfRange(nodes as u64 - 1));
        }
        if let Some(e) = edges.iter().find(|e| e.v() as usize >= nodes) {
            return Err(Error::InvalidParameter(format!(
                "edge {e} references a node outside 0..{nodes}"
            )));
        }
        Ok(EdgeList { nodes, edges })
    }

    /// Builds an edge list from `(u, v)` pairs.
    pub fn from_pairs(nodes: usize, pairs: &[(u32, u32)]) -> Result<Self> {
        Self::new(nodes, pairs.iter().map(|&(u, v)| CanonicalEdge::new(u, v)).collect())
    }

    pub fn node_count(&self) -> usize {
        self.nodes
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[CanonicalEdge] {
        &self.edges
    }

    pub fn edges_mut(&mut self) -> &mut Vec<CanonicalEdge> {
        &mut self.edges
    }

    pub fn into_edges(self) -> Vec<CanonicalEdge> {
        self.edges
    }

    pub fn degree_sequence(&self) -> DegreeSequence {
        degree_sequence_of(self)
    }

    pub fn max_degree(&self) -> u32 {
        self.degree_sequence().max()
    }

    /// True if the list has neither loops nor duplicate edges.
    pub fn is_simple(&self) -> bool {
        self.simplicity_violation().is_none()
    }

    /// Describes the first loop or duplicate found, if any.
    pub fn simplicity_violation(&self) -> Option<String> {
        if let Some(e) = self.edges.iter().find(|e| e.is_loop()) {
            return Some(format!("loop {e}"));
        }
        let sorted = self.sorted_edges();
        sorted
            .windows(2)
            .find(|w| w[0] == w[1])
            .map(|w| format!("duplicate edge {}", w[0]))
    }

    /// The edges in lexicographic order.
    pub fn sorted_edges(&self) -> Vec<CanonicalEdge> {
        let mut sorted = self.edges.clone();
        sorted.sort_unstable();
        sorted
    }
}

/// Degree of every node; loops are not expected.
pub fn degree_sequence_of(graph: &EdgeList) -> DegreeSequence {
    let mut degrees = vec![0u32; graph.node_count()];
    for e in graph.edges() {
        degrees[e.u() as usize] += 1;
        degrees[e.v() as usize] += 1;
    }
    DegreeSequence(degrees)
}

/// Erdős–Gallai test on the non-increasingly sorted sequence.
pub fn is_graphical(degrees: &[u32]) -> bool {
    let n = degrees.len();
    let mut d: Vec<u64> = degrees.iter().map(|&x| x as u64).collect();
    if d.iter().sum::<u64>() % 2 == 1 {
        return false;
    }
    d.sort_unstable_by(|a, b| b.cmp(a));
    if n == 0 || d[0] == 0 {
        return true;
    }
    if d[0] >= n as u64 {
        return false;
    }

    let mut suffix = vec![0u64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + d[i];
    }

    // `at_least` is the number of entries with d_i >= k; it only shrinks as k grows.
    let mut at_least = n;
    let mut prefix = 0u64;
    for k in 1..=n {
        prefix += d[k - 1];
        let kk = k as u64;
        while at_least > 0 && d[at_least - 1] < kk {
            at_least -= 1;
        }
        // Entries at positions >= k: those in [k, at_least) contribute k each,
        // the remaining tail contributes its own degrees.
        let capped = at_least.max(k);
        let rhs = kk * (kk - 1) + (capped - k) as u64 * kk + suffix[capped];
        if prefix > rhs {
            return false;
        }
    }
    true
}

/// Deterministic Havel–Hakimi realization.
///
/// Repeatedly takes the node with the highest residual degree (lowest id on
/// ties) and connects it to the nodes with the next-highest residual degrees
/// (again lowest id first).
pub fn havel_hakimi(degrees: &[u32]) -> Result<EdgeList> {
    let n = degrees.len();
    if n > NodeId::MAX as usize + 1 {
        return Err(Error::NodeIdOutOfRange(n as u64 - 1));
    }
    let max = degrees.iter().copied().max().unwrap_or(0) as usize;
    if max >= n.max(1) && max > 0 {
        return Err(Error::NotGraphical);
    }
    let total: u64 = degrees.iter().map(|&d| d as u64).sum();
    if total % 2 == 1 {
        return Err(Error::NotGraphical);
    }

    let mut buckets: Vec<BTreeSet<u32>> = vec![BTreeSet::new(); max + 1];
    for (v, &d) in degrees.iter().enumerate() {
        if d > 0 {
            buckets[d as usize].insert(v as u32);
        }
    }

    let mut edges = Vec::with_capacity((total / 2) as usize);
    let mut top = max;
    let mut targets: Vec<(u32, usize)> = Vec::new();
    loop {
        while top > 0 && buckets[top].is_empty() {
            top -= 1;
        }
        if top == 0 {
            break;
        }
        let u = buckets[top].pop_first().expect("non-empty bucket");
        let need = top;

        targets.clear();
        let mut level = top;
        'collect: while level > 0 {
            for &v in &buckets[level] {
                targets.push((v, level));
                if targets.len() == need {
                    break 'collect;
                }
            }
            level -= 1;
        }
        if targets.len() < need {
            return Err(Error::NotGraphical);
        }
        for &(v, level) in &targets {
            buckets[level].remove(&v);
            if level > 1 {
                buckets[level - 1].insert(v);
            }
            edges.push(CanonicalEdge::new(u, v));
        }
    }
    EdgeList::new(n, edges)
}
