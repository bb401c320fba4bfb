//! Succinct Wheeler graphs: the `L`/`C`/`I`/`O` representation, the ordering
//! validator, and navigation by Wheeler rank.
//!
//! Nodes and edges are identified by their 1-based Wheeler ranks. Labels are
//! stored as compact codes `0..sigma` assigned in byte order by [`Alphabet`].

use std::fmt;

use thiserror::Error;

use crate::bitvec::{BitVec, BitVecBuilder, LabelSeq};

const NO_CODE: u16 = u16::MAX;

/// Byte alphabet compacted to codes `0..sigma`, preserving byte order.
#[derive(Clone, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
    codes: [u16; 256],
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Alphabet").field(&String::from_utf8_lossy(&self.symbols)).finish()
    }
}

impl Alphabet {
    pub fn from_bytes(bytes: impl IntoIterator<Item = u8>) -> Alphabet {
        let mut seen = [false; 256];
        for b in bytes {
            seen[b as usize] = true;
        }
        let symbols: Vec<u8> = (0..=255u8).filter(|&b| seen[b as usize]).collect();
        Self::from_sorted(symbols)
    }

    /// `symbols` must be strictly increasing.
    pub fn from_sorted(symbols: Vec<u8>) -> Alphabet {
        let mut codes = [NO_CODE; 256];
        for (code, &b) in symbols.iter().enumerate() {
            codes[b as usize] = code as u16;
        }
        Alphabet { symbols, codes }
    }

    pub fn sigma(&self) -> usize {
        self.symbols.len()
    }

    pub fn code(&self, byte: u8) -> Option<u8> {
        match self.codes[byte as usize] {
            NO_CODE => None,
            c => Some(c as u8),
        }
    }

    pub fn byte(&self, code: u8) -> u8 {
        self.symbols[code as usize]
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Translates a pattern; `None` if any byte is not in the alphabet.
    pub fn encode(&self, pattern: &[u8]) -> Option<Vec<u8>> {
        pattern.iter().map(|&b| self.code(b)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub label: u8,
}

impl Edge {
    pub fn new(source: usize, target: usize, label: u8) -> Edge {
        Edge { source, target, label }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} -> {}, {})", self.source, self.target, self.label.escape_ascii())
    }
}

/// Construction input: `n` nodes identified by rank and a multiset of
/// byte-labeled edges.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EdgeList {
    pub n: usize,
    pub edges: Vec<Edge>,
}

impl EdgeList {
    pub fn new(n: usize, edges: Vec<Edge>) -> EdgeList {
        EdgeList { n, edges }
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet::from_bytes(self.edges.iter().map(|e| e.label))
    }
}

/// A violated Wheeler axiom, with the offending node or edge pair.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("edge {edge} references node outside 1..={n}")]
    RankOutOfRange { edge: Edge, n: usize },
    #[error("zero-indegree prefix: node {node} has indegree 0 but follows node {earlier} with positive indegree")]
    ZeroIndegreePrefix { node: usize, earlier: usize },
    #[error("label order (i): {first} has the smaller label but its target is not before that of {second}")]
    LabelOrder { first: Edge, second: Edge },
    #[error("source order (ii): {first} has the smaller source but a larger target than {second}")]
    SourceOrder { first: Edge, second: Edge },
}

impl Violation {
    /// Short name of the violated condition.
    pub fn axiom(&self) -> &'static str {
        match self {
            Violation::RankOutOfRange { .. } => "rank-range",
            Violation::ZeroIndegreePrefix { .. } => "zero-indegree-prefix",
            Violation::LabelOrder { .. } => "label-order",
            Violation::SourceOrder { .. } => "source-order",
        }
    }
}

/// Checks that the identity order on ranks is a Wheeler order of `el`.
pub fn validate_wheeler(el: &EdgeList) -> Result<(), Violation> {
    for e in &el.edges {
        if e.source == 0 || e.source > el.n || e.target == 0 || e.target > el.n {
            return Err(Violation::RankOutOfRange { edge: *e, n: el.n });
        }
    }

    let mut indeg = vec![0usize; el.n + 1];
    for e in &el.edges {
        indeg[e.target] += 1;
    }
    let mut first_positive = None;
    for v in 1..=el.n {
        match (indeg[v], first_positive) {
            (0, Some(earlier)) => return Err(Violation::ZeroIndegreePrefix { node: v, earlier }),
            (d, None) if d > 0 => first_positive = Some(v),
            _ => {}
        }
    }

    let mut sorted = el.edges.clone();
    sorted.sort_by_key(|e| (e.label, e.source, e.target));

    // (i): every target of a smaller label precedes every target of a larger one.
    let mut max_below: Option<Edge> = None;
    for group in sorted.chunk_by(|a, b| a.label == b.label) {
        let lowest = *group.iter().min_by_key(|e| e.target).unwrap();
        if let Some(prev) = max_below {
            if prev.target >= lowest.target {
                return Err(Violation::LabelOrder { first: prev, second: lowest });
            }
        }
        let highest = *group.iter().max_by_key(|e| e.target).unwrap();
        max_below = Some(highest);
    }

    // (ii): within a label, targets are monotone in the source.
    for group in sorted.chunk_by(|a, b| a.label == b.label) {
        let mut max_earlier: Option<Edge> = None;
        for by_source in group.chunk_by(|a, b| a.source == b.source) {
            // Sorted by target within a source.
            let lowest = by_source[0];
            if let Some(prev) = max_earlier {
                if prev.target > lowest.target {
                    return Err(Violation::SourceOrder { first: prev, second: lowest });
                }
            }
            let highest = *by_source.last().unwrap();
            if max_earlier.is_none_or(|p| highest.target > p.target) {
                max_earlier = Some(highest);
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("{what} {index} out of range 1..={max}")]
    OutOfBounds { what: &'static str, index: usize, max: usize },
    #[error("no such edge")]
    NotFound,
}

/// A contiguous interval of Wheeler ranks; empty when `lo > hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NodeRange {
    pub lo: usize,
    pub hi: usize,
}

impl NodeRange {
    pub const EMPTY: NodeRange = NodeRange { lo: 1, hi: 0 };

    pub fn new(lo: usize, hi: usize) -> NodeRange {
        if lo > hi {
            NodeRange::EMPTY
        } else {
            NodeRange { lo, hi }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn len(&self) -> usize {
        (self.hi + 1).saturating_sub(self.lo)
    }

    pub fn contains(&self, v: usize) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn iter(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for NodeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            write!(f, "[]")
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

/// First and last edge rank of a label-restricted edge interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeRange {
    pub first: usize,
    pub last: usize,
}

impl EdgeRange {
    pub fn is_empty(&self) -> bool {
        self.first > self.last
    }
}

/// The succinct `(L, C, I, O)` representation of a Wheeler graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WheelerGraph {
    n: usize,
    m: usize,
    alphabet: Alphabet,
    labels: LabelSeq,
    // c[code] = edges with a smaller label; c[sigma] = m.
    c: Vec<usize>,
    in_bits: BitVec,
    out_bits: BitVec,
}

impl WheelerGraph {
    /// Validates `el` and encodes it. Parallel edges with equal label and
    /// source are ordered by target, then input position.
    pub fn encode(el: &EdgeList) -> Result<WheelerGraph, Violation> {
        validate_wheeler(el)?;
        let alphabet = el.alphabet();
        let mut order: Vec<usize> = (0..el.edges.len()).collect();
        order.sort_by_key(|&i| {
            let e = &el.edges[i];
            (e.label, e.source, e.target, i)
        });
        let ordered: Vec<(usize, usize, u8)> = order
            .iter()
            .map(|&i| {
                let e = el.edges[i];
                (e.source, e.target, alphabet.code(e.label).unwrap())
            })
            .collect();
        Ok(Self::from_ordered(el.n, alphabet, &ordered))
    }

    /// Encodes edges already listed in Wheeler edge order as
    /// `(source, target, code)` triples. The caller guarantees the order is
    /// a valid Wheeler order.
    pub(crate) fn from_ordered(n: usize, alphabet: Alphabet, edges: &[(usize, usize, u8)]) -> WheelerGraph {
        let m = edges.len();
        let sigma = alphabet.sigma();
        let mut indeg = vec![0usize; n + 1];
        let mut outdeg = vec![0usize; n + 1];
        let mut c = vec![0usize; sigma + 1];
        for &(s, t, code) in edges {
            outdeg[s] += 1;
            indeg[t] += 1;
            c[code as usize + 1] += 1;
        }
        for i in 1..=sigma {
            c[i] += c[i - 1];
        }

        // Per-source label lists, in the given edge order.
        let mut by_source: Vec<usize> = (0..m).collect();
        by_source.sort_by_key(|&i| edges[i].0);
        let labels = LabelSeq::new(by_source.iter().map(|&i| edges[i].2).collect(), sigma);

        let unary = |degrees: &[usize]| {
            let mut b = BitVecBuilder::with_capacity(n + m + 1);
            for &d in &degrees[1..] {
                b.push_unary(d);
            }
            b.push(true);
            b.build()
        };
        WheelerGraph {
            n,
            m,
            labels,
            c,
            in_bits: unary(&indeg),
            out_bits: unary(&outdeg),
            alphabet,
        }
    }

    /// Reassembles a graph from stored parts.
    pub(crate) fn from_parts(
        alphabet: Alphabet,
        labels: LabelSeq,
        in_bits: BitVec,
        out_bits: BitVec,
    ) -> Result<WheelerGraph, String> {
        let m = labels.len();
        let sigma = alphabet.sigma();
        if labels.sigma() != sigma {
            return Err("label alphabet size mismatch".into());
        }
        if in_bits.len() != out_bits.len() || in_bits.count_zeros() != m || out_bits.count_zeros() != m {
            return Err("degree bitvectors inconsistent with edge count".into());
        }
        let framed = |b: &BitVec| !b.is_empty() && b.get(1) && b.get(b.len());
        if !framed(&in_bits) || !framed(&out_bits) {
            return Err("degree bitvectors must start and end with a one".into());
        }
        let n = in_bits.count_ones() - 1;
        let mut c = vec![0usize; sigma + 1];
        for &s in labels.symbols() {
            c[s as usize + 1] += 1;
        }
        for i in 1..=sigma {
            c[i] += c[i - 1];
        }
        Ok(WheelerGraph { n, m, alphabet, labels, c, in_bits, out_bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn sigma(&self) -> usize {
        self.alphabet.sigma()
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn labels(&self) -> &LabelSeq {
        &self.labels
    }

    pub fn c_array(&self) -> &[usize] {
        &self.c[..self.sigma()]
    }

    pub fn in_bits(&self) -> &BitVec {
        &self.in_bits
    }

    pub fn out_bits(&self) -> &BitVec {
        &self.out_bits
    }

    /// `L` rendered back to bytes.
    pub fn l_string(&self) -> Vec<u8> {
        self.labels.symbols().iter().map(|&c| self.alphabet.byte(c)).collect()
    }

    /// Edges leaving nodes `1..i`, i.e. `select_1(O, i) - i`. Valid for
    /// `1 <= i <= n + 1`.
    #[inline]
    pub fn out_offset(&self, i: usize) -> usize {
        self.out_bits.select1(i).expect("node rank in range") - i
    }

    /// Edges entering nodes `1..i`, i.e. `select_1(I, i) - i`.
    #[inline]
    pub fn in_offset(&self, i: usize) -> usize {
        self.in_bits.select1(i).expect("node rank in range") - i
    }

    pub fn outdegree(&self, i: usize) -> usize {
        self.out_offset(i + 1) - self.out_offset(i)
    }

    pub fn indegree(&self, i: usize) -> usize {
        self.in_offset(i + 1) - self.in_offset(i)
    }

    fn check_node(&self, i: usize) -> Result<(), GraphError> {
        if i == 0 || i > self.n {
            return Err(GraphError::OutOfBounds { what: "node", index: i, max: self.n });
        }
        Ok(())
    }

    /// Rank of the `k`-th `c`-labeled out-edge of node `i`:
    /// `C[c] + rank_c(L, select_1(O, i) - i) + k`.
    pub fn out_edge_rank(&self, i: usize, c: u8, k: usize) -> Result<usize, GraphError> {
        self.check_node(i)?;
        let c = c as usize;
        if c >= self.sigma() || k == 0 {
            return Err(GraphError::NotFound);
        }
        let before = self.labels.rank(self.out_offset(i), c);
        let through = self.labels.rank(self.out_offset(i + 1), c);
        if k > through - before {
            return Err(GraphError::NotFound);
        }
        Ok(self.c[c] + before + k)
    }

    /// Target node of edge `j`: `rank_1(I, select_0(I, j))`.
    pub fn edge_target(&self, j: usize) -> Result<usize, GraphError> {
        if j == 0 || j > self.m {
            return Err(GraphError::OutOfBounds { what: "edge", index: j, max: self.m });
        }
        Ok(self.target(j))
    }

    #[inline]
    pub(crate) fn target(&self, j: usize) -> usize {
        self.in_bits.rank1(self.in_bits.select0(j).expect("edge rank in range"))
    }

    /// Label code of edge `j`, from the `C` array.
    pub fn edge_label(&self, j: usize) -> u8 {
        debug_assert!(j >= 1 && j <= self.m);
        (self.c.partition_point(|&x| x < j) - 1) as u8
    }

    /// Label on the in-edges of node `v`, if it has any.
    pub fn in_label(&self, v: usize) -> Option<u8> {
        (self.indegree(v) > 0).then(|| self.edge_label(self.in_offset(v) + 1))
    }

    /// First and last `c`-labeled edges leaving nodes in `r`.
    pub fn edge_range_for_label(&self, r: NodeRange, c: u8) -> EdgeRange {
        let empty = EdgeRange { first: 1, last: 0 };
        if r.is_empty() || c as usize >= self.sigma() {
            return empty;
        }
        let c = c as usize;
        let first = self.c[c] + self.labels.rank(self.out_offset(r.lo), c) + 1;
        let last = self.c[c] + self.labels.rank(self.out_offset(r.hi + 1), c);
        EdgeRange { first, last }
    }

    pub fn follow_range(&self, r: NodeRange, c: u8) -> NodeRange {
        let edges = self.edge_range_for_label(r, c);
        if edges.is_empty() {
            return NodeRange::EMPTY;
        }
        NodeRange::new(self.target(edges.first), self.target(edges.last))
    }

    /// Wheeler range of all nodes reached by a path spelling `pattern`
    /// (given as label codes).
    pub fn path_search_codes(&self, pattern: &[u8]) -> NodeRange {
        let mut range = self.full_range();
        for &c in pattern {
            range = self.follow_range(range, c);
            if range.is_empty() {
                break;
            }
        }
        range
    }

    /// Path search on raw bytes; bytes outside the alphabet match nothing.
    pub fn path_search(&self, pattern: &[u8]) -> NodeRange {
        match self.alphabet.encode(pattern) {
            Some(codes) => self.path_search_codes(&codes),
            None => NodeRange::EMPTY,
        }
    }

    pub fn full_range(&self) -> NodeRange {
        NodeRange::new(1, self.n)
    }

    /// Out-edges of node `i` as `(edge rank, label code, target)`, in
    /// Wheeler order.
    pub fn out_edges(&self, i: usize) -> Vec<(usize, u8, usize)> {
        let start = self.out_offset(i);
        (start + 1..=self.out_offset(i + 1))
            .map(|p| {
                let c = self.labels.access(p).unwrap();
                let j = self.c[c as usize] + self.labels.partial_rank(p).unwrap();
                (j, c, self.target(j))
            })
            .collect()
    }

    /// All edges in Wheeler edge order, labels as bytes.
    pub fn decode(&self) -> EdgeList {
        let mut edges: Vec<(usize, Edge)> = Vec::with_capacity(self.m);
        for i in 1..=self.n {
            for (j, c, t) in self.out_edges(i) {
                edges.push((j, Edge::new(i, t, self.alphabet.byte(c))));
            }
        }
        edges.sort_by_key(|&(j, _)| j);
        EdgeList::new(self.n, edges.into_iter().map(|(_, e)| e).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '1').collect()
    }

    fn ab_graph() -> WheelerGraph {
        WheelerGraph::encode(&EdgeList::new(2 + 1, vec![Edge::new(1, 2, b'a'), Edge::new(2, 3, b'b')])).unwrap()
    }

    #[test]
    fn encode_ab_path() {
        let g = ab_graph();
        assert_eq!(g.l_string(), b"ab");
        assert_eq!(g.c_array(), &[0, 1]);
        assert_eq!(g.in_bits().iter().collect::<Vec<_>>(), bits("110101"));
        assert_eq!(g.out_bits().iter().collect::<Vec<_>>(), bits("101011"));
    }

    #[test]
    fn encode_single_node() {
        let g = WheelerGraph::encode(&EdgeList::new(1, vec![])).unwrap();
        assert_eq!(g.m(), 0);
        assert_eq!(g.in_bits().iter().collect::<Vec<_>>(), bits("11"));
        assert_eq!(g.out_bits().iter().collect::<Vec<_>>(), bits("11"));
        assert_eq!(g.path_search(b""), NodeRange::new(1, 1));
        assert!(g.path_search(b"a").is_empty());
    }

    #[test]
    fn validator_examples() {
        assert_eq!(validate_wheeler(&EdgeList::new(3, vec![Edge::new(1, 2, b'a'), Edge::new(2, 3, b'b')])), Ok(()));

        let err = validate_wheeler(&EdgeList::new(2, vec![Edge::new(2, 1, b'a')])).unwrap_err();
        assert_eq!(err, Violation::ZeroIndegreePrefix { node: 2, earlier: 1 });
        assert_eq!(err.axiom(), "zero-indegree-prefix");

        // A 'b' edge reaching node 2 while an 'a' edge reaches node 4.
        let el = EdgeList::new(4, vec![Edge::new(1, 2, b'b'), Edge::new(1, 4, b'a'), Edge::new(2, 3, b'b')]);
        let err = validate_wheeler(&el).unwrap_err();
        assert_eq!(err.axiom(), "label-order");

        let el = EdgeList::new(4, vec![Edge::new(1, 4, b'a'), Edge::new(2, 3, b'a'), Edge::new(1, 2, b'a')]);
        let err = validate_wheeler(&el).unwrap_err();
        assert_eq!(err.axiom(), "source-order");

        let el = EdgeList::new(2, vec![Edge::new(1, 3, b'a')]);
        assert_eq!(validate_wheeler(&el).unwrap_err().axiom(), "rank-range");
    }

    #[test]
    fn navigation_on_ab_path() {
        let g = ab_graph();
        let (a, b) = (0u8, 1u8);
        assert_eq!(g.out_edge_rank(1, a, 1), Ok(1));
        assert_eq!(g.out_edge_rank(2, b, 1), Ok(2));
        assert_eq!(g.out_edge_rank(1, b, 1), Err(GraphError::NotFound));
        assert_eq!(g.out_edge_rank(1, a, 2), Err(GraphError::NotFound));
        assert_eq!(g.edge_target(1), Ok(2));
        assert_eq!(g.edge_target(2), Ok(3));
        assert!(g.edge_target(0).is_err());
        assert!(g.edge_target(3).is_err());

        assert_eq!(g.edge_range_for_label(NodeRange::new(1, 3), a), EdgeRange { first: 1, last: 1 });
        assert_eq!(g.edge_range_for_label(NodeRange::new(2, 2), b), EdgeRange { first: 2, last: 2 });
        assert!(g.edge_range_for_label(NodeRange::new(1, 1), b).is_empty());

        assert_eq!(g.follow_range(NodeRange::new(1, 3), a), NodeRange::new(2, 2));
        assert!(g.follow_range(NodeRange::EMPTY, a).is_empty());

        assert_eq!(g.path_search(b"ab"), NodeRange::new(3, 3));
        assert_eq!(g.path_search(b""), NodeRange::new(1, 3));
        assert!(g.path_search(b"ba").is_empty());
        assert!(g.path_search(b"z").is_empty());
    }

    #[test]
    fn parallel_edges_ordered_by_target() {
        // Node 1 reaches 2 and 3 by 'a', listed target-descending.
        let el = EdgeList::new(3, vec![Edge::new(1, 3, b'a'), Edge::new(1, 2, b'a')]);
        let g = WheelerGraph::encode(&el).unwrap();
        assert_eq!(g.edge_target(g.out_edge_rank(1, 0, 1).unwrap()), Ok(2));
        assert_eq!(g.edge_target(g.out_edge_rank(1, 0, 2).unwrap()), Ok(3));
        let back = g.decode();
        assert_eq!(back.edges, vec![Edge::new(1, 2, b'a'), Edge::new(1, 3, b'a')]);
    }

    #[test]
    fn decode_round_trip_and_in_labels() {
        let el = EdgeList::new(
            5,
            vec![Edge::new(1, 2, b'a'), Edge::new(1, 3, b'a'), Edge::new(2, 4, b'c'), Edge::new(3, 5, b'c'), Edge::new(3, 5, b'c')],
        );
        let g = WheelerGraph::encode(&el).unwrap();
        let back = g.decode();
        assert_eq!(WheelerGraph::encode(&back).unwrap(), g);
        assert_eq!(g.in_label(1), None);
        assert_eq!(g.in_label(2), Some(0));
        assert_eq!(g.in_label(5), Some(1));
        assert_eq!(g.indegree(5), 2);
        assert_eq!(g.outdegree(3), 2);
    }
}
