use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::bitvec::BitVec;
use crate::tunnel::block::{check_block, Block, BlockViolation};
use crate::wheeler::{EdgeRange, GraphError, NodeRange, WheelerGraph};

/// Offset value standing for "the last copy" at the upper end of a range.
pub const LAST: usize = usize::MAX;

/// A node of the tunneled graph together with the copy we are in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TraversalPos {
    pub node: usize,
    pub offset: usize,
}

impl TraversalPos {
    pub fn new(node: usize, offset: usize) -> TraversalPos {
        TraversalPos { node, offset }
    }
}

impl Ord for TraversalPos {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.node, self.offset).cmp(&(other.node, other.offset))
    }
}

impl PartialOrd for TraversalPos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TraversalPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.offset == LAST {
            write!(f, "<{}, last>", self.node)
        } else {
            write!(f, "<{}, {}>", self.node, self.offset)
        }
    }
}

/// A range of original nodes, expressed as tunneled positions. Positions
/// compare lexicographically, which matches the original Wheeler order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TunneledRange {
    Empty,
    Span { lo: TraversalPos, hi: TraversalPos },
}

impl TunneledRange {
    pub fn is_empty(&self) -> bool {
        matches!(self, TunneledRange::Empty)
    }

    /// The tunneled nodes touched by the range.
    pub fn node_range(&self) -> NodeRange {
        match *self {
            TunneledRange::Empty => NodeRange::EMPTY,
            TunneledRange::Span { lo, hi } => NodeRange::new(lo.node, hi.node),
        }
    }
}

/// One collapsed block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tunnel {
    pub entrance: usize,
    /// Node holding the last collapsed column.
    pub exit: usize,
    pub width: usize,
    pub length: usize,
    /// Roots that had no incoming edge; they are always the first copies.
    pub sourceless_roots: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TunnelError {
    #[error("block {index} is invalid: {violation}")]
    InvalidBlock { index: usize, violation: BlockViolation },
    #[error("node {node} belongs to more than one block")]
    Overlap { node: usize },
}

/// A tunneled Wheeler graph plus the bitvectors that let it simulate
/// traversal of the original graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TunneledGraph {
    g: WheelerGraph,
    i_prime: BitVec,
    o_prime: BitVec,
    entrances: BitVec,
    inner: BitVec,
    tunnels: Vec<Tunnel>,
    // For exit edge groups (edges of one tunnel node with one label) the
    // copies that own at least one edge of the group: one mark per group at
    // its first edge, and a width-sized mask per group.
    exit_groups: BitVec,
    exit_mask_delims: BitVec,
    exit_masks: BitVec,
    node_map: Option<Vec<TraversalPos>>,
    // Index + 1 of the tunnel each node lies in, 0 outside tunnels.
    member: Vec<u32>,
}

/// Collapses every block of width at least 2. Blocks must be valid and
/// pairwise disjoint.
pub fn tunnel_graph(g: &WheelerGraph, blocks: &[Block]) -> Result<TunneledGraph, TunnelError> {
    let n = g.n();
    // (block, copy, column) per original node.
    let mut place: Vec<Option<(usize, usize, usize)>> = vec![None; n + 1];
    for (b, block) in blocks.iter().enumerate() {
        check_block(g, block).map_err(|violation| TunnelError::InvalidBlock { index: b, violation })?;
        for (j, col) in block.columns().iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                if place[v].is_some() {
                    return Err(TunnelError::Overlap { node: v });
                }
                place[v] = Some((b, i, j));
            }
        }
    }
    let active = |b: usize| blocks[b].width() >= 2;

    let mut new_rank = vec![0usize; n + 1];
    let mut offset = vec![1usize; n + 1];
    let mut first_copy = vec![0usize];
    for v in 1..=n {
        match place[v] {
            Some((b, i, _)) if active(b) && i > 0 => {
                new_rank[v] = new_rank[v - 1];
                offset[v] = i + 1;
            }
            _ => {
                first_copy.push(v);
                new_rank[v] = first_copy.len() - 1;
            }
        }
    }
    let n_t = first_copy.len() - 1;

    let mut src = vec![0usize; g.m() + 1];
    let mut lab = vec![0u8; g.m() + 1];
    for v in 1..=n {
        for (j, c, _) in g.out_edges(v) {
            src[j] = v;
            lab[j] = c;
        }
    }

    let mut edges = Vec::with_capacity(g.m());
    let mut i_prime = Vec::with_capacity(g.m());
    let mut o_prime = Vec::with_capacity(g.m());
    for j in 1..=g.m() {
        let (s, t, c) = (src[j], g.target(j), lab[j]);
        if let (Some((bs, is, _)), Some((bt, it, _))) = (place[s], place[t]) {
            if bs == bt && is == it && is > 0 && active(bs) {
                continue;
            }
        }
        edges.push((new_rank[s], new_rank[t], c));
        i_prime.push(j == g.in_offset(t) + 1);
        o_prime.push(j == 1 || src[j - 1] != s || lab[j - 1] != c);
    }
    let gt = WheelerGraph::from_ordered(n_t, g.alphabet().clone(), &edges);

    let mut entrance_bits = vec![false; n_t + 1];
    let mut inner_bits = vec![false; n_t + 1];
    let mut tunnels = Vec::new();
    for block in blocks.iter().filter(|b| b.width() >= 2) {
        let cols = block.columns();
        entrance_bits[new_rank[cols[0][0]]] = true;
        for col in &cols[1..] {
            inner_bits[new_rank[col[0]]] = true;
        }
        tunnels.push(Tunnel {
            entrance: new_rank[cols[0][0]],
            exit: new_rank[cols[cols.len() - 1][0]],
            width: block.width(),
            length: block.size(),
            sourceless_roots: block.roots().iter().filter(|&&r| g.indegree(r) == 0).count(),
        });
    }
    tunnels.sort_by_key(|t| t.entrance);
    let entrances: BitVec = entrance_bits[1..].iter().copied().collect();
    let inner: BitVec = inner_bits[1..].iter().copied().collect();

    // Copy-presence masks for every exit group.
    let mut groups: BTreeMap<usize, Vec<bool>> = BTreeMap::new();
    for x in 1..=n_t {
        if !(entrance_bits[x] || inner_bits[x]) {
            continue;
        }
        let v1 = first_copy[x];
        let (b, _, _) = place[v1].expect("marked node comes from a block");
        let w = blocks[b].width();
        let mut seen = None;
        for (j, c, t) in gt.out_edges(x) {
            if seen == Some(c) || inner_bits[t] {
                continue;
            }
            seen = Some(c);
            let mask = (0..w)
                .map(|i| !g.edge_range_for_label(NodeRange::new(v1 + i, v1 + i), c).is_empty())
                .collect();
            groups.insert(j, mask);
        }
    }
    let (exit_groups, exit_mask_delims, exit_masks) = pack_groups(gt.m(), &groups);

    let node_map = (1..=n).map(|v| TraversalPos::new(new_rank[v], offset[v])).collect();
    let mut tg = TunneledGraph {
        g: gt,
        i_prime: i_prime.into_iter().collect(),
        o_prime: o_prime.into_iter().collect(),
        entrances,
        inner,
        tunnels,
        exit_groups,
        exit_mask_delims,
        exit_masks,
        node_map: Some(node_map),
        member: Vec::new(),
    };
    tg.member = tg.compute_members();
    Ok(tg)
}

fn pack_groups(m: usize, groups: &BTreeMap<usize, Vec<bool>>) -> (BitVec, BitVec, BitVec) {
    let mut starts = vec![false; m];
    let mut delims = Vec::new();
    let mut masks = Vec::new();
    for (&j, mask) in groups {
        starts[j - 1] = true;
        delims.push(true);
        delims.extend(std::iter::repeat_n(false, mask.len()));
        masks.extend_from_slice(mask);
    }
    delims.push(true);
    (starts.into_iter().collect(), delims.into_iter().collect(), masks.into_iter().collect())
}

impl TunneledGraph {
    /// Reassembles a tunneled graph from stored parts.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        g: WheelerGraph,
        i_prime: BitVec,
        o_prime: BitVec,
        entrances: BitVec,
        inner: BitVec,
        tunnels: Vec<Tunnel>,
        exit_groups: BitVec,
        exit_mask_delims: BitVec,
        exit_masks: BitVec,
        node_map: Option<Vec<TraversalPos>>,
    ) -> Result<TunneledGraph, String> {
        if i_prime.len() != g.m() || o_prime.len() != g.m() || exit_groups.len() != g.m() {
            return Err("edge bitvector length mismatch".into());
        }
        if entrances.len() != g.n() || inner.len() != g.n() {
            return Err("node mark length mismatch".into());
        }
        if entrances.count_ones() != tunnels.len() {
            return Err("tunnel records do not match entrance marks".into());
        }
        if exit_mask_delims.count_ones() != exit_groups.count_ones() + 1
            || exit_mask_delims.count_zeros() != exit_masks.len()
        {
            return Err("exit group masks inconsistent".into());
        }
        for (k, t) in tunnels.iter().enumerate() {
            if t.entrance == 0 || t.entrance > g.n() || !entrances.get(t.entrance) || entrances.rank1(t.entrance) != k + 1 {
                return Err(format!("tunnel record {} has a bad entrance", k + 1));
            }
            if t.width < 2 || t.length == 0 || t.sourceless_roots > t.width {
                return Err(format!("tunnel record {} has bad dimensions", k + 1));
            }
        }
        let mut tg = TunneledGraph {
            g,
            i_prime,
            o_prime,
            entrances,
            inner,
            tunnels,
            exit_groups,
            exit_mask_delims,
            exit_masks,
            node_map,
            member: Vec::new(),
        };
        tg.member = tg.compute_members();
        Ok(tg)
    }

    fn compute_members(&self) -> Vec<u32> {
        let mut member = vec![0u32; self.g.n() + 1];
        for (k, t) in self.tunnels.iter().enumerate() {
            let mut stack = vec![t.entrance];
            while let Some(x) = stack.pop() {
                member[x] = k as u32 + 1;
                for (_, _, y) in self.g.out_edges(x) {
                    if self.is_inner(y) && member[y] == 0 {
                        stack.push(y);
                    }
                }
            }
        }
        member
    }

    pub fn graph(&self) -> &WheelerGraph {
        &self.g
    }

    pub fn i_prime(&self) -> &BitVec {
        &self.i_prime
    }

    pub fn o_prime(&self) -> &BitVec {
        &self.o_prime
    }

    pub fn entrance_marks(&self) -> &BitVec {
        &self.entrances
    }

    pub fn inner_marks(&self) -> &BitVec {
        &self.inner
    }

    pub fn exit_groups(&self) -> (&BitVec, &BitVec, &BitVec) {
        (&self.exit_groups, &self.exit_mask_delims, &self.exit_masks)
    }

    pub fn tunnels(&self) -> &[Tunnel] {
        &self.tunnels
    }

    pub fn node_map(&self) -> Option<&[TraversalPos]> {
        self.node_map.as_deref()
    }

    pub fn drop_node_map(&mut self) {
        self.node_map = None;
    }

    /// Position of original node `v`, if the node map was kept.
    pub fn phi(&self, v: usize) -> Option<TraversalPos> {
        self.node_map.as_ref()?.get(v.checked_sub(1)?).copied()
    }

    /// Node count of the original graph.
    pub fn original_n(&self) -> usize {
        self.g.n() + self.tunnels.iter().map(|t| (t.width - 1) * t.length).sum::<usize>()
    }

    pub fn is_entrance(&self, v: usize) -> bool {
        self.entrances.get(v)
    }

    pub fn is_inner(&self, v: usize) -> bool {
        self.inner.get(v)
    }

    pub fn is_marked(&self, v: usize) -> bool {
        self.is_entrance(v) || self.is_inner(v)
    }

    /// The tunnel containing `v`, if any.
    pub fn tunnel_of(&self, v: usize) -> Option<&Tunnel> {
        match self.member[v] {
            0 => None,
            k => Some(&self.tunnels[k as usize - 1]),
        }
    }

    /// Width of the tunnel containing `v`, or 1.
    pub fn width(&self, v: usize) -> usize {
        self.tunnel_of(v).map_or(1, |t| t.width)
    }

    /// Which copy edge `j` entered, for an edge into entrance `r`:
    /// `rank_1(I', j) - rank_1(I', select_1(I, r) - r)`, plus any roots
    /// without incoming edges.
    pub fn enter_offset(&self, j: usize, r: usize) -> usize {
        debug_assert!(self.is_entrance(r));
        let k = self.entrances.rank1(r) - 1;
        self.i_prime.rank1(j) - self.i_prime.rank1(self.g.in_offset(r)) + self.tunnels[k].sourceless_roots
    }

    fn exit_mask(&self, j1: usize) -> Option<(usize, usize)> {
        if !self.exit_groups.get(j1) {
            return None;
        }
        let g = self.exit_groups.rank1(j1);
        let start = self.exit_mask_delims.select1(g)? - (g - 1);
        let end = self.exit_mask_delims.select1(g + 1)? - g;
        // Mask bits occupy exit_masks[start ..= end - 1] (1-based).
        Some((start, end - start))
    }

    /// Copies present in the group at `j1`, counted up to copy `o`.
    fn present_upto(&self, j1: usize, o: usize) -> Option<(usize, usize)> {
        let (start, w) = self.exit_mask(j1)?;
        let upto = o.min(w);
        let before = self.exit_masks.rank1(start - 1);
        Some((self.exit_masks.rank1(start - 1 + upto) - before, self.exit_masks.rank1(start - 1 + w) - before))
    }

    fn copy_present(&self, j1: usize, o: usize) -> bool {
        match self.exit_mask(j1) {
            Some((start, w)) => o >= 1 && o <= w && self.exit_masks.get(start + o - 1),
            None => false,
        }
    }

    /// First and last edge of the `q`-th present copy in the group at `j1`.
    fn copy_edges(&self, j1: usize, q: usize) -> (usize, usize) {
        let base = self.o_prime.rank1(j1);
        let first = self.o_prime.select1(base + q - 1).expect("present copy has an edge");
        let last = self.o_prime.select1(base + q).map_or(self.g.m(), |p| p - 1);
        (first, last)
    }

    /// The `k`-th (or, with `last`, the final) edge that left copy `o`
    /// through the exit group starting at edge `j1`.
    pub fn exit_edge(&self, j1: usize, o: usize, k: usize, last: bool) -> Result<usize, GraphError> {
        if !self.copy_present(j1, o) || (!last && k == 0) {
            return Err(GraphError::NotFound);
        }
        let (q, _) = self.present_upto(j1, o).ok_or(GraphError::NotFound)?;
        let (first, end) = self.copy_edges(j1, q);
        if last {
            return Ok(end);
        }
        let j = first + k - 1;
        if j > end {
            return Err(GraphError::NotFound);
        }
        Ok(j)
    }

    fn land(&self, j: usize, carry: usize) -> TraversalPos {
        let t = self.g.target(j);
        if self.is_inner(t) {
            TraversalPos::new(t, carry)
        } else if self.is_entrance(t) {
            TraversalPos::new(t, self.enter_offset(j, t))
        } else {
            TraversalPos::new(t, 1)
        }
    }

    /// Takes the `k`-th `c`-labeled edge that the original node at `p`
    /// had.
    pub fn step(&self, p: TraversalPos, c: u8, k: usize) -> Result<TraversalPos, GraphError> {
        if p.node == 0 || p.node > self.g.n() {
            return Err(GraphError::OutOfBounds { what: "node", index: p.node, max: self.g.n() });
        }
        if !self.is_marked(p.node) {
            let j = self.g.out_edge_rank(p.node, c, k)?;
            return Ok(self.land(j, 1));
        }
        let er = self.g.edge_range_for_label(NodeRange::new(p.node, p.node), c);
        if er.is_empty() {
            return Err(GraphError::NotFound);
        }
        if self.is_inner(self.g.target(er.first)) {
            return if k == 1 { Ok(TraversalPos::new(self.g.target(er.first), p.offset)) } else { Err(GraphError::NotFound) };
        }
        let j = self.exit_edge(er.first, p.offset, k, false)?;
        Ok(self.land(j, 1))
    }

    pub fn full_range(&self) -> TunneledRange {
        if self.g.n() == 0 {
            return TunneledRange::Empty;
        }
        TunneledRange::Span { lo: TraversalPos::new(1, 1), hi: TraversalPos::new(self.g.n(), LAST) }
    }

    fn label_edges(&self, lo: usize, hi: usize, c: u8) -> EdgeRange {
        if lo > hi {
            return EdgeRange { first: 1, last: 0 };
        }
        self.g.edge_range_for_label(NodeRange::new(lo, hi), c)
    }

    // First c-edge of an original node at or after `p`, with its carry.
    fn lower_edge(&self, p: TraversalPos, c: u8) -> Option<(usize, usize)> {
        let own = self.label_edges(p.node, p.node, c);
        if !own.is_empty() {
            if !self.is_marked(p.node) {
                return Some((own.first, 1));
            }
            if self.is_inner(self.g.target(own.first)) {
                return Some((own.first, p.offset));
            }
            let (before, total) = self.present_upto(own.first, p.offset - 1)?;
            if before < total {
                return Some((self.copy_edges(own.first, before + 1).0, 1));
            }
        }
        let rest = self.label_edges(p.node + 1, self.g.n(), c);
        (!rest.is_empty()).then_some((rest.first, 1))
    }

    // Last c-edge of an original node at or before `p`, with its carry.
    fn upper_edge(&self, p: TraversalPos, c: u8) -> Option<(usize, usize)> {
        let own = self.label_edges(p.node, p.node, c);
        if !own.is_empty() {
            if !self.is_marked(p.node) {
                return Some((own.last, LAST));
            }
            if self.is_inner(self.g.target(own.first)) {
                return Some((own.first, p.offset));
            }
            let (q, _) = self.present_upto(own.first, p.offset)?;
            if q > 0 {
                return Some((self.copy_edges(own.first, q).1, LAST));
            }
        }
        let rest = self.label_edges(1, p.node - 1, c);
        (!rest.is_empty()).then_some((rest.last, LAST))
    }

    /// Positions reached from `r` by one `c`-labeled edge of the original
    /// graph.
    pub fn follow_range(&self, r: TunneledRange, c: u8) -> TunneledRange {
        let TunneledRange::Span { lo, hi } = r else {
            return TunneledRange::Empty;
        };
        if c as usize >= self.g.sigma() {
            return TunneledRange::Empty;
        }
        let (Some((jl, cl)), Some((jh, ch))) = (self.lower_edge(lo, c), self.upper_edge(hi, c)) else {
            return TunneledRange::Empty;
        };
        if jl > jh {
            return TunneledRange::Empty;
        }
        let (lo, hi) = (self.land(jl, cl), self.land(jh, ch));
        if lo > hi {
            return TunneledRange::Empty;
        }
        TunneledRange::Span { lo, hi }
    }

    /// Node-level convenience over [`follow_range`](Self::follow_range):
    /// all copies of the nodes in `r`.
    pub fn follow_node_range(&self, r: NodeRange, c: u8) -> NodeRange {
        if r.is_empty() {
            return NodeRange::EMPTY;
        }
        let span = TunneledRange::Span { lo: TraversalPos::new(r.lo, 1), hi: TraversalPos::new(r.hi, LAST) };
        self.follow_range(span, c).node_range()
    }

    /// Range of positions at the end of paths spelling `pattern` (label
    /// codes) in the original graph.
    pub fn search_codes(&self, pattern: &[u8]) -> TunneledRange {
        let mut r = self.full_range();
        for &c in pattern {
            r = self.follow_range(r, c);
            if r.is_empty() {
                break;
            }
        }
        r
    }

    pub fn search(&self, pattern: &[u8]) -> TunneledRange {
        match self.g.alphabet().encode(pattern) {
            Some(codes) => self.search_codes(&codes),
            None => TunneledRange::Empty,
        }
    }

    /// Tunneled nodes at the end of paths spelling `pattern`; empty iff no
    /// such path exists in the original graph.
    pub fn path_search(&self, pattern: &[u8]) -> NodeRange {
        self.search(pattern).node_range()
    }
}
