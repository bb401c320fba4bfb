use thiserror::Error;

use crate::bitvec::BitVec;
use crate::text::{build_with_ranks, text_ranks};
use crate::tunnel::{find_string_blocks, tunnel_graph, TraversalPos, TunneledGraph, TunneledRange, LAST};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexConfig {
    /// Locate sampling stride; `None` for `ceil(log2 n)`.
    pub sample_rate: Option<usize>,
    /// Tunnel skip and count stride; `None` for `ceil(log2 n_t)`.
    pub tunnel_rate: Option<usize>,
    pub min_width: usize,
    pub min_length: usize,
    pub tunneling: bool,
    /// Keep the original-to-tunneled node map (debug builds of the index).
    pub keep_node_map: bool,
}

impl Default for IndexConfig {
    fn default() -> Self {
        IndexConfig {
            sample_rate: None,
            tunnel_rate: None,
            min_width: 2,
            min_length: 2,
            tunneling: true,
            keep_node_map: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("sample rates must be at least 1")]
    BadRate,
    #[error("range {start}..{start}+{len} is outside the text of length {text_len}")]
    OutOfRange { start: usize, len: usize, text_len: usize },
}

/// Shortcuts through long tunnels. Every `rate`-th node of a tunnel of
/// length at least `rate` points to the tunnel's exit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkipPointers {
    pub(crate) marks: BitVec,
    pub(crate) exit: Vec<usize>,
    pub(crate) distance: Vec<usize>,
    // Per tunnel, the pointer-bearing nodes in path order (CSR layout).
    pub(crate) back_start: Vec<usize>,
    pub(crate) back_nodes: Vec<usize>,
}

impl SkipPointers {
    fn pointer(&self, v: usize) -> Option<(usize, usize)> {
        self.marks.get(v).then(|| {
            let k = self.marks.rank1(v) - 1;
            (self.exit[k], self.distance[k])
        })
    }

    /// Pointer-bearing nodes of tunnel `k`.
    pub fn back_pointers(&self, k: usize) -> &[usize] {
        &self.back_nodes[self.back_start[k]..self.back_start[k + 1]]
    }

    pub fn len(&self) -> usize {
        self.exit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exit.is_empty()
    }
}

/// Text positions of sampled nodes; only ordinary nodes are sampled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocateSamples {
    pub(crate) marks: BitVec,
    pub(crate) positions: Vec<usize>,
}

impl LocateSamples {
    fn position(&self, v: usize) -> Option<usize> {
        self.marks.get(v).then(|| self.positions[self.marks.rank1(v) - 1])
    }

    /// `(node, text position)` pairs in node order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (1..=self.marks.len()).filter(|&v| self.marks.get(v)).zip(self.positions.iter().copied()).collect()
    }
}

/// Prefix sums of node widths at every `rate`-th node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountSamples {
    pub(crate) sums: Vec<usize>,
}

impl CountSamples {
    pub fn sums(&self) -> &[usize] {
        &self.sums
    }
}

/// A self-index over a text: counting, locating, and extracting through
/// the tunneled Wheeler graph of the text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TextIndex {
    pub(crate) tg: TunneledGraph,
    pub(crate) n: usize,
    pub(crate) rate_n: usize,
    pub(crate) rate_t: usize,
    pub(crate) skip: SkipPointers,
    pub(crate) loc: LocateSamples,
    pub(crate) cnt: CountSamples,
    // (text position, node), sorted by position.
    pub(crate) ext: Vec<(usize, usize)>,
}

fn ceil_log2(x: usize) -> usize {
    (usize::BITS - x.saturating_sub(1).leading_zeros()) as usize
}

impl TextIndex {
    pub fn build(text: &[u8], config: &IndexConfig) -> Result<TextIndex, IndexError> {
        if config.sample_rate == Some(0) || config.tunnel_rate == Some(0) {
            return Err(IndexError::BadRate);
        }
        let rank = text_ranks(text);
        let g = build_with_ranks(text, &rank);
        let blocks = if config.tunneling {
            find_string_blocks(&g, config.min_width, config.min_length)
                .iter()
                .map(|b| b.to_block(&g).expect("found blocks are valid"))
                .collect()
        } else {
            Vec::new()
        };
        let mut tg = tunnel_graph(&g, &blocks).expect("found blocks are valid and disjoint");
        let n = g.n();
        let n_t = tg.graph().n();
        let rate_n = config.sample_rate.unwrap_or(ceil_log2(n).max(1));
        let rate_t = config.tunnel_rate.unwrap_or(ceil_log2(n_t).max(1));

        let skip = build_skip(&tg, rate_t);

        // Walk the text, contracting each tunnel traversal to one step.
        let node_of = |i: usize| tg.phi(rank[i]).expect("fresh graph keeps its node map");
        let mut marks = vec![false; n_t + 1];
        let mut at = vec![0usize; n_t + 1];
        let mut contracted = 0usize;
        let mut due = false;
        let mut prev_tunnel = None;
        for i in 1..=n {
            let v = node_of(i).node;
            let tunnel = tg.tunnel_of(v).map(|t| t.entrance);
            if tunnel.is_none() || tunnel != prev_tunnel {
                contracted += 1;
                if (contracted - 1).is_multiple_of(rate_n) {
                    due = true;
                }
            }
            prev_tunnel = tunnel;
            if tunnel.is_none() && (due || i == n) {
                marks[v] = true;
                at[v] = i;
                due = false;
            }
        }
        let loc = LocateSamples {
            marks: marks[1..].iter().copied().collect(),
            positions: (1..=n_t).filter(|&v| marks[v]).map(|v| at[v]).collect(),
        };

        let mut sums = vec![0];
        let mut acc = 0;
        for v in 1..=n_t {
            acc += tg.width(v);
            if v % rate_t == 0 {
                sums.push(acc);
            }
        }
        let cnt = CountSamples { sums };

        if !config.keep_node_map {
            tg.drop_node_map();
        }
        let ext = extract_samples(&loc);
        Ok(TextIndex { tg, n, rate_n, rate_t, skip, loc, cnt, ext })
    }

    pub(crate) fn from_parts(
        tg: TunneledGraph,
        rate_n: usize,
        rate_t: usize,
        skip: SkipPointers,
        loc: LocateSamples,
        cnt: CountSamples,
    ) -> TextIndex {
        let n = tg.original_n();
        let ext = extract_samples(&loc);
        TextIndex { tg, n, rate_n, rate_t, skip, loc, cnt, ext }
    }

    pub fn tunneled(&self) -> &TunneledGraph {
        &self.tg
    }

    /// Node count of the untunneled graph, `|T| + 1`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn text_len(&self) -> usize {
        self.n - 1
    }

    pub fn n_t(&self) -> usize {
        self.tg.graph().n()
    }

    pub fn m_t(&self) -> usize {
        self.tg.graph().m()
    }

    pub fn sample_rate(&self) -> usize {
        self.rate_n
    }

    pub fn tunnel_rate(&self) -> usize {
        self.rate_t
    }

    pub fn skip_pointers(&self) -> &SkipPointers {
        &self.skip
    }

    pub fn locate_samples(&self) -> &LocateSamples {
        &self.loc
    }

    pub fn count_samples(&self) -> &CountSamples {
        &self.cnt
    }

    /// Locate samples sorted by text position, as `(position, node)`.
    pub fn extract_samples(&self) -> &[(usize, usize)] {
        &self.ext
    }

    /// Edges saved by tunneling.
    pub fn merged_edges(&self) -> usize {
        self.tg.tunnels().iter().map(|t| (t.width - 1) * (t.length - 1)).sum()
    }

    /// One step forward along the text. Returns the next position and the
    /// label code read, or `None` at the end of the text.
    fn forward(&self, p: TraversalPos) -> Option<(TraversalPos, u8)> {
        let g = self.tg.graph();
        let d = g.outdegree(p.node);
        if d == 0 {
            return None;
        }
        let at = g.out_offset(p.node) + 1;
        let mut c = g.labels().access(at).expect("node has an out-edge");
        let mut j = g.c_array()[c as usize] + g.labels().partial_rank(at).expect("position holds its own symbol");
        if self.tg.is_marked(p.node) {
            if d == 1 {
                return Some((TraversalPos::new(g.target(j), p.offset), c));
            }
            // Exit: copies leave in rank order, one edge each.
            j += p.offset - 1;
            c = g.edge_label(j);
        }
        let t = g.target(j);
        let offset = if self.tg.is_entrance(t) { self.tg.enter_offset(j, t) } else { 1 };
        Some((TraversalPos::new(t, offset), c))
    }

    /// Width of the tunnel containing `v` (or 1) and the steps taken to find
    /// it.
    pub fn node_width_counted(&self, v: usize) -> (usize, usize) {
        if !self.tg.is_marked(v) {
            return (1, 1);
        }
        let g = self.tg.graph();
        let (mut x, mut steps) = (v, 1);
        loop {
            if let Some((exit, _)) = self.skip.pointer(x) {
                x = exit;
                steps += 1;
            }
            let d = g.outdegree(x);
            if d >= 2 {
                return (d, steps);
            }
            x = g.target(self.first_edge(x));
            steps += 1;
        }
    }

    fn first_edge(&self, x: usize) -> usize {
        let g = self.tg.graph();
        let at = g.out_offset(x) + 1;
        let c = g.labels().access(at).expect("node has an out-edge");
        g.c_array()[c as usize] + g.labels().partial_rank(at).expect("position holds its own symbol")
    }

    pub fn node_width(&self, v: usize) -> usize {
        self.node_width_counted(v).0
    }

    // Sum of widths over nodes 1..=x, plus node_width steps spent.
    fn width_prefix(&self, x: usize) -> (usize, usize) {
        let k = x / self.rate_t;
        let mut sum = self.cnt.sums[k];
        let mut steps = 0;
        for v in k * self.rate_t + 1..=x {
            let (w, s) = self.node_width_counted(v);
            sum += w;
            steps += s;
        }
        (sum, steps)
    }

    /// Occurrence count over a tunneled range, with evaluation steps.
    fn range_count(&self, r: TunneledRange) -> (usize, usize) {
        let TunneledRange::Span { lo, hi } = r else {
            return (0, 0);
        };
        let (upper, s1) = self.width_prefix(hi.node);
        let (lower, s2) = self.width_prefix(lo.node - 1);
        let mut total = upper - lower - (lo.offset - 1);
        let mut steps = s1 + s2;
        if hi.offset != LAST {
            let (w, s) = self.node_width_counted(hi.node);
            total -= w - hi.offset;
            steps += s;
        }
        (total, steps)
    }

    pub fn search(&self, pattern: &[u8]) -> TunneledRange {
        self.tg.search(pattern)
    }

    /// Number of occurrences of `pattern`, with the node-width evaluation
    /// steps spent at the ends of the range.
    pub fn count_counted(&self, pattern: &[u8]) -> (usize, usize) {
        self.range_count(self.search(pattern))
    }

    pub fn count(&self, pattern: &[u8]) -> usize {
        self.count_counted(pattern).0
    }

    /// Text position of the original node at `p`, and the traversal steps
    /// taken to reach a sample.
    pub fn locate_one_counted(&self, p: TraversalPos) -> (usize, usize) {
        let (mut cur, mut dist, mut steps) = (p, 0, 0);
        loop {
            if !self.tg.is_marked(cur.node) {
                if let Some(pos) = self.loc.position(cur.node) {
                    return (pos - dist, steps);
                }
            }
            if let Some((exit, d)) = self.skip.pointer(cur.node) {
                cur.node = exit;
                dist += d;
            } else {
                cur = self.forward(cur).expect("the last text position is sampled").0;
                dist += 1;
            }
            steps += 1;
        }
    }

    pub fn locate_one(&self, p: TraversalPos) -> usize {
        self.locate_one_counted(p).0
    }

    /// Positions inside a tunneled range, in Wheeler order.
    pub fn range_positions(&self, r: TunneledRange) -> Vec<TraversalPos> {
        let TunneledRange::Span { lo, hi } = r else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for v in lo.node..=hi.node {
            let first = if v == lo.node { lo.offset } else { 1 };
            let last = if v == hi.node && hi.offset != LAST { hi.offset } else { self.node_width(v) };
            out.extend((first..=last).map(|o| TraversalPos::new(v, o)));
        }
        out
    }

    /// Start positions (1-based) of the occurrences of `pattern`, ascending.
    /// With a limit, only the smallest `limit` positions are returned.
    pub fn locate(&self, pattern: &[u8], limit: Option<usize>) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .range_positions(self.search(pattern))
            .into_iter()
            .map(|p| self.locate_one(p) - pattern.len())
            .collect();
        out.sort_unstable();
        debug_assert!(out.windows(2).all(|w| w[0] < w[1]), "occurrences are distinct");
        out.dedup();
        if let Some(k) = limit {
            out.truncate(k);
        }
        out
    }

    /// Position of text node `v_i`.
    fn position_of(&self, i: usize) -> TraversalPos {
        let idx = self.ext.partition_point(|&(pos, _)| pos <= i);
        let (mut at, mut cur) = match idx {
            0 => (1, TraversalPos::new(1, 1)),
            k => (self.ext[k - 1].0, TraversalPos::new(self.ext[k - 1].1, 1)),
        };
        while at < i {
            let left = i - at;
            if self.tg.is_entrance(cur.node) {
                let k = self.tg.entrance_marks().rank1(cur.node) - 1;
                let length = self.tg.tunnels()[k].length;
                let back = self.skip.back_pointers(k);
                if left < length && !back.is_empty() {
                    // Target lies inside this tunnel; resume from the last
                    // pointer-bearing node before it.
                    let q = (left / self.rate_t).min(back.len() - 1);
                    if q > 0 {
                        cur.node = back[q];
                        at += q * self.rate_t;
                        continue;
                    }
                }
            }
            match self.skip.pointer(cur.node) {
                Some((exit, d)) if d <= left => {
                    cur.node = exit;
                    at += d;
                }
                _ => {
                    cur = self.forward(cur).expect("position within text").0;
                    at += 1;
                }
            }
        }
        cur
    }

    /// `T[start..start+len-1]` (1-based).
    pub fn extract(&self, start: usize, len: usize) -> Result<Vec<u8>, IndexError> {
        let text_len = self.text_len();
        if start == 0 || start - 1 + len > text_len {
            return Err(IndexError::OutOfRange { start, len, text_len });
        }
        let mut out = Vec::with_capacity(len);
        if len == 0 {
            return Ok(out);
        }
        let mut cur = self.position_of(start);
        let alphabet = self.tg.graph().alphabet();
        for _ in 0..len {
            let (next, c) = self.forward(cur).expect("position within text");
            out.push(alphabet.byte(c));
            cur = next;
        }
        Ok(out)
    }

    /// Sum of all node widths; equals `n`.
    pub fn total_width(&self) -> usize {
        self.width_prefix(self.n_t()).0
    }
}

fn build_skip(tg: &TunneledGraph, rate: usize) -> SkipPointers {
    let g = tg.graph();
    let mut pointers: Vec<(usize, usize, usize)> = Vec::new();
    let mut back_start = vec![0];
    let mut back_nodes = Vec::new();
    for t in tg.tunnels() {
        if t.length >= rate {
            let mut x = t.entrance;
            for col in 1..t.length {
                if (col - 1) % rate == 0 {
                    pointers.push((x, t.exit, t.length - col));
                    back_nodes.push(x);
                }
                let edges = g.out_edges(x);
                x = edges[0].2;
            }
        }
        back_start.push(back_nodes.len());
    }
    pointers.sort_unstable();
    let mut marks = vec![false; g.n()];
    for &(x, _, _) in &pointers {
        marks[x - 1] = true;
    }
    SkipPointers {
        marks: marks.into_iter().collect(),
        exit: pointers.iter().map(|p| p.1).collect(),
        distance: pointers.iter().map(|p| p.2).collect(),
        back_start,
        back_nodes,
    }
}

fn extract_samples(loc: &LocateSamples) -> Vec<(usize, usize)> {
    let mut ext: Vec<(usize, usize)> = loc.pairs().into_iter().map(|(v, p)| (p, v)).collect();
    ext.sort_unstable();
    ext
}
