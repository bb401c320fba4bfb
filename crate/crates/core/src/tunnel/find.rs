use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashSet};

use thiserror::Error;

use crate::tunnel::block::{check_block, Block, StringBlock};
use crate::wheeler::WheelerGraph;

const COLLAPSED: u8 = 1;
const FOLLOWER: u8 = 2;

/// A path graph seen through text positions.
struct PathView {
    // rank -> position and position -> rank, both 1-based.
    pos: Vec<usize>,
    rank: Vec<usize>,
    // Label of the edge entering each position (None for position 1).
    label: Vec<Option<u8>>,
}

impl PathView {
    fn new(g: &WheelerGraph) -> Option<PathView> {
        let n = g.n();
        if g.m() + 1 != n {
            return None;
        }
        let mut pos = vec![0; n + 1];
        let mut rank = vec![0; n + 1];
        let mut label = vec![None; n + 1];
        let mut v = 1;
        for p in 1..=n {
            if pos[v] != 0 {
                return None;
            }
            pos[v] = p;
            rank[p] = v;
            let out = g.out_edges(v);
            match (out.len(), p == n) {
                (0, true) => {}
                (1, false) => {
                    label[p + 1] = Some(out[0].1);
                    v = out[0].2;
                }
                _ => return None,
            }
        }
        Some(PathView { pos, rank, label })
    }

    fn n(&self) -> usize {
        self.pos.len() - 1
    }

    fn out_label(&self, p: usize) -> Option<u8> {
        self.label.get(p + 1).copied().flatten()
    }
}

/// Incremental state of one candidate block.
#[derive(Debug, Clone)]
struct Cand {
    start: usize,
    width: usize,
    length: usize,
    // Text positions of the first column, sorted.
    positions: BTreeSet<usize>,
    min_gap: usize,
}

fn compatible(a: Option<u8>, b: Option<u8>) -> bool {
    a.is_none() || b.is_none() || a == b
}

impl Cand {
    fn new(view: &PathView, start: usize, width: usize) -> Cand {
        let positions: BTreeSet<usize> = (start..start + width).map(|r| view.pos[r]).collect();
        let sorted: Vec<usize> = positions.iter().copied().collect();
        let min_gap = sorted.windows(2).map(|p| p[1] - p[0]).min().unwrap_or(usize::MAX);
        Cand { start, width, length: 1, positions, min_gap }
    }

    fn block(&self) -> StringBlock {
        StringBlock::new(self.start, self.width, self.length)
    }

    fn first_pos(&self, view: &PathView) -> usize {
        view.pos[self.start]
    }

    // Ranks of column j (0-based) are rank[first + j] .. + width.
    fn column_start(&self, view: &PathView, j: usize) -> usize {
        view.rank[self.first_pos(view) + j]
    }

    fn column_label(&self, view: &PathView, j: usize) -> Option<u8> {
        let r = self.column_start(view, j);
        (r..r + self.width).find_map(|r| view.label[view.pos[r]])
    }

    fn column_free(&self, view: &PathView, used: &[u8], j: usize, forbidden: u8) -> bool {
        self.ranks_free(used, self.column_start(view, j), forbidden)
    }

    fn ranks_free(&self, used: &[u8], r: usize, forbidden: u8) -> bool {
        (r..r + self.width).all(|r| used[r] & forbidden == 0)
    }

    fn try_append(&mut self, view: &PathView, used: &[u8]) -> bool {
        let s = self.length;
        if self.min_gap <= s + 1 {
            return false;
        }
        let p0 = self.first_pos(view);
        if p0 + s + 1 > view.n() || self.positions.iter().any(|&p| p + s + 1 > view.n()) {
            return false;
        }
        let r0 = view.rank[p0 + s + 1];
        let label = view.label[p0 + s];
        for (i, r) in (self.start..self.start + self.width).enumerate() {
            let p = view.pos[r];
            if view.rank[p + s + 1] != r0 + i || view.label[p + s] != label {
                return false;
            }
        }
        if !self.column_free(view, used, s, COLLAPSED | FOLLOWER) || !self.ranks_free(used, r0, COLLAPSED) {
            return false;
        }
        self.length += 1;
        true
    }

    fn try_prepend(&mut self, view: &PathView, used: &[u8]) -> bool {
        if self.min_gap <= self.length + 1 || self.positions.iter().next().is_some_and(|&p| p < 2) {
            return false;
        }
        let r0 = view.rank[self.first_pos(view) - 1];
        let mut label = None;
        for (i, r) in (self.start..self.start + self.width).enumerate() {
            let p = view.pos[r] - 1;
            if view.rank[p] != r0 + i || !compatible(label, view.label[p]) {
                return false;
            }
            label = label.or(view.label[p]);
        }
        if !self.ranks_free(used, r0, COLLAPSED | FOLLOWER) {
            return false;
        }
        self.positions = self.positions.iter().map(|p| p - 1).collect();
        self.start = r0;
        self.length += 1;
        true
    }

    /// Adds the copy whose root is rank `r` (either `start - 1` or
    /// `start + width`).
    fn try_widen(&mut self, view: &PathView, used: &[u8], r: usize) -> bool {
        if r == 0 || r > view.n() {
            return false;
        }
        let s = self.length;
        let p = view.pos[r];
        if p + s > view.n() {
            return false;
        }
        let left = r < self.start;
        let p0 = self.first_pos(view);
        // Neighbouring copy in rank order, column by column.
        let anchor = if left { p0 } else { view.pos[self.start + self.width - 1] };
        for j in 0..=s {
            let expected = if left { view.rank[anchor + j] - 1 } else { view.rank[anchor + j] + 1 };
            if view.rank[p + j] != expected {
                return false;
            }
            if j < s && !compatible(self.column_label(view, j), view.label[p + j]) {
                return false;
            }
            let forbidden = if j < s { COLLAPSED | FOLLOWER } else { COLLAPSED };
            if used[view.rank[p + j]] & forbidden != 0 {
                return false;
            }
        }
        let prev = self.positions.range(..p).next_back().map_or(usize::MAX, |&q| p - q);
        let next = self.positions.range(p..).next().map_or(usize::MAX, |&q| q - p);
        let gap = self.min_gap.min(prev).min(next);
        if gap <= s {
            return false;
        }
        self.positions.insert(p);
        self.min_gap = gap;
        self.width += 1;
        if left {
            self.start = r;
        }
        true
    }

    fn maximize(&mut self, view: &PathView, used: &[u8]) {
        loop {
            let grew = self.try_append(view, used)
                || self.try_prepend(view, used)
                || self.try_widen(view, used, self.start + self.width)
                || self.try_widen(view, used, self.start - 1);
            if !grew {
                break;
            }
        }
    }

    /// Shortens to the longest prefix of columns that is conflict-free.
    /// Returns false if nothing usable is left.
    fn truncate(&mut self, view: &PathView, used: &[u8]) -> bool {
        let mut keep = 0;
        for t in 0..=self.length {
            if self.column_free(view, used, t, COLLAPSED) && t > 0 {
                keep = t;
            }
            if t == self.length || !self.column_free(view, used, t, COLLAPSED | FOLLOWER) {
                break;
            }
        }
        self.length = keep;
        keep > 0
    }

    fn conflict_free(&self, view: &PathView, used: &[u8]) -> bool {
        (0..self.length).all(|j| self.column_free(view, used, j, COLLAPSED | FOLLOWER))
            && self.column_free(view, used, self.length, COLLAPSED)
    }

    fn key(&self) -> (usize, Reverse<usize>, usize, usize) {
        (self.block().merged_edges(), Reverse(self.start), self.width, self.length)
    }
}

/// Seeds: maximal windows of consecutive ranks with equal out-labels,
/// compatible in-labels, and no two text positions adjacent.
fn seeds(view: &PathView, min_w: usize) -> Vec<(usize, usize)> {
    let n = view.n();
    let mut out = Vec::new();
    let mut r = 1;
    while r <= n {
        let c = view.out_label(view.pos[r]);
        if c.is_none() {
            r += 1;
            continue;
        }
        let mut label = view.label[view.pos[r]];
        let mut end = r + 1;
        while end <= n
            && view.out_label(view.pos[end]) == c
            && compatible(label, view.label[view.pos[end]])
        {
            label = label.or(view.label[view.pos[end]]);
            end += 1;
        }
        // Sliding window over [r, end).
        let mut set = HashSet::new();
        let mut lo = r;
        for hi in r..end {
            let p = view.pos[hi];
            if set.contains(&(p + 1)) || (p > 1 && set.contains(&(p - 1))) {
                if hi - lo >= min_w {
                    out.push((lo, hi - lo));
                }
                while set.contains(&(p + 1)) || (p > 1 && set.contains(&(p - 1))) {
                    set.remove(&view.pos[lo]);
                    lo += 1;
                }
            }
            set.insert(p);
        }
        if end - lo >= min_w {
            out.push((lo, end - lo));
        }
        r = end;
    }
    out
}

/// Greedy discovery of pairwise disjoint string blocks. Blocks never share
/// nodes, and no block's collapsed columns touch another block's follower
/// column, so every tunnel is followed by ordinary nodes.
///
/// Returns an empty list when `g` is not the graph of a string.
pub fn find_string_blocks(g: &WheelerGraph, min_w: usize, min_s: usize) -> Vec<StringBlock> {
    let (min_w, min_s) = (min_w.max(2), min_s.max(1));
    let Some(view) = PathView::new(g) else {
        return Vec::new();
    };
    let n = view.n();
    let mut used = vec![0u8; n + 1];
    let mut covered = vec![false; n + 1];
    let mut heap = BinaryHeap::new();
    let mut pool = Vec::new();

    for (a, w) in seeds(&view, min_w) {
        if (a..a + w).all(|r| covered[r]) {
            continue;
        }
        let mut cand = Cand::new(&view, a, w);
        cand.maximize(&view, &used);
        for j in 0..cand.length {
            let r = cand.column_start(&view, j);
            covered[r..r + cand.width].iter_mut().for_each(|c| *c = true);
        }
        if cand.width >= min_w && cand.length >= min_s {
            heap.push((cand.key(), pool.len()));
            pool.push(cand);
        }
    }

    let mut selected = Vec::new();
    while let Some((_, idx)) = heap.pop() {
        let mut cand = pool[idx].clone();
        if cand.conflict_free(&view, &used) {
            for j in 0..=cand.length {
                let r = cand.column_start(&view, j);
                let flag = if j < cand.length { COLLAPSED } else { FOLLOWER };
                used[r..r + cand.width].iter_mut().for_each(|u| *u |= flag);
            }
            selected.push(cand.block());
            continue;
        }
        if !cand.truncate(&view, &used) {
            continue;
        }
        cand.maximize(&view, &used);
        if cand.width >= min_w && cand.length >= min_s {
            heap.push((cand.key(), pool.len()));
            pool.push(cand);
        }
    }
    selected.sort();
    selected
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("graph has {n} nodes, more than the limit of {max_nodes}")]
pub struct TooLarge {
    pub n: usize,
    pub max_nodes: usize,
}

/// Tree grown greedily from roots `a..a+w`: a child column is added for
/// label `c` whenever every copy has exactly one `c`-edge, the targets are
/// consecutive, of indegree 1, and new, and no target has an edge back
/// into a root.
fn greedy_block(g: &WheelerGraph, a: usize, w: usize) -> Option<Block> {
    if a == 0 || a + w - 1 > g.n() {
        return None;
    }
    let mut label = None;
    for r in a..a + w {
        let c = g.in_label(r);
        if !compatible(label, c) {
            return None;
        }
        label = label.or(c);
    }
    let roots = a..a + w;
    let mut columns = vec![roots.clone().collect::<Vec<_>>()];
    let mut seen: HashSet<usize> = roots.clone().collect();
    let mut j = 0;
    while j < columns.len() {
        let outs: Vec<_> = columns[j].iter().map(|&v| g.out_edges(v)).collect();
        let labels: BTreeSet<u8> = outs.iter().flatten().map(|e| e.1).collect();
        for c in labels {
            let mut targets = Vec::with_capacity(w);
            for edges in &outs {
                let mut it = edges.iter().filter(|e| e.1 == c);
                match (it.next(), it.next()) {
                    (Some(e), None) => targets.push(e.2),
                    _ => break,
                }
            }
            if targets.len() != w
                || targets.windows(2).any(|t| t[1] != t[0] + 1)
                || targets.iter().any(|&t| g.indegree(t) != 1 || seen.contains(&t))
                || targets.iter().any(|&t| g.out_edges(t).iter().any(|e| roots.contains(&e.2)))
            {
                continue;
            }
            seen.extend(targets.iter().copied());
            columns.push(targets);
        }
        j += 1;
    }
    Block::new(columns).ok()
}

// Column index of every node, 0 outside the block.
fn column_map(b: &Block, n: usize) -> Vec<usize> {
    let mut map = vec![0; n + 1];
    for (j, col) in b.columns().iter().enumerate() {
        for &v in col {
            map[v] = j + 1;
        }
    }
    map
}

/// True if every column of `inner` lies inside a single column of the
/// block described by `outer_map`.
fn extends(outer_map: &[usize], inner: &Block) -> bool {
    inner.columns().iter().all(|col| {
        let j = outer_map[col[0]];
        j != 0 && col.iter().all(|&v| outer_map[v] == j)
    })
}

/// Every maximal block: for each root column the largest valid block is
/// grown, and blocks that another valid block extends (wider columns, more
/// columns, or both) are dropped.
pub fn enumerate_blocks_bruteforce(g: &WheelerGraph, max_nodes: usize) -> Result<Vec<Block>, TooLarge> {
    let n = g.n();
    if n > max_nodes {
        return Err(TooLarge { n, max_nodes });
    }
    let mut valid = Vec::new();
    for a in 1..=n {
        for w in 1..=n + 1 - a {
            let Some(block) = greedy_block(g, a, w) else {
                // Wider root columns share the in-label conflict.
                break;
            };
            if check_block(g, &block).is_ok() {
                let map = column_map(&block, n);
                valid.push((block, map));
            }
        }
    }
    let maximal = valid
        .iter()
        .filter(|(b, _)| {
            !valid.iter().any(|(o, omap)| o.width() * o.size() > b.width() * b.size() && extends(omap, b))
        })
        .map(|(b, _)| b.clone())
        .collect();
    Ok(maximal)
}
