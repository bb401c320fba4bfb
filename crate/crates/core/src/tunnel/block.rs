use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::wheeler::WheelerGraph;

/// A family of `width` label-isomorphic subtrees laid out column-wise:
/// `columns[j][i]` is node `v_{i+1, j+1}`. The first column holds the roots.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    columns: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockViolation {
    #[error("block has no columns, an empty column, or ragged columns")]
    Shape,
    #[error("node {node} is outside 1..={n}")]
    OutOfRange { node: usize, n: usize },
    #[error("node {node} appears twice")]
    Repeated { node: usize },
    #[error("(i) column {column}: node {node} does not follow its left neighbour")]
    NotConsecutive { column: usize, node: usize },
    #[error("(ii) copy {copy} is not a tree rooted at its first node")]
    NotTree { copy: usize },
    #[error("(ii) copy {copy} is not label-isomorphic to copy 1")]
    NotIsomorphic { copy: usize },
    #[error("(iii) in-labels differ between {first} and {second}")]
    InLabels { first: usize, second: usize },
    #[error("(iv) non-root node {node} has indegree {indegree}")]
    Indegree { node: usize, indegree: usize },
    #[error("(v) column {column}: out-edges labelled {label} are neither all internal nor all external")]
    OutEdges { column: usize, label: u8 },
    #[error("(ii) node {node} has {outdegree} out-edges on a string path")]
    NotPath { node: usize, outdegree: usize },
}

impl BlockViolation {
    /// The block condition that failed: "i" through "v", or "shape".
    pub fn condition(&self) -> &'static str {
        match self {
            BlockViolation::Shape | BlockViolation::OutOfRange { .. } | BlockViolation::Repeated { .. } => "shape",
            BlockViolation::NotConsecutive { .. } => "i",
            BlockViolation::NotTree { .. } | BlockViolation::NotIsomorphic { .. } | BlockViolation::NotPath { .. } => "ii",
            BlockViolation::InLabels { .. } => "iii",
            BlockViolation::Indegree { .. } => "iv",
            BlockViolation::OutEdges { .. } => "v",
        }
    }
}

impl Block {
    pub fn new(columns: Vec<Vec<usize>>) -> Result<Block, BlockViolation> {
        let w = columns.first().map_or(0, Vec::len);
        if w == 0 || columns.iter().any(|c| c.len() != w) {
            return Err(BlockViolation::Shape);
        }
        Ok(Block { columns })
    }

    pub fn width(&self) -> usize {
        self.columns[0].len()
    }

    pub fn size(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn roots(&self) -> &[usize] {
        &self.columns[0]
    }

    pub fn nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.columns.iter().flatten().copied()
    }

    /// Node set of copy `i` (0-based), in column order.
    pub fn copy(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.columns.iter().map(move |c| c[i])
    }

    /// Shared label of the edges entering the roots, if any root has one.
    pub fn entry_label(&self, g: &WheelerGraph) -> Option<u8> {
        self.roots().iter().find_map(|&r| g.in_label(r))
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BLOCK {} {}", self.width(), self.size())?;
        for col in &self.columns {
            let line: Vec<String> = col.iter().map(usize::to_string).collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

/// Checks the five block conditions. The copy isomorphisms are the column
/// correspondences `v_{i,j} -> v_{i+1,j}`.
pub fn check_block(g: &WheelerGraph, b: &Block) -> Result<(), BlockViolation> {
    let (w, s) = (b.width(), b.size());
    // node -> (copy, column)
    let mut place: HashMap<usize, (usize, usize)> = HashMap::with_capacity(w * s);
    for (j, col) in b.columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            if v == 0 || v > g.n() {
                return Err(BlockViolation::OutOfRange { node: v, n: g.n() });
            }
            if place.insert(v, (i, j)).is_some() {
                return Err(BlockViolation::Repeated { node: v });
            }
        }
    }

    for (j, col) in b.columns.iter().enumerate() {
        for pair in col.windows(2) {
            if pair[1] != pair[0] + 1 {
                return Err(BlockViolation::NotConsecutive { column: j, node: pair[1] });
            }
        }
    }

    // Internal edges of each copy as (from column, to column, label), plus
    // per (column, label) tallies of internal and total out-edges.
    let mut internal: Vec<Vec<(usize, usize, u8)>> = vec![Vec::new(); w];
    let mut tally: HashMap<(usize, u8), Vec<(usize, usize)>> = HashMap::new();
    for (j, col) in b.columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            for (_, c, t) in g.out_edges(v) {
                let counts = tally.entry((j, c)).or_insert_with(|| vec![(0, 0); w]);
                counts[i].1 += 1;
                match place.get(&t) {
                    Some(&(ti, tj)) if ti == i => {
                        internal[i].push((j, tj, c));
                        counts[i].0 += 1;
                    }
                    // An edge into another copy cannot be redirected.
                    Some(_) => return Err(BlockViolation::OutEdges { column: j, label: c }),
                    None => {}
                }
            }
        }
    }

    for (i, edges) in internal.iter_mut().enumerate() {
        if edges.len() != s - 1 {
            return Err(BlockViolation::NotTree { copy: i + 1 });
        }
        let mut parent = vec![None; s];
        for &(from, to, _) in edges.iter() {
            if to == 0 || parent[to].is_some() {
                return Err(BlockViolation::NotTree { copy: i + 1 });
            }
            parent[to] = Some(from);
        }
        // Every column must reach the root through parents without cycling.
        for start in 1..s {
            let (mut cur, mut hops) = (start, 0);
            while let Some(p) = parent[cur] {
                cur = p;
                hops += 1;
                if hops > s {
                    return Err(BlockViolation::NotTree { copy: i + 1 });
                }
            }
            if cur != 0 {
                return Err(BlockViolation::NotTree { copy: i + 1 });
            }
        }
        edges.sort_unstable();
    }
    for i in 1..w {
        if internal[i] != internal[0] {
            return Err(BlockViolation::NotIsomorphic { copy: i + 1 });
        }
    }

    let mut labelled_root: Option<(usize, u8)> = None;
    for &r in b.roots() {
        if let Some(c) = g.in_label(r) {
            match labelled_root {
                Some((first, c0)) if c0 != c => return Err(BlockViolation::InLabels { first, second: r }),
                None => labelled_root = Some((r, c)),
                _ => {}
            }
        }
    }

    for col in &b.columns[1..] {
        for &v in col {
            let d = g.indegree(v);
            if d != 1 {
                return Err(BlockViolation::Indegree { node: v, indegree: d });
            }
        }
    }

    for (&(column, label), counts) in &tally {
        let all_internal = counts.iter().all(|&(inside, total)| inside == 1 && total == 1);
        let none_internal = counts.iter().all(|&(inside, _)| inside == 0);
        if !all_internal && !none_internal {
            return Err(BlockViolation::OutEdges { column, label });
        }
    }
    Ok(())
}

/// A block in the Wheeler graph of a string: `length + 1` columns of `width`
/// consecutive ranks, starting at `start_rank`, each column the successor of
/// the previous one along the text. Only the first `length` columns are
/// collapsed by tunneling; the last one stays as the follower column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StringBlock {
    pub start_rank: usize,
    pub width: usize,
    pub length: usize,
}

impl StringBlock {
    pub fn new(start_rank: usize, width: usize, length: usize) -> StringBlock {
        StringBlock { start_rank, width, length }
    }

    /// Edges saved by tunneling: `(w - 1) * (s - 1)`.
    pub fn merged_edges(&self) -> usize {
        (self.width - 1) * self.length.saturating_sub(1)
    }

    /// Nodes saved by tunneling: `(w - 1) * s`.
    pub fn merged_nodes(&self) -> usize {
        (self.width - 1) * self.length
    }

    /// All `length + 1` columns, following unique out-edges from the start
    /// column.
    pub fn columns(&self, g: &WheelerGraph) -> Result<Vec<Vec<usize>>, BlockViolation> {
        if self.width == 0 || self.length == 0 {
            return Err(BlockViolation::Shape);
        }
        let last = self.start_rank + self.width - 1;
        if self.start_rank == 0 || last > g.n() {
            return Err(BlockViolation::OutOfRange { node: last.max(self.start_rank), n: g.n() });
        }
        let mut columns = vec![(self.start_rank..=last).collect::<Vec<_>>()];
        for _ in 0..self.length {
            let prev = columns.last().unwrap();
            let mut next = Vec::with_capacity(self.width);
            for &v in prev {
                let out = g.out_edges(v);
                if out.len() != 1 {
                    return Err(BlockViolation::NotPath { node: v, outdegree: out.len() });
                }
                next.push(out[0].2);
            }
            columns.push(next);
        }
        Ok(columns)
    }

    /// The collapsed part as a general [`Block`].
    pub fn to_block(&self, g: &WheelerGraph) -> Result<Block, BlockViolation> {
        let mut columns = self.columns(g)?;
        columns.pop();
        Block::new(columns)
    }
}

/// Checks the string block conditions: consecutive columns (including the
/// follower column), path edges between columns, and equal in-labels on
/// each collapsed column.
pub fn check_string_block(g: &WheelerGraph, sb: &StringBlock) -> Result<(), BlockViolation> {
    let columns = sb.columns(g)?;
    let mut seen = std::collections::HashSet::new();
    for col in &columns {
        for &v in col {
            if !seen.insert(v) {
                return Err(BlockViolation::Repeated { node: v });
            }
        }
    }
    for (j, col) in columns.iter().enumerate() {
        for pair in col.windows(2) {
            if pair[1] != pair[0] + 1 {
                return Err(BlockViolation::NotConsecutive { column: j, node: pair[1] });
            }
        }
    }
    for col in &columns[..sb.length] {
        let mut label: Option<(usize, u8)> = None;
        for &v in col {
            if let Some(c) = g.in_label(v) {
                match label {
                    Some((first, c0)) if c0 != c => return Err(BlockViolation::InLabels { first, second: v }),
                    None => label = Some((v, c)),
                    _ => {}
                }
            }
        }
    }
    Ok(())
}
