#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use tunnelwg::tunnel::Block;
use tunnelwg::wheeler::{Edge, EdgeList, WheelerGraph};

pub const SIGMAS: [usize; 4] = [2, 4, 26, 256];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Random,
    Periodic,
    Fibonacci,
    CopyPaste,
}

pub struct Sample {
    pub kind: Kind,
    pub sigma: usize,
    pub text: Vec<u8>,
}

fn symbol(rng: &mut StdRng, sigma: usize) -> u8 {
    if sigma == 256 {
        rng.gen()
    } else {
        b'a' + rng.gen_range(0..sigma) as u8
    }
}

fn length(rng: &mut StdRng, max: usize) -> usize {
    let cap = match rng.gen_range(0..10) {
        0..=5 => 300,
        6..=8 => 2000,
        _ => max,
    };
    rng.gen_range(0..=cap.min(max))
}

pub fn text_of(kind: Kind, sigma: usize, len: usize, rng: &mut StdRng) -> Vec<u8> {
    match kind {
        Kind::Random => (0..len).map(|_| symbol(rng, sigma)).collect(),
        Kind::Periodic => {
            let period: Vec<u8> = (0..rng.gen_range(1..=8)).map(|_| symbol(rng, sigma)).collect();
            period.iter().copied().cycle().take(len).collect()
        }
        Kind::Fibonacci => {
            let (x, y) = (symbol(rng, sigma), symbol(rng, sigma));
            let (mut a, mut b) = (vec![x], vec![x, y]);
            while b.len() < len {
                let next = [b.clone(), a].concat();
                a = b;
                b = next;
            }
            b.truncate(len);
            b
        }
        Kind::CopyPaste => {
            let mut t: Vec<u8> = (0..len.min(rng.gen_range(1..=64))).map(|_| symbol(rng, sigma)).collect();
            while t.len() < len {
                let s = rng.gen_range(0..t.len());
                let l = rng.gen_range(1..=t.len() - s).min(len - t.len());
                let mut piece = t[s..s + l].to_vec();
                for c in piece.iter_mut() {
                    if rng.gen_bool(0.02) {
                        *c = symbol(rng, sigma);
                    }
                }
                t.extend(piece);
            }
            t
        }
    }
}

/// The differential corpus: `count` texts cycling through the four kinds
/// and four alphabet sizes.
pub fn corpus(count: usize, max_len: usize, seed: u64) -> Vec<Sample> {
    let mut rng = StdRng::seed_from_u64(seed);
    let kinds = [Kind::Random, Kind::Periodic, Kind::Fibonacci, Kind::CopyPaste];
    (0..count)
        .map(|i| {
            let kind = kinds[i % 4];
            let sigma = SIGMAS[(i / 4) % 4];
            let len = length(&mut rng, max_len);
            Sample { kind, sigma, text: text_of(kind, sigma, len, &mut rng) }
        })
        .collect()
}

pub fn patterns(text: &[u8], sigma: usize, count: usize, rng: &mut StdRng) -> Vec<Vec<u8>> {
    (0..count)
        .map(|i| {
            if i % 10 < 7 && !text.is_empty() {
                let l = rng.gen_range(1..=32.min(text.len()));
                let s = rng.gen_range(0..=text.len() - l);
                let mut p = text[s..s + l].to_vec();
                if i % 10 == 6 {
                    let k = rng.gen_range(0..l);
                    p[k] = symbol(rng, sigma);
                }
                p
            } else {
                (0..rng.gen_range(1..=8)).map(|_| symbol(rng, sigma)).collect()
            }
        })
        .collect()
}

pub fn naive_locate(text: &[u8], p: &[u8]) -> Vec<usize> {
    if p.len() > text.len() {
        return Vec::new();
    }
    (0..=text.len() - p.len()).filter(|&i| &text[i..i + p.len()] == p).map(|i| i + 1).collect()
}

/// A trie of `words`, nodes in co-lexicographic order of their path labels.
pub fn trie(words: &[Vec<u8>]) -> EdgeList {
    let mut paths: BTreeMap<Vec<u8>, ()> = BTreeMap::new();
    for w in words {
        for l in 0..=w.len() {
            paths.insert(w[..l].to_vec(), ());
        }
    }
    let mut nodes: Vec<Vec<u8>> = paths.into_keys().collect();
    nodes.sort_by(|a, b| a.iter().rev().cmp(b.iter().rev()));
    let rank: BTreeMap<Vec<u8>, usize> = nodes.iter().enumerate().map(|(i, p)| (p.clone(), i + 1)).collect();
    let edges = nodes
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| Edge::new(rank[&p[..p.len() - 1]], rank[p], p[p.len() - 1]))
        .collect();
    EdgeList::new(nodes.len(), edges)
}

/// Random trie with at most `max_nodes` nodes. Words share suffixes so
/// that isomorphic subtrees appear.
pub fn random_trie(rng: &mut StdRng, max_nodes: usize) -> EdgeList {
    let sigma = rng.gen_range(2..=4u8);
    let tails: Vec<Vec<u8>> = (0..3)
        .map(|_| (0..rng.gen_range(1..=4)).map(|_| b'a' + rng.gen_range(0..sigma)).collect())
        .collect();
    let mut words: Vec<Vec<u8>> = Vec::new();
    let mut best = trie(&words);
    for _ in 0..40 {
        let head: Vec<u8> = (0..rng.gen_range(0..=4)).map(|_| b'a' + rng.gen_range(0..sigma)).collect();
        let tail = &tails[rng.gen_range(0..tails.len())];
        let mut w = head;
        w.extend_from_slice(tail);
        words.push(w);
        let t = trie(&words);
        if t.n > max_nodes {
            break;
        }
        best = t;
    }
    best
}

/// Greedily picks pairwise disjoint blocks of width at least 2.
pub fn disjoint(blocks: &[Block]) -> Vec<Block> {
    let mut used = std::collections::HashSet::new();
    let mut out = Vec::new();
    for b in blocks.iter().filter(|b| b.width() >= 2) {
        if b.nodes().all(|v| !used.contains(&v)) {
            used.extend(b.nodes());
            out.push(b.clone());
        }
    }
    out
}

/// Two isomorphic 7-node trees on consecutive ranks inside a 35-node graph,
/// with differing outside neighbours.
pub fn example_graph() -> WheelerGraph {
    let edges = [
        (1, 16, b'b'), (2, 17, b'b'), (3, 17, b'b'), (4, 18, b'b'), (5, 27, b'c'), (6, 28, b'c'),
        (6, 29, b'c'), (6, 30, b'c'), (8, 19, b'b'), (8, 31, b'c'), (9, 20, b'b'), (9, 32, b'c'),
        (10, 5, b'a'), (11, 6, b'a'), (14, 7, b'a'), (14, 33, b'c'), (16, 8, b'a'), (17, 9, b'a'),
        (18, 9, b'a'), (19, 10, b'a'), (20, 11, b'a'), (20, 21, b'b'), (21, 12, b'a'), (21, 22, b'b'),
        (25, 23, b'b'), (26, 13, b'a'), (31, 24, b'b'), (31, 34, b'c'), (32, 25, b'b'), (32, 35, b'c'),
        (34, 14, b'a'), (34, 15, b'a'), (35, 26, b'b'),
    ];
    let el = EdgeList::new(35, edges.iter().map(|&(s, t, c)| Edge::new(s, t, c)).collect());
    WheelerGraph::encode(&el).expect("example graph is Wheeler")
}

/// The width-2 block of the two trees: roots 8/9, then the tree columns.
pub fn example_block() -> Block {
    Block::new(vec![
        vec![8, 9],
        vec![19, 20],
        vec![31, 32],
        vec![10, 11],
        vec![24, 25],
        vec![34, 35],
        vec![5, 6],
    ])
    .unwrap()
}
