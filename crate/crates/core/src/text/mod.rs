//! The Wheeler graph of a string and a tunneled self-index over it.

mod index;
mod sa;

pub use index::{IndexConfig, IndexError, SkipPointers, LocateSamples, CountSamples, TextIndex};
pub use sa::suffix_array;

use crate::wheeler::{Alphabet, WheelerGraph};

/// Wheeler rank of every text position `1..=|T|+1`, where node `v_i`
/// stands for the prefix `T[1..i-1]`. Index 0 is unused.
pub fn text_ranks(text: &[u8]) -> Vec<usize> {
    let reversed: Vec<u8> = text.iter().rev().copied().collect();
    let sa = suffix_array(&reversed);
    let n = text.len() + 1;
    let mut rank = vec![0; n + 1];
    for (r, &k) in sa.iter().enumerate() {
        // Suffix k of the reversed text is the reversed prefix of v_{n-k}.
        rank[n - k] = r + 1;
    }
    rank
}

/// The path graph `v_1 -> v_2 -> ... -> v_{|T|+1}` with edge `(v_i,
/// v_{i+1})` labelled `T[i]`, nodes in co-lexicographic order of their
/// prefixes.
pub fn build_graph_from_text(text: &[u8]) -> WheelerGraph {
    let rank = text_ranks(text);
    build_with_ranks(text, &rank)
}

pub(crate) fn build_with_ranks(text: &[u8], rank: &[usize]) -> WheelerGraph {
    let n = text.len() + 1;
    let alphabet = Alphabet::from_bytes(text.iter().copied());
    let mut pos = vec![0; n + 1];
    for i in 1..=n {
        pos[rank[i]] = i;
    }
    // Every node but rank 1 has one in-edge, so edges sorted by target
    // are in Wheeler order.
    let edges: Vec<(usize, usize, u8)> = (2..=n)
        .map(|t| {
            let i = pos[t];
            (rank[i - 1], t, alphabet.code(text[i - 2]).unwrap())
        })
        .collect();
    WheelerGraph::from_ordered(n, alphabet, &edges)
}
