//! Rank/select bitvectors and a rank-capable label sequence.
//!
//! Positions and ordinals are 1-based throughout, matching the usual
//! `rank_b(S, i)` / `select_b(S, k)` notation: `rank(i, b)` counts occurrences
//! of `b` in `S[1..=i]` and `select(k, b)` returns the position of the `k`-th
//! occurrence.

use thiserror::Error;

const WORD_BITS: usize = 64;
const WORDS_PER_SUPER: usize = 8;
const SUPER_BITS: usize = WORD_BITS * WORDS_PER_SUPER;
const SELECT_SAMPLE: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitVecError {
    #[error("position {index} out of bounds for length {len}")]
    OutOfBounds { index: usize, len: usize },
    #[error("no {ordinal}-th occurrence of {symbol}")]
    NotFound { ordinal: usize, symbol: usize },
}

/// An immutable bitvector with a two-level rank directory and sampled
/// select hints.
#[derive(Clone, PartialEq, Eq)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
    // Ones before each superblock; one extra entry holds the total.
    supers: Vec<u64>,
    // Ones before each word, relative to its superblock.
    blocks: Vec<u16>,
    // Superblock containing every SELECT_SAMPLE-th one / zero.
    select1_hints: Vec<u32>,
    select0_hints: Vec<u32>,
}

impl std::fmt::Debug for BitVec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let bits: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        write!(f, "BitVec({bits})")
    }
}

impl Default for BitVec {
    fn default() -> Self {
        BitVec::from_words(Vec::new(), 0)
    }
}

impl FromIterator<bool> for BitVec {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut builder = BitVecBuilder::new();
        for bit in iter {
            builder.push(bit);
        }
        builder.build()
    }
}

/// Appends bits one at a time, then freezes them into a [`BitVec`].
#[derive(Debug, Default, Clone)]
pub struct BitVecBuilder {
    words: Vec<u64>,
    len: usize,
}

impl BitVecBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitVecBuilder {
            words: Vec::with_capacity(bits.div_ceil(WORD_BITS)),
            len: 0,
        }
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD_BITS) {
            self.words.push(0);
        }
        if bit {
            *self.words.last_mut().unwrap() |= 1 << (self.len % WORD_BITS);
        }
        self.len += 1;
    }

    /// Pushes `1` followed by `zeros` zero bits (a unary code).
    pub fn push_unary(&mut self, zeros: usize) {
        self.push(true);
        for _ in 0..zeros {
            self.push(false);
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn build(self) -> BitVec {
        BitVec::from_words(self.words, self.len)
    }
}

impl BitVec {
    /// Builds a bitvector from raw little-endian words. Bits past `len` are
    /// cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> BitVec {
        words.resize(len.div_ceil(WORD_BITS), 0);
        if !len.is_multiple_of(WORD_BITS) {
            let last = words.len() - 1;
            words[last] &= (1u64 << (len % WORD_BITS)) - 1;
        }

        let n_super = words.len().div_ceil(WORDS_PER_SUPER);
        let mut supers = Vec::with_capacity(n_super + 1);
        let mut blocks = Vec::with_capacity(words.len());
        let mut total = 0u64;
        for chunk in words.chunks(WORDS_PER_SUPER) {
            supers.push(total);
            let mut inner = 0u16;
            for w in chunk {
                blocks.push(inner);
                inner += w.count_ones() as u16;
            }
            total += inner as u64;
        }
        supers.push(total);

        let mut bv = BitVec {
            words,
            len,
            supers,
            blocks,
            select1_hints: Vec::new(),
            select0_hints: Vec::new(),
        };
        bv.build_select_hints();
        bv
    }

    fn build_select_hints(&mut self) {
        let n_super = self.supers.len() - 1;
        let mut hints1 = Vec::new();
        let mut hints0 = Vec::new();
        for sb in 0..n_super {
            let ones_end = self.supers[sb + 1] as usize;
            while hints1.len() * SELECT_SAMPLE < ones_end {
                hints1.push(sb as u32);
            }
            let zeros_end = self.zeros_before_super(sb + 1);
            while hints0.len() * SELECT_SAMPLE < zeros_end {
                hints0.push(sb as u32);
            }
        }
        self.select1_hints = hints1;
        self.select0_hints = hints0;
    }

    fn zeros_before_super(&self, sb: usize) -> usize {
        let bits = (sb * SUPER_BITS).min(self.len);
        bits - self.supers[sb] as usize
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn count_ones(&self) -> usize {
        *self.supers.last().unwrap() as usize
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1)
    }

    /// Bit at 1-based position `i`. Panics when out of range.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i >= 1 && i <= self.len, "bit {i} out of range 1..={}", self.len);
        let i = i - 1;
        self.words[i / WORD_BITS] >> (i % WORD_BITS) & 1 == 1
    }

    pub fn access(&self, i: usize) -> Result<bool, BitVecError> {
        if i == 0 || i > self.len {
            return Err(BitVecError::OutOfBounds { index: i, len: self.len });
        }
        Ok(self.get(i))
    }

    /// Number of ones in positions `1..=i`. Panics when `i > len`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i <= self.len, "rank position {i} beyond length {}", self.len);
        let word = i / WORD_BITS;
        if word >= self.words.len() {
            return self.count_ones();
        }
        let mut r = self.supers[word / WORDS_PER_SUPER] as usize + self.blocks[word] as usize;
        let bit = i % WORD_BITS;
        if bit > 0 {
            r += (self.words[word] & ((1u64 << bit) - 1)).count_ones() as usize;
        }
        r
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    pub fn rank(&self, i: usize, bit: bool) -> Result<usize, BitVecError> {
        if i > self.len {
            return Err(BitVecError::OutOfBounds { index: i, len: self.len });
        }
        Ok(if bit { self.rank1(i) } else { self.rank0(i) })
    }

    pub fn select(&self, k: usize, bit: bool) -> Result<usize, BitVecError> {
        let found = if bit { self.select1(k) } else { self.select0(k) };
        found.ok_or(BitVecError::NotFound { ordinal: k, symbol: bit as usize })
    }

    /// Position of the `k`-th one, or `None` if there are fewer than `k`.
    pub fn select1(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.count_ones() {
            return None;
        }
        let (lo, hi) = hint_bounds(&self.select1_hints, k, self.supers.len() - 1);
        // Last superblock in [lo, hi) whose prefix count is below k.
        let sb = partition_point(lo, hi, |sb| (self.supers[sb] as usize) < k) - 1;
        let mut remaining = k - self.supers[sb] as usize;
        let first = sb * WORDS_PER_SUPER;
        let last = (first + WORDS_PER_SUPER).min(self.words.len());
        for w in first..last {
            let ones = self.words[w].count_ones() as usize;
            if remaining <= ones {
                return Some(w * WORD_BITS + select_in_word(self.words[w], remaining) + 1);
            }
            remaining -= ones;
        }
        unreachable!("rank directory inconsistent")
    }

    /// Position of the `k`-th zero, or `None` if there are fewer than `k`.
    pub fn select0(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.count_zeros() {
            return None;
        }
        let (lo, hi) = hint_bounds(&self.select0_hints, k, self.supers.len() - 1);
        let sb = partition_point(lo, hi, |sb| self.zeros_before_super(sb) < k) - 1;
        let mut remaining = k - self.zeros_before_super(sb);
        let first = sb * WORDS_PER_SUPER;
        let last = (first + WORDS_PER_SUPER).min(self.words.len());
        for w in first..last {
            let valid = (self.len - w * WORD_BITS).min(WORD_BITS);
            let mut inv = !self.words[w];
            if valid < WORD_BITS {
                inv &= (1u64 << valid) - 1;
            }
            let zeros = inv.count_ones() as usize;
            if remaining <= zeros {
                return Some(w * WORD_BITS + select_in_word(inv, remaining) + 1);
            }
            remaining -= zeros;
        }
        unreachable!("rank directory inconsistent")
    }

    /// Approximate heap footprint in bits, directories included.
    pub fn size_in_bits(&self) -> usize {
        64 * self.words.len()
            + 64 * self.supers.len()
            + 16 * self.blocks.len()
            + 32 * (self.select0_hints.len() + self.select1_hints.len())
    }
}

/// Superblock search window `[lo, hi)` for the `k`-th occurrence.
fn hint_bounds(hints: &[u32], k: usize, n_super: usize) -> (usize, usize) {
    let slot = (k - 1) / SELECT_SAMPLE;
    let lo = hints[slot] as usize;
    let hi = hints.get(slot + 1).map_or(n_super, |&h| h as usize + 1);
    (lo, hi.max(lo + 1))
}

/// First index in `[lo, hi)` for which `pred` is false; `pred` must be
/// monotone and true at `lo`.
fn partition_point(mut lo: usize, mut hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// 0-based index of the `k`-th (1-based) set bit of `word`.
#[inline]
fn select_in_word(mut word: u64, k: usize) -> usize {
    for _ in 1..k {
        word &= word - 1;
    }
    word.trailing_zeros() as usize
}

/// Above this alphabet size [`LabelSeq`] switches to a wavelet tree.
pub const PER_SYMBOL_LIMIT: usize = 64;

/// A sequence over the compact alphabet `0..sigma` with rank, select, and
/// partial rank.
#[derive(Debug, Clone)]
pub struct LabelSeq {
    symbols: Vec<u8>,
    sigma: usize,
    backend: SeqBackend,
}

#[derive(Debug, Clone)]
enum SeqBackend {
    PerSymbol(Vec<BitVec>),
    Wavelet(WaveletTree),
}

impl PartialEq for LabelSeq {
    fn eq(&self, other: &Self) -> bool {
        self.sigma == other.sigma && self.symbols == other.symbols
    }
}

impl Eq for LabelSeq {}

impl LabelSeq {
    /// Panics if a symbol is `>= sigma` or `sigma > 256`.
    pub fn new(symbols: Vec<u8>, sigma: usize) -> LabelSeq {
        assert!(sigma <= 256, "alphabet larger than a byte");
        assert!(
            symbols.iter().all(|&s| (s as usize) < sigma),
            "symbol outside alphabet of size {sigma}"
        );
        let backend = if sigma <= PER_SYMBOL_LIMIT {
            let mut builders: Vec<BitVecBuilder> =
                (0..sigma).map(|_| BitVecBuilder::with_capacity(symbols.len())).collect();
            for &s in &symbols {
                for (c, b) in builders.iter_mut().enumerate() {
                    b.push(c == s as usize);
                }
            }
            SeqBackend::PerSymbol(builders.into_iter().map(BitVecBuilder::build).collect())
        } else {
            SeqBackend::Wavelet(WaveletTree::new(&symbols, sigma))
        };
        LabelSeq { symbols, sigma, backend }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn uses_wavelet_tree(&self) -> bool {
        matches!(self.backend, SeqBackend::Wavelet(_))
    }

    /// Occurrences of `c` in positions `1..=i`; zero for symbols outside
    /// the alphabet. Panics when `i > len`.
    #[inline]
    pub fn rank(&self, i: usize, c: usize) -> usize {
        assert!(i <= self.len(), "rank position {i} beyond length {}", self.len());
        if c >= self.sigma {
            return 0;
        }
        match &self.backend {
            SeqBackend::PerSymbol(bvs) => bvs[c].rank1(i),
            SeqBackend::Wavelet(wt) => wt.rank(i, c),
        }
    }

    pub fn checked_rank(&self, i: usize, c: usize) -> Result<usize, BitVecError> {
        if i > self.len() {
            return Err(BitVecError::OutOfBounds { index: i, len: self.len() });
        }
        Ok(self.rank(i, c))
    }

    /// `rank(i, access(i))`.
    pub fn partial_rank(&self, i: usize) -> Result<usize, BitVecError> {
        let c = self.access(i)? as usize;
        Ok(match &self.backend {
            SeqBackend::PerSymbol(bvs) => bvs[c].rank1(i),
            SeqBackend::Wavelet(wt) => wt.rank(i, c),
        })
    }

    pub fn access(&self, i: usize) -> Result<u8, BitVecError> {
        if i == 0 || i > self.len() {
            return Err(BitVecError::OutOfBounds { index: i, len: self.len() });
        }
        Ok(self.symbols[i - 1])
    }

    /// Position of the `k`-th occurrence of `c`.
    pub fn select(&self, k: usize, c: usize) -> Option<usize> {
        if c >= self.sigma {
            return None;
        }
        match &self.backend {
            SeqBackend::PerSymbol(bvs) => bvs[c].select1(k),
            SeqBackend::Wavelet(wt) => wt.select(k, c),
        }
    }

    pub fn size_in_bits(&self) -> usize {
        match &self.backend {
            SeqBackend::PerSymbol(bvs) => bvs.iter().map(BitVec::size_in_bits).sum(),
            SeqBackend::Wavelet(wt) => wt.nodes.iter().map(|n| n.bits.size_in_bits()).sum(),
        }
    }
}

/// Balanced binary wavelet tree over symbol ranges.
#[derive(Debug, Clone)]
struct WaveletTree {
    nodes: Vec<WaveletNode>,
}

#[derive(Debug, Clone)]
struct WaveletNode {
    lo: usize,
    hi: usize,
    // Set bit = symbol belongs to the upper half [mid, hi).
    bits: BitVec,
    children: Option<(usize, usize)>,
}

impl WaveletTree {
    fn new(symbols: &[u8], sigma: usize) -> WaveletTree {
        let mut tree = WaveletTree { nodes: Vec::new() };
        tree.build(symbols.to_vec(), 0, sigma.max(1));
        tree
    }

    fn build(&mut self, seq: Vec<u8>, lo: usize, hi: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(WaveletNode {
            lo,
            hi,
            bits: BitVec::default(),
            children: None,
        });
        if hi - lo <= 1 {
            return id;
        }
        let mid = lo + (hi - lo) / 2;
        let bits: BitVec = seq.iter().map(|&s| s as usize >= mid).collect();
        let (upper, lower): (Vec<u8>, Vec<u8>) = seq.into_iter().partition(|&s| s as usize >= mid);
        let left = self.build(lower, lo, mid);
        let right = self.build(upper, mid, hi);
        self.nodes[id].bits = bits;
        self.nodes[id].children = Some((left, right));
        id
    }

    fn mid(node: &WaveletNode) -> usize {
        node.lo + (node.hi - node.lo) / 2
    }

    fn rank(&self, mut i: usize, c: usize) -> usize {
        let mut id = 0;
        while let Some((left, right)) = self.nodes[id].children {
            let node = &self.nodes[id];
            if c >= Self::mid(node) {
                i = node.bits.rank1(i);
                id = right;
            } else {
                i = node.bits.rank0(i);
                id = left;
            }
        }
        i
    }

    fn select(&self, k: usize, c: usize) -> Option<usize> {
        self.select_in(0, k, c)
    }

    fn select_in(&self, id: usize, k: usize, c: usize) -> Option<usize> {
        let node = &self.nodes[id];
        match node.children {
            None => Some(k),
            Some((left, right)) => {
                let upper = c >= Self::mid(node);
                let child = if upper { right } else { left };
                let pos = self.select_in(child, k, c)?;
                if upper {
                    node.bits.select1(pos)
                } else {
                    node.bits.select0(pos)
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bv(s: &str) -> BitVec {
        s.chars().map(|c| c == '1').collect()
    }

    fn scan_rank(bits: &[bool], i: usize, b: bool) -> usize {
        bits[..i].iter().filter(|&&x| x == b).count()
    }

    fn scan_select(bits: &[bool], k: usize, b: bool) -> Option<usize> {
        bits.iter()
            .enumerate()
            .filter(|(_, &x)| x == b)
            .nth(k.checked_sub(1)?)
            .map(|(p, _)| p + 1)
    }

    fn seq(s: &str) -> LabelSeq {
        // 'a' -> 0, 'b' -> 1, ...
        LabelSeq::new(s.bytes().map(|c| c - b'a').collect(), 4)
    }

    #[test]
    fn rank_examples() {
        let v = bv("110101");
        assert_eq!(v.rank(3, true), Ok(2));
        assert_eq!(v.rank(0, true), Ok(0));
        assert_eq!(v.rank(6, false), Ok(2));
        assert_eq!(v.rank(7, true), Err(BitVecError::OutOfBounds { index: 7, len: 6 }));
    }

    #[test]
    fn select_examples() {
        let v = bv("110101");
        assert_eq!(v.select(1, false), Ok(3));
        assert_eq!(v.select(2, false), Ok(5));
        assert_eq!(bv("1").select(1, true), Ok(1));
        assert!(matches!(v.select(3, false), Err(BitVecError::NotFound { .. })));
        assert!(matches!(v.select(0, true), Err(BitVecError::NotFound { .. })));
    }

    #[test]
    fn empty_vector() {
        let v = BitVec::default();
        assert_eq!(v.rank1(0), 0);
        assert_eq!(v.select1(1), None);
        assert_eq!(v.select0(1), None);
    }

    #[test]
    fn seq_examples() {
        let s = seq("abbcca");
        assert_eq!(s.rank(4, 1), 2);
        assert_eq!(s.rank(0, 0), 0);
        assert_eq!(s.rank(6, 3), 0); // 'd' absent
        assert_eq!(s.rank(6, 200), 0);
        assert_eq!(s.partial_rank(3), Ok(2));
        assert_eq!(s.partial_rank(6), Ok(2));
        assert_eq!(seq("a").partial_rank(1), Ok(1));
        assert_eq!(s.access(4), Ok(2));
        assert_eq!(s.access(1), Ok(0));
        assert_eq!(LabelSeq::new(vec![23], 24).access(1), Ok(23));
        assert!(s.access(7).is_err());
        assert!(s.partial_rank(0).is_err());
    }

    #[test]
    fn large_random_against_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        for &(len, density) in &[(100_000usize, 0.5f64), (70_001, 0.02), (33_333, 0.97)] {
            let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
            let v: BitVec = bits.iter().copied().collect();
            let mut ones = 0;
            let mut zeros = 0;
            assert_eq!(v.rank1(0), 0);
            for (p, &b) in bits.iter().enumerate() {
                if b {
                    ones += 1;
                    assert_eq!(v.select1(ones), Some(p + 1));
                } else {
                    zeros += 1;
                    assert_eq!(v.select0(zeros), Some(p + 1));
                }
                assert_eq!(v.rank1(p + 1), ones);
            }
            assert_eq!(v.select1(ones + 1), None);
            assert_eq!(v.select0(zeros + 1), None);
        }
    }

    #[test]
    fn galois_connection_exhaustive_small() {
        // All strings up to 12 bits would be 2^13 vectors; sample every
        // length and a stride of patterns to keep runtime low.
        for len in 0..=12usize {
            let step = if len <= 8 { 1 } else { 7 };
            for pattern in (0u32..(1 << len)).step_by(step) {
                let bits: Vec<bool> = (0..len).map(|i| pattern >> i & 1 == 1).collect();
                let v: BitVec = bits.iter().copied().collect();
                for b in [false, true] {
                    let total = scan_rank(&bits, len, b);
                    for i in 0..=len {
                        let r = v.rank(i, b).unwrap();
                        assert_eq!(r, scan_rank(&bits, i, b));
                        if r > 0 {
                            assert!(v.select(r, b).unwrap() <= i);
                        }
                    }
                    for k in 1..=total {
                        let p = v.select(k, b).unwrap();
                        assert_eq!(Some(p), scan_select(&bits, k, b));
                        assert_eq!(v.rank(p, b).unwrap(), k);
                        assert_eq!(v.get(p), b);
                    }
                }
            }
        }
    }

    #[test]
    fn wavelet_and_per_symbol_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand::rngs::StdRng::seed_from_u64(11);
        for &sigma in &[1usize, 2, 5, 64, 65, 100, 256] {
            let symbols: Vec<u8> = (0..3000).map(|_| rng.gen_range(0..sigma) as u8).collect();
            let s = LabelSeq::new(symbols.clone(), sigma);
            assert_eq!(s.uses_wavelet_tree(), sigma > PER_SYMBOL_LIMIT);
            let mut counts = vec![0usize; sigma];
            for (p, &c) in symbols.iter().enumerate() {
                counts[c as usize] += 1;
                assert_eq!(s.partial_rank(p + 1), Ok(counts[c as usize]));
                assert_eq!(s.select(counts[c as usize], c as usize), Some(p + 1));
                if p % 97 == 0 {
                    for c2 in 0..sigma {
                        assert_eq!(s.rank(p + 1, c2), counts[c2]);
                    }
                }
            }
            assert_eq!((0..sigma).map(|c| s.rank(symbols.len(), c)).sum::<usize>(), symbols.len());
        }
    }

    proptest! {
        #[test]
        fn rank_select_invariants(bits in proptest::collection::vec(any::<bool>(), 0..3000)) {
            let v: BitVec = bits.iter().copied().collect();
            prop_assert_eq!(v.rank1(v.len()) + v.rank0(v.len()), v.len());
            let ones = v.count_ones();
            let mut prev = 0;
            for k in 1..=ones {
                let p = v.select1(k).unwrap();
                prop_assert!(p > prev && p <= v.len());
                prop_assert!(v.get(p));
                prev = p;
            }
        }

        #[test]
        fn partial_rank_matches_rank(symbols in proptest::collection::vec(0u8..80, 1..500), wide in any::<bool>()) {
            let sigma = if wide { 80 } else { 64 };
            let symbols: Vec<u8> = symbols.into_iter().map(|s| s % sigma as u8).collect();
            let s = LabelSeq::new(symbols, sigma);
            for i in 1..=s.len() {
                let c = s.access(i).unwrap() as usize;
                prop_assert_eq!(s.partial_rank(i).unwrap(), s.rank(i, c));
                prop_assert!(s.select(s.rank(i, c), c).unwrap() <= i);
            }
        }
    }
}
