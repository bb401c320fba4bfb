use std::io;
use std::path::Path;

use thiserror::Error;

use crate::bitvec::{BitVec, LabelSeq};
use crate::text::{CountSamples, LocateSamples, SkipPointers, TextIndex};
use crate::tunnel::{TraversalPos, Tunnel, TunneledGraph};
use crate::wheeler::{Alphabet, WheelerGraph};

pub const MAGIC: &[u8; 4] = b"TWGI";
pub const VERSION: u16 = 1;
const FLAG_TUNNELED: u16 = 1;
const FLAG_NODE_MAP: u16 = 2;
const HEADER: usize = 8;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("file is truncated ({0} bytes)")]
    Truncated(usize),
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported format version {found} (this build reads {supported})")]
    Version { found: u16, supported: u16 },
    #[error("malformed index: {0}")]
    Format(String),
}

fn bad(msg: impl Into<String>) -> PersistError {
    PersistError::Format(msg.into())
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u64(&mut self, x: usize) {
        self.buf.extend_from_slice(&(x as u64).to_le_bytes());
    }

    fn bytes(&mut self, b: &[u8]) {
        self.u64(b.len());
        self.buf.extend_from_slice(b);
    }

    fn bits(&mut self, b: &BitVec) {
        self.u64(b.len());
        for w in b.words() {
            self.buf.extend_from_slice(&w.to_le_bytes());
        }
    }

    fn list(&mut self, xs: &[usize]) {
        self.u64(xs.len());
        for &x in xs {
            self.u64(x);
        }
    }

    // A section is its payload prefixed by the payload length.
    fn section(&mut self, f: impl FnOnce(&mut Writer)) {
        let mut inner = Writer::default();
        f(&mut inner);
        self.bytes(&inner.buf);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, k: usize) -> Result<&'a [u8], PersistError> {
        if self.buf.len() - self.at < k {
            return Err(bad("section runs past its end"));
        }
        let out = &self.buf[self.at..self.at + k];
        self.at += k;
        Ok(out)
    }

    fn u64(&mut self) -> Result<usize, PersistError> {
        let b = self.take(8)?;
        usize::try_from(u64::from_le_bytes(b.try_into().unwrap())).map_err(|_| bad("value exceeds address space"))
    }

    fn bytes(&mut self) -> Result<&'a [u8], PersistError> {
        let k = self.u64()?;
        self.take(k)
    }

    fn bits(&mut self) -> Result<BitVec, PersistError> {
        let len = self.u64()?;
        let nwords = len.div_ceil(64);
        if nwords > (self.buf.len() - self.at) / 8 {
            return Err(bad("bitvector runs past its section"));
        }
        let words = (0..nwords).map(|_| self.u64().map(|w| w as u64)).collect::<Result<Vec<_>, _>>()?;
        Ok(BitVec::from_words(words, len))
    }

    fn list(&mut self) -> Result<Vec<usize>, PersistError> {
        let k = self.u64()?;
        if k > (self.buf.len() - self.at) / 8 {
            return Err(bad("list runs past its section"));
        }
        (0..k).map(|_| self.u64()).collect()
    }

    fn section(&mut self) -> Result<Reader<'a>, PersistError> {
        Ok(Reader { buf: self.bytes()?, at: 0 })
    }

    fn done(&self) -> Result<(), PersistError> {
        if self.at != self.buf.len() {
            return Err(bad("trailing bytes in section"));
        }
        Ok(())
    }
}

fn symbol_width(sigma: usize) -> usize {
    (usize::BITS - sigma.saturating_sub(1).leading_zeros()) as usize
}

fn pack_symbols(symbols: &[u8], width: usize) -> BitVec {
    symbols.iter().flat_map(|&s| (0..width).map(move |b| s >> b & 1 == 1)).collect()
}

fn unpack_symbols(bits: &BitVec, m: usize, width: usize) -> Result<Vec<u8>, PersistError> {
    if bits.len() != m * width {
        return Err(bad("label section has the wrong length"));
    }
    Ok((0..m)
        .map(|i| (0..width).fold(0u8, |acc, b| acc | (bits.get(i * width + b + 1) as u8) << b))
        .collect())
}

/// Serializes an index into the binary index format.
pub fn index_to_bytes(ix: &TextIndex) -> Vec<u8> {
    let tg = ix.tunneled();
    let g = tg.graph();
    let mut flags = 0;
    if !tg.tunnels().is_empty() {
        flags |= FLAG_TUNNELED;
    }
    if tg.node_map().is_some() {
        flags |= FLAG_NODE_MAP;
    }
    let mut w = Writer::default();
    w.buf.extend_from_slice(MAGIC);
    w.buf.extend_from_slice(&VERSION.to_le_bytes());
    w.buf.extend_from_slice(&flags.to_le_bytes());

    w.section(|s| s.bytes(g.alphabet().symbols()));
    w.section(|s| {
        let width = symbol_width(g.sigma());
        s.u64(g.m());
        s.u64(width);
        s.bits(&pack_symbols(g.labels().symbols(), width));
    });
    w.section(|s| {
        s.bits(g.in_bits());
        s.bits(g.out_bits());
    });
    w.section(|s| {
        s.bits(tg.i_prime());
        s.bits(tg.o_prime());
    });
    w.section(|s| {
        s.bits(tg.entrance_marks());
        s.bits(tg.inner_marks());
    });
    w.section(|s| {
        s.u64(tg.tunnels().len());
        for t in tg.tunnels() {
            for x in [t.entrance, t.exit, t.width, t.length, t.sourceless_roots] {
                s.u64(x);
            }
        }
        let (groups, delims, masks) = tg.exit_groups();
        s.bits(groups);
        s.bits(delims);
        s.bits(masks);
    });
    w.section(|s| {
        s.u64(ix.sample_rate());
        s.u64(ix.tunnel_rate());
        let sk = ix.skip_pointers();
        s.bits(&sk.marks);
        s.list(&sk.exit);
        s.list(&sk.distance);
        s.list(&sk.back_start);
        s.list(&sk.back_nodes);
        let loc = ix.locate_samples();
        s.bits(&loc.marks);
        s.list(&loc.positions);
        s.list(&ix.count_samples().sums);
    });
    if let Some(map) = tg.node_map() {
        w.section(|s| {
            s.u64(map.len());
            for p in map {
                s.u64(p.node);
                s.u64(p.offset);
            }
        });
    }
    let crc = crc32fast::hash(&w.buf);
    w.buf.extend_from_slice(&crc.to_le_bytes());
    w.buf
}

/// Parses and validates an index. Checks run in order: length, checksum,
/// magic, version, then structure.
pub fn index_from_bytes(bytes: &[u8]) -> Result<TextIndex, PersistError> {
    if bytes.len() < HEADER + 4 {
        return Err(PersistError::Truncated(bytes.len()));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(PersistError::Checksum { stored, computed });
    }
    if &body[..4] != MAGIC {
        return Err(PersistError::BadMagic);
    }
    let version = u16::from_le_bytes([body[4], body[5]]);
    if version != VERSION {
        return Err(PersistError::Version { found: version, supported: VERSION });
    }
    let flags = u16::from_le_bytes([body[6], body[7]]);
    if flags & !(FLAG_TUNNELED | FLAG_NODE_MAP) != 0 {
        return Err(bad("unknown flags"));
    }
    let mut r = Reader { buf: &body[HEADER..], at: 0 };

    let mut s = r.section()?;
    let symbols = s.bytes()?.to_vec();
    s.done()?;
    if symbols.windows(2).any(|p| p[0] >= p[1]) {
        return Err(bad("alphabet is not strictly increasing"));
    }
    let alphabet = Alphabet::from_sorted(symbols);
    let sigma = alphabet.sigma();

    let mut s = r.section()?;
    let m = s.u64()?;
    let width = s.u64()?;
    if width != symbol_width(sigma) {
        return Err(bad("label width does not match the alphabet"));
    }
    let symbols = unpack_symbols(&s.bits()?, m, width)?;
    s.done()?;
    if symbols.iter().any(|&c| c as usize >= sigma) {
        return Err(bad("label outside the alphabet"));
    }
    let labels = LabelSeq::new(symbols, sigma);

    let mut s = r.section()?;
    let (in_bits, out_bits) = (s.bits()?, s.bits()?);
    s.done()?;
    let g = WheelerGraph::from_parts(alphabet, labels, in_bits, out_bits).map_err(bad)?;

    let mut s = r.section()?;
    let (i_prime, o_prime) = (s.bits()?, s.bits()?);
    s.done()?;
    let mut s = r.section()?;
    let (entrances, inner) = (s.bits()?, s.bits()?);
    s.done()?;

    let mut s = r.section()?;
    let count = s.u64()?;
    if count > g.n() {
        return Err(bad("more tunnels than nodes"));
    }
    let mut tunnels = Vec::with_capacity(count);
    for _ in 0..count {
        let mut f = [0usize; 5];
        for x in f.iter_mut() {
            *x = s.u64()?;
        }
        if f[1] == 0 || f[1] > g.n() {
            return Err(bad("tunnel exit out of range"));
        }
        tunnels.push(Tunnel { entrance: f[0], exit: f[1], width: f[2], length: f[3], sourceless_roots: f[4] });
    }
    let (groups, delims, masks) = (s.bits()?, s.bits()?, s.bits()?);
    s.done()?;
    if ((flags & FLAG_TUNNELED) != 0) != !tunnels.is_empty() {
        return Err(bad("tunnel flag disagrees with tunnel records"));
    }

    let mut s = r.section()?;
    let (rate_n, rate_t) = (s.u64()?, s.u64()?);
    let skip = SkipPointers {
        marks: s.bits()?,
        exit: s.list()?,
        distance: s.list()?,
        back_start: s.list()?,
        back_nodes: s.list()?,
    };
    let loc = LocateSamples { marks: s.bits()?, positions: s.list()? };
    let cnt = CountSamples { sums: s.list()? };
    s.done()?;

    let node_map = if flags & FLAG_NODE_MAP != 0 {
        let mut s = r.section()?;
        let k = s.u64()?;
        let mut map = Vec::with_capacity(k.min(body.len()));
        for _ in 0..k {
            map.push(TraversalPos::new(s.u64()?, s.u64()?));
        }
        s.done()?;
        Some(map)
    } else {
        None
    };
    r.done()?;

    let tg = TunneledGraph::from_parts(g, i_prime, o_prime, entrances, inner, tunnels, groups, delims, masks, node_map)
        .map_err(bad)?;
    check_samples(&tg, rate_n, rate_t, &skip, &loc, &cnt)?;
    Ok(TextIndex::from_parts(tg, rate_n, rate_t, skip, loc, cnt))
}

fn check_samples(
    tg: &TunneledGraph,
    rate_n: usize,
    rate_t: usize,
    skip: &SkipPointers,
    loc: &LocateSamples,
    cnt: &CountSamples,
) -> Result<(), PersistError> {
    let n_t = tg.graph().n();
    let n = tg.original_n();
    if rate_n == 0 || rate_t == 0 {
        return Err(bad("sample rates must be positive"));
    }
    let in_nodes = |xs: &[usize]| xs.iter().all(|&x| x >= 1 && x <= n_t);
    if skip.marks.len() != n_t
        || skip.exit.len() != skip.marks.count_ones()
        || skip.distance.len() != skip.exit.len()
        || !in_nodes(&skip.exit)
        || !in_nodes(&skip.back_nodes)
        || skip.back_start.len() != tg.tunnels().len() + 1
        || skip.back_start.first() != Some(&0)
        || skip.back_start.windows(2).any(|w| w[0] > w[1])
        || skip.back_start.last() != Some(&skip.back_nodes.len())
    {
        return Err(bad("skip pointers inconsistent"));
    }
    if loc.marks.len() != n_t
        || loc.positions.len() != loc.marks.count_ones()
        || loc.positions.iter().any(|&p| p == 0 || p > n)
    {
        return Err(bad("locate samples inconsistent"));
    }
    if cnt.sums.len() != n_t / rate_t + 1 || cnt.sums.windows(2).any(|w| w[0] > w[1]) {
        return Err(bad("count samples inconsistent"));
    }
    if let Some(map) = tg.node_map() {
        if map.len() != n || map.iter().any(|p| p.node == 0 || p.node > n_t || p.offset == 0) {
            return Err(bad("node map inconsistent"));
        }
    }
    Ok(())
}

pub fn save_index(ix: &TextIndex, path: impl AsRef<Path>) -> Result<(), PersistError> {
    std::fs::write(path, index_to_bytes(ix))?;
    Ok(())
}

pub fn load_index(path: impl AsRef<Path>) -> Result<TextIndex, PersistError> {
    index_from_bytes(&std::fs::read(path)?)
}
