use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::tunnel::{Block, TunneledGraph};
use crate::wheeler::{Edge, EdgeList};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(input: &str) -> impl Iterator<Item = (usize, &str)> {
    input
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_num(line: usize, field: &str, what: &str) -> Result<usize, ParseError> {
    field.parse().map_err(|_| err(line, format!("{what} {field:?} is not a non-negative integer")))
}

/// A label: one printable ASCII character or `\xNN`.
pub fn parse_label(field: &str) -> Option<u8> {
    match field.as_bytes() {
        [c] if c.is_ascii_graphic() && *c != b'\\' => Some(*c),
        [b'\\', b'x', hi, lo] => u8::from_str_radix(std::str::from_utf8(&[*hi, *lo]).ok()?, 16).ok(),
        _ => None,
    }
}

pub fn format_label(c: u8) -> String {
    if c.is_ascii_graphic() && c != b'\\' && c != b'#' {
        (c as char).to_string()
    } else {
        format!("\\x{c:02x}")
    }
}

/// Parses the graph text format:
///
/// ```text
/// WG <n> <m> <sigma>
/// <source> <target> <label>    (m times)
/// ```
///
/// Lines starting with `#` are comments. Ranks must lie in `1..=n`.
pub fn parse_graph(input: &str) -> Result<EdgeList, ParseError> {
    let mut lines = content_lines(input);
    let (hline, header) = lines.next().ok_or_else(|| err(1, "missing \"WG <n> <m> <sigma>\" header"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "WG" {
        return Err(err(hline, "expected \"WG <n> <m> <sigma>\""));
    }
    let n = parse_num(hline, fields[1], "node count")?;
    let m = parse_num(hline, fields[2], "edge count")?;
    let sigma = parse_num(hline, fields[3], "alphabet size")?;
    let mut edges = Vec::with_capacity(m);
    let mut last_line = hline;
    for (line, text) in lines {
        last_line = line;
        let f: Vec<&str> = text.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(line, "expected \"<source> <target> <label>\""));
        }
        let source = parse_num(line, f[0], "source")?;
        let target = parse_num(line, f[1], "target")?;
        for v in [source, target] {
            if v == 0 || v > n {
                return Err(err(line, format!("rank {v} outside 1..={n}")));
            }
        }
        let label = parse_label(f[2]).ok_or_else(|| err(line, format!("bad label {:?}", f[2])))?;
        edges.push(Edge::new(source, target, label));
    }
    if edges.len() != m {
        return Err(err(last_line, format!("header promises {m} edges, found {}", edges.len())));
    }
    let labels: BTreeSet<u8> = edges.iter().map(|e| e.label).collect();
    if labels.len() != sigma {
        return Err(err(hline, format!("header promises {sigma} labels, found {}", labels.len())));
    }
    Ok(EdgeList::new(n, edges))
}

pub fn write_graph(el: &EdgeList) -> String {
    let sigma = el.alphabet().sigma();
    let mut out = format!("WG {} {} {}\n", el.n, el.edges.len(), sigma);
    for e in &el.edges {
        let _ = writeln!(out, "{} {} {}", e.source, e.target, format_label(e.label));
    }
    out
}

/// The tunneled graph as a graph file, with node marks and tunnels as
/// comments.
pub fn write_tunneled_graph(tg: &TunneledGraph) -> String {
    let mut out = String::new();
    let g = tg.graph();
    let marks = |pred: &dyn Fn(usize) -> bool| {
        (1..=g.n()).filter(|&v| pred(v)).map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
    };
    let _ = writeln!(out, "# entrances: {}", marks(&|v| tg.is_entrance(v)));
    let _ = writeln!(out, "# inner: {}", marks(&|v| tg.is_inner(v)));
    for t in tg.tunnels() {
        let _ = writeln!(
            out,
            "# tunnel entrance={} exit={} width={} length={}",
            t.entrance, t.exit, t.width, t.length
        );
    }
    out.push_str(&write_graph(&g.decode()));
    out
}

/// Parses blocks: `BLOCK <w> <s>` followed by `s` lines of `w` ranks, one
/// column per line.
pub fn parse_blocks(input: &str) -> Result<Vec<Block>, ParseError> {
    let mut lines = content_lines(input);
    let mut blocks = Vec::new();
    while let Some((line, text)) = lines.next() {
        let f: Vec<&str> = text.split_whitespace().collect();
        if f.len() != 3 || f[0] != "BLOCK" {
            return Err(err(line, "expected \"BLOCK <w> <s>\""));
        }
        let w = parse_num(line, f[1], "width")?;
        let s = parse_num(line, f[2], "size")?;
        if w == 0 || s == 0 {
            return Err(err(line, "width and size must be positive"));
        }
        let mut columns = Vec::with_capacity(s);
        for _ in 0..s {
            let (cl, ctext) = lines.next().ok_or_else(|| err(line, "block ends early"))?;
            let col = ctext
                .split_whitespace()
                .map(|x| parse_num(cl, x, "rank"))
                .collect::<Result<Vec<_>, _>>()?;
            if col.len() != w {
                return Err(err(cl, format!("expected {w} ranks, found {}", col.len())));
            }
            columns.push(col);
        }
        blocks.push(Block::new(columns).map_err(|e| err(line, e.to_string()))?);
    }
    Ok(blocks)
}

pub fn write_blocks(blocks: &[Block]) -> String {
    blocks.iter().map(Block::to_string).collect()
}
