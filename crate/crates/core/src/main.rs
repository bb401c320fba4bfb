use std::ffi::OsString;
use std::io::Write;
use std::os::unix::ffi::OsStrExt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use tunnelwg::persist::{index_to_bytes, load_index, parse_blocks, parse_graph, save_index, write_tunneled_graph};
use tunnelwg::text::{IndexConfig, TextIndex};
use tunnelwg::tunnel::tunnel_graph;
use tunnelwg::wheeler::{validate_wheeler, WheelerGraph};

#[derive(Parser)]
#[command(name = "tunnelwg", version, about = "Tunneled Wheeler graph indexes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index over the bytes of a file.
    Build {
        text: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        /// Locate sampling stride (default: ceil(log2 n)).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        sample_rate: Option<u64>,
        /// Tunnel skip and count stride (default: ceil(log2 n_t)).
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        tunnel_rate: Option<u64>,
        #[arg(long, default_value_t = 2)]
        min_width: usize,
        #[arg(long, default_value_t = 2)]
        min_length: usize,
        /// Build a plain index without tunnels.
        #[arg(long)]
        no_tunnel: bool,
        /// Store the original-to-tunneled node map.
        #[arg(long)]
        debug_map: bool,
    },
    /// Print the number of occurrences of a pattern.
    Count { index: PathBuf, pattern: OsString },
    /// Print occurrence start positions, one per line, ascending.
    Locate {
        index: PathBuf,
        pattern: OsString,
        #[arg(long)]
        limit: Option<usize>,
    },
    /// Write `len` text bytes starting at 1-based position `start`.
    Extract { index: PathBuf, start: usize, len: usize },
    /// Print index statistics.
    Stats { index: PathBuf },
    /// Operations on graph files.
    #[command(subcommand)]
    Graph(GraphCommand),
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Check the Wheeler axioms for the given node order.
    Validate { graph: PathBuf },
    /// Collapse the given blocks and write the tunneled graph.
    Tunnel {
        graph: PathBuf,
        #[arg(long)]
        blocks: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
    },
    /// Decide whether some path spells the pattern.
    Search {
        graph: PathBuf,
        pattern: OsString,
        /// Search the graph tunneled with these blocks.
        #[arg(long)]
        blocks: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Data(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Data(e.to_string())
    }
}

fn read_text(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn load_graph(path: &PathBuf) -> Result<WheelerGraph, Failure> {
    let el = parse_graph(&read_text(path)?).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    WheelerGraph::encode(&el).map_err(|v| Failure::Data(format!("{} violation: {v}", v.axiom())))
}

fn run(cli: Cli, out: &mut impl Write) -> Result<ExitCode, Failure> {
    match cli.command {
        Command::Build { text, output, sample_rate, tunnel_rate, min_width, min_length, no_tunnel, debug_map } => {
            let bytes = std::fs::read(&text).map_err(|e| Failure::Data(format!("{}: {e}", text.display())))?;
            let config = IndexConfig {
                sample_rate: sample_rate.map(|x| x as usize),
                tunnel_rate: tunnel_rate.map(|x| x as usize),
                min_width,
                min_length,
                tunneling: !no_tunnel,
                keep_node_map: debug_map,
            };
            let ix = TextIndex::build(&bytes, &config)?;
            save_index(&ix, &output)?;
            writeln!(out, "n: {}", ix.n())?;
            writeln!(out, "n_t: {}", ix.n_t())?;
            writeln!(out, "m_t: {}", ix.m_t())?;
            writeln!(out, "tunnels: {}", ix.tunneled().tunnels().len())?;
            writeln!(out, "merged_edges: {}", ix.merged_edges())?;
        }
        Command::Count { index, pattern } => {
            let ix = load_index(&index)?;
            writeln!(out, "{}", ix.count(pattern.as_bytes()))?;
        }
        Command::Locate { index, pattern, limit } => {
            if pattern.is_empty() {
                return Err(Failure::Usage("locate needs a non-empty pattern".into()));
            }
            let ix = load_index(&index)?;
            for p in ix.locate(pattern.as_bytes(), limit) {
                writeln!(out, "{p}")?;
            }
        }
        Command::Extract { index, start, len } => {
            let ix = load_index(&index)?;
            out.write_all(&ix.extract(start, len)?)?;
        }
        Command::Stats { index } => {
            let ix = load_index(&index)?;
            let bytes = index_to_bytes(&ix).len();
            writeln!(out, "n: {}", ix.n())?;
            writeln!(out, "n_t: {}", ix.n_t())?;
            writeln!(out, "m_t: {}", ix.m_t())?;
            writeln!(out, "sigma: {}", ix.tunneled().graph().sigma())?;
            writeln!(out, "tunnels: {}", ix.tunneled().tunnels().len())?;
            writeln!(out, "merged_edges: {}", ix.merged_edges())?;
            writeln!(out, "sample_rate: {}", ix.sample_rate())?;
            writeln!(out, "tunnel_rate: {}", ix.tunnel_rate())?;
            writeln!(out, "file_bytes: {bytes}")?;
            writeln!(out, "bits_per_symbol: {:.3}", (bytes * 8) as f64 / ix.text_len().max(1) as f64)?;
        }
        Command::Graph(GraphCommand::Validate { graph }) => {
            let el = parse_graph(&read_text(&graph)?).map_err(|e| Failure::Data(format!("{}: {e}", graph.display())))?;
            match validate_wheeler(&el) {
                Ok(()) => writeln!(out, "OK")?,
                Err(v) => {
                    writeln!(out, "VIOLATION {}: {v}", v.axiom())?;
                    return Ok(ExitCode::from(1));
                }
            }
        }
        Command::Graph(GraphCommand::Tunnel { graph, blocks, output }) => {
            let g = load_graph(&graph)?;
            let blocks = parse_blocks(&read_text(&blocks)?)?;
            let tg = tunnel_graph(&g, &blocks)?;
            std::fs::write(&output, write_tunneled_graph(&tg))?;
            writeln!(out, "n: {} -> {}", g.n(), tg.graph().n())?;
            writeln!(out, "m: {} -> {}", g.m(), tg.graph().m())?;
        }
        Command::Graph(GraphCommand::Search { graph, pattern, blocks }) => {
            let g = load_graph(&graph)?;
            let range = match blocks {
                Some(path) => tunnel_graph(&g, &parse_blocks(&read_text(&path)?)?)?.path_search(pattern.as_bytes()),
                None => g.path_search(pattern.as_bytes()),
            };
            if range.is_empty() {
                writeln!(out, "NOT FOUND")?;
                return Ok(ExitCode::from(1));
            }
            writeln!(out, "FOUND {range}")?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let code = match run(cli, &mut out) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    };
    let _ = out.flush();
    code
}
