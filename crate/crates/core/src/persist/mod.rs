//! Text formats for graphs and blocks, and the binary index file.

mod formats;
mod index_file;

pub use formats::{
    format_label, parse_blocks, parse_graph, parse_label, write_blocks, write_graph, write_tunneled_graph, ParseError,
};
pub use index_file::{index_from_bytes, index_to_bytes, load_index, save_index, PersistError, MAGIC, VERSION};
