//! Blocks of isomorphic subtrees, their discovery, and the tunneling
//! transform that collapses them while keeping the graph searchable.

mod block;
mod find;
mod graph;

pub use block::{check_block, check_string_block, Block, BlockViolation, StringBlock};
pub use find::{enumerate_blocks_bruteforce, find_string_blocks, TooLarge};
pub use graph::{tunnel_graph, TraversalPos, Tunnel, TunnelError, TunneledGraph, TunneledRange, LAST};

#[cfg(test)]
mod tests;
