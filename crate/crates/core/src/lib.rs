//! Compressed self-indexes over Wheeler graphs and strings, with tunneling.
//!
//! * [`bitvec`]: rank/select bitvectors and label sequences.
//! * [`wheeler`]: the succinct Wheeler graph, its validator, and path search.
//! * [`tunnel`]: blocks, the tunneling transform, and search on tunneled graphs.
//! * [`text`]: the string self-index (count, locate, extract).
//! * [`persist`]: graph/block text formats and the binary index file.

pub mod bitvec;
pub mod persist;
pub mod text;
pub mod tunnel;
pub mod wheeler;
