//! File formats and the command line for `heartwood-core`.

pub mod cli;
pub mod format;

pub use format::{parse_system, serialize_system, FormatError};
