//! The `.ciot` textual model format.

pub mod lexer;
mod parser;
mod printer;

pub use parser::{parse_model, parse_str, SourceFile};
pub use printer::serialize_model;
