//! Parses model files and prints their diagnostics.
//!
//! ```text
//! cargo run --example parse_and_validate -- fixtures/safety.ciot fixtures/bad_state.ciot
//! ```

use std::path::PathBuf;

use iotforge::diag::Diagnostic;
use iotforge::dsl::{parse_model, SourceFile};
use iotforge::validate::validate;

fn main() {
    let paths: Vec<PathBuf> = std::env::args().skip(1).map(PathBuf::from).collect();
    if paths.is_empty() {
        eprintln!("usage: parse_and_validate <model.ciot>...");
        std::process::exit(2);
    }
    for path in paths {
        let text = match std::fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("{}: {e}", path.display());
                continue;
            }
        };
        let source = SourceFile::new(path.display().to_string(), text);
        let diags: Vec<Diagnostic> = match parse_model(&source) {
            Ok(model) => validate(&model),
            Err(diags) => diags,
        };
        if diags.is_empty() {
            println!("{}: ok", path.display());
        }
        for d in diags {
            println!("{}:{d}", path.display());
        }
    }
}
