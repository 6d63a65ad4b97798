//! Runs response-time analysis on a model's allocation and prints the
//! per-core report.
//!
//! ```text
//! cargo run --example schedulability -- fixtures/safety.ciot [--json]
//! ```

use iotforge::dsl::{parse_model, SourceFile};
use iotforge::sched::analyze;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let json = args.iter().any(|a| a == "--json");
    let path = args.iter().find(|a| !a.starts_with("--")).cloned().unwrap_or_else(|| "fixtures/safety.ciot".into());
    let source = SourceFile::new(path.clone(), std::fs::read_to_string(&path)?);
    let model = parse_model(&source).map_err(|d| format!("{path}: {} parse errors", d.len()))?;
    let report = analyze(&model)?;
    if json {
        print!("{}", report.to_json());
    } else {
        print!("{}", report.to_text());
    }
    Ok(())
}
