//! Flattens a model into its instance tree and prints each instance with
//! its component, the core it runs on and the connections it owns.
//!
//! ```text
//! cargo run --example instance_model -- fixtures/safety.ciot
//! ```

use iotforge::dsl::{parse_model, SourceFile};
use iotforge::instance::build_instance_model;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixtures/safety.ciot".into());
    let source = SourceFile::new(path.clone(), std::fs::read_to_string(&path)?);
    let model = parse_model(&source).map_err(|d| format!("{path}: {} parse errors", d.len()))?;
    let tree = build_instance_model(&model)?;
    for inst in &tree.instances {
        let depth = inst.path.matches('.').count();
        let core = tree.core_of(&inst.path).map(|c| format!(" @ {c}")).unwrap_or_default();
        println!("{:indent$}{} : {}{core}", "", inst.name, inst.component, indent = depth * 2);
    }
    println!();
    for c in &tree.connections {
        println!("{} -> {}  (in {})", c.from, c.to, c.owner);
    }
    Ok(())
}
