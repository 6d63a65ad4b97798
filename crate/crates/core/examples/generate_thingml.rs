//! Generates ThingML for a model and checks every unit against the
//! supported subset. With an output directory the units are written to
//! `<out>/<system>/`; otherwise they are printed.
//!
//! ```text
//! cargo run --example generate_thingml -- fixtures/safety.ciot [out]
//! ```

use std::path::Path;

use iotforge::dsl::{parse_model, SourceFile};
use iotforge::thingml::{check, generate, output_dir, write_units, ConstructKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| "fixtures/safety.ciot".into());
    let source = SourceFile::new(path.clone(), std::fs::read_to_string(&path)?);
    let model = parse_model(&source).map_err(|d| format!("{path}: {} parse errors", d.len()))?;
    let units = generate(&model)?;

    for unit in &units {
        let outline = check(&unit.text).map_err(|e| format!("{}:{e}", unit.file_name))?;
        let states: usize = outline.things.iter().filter_map(|t| t.statechart.as_ref()).map(|s| s.states.len()).sum();
        println!(
            "{:<24} things={} messages={} states={} traced={}",
            unit.file_name,
            outline.things.len(),
            outline.fragments.iter().map(|f| f.messages.len()).sum::<usize>(),
            states,
            unit.provenance_of(ConstructKind::State).count(),
        );
    }

    match args.next() {
        Some(out) => {
            let dir = output_dir(Path::new(&out), &model);
            for file in write_units(&dir, &units)? {
                println!("wrote {}", file.display());
            }
        }
        None => {
            for unit in &units {
                println!("\n==> {} <==\n{}", unit.file_name, unit.text);
            }
        }
    }
    Ok(())
}
