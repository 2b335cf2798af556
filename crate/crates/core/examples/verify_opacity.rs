//! Check current-state opacity of a plant.
//!
//! cargo run --example verify_opacity [-- path/to/plant.aut]

use opacity_edit::{parse_model, project, verify_cso};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/six_state.aut").into());
    let model = parse_model(&std::fs::read_to_string(&path)?)?;
    let g = &model.automaton;
    let verdict = verify_cso(g, &model.profile);
    match verdict.witness {
        None => println!("{path}: opaque"),
        Some(w) => println!(
            "{path}: not opaque; after {} the intruder, seeing {}, knows the state is secret",
            g.format_trace(&w),
            g.format_trace(&project(&w, model.profile.intruder()))
        ),
    }
    Ok(())
}
