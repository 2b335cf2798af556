//! Write a Graphviz file for every stage of the running example.
//!
//! cargo run --example export_dot -- OUT_DIR && dot -Tsvg OUT_DIR/em.dot > em.svg

use opacity_edit::pipeline::write_stage_dots;
use opacity_edit::{parse_model, run_pipeline, Op, PipelineConfig};

fn main() -> std::io::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "dot-out".into());
    let model = parse_model(include_str!("../fixtures/six_state.aut")).unwrap();
    let run = run_pipeline(&model, &PipelineConfig::new(&[Op::Substitute], 0).unwrap()).unwrap();
    write_stage_dots(&model, &run, dir.as_ref())?;
    for e in std::fs::read_dir(&dir)? {
        println!("{}", e?.path().display());
    }
    Ok(())
}
