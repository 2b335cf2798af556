//! Replay a plant trace through the identity editor and a synthesized one.
//!
//! cargo run --example simulate [-- TRACE]

use opacity_edit::harness::steps_to_tsv;
use opacity_edit::{parse_model, run_pipeline, simulate, IdentityEditor, Op, PipelineConfig};

fn main() {
    let model = parse_model(include_str!("../fixtures/six_state.aut")).unwrap();
    let g = &model.automaton;
    let trace = g.parse_trace(&std::env::args().nth(1).unwrap_or_else(|| "abc".into())).unwrap();
    let run = run_pipeline(&model, &PipelineConfig::new(&[Op::Substitute], 0).unwrap()).unwrap();
    let fe = run.synthesis.unwrap().transducer;

    println!("without an editor:");
    let steps = simulate(g, &model.profile, &run.observers, &IdentityEditor, &trace).unwrap();
    print!("{}", steps_to_tsv(g, &steps));
    println!("\nwith the synthesized editor:");
    let steps = simulate(g, &model.profile, &run.observers, &fe, &trace).unwrap();
    print!("{}", steps_to_tsv(g, &steps));
}
