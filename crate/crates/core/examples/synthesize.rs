//! Run the whole pipeline and print a transducer for each selection policy.

use opacity_edit::{parse_model, run_pipeline, Op, PipelineConfig, Policy};

fn main() {
    let model = parse_model(include_str!("../fixtures/six_state.aut")).unwrap();
    for policy in [Policy::PassthroughFirst, Policy::EditFirst, Policy::Last, Policy::Seeded(3)] {
        let mut cfg = PipelineConfig::new(&[Op::Substitute, Op::Delete, Op::Insert], 1).unwrap();
        cfg.policy = policy;
        let run = run_pipeline(&model, &cfg).unwrap();
        let s = run.synthesis.expect("enforceable");
        println!("{}", s.transducer.to_text(&model.automaton));
    }
}
