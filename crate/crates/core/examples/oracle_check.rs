//! Check editors against the four editor properties, both with the exact
//! oracle and with the bounded whole-string checks.

use opacity_edit::opacity::{default_depth, Causal};
use opacity_edit::{ic_enforcing, oracle_ic_enforcing, parse_model, run_pipeline, IdentityEditor, PipelineConfig};

fn main() {
    let model = parse_model(include_str!("../fixtures/six_state.aut")).unwrap();
    let (g, p) = (&model.automaton, &model.profile);
    let cfg = PipelineConfig::default();
    let run = run_pipeline(&model, &cfg).unwrap();
    let obs = &run.observers;
    let fe = run.synthesis.unwrap().transducer;
    let depth = default_depth(g, obs, cfg.space.max_insert);

    println!("synthesized: oracle passes: {}", oracle_ic_enforcing(g, p, obs, &fe, None).is_ok());
    println!("synthesized: literal checks to depth {depth}: {}", ic_enforcing(g, p, &Causal(&fe), depth));

    match oracle_ic_enforcing(g, p, obs, &IdentityEditor, None) {
        Ok(()) => println!("identity passes"),
        Err(c) => println!("identity: {}", c.to_json_line(g, p, None)),
    }
}
