//! Build the three powerset observers and walk them along a trace.

use opacity_edit::{parse_model, project, Observers};

fn main() {
    let model = parse_model(include_str!("../fixtures/six_state.aut")).unwrap();
    let g = &model.automaton;
    let p = &model.profile;
    let obs = Observers::build(g, p);
    for (name, o) in [("system", &obs.system), ("intruder", &obs.intruder), ("defender", &obs.defender)] {
        println!("{name:<9} {} estimates, starts at {}", o.len(), g.format_set(o.state(o.initial())));
    }

    let trace = g.parse_trace("abc").unwrap();
    println!("\nprefix  intruder  defender");
    for i in 0..=trace.len() {
        let word = project(&trace[..i], p.observable());
        let est = |o: &opacity_edit::ObserverAutomaton| {
            o.run(&word).map_or("-".to_string(), |id| g.format_set(o.state(id)))
        };
        println!("{:<7} {:<9} {}", g.format_trace(&trace[..i]), est(&obs.intruder), est(&obs.defender));
    }
}
