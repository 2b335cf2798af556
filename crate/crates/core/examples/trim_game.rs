//! Trim the edit game with both fixpoint implementations and show what was
//! removed.

use opacity_edit::dot::{augmented_label, info_label};
use opacity_edit::{build_edit_game, parse_model, trim_game, trim_game_naive, ActionSpace, Observers};

fn main() {
    let model = parse_model(include_str!("../fixtures/six_state.aut")).unwrap();
    let g = &model.automaton;
    let obs = Observers::build(g, &model.profile);
    let game = build_edit_game(g, &model.profile, &obs, &ActionSpace::substitution_only());

    let t = trim_game(&game).expect("the running example is enforceable");
    let naive = trim_game_naive(&game).unwrap();
    assert_eq!(t.game(), naive.game());

    let s = t.stats();
    println!("pruned {} + {} states in {} rounds", s.pruned_a, s.pruned_f, s.rounds);
    for d in t.disabled() {
        let at = t.game().augmented(d.at);
        println!(
            "disabled {} at {} (would reach {})",
            d.action.label(at.pending, g),
            augmented_label(g, &obs, at),
            info_label(g, &obs, &d.target)
        );
    }

    let hopeless = parse_model(include_str!("../fixtures/unenforceable.aut")).unwrap();
    let obs = Observers::build(&hopeless.automaton, &hopeless.profile);
    let game = build_edit_game(&hopeless.automaton, &hopeless.profile, &obs, &ActionSpace::full(1));
    println!("unenforceable fixture trims to nothing: {}", trim_game(&game).is_none());
}
