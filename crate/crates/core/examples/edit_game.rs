//! Build the edit game for the running example and list the states the
//! utility function marks as losing.

use opacity_edit::dot::{augmented_label, info_label};
use opacity_edit::{build_edit_game, parse_model, ActionSpace, Observers};

fn main() {
    let model = parse_model(include_str!("../fixtures/six_state.aut")).unwrap();
    let g = &model.automaton;
    let obs = Observers::build(g, &model.profile);
    for (name, space) in [("substitution only", ActionSpace::substitution_only()), ("full, K=1", ActionSpace::full(1))] {
        let game = build_edit_game(g, &model.profile, &obs, &space);
        println!(
            "{name}: {} information states, {} augmented states, {} edges",
            game.num_a(),
            game.num_f(),
            game.num_sys_edges() + game.num_def_edges()
        );
        for a in game.a_ids().filter(|&a| game.utility_a(a) == 0) {
            println!("  leaks   {}", info_label(g, &obs, game.info(a)));
        }
        for f in game.f_ids().filter(|&f| game.utility_f(f) == 0) {
            println!("  stuck   {}", augmented_label(g, &obs, game.augmented(f)));
        }
    }
}
