//! Merge the trimmed game over the defender's observations, then refine it
//! so every kept action is available in every merged member.

use opacity_edit::dot::info_label;
use opacity_edit::{build_edit_game, build_uem, parse_model, refine_to_em, trim_game, ActionSpace, Observers};

fn main() {
    let model = parse_model(include_str!("../fixtures/six_state.aut")).unwrap();
    let g = &model.automaton;
    let obs = Observers::build(g, &model.profile);
    let game = build_edit_game(g, &model.profile, &obs, &ActionSpace::substitution_only());
    let t = trim_game(&game).unwrap();
    let uem = build_uem(t.game(), model.profile.defender());
    let em = refine_to_em(&uem).expect("nonempty");

    println!("merged: {} + {} states; refined: {} + {} states", uem.num_ua(), uem.num_uf(), em.num_ua(), em.num_uf());
    for q in em.ua_ids() {
        let members: Vec<String> = em.ua_members(q).iter().map(|a| info_label(g, &obs, t.game().info(*a))).collect();
        println!("q{} = {{{}}}", q.index(), members.join(", "));
        for (gamma, u) in em.moves_in(q) {
            let acts: Vec<String> = em.moves_out(*u).iter().map(|m| m.action.label(*gamma, g)).collect();
            println!("    on {}: {}", g.event_name(*gamma), acts.join(" | "));
        }
    }
}
