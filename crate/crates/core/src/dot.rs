//! Graphviz renderings of every pipeline stage. Output is deterministic:
//! nodes and edges follow the structures' own id order.

use std::fmt::Write as _;

use crate::automaton::FiniteAutomaton;
use crate::game::{AugmentedState, EditGameStructure, InfoState};
use crate::mechanism::{EditMechanism, MealyEditFunction};
use crate::observer::{ObserverAutomaton, Observers};
use crate::trim::TrimmedGameStructure;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// `({1},{1,4},{1,3})`
pub fn info_label(aut: &FiniteAutomaton, obs: &Observers, v: &InfoState) -> String {
    format!(
        "({},{},{})",
        aut.format_set(obs.system.state(v.sys)),
        aut.format_set(obs.intruder.state(v.intr)),
        aut.format_set(obs.defender.state(v.def))
    )
}

/// `[({5},{3,6},{1,3}),b]`
pub fn augmented_label(aut: &FiniteAutomaton, obs: &Observers, v: &AugmentedState) -> String {
    format!("[{},{}]", info_label(aut, obs, &v.info), aut.event_name(v.pending))
}

pub fn plant_dot(aut: &FiniteAutomaton) -> String {
    let mut out = String::from("digraph plant {\n  rankdir=LR;\n  __start [shape=point];\n");
    for s in aut.states() {
        let style = if aut.is_secret(s) {
            ", shape=doublecircle, color=red"
        } else {
            ", shape=circle"
        };
        writeln!(out, "  s{} [label={}{}];", s.index(), quote(aut.state_label(s)), style).unwrap();
    }
    writeln!(out, "  __start -> s{};", aut.initial().index()).unwrap();
    for (from, e, to) in aut.transitions() {
        writeln!(out, "  s{} -> s{} [label={}];", from.index(), to.index(), quote(aut.event_name(e))).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Estimates inside the secret set are drawn as red double circles.
/// Self-loops on non-reactive events are listed only if `self_loops` is set.
pub fn observer_dot(aut: &FiniteAutomaton, obs: &ObserverAutomaton, name: &str, self_loops: bool) -> String {
    let mut out = format!("digraph {} {{\n  rankdir=LR;\n  __start [shape=point];\n", quote(name));
    for id in obs.ids() {
        let set = obs.state(id);
        let style = if aut.all_secret(set) {
            ", shape=doublecircle, color=red, fontcolor=red"
        } else {
            ", shape=ellipse"
        };
        writeln!(out, "  o{} [label={}{}];", id.index(), quote(&aut.format_set(set)), style).unwrap();
    }
    writeln!(out, "  __start -> o{};", obs.initial().index()).unwrap();
    for (from, e, to) in obs.reactive_transitions() {
        writeln!(out, "  o{} -> o{} [label={}];", from.index(), to.index(), quote(aut.event_name(e))).unwrap();
    }
    if self_loops {
        let passive = obs.alphabet().difference(obs.reactive());
        if !passive.is_empty() {
            let names: Vec<&str> = passive.iter().map(|e| aut.event_name(e)).collect();
            for id in obs.ids() {
                writeln!(
                    out,
                    "  o{0} -> o{0} [label={1}, style=dotted];",
                    id.index(),
                    quote(&names.join(","))
                )
                .unwrap();
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Information states as ellipses, augmented states as boxes, utility-0
/// states filled red.
pub fn game_dot(aut: &FiniteAutomaton, obs: &Observers, game: &EditGameStructure) -> String {
    let mut out = String::from("digraph game {\n  __start [shape=point];\n");
    write_game_body(&mut out, aut, obs, game);
    out.push_str("}\n");
    out
}

fn write_game_body(out: &mut String, aut: &FiniteAutomaton, obs: &Observers, game: &EditGameStructure) {
    for a in game.a_ids() {
        let fill = if game.utility_a(a) == 0 {
            ", style=filled, fillcolor=red"
        } else {
            ""
        };
        let label = info_label(aut, obs, game.info(a));
        writeln!(out, "  a{} [shape=ellipse, label={}{}];", a.index(), quote(&label), fill).unwrap();
    }
    for f in game.f_ids() {
        let fill = if game.utility_f(f) == 0 {
            ", style=filled, fillcolor=red"
        } else {
            ""
        };
        let label = augmented_label(aut, obs, game.augmented(f));
        writeln!(out, "  f{} [shape=box, label={}{}];", f.index(), quote(&label), fill).unwrap();
    }
    writeln!(out, "  __start -> a{};", game.initial().index()).unwrap();
    for a in game.a_ids() {
        for (e, f) in game.sys_moves(a) {
            writeln!(out, "  a{} -> f{} [label={}];", a.index(), f.index(), quote(aut.event_name(*e))).unwrap();
        }
    }
    for f in game.f_ids() {
        let pending = game.augmented(f).pending;
        for (act, a) in game.def_moves(f) {
            let label = act.label(pending, aut);
            writeln!(out, "  f{} -> a{} [label={}];", f.index(), a.index(), quote(&label)).unwrap();
        }
    }
}

/// The trimmed game; disabled actions appear as dashed gray edges into
/// gray placeholders when `show_disabled` is set.
pub fn trimmed_dot(aut: &FiniteAutomaton, obs: &Observers, tgs: &TrimmedGameStructure, show_disabled: bool) -> String {
    let mut out = String::from("digraph trimmed {\n  __start [shape=point];\n");
    write_game_body(&mut out, aut, obs, tgs.game());
    if show_disabled {
        for (k, d) in tgs.disabled().iter().enumerate() {
            let pending = tgs.game().augmented(d.at).pending;
            writeln!(
                out,
                "  x{} [shape=ellipse, color=gray, fontcolor=gray, label={}];",
                k,
                quote(&info_label(aut, obs, &d.target))
            )
            .unwrap();
            writeln!(
                out,
                "  f{} -> x{} [label={}, style=dashed, color=gray, fontcolor=gray];",
                d.at.index(),
                k,
                quote(&d.action.label(pending, aut))
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Merged states list one member per line. Moves undefined at some member
/// are dashed.
pub fn mechanism_dot(
    aut: &FiniteAutomaton,
    obs: &Observers,
    tgs: &EditGameStructure,
    em: &EditMechanism,
    name: &str,
) -> String {
    let mut out = format!("digraph {} {{\n  __start [shape=point];\n", quote(name));
    for q in em.ua_ids() {
        let lines: Vec<String> = em
            .ua_members(q)
            .iter()
            .map(|a| info_label(aut, obs, tgs.info(*a)))
            .collect();
        writeln!(out, "  q{} [shape=ellipse, label={}];", q.index(), quote(&lines.join("\\n"))).unwrap();
    }
    for u in em.uf_ids() {
        let lines: Vec<String> = em
            .uf(u)
            .members
            .iter()
            .map(|f| augmented_label(aut, obs, tgs.augmented(*f)))
            .collect();
        writeln!(out, "  u{} [shape=box, label={}];", u.index(), quote(&lines.join("\\n"))).unwrap();
    }
    writeln!(out, "  __start -> q{};", em.initial().index()).unwrap();
    for q in em.ua_ids() {
        for (e, u) in em.moves_in(q) {
            writeln!(out, "  q{} -> u{} [label={}];", q.index(), u.index(), quote(aut.event_name(*e))).unwrap();
        }
    }
    for u in em.uf_ids() {
        let observed = em.uf(u).observed;
        for m in em.moves_out(u) {
            let style = if m.total { "" } else { ", style=dashed" };
            writeln!(
                out,
                "  u{} -> q{} [label={}{}];",
                u.index(),
                m.target.index(),
                quote(&m.action.label(observed, aut)),
                style
            )
            .unwrap();
        }
    }
    out.push_str("}\n");
    out
}

/// Edges labeled `γ / ω`.
pub fn transducer_dot(aut: &FiniteAutomaton, fe: &MealyEditFunction) -> String {
    let mut out = String::from("digraph transducer {\n  rankdir=LR;\n  __start [shape=point];\n");
    for q in 0..fe.num_states() {
        writeln!(out, "  t{} [shape=circle, label={}];", q, quote(fe.state_name(q))).unwrap();
    }
    writeln!(out, "  __start -> t{};", fe.initial()).unwrap();
    for (q, e, w, n) in fe.edges() {
        let label = format!("{} / {}", aut.event_name(e), aut.format_trace(w));
        writeln!(out, "  t{} -> t{} [label={}];", q, n, quote(&label)).unwrap();
    }
    out.push_str("}\n");
    out
}
