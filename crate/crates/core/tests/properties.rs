use std::collections::BTreeSet;

use opacity_edit::game::AId;
use opacity_edit::*;
use proptest::prelude::*;

const EVENTS: usize = 6;

fn alphabet() -> impl Strategy<Value = EventSet> {
    (0u64..1 << EVENTS).prop_map(EventSet::from_bits)
}

fn trace(max: usize) -> impl Strategy<Value = Vec<Event>> {
    prop::collection::vec((0..EVENTS).prop_map(Event::from_index), 0..max)
}

/// A random plant trace: a walk from the initial state picking the
/// `choice`-th enabled event at each step.
fn walk(aut: &FiniteAutomaton, choices: &[usize]) -> Vec<Event> {
    let mut x = aut.initial();
    let mut out = Vec::new();
    for &c in choices {
        let next: Vec<(Event, StateId)> = aut.successors(x).collect();
        if next.is_empty() {
            break;
        }
        let (e, y) = next[c % next.len()];
        out.push(e);
        x = y;
    }
    out
}

/// States reachable by some plant trace whose projection onto `seen` is
/// `word`, computed by direct NFA simulation.
fn estimate(aut: &FiniteAutomaton, seen: EventSet, word: &[Event]) -> BTreeSet<StateId> {
    let close = |set: BTreeSet<StateId>| {
        let mut set = set;
        loop {
            let more: Vec<StateId> = set
                .iter()
                .flat_map(|&x| aut.successors(x).filter(|(e, _)| !seen.contains(*e)).map(|(_, y)| y))
                .filter(|y| !set.contains(y))
                .collect();
            if more.is_empty() {
                return set;
            }
            set.extend(more);
        }
    };
    let mut cur = close(BTreeSet::from([aut.initial()]));
    for &e in word {
        cur = close(cur.iter().filter_map(|&x| aut.step(x, e)).collect());
    }
    cur
}

fn game_for(seed: u64, k: usize) -> (SystemModel, Observers, EditGameStructure) {
    let m = random_instance(seed, 5, 4);
    let obs = Observers::build(&m.automaton, &m.profile);
    let space = if k == 0 {
        ActionSpace::substitution_only()
    } else {
        ActionSpace::full(k)
    };
    let g = build_edit_game(&m.automaton, &m.profile, &obs, &space);
    (m, obs, g)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn projection_is_a_morphism(s in trace(12), t in trace(12), a in alphabet()) {
        let st: Vec<Event> = s.iter().chain(&t).copied().collect();
        prop_assert_eq!(project(&st, a), project(&s, a).concat(&project(&t, a)));
        prop_assert_eq!(project(&project(&st, a), a), project(&st, a));
        prop_assert!(project(&st, a).iter().all(|e| a.contains(*e)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn observers_contain_the_true_state(seed in any::<u64>(), choices in prop::collection::vec(0usize..8, 0..12)) {
        let m = random_instance(seed, 6, 4);
        let (aut, p) = (&m.automaton, &m.profile);
        let obs = Observers::build(aut, p);
        let s = walk(aut, &choices);
        for i in 0..=s.len() {
            let x = aut.extended_transition(aut.initial(), &s[..i]).unwrap();
            for (o, alpha) in [(&obs.system, p.observable()), (&obs.intruder, p.intruder()), (&obs.defender, p.defender())] {
                // the observers run on the full observable word
                let id = o.run(&project(&s[..i], p.observable()));
                prop_assert!(id.is_some());
                let est = o.state(id.unwrap());
                prop_assert!(est.contains(x));
                let direct: StateSet = estimate(aut, alpha, &project(&s[..i], alpha)).into_iter().collect();
                prop_assert_eq!(est, &direct);
            }
        }
    }

    #[test]
    fn verify_cso_matches_the_definition(seed in any::<u64>()) {
        let m = random_instance(seed, 4, 3);
        let (aut, p) = (&m.automaton, &m.profile);
        let v = verify_cso(aut, p);
        let leaks = |s: &[Event]| {
            let x = aut.extended_transition(aut.initial(), s).unwrap();
            aut.is_secret(x) && estimate(aut, p.intruder(), &project(s, p.intruder())).iter().all(|&y| aut.is_secret(y))
        };
        let depth = 6;
        let brute = aut.generated_language(depth).into_iter().find(|s| leaks(s));
        match (&v.witness, &brute) {
            (None, None) => prop_assert!(v.opaque),
            (None, Some(s)) => prop_assert!(false, "missed leak {}", aut.format_trace(s)),
            (Some(w), _) => {
                prop_assert!(!v.opaque);
                prop_assert!(aut.accepts(w));
                prop_assert!(leaks(w));
                if w.len() <= depth {
                    prop_assert!(brute.is_some());
                    prop_assert!(brute.unwrap().len() >= w.len(), "witness is not shortest");
                }
            }
        }
    }

    #[test]
    fn trimming_is_idempotent(seed in any::<u64>(), k in 0usize..2) {
        let (_, _, g) = game_for(seed, k);
        if let Some(t) = trim_game(&g) {
            let again = trim_game(t.game()).expect("a trimmed game survives trimming");
            prop_assert!(again.disabled().is_empty());
            prop_assert_eq!(again.stats().pruned_a + again.stats().pruned_f, 0);
            prop_assert_eq!(again.game(), t.game());
            prop_assert!(t.game().a_ids().all(|a| t.game().utility_a(a) == 1));
            prop_assert!(t.game().f_ids().all(|f| t.game().utility_f(f) == 1));
        }
    }

    #[test]
    fn unobservable_closure_is_the_least_closed_set(seed in any::<u64>(), k in 0usize..2) {
        let (m, _, g) = game_for(seed, k);
        let Some(t) = trim_game(&g) else { return Ok(()) };
        let tg = t.game();
        let ed = m.profile.defender();
        let step = |set: &BTreeSet<AId>| -> BTreeSet<AId> {
            let mut out = set.clone();
            for &a in set {
                for (e, f) in tg.sys_moves(a) {
                    if !ed.contains(*e) {
                        out.extend(tg.def_moves(*f).iter().map(|(_, b)| *b));
                    }
                }
            }
            out
        };
        for a in tg.a_ids() {
            let mut fix = BTreeSet::from([a]);
            loop {
                let next = step(&fix);
                if next == fix {
                    break;
                }
                fix = next;
            }
            let got = unobservable_closure(tg, [a], ed);
            prop_assert_eq!(got, fix.into_iter().collect::<Vec<_>>());
        }
        let uem = build_uem(tg, ed);
        for q in uem.ua_ids() {
            let members = uem.ua_members(q);
            let closed = unobservable_closure(tg, members.iter().copied(), ed);
            prop_assert_eq!(closed.as_slice(), members);
        }
    }

    #[test]
    fn transducer_runs_are_prefix_monotone(seed in any::<u64>(), words in prop::collection::vec(prop::collection::vec(0usize..4, 0..10), 1..6)) {
        let m = random_incomparable_instance(seed, 5, 4);
        let run = run_pipeline(&m, &PipelineConfig::default()).unwrap();
        let Some(s) = run.synthesis else { return Ok(()) };
        let fe = s.transducer;
        let parsed = MealyEditFunction::parse(&fe.to_text(&m.automaton), &m.automaton).unwrap();
        prop_assert_eq!(&parsed, &fe);
        let observable: Vec<Event> = m.profile.observable().iter().collect();
        for w in words {
            let w: Vec<Event> = w.iter().map(|&i| observable[i % observable.len()]).collect();
            let full = fe.run(&w);
            for i in 0..w.len() {
                let (Some(head), Some(full)) = (fe.run(&w[..i]), full.as_ref()) else { continue };
                prop_assert!(full.events().starts_with(head.events()));
                let q = fe.state_after(&w[..i]).unwrap();
                let (out, _) = fe.step(q, w[i]).unwrap();
                prop_assert_eq!(fe.run(&w[..=i]).unwrap(), head.concat(&out));
                if !fe.inputs().contains(w[i]) {
                    prop_assert_eq!(out.events(), &[w[i]]);
                }
            }
        }
    }
}

#[test]
fn worklist_and_naive_trimming_agree_on_50_games() {
    let mut nonempty = 0;
    for seed in 0..50u64 {
        let (_, _, g) = game_for(seed, (seed % 2) as usize);
        let w = trim_game(&g);
        let n = trim_game_naive(&g);
        assert_eq!(w.is_some(), n.is_some(), "seed {seed}");
        if let (Some(w), Some(n)) = (w, n) {
            assert_eq!(w.game(), n.game(), "seed {seed}");
            assert_eq!(w.disabled(), n.disabled(), "seed {seed}");
            nonempty += 1;
        }
    }
    assert!(nonempty > 0);
}
