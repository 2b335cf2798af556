//! Current-state opacity and the properties an edit function has to satisfy:
//! i-availability, c-availability, confidentiality and integrity.
//!
//! The `check_*` functions evaluate the definitions literally over every
//! plant trace up to a length bound. They work for any [`EditFunction`],
//! including ones that are not causal. The product-based oracle in
//! [`crate::harness`] is the fast path for causal editors.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::hash::Hash;

use crate::automaton::{project, Event, FiniteAutomaton, ObservationProfile, StateId, Trace};
use crate::mechanism::MealyEditFunction;
use crate::observer::{ObsId, Observers};

/// Outcome of [`verify_cso`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpacityVerdict {
    pub opaque: bool,
    /// Shortest (then least) plant trace after which the intruder is sure
    /// the plant is in a secret state.
    pub witness: Option<Trace>,
}

/// Current-state opacity via the intruder observer: the plant is opaque iff
/// no reachable estimate lies inside the secret set.
pub fn verify_cso(aut: &FiniteAutomaton, profile: &ObservationProfile) -> OpacityVerdict {
    let intr = crate::observer::ObserverAutomaton::build(aut, profile.intruder(), profile.observable());
    let leaks = |i: ObsId| aut.all_secret(intr.state(i));
    // breadth-first over (plant state, estimate) in event order, so the first
    // hit is the length-lex least witness
    let start = (aut.initial(), intr.initial());
    let mut parent: HashMap<(StateId, ObsId), ((StateId, ObsId), Event)> = HashMap::new();
    let mut queue = VecDeque::from([start]);
    let mut seen = std::collections::HashSet::from([start]);
    while let Some(node) = queue.pop_front() {
        if leaks(node.1) {
            let mut trace = Vec::new();
            let mut cur = node;
            while let Some(&(prev, e)) = parent.get(&cur) {
                trace.push(e);
                cur = prev;
            }
            trace.reverse();
            return OpacityVerdict {
                opaque: false,
                witness: Some(Trace::new(trace)),
            };
        }
        for (e, x) in aut.successors(node.0) {
            let i = if profile.observable().contains(e) {
                match intr.step(node.1, e) {
                    Some(i) => i,
                    None => continue,
                }
            } else {
                node.1
            };
            let next = (x, i);
            if seen.insert(next) {
                parent.insert(next, (node, e));
                queue.push_back(next);
            }
        }
    }
    OpacityVerdict {
        opaque: true,
        witness: None,
    }
}

/// An edit function on observed strings: `edit(σ)` is the word emitted after
/// the plant produced an observation `σ`, or `None` if undefined.
pub trait EditFunction {
    fn edit(&self, observed: &[Event]) -> Option<Trace>;
}

/// An edit function that reads its input one event at a time and whose
/// output only ever grows. The state type lets the oracle deduplicate runs.
pub trait CausalEditor {
    type State: Clone + Eq + Hash + Ord;

    fn start(&self) -> Self::State;

    /// Emitted word and successor state, or `None` if the editor cannot
    /// answer this event.
    fn step(&self, state: &Self::State, e: Event) -> Option<(Trace, Self::State)>;
}

impl CausalEditor for MealyEditFunction {
    type State = usize;

    fn start(&self) -> usize {
        self.initial()
    }

    fn step(&self, state: &usize, e: Event) -> Option<(Trace, usize)> {
        MealyEditFunction::step(self, *state, e)
    }
}

/// Emits every observation unchanged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IdentityEditor;

impl CausalEditor for IdentityEditor {
    type State = ();

    fn start(&self) {}

    fn step(&self, _: &(), e: Event) -> Option<(Trace, ())> {
        Some((Trace::single(e), ()))
    }
}

/// Whole-string view of a causal editor.
pub struct Causal<'a, C>(pub &'a C);

impl<C: CausalEditor> EditFunction for Causal<'_, C> {
    fn edit(&self, observed: &[Event]) -> Option<Trace> {
        let mut s = self.0.start();
        let mut out = Trace::empty();
        for e in observed {
            let (w, n) = self.0.step(&s, *e)?;
            out.extend_from(&w);
            s = n;
        }
        Some(out)
    }
}

impl EditFunction for MealyEditFunction {
    fn edit(&self, observed: &[Event]) -> Option<Trace> {
        self.run(observed)
    }
}

impl EditFunction for IdentityEditor {
    fn edit(&self, observed: &[Event]) -> Option<Trace> {
        Some(Trace::from(observed.to_vec()))
    }
}

/// Hand-written editors, mainly for tests.
impl<F: Fn(&[Event]) -> Option<Trace>> EditFunction for F {
    fn edit(&self, observed: &[Event]) -> Option<Trace> {
        self(observed)
    }
}

/// Shared context for the literal property checks.
struct Checker<'a, F: ?Sized> {
    aut: &'a FiniteAutomaton,
    profile: &'a ObservationProfile,
    obs: Observers,
    fe: &'a F,
    /// observation → whether some plant trace producing it ends in a secret
    /// state, in length-lex order of the observation
    observations: BTreeMap<(usize, Trace), bool>,
}

/// Estimates of an emitted word: it counts as defined only if both the
/// intruder and the defender observer accept it.
struct Emitted {
    word: Trace,
    intr: ObsId,
}

impl<'a, F: EditFunction + ?Sized> Checker<'a, F> {
    fn new(aut: &'a FiniteAutomaton, profile: &'a ObservationProfile, fe: &'a F, depth: usize) -> Self {
        let mut observations = BTreeMap::new();
        for t in aut.generated_language(depth) {
            let sigma = project(&t, profile.observable());
            let end = aut.extended_transition(aut.initial(), &t).expect("trace is generated");
            let secret = observations.entry((sigma.len(), sigma)).or_insert(false);
            *secret |= aut.is_secret(end);
        }
        Checker {
            aut,
            profile,
            obs: Observers::build(aut, profile),
            fe,
            observations,
        }
    }

    fn emitted(&self, sigma: &[Event]) -> Option<Emitted> {
        let word = self.fe.edit(sigma)?;
        let intr = self.obs.intruder.run(&word)?;
        self.obs.defender.run(&word)?;
        Some(Emitted { word, intr })
    }

    fn sigmas(&self) -> impl Iterator<Item = (&Trace, bool)> {
        self.observations.iter().map(|((_, s), secret)| (s, *secret))
    }

    fn i_available(&self) -> bool {
        self.sigmas().all(|(s, _)| self.emitted(s).is_some())
    }

    fn c_available(&self) -> bool {
        let mut seen: HashMap<Trace, Trace> = HashMap::new();
        for (s, _) in self.sigmas() {
            let Some(out) = self.emitted(s) else {
                return false;
            };
            let key = project(s, self.profile.defender());
            let val = project(&out.word, self.profile.defender());
            if let Some(prev) = seen.insert(key, val.clone()) {
                if prev != val {
                    return false;
                }
            }
        }
        true
    }

    fn confidential(&self) -> bool {
        self.sigmas().filter(|(_, secret)| *secret).all(|(s, _)| {
            self.emitted(s)
                .is_some_and(|out| !self.aut.all_secret(self.obs.intruder.state(out.intr)))
        })
    }

    /// Every extension keeps the earlier output as a prefix, and every
    /// prefix is available and confidential on its own.
    fn integral(&self) -> bool {
        for (s, _) in self.sigmas() {
            let Some(out) = self.fe.edit(s) else {
                return false;
            };
            for cut in 0..s.len() {
                match self.fe.edit(&s[..cut]) {
                    Some(prefix_out) if out.starts_with(&prefix_out) => {}
                    _ => return false,
                }
            }
        }
        self.i_available() && self.c_available() && self.confidential()
    }
}

/// Every plant trace of length at most `depth` has a defined output.
pub fn check_i_available<F: EditFunction + ?Sized>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    fe: &F,
    depth: usize,
) -> bool {
    Checker::new(aut, profile, fe, depth).i_available()
}

pub fn check_c_available<F: EditFunction + ?Sized>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    fe: &F,
    depth: usize,
) -> bool {
    Checker::new(aut, profile, fe, depth).c_available()
}

/// Only observations of traces that really end in a secret state are
/// constrained; an output may point at a secret state otherwise.
pub fn check_confidential<F: EditFunction + ?Sized>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    fe: &F,
    depth: usize,
) -> bool {
    Checker::new(aut, profile, fe, depth).confidential()
}

pub fn check_integrity<F: EditFunction + ?Sized>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    fe: &F,
    depth: usize,
) -> bool {
    Checker::new(aut, profile, fe, depth).integral()
}

/// All four properties.
pub fn ic_enforcing<F: EditFunction + ?Sized>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    fe: &F,
    depth: usize,
) -> bool {
    let c = Checker::new(aut, profile, fe, depth);
    c.i_available() && c.c_available() && c.confidential() && c.integral()
}

/// Default bound for the literal checks: `|X|·|X_I|·|X_D| + K + 1`.
pub fn default_depth(aut: &FiniteAutomaton, observers: &Observers, max_insert: usize) -> usize {
    aut.num_states() * observers.intruder.len() * observers.defender.len() + max_insert + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::SystemModel;
    use crate::format::parse_model;

    fn six_state() -> SystemModel {
        parse_model(include_str!("../fixtures/six_state.aut")).unwrap()
    }

    #[test]
    fn six_state_is_not_opaque() {
        let m = six_state();
        let v = verify_cso(&m.automaton, &m.profile);
        assert!(!v.opaque);
        let w = v.witness.unwrap();
        assert_eq!(m.automaton.format_trace(&w), "ab");
        assert_eq!(m.automaton.format_trace(&project(&w, m.profile.intruder())), "ab");
    }

    #[test]
    fn swapped_alphabets_are_opaque() {
        let m = parse_model(include_str!("../fixtures/six_state_swapped.aut")).unwrap();
        assert_eq!(
            verify_cso(&m.automaton, &m.profile),
            OpacityVerdict {
                opaque: true,
                witness: None
            }
        );
    }

    #[test]
    fn no_secret_is_opaque() {
        let m = parse_model(include_str!("../fixtures/no_secret.aut")).unwrap();
        assert!(verify_cso(&m.automaton, &m.profile).opaque);
        assert!(ic_enforcing(&m.automaton, &m.profile, &IdentityEditor, 6));
    }

    #[test]
    fn identity_leaks_on_six_state() {
        let m = six_state();
        let (g, p) = (&m.automaton, &m.profile);
        assert!(check_i_available(g, p, &IdentityEditor, 4));
        assert!(check_c_available(g, p, &IdentityEditor, 4));
        assert!(!check_confidential(g, p, &IdentityEditor, 3));
        assert!(check_confidential(g, p, &IdentityEditor, 1));
        assert!(!ic_enforcing(g, p, &IdentityEditor, 3));
    }

    #[test]
    fn rewriting_b_to_c_hides_the_secret() {
        let m = six_state();
        let g = &m.automaton;
        let (b, c, d) = (
            g.event_by_name("b").unwrap(),
            g.event_by_name("c").unwrap(),
            g.event_by_name("d").unwrap(),
        );
        // the editor from the running example, written out by hand
        let fe = |s: &[Event]| -> Option<Trace> {
            let mut out = Trace::empty();
            let mut after_b = false;
            for e in s {
                if *e == b {
                    out.push(c);
                    after_b = true;
                } else if *e == c && after_b {
                    out.push(d);
                } else {
                    out.push(*e);
                }
            }
            Some(out)
        };
        let abc = g.parse_trace("abc").unwrap();
        assert_eq!(g.format_trace(&fe(&abc).unwrap()), "acd");
        assert!(check_confidential(g, &m.profile, &fe, 3));
    }

    #[test]
    fn empty_editor_is_unavailable() {
        let m = six_state();
        let nothing = |s: &[Event]| if s.is_empty() { Some(Trace::empty()) } else { None };
        assert!(!check_i_available(&m.automaton, &m.profile, &nothing, 2));
        assert!(check_i_available(&m.automaton, &m.profile, &nothing, 0));
    }

    #[test]
    fn branching_on_hidden_event_breaks_c_availability() {
        let m = six_state();
        let g = &m.automaton;
        let (a, b, d) = (
            g.event_by_name("a").unwrap(),
            g.event_by_name("b").unwrap(),
            g.event_by_name("d").unwrap(),
        );
        // answers b with d only when the defender-invisible a came first
        let fe = |s: &[Event]| -> Option<Trace> {
            let seen_a = s.first() == Some(&a);
            Some(s.iter().map(|e| if *e == b && seen_a { d } else { *e }).collect())
        };
        // ab and b look the same to the defender but are answered differently
        let ab = fe(&[a, b]).unwrap();
        let b_only = fe(&[b]).unwrap();
        assert_ne!(project(&ab, m.profile.defender()), project(&b_only, m.profile.defender()));
        assert!(!check_c_available(g, &m.profile, &fe, 2));
        assert!(check_c_available(g, &m.profile, &IdentityEditor, 2));
    }

    #[test]
    fn non_causal_editor_fails_integrity() {
        let m = parse_model(
            "states 1\ninitial 1\nevents a b c\nintruder a\ndefender b c\n\
             trans 1 a 1\ntrans 1 b 1\ntrans 1 c 1\n",
        )
        .unwrap();
        let g = &m.automaton;
        let (b, c) = (g.event_by_name("b").unwrap(), g.event_by_name("c").unwrap());
        // once the defender has seen exactly bc, the earlier answer to b is
        // taken back and the pair is emitted swapped
        let fe = |s: &[Event]| -> Option<Trace> {
            if project(s, m.profile.defender()).events() == [b, c] {
                Some(s.iter().map(|e| if *e == b { c } else if *e == c { b } else { *e }).collect())
            } else {
                Some(s.iter().copied().collect())
            }
        };
        assert!(check_i_available(g, &m.profile, &fe, 3));
        assert!(check_c_available(g, &m.profile, &fe, 3));
        assert!(check_confidential(g, &m.profile, &fe, 3));
        assert!(!check_integrity(g, &m.profile, &fe, 3));
        assert!(check_integrity(g, &m.profile, &IdentityEditor, 3));
    }

    #[test]
    fn causal_wrapper_agrees_with_direct_run() {
        let m = six_state();
        let g = &m.automaton;
        for t in g.generated_language(4) {
            let s = project(&t, m.profile.observable());
            assert_eq!(Causal(&IdentityEditor).edit(&s), IdentityEditor.edit(&s));
        }
    }
}
