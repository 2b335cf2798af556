//! Powerset observers with the self-loop convention for events an observer
//! does not react to.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{Event, EventSet, FiniteAutomaton, ObservationProfile, StateId, StateSet};

/// Index of a state inside one [`ObserverAutomaton`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObsId(pub(crate) u32);

impl ObsId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Memoized reach-set queries for one observation alphabet.
pub struct ReachCache<'a> {
    aut: &'a FiniteAutomaton,
    alphabet: EventSet,
    memo: HashMap<(StateId, Option<Event>), StateSet>,
}

impl<'a> ReachCache<'a> {
    pub fn new(aut: &'a FiniteAutomaton, alphabet: EventSet) -> Self {
        ReachCache {
            aut,
            alphabet,
            memo: HashMap::new(),
        }
    }

    /// States reachable from `from` by traces whose projection onto the
    /// alphabet is exactly `observed` (ε when `None`).
    pub fn reach(&mut self, from: StateId, observed: Option<Event>) -> StateSet {
        if let Some(hit) = self.memo.get(&(from, observed)) {
            return hit.clone();
        }
        let closed = self.closure(std::iter::once(from));
        let result = match observed {
            None => closed,
            Some(e) => {
                let stepped: Vec<StateId> =
                    closed.iter().filter_map(|s| self.aut.step(s, e)).collect();
                self.closure(stepped)
            }
        };
        self.memo.insert((from, observed), result.clone());
        result
    }

    fn closure(&self, seeds: impl IntoIterator<Item = StateId>) -> StateSet {
        let mut seen = vec![false; self.aut.num_states()];
        let mut queue = VecDeque::new();
        for s in seeds {
            if !seen[s.index()] {
                seen[s.index()] = true;
                queue.push_back(s);
            }
        }
        while let Some(s) = queue.pop_front() {
            for (e, t) in self.aut.successors(s) {
                if !self.alphabet.contains(e) && !seen[t.index()] {
                    seen[t.index()] = true;
                    queue.push_back(t);
                }
            }
        }
        seen.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| StateId::from_index(i))
            .collect()
    }
}

/// One-shot reach-set query; see [`ReachCache::reach`].
pub fn reach_set(
    aut: &FiniteAutomaton,
    from: StateId,
    observed: Option<Event>,
    alphabet: EventSet,
) -> StateSet {
    ReachCache::new(aut, alphabet).reach(from, observed)
}

/// Deterministic state estimator over the full observable alphabet. Events
/// outside `reactive` self-loop at every state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObserverAutomaton {
    full: EventSet,
    reactive: EventSet,
    states: Vec<StateSet>,
    index: HashMap<StateSet, ObsId>,
    // trans[state][event]; only reactive events are stored
    trans: Vec<Vec<Option<ObsId>>>,
    initial: ObsId,
}

impl ObserverAutomaton {
    /// Accessible powerset construction rooted at the unobservable closure
    /// of the plant's initial state.
    pub fn build(aut: &FiniteAutomaton, reactive: EventSet, full: EventSet) -> Self {
        assert!(reactive.is_subset(full), "reactive events must be a subset of the alphabet");
        let mut cache = ReachCache::new(aut, reactive);
        let mut obs = ObserverAutomaton {
            full,
            reactive,
            states: Vec::new(),
            index: HashMap::new(),
            trans: Vec::new(),
            initial: ObsId(0),
        };
        let init = cache.reach(aut.initial(), None);
        obs.intern(init, aut.num_events());
        let mut next = 0;
        while next < obs.states.len() {
            let current = obs.states[next].clone();
            for e in reactive.iter() {
                let target: StateSet = current
                    .iter()
                    .flat_map(|x| cache.reach(x, Some(e)).as_slice().to_vec())
                    .collect();
                if target.is_empty() {
                    continue;
                }
                let id = obs.intern(target, aut.num_events());
                obs.trans[next][e.index()] = Some(id);
            }
            next += 1;
        }
        obs
    }

    fn intern(&mut self, set: StateSet, num_events: usize) -> ObsId {
        if let Some(&id) = self.index.get(&set) {
            return id;
        }
        let id = ObsId(self.states.len() as u32);
        self.states.push(set.clone());
        self.index.insert(set, id);
        self.trans.push(vec![None; num_events]);
        id
    }

    pub fn initial(&self) -> ObsId {
        self.initial
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn alphabet(&self) -> EventSet {
        self.full
    }

    pub fn reactive(&self) -> EventSet {
        self.reactive
    }

    pub fn ids(&self) -> impl Iterator<Item = ObsId> {
        (0..self.states.len() as u32).map(ObsId)
    }

    pub fn state(&self, id: ObsId) -> &StateSet {
        &self.states[id.index()]
    }

    pub fn id_of(&self, set: &StateSet) -> Option<ObsId> {
        self.index.get(set).copied()
    }

    pub fn step(&self, from: ObsId, e: Event) -> Option<ObsId> {
        if !self.full.contains(e) {
            None
        } else if !self.reactive.contains(e) {
            Some(from)
        } else {
            self.trans[from.index()][e.index()]
        }
    }

    pub fn run_from(&self, from: ObsId, word: &[Event]) -> Option<ObsId> {
        word.iter().try_fold(from, |s, e| self.step(s, *e))
    }

    pub fn run(&self, word: &[Event]) -> Option<ObsId> {
        self.run_from(self.initial, word)
    }

    /// Reactive (non-self-loop) transitions in state/event order.
    pub fn reactive_transitions(&self) -> impl Iterator<Item = (ObsId, Event, ObsId)> + '_ {
        self.ids().flat_map(move |s| {
            self.reactive
                .iter()
                .filter_map(move |e| self.trans[s.index()][e.index()].map(|t| (s, e, t)))
        })
    }
}

/// The system, intruder and defender observers of one model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Observers {
    pub system: ObserverAutomaton,
    pub intruder: ObserverAutomaton,
    pub defender: ObserverAutomaton,
}

impl Observers {
    pub fn build(aut: &FiniteAutomaton, profile: &ObservationProfile) -> Self {
        let eo = profile.observable();
        Observers {
            system: ObserverAutomaton::build(aut, eo, eo),
            intruder: ObserverAutomaton::build(aut, profile.intruder(), eo),
            defender: ObserverAutomaton::build(aut, profile.defender(), eo),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::SystemModel;
    use crate::format::parse_model;

    fn six_state() -> SystemModel {
        parse_model(include_str!("../fixtures/six_state.aut")).unwrap()
    }

    fn set(m: &SystemModel, labels: &[&str]) -> StateSet {
        labels
            .iter()
            .map(|l| m.automaton.state_by_label(l).unwrap())
            .collect()
    }

    #[test]
    fn reach_set_examples() {
        let m = six_state();
        let g = &m.automaton;
        let one = g.state_by_label("1").unwrap();
        assert_eq!(reach_set(g, one, None, m.profile.defender()), set(&m, &["1", "3"]));
        assert_eq!(reach_set(g, one, None, m.profile.intruder()), set(&m, &["1", "4"]));
        for x in g.states() {
            assert_eq!(reach_set(g, x, None, m.profile.observable()), StateSet::singleton(x));
        }
    }

    #[test]
    fn six_state_observers() {
        let m = six_state();
        let g = &m.automaton;
        let obs = Observers::build(g, &m.profile);
        let ev = |n: &str| g.event_by_name(n).unwrap();

        // O_o coincides with the plant
        assert_eq!(obs.system.len(), g.num_states());
        for (s, e, t) in g.transitions() {
            let from = obs.system.id_of(&StateSet::singleton(s)).unwrap();
            assert_eq!(obs.system.step(from, e), obs.system.id_of(&StateSet::singleton(t)));
        }

        // O_I has the solely secret state {5}
        assert!(obs.intruder.id_of(&set(&m, &["5"])).is_some());
        assert_eq!(obs.intruder.state(obs.intruder.initial()), &set(&m, &["1", "4"]));
        let after_a = obs.intruder.step(obs.intruder.initial(), ev("a")).unwrap();
        assert_eq!(obs.intruder.state(after_a), &set(&m, &["3", "6"]));

        // O_D
        let d0 = obs.defender.initial();
        assert_eq!(obs.defender.state(d0), &set(&m, &["1", "3"]));
        let after_b = obs.defender.step(d0, ev("b")).unwrap();
        assert_eq!(obs.defender.state(after_b), &set(&m, &["2", "5"]));
        assert_eq!(obs.defender.run(&[ev("d"), ev("b")]), None);
        assert_eq!(obs.defender.run(&[ev("a")]), Some(d0));

        // ad through O_I ends in {6}
        let acd = g.parse_trace("acd").unwrap();
        let end = obs.intruder.run(&acd).unwrap();
        assert_eq!(obs.intruder.state(end), &set(&m, &["6"]));
    }

    #[test]
    fn self_loops_are_total() {
        let m = six_state();
        let obs = Observers::build(&m.automaton, &m.profile);
        let a = m.automaton.event_by_name("a").unwrap();
        for s in obs.defender.ids() {
            assert_eq!(obs.defender.step(s, a), Some(s));
        }
        let c = m.automaton.event_by_name("c").unwrap();
        for s in obs.intruder.ids() {
            assert_eq!(obs.intruder.run_from(s, &[c, c, c]), Some(s));
        }
    }

    #[test]
    fn states_are_nonempty_and_unique() {
        let m = six_state();
        let obs = Observers::build(&m.automaton, &m.profile);
        for o in [&obs.system, &obs.intruder, &obs.defender] {
            let mut seen = std::collections::HashSet::new();
            for id in o.ids() {
                assert!(!o.state(id).is_empty());
                assert!(seen.insert(o.state(id).clone()));
            }
        }
    }
}
