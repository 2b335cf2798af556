//! Running an editor against the plant, an exhaustive oracle for the four
//! editor properties, seeded random instances and a brute-force search over
//! edit strategies.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::automaton::{
    project, AutomatonBuilder, Event, EventSet, FiniteAutomaton, ObservationProfile, StateId,
    StateSet, SystemModel, Trace,
};
use crate::game::{enumerate_actions, AId, ActionSpace, EditAction, EditGameStructure};
use crate::observer::{ObsId, Observers};
use crate::opacity::CausalEditor;

/// One plant event as seen through the editor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationStep {
    pub plant_event: Event,
    pub editor_output: Trace,
    pub intruder_estimate: StateSet,
    pub defender_estimate: StateSet,
    pub plant_state: StateId,
    /// The plant is in a secret state and the intruder knows it.
    pub leak: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimulationError {
    #[error("trace leaves the plant language after {0} events")]
    NotInLanguage(usize),
    #[error("editor has no answer after {} observed events", .0.len())]
    EditorUndefined(Trace),
    #[error("intruder or defender cannot explain the output after {} observed events", .0.len())]
    Unexplainable(Trace),
}

/// Drive `fe` along a plant trace. Unobservable events reach neither the
/// editor nor the observers.
pub fn simulate<C: CausalEditor>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    observers: &Observers,
    fe: &C,
    trace: &[Event],
) -> Result<Vec<SimulationStep>, SimulationError> {
    let mut x = aut.initial();
    let mut s = fe.start();
    let mut i = observers.intruder.initial();
    let mut d = observers.defender.initial();
    let mut observed = Trace::empty();
    let mut steps = Vec::with_capacity(trace.len());
    for (n, &e) in trace.iter().enumerate() {
        x = aut.step(x, e).ok_or(SimulationError::NotInLanguage(n))?;
        let mut output = Trace::empty();
        if profile.observable().contains(e) {
            observed.push(e);
            let (w, next) = fe
                .step(&s, e)
                .ok_or_else(|| SimulationError::EditorUndefined(observed.clone()))?;
            let unexplained = || SimulationError::Unexplainable(observed.clone());
            i = observers.intruder.run_from(i, &w).ok_or_else(unexplained)?;
            d = observers.defender.run_from(d, &w).ok_or_else(unexplained)?;
            s = next;
            output = w;
        }
        let intruder_estimate = observers.intruder.state(i).clone();
        let leak = aut.is_secret(x) && aut.all_secret(&intruder_estimate);
        steps.push(SimulationStep {
            plant_event: e,
            editor_output: output,
            intruder_estimate,
            defender_estimate: observers.defender.state(d).clone(),
            plant_state: x,
            leak,
        });
    }
    Ok(steps)
}

/// Tab-separated step table with a header row.
pub fn steps_to_tsv(aut: &FiniteAutomaton, steps: &[SimulationStep]) -> String {
    let mut out = String::from("event\toutput\tintruder\tdefender\tleak\n");
    for st in steps {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            aut.event_name(st.plant_event),
            aut.format_trace(&st.editor_output),
            aut.format_set(&st.intruder_estimate),
            aut.format_set(&st.defender_estimate),
            if st.leak { "yes" } else { "no" },
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Property {
    IAvailability,
    CAvailability,
    Confidentiality,
    Integrity,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::IAvailability => "i-availability",
            Property::CAvailability => "c-availability",
            Property::Confidentiality => "confidentiality",
            Property::Integrity => "integrity",
        })
    }
}

/// A shortest plant trace on which the editor fails. For c-availability
/// `other` is the second trace with the same defender view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub property: Property,
    pub trace: Trace,
    pub other: Option<Trace>,
}

#[derive(Serialize)]
struct CounterexampleRecord<'a> {
    property: Property,
    trace: String,
    observed: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    other: Option<String>,
    policy: Option<&'a str>,
}

impl Counterexample {
    /// One JSON object on a single line.
    pub fn to_json_line(&self, aut: &FiniteAutomaton, profile: &ObservationProfile, policy: Option<&str>) -> String {
        let rec = CounterexampleRecord {
            property: self.property,
            trace: aut.format_trace(&self.trace),
            observed: aut.format_trace(&project(&self.trace, profile.observable())),
            other: self.other.as_ref().map(|t| aut.format_trace(t)),
            policy,
        };
        serde_json::to_string(&rec).expect("record serializes")
    }
}

struct Node<S> {
    x: StateId,
    s: S,
    i: ObsId,
    d: ObsId,
    parent: Option<(usize, Event)>,
    depth: usize,
}

fn path_to<S>(nodes: &[Node<S>], mut at: usize) -> Vec<Event> {
    let mut trace = Vec::new();
    while let Some((p, e)) = nodes[at].parent {
        trace.push(e);
        at = p;
    }
    trace.reverse();
    trace
}

/// Exhaustive check of a causal editor over every plant trace of length at
/// most `depth` (`None`: no bound). Runs are merged on (plant state, editor
/// state, intruder and defender estimates), so the unbounded search
/// terminates and is exact. The reported trace is the length-lex least
/// failing one. Integrity holds by construction for causal editors, so the
/// failing property is one of the other three.
pub fn oracle_ic_enforcing<C: CausalEditor>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    observers: &Observers,
    fe: &C,
    depth: Option<usize>,
) -> Result<(), Counterexample> {
    single_runs(aut, profile, observers, fe, depth.unwrap_or(usize::MAX))?;
    paired_runs(aut, profile, fe, depth.unwrap_or(usize::MAX))
}

fn single_runs<C: CausalEditor>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    obs: &Observers,
    fe: &C,
    depth: usize,
) -> Result<(), Counterexample> {
    let leaks = |x: StateId, i: ObsId| aut.is_secret(x) && aut.all_secret(obs.intruder.state(i));
    let fail = |property, trace: Vec<Event>| Counterexample {
        property,
        trace: Trace::new(trace),
        other: None,
    };
    let root = Node {
        x: aut.initial(),
        s: fe.start(),
        i: obs.intruder.initial(),
        d: obs.defender.initial(),
        parent: None,
        depth: 0,
    };
    if leaks(root.x, root.i) {
        return Err(fail(Property::Confidentiality, Vec::new()));
    }
    let mut seen: HashMap<(StateId, C::State, ObsId, ObsId), ()> = HashMap::new();
    seen.insert((root.x, root.s.clone(), root.i, root.d), ());
    let mut nodes = vec![root];
    let mut next = 0;
    while next < nodes.len() {
        let here = next;
        next += 1;
        if nodes[here].depth >= depth {
            continue;
        }
        let (x, s, i, d) = {
            let n = &nodes[here];
            (n.x, n.s.clone(), n.i, n.d)
        };
        for (e, x2) in aut.successors(x) {
            let (s2, i2, d2) = if profile.observable().contains(e) {
                let Some((w, s2)) = fe.step(&s, e) else {
                    let mut t = path_to(&nodes, here);
                    t.push(e);
                    return Err(fail(Property::IAvailability, t));
                };
                match (obs.intruder.run_from(i, &w), obs.defender.run_from(d, &w)) {
                    (Some(i2), Some(d2)) => (s2, i2, d2),
                    _ => {
                        let mut t = path_to(&nodes, here);
                        t.push(e);
                        return Err(fail(Property::IAvailability, t));
                    }
                }
            } else {
                (s.clone(), i, d)
            };
            if leaks(x2, i2) {
                let mut t = path_to(&nodes, here);
                t.push(e);
                return Err(fail(Property::Confidentiality, t));
            }
            if seen.insert((x2, s2.clone(), i2, d2), ()).is_none() {
                let depth = nodes[here].depth + 1;
                nodes.push(Node {
                    x: x2,
                    s: s2,
                    i: i2,
                    d: d2,
                    parent: Some((here, e)),
                    depth,
                });
            }
        }
    }
    Ok(())
}

struct PairNode<S> {
    left: (StateId, S),
    right: (StateId, S),
    depths: (usize, usize),
    parent: Option<(usize, Option<Event>, Option<Event>)>,
}

/// Two runs with the same defender view must produce outputs with the same
/// defender view. Runs advance independently on events the defender does
/// not see and together on the ones it does.
fn paired_runs<C: CausalEditor>(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    fe: &C,
    depth: usize,
) -> Result<(), Counterexample> {
    let ed = profile.defender();
    let eo = profile.observable();
    let start = (aut.initial(), fe.start());
    let mut nodes = vec![PairNode {
        left: start.clone(),
        right: start,
        depths: (0, 0),
        parent: None,
    }];
    let mut frontier: HashMap<((StateId, C::State), (StateId, C::State)), Vec<(usize, usize)>> = HashMap::new();
    frontier.insert((nodes[0].left.clone(), nodes[0].right.clone()), vec![(0, 0)]);
    let traces = |nodes: &[PairNode<C::State>], mut at: usize| {
        let (mut l, mut r) = (Vec::new(), Vec::new());
        while let Some((p, el, er)) = nodes[at].parent {
            l.extend(el);
            r.extend(er);
            at = p;
        }
        l.reverse();
        r.reverse();
        (Trace::new(l), Trace::new(r))
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(here) = queue.pop_front() {
        let (dl, dr) = nodes[here].depths;
        let (xl, sl) = nodes[here].left.clone();
        let (xr, sr) = nodes[here].right.clone();
        // candidate moves: (left event, right event)
        let mut moves: Vec<(Option<Event>, Option<Event>)> = Vec::new();
        if dl < depth {
            moves.extend(aut.successors(xl).filter(|(e, _)| !ed.contains(*e)).map(|(e, _)| (Some(e), None)));
        }
        if dr < depth {
            moves.extend(aut.successors(xr).filter(|(e, _)| !ed.contains(*e)).map(|(e, _)| (None, Some(e))));
        }
        if dl < depth && dr < depth {
            for (e, _) in aut.successors(xl) {
                if ed.contains(e) && aut.step(xr, e).is_some() {
                    moves.push((Some(e), Some(e)));
                }
            }
        }
        for (el, er) in moves {
            let advance = |x: StateId, s: &C::State, e: Option<Event>| -> Option<(StateId, C::State, Trace)> {
                match e {
                    None => Some((x, s.clone(), Trace::empty())),
                    Some(e) => {
                        let x2 = aut.step(x, e)?;
                        if eo.contains(e) {
                            let (w, s2) = fe.step(s, e)?;
                            Some((x2, s2, project(&w, ed)))
                        } else {
                            Some((x2, s.clone(), Trace::empty()))
                        }
                    }
                }
            };
            // an undefined answer is an availability failure, reported by the
            // single-run pass
            let (Some((xl2, sl2, wl)), Some((xr2, sr2, wr))) = (advance(xl, &sl, el), advance(xr, &sr, er)) else {
                continue;
            };
            let depths = (dl + el.is_some() as usize, dr + er.is_some() as usize);
            if wl != wr {
                let (mut l, mut r) = traces(&nodes, here);
                l.extend_from(el.as_slice());
                r.extend_from(er.as_slice());
                return Err(Counterexample {
                    property: Property::CAvailability,
                    trace: l,
                    other: Some(r),
                });
            }
            let key = ((xl2, sl2.clone()), (xr2, sr2.clone()));
            let known = frontier.entry(key).or_default();
            if known.iter().any(|&(a, b)| a <= depths.0 && b <= depths.1) {
                continue;
            }
            known.retain(|&(a, b)| !(depths.0 <= a && depths.1 <= b));
            known.push(depths);
            nodes.push(PairNode {
                left: (xl2, sl2),
                right: (xr2, sr2),
                depths,
                parent: Some((here, el, er)),
            });
            queue.push_back(nodes.len() - 1);
        }
    }
    Ok(())
}

/// Seeded random plant with all events observable and at least one secret
/// state. Intruder and defender alphabets are incomparable in about half of
/// the seeds and nested otherwise.
pub fn random_instance(seed: u64, max_states: usize, max_events: usize) -> SystemModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let incomparable = rng.gen_bool(0.5);
    let n = rng.gen_range(2..=max_states);
    let m = rng.gen_range(2..=max_events);
    generate(&mut rng, n, m, incomparable)
}

/// Like [`random_instance`], always with incomparable alphabets.
pub fn random_incomparable_instance(seed: u64, max_states: usize, max_events: usize) -> SystemModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=max_states);
    let m = rng.gen_range(2..=max_events);
    generate(&mut rng, n, m, true)
}

/// Exactly `states` states and `events` events, all reachable.
pub fn random_sized_instance(seed: u64, states: usize, events: usize, incomparable: bool) -> SystemModel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    generate(&mut rng, states, events, incomparable)
}

fn generate(rng: &mut ChaCha8Rng, n: usize, m: usize, incomparable: bool) -> SystemModel {
    assert!(n >= 2 && m >= 2, "need at least two states and two events");
    assert!(m <= crate::automaton::MAX_EVENTS);
    let mut b = AutomatonBuilder::new();
    let states: Vec<StateId> = (1..=n).map(|i| b.state(&i.to_string()).unwrap()).collect();
    let events: Vec<Event> = (0..m)
        .map(|j| b.event(&event_name(j)).unwrap())
        .collect();
    let mut delta: Vec<Vec<Option<StateId>>> = vec![vec![None; m]; n];
    // spanning tree from the initial state keeps every state reachable
    for child in 1..n {
        loop {
            let parent = rng.gen_range(0..child);
            let free: Vec<usize> = (0..m).filter(|&j| delta[parent][j].is_none()).collect();
            if let Some(&j) = free.choose(rng) {
                delta[parent][j] = Some(states[child]);
                break;
            }
        }
    }
    for row in delta.iter_mut() {
        for slot in row.iter_mut() {
            if slot.is_none() && rng.gen_bool(0.35) {
                *slot = Some(states[rng.gen_range(0..n)]);
            }
        }
    }
    for (from, row) in delta.iter().enumerate() {
        for (j, to) in row.iter().enumerate() {
            if let Some(to) = to {
                b.transition(states[from], events[j], *to).unwrap();
            }
        }
    }
    b.initial(states[0]);
    let secrets = rng.gen_range(1..=n.div_ceil(2));
    for s in states.choose_multiple(rng, secrets) {
        b.secret(*s);
    }
    let aut = b.build().expect("generated automaton is well formed");
    let all: EventSet = events.iter().copied().collect();
    let (intruder, defender) = if incomparable {
        let mut order = events.clone();
        order.shuffle(rng);
        let mut ei = EventSet::empty().with(order[0]);
        let mut ed = EventSet::empty().with(order[1]);
        for e in &order[2..] {
            match rng.gen_range(0..4) {
                0 => ei.insert(*e),
                1 => ed.insert(*e),
                2 => {
                    ei.insert(*e);
                    ed.insert(*e);
                }
                _ => {}
            }
        }
        (ei, ed)
    } else {
        let outer: EventSet = loop {
            let s: EventSet = events.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
            if !s.is_empty() {
                break s;
            }
        };
        let inner: EventSet = loop {
            let s: EventSet = outer.iter().filter(|_| rng.gen_bool(0.6)).collect();
            if !s.is_empty() {
                break s;
            }
        };
        if rng.gen_bool(0.5) {
            (outer, inner)
        } else {
            (inner, outer)
        }
    };
    let profile = ObservationProfile::new(&aut, all, intruder, defender).expect("alphabets are observable");
    SystemModel {
        automaton: aut,
        profile,
    }
}

fn event_name(j: usize) -> String {
    if j < 26 {
        ((b'a' + j as u8) as char).to_string()
    } else {
        format!("e{j}")
    }
}

/// Plays a trimmed game with full knowledge of the observed string: at each
/// augmented state the least surviving action is used.
pub struct GameEditor<'a> {
    pub game: &'a EditGameStructure,
}

impl CausalEditor for GameEditor<'_> {
    type State = AId;

    fn start(&self) -> AId {
        self.game.initial()
    }

    fn step(&self, a: &AId, e: Event) -> Option<(Trace, AId)> {
        let f = self.game.sys_move(*a, e)?;
        let (act, next) = self.game.def_moves(f).first()?;
        Some((act.output(e), *next))
    }
}

/// Exhaustive AND-OR search for an edit strategy that keeps the editor
/// available and confidential on every plant trace of length at most
/// `depth`. The strategy may depend on the observed events in `knowledge`,
/// which must contain the defender alphabet. With `knowledge` equal to the
/// defender alphabet every such strategy is also c-available.
pub fn strategy_exists(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    observers: &Observers,
    space: &ActionSpace,
    knowledge: EventSet,
    depth: usize,
) -> bool {
    assert!(profile.defender().is_subset(knowledge) && knowledge.is_subset(profile.observable()));
    let mut search = StrategySearch {
        aut,
        profile,
        obs: observers,
        knowledge,
        actions: profile
            .defender()
            .iter()
            .map(|e| (e, enumerate_actions(e, profile, space)))
            .collect(),
        memo: HashMap::new(),
    };
    let x0 = aut.initial();
    let i0 = observers.intruder.initial();
    if search.leaks(x0, i0) {
        return false;
    }
    let mut start = BTreeMap::new();
    start.insert((x0, i0), depth);
    match search.close(start) {
        Some(configs) => search.wins(configs, observers.defender.initial()),
        None => false,
    }
}

type Configs = BTreeMap<(StateId, ObsId), usize>;

struct StrategySearch<'a> {
    aut: &'a FiniteAutomaton,
    profile: &'a ObservationProfile,
    obs: &'a Observers,
    knowledge: EventSet,
    actions: HashMap<Event, Vec<EditAction>>,
    memo: HashMap<(Vec<((StateId, ObsId), usize)>, ObsId), bool>,
}

impl StrategySearch<'_> {
    fn leaks(&self, x: StateId, i: ObsId) -> bool {
        self.aut.is_secret(x) && self.aut.all_secret(self.obs.intruder.state(i))
    }

    /// Apply every plant move the strategy cannot see; `None` if one of
    /// them already breaks availability or confidentiality.
    fn close(&self, mut configs: Configs) -> Option<Configs> {
        let mut work: Vec<(StateId, ObsId)> = configs.keys().copied().collect();
        while let Some((x, i)) = work.pop() {
            let budget = configs[&(x, i)];
            if budget == 0 {
                continue;
            }
            for (e, x2) in self.aut.successors(x) {
                if self.knowledge.contains(e) {
                    continue;
                }
                let i2 = if self.profile.observable().contains(e) {
                    self.obs.intruder.step(i, e)?
                } else {
                    i
                };
                if self.leaks(x2, i2) {
                    return None;
                }
                if configs.get(&(x2, i2)).map_or(true, |&b| b < budget - 1) {
                    configs.insert((x2, i2), budget - 1);
                    work.push((x2, i2));
                }
            }
        }
        Some(configs)
    }

    /// Every configuration that can move on `e` does so, emitting `w`.
    fn advance(&self, configs: &Configs, e: Event, w: &[Event]) -> Option<Configs> {
        let mut next = Configs::new();
        for (&(x, i), &budget) in configs {
            if budget == 0 {
                continue;
            }
            let Some(x2) = self.aut.step(x, e) else {
                continue;
            };
            let i2 = self.obs.intruder.run_from(i, w)?;
            if self.leaks(x2, i2) {
                return None;
            }
            let slot = next.entry((x2, i2)).or_insert(0);
            *slot = (*slot).max(budget - 1);
        }
        self.close(next)
    }

    fn wins(&mut self, configs: Configs, d: ObsId) -> bool {
        let key = (configs.iter().map(|(k, v)| (*k, *v)).collect::<Vec<_>>(), d);
        if let Some(&hit) = self.memo.get(&key) {
            return hit;
        }
        let result = self.wins_uncached(&configs, d);
        self.memo.insert(key, result);
        result
    }

    fn wins_uncached(&mut self, configs: &Configs, d: ObsId) -> bool {
        for gamma in self.knowledge.iter() {
            let movable = configs
                .iter()
                .any(|(&(x, _), &b)| b > 0 && self.aut.step(x, gamma).is_some());
            if !movable {
                continue;
            }
            if self.profile.defender().contains(gamma) {
                let actions = self.actions[&gamma].clone();
                let answered = actions.iter().any(|act| {
                    let w = act.output(gamma);
                    let Some(d2) = self.obs.defender.run_from(d, &w) else {
                        return false;
                    };
                    match self.advance(configs, gamma, &w) {
                        Some(next) => self.wins(next, d2),
                        None => false,
                    }
                });
                if !answered {
                    return false;
                }
            } else {
                // seen by the strategy but not editable: forced passthrough
                let w = [gamma];
                let Some(next) = self.advance(configs, gamma, &w) else {
                    return false;
                };
                let d2 = self.obs.defender.step(d, gamma).expect("self-loop");
                if !self.wins(next, d2) {
                    return false;
                }
            }
        }
        true
    }
}
