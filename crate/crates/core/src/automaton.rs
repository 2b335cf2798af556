//! Deterministic plant automata, event alphabets and natural projections.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;

use crate::error::ModelError;

/// Maximum number of distinct events in one model (alphabets are bitmasks).
pub const MAX_EVENTS: usize = 64;

/// An interned event symbol. Ordering follows declaration order in the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event(pub(crate) u8);

impl Event {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        assert!(index < MAX_EVENTS, "event index {index} out of range");
        Event(index as u8)
    }
}

/// Dense state identifier assigned at construction time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub(crate) u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn from_index(index: usize) -> Self {
        StateId(index as u32)
    }
}

/// A set of events, stored as a bitmask over event indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventSet(u64);

impl EventSet {
    pub const fn empty() -> Self {
        EventSet(0)
    }

    pub fn from_bits(bits: u64) -> Self {
        EventSet(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    /// All events with index below `n`.
    pub fn first(n: usize) -> Self {
        if n >= 64 {
            EventSet(u64::MAX)
        } else {
            EventSet((1u64 << n) - 1)
        }
    }

    pub fn contains(self, e: Event) -> bool {
        self.0 & (1u64 << e.0) != 0
    }

    pub fn insert(&mut self, e: Event) {
        self.0 |= 1u64 << e.0;
    }

    pub fn with(mut self, e: Event) -> Self {
        self.insert(e);
        self
    }

    pub fn union(self, other: Self) -> Self {
        EventSet(self.0 | other.0)
    }

    pub fn intersection(self, other: Self) -> Self {
        EventSet(self.0 & other.0)
    }

    pub fn difference(self, other: Self) -> Self {
        EventSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Events in ascending index order.
    pub fn iter(self) -> impl Iterator<Item = Event> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros();
            bits &= bits - 1;
            Some(Event(i as u8))
        })
    }
}

impl FromIterator<Event> for EventSet {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        let mut set = EventSet::empty();
        for e in iter {
            set.insert(e);
        }
        set
    }
}

impl fmt::Debug for EventSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

/// A finite event sequence; the empty trace is ε.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Trace(Vec<Event>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn new(events: Vec<Event>) -> Self {
        Trace(events)
    }

    pub fn single(e: Event) -> Self {
        Trace(vec![e])
    }

    pub fn push(&mut self, e: Event) {
        self.0.push(e);
    }

    pub fn extend_from(&mut self, other: &[Event]) {
        self.0.extend_from_slice(other);
    }

    pub fn concat(&self, other: &[Event]) -> Trace {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        Trace(v)
    }

    pub fn events(&self) -> &[Event] {
        &self.0
    }

    pub fn into_events(self) -> Vec<Event> {
        self.0
    }
}

impl Deref for Trace {
    type Target = [Event];

    fn deref(&self) -> &[Event] {
        &self.0
    }
}

impl From<Vec<Event>> for Trace {
    fn from(v: Vec<Event>) -> Self {
        Trace(v)
    }
}

impl FromIterator<Event> for Trace {
    fn from_iter<I: IntoIterator<Item = Event>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

/// Natural projection: erase every event outside `alphabet`.
pub fn project(trace: &[Event], alphabet: EventSet) -> Trace {
    trace.iter().copied().filter(|e| alphabet.contains(*e)).collect()
}

/// A sorted, duplicate-free set of plant states.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSet(Vec<StateId>);

impl StateSet {
    pub fn empty() -> Self {
        StateSet(Vec::new())
    }

    pub fn from_sorted(v: Vec<StateId>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        StateSet(v)
    }

    pub fn singleton(s: StateId) -> Self {
        StateSet(vec![s])
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[StateId] {
        &self.0
    }

    pub fn is_subset_of(&self, other: &StateSet) -> bool {
        self.0.iter().all(|s| other.contains(*s))
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let set: BTreeSet<StateId> = iter.into_iter().collect();
        StateSet(set.into_iter().collect())
    }
}

/// Deterministic automaton with a partial transition function and a secret
/// state subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAutomaton {
    state_labels: Vec<String>,
    event_names: Vec<String>,
    // delta[state][event]
    delta: Vec<Vec<Option<StateId>>>,
    initial: StateId,
    secret: Vec<bool>,
}

impl FiniteAutomaton {
    pub fn num_states(&self) -> usize {
        self.state_labels.len()
    }

    pub fn num_events(&self) -> usize {
        self.event_names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.num_states()).map(StateId::from_index)
    }

    pub fn events(&self) -> EventSet {
        EventSet::first(self.num_events())
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_secret(&self, s: StateId) -> bool {
        self.secret[s.index()]
    }

    pub fn secret_states(&self) -> StateSet {
        self.states().filter(|s| self.is_secret(*s)).collect()
    }

    /// True when every member of `set` is secret (the empty set counts).
    pub fn all_secret(&self, set: &StateSet) -> bool {
        set.iter().all(|s| self.is_secret(s))
    }

    pub fn state_label(&self, s: StateId) -> &str {
        &self.state_labels[s.index()]
    }

    pub fn event_name(&self, e: Event) -> &str {
        &self.event_names[e.index()]
    }

    pub fn state_by_label(&self, label: &str) -> Option<StateId> {
        self.state_labels
            .iter()
            .position(|l| l == label)
            .map(StateId::from_index)
    }

    pub fn event_by_name(&self, name: &str) -> Option<Event> {
        self.event_names
            .iter()
            .position(|n| n == name)
            .map(Event::from_index)
    }

    /// Single-step transition.
    pub fn step(&self, from: StateId, e: Event) -> Option<StateId> {
        self.delta[from.index()].get(e.index()).copied().flatten()
    }

    /// All defined transitions out of `from`, in event order.
    pub fn successors(&self, from: StateId) -> impl Iterator<Item = (Event, StateId)> + '_ {
        self.delta[from.index()]
            .iter()
            .enumerate()
            .filter_map(|(i, t)| t.map(|to| (Event::from_index(i), to)))
    }

    pub fn transitions(&self) -> impl Iterator<Item = (StateId, Event, StateId)> + '_ {
        self.states()
            .flat_map(move |s| self.successors(s).map(move |(e, t)| (s, e, t)))
    }

    pub fn enabled(&self, from: StateId) -> EventSet {
        self.successors(from).map(|(e, _)| e).collect()
    }

    /// State reached by consuming `trace`, or `None` if some step is undefined.
    pub fn extended_transition(&self, state: StateId, trace: &[Event]) -> Option<StateId> {
        trace.iter().try_fold(state, |s, e| self.step(s, *e))
    }

    pub fn accepts(&self, trace: &[Event]) -> bool {
        self.extended_transition(self.initial, trace).is_some()
    }

    /// Bounded enumeration of the generated language, in length-then-lexicographic
    /// order (event declaration order).
    pub fn generated_language(&self, depth: usize) -> Vec<Trace> {
        let mut out = vec![Trace::empty()];
        let mut layer = vec![(Trace::empty(), self.initial)];
        for _ in 0..depth {
            let mut next = Vec::new();
            for (t, s) in &layer {
                for (e, to) in self.successors(*s) {
                    next.push((t.concat(&[e]), to));
                }
            }
            out.extend(next.iter().map(|(t, _)| t.clone()));
            layer = next;
        }
        out
    }

    /// Traces of the generated language, of length at most `depth`, whose
    /// projection onto `alphabet` equals `observed`.
    pub fn inverse_projection_members(
        &self,
        observed: &[Event],
        alphabet: EventSet,
        depth: usize,
    ) -> Result<Vec<Trace>, ModelError> {
        if depth < observed.len() {
            return Err(ModelError::DepthTooSmall {
                depth,
                needed: observed.len(),
            });
        }
        let mut found = Vec::new();
        // (trace, state, number of observed events matched)
        let mut layer = vec![(Trace::empty(), self.initial, 0usize)];
        for len in 0..=depth {
            let mut next = Vec::new();
            for (t, s, matched) in layer {
                if matched == observed.len() {
                    found.push(t.clone());
                }
                if len == depth {
                    continue;
                }
                for (e, to) in self.successors(s) {
                    let m = if alphabet.contains(e) {
                        if matched < observed.len() && observed[matched] == e {
                            matched + 1
                        } else {
                            continue;
                        }
                    } else {
                        matched
                    };
                    next.push((t.concat(&[e]), to, m));
                }
            }
            layer = next;
        }
        Ok(found)
    }

    /// Render a trace with event names; single-character alphabets are
    /// concatenated, otherwise names are joined with `.`.
    pub fn format_trace(&self, trace: &[Event]) -> String {
        if trace.is_empty() {
            return "ε".to_string();
        }
        let sep = if self.event_names.iter().all(|n| n.chars().count() == 1) {
            ""
        } else {
            "."
        };
        trace
            .iter()
            .map(|e| self.event_name(*e))
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn format_set(&self, set: &StateSet) -> String {
        let labels: Vec<&str> = set.iter().map(|s| self.state_label(s)).collect();
        format!("{{{}}}", labels.join(","))
    }

    pub fn format_events(&self, set: EventSet) -> String {
        let names: Vec<&str> = set.iter().map(|e| self.event_name(e)).collect();
        format!("{{{}}}", names.join(","))
    }

    /// Parse a trace written as `abc`, `a.b.c` or `a b c`. `ε`, `-` and the
    /// empty string denote the empty trace.
    pub fn parse_trace(&self, text: &str) -> Result<Trace, ModelError> {
        let text = text.trim();
        if text.is_empty() || text == "ε" || text == "-" {
            return Ok(Trace::empty());
        }
        let tokens: Vec<&str> = if text.contains('.') || text.contains(char::is_whitespace) {
            text.split(|c: char| c == '.' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .collect()
        } else if self.event_by_name(text).is_some() {
            vec![text]
        } else {
            text.char_indices()
                .map(|(i, c)| &text[i..i + c.len_utf8()])
                .collect()
        };
        tokens
            .into_iter()
            .map(|t| {
                self.event_by_name(t)
                    .ok_or_else(|| ModelError::UnknownEvent(t.to_string()))
            })
            .collect()
    }
}

/// The observation alphabets: plant-observable events, intruder events and
/// defender events. Unobservable events are everything outside `observable`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ObservationProfile {
    observable: EventSet,
    intruder: EventSet,
    defender: EventSet,
}

impl ObservationProfile {
    pub fn new(
        aut: &FiniteAutomaton,
        observable: EventSet,
        intruder: EventSet,
        defender: EventSet,
    ) -> Result<Self, ModelError> {
        if !observable.is_subset(aut.events()) {
            return Err(ModelError::Profile("observable events not in the automaton"));
        }
        if !intruder.is_subset(observable) {
            return Err(ModelError::Profile("intruder events must be observable"));
        }
        if !defender.is_subset(observable) {
            return Err(ModelError::Profile("defender events must be observable"));
        }
        Ok(ObservationProfile {
            observable,
            intruder,
            defender,
        })
    }

    pub fn observable(&self) -> EventSet {
        self.observable
    }

    pub fn intruder(&self) -> EventSet {
        self.intruder
    }

    pub fn defender(&self) -> EventSet {
        self.defender
    }

    pub fn unobservable(&self, aut: &FiniteAutomaton) -> EventSet {
        aut.events().difference(self.observable)
    }

    /// Neither alphabet contains the other.
    pub fn is_incomparable(&self) -> bool {
        !self.intruder.is_subset(self.defender) && !self.defender.is_subset(self.intruder)
    }
}

/// A plant together with its observation profile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemModel {
    pub automaton: FiniteAutomaton,
    pub profile: ObservationProfile,
}

/// Incremental constructor for [`FiniteAutomaton`].
#[derive(Debug, Default, Clone)]
pub struct AutomatonBuilder {
    state_labels: Vec<String>,
    state_index: HashMap<String, StateId>,
    event_names: Vec<String>,
    event_index: HashMap<String, Event>,
    transitions: Vec<(StateId, Event, StateId)>,
    initial: Option<StateId>,
    secret: Vec<StateId>,
}

impl AutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn state(&mut self, label: &str) -> Result<StateId, ModelError> {
        validate_symbol(label)?;
        if let Some(&s) = self.state_index.get(label) {
            return Err(ModelError::DuplicateState(self.state_labels[s.index()].clone()));
        }
        let id = StateId::from_index(self.state_labels.len());
        self.state_labels.push(label.to_string());
        self.state_index.insert(label.to_string(), id);
        Ok(id)
    }

    pub fn event(&mut self, name: &str) -> Result<Event, ModelError> {
        validate_symbol(name)?;
        if name.contains('.') || name == "-" || name == "/" || name == "ε" {
            return Err(ModelError::BadSymbol(name.to_string()));
        }
        if self.event_index.contains_key(name) {
            return Err(ModelError::DuplicateEvent(name.to_string()));
        }
        if self.event_names.len() == MAX_EVENTS {
            return Err(ModelError::TooManyEvents);
        }
        let id = Event::from_index(self.event_names.len());
        self.event_names.push(name.to_string());
        self.event_index.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn state_id(&self, label: &str) -> Option<StateId> {
        self.state_index.get(label).copied()
    }

    pub fn event_id(&self, name: &str) -> Option<Event> {
        self.event_index.get(name).copied()
    }

    pub fn num_states(&self) -> usize {
        self.state_labels.len()
    }

    pub fn transition(&mut self, from: StateId, e: Event, to: StateId) -> Result<(), ModelError> {
        if let Some(&(_, _, prev)) = self
            .transitions
            .iter()
            .find(|(f, ev, _)| *f == from && *ev == e)
        {
            return Err(ModelError::Nondeterministic {
                state: self.state_labels[from.index()].clone(),
                event: self.event_names[e.index()].clone(),
                first: self.state_labels[prev.index()].clone(),
            });
        }
        self.transitions.push((from, e, to));
        Ok(())
    }

    pub fn initial(&mut self, s: StateId) {
        self.initial = Some(s);
    }

    pub fn secret(&mut self, s: StateId) {
        if !self.secret.contains(&s) {
            self.secret.push(s);
        }
    }

    pub fn build(self) -> Result<FiniteAutomaton, ModelError> {
        let initial = self.initial.ok_or(ModelError::MissingInitial)?;
        let n = self.state_labels.len();
        let m = self.event_names.len();
        let mut delta = vec![vec![None; m]; n];
        for (from, e, to) in self.transitions {
            delta[from.index()][e.index()] = Some(to);
        }
        let mut secret = vec![false; n];
        for s in self.secret {
            secret[s.index()] = true;
        }
        Ok(FiniteAutomaton {
            state_labels: self.state_labels,
            event_names: self.event_names,
            delta,
            initial,
            secret,
        })
    }
}

fn validate_symbol(sym: &str) -> Result<(), ModelError> {
    if sym.is_empty() || sym.chars().any(|c| c.is_whitespace() || c.is_control()) || sym.starts_with('#') {
        return Err(ModelError::BadSymbol(sym.to_string()));
    }
    Ok(())
}
