//! The edit game: a bipartite arena in which the plant plays observable
//! events and the defender answers each with an edit action.
//!
//! Information states hold the system, intruder and defender estimates as
//! observer-state indices. Augmented states additionally carry the pending
//! system event that the defender has to answer.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::automaton::{Event, EventSet, FiniteAutomaton, ObservationProfile, Trace};
use crate::observer::{ObsId, Observers};

/// One defender response to an observed event.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EditAction {
    /// Emit the event unchanged.
    Passthrough,
    /// Erase the event.
    Delete,
    /// Emit another defender event instead.
    Substitute(Event),
    /// Emit a nonempty defender-event prefix, then the event itself.
    Insert(Trace),
}

impl EditAction {
    fn rank(&self) -> u8 {
        match self {
            EditAction::Passthrough => 0,
            EditAction::Delete => 1,
            EditAction::Substitute(_) => 2,
            EditAction::Insert(_) => 3,
        }
    }

    /// The word actually emitted when answering `original`.
    pub fn output(&self, original: Event) -> Trace {
        match self {
            EditAction::Passthrough => Trace::single(original),
            EditAction::Delete => Trace::empty(),
            EditAction::Substitute(e) => Trace::single(*e),
            EditAction::Insert(prefix) => prefix.concat(&[original]),
        }
    }

    pub fn is_passthrough(&self) -> bool {
        matches!(self, EditAction::Passthrough)
    }

    /// Arrow notation: `b→b`, `b→c`, `b→ε`, `+d·b`.
    pub fn label(&self, original: Event, aut: &FiniteAutomaton) -> String {
        let o = aut.event_name(original);
        match self {
            EditAction::Passthrough => format!("{o}→{o}"),
            EditAction::Delete => format!("{o}→ε"),
            EditAction::Substitute(e) => format!("{o}→{}", aut.event_name(*e)),
            EditAction::Insert(prefix) => {
                let p: Vec<&str> = prefix.iter().map(|e| aut.event_name(*e)).collect();
                format!("+{}·{o}", p.join("·"))
            }
        }
    }
}

impl PartialOrd for EditAction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// passthrough < delete < substitutions (event order) < insertions (length-lex)
impl Ord for EditAction {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (EditAction::Substitute(a), EditAction::Substitute(b)) => a.cmp(b),
            (EditAction::Insert(a), EditAction::Insert(b)) => {
                a.len().cmp(&b.len()).then_with(|| a.cmp(b))
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

/// Which edit operations the defender may use, and the insertion bound K.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionSpace {
    pub substitute: bool,
    pub delete: bool,
    pub insert: bool,
    pub max_insert: usize,
}

impl ActionSpace {
    /// Every operation, insertions of length up to `max_insert`.
    pub fn full(max_insert: usize) -> Self {
        ActionSpace {
            substitute: true,
            delete: true,
            insert: true,
            max_insert,
        }
    }

    pub fn substitution_only() -> Self {
        ActionSpace {
            substitute: true,
            delete: false,
            insert: false,
            max_insert: 0,
        }
    }

    /// Longest word a single action can emit.
    pub fn max_output_len(&self) -> usize {
        if self.insert {
            self.max_insert + 1
        } else {
            1
        }
    }
}

impl Default for ActionSpace {
    fn default() -> Self {
        ActionSpace::full(1)
    }
}

/// Candidate defender responses to `pending`, in canonical order.
pub fn enumerate_actions(
    pending: Event,
    profile: &ObservationProfile,
    space: &ActionSpace,
) -> Vec<EditAction> {
    let ed = profile.defender();
    let mut out = vec![EditAction::Passthrough];
    if !ed.contains(pending) {
        return out;
    }
    if space.delete {
        out.push(EditAction::Delete);
    }
    if space.substitute {
        out.extend(
            ed.iter()
                .filter(|e| *e != pending)
                .map(EditAction::Substitute),
        );
    }
    if space.insert {
        let mut layer = vec![Trace::empty()];
        for _ in 0..space.max_insert {
            let mut next = Vec::new();
            for w in &layer {
                for e in ed.iter() {
                    next.push(w.concat(&[e]));
                }
            }
            out.extend(next.iter().cloned().map(EditAction::Insert));
            layer = next;
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AId(pub(crate) u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FId(pub(crate) u32);

impl AId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl FId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// System, intruder and defender estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InfoState {
    pub sys: ObsId,
    pub intr: ObsId,
    pub def: ObsId,
}

/// An information state whose system estimate already moved on `pending`,
/// waiting for the defender's answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AugmentedState {
    pub info: InfoState,
    pub pending: Event,
}

/// Result of a defender move: the intruder and defender observers both have
/// to accept the emitted word, otherwise the move does not exist.
pub fn apply_defender_move(
    v: &AugmentedState,
    action: &EditAction,
    observers: &Observers,
) -> Option<InfoState> {
    let word = action.output(v.pending);
    let intr = observers.intruder.run_from(v.info.intr, &word)?;
    let def = observers.defender.run_from(v.info.def, &word)?;
    Some(InfoState {
        sys: v.info.sys,
        intr,
        def,
    })
}

/// Utility of an information state: 0 when both the true estimate and the
/// intruder's estimate are contained in the secret set.
pub fn info_utility(info: &InfoState, aut: &FiniteAutomaton, observers: &Observers) -> u8 {
    let sys = observers.system.state(info.sys);
    let intr = observers.intruder.state(info.intr);
    if aut.all_secret(sys) && aut.all_secret(intr) {
        0
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditGameStructure {
    a_states: Vec<InfoState>,
    a_index: HashMap<InfoState, AId>,
    f_states: Vec<AugmentedState>,
    f_index: HashMap<AugmentedState, FId>,
    sys_moves: Vec<Vec<(Event, FId)>>,
    def_moves: Vec<Vec<(EditAction, AId)>>,
    a_utility: Vec<u8>,
    initial: AId,
}

impl EditGameStructure {
    pub fn initial(&self) -> AId {
        self.initial
    }

    pub fn num_a(&self) -> usize {
        self.a_states.len()
    }

    pub fn num_f(&self) -> usize {
        self.f_states.len()
    }

    pub fn a_ids(&self) -> impl Iterator<Item = AId> {
        (0..self.a_states.len() as u32).map(AId)
    }

    pub fn f_ids(&self) -> impl Iterator<Item = FId> {
        (0..self.f_states.len() as u32).map(FId)
    }

    pub fn info(&self, a: AId) -> &InfoState {
        &self.a_states[a.index()]
    }

    pub fn augmented(&self, f: FId) -> &AugmentedState {
        &self.f_states[f.index()]
    }

    pub fn find_a(&self, info: &InfoState) -> Option<AId> {
        self.a_index.get(info).copied()
    }

    pub fn find_f(&self, v: &AugmentedState) -> Option<FId> {
        self.f_index.get(v).copied()
    }

    /// Plant moves out of an information state, in event order.
    pub fn sys_moves(&self, a: AId) -> &[(Event, FId)] {
        &self.sys_moves[a.index()]
    }

    pub fn sys_move(&self, a: AId, e: Event) -> Option<FId> {
        self.sys_moves[a.index()]
            .iter()
            .find(|(ev, _)| *ev == e)
            .map(|(_, f)| *f)
    }

    /// Defined defender moves out of an augmented state, in action order.
    pub fn def_moves(&self, f: FId) -> &[(EditAction, AId)] {
        &self.def_moves[f.index()]
    }

    pub fn def_move(&self, f: FId, action: &EditAction) -> Option<AId> {
        self.def_moves[f.index()]
            .iter()
            .find(|(act, _)| act == action)
            .map(|(_, a)| *a)
    }

    pub fn utility_a(&self, a: AId) -> u8 {
        self.a_utility[a.index()]
    }

    /// 0 exactly when no edit action is defined.
    pub fn utility_f(&self, f: FId) -> u8 {
        if self.def_moves[f.index()].is_empty() {
            0
        } else {
            1
        }
    }

    pub fn num_sys_edges(&self) -> usize {
        self.sys_moves.iter().map(Vec::len).sum()
    }

    pub fn num_def_edges(&self) -> usize {
        self.def_moves.iter().map(Vec::len).sum()
    }

    /// Accessible sub-structure that keeps only the listed states and the
    /// defender moves accepted by `enabled`. States are renumbered in the
    /// same traversal order as the original construction, so restricting
    /// with everything enabled reproduces `self` exactly.
    pub(crate) fn restrict(
        &self,
        keep_a: &[bool],
        keep_f: &[bool],
        enabled: impl Fn(FId, &EditAction) -> bool,
    ) -> Option<EditGameStructure> {
        if !keep_a[self.initial.index()] {
            return None;
        }
        let mut builder = Builder::default();
        let mut a_map: HashMap<AId, AId> = HashMap::new();
        let mut order = vec![self.initial];
        a_map.insert(self.initial, builder.intern_a(self.a_states[self.initial.index()], self.a_utility[self.initial.index()]).0);
        let mut next = 0;
        while next < order.len() {
            let old_a = order[next];
            let new_a = a_map[&old_a];
            let mut moves = Vec::new();
            for (e, old_f) in self.sys_moves(old_a) {
                if !keep_f[old_f.index()] {
                    continue;
                }
                let (new_f, fresh) = builder.intern_f(self.f_states[old_f.index()]);
                if fresh {
                    let mut answers = Vec::new();
                    for (act, old_t) in self.def_moves(*old_f) {
                        if !keep_a[old_t.index()] || !enabled(*old_f, act) {
                            continue;
                        }
                        let (new_t, fresh_t) = builder
                            .intern_a(self.a_states[old_t.index()], self.a_utility[old_t.index()]);
                        if fresh_t {
                            a_map.insert(*old_t, new_t);
                            order.push(*old_t);
                        }
                        answers.push((act.clone(), new_t));
                    }
                    builder.def_moves[new_f.index()] = answers;
                }
                moves.push((*e, new_f));
            }
            builder.sys_moves[new_a.index()] = moves;
            next += 1;
        }
        Some(builder.finish(AId(0)))
    }
}

#[derive(Default)]
struct Builder {
    a_states: Vec<InfoState>,
    a_index: HashMap<InfoState, AId>,
    f_states: Vec<AugmentedState>,
    f_index: HashMap<AugmentedState, FId>,
    sys_moves: Vec<Vec<(Event, FId)>>,
    def_moves: Vec<Vec<(EditAction, AId)>>,
    a_utility: Vec<u8>,
}

impl Builder {
    fn intern_a(&mut self, info: InfoState, utility: u8) -> (AId, bool) {
        if let Some(&id) = self.a_index.get(&info) {
            return (id, false);
        }
        let id = AId(self.a_states.len() as u32);
        self.a_states.push(info);
        self.a_index.insert(info, id);
        self.sys_moves.push(Vec::new());
        self.a_utility.push(utility);
        (id, true)
    }

    fn intern_f(&mut self, v: AugmentedState) -> (FId, bool) {
        if let Some(&id) = self.f_index.get(&v) {
            return (id, false);
        }
        let id = FId(self.f_states.len() as u32);
        self.f_states.push(v);
        self.f_index.insert(v, id);
        self.def_moves.push(Vec::new());
        (id, true)
    }

    fn finish(self, initial: AId) -> EditGameStructure {
        EditGameStructure {
            a_states: self.a_states,
            a_index: self.a_index,
            f_states: self.f_states,
            f_index: self.f_index,
            sys_moves: self.sys_moves,
            def_moves: self.def_moves,
            a_utility: self.a_utility,
            initial,
        }
    }
}

/// Accessible edit game structure, with utilities labeled during
/// construction.
pub fn build_edit_game(
    aut: &FiniteAutomaton,
    profile: &ObservationProfile,
    observers: &Observers,
    space: &ActionSpace,
) -> EditGameStructure {
    let eo: EventSet = profile.observable();
    let mut b = Builder::default();
    let init = InfoState {
        sys: observers.system.initial(),
        intr: observers.intruder.initial(),
        def: observers.defender.initial(),
    };
    b.intern_a(init, info_utility(&init, aut, observers));
    let mut actions_cache: HashMap<Event, Vec<EditAction>> = HashMap::new();
    let mut next = 0;
    while next < b.a_states.len() {
        let info = b.a_states[next];
        let mut moves = Vec::new();
        for alpha in eo.iter() {
            let Some(sys) = observers.system.step(info.sys, alpha) else {
                continue;
            };
            let v = AugmentedState {
                info: InfoState { sys, ..info },
                pending: alpha,
            };
            let (f, fresh) = b.intern_f(v);
            if fresh {
                let actions = actions_cache
                    .entry(alpha)
                    .or_insert_with(|| enumerate_actions(alpha, profile, space));
                let mut answers = Vec::new();
                for act in actions.iter() {
                    if let Some(target) = apply_defender_move(&v, act, observers) {
                        let u = info_utility(&target, aut, observers);
                        let (t, _) = b.intern_a(target, u);
                        answers.push((act.clone(), t));
                    }
                }
                b.def_moves[f.index()] = answers;
            }
            moves.push((alpha, f));
        }
        b.sys_moves[next] = moves;
        next += 1;
    }
    b.finish(AId(0))
}
