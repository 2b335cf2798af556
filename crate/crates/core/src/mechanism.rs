//! Merging the trimmed game under the defender's view, the refinement that
//! keeps only actions defined at every merged member, and extraction of a
//! Mealy edit function.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::automaton::{Event, EventSet, FiniteAutomaton, Trace};
use crate::error::ParseError;
use crate::game::{AId, EditAction, EditGameStructure, FId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UaId(pub(crate) u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UfId(pub(crate) u32);

impl UaId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl UfId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Augmented states the defender cannot tell apart after observing
/// `observed`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MergedFState {
    pub members: Vec<FId>,
    pub observed: Event,
}

/// A defender move out of a merged augmented state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MechanismMove {
    pub action: EditAction,
    pub target: UaId,
    /// Whether the action is defined at every member of the source.
    pub total: bool,
}

/// Merged game over defender observations. `build_uem` yields the
/// no-guarantees mechanism; `refine_to_em` keeps only total moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditMechanism {
    ua_states: Vec<Vec<AId>>,
    ua_index: HashMap<Vec<AId>, UaId>,
    uf_states: Vec<MergedFState>,
    uf_index: HashMap<MergedFState, UfId>,
    moves_in: Vec<Vec<(Event, UfId)>>,
    moves_out: Vec<Vec<MechanismMove>>,
    initial: UaId,
}

impl EditMechanism {
    pub fn initial(&self) -> UaId {
        self.initial
    }

    pub fn num_ua(&self) -> usize {
        self.ua_states.len()
    }

    pub fn num_uf(&self) -> usize {
        self.uf_states.len()
    }

    pub fn ua_ids(&self) -> impl Iterator<Item = UaId> {
        (0..self.ua_states.len() as u32).map(UaId)
    }

    pub fn uf_ids(&self) -> impl Iterator<Item = UfId> {
        (0..self.uf_states.len() as u32).map(UfId)
    }

    /// Members of a merged information state, sorted by game id.
    pub fn ua_members(&self, q: UaId) -> &[AId] {
        &self.ua_states[q.index()]
    }

    pub fn uf(&self, u: UfId) -> &MergedFState {
        &self.uf_states[u.index()]
    }

    pub fn find_ua(&self, members: &[AId]) -> Option<UaId> {
        self.ua_index.get(members).copied()
    }

    pub fn moves_in(&self, q: UaId) -> &[(Event, UfId)] {
        &self.moves_in[q.index()]
    }

    pub fn move_in(&self, q: UaId, gamma: Event) -> Option<UfId> {
        self.moves_in[q.index()]
            .iter()
            .find(|(e, _)| *e == gamma)
            .map(|(_, u)| *u)
    }

    pub fn moves_out(&self, u: UfId) -> &[MechanismMove] {
        &self.moves_out[u.index()]
    }

    pub fn move_out(&self, u: UfId, action: &EditAction) -> Option<&MechanismMove> {
        self.moves_out[u.index()].iter().find(|m| &m.action == action)
    }

    pub fn num_edges(&self) -> usize {
        self.moves_in.iter().map(Vec::len).sum::<usize>()
            + self.moves_out.iter().map(Vec::len).sum::<usize>()
    }

    /// Accessible part keeping the listed merged states and the moves
    /// accepted by `enabled`, renumbered in traversal order.
    fn restrict(
        &self,
        keep_ua: &[bool],
        keep_uf: &[bool],
        enabled: impl Fn(UfId, &MechanismMove) -> bool,
    ) -> Option<EditMechanism> {
        if !keep_ua[self.initial.index()] {
            return None;
        }
        let mut b = MechBuilder::default();
        let mut ua_map: HashMap<UaId, UaId> = HashMap::new();
        let mut order = vec![self.initial];
        ua_map.insert(self.initial, b.intern_ua(self.ua_states[self.initial.index()].clone()).0);
        let mut next = 0;
        while next < order.len() {
            let old = order[next];
            let new = ua_map[&old];
            let mut ins = Vec::new();
            for (gamma, old_u) in self.moves_in(old) {
                if !keep_uf[old_u.index()] {
                    continue;
                }
                let (new_u, fresh) = b.intern_uf(self.uf_states[old_u.index()].clone());
                if fresh {
                    let mut outs = Vec::new();
                    for m in self.moves_out(*old_u) {
                        if !keep_ua[m.target.index()] || !enabled(*old_u, m) {
                            continue;
                        }
                        let (t, fresh_t) = b.intern_ua(self.ua_states[m.target.index()].clone());
                        if fresh_t {
                            ua_map.insert(m.target, t);
                            order.push(m.target);
                        }
                        outs.push(MechanismMove {
                            action: m.action.clone(),
                            target: t,
                            total: m.total,
                        });
                    }
                    b.moves_out[new_u.index()] = outs;
                }
                ins.push((*gamma, new_u));
            }
            b.moves_in[new.index()] = ins;
            next += 1;
        }
        Some(b.finish())
    }
}

#[derive(Default)]
struct MechBuilder {
    ua_states: Vec<Vec<AId>>,
    ua_index: HashMap<Vec<AId>, UaId>,
    uf_states: Vec<MergedFState>,
    uf_index: HashMap<MergedFState, UfId>,
    moves_in: Vec<Vec<(Event, UfId)>>,
    moves_out: Vec<Vec<MechanismMove>>,
}

impl MechBuilder {
    fn intern_ua(&mut self, members: Vec<AId>) -> (UaId, bool) {
        if let Some(&id) = self.ua_index.get(&members) {
            return (id, false);
        }
        let id = UaId(self.ua_states.len() as u32);
        self.ua_index.insert(members.clone(), id);
        self.ua_states.push(members);
        self.moves_in.push(Vec::new());
        (id, true)
    }

    fn intern_uf(&mut self, state: MergedFState) -> (UfId, bool) {
        if let Some(&id) = self.uf_index.get(&state) {
            return (id, false);
        }
        let id = UfId(self.uf_states.len() as u32);
        self.uf_index.insert(state.clone(), id);
        self.uf_states.push(state);
        self.moves_out.push(Vec::new());
        (id, true)
    }

    fn finish(self) -> EditMechanism {
        EditMechanism {
            ua_states: self.ua_states,
            ua_index: self.ua_index,
            uf_states: self.uf_states,
            uf_index: self.uf_index,
            moves_in: self.moves_in,
            moves_out: self.moves_out,
            initial: UaId(0),
        }
    }
}

/// Close a set of information states under plant moves the defender cannot
/// see, each followed by its forced passthrough. Returns a sorted set.
pub fn unobservable_closure(
    tgs: &EditGameStructure,
    from: impl IntoIterator<Item = AId>,
    defender: EventSet,
) -> Vec<AId> {
    let mut seen = vec![false; tgs.num_a()];
    let mut queue: VecDeque<AId> = VecDeque::new();
    for a in from {
        if !seen[a.index()] {
            seen[a.index()] = true;
            queue.push_back(a);
        }
    }
    while let Some(a) = queue.pop_front() {
        for (e, f) in tgs.sys_moves(a) {
            if defender.contains(*e) {
                continue;
            }
            for (_, t) in tgs.def_moves(*f) {
                if !seen[t.index()] {
                    seen[t.index()] = true;
                    queue.push_back(*t);
                }
            }
        }
    }
    seen.iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| AId(i as u32))
        .collect()
}

/// Merge the trimmed game over defender observations. Members lacking an
/// action are skipped; such moves are recorded with `total == false`.
pub fn build_uem(tgs: &EditGameStructure, defender: EventSet) -> EditMechanism {
    let mut b = MechBuilder::default();
    b.intern_ua(unobservable_closure(tgs, [tgs.initial()], defender));
    let mut next_ua = 0;
    while next_ua < b.ua_states.len() {
        let members = b.ua_states[next_ua].clone();
        let mut ins = Vec::new();
        for gamma in defender.iter() {
            let mut fs: Vec<FId> = members
                .iter()
                .filter_map(|a| tgs.sys_move(*a, gamma))
                .collect();
            if fs.is_empty() {
                continue;
            }
            fs.sort();
            fs.dedup();
            let (u, fresh) = b.intern_uf(MergedFState {
                members: fs.clone(),
                observed: gamma,
            });
            if fresh {
                let mut actions: Vec<&EditAction> = fs
                    .iter()
                    .flat_map(|f| tgs.def_moves(*f).iter().map(|(act, _)| act))
                    .collect();
                actions.sort();
                actions.dedup();
                let mut outs = Vec::new();
                for act in actions {
                    let targets: Vec<AId> = fs.iter().filter_map(|f| tgs.def_move(*f, act)).collect();
                    let total = targets.len() == fs.len();
                    let (t, _) = b.intern_ua(unobservable_closure(tgs, targets, defender));
                    outs.push(MechanismMove {
                        action: act.clone(),
                        target: t,
                        total,
                    });
                }
                b.moves_out[u.index()] = outs;
            }
            ins.push((gamma, u));
        }
        b.moves_in[next_ua] = ins;
        next_ua += 1;
    }
    b.finish()
}

/// Drop every move that is undefined at some member, then prune merged
/// states until every information state can answer every observation.
/// Returns `None` when the initial state does not survive.
pub fn refine_to_em(uem: &EditMechanism) -> Option<EditMechanism> {
    let mut bad_ua = vec![false; uem.num_ua()];
    let mut bad_uf = vec![false; uem.num_uf()];
    loop {
        let mut changed = false;
        for u in uem.uf_ids() {
            if !bad_uf[u.index()]
                && uem
                    .moves_out(u)
                    .iter()
                    .all(|m| !m.total || bad_ua[m.target.index()])
            {
                bad_uf[u.index()] = true;
                changed = true;
            }
        }
        for q in uem.ua_ids() {
            if !bad_ua[q.index()] && uem.moves_in(q).iter().any(|(_, u)| bad_uf[u.index()]) {
                bad_ua[q.index()] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let keep_ua: Vec<bool> = bad_ua.iter().map(|b| !b).collect();
    let keep_uf: Vec<bool> = bad_uf.iter().map(|b| !b).collect();
    uem.restrict(&keep_ua, &keep_uf, |_, m| m.total)
}

/// Rule for picking one action per merged augmented state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Policy {
    /// Least action in canonical order, so passthrough whenever possible.
    #[default]
    PassthroughFirst,
    /// Least non-passthrough action, passthrough only as a last resort.
    EditFirst,
    /// Greatest action in canonical order.
    Last,
    /// Uniform choice from a seeded generator, in traversal order.
    Seeded(u64),
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Policy::PassthroughFirst => write!(f, "passthrough-first"),
            Policy::EditFirst => write!(f, "edit-first"),
            Policy::Last => write!(f, "last"),
            Policy::Seeded(s) => write!(f, "seeded:{s}"),
        }
    }
}

impl FromStr for Policy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "passthrough-first" => Ok(Policy::PassthroughFirst),
            "edit-first" => Ok(Policy::EditFirst),
            "last" => Ok(Policy::Last),
            _ => match s.strip_prefix("seeded:") {
                Some(n) => n
                    .parse()
                    .map(Policy::Seeded)
                    .map_err(|_| format!("bad seed in policy `{s}`")),
                None => Err(format!(
                    "unknown policy `{s}` (expected passthrough-first, edit-first, last or seeded:N)"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SynthesisError {
    #[error("merged state {0} has no action defined at all of its members")]
    NoAction(usize),
}

/// Deterministic transducer from defender observations to emitted words.
/// Events outside `inputs` are not consumed and pass through unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyEditFunction {
    state_names: Vec<String>,
    initial: usize,
    inputs: EventSet,
    edges: BTreeMap<(usize, Event), (Trace, usize)>,
    policy: String,
}

impl MealyEditFunction {
    pub fn new(num_states: usize, initial: usize, inputs: EventSet, policy: impl Into<String>) -> Self {
        MealyEditFunction {
            state_names: (0..num_states).map(|i| format!("q{i}")).collect(),
            initial,
            inputs,
            edges: BTreeMap::new(),
            policy: policy.into(),
        }
    }

    /// Add or replace the edge out of `state` on `input`.
    pub fn set_edge(&mut self, state: usize, input: Event, output: Trace, next: usize) {
        assert!(state < self.state_names.len() && next < self.state_names.len());
        assert!(self.inputs.contains(input), "edge input outside the transducer alphabet");
        self.edges.insert((state, input), (output, next));
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_name(&self, q: usize) -> &str {
        &self.state_names[q]
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn inputs(&self) -> EventSet {
        self.inputs
    }

    pub fn policy(&self) -> &str {
        &self.policy
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, Event, &Trace, usize)> {
        self.edges.iter().map(|((q, e), (w, n))| (*q, *e, w, *n))
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// One observed event: consumed inputs follow an edge, anything else is
    /// echoed without a state change. `None` means the transducer is stuck.
    pub fn step(&self, state: usize, e: Event) -> Option<(Trace, usize)> {
        if !self.inputs.contains(e) {
            return Some((Trace::single(e), state));
        }
        self.edges.get(&(state, e)).map(|(w, n)| (w.clone(), *n))
    }

    /// Emitted word for a whole observed string.
    pub fn run(&self, observed: &[Event]) -> Option<Trace> {
        let mut q = self.initial;
        let mut out = Trace::empty();
        for e in observed {
            let (w, n) = self.step(q, *e)?;
            out.extend_from(&w);
            q = n;
        }
        Some(out)
    }

    /// State reached after an observed string.
    pub fn state_after(&self, observed: &[Event]) -> Option<usize> {
        observed
            .iter()
            .try_fold(self.initial, |q, e| self.step(q, *e).map(|(_, n)| n))
    }

    pub fn to_text(&self, aut: &FiniteAutomaton) -> String {
        let names = |w: &[Event]| -> String {
            if w.is_empty() {
                "-".to_string()
            } else {
                w.iter().map(|e| aut.event_name(*e)).collect::<Vec<_>>().join(".")
            }
        };
        let mut out = String::new();
        writeln!(out, "policy {}", self.policy).unwrap();
        let inputs: Vec<&str> = self.inputs.iter().map(|e| aut.event_name(e)).collect();
        writeln!(out, "inputs {}", inputs.join(" ")).unwrap();
        writeln!(out, "states {}", self.state_names.join(" ")).unwrap();
        writeln!(out, "initial {}", self.state_names[self.initial]).unwrap();
        for ((q, e), (w, n)) in &self.edges {
            writeln!(
                out,
                "{} {} / {} {}",
                self.state_names[*q],
                aut.event_name(*e),
                names(w),
                self.state_names[*n]
            )
            .unwrap();
        }
        out
    }

    /// Read the format written by [`MealyEditFunction::to_text`]; event
    /// names are resolved against `aut`.
    pub fn parse(text: &str, aut: &FiniteAutomaton) -> Result<Self, ParseError> {
        let mut policy = None;
        let mut inputs = None;
        let mut names: Option<Vec<String>> = None;
        let mut initial = None;
        let mut edges = BTreeMap::new();
        let event = |n: &str, line: usize| {
            aut.event_by_name(n)
                .ok_or_else(|| ParseError::new(line, format!("unknown event `{n}`")))
        };
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let tokens: Vec<&str> = body.split_whitespace().collect();
            let state = |n: &str, names: &Option<Vec<String>>| -> Result<usize, ParseError> {
                let Some(names) = names else {
                    return Err(ParseError::new(line, "`states` must come before use"));
                };
                names
                    .iter()
                    .position(|s| s == n)
                    .ok_or_else(|| ParseError::new(line, format!("undeclared state `{n}`")))
            };
            match tokens[0] {
                "policy" if tokens.len() == 2 => policy = Some(tokens[1].to_string()),
                "inputs" => {
                    let mut set = EventSet::empty();
                    for n in &tokens[1..] {
                        set.insert(event(n, line)?);
                    }
                    inputs = Some(set);
                }
                "states" => {
                    let list: Vec<String> = tokens[1..].iter().map(|s| s.to_string()).collect();
                    for (j, n) in list.iter().enumerate() {
                        if list[..j].contains(n) {
                            return Err(ParseError::new(line, format!("state `{n}` declared twice")));
                        }
                    }
                    names = Some(list);
                }
                "initial" if tokens.len() == 2 => initial = Some(state(tokens[1], &names)?),
                _ if tokens.len() == 5 && tokens[2] == "/" => {
                    let q = state(tokens[0], &names)?;
                    let e = event(tokens[1], line)?;
                    if !inputs.is_some_and(|s: EventSet| s.contains(e)) {
                        return Err(ParseError::new(line, format!("`{}` is not an input", tokens[1])));
                    }
                    let w: Trace = if tokens[3] == "-" {
                        Trace::empty()
                    } else {
                        tokens[3]
                            .split('.')
                            .map(|n| event(n, line))
                            .collect::<Result<_, _>>()?
                    };
                    let n = state(tokens[4], &names)?;
                    if edges.insert((q, e), (w, n)).is_some() {
                        return Err(ParseError::new(line, "duplicate edge"));
                    }
                }
                _ => return Err(ParseError::new(line, format!("cannot parse `{body}`"))),
            }
        }
        let last = text.lines().count().max(1);
        let missing = |what: &str| ParseError::new(last, format!("missing `{what}` line"));
        Ok(MealyEditFunction {
            state_names: names.ok_or_else(|| missing("states"))?,
            initial: initial.ok_or_else(|| missing("initial"))?,
            inputs: inputs.ok_or_else(|| missing("inputs"))?,
            edges,
            policy: policy.ok_or_else(|| missing("policy"))?,
        })
    }
}

/// A synthesized transducer together with the mechanism state behind each
/// transducer state.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub transducer: MealyEditFunction,
    pub origin: Vec<UaId>,
}

/// Pick one total action per reachable merged augmented state and read off
/// a transducer. Transducer states are the merged information states
/// reached under the chosen actions, numbered in traversal order.
pub fn synthesize(
    em: &EditMechanism,
    defender: EventSet,
    policy: Policy,
) -> Result<Synthesis, SynthesisError> {
    let mut rng = match policy {
        Policy::Seeded(s) => Some(ChaCha8Rng::seed_from_u64(s)),
        _ => None,
    };
    let mut chosen: HashMap<UfId, (EditAction, UaId)> = HashMap::new();
    let mut origin = vec![em.initial()];
    let mut number: HashMap<UaId, usize> = HashMap::from([(em.initial(), 0)]);
    let mut edges = Vec::new();
    let mut next = 0;
    while next < origin.len() {
        let q = origin[next];
        for (gamma, u) in em.moves_in(q) {
            let (act, target) = match chosen.get(u) {
                Some(c) => c.clone(),
                None => {
                    let total: Vec<&MechanismMove> =
                        em.moves_out(*u).iter().filter(|m| m.total).collect();
                    let pick = match policy {
                        Policy::PassthroughFirst => total.first().copied(),
                        Policy::EditFirst => total
                            .iter()
                            .find(|m| !m.action.is_passthrough())
                            .or(total.first())
                            .copied(),
                        Policy::Last => total.last().copied(),
                        Policy::Seeded(_) => total.choose(rng.as_mut().unwrap()).copied(),
                    };
                    let m = pick.ok_or(SynthesisError::NoAction(u.index()))?;
                    let c = (m.action.clone(), m.target);
                    chosen.insert(*u, c.clone());
                    c
                }
            };
            let n = *number.entry(target).or_insert_with(|| {
                origin.push(target);
                origin.len() - 1
            });
            edges.push((next, *gamma, act.output(*gamma), n));
        }
        next += 1;
    }
    let mut fe = MealyEditFunction::new(origin.len(), 0, defender, policy.to_string());
    for (q, e, w, n) in edges {
        fe.set_edge(q, e, w, n);
    }
    Ok(Synthesis {
        transducer: fe,
        origin,
    })
}
