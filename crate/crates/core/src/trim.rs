//! Pruning of the edit game as a supervisory-control-without-blocking
//! fixpoint. Plant moves are uncontrollable; the only lever is disabling
//! defender actions.

use std::collections::VecDeque;

use crate::game::{EditAction, EditGameStructure, FId};

/// A defender action removed because it leads into a problematic state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisabledAction {
    pub at: FId,
    pub action: EditAction,
    /// Target information state in the untrimmed game.
    pub target: crate::game::InfoState,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TrimStats {
    pub pruned_a: usize,
    pub pruned_f: usize,
    /// Worklist pops, or full sweeps for the naive variant.
    pub rounds: usize,
}

/// The accessible, non-problematic part of an edit game. Every augmented
/// state keeps its enabled actions as outgoing defender moves.
#[derive(Debug, Clone)]
pub struct TrimmedGameStructure {
    game: EditGameStructure,
    disabled: Vec<DisabledAction>,
    stats: TrimStats,
}

impl PartialEq for TrimmedGameStructure {
    fn eq(&self, other: &Self) -> bool {
        self.game == other.game && self.disabled == other.disabled
    }
}

impl TrimmedGameStructure {
    /// The trimmed structure viewed as an edit game.
    pub fn game(&self) -> &EditGameStructure {
        &self.game
    }

    pub fn into_game(self) -> EditGameStructure {
        self.game
    }

    /// Enabled actions at an augmented state.
    pub fn control(&self, f: FId) -> impl Iterator<Item = &EditAction> {
        self.game.def_moves(f).iter().map(|(a, _)| a)
    }

    /// Actions defined in the untrimmed game but disabled here, keyed by
    /// trimmed augmented-state id.
    pub fn disabled(&self) -> &[DisabledAction] {
        &self.disabled
    }

    pub fn stats(&self) -> TrimStats {
        self.stats
    }
}

/// Worklist implementation: problematic states are propagated backwards
/// from the utility-0 seeds. Returns `None` when the initial state is pruned.
pub fn trim_game(game: &EditGameStructure) -> Option<TrimmedGameStructure> {
    let na = game.num_a();
    let nf = game.num_f();
    let mut bad_a = vec![false; na];
    let mut bad_f = vec![false; nf];
    let mut live = vec![0usize; nf];
    let mut pred_of_a: Vec<Vec<FId>> = vec![Vec::new(); na];
    let mut pred_of_f: Vec<Vec<crate::game::AId>> = vec![Vec::new(); nf];
    for f in game.f_ids() {
        live[f.index()] = game.def_moves(f).len();
        for (_, a) in game.def_moves(f) {
            pred_of_a[a.index()].push(f);
        }
    }
    for a in game.a_ids() {
        for (_, f) in game.sys_moves(a) {
            pred_of_f[f.index()].push(a);
        }
    }

    enum Node {
        A(crate::game::AId),
        F(FId),
    }
    let mut queue = VecDeque::new();
    for a in game.a_ids() {
        if game.utility_a(a) == 0 {
            bad_a[a.index()] = true;
            queue.push_back(Node::A(a));
        }
    }
    for f in game.f_ids() {
        if game.utility_f(f) == 0 {
            bad_f[f.index()] = true;
            queue.push_back(Node::F(f));
        }
    }
    let mut rounds = 0;
    while let Some(node) = queue.pop_front() {
        rounds += 1;
        match node {
            Node::A(a) => {
                // one entry per edge, so parallel actions each decrement
                for &f in &pred_of_a[a.index()] {
                    live[f.index()] -= 1;
                    if live[f.index()] == 0 && !bad_f[f.index()] {
                        bad_f[f.index()] = true;
                        queue.push_back(Node::F(f));
                    }
                }
            }
            Node::F(f) => {
                for &a in &pred_of_f[f.index()] {
                    if !bad_a[a.index()] {
                        bad_a[a.index()] = true;
                        queue.push_back(Node::A(a));
                    }
                }
            }
        }
    }
    finish(game, &bad_a, &bad_f, rounds)
}

/// Literal sweep: mark, re-scan everything, repeat until stable.
pub fn trim_game_naive(game: &EditGameStructure) -> Option<TrimmedGameStructure> {
    let mut bad_a: Vec<bool> = game.a_ids().map(|a| game.utility_a(a) == 0).collect();
    let mut bad_f: Vec<bool> = game.f_ids().map(|f| game.utility_f(f) == 0).collect();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for a in game.a_ids() {
            if !bad_a[a.index()] && game.sys_moves(a).iter().any(|(_, f)| bad_f[f.index()]) {
                bad_a[a.index()] = true;
                changed = true;
            }
        }
        for f in game.f_ids() {
            if !bad_f[f.index()] && game.def_moves(f).iter().all(|(_, a)| bad_a[a.index()]) {
                bad_f[f.index()] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    finish(game, &bad_a, &bad_f, rounds)
}

fn finish(
    game: &EditGameStructure,
    bad_a: &[bool],
    bad_f: &[bool],
    rounds: usize,
) -> Option<TrimmedGameStructure> {
    let keep_a: Vec<bool> = bad_a.iter().map(|b| !b).collect();
    let keep_f: Vec<bool> = bad_f.iter().map(|b| !b).collect();
    let trimmed = game.restrict(&keep_a, &keep_f, |_, _| true)?;

    let mut disabled = Vec::new();
    for f in trimmed.f_ids() {
        let v = trimmed.augmented(f);
        let orig = game.find_f(v).expect("trimmed state comes from the game");
        for (act, target) in game.def_moves(orig) {
            if bad_a[target.index()] {
                disabled.push(DisabledAction {
                    at: f,
                    action: act.clone(),
                    target: *game.info(*target),
                });
            }
        }
    }
    Some(TrimmedGameStructure {
        game: trimmed,
        disabled,
        stats: TrimStats {
            pruned_a: bad_a.iter().filter(|b| **b).count(),
            pruned_f: bad_f.iter().filter(|b| **b).count(),
            rounds,
        },
    })
}
