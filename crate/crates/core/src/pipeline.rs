//! The full construction: observers, edit game, trimmed game, merged
//! mechanism, refined mechanism and transducer.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::automaton::SystemModel;
use crate::dot;
use crate::game::{build_edit_game, ActionSpace, EditGameStructure};
use crate::mechanism::{build_uem, refine_to_em, synthesize, EditMechanism, Policy, Synthesis, SynthesisError};

use crate::observer::Observers;
use crate::trim::{trim_game, TrimmedGameStructure};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Synthesis(#[from] SynthesisError),
    #[error("writing DOT files: {0}")]
    Io(#[from] std::io::Error),
}

/// An edit operation that can be switched on; passthrough is always allowed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Substitute,
    Delete,
    Insert,
}

impl FromStr for Op {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "substitute" | "sub" => Ok(Op::Substitute),
            "delete" | "del" => Ok(Op::Delete),
            "insert" | "ins" => Ok(Op::Insert),
            _ => Err(format!("unknown edit operation `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PipelineConfig {
    pub space: ActionSpace,
    /// Length bound for the literal checks; `None` means exhaustive.
    pub depth: Option<usize>,
    pub policy: Policy,
    pub dot_dir: Option<PathBuf>,
    pub seed: Option<u64>,
}

impl PipelineConfig {
    /// Insertion needs `max_insert ≥ 1`.
    pub fn new(ops: &[Op], max_insert: usize) -> Result<Self, String> {
        let insert = ops.contains(&Op::Insert);
        if insert && max_insert == 0 {
            return Err("insertion needs --max-insert of at least 1".into());
        }
        Ok(PipelineConfig {
            space: ActionSpace {
                substitute: ops.contains(&Op::Substitute),
                delete: ops.contains(&Op::Delete),
                insert,
                max_insert: if insert { max_insert } else { 0 },
            },
            depth: None,
            policy: Policy::default(),
            dot_dir: None,
            seed: None,
        })
    }
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig::new(&[Op::Substitute, Op::Delete, Op::Insert], 1).expect("valid defaults")
    }
}

/// Size of one stage against its worst-case bound, the latter as log2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StageSize {
    pub stage: &'static str,
    pub states: usize,
    pub edges: usize,
    pub bound_log2: f64,
}

impl StageSize {
    pub fn within_bound(&self) -> bool {
        (self.states.max(1) as f64).log2() <= self.bound_log2 + 1e-9
    }
}

impl fmt::Display for StageSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<11} states={:<6} edges={:<7} bound=2^{:.1}",
            self.stage, self.states, self.edges, self.bound_log2
        )
    }
}

fn log2_sum(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (1.0 + (lo - hi).exp2()).log2()
}

/// Every stage up to the first empty one.
#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub observers: Observers,
    pub game: EditGameStructure,
    pub trimmed: Option<TrimmedGameStructure>,
    pub uem: Option<EditMechanism>,
    pub em: Option<EditMechanism>,
    pub synthesis: Option<Synthesis>,
    pub sizes: Vec<StageSize>,
}

impl PipelineRun {
    pub fn is_enforceable(&self) -> bool {
        self.synthesis.is_some()
    }

    pub fn size_report(&self) -> String {
        self.sizes.iter().map(|s| format!("{s}\n")).collect()
    }
}

pub fn run_pipeline(model: &SystemModel, config: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    let aut = &model.automaton;
    let profile = &model.profile;
    let n = aut.num_states() as f64;
    let eo = profile.observable().len() as f64;
    let ed = profile.defender().len() as f64;

    let observers = Observers::build(aut, profile);
    let mut sizes = Vec::new();
    for (stage, o) in [
        ("observer-o", &observers.system),
        ("observer-i", &observers.intruder),
        ("observer-d", &observers.defender),
    ] {
        sizes.push(StageSize {
            stage,
            states: o.len(),
            edges: o.reactive_transitions().count(),
            bound_log2: n,
        });
    }
    let game = build_edit_game(aut, profile, &observers, &config.space);
    // |X_o||X_I||X_D|(1 + |E_o|) with each factor at most 2^|X|
    let game_bound = 3.0 * n + (1.0 + eo).log2();
    sizes.push(StageSize {
        stage: "game",
        states: game.num_a() + game.num_f(),
        edges: game.num_sys_edges() + game.num_def_edges(),
        bound_log2: game_bound,
    });

    let trimmed = trim_game(&game);
    let mut run = PipelineRun {
        observers,
        game,
        trimmed: None,
        uem: None,
        em: None,
        synthesis: None,
        sizes,
    };
    let Some(trimmed) = trimmed else {
        log_sizes(&run.sizes);
        write_dots(model, &run, config)?;
        return Ok(run);
    };
    let tg = trimmed.game();
    run.sizes.push(StageSize {
        stage: "trimmed",
        states: tg.num_a() + tg.num_f(),
        edges: tg.num_sys_edges() + tg.num_def_edges(),
        bound_log2: game_bound,
    });
    let uem = build_uem(tg, profile.defender());
    // 2^|V_TA| + 2^|V_TF|·|E_D|
    let merged_bound = log2_sum(tg.num_a() as f64, tg.num_f() as f64 + ed.max(1.0).log2());
    run.sizes.push(StageSize {
        stage: "uem",
        states: uem.num_ua() + uem.num_uf(),
        edges: uem.num_edges(),
        bound_log2: merged_bound,
    });
    let em = refine_to_em(&uem);
    if let Some(em) = &em {
        run.sizes.push(StageSize {
            stage: "em",
            states: em.num_ua() + em.num_uf(),
            edges: em.num_edges(),
            bound_log2: merged_bound,
        });
        let s = synthesize(em, profile.defender(), config.policy)?;
        run.sizes.push(StageSize {
            stage: "transducer",
            states: s.transducer.num_states(),
            edges: s.transducer.num_edges(),
            bound_log2: merged_bound,
        });
        run.synthesis = Some(s);
    }
    run.trimmed = Some(trimmed);
    run.uem = Some(uem);
    run.em = em;
    log_sizes(&run.sizes);
    write_dots(model, &run, config)?;
    Ok(run)
}

fn log_sizes(sizes: &[StageSize]) {
    for s in sizes {
        log::info!("{s}");
        if !s.within_bound() {
            log::warn!("{} exceeds its worst-case bound", s.stage);
        }
    }
}

fn write_dots(model: &SystemModel, run: &PipelineRun, config: &PipelineConfig) -> Result<(), PipelineError> {
    let Some(dir) = &config.dot_dir else {
        return Ok(());
    };
    Ok(write_stage_dots(model, run, dir)?)
}

/// One `.dot` file per available stage.
pub fn write_stage_dots(model: &SystemModel, run: &PipelineRun, dir: &Path) -> std::io::Result<()> {
    let aut = &model.automaton;
    let obs = &run.observers;
    std::fs::create_dir_all(dir)?;
    let put = |name: &str, body: String| std::fs::write(dir.join(name), body);
    put("plant.dot", dot::plant_dot(aut))?;
    put("observer_o.dot", dot::observer_dot(aut, &obs.system, "observer_o", true))?;
    put("observer_i.dot", dot::observer_dot(aut, &obs.intruder, "observer_i", true))?;
    put("observer_d.dot", dot::observer_dot(aut, &obs.defender, "observer_d", true))?;
    put("game.dot", dot::game_dot(aut, obs, &run.game))?;
    if let Some(t) = &run.trimmed {
        put("trimmed.dot", dot::trimmed_dot(aut, obs, t, true))?;
        if let Some(uem) = &run.uem {
            put("uem.dot", dot::mechanism_dot(aut, obs, t.game(), uem, "uem"))?;
        }
        if let Some(em) = &run.em {
            put("em.dot", dot::mechanism_dot(aut, obs, t.game(), em, "em"))?;
        }
    }
    if let Some(s) = &run.synthesis {
        put("transducer.dot", dot::transducer_dot(aut, &s.transducer))?;
    }
    Ok(())
}
