//! Current-state opacity verification and edit-function synthesis for
//! discrete event systems whose intruder and defender observe incomparable
//! event sets.

pub mod automaton;
pub mod cli;
pub mod dot;
pub mod error;
pub mod format;
pub mod game;
pub mod harness;
pub mod mechanism;
pub mod observer;
pub mod opacity;
pub mod pipeline;
pub mod trim;

pub use automaton::{
    project, AutomatonBuilder, Event, EventSet, FiniteAutomaton, ObservationProfile, StateId,
    StateSet, SystemModel, Trace,
};
pub use error::{ModelError, ParseError};
pub use format::{parse_model, write_model};
pub use game::{
    apply_defender_move, build_edit_game, enumerate_actions, ActionSpace, AugmentedState,
    EditAction, EditGameStructure, InfoState,
};
pub use observer::{reach_set, ObserverAutomaton, Observers};
pub use trim::{trim_game, trim_game_naive, TrimmedGameStructure};
pub use mechanism::{
    build_uem, refine_to_em, synthesize, unobservable_closure, EditMechanism, MealyEditFunction,
    Policy, Synthesis,
};
pub use opacity::{
    check_c_available, check_confidential, check_i_available, check_integrity, ic_enforcing,
    verify_cso, CausalEditor, EditFunction, IdentityEditor, OpacityVerdict,
};
pub use harness::{
    oracle_ic_enforcing, random_incomparable_instance, random_instance, random_sized_instance,
    simulate, strategy_exists,
    Counterexample, GameEditor, Property, SimulationError, SimulationStep,
};
pub use pipeline::{run_pipeline, Op, PipelineConfig, PipelineError, PipelineRun, StageSize};
