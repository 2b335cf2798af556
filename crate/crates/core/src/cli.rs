//! Command-line front end. Exit codes: 0 success or opaque, 1 a property
//! fails, 2 bad input, 3 no edit function exists for this configuration.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::automaton::{project, SystemModel};
use crate::dot::{augmented_label, info_label};
use crate::format::{parse_model, write_model};
use crate::game::{build_edit_game, EditGameStructure};
use crate::harness::{oracle_ic_enforcing, random_incomparable_instance, random_instance, simulate, steps_to_tsv};
use crate::mechanism::{EditMechanism, MealyEditFunction, Policy};
use crate::observer::{ObserverAutomaton, Observers};
use crate::opacity::{verify_cso, IdentityEditor};
use crate::pipeline::{run_pipeline, write_stage_dots, Op, PipelineConfig};
use crate::trim::trim_game;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_UNENFORCEABLE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "opacity-edit", version, about = "Opacity verification and edit-function synthesis")]
pub struct Cli {
    /// Log stage sizes to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Pipeline {
    /// Plant model file.
    pub model: PathBuf,
    /// Comma-separated edit operations: substitute, delete, insert.
    #[arg(long, value_delimiter = ',', default_value = "substitute,delete,insert")]
    pub ops: Vec<Op>,
    /// Longest insertion prefix K.
    #[arg(long = "max-insert", default_value_t = 1)]
    pub max_insert: usize,
    /// Trace length bound for `check`; exhaustive when omitted.
    #[arg(long)]
    pub depth: Option<usize>,
    /// passthrough-first, edit-first, last or seeded:N.
    #[arg(long, default_value = "passthrough-first")]
    pub policy: Policy,
    /// Write a DOT file per stage into this directory.
    #[arg(long)]
    pub dot: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Current-state opacity of the plant against the intruder.
    Verify {
        model: PathBuf,
    },
    /// Print the system, intruder and defender observers.
    Observers {
        model: PathBuf,
        #[arg(long)]
        dot: Option<PathBuf>,
        /// Leave self-loops out of the DOT files.
        #[arg(long)]
        no_self_loops: bool,
    },
    /// Print the edit game with utilities.
    Game(Pipeline),
    /// Print the actions disabled by trimming.
    Trim(Pipeline),
    /// Print the merged mechanism and its refinement.
    Mechanism(Pipeline),
    /// Synthesize a transducer.
    Synthesize {
        #[command(flatten)]
        pipeline: Pipeline,
        /// Write the transducer here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a plant trace through an editor and print the step table.
    Simulate {
        #[command(flatten)]
        pipeline: Pipeline,
        /// Plant trace, e.g. `abc` or `a.b.c`.
        trace: String,
        /// Transducer file; synthesized on the fly when omitted.
        #[arg(long, conflicts_with = "identity")]
        transducer: Option<PathBuf>,
        /// Use the editor that changes nothing.
        #[arg(long)]
        identity: bool,
    },
    /// Check a transducer against all four editor properties.
    Check {
        #[command(flatten)]
        pipeline: Pipeline,
        #[arg(long, conflicts_with = "identity")]
        transducer: Option<PathBuf>,
        #[arg(long)]
        identity: bool,
    },
    /// Print a seeded random plant.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        states: usize,
        #[arg(long, default_value_t = 4)]
        events: usize,
        /// Always make the intruder and defender alphabets incomparable.
        #[arg(long)]
        incomparable: bool,
    },
    /// Write DOT files for every stage.
    ExportDot {
        #[command(flatten)]
        pipeline: Pipeline,
    },
}

struct Failure(i32, String);

impl<E: std::fmt::Display> From<(i32, E)> for Failure {
    fn from((code, e): (i32, E)) -> Self {
        Failure(code, e.to_string())
    }
}

fn load(path: &Path) -> Result<SystemModel, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
    parse_model(&text).map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))
}

fn config(p: &Pipeline) -> Result<PipelineConfig, Failure> {
    let mut c = PipelineConfig::new(&p.ops, p.max_insert).map_err(|e| Failure(EXIT_INPUT, e))?;
    c.depth = p.depth;
    c.policy = p.policy;
    c.dot_dir = p.dot.clone();
    c.seed = p.seed;
    Ok(c)
}

/// Parse `args` (including the program name) and run, writing to the given
/// streams. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(Failure(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let io = |e: std::io::Error| Failure(EXIT_INPUT, e.to_string());
    match cmd {
        Command::Verify { model } => {
            let m = load(&model)?;
            let v = verify_cso(&m.automaton, &m.profile);
            if v.opaque {
                writeln!(out, "OPAQUE").map_err(io)?;
                return Ok(EXIT_OK);
            }
            let g = &m.automaton;
            let w = v.witness.expect("non-opaque verdicts carry a witness");
            let obs = ObserverAutomaton::build(g, m.profile.intruder(), m.profile.observable());
            let est = obs.run(&project(&w, m.profile.observable())).expect("witness is observable");
            writeln!(out, "NOT OPAQUE").map_err(io)?;
            writeln!(out, "witness {}", g.format_trace(&w)).map_err(io)?;
            writeln!(out, "intruder sees {}", g.format_trace(&project(&w, m.profile.intruder()))).map_err(io)?;
            writeln!(out, "estimate {}", g.format_set(obs.state(est))).map_err(io)?;
            Ok(EXIT_FAIL)
        }
        Command::Observers {
            model,
            dot,
            no_self_loops,
        } => {
            let m = load(&model)?;
            let g = &m.automaton;
            let obs = Observers::build(g, &m.profile);
            for (name, o) in [("system", &obs.system), ("intruder", &obs.intruder), ("defender", &obs.defender)] {
                writeln!(out, "{name} observer, reacts to {}", g.format_events(o.reactive())).map_err(io)?;
                writeln!(out, "  initial {}", g.format_set(o.state(o.initial()))).map_err(io)?;
                for id in o.ids() {
                    let mark = if g.all_secret(o.state(id)) { "  secret" } else { "" };
                    writeln!(out, "  state {}{mark}", g.format_set(o.state(id))).map_err(io)?;
                }
                for (s, e, t) in o.reactive_transitions() {
                    writeln!(
                        out,
                        "  {} {} {}",
                        g.format_set(o.state(s)),
                        g.event_name(e),
                        g.format_set(o.state(t))
                    )
                    .map_err(io)?;
                }
            }
            if let Some(dir) = dot {
                std::fs::create_dir_all(&dir).map_err(io)?;
                for (name, o) in [("observer_o", &obs.system), ("observer_i", &obs.intruder), ("observer_d", &obs.defender)] {
                    let body = crate::dot::observer_dot(g, o, name, !no_self_loops);
                    std::fs::write(dir.join(format!("{name}.dot")), body).map_err(io)?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Game(p) => {
            let m = load(&p.model)?;
            let c = config(&p)?;
            let obs = Observers::build(&m.automaton, &m.profile);
            let game = build_edit_game(&m.automaton, &m.profile, &obs, &c.space);
            print_game(out, &m, &obs, &game).map_err(io)?;
            if let Some(dir) = &c.dot_dir {
                std::fs::create_dir_all(dir).map_err(io)?;
                std::fs::write(dir.join("game.dot"), crate::dot::game_dot(&m.automaton, &obs, &game)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Trim(p) => {
            let m = load(&p.model)?;
            let c = config(&p)?;
            let g = &m.automaton;
            let obs = Observers::build(g, &m.profile);
            let game = build_edit_game(g, &m.profile, &obs, &c.space);
            let Some(t) = trim_game(&game) else {
                writeln!(out, "trimmed game is empty: not ic-enforceable at this configuration").map_err(io)?;
                return Ok(EXIT_UNENFORCEABLE);
            };
            let s = t.stats();
            writeln!(
                out,
                "pruned {} information and {} augmented states; {} remain",
                s.pruned_a,
                s.pruned_f,
                t.game().num_a() + t.game().num_f()
            )
            .map_err(io)?;
            for d in t.disabled() {
                let v = t.game().augmented(d.at);
                writeln!(
                    out,
                    "disabled {} at {} -> {}",
                    d.action.label(v.pending, g),
                    augmented_label(g, &obs, v),
                    info_label(g, &obs, &d.target)
                )
                .map_err(io)?;
            }
            if let Some(dir) = &c.dot_dir {
                std::fs::create_dir_all(dir).map_err(io)?;
                std::fs::write(dir.join("trimmed.dot"), crate::dot::trimmed_dot(g, &obs, &t, true)).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Mechanism(p) => {
            let m = load(&p.model)?;
            let c = config(&p)?;
            let run = run_pipeline(&m, &c).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
            let (Some(t), Some(uem)) = (&run.trimmed, &run.uem) else {
                writeln!(out, "trimmed game is empty: not ic-enforceable at this configuration").map_err(io)?;
                return Ok(EXIT_UNENFORCEABLE);
            };
            writeln!(out, "no-guarantees mechanism").map_err(io)?;
            print_mechanism(out, &m, &run.observers, t.game(), uem).map_err(io)?;
            let Some(em) = &run.em else {
                writeln!(out, "refined mechanism is empty: not ic-enforceable at this configuration").map_err(io)?;
                return Ok(EXIT_UNENFORCEABLE);
            };
            writeln!(out, "edit mechanism").map_err(io)?;
            print_mechanism(out, &m, &run.observers, t.game(), em).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Synthesize { pipeline, output } => {
            let m = load(&pipeline.model)?;
            let c = config(&pipeline)?;
            let run = run_pipeline(&m, &c).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
            let Some(s) = run.synthesis else {
                writeln!(out, "not ic-enforceable at this configuration").map_err(io)?;
                return Ok(EXIT_UNENFORCEABLE);
            };
            let text = s.transducer.to_text(&m.automaton);
            match output {
                Some(path) => std::fs::write(path, text).map_err(io)?,
                None => write!(out, "{text}").map_err(io)?,
            }
            Ok(EXIT_OK)
        }
        Command::Simulate {
            pipeline,
            trace,
            transducer,
            identity,
        } => {
            let m = load(&pipeline.model)?;
            let g = &m.automaton;
            let trace = g.parse_trace(&trace).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
            let obs = Observers::build(g, &m.profile);
            let steps = if identity {
                simulate(g, &m.profile, &obs, &IdentityEditor, &trace)
            } else {
                let fe = editor(&m, &pipeline, transducer.as_deref())?;
                simulate(g, &m.profile, &obs, &fe, &trace)
            };
            match steps {
                Ok(steps) => {
                    write!(out, "{}", steps_to_tsv(g, &steps)).map_err(io)?;
                    Ok(if steps.iter().any(|s| s.leak) { EXIT_FAIL } else { EXIT_OK })
                }
                Err(e @ crate::harness::SimulationError::NotInLanguage(_)) => Err(Failure(EXIT_INPUT, e.to_string())),
                Err(e) => Err(Failure(EXIT_FAIL, e.to_string())),
            }
        }
        Command::Check {
            pipeline,
            transducer,
            identity,
        } => {
            let m = load(&pipeline.model)?;
            let obs = Observers::build(&m.automaton, &m.profile);
            let (verdict, policy) = if identity {
                (oracle_ic_enforcing(&m.automaton, &m.profile, &obs, &IdentityEditor, pipeline.depth), None)
            } else {
                let fe = editor(&m, &pipeline, transducer.as_deref())?;
                let v = oracle_ic_enforcing(&m.automaton, &m.profile, &obs, &fe, pipeline.depth);
                (v, Some(fe.policy().to_string()))
            };
            match verdict {
                Ok(()) => {
                    writeln!(out, "PASS").map_err(io)?;
                    Ok(EXIT_OK)
                }
                Err(cex) => {
                    writeln!(out, "{}", cex.to_json_line(&m.automaton, &m.profile, policy.as_deref())).map_err(io)?;
                    Ok(EXIT_FAIL)
                }
            }
        }
        Command::Gen {
            seed,
            states,
            events,
            incomparable,
        } => {
            if states < 2 || events < 2 || events > crate::automaton::MAX_EVENTS {
                return Err(Failure(EXIT_INPUT, "need at least two states and 2..=64 events".into()));
            }
            let m = if incomparable {
                random_incomparable_instance(seed, states, events)
            } else {
                random_instance(seed, states, events)
            };
            write!(out, "# seed {seed}\n{}", write_model(&m)).map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::ExportDot { pipeline } => {
            let m = load(&pipeline.model)?;
            let mut c = config(&pipeline)?;
            let Some(dir) = c.dot_dir.take() else {
                return Err(Failure(EXIT_INPUT, "export-dot needs --dot DIR".into()));
            };
            let run = run_pipeline(&m, &c).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
            write_stage_dots(&m, &run, &dir).map_err(io)?;
            writeln!(out, "wrote DOT files to {}", dir.display()).map_err(io)?;
            Ok(if run.is_enforceable() { EXIT_OK } else { EXIT_UNENFORCEABLE })
        }
    }
}

/// A transducer from a file, or a freshly synthesized one.
fn editor(m: &SystemModel, p: &Pipeline, path: Option<&Path>) -> Result<MealyEditFunction, Failure> {
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())))?;
        return MealyEditFunction::parse(&text, &m.automaton)
            .map_err(|e| Failure(EXIT_INPUT, format!("{}: {e}", path.display())));
    }
    let run = run_pipeline(m, &config(p)?).map_err(|e| Failure(EXIT_INPUT, e.to_string()))?;
    run.synthesis
        .map(|s| s.transducer)
        .ok_or_else(|| Failure(EXIT_UNENFORCEABLE, "not ic-enforceable at this configuration".into()))
}

fn print_game(out: &mut dyn Write, m: &SystemModel, obs: &Observers, game: &EditGameStructure) -> std::io::Result<()> {
    let g = &m.automaton;
    writeln!(
        out,
        "{} information states, {} augmented states",
        game.num_a(),
        game.num_f()
    )?;
    writeln!(out, "initial {}", info_label(g, obs, game.info(game.initial())))?;
    for a in game.a_ids() {
        writeln!(out, "A {} utility {}", info_label(g, obs, game.info(a)), game.utility_a(a))?;
        for (e, f) in game.sys_moves(a) {
            writeln!(out, "  {} -> {}", g.event_name(*e), augmented_label(g, obs, game.augmented(*f)))?;
        }
    }
    for f in game.f_ids() {
        let v = game.augmented(f);
        writeln!(out, "F {} utility {}", augmented_label(g, obs, v), game.utility_f(f))?;
        for (act, a) in game.def_moves(f) {
            writeln!(out, "  {} -> {}", act.label(v.pending, g), info_label(g, obs, game.info(*a)))?;
        }
    }
    Ok(())
}

fn print_mechanism(
    out: &mut dyn Write,
    m: &SystemModel,
    obs: &Observers,
    tgs: &EditGameStructure,
    em: &EditMechanism,
) -> std::io::Result<()> {
    let g = &m.automaton;
    let ua = |q: crate::mechanism::UaId| -> String {
        let v: Vec<String> = em.ua_members(q).iter().map(|a| info_label(g, obs, tgs.info(*a))).collect();
        format!("{{{}}}", v.join(", "))
    };
    writeln!(out, "  initial q{} = {}", em.initial().index(), ua(em.initial()))?;
    for q in em.ua_ids() {
        writeln!(out, "  q{} = {}", q.index(), ua(q))?;
        for (e, u) in em.moves_in(q) {
            writeln!(out, "    {} -> u{}", g.event_name(*e), u.index())?;
        }
    }
    for u in em.uf_ids() {
        let v: Vec<String> = em
            .uf(u)
            .members
            .iter()
            .map(|f| augmented_label(g, obs, tgs.augmented(*f)))
            .collect();
        writeln!(out, "  u{} = {{{}}}", u.index(), v.join(", "))?;
        for mv in em.moves_out(u) {
            let note = if mv.total { "" } else { "  (undefined at some member)" };
            writeln!(
                out,
                "    {} -> q{}{note}",
                mv.action.label(em.uf(u).observed, g),
                mv.target.index()
            )?;
        }
    }
    Ok(())
}
