//! Line-oriented text format for plant models.
//!
//! ```text
//! states     1 2 3
//! initial    1
//! secret     3
//! events     a b
//! observable a b
//! intruder   a
//! defender   b
//! trans 1 a 2
//! ```
//!
//! `#` starts a comment. `observable` defaults to every event; `intruder` and
//! `defender` default to the observable set.

use std::fmt::Write as _;

use crate::automaton::{AutomatonBuilder, EventSet, ObservationProfile, SystemModel};
use crate::error::ParseError;

pub fn parse_model(text: &str) -> Result<SystemModel, ParseError> {
    let mut b = AutomatonBuilder::new();
    let mut initial_seen = false;
    let mut secret_lines = Vec::new();
    let mut observable: Option<(usize, Vec<String>)> = None;
    let mut intruder: Option<(usize, Vec<String>)> = None;
    let mut defender: Option<(usize, Vec<String>)> = None;

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let directive = tokens.next().unwrap_or_default();
        let args: Vec<&str> = tokens.collect();
        let err = |m: String| ParseError::new(line_no, m);
        match directive {
            "states" => {
                for a in &args {
                    b.state(a).map_err(|e| err(e.to_string()))?;
                }
            }
            "events" => {
                for a in &args {
                    b.event(a).map_err(|e| err(e.to_string()))?;
                }
            }
            "initial" => {
                if initial_seen {
                    return Err(err("initial state declared twice".into()));
                }
                let [label] = args.as_slice() else {
                    return Err(err("`initial` takes exactly one state".into()));
                };
                let s = b
                    .state_id(label)
                    .ok_or_else(|| err(format!("undeclared state `{label}`")))?;
                b.initial(s);
                initial_seen = true;
            }
            "secret" => {
                for a in &args {
                    let s = b
                        .state_id(a)
                        .ok_or_else(|| err(format!("undeclared state `{a}`")))?;
                    secret_lines.push(s);
                }
            }
            "observable" | "intruder" | "defender" => {
                let slot = match directive {
                    "observable" => &mut observable,
                    "intruder" => &mut intruder,
                    _ => &mut defender,
                };
                if slot.is_some() {
                    return Err(err(format!("`{directive}` declared twice")));
                }
                for a in &args {
                    if b.event_id(a).is_none() {
                        return Err(err(format!("undeclared event `{a}`")));
                    }
                }
                *slot = Some((line_no, args.iter().map(|s| s.to_string()).collect()));
            }
            "trans" => {
                let [from, ev, to] = args.as_slice() else {
                    return Err(err("`trans` takes `FROM EVENT TO`".into()));
                };
                let f = b
                    .state_id(from)
                    .ok_or_else(|| err(format!("undeclared state `{from}`")))?;
                let e = b
                    .event_id(ev)
                    .ok_or_else(|| err(format!("undeclared event `{ev}`")))?;
                let t = b
                    .state_id(to)
                    .ok_or_else(|| err(format!("undeclared state `{to}`")))?;
                b.transition(f, e, t).map_err(|e| err(e.to_string()))?;
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }

    let last_line = text.lines().count().max(1);
    for s in &secret_lines {
        b.secret(*s);
    }
    let aut = b.build().map_err(|e| ParseError::new(last_line, e.to_string()))?;
    let observable_set = match &observable {
        Some((_, names)) => names.iter().filter_map(|n| aut.event_by_name(n)).collect(),
        None => aut.events(),
    };
    let pick = |slot: &Option<(usize, Vec<String>)>| -> (usize, EventSet) {
        match slot {
            Some((line, names)) => (*line, names.iter().filter_map(|n| aut.event_by_name(n)).collect()),
            None => (last_line, observable_set),
        }
    };
    let (il, intruder_set) = pick(&intruder);
    let (dl, defender_set) = pick(&defender);
    if !intruder_set.is_subset(observable_set) {
        return Err(ParseError::new(il, "intruder events must be observable"));
    }
    if !defender_set.is_subset(observable_set) {
        return Err(ParseError::new(dl, "defender events must be observable"));
    }
    let profile = ObservationProfile::new(&aut, observable_set, intruder_set, defender_set)
        .map_err(|e| ParseError::new(last_line, e.to_string()))?;
    Ok(SystemModel {
        automaton: aut,
        profile,
    })
}

/// Serialize a model in the same text format; `parse_model` reads it back
/// unchanged.
pub fn write_model(model: &SystemModel) -> String {
    let g = &model.automaton;
    let p = &model.profile;
    let names = |set: EventSet| -> String {
        set.iter().map(|e| g.event_name(e)).collect::<Vec<_>>().join(" ")
    };
    let mut out = String::new();
    let states: Vec<&str> = g.states().map(|s| g.state_label(s)).collect();
    let secret: Vec<&str> = g.secret_states().iter().map(|s| g.state_label(s)).collect();
    writeln!(out, "states     {}", states.join(" ")).unwrap();
    writeln!(out, "initial    {}", g.state_label(g.initial())).unwrap();
    writeln!(out, "secret     {}", secret.join(" ")).unwrap();
    writeln!(out, "events     {}", names(g.events())).unwrap();
    writeln!(out, "observable {}", names(p.observable())).unwrap();
    writeln!(out, "intruder   {}", names(p.intruder())).unwrap();
    writeln!(out, "defender   {}", names(p.defender())).unwrap();
    for (from, e, to) in g.transitions() {
        writeln!(
            out,
            "trans {} {} {}",
            g.state_label(from),
            g.event_name(e),
            g.state_label(to)
        )
        .unwrap();
    }
    out
}
