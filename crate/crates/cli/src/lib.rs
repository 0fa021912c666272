//! Command-line front end: model and scenario loading, the subcommands, and
//! the `verify-paper` regression checklist.
//!
//! Exit status: 0 when the requested property holds (valid / accepted /
//! found), 1 when it fails (invalid / rejected / none), 2 on usage or input
//! errors.

pub mod modelfile;
pub mod verify;

use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use awarekit::analysis::{
    automorphisms, countermodel_search, dlr_report, extend_to_dlr, extend_to_dlr_ck, is_coherent,
    unawareness_witness, SearchMode,
};
use awarekit::calculus::{check_proof, parse_proof, Verdict};
use awarekit::decision::{
    builtin_scenario, conditional_eu, parse_scenario, preferred_act, trade_report, ChoiceScenario,
};
use awarekit::formula::{Agent, Formula};
use awarekit::models::{builtin, Model};
use awarekit::semantics::{
    evaluate, find_countervaluation, find_countervaluation_at, schema_check_instance, Schema,
    Valuation,
};
use awarekit::statespace::StateId;

use modelfile::LoadedModel;

#[derive(Parser)]
#[command(
    name = "awarekit",
    version,
    about = "Finite state-space models of knowledge and (un)awareness"
)]
pub struct Cli {
    /// Emit one machine-readable JSON object instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Repair model-file relations by reflexive-transitive closure instead
    /// of rejecting non-preorders
    #[arg(long, global = true)]
    repair_relations: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula; print its normalized form and letter inventory
    Parse { formula: String },
    /// Evaluate a formula to the event it expresses
    Eval {
        #[arg(long)]
        model: String,
        #[arg(long)]
        formula: String,
        /// Named valuation from the model file (needed when the formula has
        /// free letters)
        #[arg(long)]
        valuation: Option<String>,
    },
    /// Check validity at a state or on the whole model
    Valid {
        #[arg(long)]
        model: String,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Check a named axiom schema (all agents unless --agent is given)
    Schema {
        #[arg(long)]
        model: String,
        /// Schema name, e.g. Plausibility, KU-Introspection, AS, nPlausibility
        #[arg(long)]
        name: String,
        #[arg(long)]
        state: Option<String>,
        /// Parameter for nPlausibility
        #[arg(long)]
        n: Option<u32>,
        /// Restrict to specific agent indices (repeat for two-index schemas)
        #[arg(long)]
        agent: Vec<String>,
    },
    /// Check the unawareness axioms (and n-Plausibility) at a state, or at
    /// every state when none is given
    DlrReport {
        #[arg(long)]
        model: String,
        #[arg(long)]
        state: Vec<String>,
        #[arg(long, default_value_t = 3)]
        max_n: u32,
    },
    /// Find an event the agent is unaware of at a state
    Witness {
        #[arg(long)]
        model: String,
        #[arg(long)]
        state: String,
        #[arg(long)]
        agent: String,
    },
    /// Extend a knowledge model with an awareness operator that leaves the
    /// agent unaware of an event at a state
    ExtendDlr {
        /// Also require the common-knowledge strengthenings (needs
        /// Necessitation and Anti-Necessitation model-wide)
        #[arg(long)]
        ck: bool,
        #[arg(long)]
        model: String,
        #[arg(long)]
        state: String,
        /// Event literal, e.g. "{alpha w1}"
        #[arg(long)]
        event: String,
        /// Replace Plausibility by the iterated family up to depth n
        #[arg(long)]
        n: Option<u32>,
        /// Agent whose knowledge to take from a multi-agent model
        #[arg(long)]
        agent: Option<String>,
    },
    /// List all automorphisms of a partitional model
    Automorphisms {
        #[arg(long)]
        model: String,
    },
    /// Check coherence of one state or of every state
    Coherence {
        #[arg(long)]
        model: String,
        #[arg(long)]
        state: Option<String>,
    },
    /// Search for a partitional countermodel of a formula
    Search {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        max_states: usize,
        /// Sample random models instead of exhaustive enumeration
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Cap on the number of candidate models examined
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Check a proof file
    Prove {
        #[arg(long)]
        file: PathBuf,
    },
    /// Per-state preferences and the speculative-trade verdict
    Trade {
        #[arg(long)]
        scenario: String,
    },
    /// Exact conditional expected utility of an act
    Eu {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        state: String,
        #[arg(long)]
        act: String,
    },
    /// Run the built-in fact checklist and fail if anything regressed
    VerifyPaper,
}

/// A command report: human-readable lines plus a JSON object.
pub struct Report {
    lines: Vec<String>,
    json: serde_json::Map<String, Value>,
}

impl Report {
    fn new(command: &str) -> Report {
        let mut json = serde_json::Map::new();
        json.insert("command".into(), command.into());
        Report {
            lines: Vec::new(),
            json,
        }
    }

    fn line(&mut self, text: impl Display) {
        self.lines.push(text.to_string());
    }

    fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.json.insert(key.into(), value.into());
    }

    fn print(&self, json_mode: bool) {
        if json_mode {
            println!("{}", Value::Object(self.json.clone()));
        } else {
            for line in &self.lines {
                println!("{line}");
            }
        }
    }
}

const OK: u8 = 0;
const NO: u8 = 1;

pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 0 for --help/--version and 2 for usage errors
            e.exit();
        }
    };
    match run(&cli) {
        Ok((status, mut report)) => {
            report.set("status", status);
            report.print(cli.json);
            ExitCode::from(status)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

/// Built-in model names resolve together with their distinguished states.
fn load_model(spec: &str, repair: bool) -> Result<LoadedModel> {
    let lower = spec.to_ascii_lowercase();
    if awarekit::models::BUILTIN_MODELS.contains(&lower.as_str()) {
        return Ok(LoadedModel {
            model: builtin(&lower)?,
            distinguished: Some(StateId(0)),
            valuations: Default::default(),
        });
    }
    let text = std::fs::read_to_string(spec)
        .with_context(|| format!("cannot read model file `{spec}`"))?;
    modelfile::parse(&text)?.build(repair)
}

fn load_scenario(spec: &str) -> Result<ChoiceScenario> {
    if let Ok(sc) = builtin_scenario(spec) {
        return Ok(sc);
    }
    let text = std::fs::read_to_string(spec)
        .with_context(|| format!("cannot read scenario file `{spec}`"))?;
    Ok(parse_scenario(&text)?)
}

fn resolve_state(model: &Model, label: &str) -> Result<StateId> {
    Ok(model.space().resolve(label)?)
}

fn parse_formula(text: &str) -> Result<Formula> {
    Formula::parse(text).map_err(|e| anyhow!("{e}"))
}

fn valuation_display(v: &Valuation) -> String {
    let s = v.to_string();
    if s.is_empty() {
        "(no letters)".to_string()
    } else {
        s
    }
}

fn run(cli: &Cli) -> Result<(u8, Report)> {
    let repair = cli.repair_relations;
    match &cli.command {
        Command::Parse { formula } => {
            let f = parse_formula(formula)?;
            let mut report = Report::new("parse");
            let letters = f.letters();
            report.line(format!("formula: {f}"));
            let free: Vec<_> = letters.free.iter().cloned().collect();
            let bound: Vec<_> = letters.bound.iter().cloned().collect();
            let agents: Vec<_> = letters.agents.iter().map(|a| a.to_string()).collect();
            report.line(format!("free: {}", free.join(" ")));
            report.line(format!("bound: {}", bound.join(" ")));
            report.line(format!("agents: {}", agents.join(" ")));
            report.set("formula", f.render());
            report.set("free", free);
            report.set("bound", bound);
            report.set("agents", agents);
            Ok((OK, report))
        }
        Command::Eval {
            model,
            formula,
            valuation,
        } => {
            let loaded = load_model(model, repair)?;
            let f = parse_formula(formula)?;
            let v = match valuation {
                Some(name) => loaded
                    .valuations
                    .get(name)
                    .cloned()
                    .ok_or_else(|| anyhow!("model file defines no valuation `{name}`"))?,
                None => {
                    let free = f.letters().free;
                    if !free.is_empty() {
                        bail!(
                            "formula has free letters ({}); pass --valuation",
                            free.into_iter().collect::<Vec<_>>().join(" ")
                        );
                    }
                    Valuation::new(loaded.model.space().clone())
                }
            };
            let event = evaluate(&loaded.model, &v, &f)?;
            let mut report = Report::new("eval");
            report.line(format!("event: {event}"));
            report.set("event", event.to_string());
            Ok((OK, report))
        }
        Command::Valid {
            model,
            formula,
            state,
        } => {
            let loaded = load_model(model, repair)?;
            let f = parse_formula(formula)?;
            let mut report = Report::new("valid");
            let (ok, witness) = match state {
                Some(label) => {
                    let s = resolve_state(&loaded.model, label)?;
                    let w = find_countervaluation_at(&loaded.model, s, &f)?;
                    (w.is_none(), w.map(|v| (s, v)))
                }
                None => {
                    let w = find_countervaluation(&loaded.model, &f)?;
                    (w.is_none(), w)
                }
            };
            report.line(format!("valid: {ok}"));
            report.set("valid", ok);
            if let Some((s, v)) = witness {
                let label = loaded.model.space().label(s).to_string();
                report.line(format!("fails at: {label} under {}", valuation_display(&v)));
                report.set("fails_at", label);
                report.set("countervaluation", v.to_string());
            }
            Ok((if ok { OK } else { NO }, report))
        }
        Command::Schema {
            model,
            name,
            state,
            n,
            agent,
        } => {
            let loaded = load_model(model, repair)?;
            let schema = Schema::from_name(name, *n)?;
            let at = match state {
                Some(label) => Some(resolve_state(&loaded.model, label)?),
                None => None,
            };
            let tuples: Vec<Vec<Agent>> = if agent.is_empty() {
                let agents: Vec<Agent> = loaded.model.agents().into_iter().cloned().collect();
                match schema.agent_arity() {
                    1 => agents.iter().map(|a| vec![a.clone()]).collect(),
                    _ => agents
                        .iter()
                        .flat_map(|i| agents.iter().map(move |j| vec![i.clone(), j.clone()]))
                        .collect(),
                }
            } else {
                if agent.len() != schema.agent_arity() {
                    bail!(
                        "schema {schema} takes {} agent index(es), got {}",
                        schema.agent_arity(),
                        agent.len()
                    );
                }
                vec![agent.iter().map(|a| Agent::new(a.as_str())).collect()]
            };
            let mut report = Report::new("schema");
            let mut all = true;
            let mut rows = Vec::new();
            for tuple in &tuples {
                let ok = schema_check_instance(&loaded.model, &schema, tuple, at)?;
                all &= ok;
                let names: Vec<String> = tuple.iter().map(|a| a.to_string()).collect();
                report.line(format!(
                    "{schema}[{}]: {}",
                    names.join(","),
                    if ok { "valid" } else { "invalid" }
                ));
                rows.push(json!({"agents": names, "valid": ok}));
            }
            report.set("schema", schema.name());
            report.set("instances", rows);
            report.set("valid", all);
            Ok((if all { OK } else { NO }, report))
        }
        Command::DlrReport {
            model,
            state,
            max_n,
        } => {
            let loaded = load_model(model, repair)?;
            let states: Vec<StateId> = if state.is_empty() {
                loaded.model.space().states().collect()
            } else {
                state
                    .iter()
                    .map(|label| resolve_state(&loaded.model, label))
                    .collect::<Result<_>>()?
            };
            let mut report = Report::new("dlr-report");
            let mut rows = Vec::new();
            let mut all_passed = true;
            for s in states {
                let rep = dlr_report(&loaded.model, s, *max_n)?;
                let label = loaded.model.space().label(s).to_string();
                for (agent, verdicts) in &rep.per_agent {
                    for v in verdicts {
                        let mut line = format!(
                            "@{label} {} [{agent}]: {}",
                            v.schema,
                            if v.valid { "valid" } else { "invalid" }
                        );
                        if let Some(w) = &v.witness {
                            line.push_str(&format!(" (witness {})", valuation_display(w)));
                        }
                        report.line(line);
                        rows.push(json!({
                            "state": label,
                            "agent": agent.to_string(),
                            "schema": v.schema.name(),
                            "valid": v.valid,
                            "witness": v.witness.as_ref().map(|w| w.to_string()),
                        }));
                    }
                }
                let passed = rep.passed();
                all_passed &= passed;
                report.line(format!("@{label} passed: {passed}"));
            }
            report.set("verdicts", rows);
            report.set("passed", all_passed);
            Ok((if all_passed { OK } else { NO }, report))
        }
        Command::Witness {
            model,
            state,
            agent,
        } => {
            let loaded = load_model(model, repair)?;
            let s = resolve_state(&loaded.model, state)?;
            let w = unawareness_witness(&loaded.model, s, &Agent::new(agent.as_str()))?;
            let mut report = Report::new("witness");
            match &w {
                Some(event) => {
                    report.line(format!("unaware of: {event}"));
                    report.set("witness", event.to_string());
                    Ok((OK, report))
                }
                None => {
                    report.line("none (aware of every event)");
                    report.set("witness", Value::Null);
                    Ok((NO, report))
                }
            }
        }
        Command::ExtendDlr {
            ck,
            model,
            state,
            event,
            n,
            agent,
        } => {
            let text;
            let file = if awarekit::models::BUILTIN_MODELS
                .contains(&model.to_ascii_lowercase().as_str())
            {
                let loaded = load_model(model, repair)?;
                text = modelfile::render_model(&loaded.model, loaded.distinguished);
                modelfile::parse(&text)?
            } else {
                let raw = std::fs::read_to_string(model)
                    .with_context(|| format!("cannot read model file `{model}`"))?;
                modelfile::parse(&raw)?
            };
            let agent = agent.as_ref().map(|a| Agent::new(a.as_str()));
            let km = file.build_knowledge(agent.as_ref(), repair)?;
            let space = km.space().clone();
            let s = space.resolve(state)?;
            let e = space.parse_event(event)?;
            let result = if *ck {
                extend_to_dlr_ck(&km, s, &e, *n)?
            } else {
                extend_to_dlr(&km, s, &e, *n)?
            };
            let mut report = Report::new("extend-dlr");
            match result {
                Some(extension) => {
                    let rendered = modelfile::render_model(&Model::Standard(extension), Some(s));
                    report.line("extension found; verified at the distinguished state");
                    for line in rendered.lines() {
                        report.line(line);
                    }
                    report.set("found", true);
                    report.set("model", rendered);
                    Ok((OK, report))
                }
                None => {
                    report.line("none (no awareness operator satisfies the constraints)");
                    report.set("found", false);
                    Ok((NO, report))
                }
            }
        }
        Command::Automorphisms { model } => {
            let loaded = load_model(model, repair)?;
            let Model::Partitional(pm) = &loaded.model else {
                bail!("automorphisms are defined for partitional models");
            };
            let autos = automorphisms(pm)?;
            let mut report = Report::new("automorphisms");
            let space = pm.space();
            let mut rows = Vec::new();
            for f in &autos {
                let mapping: Vec<String> = space
                    .states()
                    .map(|s| format!("{}->{}", space.label(s), space.label(f.apply(s))))
                    .collect();
                report.line(mapping.join(" "));
                rows.push(mapping.join(" "));
            }
            report.line(format!("count: {}", autos.len()));
            report.set("automorphisms", rows);
            report.set("count", autos.len());
            Ok((OK, report))
        }
        Command::Coherence { model, state } => {
            let loaded = load_model(model, repair)?;
            let Model::Partitional(pm) = &loaded.model else {
                bail!("coherence is defined for partitional models");
            };
            let states: Vec<StateId> = match state {
                Some(label) => vec![resolve_state(&loaded.model, label)?],
                None => pm.space().states().collect(),
            };
            let mut report = Report::new("coherence");
            let mut all = true;
            let mut rows = Vec::new();
            for s in states {
                let rep = is_coherent(pm, s)?;
                all &= rep.coherent;
                let label = pm.space().label(s).to_string();
                let mut line = format!(
                    "{label}: {}",
                    if rep.coherent {
                        "coherent"
                    } else {
                        "incoherent"
                    }
                );
                if let Some(fail) = rep.first_failure() {
                    line.push_str(&format!(
                        " (no automorphism for {} ~ {} of agent {})",
                        pm.space().label(fail.y),
                        pm.space().label(fail.z),
                        fail.agent
                    ));
                }
                report.line(line);
                rows.push(json!({"state": label, "coherent": rep.coherent}));
            }
            report.set("states", rows);
            report.set("coherent", all);
            Ok((if all { OK } else { NO }, report))
        }
        Command::Search {
            formula,
            max_states,
            random,
            seed,
            budget,
        } => {
            let f = parse_formula(formula)?;
            let mode = if *random {
                SearchMode::Random { seed: *seed }
            } else {
                SearchMode::Exhaustive
            };
            let found = countermodel_search(&f, *max_states, mode, *budget)?;
            let mut report = Report::new("search");
            match found {
                Some(cm) => {
                    let space = cm.model.space().clone();
                    report.line(format!(
                        "countermodel found; fails at {} under {}",
                        space.label(cm.state),
                        valuation_display(&cm.valuation)
                    ));
                    let rendered = modelfile::render_model(
                        &Model::Partitional(cm.model.clone()),
                        Some(cm.state),
                    );
                    for line in rendered.lines() {
                        report.line(line);
                    }
                    report.set("found", true);
                    report.set("state", space.label(cm.state));
                    report.set("countervaluation", cm.valuation.to_string());
                    report.set("model", rendered);
                    Ok((OK, report))
                }
                None => {
                    report.line("none (no countermodel within the bound)");
                    report.set("found", false);
                    Ok((NO, report))
                }
            }
        }
        Command::Prove { file } => {
            let text = std::fs::read_to_string(file)
                .with_context(|| format!("cannot read proof file `{}`", file.display()))?;
            let proof = parse_proof(&text)?;
            let verdict = check_proof(&proof);
            let mut report = Report::new("prove");
            report.line(verdict.to_string());
            match verdict {
                Verdict::Accepted => {
                    report.set("accepted", true);
                    Ok((OK, report))
                }
                Verdict::Rejected { line, reason } => {
                    report.set("accepted", false);
                    report.set("line", line);
                    report.set("reason", reason);
                    Ok((NO, report))
                }
            }
        }
        Command::Trade { scenario } => {
            let sc = load_scenario(scenario)?;
            let rep = trade_report(&sc)?;
            let mut report = Report::new("trade");
            let space = sc.space();
            let mut rows = Vec::new();
            for row in &rep.rows {
                let mut parts = Vec::new();
                let mut prefs = serde_json::Map::new();
                for (agent, pref) in &row.prefs {
                    let table: Vec<String> = pref
                        .table
                        .iter()
                        .map(|(name, eu)| format!("{name}={eu}"))
                        .collect();
                    parts.push(format!(
                        "{agent} prefers {} ({})",
                        pref.act,
                        table.join(" ")
                    ));
                    prefs.insert(
                        agent.to_string(),
                        json!({
                            "act": pref.act,
                            "eu": pref.table.iter()
                                .map(|(n, eu)| (n.clone(), eu.to_string()))
                                .collect::<std::collections::BTreeMap<_, _>>(),
                        }),
                    );
                }
                report.line(format!(
                    "state {}: {}",
                    space.label(row.state),
                    parts.join("; ")
                ));
                rows.push(json!({
                    "state": space.label(row.state),
                    "preferences": prefs,
                }));
            }
            let possible: Vec<String> = rep
                .possible_at
                .iter()
                .map(|s| space.label(*s).to_string())
                .collect();
            report.line(if possible.is_empty() {
                "trade: impossible".to_string()
            } else {
                format!("trade possible at: {}", possible.join(" "))
            });
            report.set("rows", rows);
            report.set("possible_at", possible.clone());
            Ok((if possible.is_empty() { NO } else { OK }, report))
        }
        Command::Eu {
            scenario,
            agent,
            state,
            act,
        } => {
            let sc = load_scenario(scenario)?;
            let agent = Agent::new(agent.as_str());
            let s = sc.space().resolve(state)?;
            let info = sc.info_set(&agent, s)?;
            let eu = conditional_eu(&sc, act, &info)?;
            let pref = preferred_act(&sc, &agent, s)?;
            let mut report = Report::new("eu");
            report.line(format!("info set: {info}"));
            report.line(format!("eu[{act}]: {eu}"));
            report.line(format!("preferred: {}", pref.act));
            report.set("info", info.to_string());
            report.set("eu", eu.to_string());
            report.set("preferred", pref.act);
            Ok((OK, report))
        }
        Command::VerifyPaper => {
            let checks = verify::run_all();
            let mut report = Report::new("verify-paper");
            let mut ok = 0usize;
            let mut rows = Vec::new();
            for check in &checks {
                match &check.outcome {
                    Ok(()) => {
                        ok += 1;
                        report.line(format!("ok   {}", check.name));
                        rows.push(json!({"name": check.name, "ok": true}));
                    }
                    Err(why) => {
                        report.line(format!("FAIL {}: {why}", check.name));
                        rows.push(json!({"name": check.name, "ok": false, "why": why}));
                    }
                }
            }
            let all = ok == checks.len();
            report.line(format!("{ok}/{} checks passed", checks.len()));
            report.set("checks", rows);
            report.set("passed", all);
            Ok((if all { OK } else { NO }, report))
        }
    }
}
