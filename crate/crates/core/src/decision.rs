//! Choice structures: a finite measure space with a common prior, acts with
//! state-wise utilities, per-agent accessibility, and attention subalgebras.
//! All arithmetic is exact rational; the trade verdicts compare expected
//! utilities that sit close together, so floating point is never used.
//!
//! Scenario file format (line oriented, `#` comments):
//!
//! ```text
//! states: 1 2 3 4 5
//! prior: 1/5 1/5 1/5 1/5 1/5
//! act f: 1 5 7 5 1
//! act g: 4 4 4 4 4
//! agent A: R: 1->1 1->2 1->3 2->2 3->3 4->4 5->3 5->4 5->5
//! attention @1: {1} {2 3} {4} {5}
//! agent B: R: all
//! ```
//!
//! `attention` lines attach to the preceding agent; states without one get
//! the discrete (fully attentive) partition.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Zero};
use thiserror::Error;

use crate::formula::Agent;
use crate::models::{Model, ModelError, Partition, PartitionalModel, PartitionalOps, Relation};
use crate::statespace::{Event, SpaceError, StateId, StateSpace};

#[derive(Debug, Error)]
pub enum DecisionError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("prior weights must be nonnegative")]
    NegativeWeight,
    #[error("prior weights sum to {0}, expected 1")]
    BadPriorSum(BigRational),
    #[error("prior has {got} weights, the space has {expected} states")]
    PriorLength { expected: usize, got: usize },
    #[error("act `{name}` has {got} utilities, the space has {expected} states")]
    ActLength {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate act `{0}`")]
    DuplicateAct(String),
    #[error("unknown act `{0}`")]
    UnknownAct(String),
    #[error("the scenario has no acts")]
    NoActs,
    #[error("conditioning event has prior measure zero")]
    ZeroMeasure,
    #[error("subalgebra with {0} atoms has too many events to enumerate")]
    TooManyAtoms(usize),
}

/// Exact rational from an integer pair.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(numer.into(), denom.into())
}

/// A complete atomic subalgebra of the event algebra, given by its atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subalgebra {
    atoms: Partition,
}

impl Subalgebra {
    pub fn new(atoms: Partition) -> Subalgebra {
        Subalgebra { atoms }
    }

    /// The full algebra: every event is measurable.
    pub fn full(space: StateSpace) -> Subalgebra {
        Subalgebra {
            atoms: Partition::identity(space),
        }
    }

    pub fn atoms(&self) -> &Partition {
        &self.atoms
    }

    pub fn space(&self) -> &StateSpace {
        self.atoms.space()
    }

    /// Membership: the event is a union of atoms.
    pub fn contains(&self, e: &Event) -> bool {
        e.space() == self.space() && self.atoms.is_union_of_cells(e.mask())
    }

    /// Every event of the generated field, in canonical order.
    pub fn events(&self) -> Result<Vec<Event>, DecisionError> {
        let atoms = self.atoms.cell_masks();
        if atoms.len() > 20 {
            return Err(DecisionError::TooManyAtoms(atoms.len()));
        }
        let mut out = Vec::with_capacity(1 << atoms.len());
        for code in 0..1u64 << atoms.len() {
            let mut mask = 0;
            for (i, atom) in atoms.iter().enumerate() {
                if code >> i & 1 == 1 {
                    mask |= atom;
                }
            }
            out.push(self.space().event(mask));
        }
        out.sort_by_key(Event::mask);
        out.dedup_by_key(|e| e.mask());
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioAgent {
    pub relation: Relation,
    /// Per-state attention partitions (atoms of the context subalgebra).
    pub attention: Vec<Partition>,
}

/// A measure space with a common prior, named acts, and per-agent
/// accessibility and attention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChoiceScenario {
    space: StateSpace,
    prior: Vec<BigRational>,
    acts: Vec<(String, Vec<BigRational>)>,
    agents: Vec<(Agent, ScenarioAgent)>,
}

impl ChoiceScenario {
    pub fn new(
        space: StateSpace,
        prior: Vec<BigRational>,
        mut acts: Vec<(String, Vec<BigRational>)>,
        agents: Vec<(Agent, ScenarioAgent)>,
    ) -> Result<ChoiceScenario, DecisionError> {
        let n = space.len();
        if prior.len() != n {
            return Err(DecisionError::PriorLength {
                expected: n,
                got: prior.len(),
            });
        }
        if prior.iter().any(|w| w < &BigRational::zero()) {
            return Err(DecisionError::NegativeWeight);
        }
        let total: BigRational = prior.iter().sum();
        if !total.is_one() {
            return Err(DecisionError::BadPriorSum(total));
        }
        acts.sort_by(|a, b| a.0.cmp(&b.0));
        for (i, (name, utilities)) in acts.iter().enumerate() {
            if acts[..i].iter().any(|(other, _)| other == name) {
                return Err(DecisionError::DuplicateAct(name.clone()));
            }
            if utilities.len() != n {
                return Err(DecisionError::ActLength {
                    name: name.clone(),
                    expected: n,
                    got: utilities.len(),
                });
            }
        }
        for (agent, sa) in &agents {
            if sa.relation.space() != &space || sa.attention.iter().any(|p| p.space() != &space) {
                return Err(SpaceError::SpaceMismatch.into());
            }
            if sa.attention.len() != n {
                return Err(
                    ModelError::PartitionCount(agent.clone(), sa.attention.len(), n).into(),
                );
            }
        }
        if agents.is_empty() {
            return Err(ModelError::NoAgents.into());
        }
        Ok(ChoiceScenario {
            space,
            prior,
            acts,
            agents,
        })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn prior(&self) -> &[BigRational] {
        &self.prior
    }

    pub fn prior_of(&self, e: &Event) -> Result<BigRational, DecisionError> {
        if e.space() != &self.space {
            return Err(SpaceError::SpaceMismatch.into());
        }
        Ok(e.states().map(|s| self.prior[s.0].clone()).sum())
    }

    pub fn acts(&self) -> impl Iterator<Item = (&str, &[BigRational])> {
        self.acts.iter().map(|(n, u)| (n.as_str(), u.as_slice()))
    }

    pub fn act_utilities(&self, name: &str) -> Result<&[BigRational], DecisionError> {
        self.acts
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, u)| u.as_slice())
            .ok_or_else(|| DecisionError::UnknownAct(name.to_string()))
    }

    pub fn agents(&self) -> impl Iterator<Item = &Agent> {
        self.agents.iter().map(|(a, _)| a)
    }

    pub fn agent(&self, agent: &Agent) -> Result<&ScenarioAgent, DecisionError> {
        self.agents
            .iter()
            .find(|(a, _)| a == agent)
            .map(|(_, sa)| sa)
            .ok_or_else(|| ModelError::UnknownAgent(agent.clone()).into())
    }

    /// The agent's implicit information set at a state: `P^i(state)`.
    pub fn info_set(&self, agent: &Agent, state: StateId) -> Result<Event, DecisionError> {
        Ok(self.agent(agent)?.relation.successors(state))
    }

    /// The attention subalgebra the agent uses at a state.
    pub fn attention_at(&self, agent: &Agent, state: StateId) -> Result<Subalgebra, DecisionError> {
        Ok(Subalgebra::new(
            self.agent(agent)?.attention[state.0].clone(),
        ))
    }

    /// The partitional model underlying the scenario: accessibility plus
    /// attention partitions.
    pub fn partitional_model(&self) -> PartitionalModel {
        let agents = self
            .agents
            .iter()
            .map(|(a, sa)| {
                (
                    a.clone(),
                    PartitionalOps {
                        relation: sa.relation.clone(),
                        partitions: sa.attention.clone(),
                    },
                )
            })
            .collect();
        PartitionalModel::new(self.space.clone(), agents)
            .expect("scenario agents are validated at construction")
    }

    pub fn model(&self) -> Model {
        self.partitional_model().into()
    }
}

/// `μ^C(E)`: the prior of `E` when `E` lies in the subalgebra, and the
/// distinguished undefined value (`None`) otherwise.
pub fn restrict_measure(
    sc: &ChoiceScenario,
    alg: &Subalgebra,
    e: &Event,
) -> Result<Option<BigRational>, DecisionError> {
    if e.space() != sc.space() || alg.space() != sc.space() {
        return Err(SpaceError::SpaceMismatch.into());
    }
    if alg.contains(e) {
        Ok(Some(sc.prior_of(e)?))
    } else {
        Ok(None)
    }
}

/// The events of the subalgebra the agent is certain of: `μ^C(E) = 1`.
pub fn explicit_beliefs(
    sc: &ChoiceScenario,
    alg: &Subalgebra,
) -> Result<Vec<Event>, DecisionError> {
    let mut out = Vec::new();
    for e in alg.events()? {
        if sc.prior_of(&e)?.is_one() {
            out.push(e);
        }
    }
    Ok(out)
}

/// Expected utility of an act conditional on an information event, by
/// exact conditionalization of the common prior.
pub fn conditional_eu(
    sc: &ChoiceScenario,
    act: &str,
    info: &Event,
) -> Result<BigRational, DecisionError> {
    let utilities = sc.act_utilities(act)?;
    let total = sc.prior_of(info)?;
    if total.is_zero() {
        return Err(DecisionError::ZeroMeasure);
    }
    let mut acc = BigRational::zero();
    for s in info.states() {
        acc += &sc.prior[s.0] * &utilities[s.0];
    }
    Ok(acc / total)
}

/// An agent's best act at a state together with the full expected-utility
/// table; ties break toward the lexicographically first act name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preferred {
    pub act: String,
    pub table: Vec<(String, BigRational)>,
}

pub fn preferred_act(
    sc: &ChoiceScenario,
    agent: &Agent,
    state: StateId,
) -> Result<Preferred, DecisionError> {
    if sc.acts.is_empty() {
        return Err(DecisionError::NoActs);
    }
    let info = sc.info_set(agent, state)?;
    let mut table = Vec::new();
    for (name, _) in &sc.acts {
        table.push((name.clone(), conditional_eu(sc, name, &info)?));
    }
    let mut best = 0;
    for (i, (_, eu)) in table.iter().enumerate().skip(1) {
        if eu > &table[best].1 {
            best = i;
        }
    }
    Ok(Preferred {
        act: table[best].0.clone(),
        table,
    })
}

#[derive(Debug, Clone)]
pub struct TradeRow {
    pub state: StateId,
    pub prefs: Vec<(Agent, Preferred)>,
}

#[derive(Debug, Clone)]
pub struct TradeReport {
    pub rows: Vec<TradeRow>,
    /// States where two agents strictly prefer opposite sides of some pair
    /// of acts.
    pub possible_at: Vec<StateId>,
}

impl TradeReport {
    pub fn possible(&self) -> bool {
        !self.possible_at.is_empty()
    }
}

/// Per-state preferences for every agent plus the trade verdict: trade is
/// possible at a state iff some pair of agents strictly prefers opposite
/// sides of some pair of acts.
pub fn trade_report(sc: &ChoiceScenario) -> Result<TradeReport, DecisionError> {
    let mut rows = Vec::new();
    let mut possible_at = Vec::new();
    for state in sc.space().states() {
        let mut prefs = Vec::new();
        for agent in sc.agents() {
            prefs.push((agent.clone(), preferred_act(sc, agent, state)?));
        }
        if opposed_strict_preferences(&prefs) {
            possible_at.push(state);
        }
        rows.push(TradeRow { state, prefs });
    }
    Ok(TradeReport { rows, possible_at })
}

fn opposed_strict_preferences(prefs: &[(Agent, Preferred)]) -> bool {
    for (ai, (_, pi)) in prefs.iter().enumerate() {
        for (_, pj) in prefs.iter().skip(ai + 1).map(|(a, p)| (a, p)) {
            for (act_a, eu_ia) in &pi.table {
                for (act_b, eu_ib) in &pi.table {
                    if act_a == act_b {
                        continue;
                    }
                    let eu_ja = &pj.table.iter().find(|(n, _)| n == act_a).unwrap().1;
                    let eu_jb = &pj.table.iter().find(|(n, _)| n == act_b).unwrap().1;
                    if eu_ia > eu_ib && eu_jb > eu_ja {
                        return true;
                    }
                }
            }
        }
    }
    false
}

// ---------------------------------------------------------------------------
// Scenario files

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("scenario file line {line}: {message}")]
pub struct ScenarioParseError {
    pub line: usize,
    pub message: String,
}

fn scen_err<T>(line: usize, message: impl Into<String>) -> Result<T, ScenarioParseError> {
    Err(ScenarioParseError {
        line,
        message: message.into(),
    })
}

fn parse_rational(text: &str, line: usize) -> Result<BigRational, ScenarioParseError> {
    let bad = || ScenarioParseError {
        line,
        message: format!("malformed rational `{text}`"),
    };
    let (numer, denom) = match text.split_once('/') {
        Some((n, d)) => (n, d),
        None => (text, "1"),
    };
    let numer = BigInt::from_str(numer).map_err(|_| bad())?;
    let denom = BigInt::from_str(denom).map_err(|_| bad())?;
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(numer, denom))
}

pub fn parse_scenario(text: &str) -> Result<ChoiceScenario, ScenarioParseError> {
    let mut space: Option<StateSpace> = None;
    let mut prior: Option<Vec<BigRational>> = None;
    let mut acts: Vec<(String, Vec<BigRational>)> = Vec::new();
    let mut agents: Vec<(Agent, Relation, Vec<Option<Partition>>)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix("states:") {
            let labels: Vec<&str> = rest.split_whitespace().collect();
            space = Some(StateSpace::new(labels).map_err(|e| ScenarioParseError {
                line: lineno,
                message: e.to_string(),
            })?);
        } else if let Some(rest) = content.strip_prefix("prior:") {
            let mut weights = Vec::new();
            for tok in rest.split_whitespace() {
                weights.push(parse_rational(tok, lineno)?);
            }
            prior = Some(weights);
        } else if let Some(rest) = content.strip_prefix("act ") {
            let Some((name, values)) = rest.split_once(':') else {
                return scen_err(lineno, "expected `act <name>: <utilities>`");
            };
            let mut utilities = Vec::new();
            for tok in values.split_whitespace() {
                utilities.push(parse_rational(tok, lineno)?);
            }
            acts.push((name.trim().to_string(), utilities));
        } else if let Some(rest) = content.strip_prefix("agent ") {
            let Some(sp) = &space else {
                return scen_err(lineno, "`states:` must come before `agent`");
            };
            let Some((name, spec)) = rest.split_once(':') else {
                return scen_err(lineno, "expected `agent <id>: R: ...`");
            };
            let Some(edges) = spec.trim().strip_prefix("R:") else {
                return scen_err(lineno, "expected `R:` after the agent name");
            };
            let relation = parse_relation(sp, edges.trim(), lineno)?;
            agents.push((Agent::new(name.trim()), relation, vec![None; sp.len()]));
        } else if let Some(rest) = content.strip_prefix("attention") {
            let Some(sp) = &space else {
                return scen_err(lineno, "`states:` must come before `attention`");
            };
            if agents.is_empty() {
                return scen_err(lineno, "`attention` must follow an `agent` line");
            }
            let rest = rest.trim();
            let Some(rest) = rest.strip_prefix('@') else {
                return scen_err(lineno, "expected `attention @<state>: {..} {..}`");
            };
            let Some((state_label, cells_text)) = rest.split_once(':') else {
                return scen_err(lineno, "expected `:` after the state label");
            };
            let state = sp
                .resolve(state_label.trim())
                .map_err(|e| ScenarioParseError {
                    line: lineno,
                    message: e.to_string(),
                })?;
            let partition = parse_partition(sp, cells_text, lineno)?;
            agents.last_mut().unwrap().2[state.0] = Some(partition);
        } else {
            return scen_err(lineno, format!("unrecognized line `{content}`"));
        }
    }

    let Some(space) = space else {
        return scen_err(1, "missing `states:` line");
    };
    let Some(prior) = prior else {
        return scen_err(1, "missing `prior:` line");
    };
    let agents = agents
        .into_iter()
        .map(|(a, relation, partial)| {
            let attention = partial
                .into_iter()
                .map(|p| p.unwrap_or_else(|| Partition::identity(space.clone())))
                .collect();
            (
                a,
                ScenarioAgent {
                    relation,
                    attention,
                },
            )
        })
        .collect();
    ChoiceScenario::new(space, prior, acts, agents).map_err(|e| ScenarioParseError {
        line: 1,
        message: e.to_string(),
    })
}

fn parse_relation(
    space: &StateSpace,
    text: &str,
    lineno: usize,
) -> Result<Relation, ScenarioParseError> {
    match text {
        "all" => return Ok(Relation::total(space.clone())),
        "identity" => return Ok(Relation::identity(space.clone())),
        _ => {}
    }
    let mut edges = Vec::new();
    for tok in text.split_whitespace() {
        let Some((from, to)) = tok.split_once("->") else {
            return scen_err(lineno, format!("malformed edge `{tok}`"));
        };
        let f = space.resolve(from).map_err(|e| ScenarioParseError {
            line: lineno,
            message: e.to_string(),
        })?;
        let t = space.resolve(to).map_err(|e| ScenarioParseError {
            line: lineno,
            message: e.to_string(),
        })?;
        edges.push((f, t));
    }
    Relation::from_edges(space.clone(), &edges).map_err(|e| ScenarioParseError {
        line: lineno,
        message: e.to_string(),
    })
}

fn parse_partition(
    space: &StateSpace,
    text: &str,
    lineno: usize,
) -> Result<Partition, ScenarioParseError> {
    let mut cells = Vec::new();
    let mut rest = text.trim();
    while !rest.is_empty() {
        let Some(open) = rest.find('{') else {
            return scen_err(lineno, "expected `{` in the partition block list");
        };
        let Some(close) = rest[open..].find('}') else {
            return scen_err(lineno, "unclosed `{` in the partition block list");
        };
        let cell = &rest[open..open + close + 1];
        let event = space.parse_event(cell).map_err(|e| ScenarioParseError {
            line: lineno,
            message: e.to_string(),
        })?;
        cells.push(event.mask());
        rest = rest[open + close + 1..].trim();
    }
    Partition::new(space.clone(), cells).map_err(|e| ScenarioParseError {
        line: lineno,
        message: e.to_string(),
    })
}

/// Renders a scenario in the documented file format.
pub fn render_scenario(sc: &ChoiceScenario) -> String {
    use fmt::Write;
    let mut out = String::new();
    let labels: Vec<&str> = sc.space().labels().collect();
    writeln!(out, "states: {}", labels.join(" ")).unwrap();
    let prior: Vec<String> = sc.prior().iter().map(|w| w.to_string()).collect();
    writeln!(out, "prior: {}", prior.join(" ")).unwrap();
    for (name, utilities) in sc.acts() {
        let us: Vec<String> = utilities.iter().map(|u| u.to_string()).collect();
        writeln!(out, "act {name}: {}", us.join(" ")).unwrap();
    }
    for (agent, sa) in &sc.agents {
        let relation = if sa.relation.is_total() {
            "all".to_string()
        } else if sa.relation.is_identity() {
            "identity".to_string()
        } else {
            sa.relation
                .edges()
                .iter()
                .map(|(x, y)| format!("{}->{}", sc.space().label(*x), sc.space().label(*y)))
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "agent {agent}: R: {relation}").unwrap();
        for state in sc.space().states() {
            let partition = &sa.attention[state.0];
            if partition == &Partition::identity(sc.space().clone()) {
                continue;
            }
            let cells: Vec<String> = partition.cells().map(|c| c.to_string()).collect();
            writeln!(
                out,
                "attention @{}: {}",
                sc.space().label(state),
                cells.join(" ")
            )
            .unwrap();
        }
    }
    out
}

/// The speculative-trade scenario: the five-state two-agent partitional
/// model with the uniform prior, a risky act `f` and a flat act `g`.
pub fn builtin_trade5() -> ChoiceScenario {
    let pm = crate::models::builtin_trade5();
    let space = pm.space().clone();
    let fifth = ratio(1, 5);
    let prior = vec![
        fifth.clone(),
        fifth.clone(),
        fifth.clone(),
        fifth.clone(),
        fifth,
    ];
    let f = [1, 5, 7, 5, 1].iter().map(|&u| ratio(u, 1)).collect();
    let g = (0..5).map(|_| ratio(4, 1)).collect();
    let agents = pm
        .agent_pairs()
        .iter()
        .map(|(a, ops)| {
            (
                a.clone(),
                ScenarioAgent {
                    relation: ops.relation.clone(),
                    attention: ops.partitions.clone(),
                },
            )
        })
        .collect();
    ChoiceScenario::new(space, prior, vec![("f".into(), f), ("g".into(), g)], agents)
        .expect("the builtin scenario is well-formed")
}

/// Loads a built-in scenario by name.
pub fn builtin_scenario(name: &str) -> Result<ChoiceScenario, DecisionError> {
    match name.to_ascii_lowercase().as_str() {
        "m_trade5" | "trade5" => Ok(builtin_trade5()),
        _ => Err(ModelError::UnknownBuiltin(name.to_string()).into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{dlr_report, unawareness_witness};
    use crate::models::DlrPartitionalModel;

    fn alice() -> Agent {
        Agent::new("A")
    }

    fn bob() -> Agent {
        Agent::new("B")
    }

    fn uniform4() -> ChoiceScenario {
        let space = StateSpace::numbered(4).unwrap();
        let q = ratio(1, 4);
        let prior = vec![q.clone(), q.clone(), q.clone(), q];
        let acts = vec![("f".into(), (1..=4).map(|u| ratio(u, 1)).collect())];
        let agents = vec![(
            Agent::new("1"),
            ScenarioAgent {
                relation: Relation::identity(space.clone()),
                attention: (0..4).map(|_| Partition::identity(space.clone())).collect(),
            },
        )];
        ChoiceScenario::new(space, prior, acts, agents).unwrap()
    }

    #[test]
    fn restricted_measure_examples() {
        let sc = uniform4();
        let space = sc.space().clone();
        let alg = Subalgebra::new(Partition::new(space.clone(), vec![0b0011, 0b1100]).unwrap());
        let half = sc.space().event(0b0011);
        assert_eq!(
            restrict_measure(&sc, &alg, &half).unwrap(),
            Some(ratio(1, 2))
        );
        let one = sc.space().event(0b0001);
        assert_eq!(restrict_measure(&sc, &alg, &one).unwrap(), None);
        let full_alg = Subalgebra::full(space.clone());
        for mask in 0..16u64 {
            let e = space.event(mask);
            assert_eq!(
                restrict_measure(&sc, &full_alg, &e).unwrap(),
                Some(sc.prior_of(&e).unwrap())
            );
        }
    }

    #[test]
    fn explicit_belief_examples() {
        let sc = uniform4();
        let space = sc.space().clone();
        let alg = Subalgebra::new(Partition::new(space.clone(), vec![0b0011, 0b1100]).unwrap());
        assert_eq!(
            explicit_beliefs(&sc, &alg).unwrap(),
            vec![space.full_event()]
        );

        let concentrated = {
            let mut prior = vec![BigRational::zero(); 4];
            prior[0] = BigRational::one();
            ChoiceScenario::new(
                space.clone(),
                prior,
                vec![("f".into(), (1..=4).map(|u| ratio(u, 1)).collect())],
                vec![(
                    Agent::new("1"),
                    ScenarioAgent {
                        relation: Relation::identity(space.clone()),
                        attention: (0..4).map(|_| Partition::identity(space.clone())).collect(),
                    },
                )],
            )
            .unwrap()
        };
        let beliefs = explicit_beliefs(&concentrated, &alg).unwrap();
        assert_eq!(beliefs, vec![space.event(0b0011), space.full_event()]);
        let all = explicit_beliefs(&concentrated, &Subalgebra::full(space.clone())).unwrap();
        assert_eq!(all.len(), 8);
        assert!(all.iter().all(|e| e.contains(StateId(0))));
    }

    #[test]
    fn trade5_expected_utilities_are_exact() {
        let sc = builtin_trade5();
        let info_alice_1 = sc.info_set(&alice(), StateId(0)).unwrap();
        assert_eq!(info_alice_1, sc.space().event(0b00111));
        assert_eq!(
            conditional_eu(&sc, "f", &info_alice_1).unwrap(),
            ratio(13, 3)
        );
        let everything = sc.space().full_event();
        assert_eq!(conditional_eu(&sc, "f", &everything).unwrap(), ratio(19, 5));
        for state in sc.space().states() {
            let info = sc.info_set(&bob(), state).unwrap();
            assert_eq!(conditional_eu(&sc, "g", &info).unwrap(), ratio(4, 1));
        }
        assert_eq!(
            conditional_eu(&sc, "f", &sc.space().event(0b00100)).unwrap(),
            ratio(7, 1)
        );
        assert!(matches!(
            conditional_eu(&sc, "f", &sc.space().empty_event()),
            Err(DecisionError::ZeroMeasure)
        ));
        assert!(matches!(
            conditional_eu(&sc, "h", &everything),
            Err(DecisionError::UnknownAct(_))
        ));
    }

    #[test]
    fn constant_acts_and_whole_space_conditioning() {
        let sc = builtin_trade5();
        // a constant act returns its constant on any information set
        for mask in 1..32u64 {
            let info = sc.space().event(mask);
            assert_eq!(conditional_eu(&sc, "g", &info).unwrap(), ratio(4, 1));
        }
        // conditioning on everything is the prior expectation
        let expect: BigRational = sc
            .space()
            .states()
            .map(|s| &sc.prior()[s.0] * &sc.act_utilities("f").unwrap()[s.0])
            .sum();
        assert_eq!(
            conditional_eu(&sc, "f", &sc.space().full_event()).unwrap(),
            expect
        );
    }

    #[test]
    fn preferences_and_trade_verdict() {
        let sc = builtin_trade5();
        for (state, expected_eu_f) in [
            (0, ratio(13, 3)),
            (1, ratio(5, 1)),
            (2, ratio(7, 1)),
            (3, ratio(5, 1)),
            (4, ratio(13, 3)),
        ] {
            let pref = preferred_act(&sc, &alice(), StateId(state)).unwrap();
            assert_eq!(pref.act, "f", "Alice at state {}", state + 1);
            let eu_f = pref.table.iter().find(|(n, _)| n == "f").unwrap().1.clone();
            assert_eq!(eu_f, expected_eu_f);
        }
        for state in sc.space().states() {
            let pref = preferred_act(&sc, &bob(), state).unwrap();
            assert_eq!(pref.act, "g");
            let eu_f = pref.table.iter().find(|(n, _)| n == "f").unwrap().1.clone();
            assert_eq!(eu_f, ratio(19, 5));
        }
        let report = trade_report(&sc).unwrap();
        assert_eq!(report.possible_at.len(), 5);
        assert!(report.possible());
    }

    #[test]
    fn degenerate_scenarios_allow_no_trade() {
        // single act
        let sc = uniform4();
        assert!(!trade_report(&sc).unwrap().possible());

        // identical fully informed agents
        let space = StateSpace::numbered(3).unwrap();
        let third = ratio(1, 3);
        let prior = vec![third.clone(), third.clone(), third];
        let acts = vec![
            ("f".into(), vec![ratio(1, 1), ratio(2, 1), ratio(3, 1)]),
            ("g".into(), vec![ratio(3, 1), ratio(2, 1), ratio(1, 1)]),
        ];
        let mk_agent = |space: &StateSpace| ScenarioAgent {
            relation: Relation::identity(space.clone()),
            attention: (0..3).map(|_| Partition::identity(space.clone())).collect(),
        };
        let agents = vec![
            (Agent::new("x"), mk_agent(&space)),
            (Agent::new("y"), mk_agent(&space)),
        ];
        let sc = ChoiceScenario::new(space, prior, acts, agents).unwrap();
        assert!(!trade_report(&sc).unwrap().possible());
    }

    #[test]
    fn ties_break_lexicographically() {
        let space = StateSpace::numbered(2).unwrap();
        let prior = vec![ratio(1, 2), ratio(1, 2)];
        let acts = vec![
            ("zeta".into(), vec![ratio(1, 1), ratio(1, 1)]),
            ("beta".into(), vec![ratio(1, 1), ratio(1, 1)]),
        ];
        let agents = vec![(
            Agent::new("1"),
            ScenarioAgent {
                relation: Relation::total(space.clone()),
                attention: (0..2).map(|_| Partition::identity(space.clone())).collect(),
            },
        )];
        let sc = ChoiceScenario::new(space, prior, acts, agents).unwrap();
        let pref = preferred_act(&sc, &Agent::new("1"), StateId(0)).unwrap();
        assert_eq!(pref.act, "beta");
    }

    #[test]
    fn underlying_structure_is_a_partitional_dlr_model_at_state_one() {
        let sc = builtin_trade5();
        let pm = sc.partitional_model();
        assert_eq!(pm, crate::models::builtin_trade5());
        let m: Model = pm.clone().into();

        // Bob's axioms hold everywhere; Alice's at states 1, 3, 5 only.
        for state in sc.space().states() {
            let report = dlr_report(&m, state, 1).unwrap();
            for (agent, verdicts) in &report.per_agent {
                let all_pass = verdicts.iter().all(|v| v.valid);
                if agent == &bob() {
                    assert!(all_pass, "Bob at {state:?}");
                } else {
                    let expected = matches!(state.0, 0 | 2 | 4);
                    assert_eq!(all_pass, expected, "Alice at {state:?}");
                }
            }
        }
        assert!(DlrPartitionalModel::new(pm, StateId(0)).is_ok());

        // nontrivial unawareness: Alice at state 1
        let w = unawareness_witness(&m, StateId(0), &alice()).unwrap();
        assert!(w.is_some());
    }

    #[test]
    fn scenario_files_round_trip() {
        let sc = builtin_trade5();
        let text = render_scenario(&sc);
        let back = parse_scenario(&text).unwrap();
        assert_eq!(back, sc);
        // and the rendering is stable
        assert_eq!(render_scenario(&back), text);
    }

    #[test]
    fn scenario_parse_errors_carry_line_numbers() {
        let bad = "states: 1 2\nprior: 1/2 1/3\n";
        let err = parse_scenario(bad).unwrap_err();
        assert!(err.message.contains("sum"));

        let bad = "states: 1 2\nprior: 1/2 1/2\nnonsense: 4\n";
        let err = parse_scenario(bad).unwrap_err();
        assert_eq!(err.line, 3);

        let bad = "states: 1 2\nprior: 1/2 1/2\nact f: 1 2/0\n";
        assert!(parse_scenario(bad)
            .unwrap_err()
            .message
            .contains("rational"));
    }

    #[test]
    fn validation_rejects_bad_scenarios() {
        let space = StateSpace::numbered(2).unwrap();
        let err = ChoiceScenario::new(
            space.clone(),
            vec![ratio(1, 2), ratio(-1, 2)],
            vec![],
            vec![(
                Agent::new("1"),
                ScenarioAgent {
                    relation: Relation::identity(space.clone()),
                    attention: vec![
                        Partition::identity(space.clone()),
                        Partition::identity(space.clone()),
                    ],
                },
            )],
        );
        assert!(matches!(err, Err(DecisionError::NegativeWeight)));
    }
}
