//! Model files: a whitespace-insensitive text format for partitional models
//! (relations and per-state partitions) and explicit-table standard models.
//!
//! ```text
//! # the running four-state example
//! states: 1 2 3 4
//! distinguished: 1
//! agent 1 {
//!   R: 1->1 1->2 1->3 1->4 2->2 3->3 4->4 ;
//!   partition @1: {1} {2 3 4} ;
//!   partition @2: {1} {2} {3 4} ;
//! }
//! valuation v: p = {1 2}
//! ```
//!
//! Relations may be edge lists or the keywords `all` / `identity`; states
//! without a `partition` line get the discrete partition. Standard models
//! use top-level `k-table:` / `a-table:` blocks of `{..} -> {..}` entries
//! covering every event (a single agent `1` is implied). `#` starts a
//! comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::{anyhow, bail, Result};

use awarekit::formula::Agent;
use awarekit::models::{
    KnowledgeModel, Model, OperatorTable, Partition, PartitionalModel, PartitionalOps, Relation,
    StandardModel,
};
use awarekit::semantics::Valuation;
use awarekit::statespace::{StateId, StateSpace};

const KEYWORDS: [&str; 10] = [
    "states",
    "distinguished",
    "agent",
    "valuation",
    "k-table",
    "a-table",
    "R",
    "partition",
    "all",
    "identity",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    LBrace,
    RBrace,
    Colon,
    Semi,
    At,
    Arrow,
    Eq,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut line = 1;
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\n' => {
                line += 1;
                i += 1;
            }
            b' ' | b'\t' | b'\r' => i += 1,
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'{' => {
                toks.push((Tok::LBrace, line));
                i += 1;
            }
            b'}' => {
                toks.push((Tok::RBrace, line));
                i += 1;
            }
            b':' => {
                toks.push((Tok::Colon, line));
                i += 1;
            }
            b';' => {
                toks.push((Tok::Semi, line));
                i += 1;
            }
            b'@' => {
                toks.push((Tok::At, line));
                i += 1;
            }
            b'=' => {
                toks.push((Tok::Eq, line));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    toks.push((Tok::Arrow, line));
                    i += 2;
                } else {
                    bail!("model file line {line}: stray `-`");
                }
            }
            b if b.is_ascii_alphanumeric() || b == b'_' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i];
                    if c.is_ascii_alphanumeric() || c == b'_' {
                        i += 1;
                    } else if c == b'-' && bytes.get(i + 1) != Some(&b'>') {
                        // keywords like `k-table` carry a hyphen
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((Tok::Word(text[start..i].to_string()), line));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap();
                bail!("model file line {line}: unexpected character `{ch}`");
            }
        }
    }
    Ok(toks)
}

#[derive(Debug, Clone)]
pub enum RelationSpec {
    All,
    Identity,
    Edges(Vec<(String, String)>),
}

#[derive(Debug, Clone)]
pub struct AgentBlock {
    pub id: String,
    pub relation: RelationSpec,
    /// `(state, cells)` pairs; cells are lists of state labels.
    pub partitions: Vec<(String, Vec<Vec<String>>)>,
}

/// Letter-to-labels assignments of one named valuation.
pub type ValuationSpec = Vec<(String, Vec<String>)>;

/// The parsed, unresolved form of a model file.
#[derive(Debug, Clone, Default)]
pub struct ModelFile {
    pub states: Vec<String>,
    pub distinguished: Option<String>,
    pub agents: Vec<AgentBlock>,
    pub valuations: Vec<(String, ValuationSpec)>,
    pub k_table: Option<Vec<(Vec<String>, Vec<String>)>>,
    pub a_table: Option<Vec<(Vec<String>, Vec<String>)>>,
}

/// A resolved model together with the file's optional extras.
#[derive(Debug, Clone)]
pub struct LoadedModel {
    pub model: Model,
    pub distinguished: Option<StateId>,
    pub valuations: BTreeMap<String, Valuation>,
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|(t, _)| t)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos.min(self.toks.len().saturating_sub(1)))
            .map(|(_, l)| *l)
            .unwrap_or(0)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            bail!("model file line {}: expected {what}", self.line())
        }
    }

    fn word(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Word(_)) => match self.bump() {
                Tok::Word(w) => Ok(w),
                _ => unreachable!(),
            },
            _ => bail!("model file line {}: expected {what}", self.line()),
        }
    }

    fn at_keyword(&self) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if KEYWORDS.contains(&w.as_str()))
    }

    /// Words up to the next keyword or non-word token.
    fn label_run(&mut self) -> Vec<String> {
        let mut out = Vec::new();
        while matches!(self.peek(), Some(Tok::Word(_))) && !self.at_keyword() {
            out.push(self.word("label").unwrap());
        }
        out
    }

    fn cell(&mut self) -> Result<Vec<String>> {
        self.eat(Tok::LBrace, "`{`")?;
        let mut labels = Vec::new();
        while matches!(self.peek(), Some(Tok::Word(_))) {
            labels.push(self.word("state label")?);
        }
        self.eat(Tok::RBrace, "`}`")?;
        Ok(labels)
    }

    fn table_entries(&mut self) -> Result<Vec<(Vec<String>, Vec<String>)>> {
        let mut entries = Vec::new();
        while self.peek() == Some(&Tok::LBrace) {
            let from = self.cell()?;
            self.eat(Tok::Arrow, "`->`")?;
            let to = self.cell()?;
            entries.push((from, to));
        }
        Ok(entries)
    }
}

pub fn parse(text: &str) -> Result<ModelFile> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut file = ModelFile::default();
    while let Some(tok) = p.peek() {
        let line = p.line();
        let Tok::Word(word) = tok.clone() else {
            bail!("model file line {line}: expected a section keyword");
        };
        match word.as_str() {
            "states" => {
                p.bump();
                p.eat(Tok::Colon, "`:` after `states`")?;
                file.states = p.label_run();
                if file.states.is_empty() {
                    bail!("model file line {line}: `states:` needs at least one label");
                }
            }
            "distinguished" => {
                p.bump();
                p.eat(Tok::Colon, "`:` after `distinguished`")?;
                file.distinguished = Some(p.word("state label")?);
            }
            "agent" => {
                p.bump();
                let id = p.word("agent id")?;
                p.eat(Tok::LBrace, "`{` after the agent id")?;
                let mut relation = None;
                let mut partitions = Vec::new();
                loop {
                    match p.peek() {
                        Some(Tok::RBrace) => {
                            p.bump();
                            break;
                        }
                        Some(Tok::Semi) => {
                            p.bump();
                        }
                        Some(Tok::Word(w)) if w == "R" => {
                            p.bump();
                            p.eat(Tok::Colon, "`:` after `R`")?;
                            relation = Some(match p.peek() {
                                Some(Tok::Word(w)) if w == "all" => {
                                    p.bump();
                                    RelationSpec::All
                                }
                                Some(Tok::Word(w)) if w == "identity" => {
                                    p.bump();
                                    RelationSpec::Identity
                                }
                                _ => {
                                    let mut edges = Vec::new();
                                    while matches!(p.peek(), Some(Tok::Word(_))) && !p.at_keyword()
                                    {
                                        let from = p.word("state label")?;
                                        p.eat(Tok::Arrow, "`->` in an edge")?;
                                        let to = p.word("state label")?;
                                        edges.push((from, to));
                                    }
                                    RelationSpec::Edges(edges)
                                }
                            });
                        }
                        Some(Tok::Word(w)) if w == "partition" => {
                            p.bump();
                            p.eat(Tok::At, "`@` after `partition`")?;
                            let state = p.word("state label")?;
                            p.eat(Tok::Colon, "`:` after the state label")?;
                            let mut cells = Vec::new();
                            while p.peek() == Some(&Tok::LBrace) {
                                cells.push(p.cell()?);
                            }
                            partitions.push((state, cells));
                        }
                        _ => bail!(
                            "model file line {}: expected `R:`, `partition`, `;` or `}}`",
                            p.line()
                        ),
                    }
                }
                let relation = relation
                    .ok_or_else(|| anyhow!("model file line {line}: agent `{id}` has no `R:`"))?;
                file.agents.push(AgentBlock {
                    id,
                    relation,
                    partitions,
                });
            }
            "valuation" => {
                p.bump();
                let name = p.word("valuation name")?;
                p.eat(Tok::Colon, "`:` after the valuation name")?;
                let mut entries = Vec::new();
                while matches!(p.peek(), Some(Tok::Word(_)))
                    && !p.at_keyword()
                    && p.peek2() == Some(&Tok::Eq)
                {
                    let letter = p.word("proposition letter")?;
                    p.eat(Tok::Eq, "`=`")?;
                    entries.push((letter, p.cell()?));
                }
                if entries.is_empty() {
                    bail!("model file line {line}: valuation `{name}` assigns no letters");
                }
                file.valuations.push((name, entries));
            }
            "k-table" => {
                p.bump();
                p.eat(Tok::Colon, "`:` after `k-table`")?;
                file.k_table = Some(p.table_entries()?);
            }
            "a-table" => {
                p.bump();
                p.eat(Tok::Colon, "`:` after `a-table`")?;
                file.a_table = Some(p.table_entries()?);
            }
            other => bail!("model file line {line}: unknown section `{other}`"),
        }
    }
    Ok(file)
}

impl ModelFile {
    fn space(&self) -> Result<StateSpace> {
        if self.states.is_empty() {
            bail!("model file has no `states:` line");
        }
        Ok(StateSpace::new(self.states.iter().map(String::as_str))?)
    }

    fn build_relation(
        &self,
        space: &StateSpace,
        spec: &RelationSpec,
        repair: bool,
    ) -> Result<Relation> {
        Ok(match spec {
            RelationSpec::All => Relation::total(space.clone()),
            RelationSpec::Identity => Relation::identity(space.clone()),
            RelationSpec::Edges(edges) => {
                let mut resolved = Vec::new();
                for (from, to) in edges {
                    resolved.push((space.resolve(from)?, space.resolve(to)?));
                }
                if repair {
                    let mut rows = vec![0u64; space.len()];
                    for (f, t) in resolved {
                        rows[f.0] |= 1 << t.0;
                    }
                    Relation::closure(space.clone(), rows)
                } else {
                    Relation::from_edges(space.clone(), &resolved)?
                }
            }
        })
    }

    fn build_table(
        &self,
        space: &StateSpace,
        entries: &[(Vec<String>, Vec<String>)],
        which: &str,
    ) -> Result<OperatorTable> {
        let size = 1usize << space.len();
        let mut map = vec![None; size];
        for (from, to) in entries {
            let from = space.event_from_labels(from.iter().map(String::as_str))?;
            let to = space.event_from_labels(to.iter().map(String::as_str))?;
            let slot = &mut map[from.mask() as usize];
            if slot.is_some() {
                bail!("{which} maps {from} twice");
            }
            *slot = Some(to.mask());
        }
        let mut flat = Vec::with_capacity(size);
        for (mask, slot) in map.into_iter().enumerate() {
            match slot {
                Some(v) => flat.push(v),
                None => bail!(
                    "{which} is missing an entry for {}",
                    space.event(mask as u64)
                ),
            }
        }
        Ok(OperatorTable::new(space.clone(), flat)?)
    }

    /// Resolves the file into a model. `repair_relations` takes the
    /// reflexive-transitive closure of edge lists instead of rejecting
    /// non-preorders.
    pub fn build(&self, repair_relations: bool) -> Result<LoadedModel> {
        let space = self.space()?;
        let model: Model = match (&self.k_table, &self.a_table) {
            (Some(k), Some(a)) => {
                if !self.agents.is_empty() {
                    bail!("a model file gives either agent blocks or k/a tables, not both");
                }
                let k = self.build_table(&space, k, "k-table")?;
                let a = self.build_table(&space, a, "a-table")?;
                StandardModel::single_agent(Agent::new("1"), k, a)?.into()
            }
            (Some(_), None) => bail!("k-table without a-table; use both for a standard model"),
            (None, Some(_)) => bail!("a-table without k-table; use both for a standard model"),
            (None, None) => {
                if self.agents.is_empty() {
                    bail!("model file has no agent blocks and no operator tables");
                }
                let mut agents = Vec::new();
                for block in &self.agents {
                    let relation =
                        self.build_relation(&space, &block.relation, repair_relations)?;
                    let mut partitions: Vec<Partition> = (0..space.len())
                        .map(|_| Partition::identity(space.clone()))
                        .collect();
                    for (state, cells) in &block.partitions {
                        let state = space.resolve(state)?;
                        let mut masks = Vec::new();
                        for cell in cells {
                            masks.push(
                                space
                                    .event_from_labels(cell.iter().map(String::as_str))?
                                    .mask(),
                            );
                        }
                        partitions[state.0] = Partition::new(space.clone(), masks)?;
                    }
                    agents.push((
                        Agent::new(block.id.as_str()),
                        PartitionalOps {
                            relation,
                            partitions,
                        },
                    ));
                }
                PartitionalModel::new(space.clone(), agents)?.into()
            }
        };
        let distinguished = match &self.distinguished {
            Some(label) => Some(space.resolve(label)?),
            None => None,
        };
        let mut valuations = BTreeMap::new();
        for (name, entries) in &self.valuations {
            let mut v = Valuation::new(space.clone());
            for (letter, labels) in entries {
                let event = space.event_from_labels(labels.iter().map(String::as_str))?;
                v.set(letter.as_str(), &event)?;
            }
            valuations.insert(name.clone(), v);
        }
        Ok(LoadedModel {
            model,
            distinguished,
            valuations,
        })
    }

    /// The knowledge part of the file: a plain `k-table` is enough, and a
    /// partitional file contributes the `k` its relation induces.
    pub fn build_knowledge(&self, agent: Option<&Agent>, repair: bool) -> Result<KnowledgeModel> {
        let space = self.space()?;
        if let Some(entries) = &self.k_table {
            let k = self.build_table(&space, entries, "k-table")?;
            return Ok(KnowledgeModel::new(
                agent.cloned().unwrap_or_else(|| Agent::new("1")),
                k,
            ));
        }
        let loaded = self.build(repair)?;
        let agent = match agent {
            Some(a) => a.clone(),
            None => {
                let agents = loaded.model.agents();
                if agents.len() != 1 {
                    bail!("model has several agents; pick one with --agent");
                }
                agents[0].clone()
            }
        };
        Ok(KnowledgeModel::from_model(&loaded.model, &agent)?)
    }
}

/// Renders a model in the documented format; partitions are written
/// explicitly for every state so the output is unambiguous.
pub fn render_model(model: &Model, distinguished: Option<StateId>) -> String {
    let mut out = String::new();
    let space = model.space();
    let labels: Vec<&str> = space.labels().collect();
    writeln!(out, "states: {}", labels.join(" ")).unwrap();
    if let Some(d) = distinguished {
        writeln!(out, "distinguished: {}", space.label(d)).unwrap();
    }
    match model {
        Model::Partitional(pm) => {
            for (agent, ops) in pm.agent_pairs() {
                writeln!(out, "agent {agent} {{").unwrap();
                let relation = if ops.relation.is_total() {
                    "all".to_string()
                } else if ops.relation.is_identity() {
                    "identity".to_string()
                } else {
                    ops.relation
                        .edges()
                        .iter()
                        .map(|(x, y)| format!("{}->{}", space.label(*x), space.label(*y)))
                        .collect::<Vec<_>>()
                        .join(" ")
                };
                writeln!(out, "  R: {relation} ;").unwrap();
                for state in space.states() {
                    let cells: Vec<String> = ops.partitions[state.0]
                        .cells()
                        .map(|c| c.to_string())
                        .collect();
                    writeln!(
                        out,
                        "  partition @{}: {} ;",
                        space.label(state),
                        cells.join(" ")
                    )
                    .unwrap();
                }
                writeln!(out, "}}").unwrap();
            }
        }
        Model::Standard(sm) => {
            let agents: Vec<_> = sm.agents().collect();
            assert_eq!(agents.len(), 1, "table files describe a single agent");
            let ops = sm.ops(agents[0]).unwrap();
            writeln!(out, "k-table:").unwrap();
            for (from, to) in ops.k.entries() {
                writeln!(out, "  {from} -> {to}").unwrap();
            }
            writeln!(out, "a-table:").unwrap();
            for (from, to) in ops.a.entries() {
                writeln!(out, "  {from} -> {to}").unwrap();
            }
        }
    }
    out
}
