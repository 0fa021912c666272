//! Theorem machinery: DLR-axiom reports, unawareness witnesses, the
//! extension constructions, automorphisms and coherence, and bounded
//! countermodel search.

pub mod extension;
pub mod generate;
pub mod search;
pub mod symmetry;

pub use extension::{extend_to_dlr, extend_to_dlr_ck, ExtendError};
pub use search::{countermodel_search, Countermodel, SearchError, SearchMode};
pub use symmetry::{automorphisms, is_coherent, Automorphism, CoherenceReport, SymmetryError};

use crate::formula::Agent;
use crate::models::{Model, ModelError};
use crate::semantics::{schema_check_instance, schema_witness_at, EvalError, Schema, Valuation};
use crate::statespace::{Event, StateId, EVENT_ENUM_CAP};

/// Verdict for one schema instance, with a falsifying event assignment when
/// it fails.
#[derive(Debug, Clone)]
pub struct SchemaVerdict {
    pub schema: Schema,
    pub valid: bool,
    pub witness: Option<Valuation>,
}

/// Per-agent verdicts for the DLR axioms (and the n-Plausibility family) at
/// one state.
#[derive(Debug, Clone)]
pub struct DlrReport {
    pub state: StateId,
    pub per_agent: Vec<(Agent, Vec<SchemaVerdict>)>,
}

impl DlrReport {
    pub fn passed(&self) -> bool {
        self.per_agent
            .iter()
            .all(|(_, vs)| vs.iter().all(|v| v.valid))
    }

    pub fn failures(&self) -> impl Iterator<Item = (&Agent, &SchemaVerdict)> {
        self.per_agent
            .iter()
            .flat_map(|(a, vs)| vs.iter().filter(|v| !v.valid).map(move |v| (a, v)))
    }
}

/// Checks Plausibility, KU-Introspection, AU-Introspection and
/// `nPlausibility(1..=max_n)` for every agent at the state.
pub fn dlr_report(m: &Model, state: StateId, max_n: u32) -> Result<DlrReport, EvalError> {
    let mut schemas = vec![
        Schema::Plausibility,
        Schema::KuIntrospection,
        Schema::AuIntrospection,
    ];
    schemas.extend((1..=max_n).map(Schema::NPlausibility));
    let mut per_agent = Vec::new();
    for agent in m.agents() {
        let mut verdicts = Vec::new();
        for schema in &schemas {
            let tuple = [agent.clone()];
            let valid = schema_check_instance(m, schema, &tuple, Some(state))?;
            let witness = if valid {
                None
            } else {
                schema_witness_at(m, schema, &tuple, state)?
            };
            verdicts.push(SchemaVerdict {
                schema: *schema,
                valid,
                witness,
            });
        }
        per_agent.push((agent.clone(), verdicts));
    }
    Ok(DlrReport { state, per_agent })
}

/// Some event the agent is unaware of at the state, in canonical
/// (mask-ascending) order, or `None` when awareness is trivial there.
pub fn unawareness_witness(
    m: &Model,
    state: StateId,
    agent: &Agent,
) -> Result<Option<Event>, ModelError> {
    let space = m.space();
    if space.len() <= EVENT_ENUM_CAP {
        for mask in 0..=space.full_mask() {
            if m.a_mask(agent, mask)? >> state.0 & 1 == 0 {
                return Ok(Some(space.event(mask)));
            }
        }
        return Ok(None);
    }
    // Beyond the enumeration cap only partitional models exist; any proper
    // nonempty subset of a non-singleton cell does the job.
    match m {
        Model::Partitional(pm) => {
            let partition = &pm.ops(agent)?.partitions[state.0];
            for cell in partition.cell_masks() {
                if cell.count_ones() >= 2 {
                    let lowest = 1u64 << cell.trailing_zeros();
                    return Ok(Some(space.event(lowest)));
                }
            }
            Ok(None)
        }
        Model::Standard(_) => unreachable!("operator tables are capped"),
    }
}
