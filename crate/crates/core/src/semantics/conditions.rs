//! Event-level forms of the schema conditions (`k(-a(E)) = ∅` for
//! KU-Introspection, `a(E) = a(-E)` for AS, and so on), written as direct
//! loops over events. This is the second route of a dual check: schema
//! validity is decided by formula evaluation in the parent module, and the
//! two routes are required to agree by the test suites.

use crate::formula::Agent;
use crate::models::Model;
use crate::semantics::{EvalError, Schema};
use crate::statespace::{StateId, EVENT_ENUM_CAP};

struct Ops<'a> {
    m: &'a Model,
    full: u64,
}

impl Ops<'_> {
    fn k(&self, agent: &Agent, e: u64) -> Result<u64, EvalError> {
        Ok(self.m.k_mask(agent, e)?)
    }

    fn a(&self, agent: &Agent, e: u64) -> Result<u64, EvalError> {
        Ok(self.m.a_mask(agent, e)?)
    }

    fn ck(&self, agent: &Agent, e: u64) -> Result<u64, EvalError> {
        Ok(self.m.ck_mask(agent, e)?)
    }

    fn neg(&self, e: u64) -> u64 {
        self.full & !e
    }
}

fn holds(set: u64, state: StateId) -> bool {
    set >> state.0 & 1 == 1
}

/// Decides the schema instance at a state through its event-level condition.
pub fn schema_holds_at(
    m: &Model,
    schema: &Schema,
    agents: &[Agent],
    state: StateId,
) -> Result<bool, EvalError> {
    let n = m.space().len();
    if n > EVENT_ENUM_CAP {
        return Err(EvalError::QuantifierCap(n, EVENT_ENUM_CAP));
    }
    if agents.len() != schema.agent_arity() {
        return Err(EvalError::SchemaArity(
            schema.name(),
            schema.agent_arity(),
            agents.len(),
        ));
    }
    let ops = Ops {
        m,
        full: m.space().full_mask(),
    };
    let i = &agents[0];
    let w = state;
    let full = ops.full;
    match schema {
        Schema::Plausibility => {
            for e in 0..=full {
                if !holds(ops.a(i, e)?, w) {
                    let ke = ops.k(i, e)?;
                    if holds(ke, w) || holds(ops.k(i, ops.neg(ke))?, w) {
                        return Ok(false);
                    }
                }
            }
        }
        Schema::KuIntrospection => {
            for e in 0..=full {
                if holds(ops.k(i, ops.neg(ops.a(i, e)?))?, w) {
                    return Ok(false);
                }
            }
        }
        Schema::AuIntrospection => {
            for e in 0..=full {
                let ae = ops.a(i, e)?;
                if !holds(ae, w) && holds(ops.a(i, ops.neg(ae))?, w) {
                    return Ok(false);
                }
            }
        }
        Schema::Necessitation => return Ok(holds(ops.k(i, full)?, w)),
        Schema::Monotonicity => {
            for e in 0..=full {
                for f in 0..=full {
                    if holds(ops.k(i, e & f)?, w)
                        && !(holds(ops.k(i, e)?, w) && holds(ops.k(i, f)?, w))
                    {
                        return Ok(false);
                    }
                }
            }
        }
        Schema::WeakNecessitation => {
            if holds(ops.k(i, full)?, w) {
                return Ok(true);
            }
            for e in 0..=full {
                if holds(ops.k(i, e)?, w) {
                    return Ok(false);
                }
            }
        }
        Schema::Distribution => {
            for e in 0..=full {
                for f in 0..=full {
                    if holds(ops.k(i, e)?, w)
                        && holds(ops.k(i, f)?, w)
                        && !holds(ops.k(i, e & f)?, w)
                    {
                        return Ok(false);
                    }
                }
            }
        }
        Schema::AntiNecessitation => return Ok(!holds(ops.k(i, 0)?, w)),
        Schema::Reflexivity => {
            for e in 0..=full {
                if holds(ops.k(i, e)?, w) && !holds(e, w) {
                    return Ok(false);
                }
            }
        }
        Schema::PositiveIntrospection => {
            for e in 0..=full {
                let ke = ops.k(i, e)?;
                if holds(ke, w) && !holds(ops.k(i, ke)?, w) {
                    return Ok(false);
                }
            }
        }
        Schema::As => {
            for e in 0..=full {
                if holds(ops.a(i, ops.neg(e))?, w) && !holds(ops.a(i, e)?, w) {
                    return Ok(false);
                }
            }
        }
        Schema::Ac => {
            for e in 0..=full {
                for f in 0..=full {
                    if holds(ops.a(i, e & f)?, w)
                        && !(holds(ops.a(i, e)?, w) && holds(ops.a(i, f)?, w))
                    {
                        return Ok(false);
                    }
                }
            }
        }
        Schema::A4ij => {
            let j = &agents[1];
            for e in 0..=full {
                if holds(ops.a(i, e)?, w) && !holds(ops.a(i, ops.a(j, e)?)?, w) {
                    return Ok(false);
                }
            }
        }
        Schema::Ak4 => {
            let j = &agents[1];
            for e in 0..=full {
                if holds(ops.a(i, e)?, w) && !holds(ops.a(i, ops.k(j, e)?)?, w) {
                    return Ok(false);
                }
            }
        }
        Schema::CkPlausibility => {
            for e in 0..=full {
                if holds(ops.a(i, e)?, w) {
                    let ke = ops.k(i, e)?;
                    let consequent = ops.a(i, e)? | (ops.neg(ke) & ops.neg(ops.k(i, ops.neg(ke))?));
                    if !holds(ops.ck(i, consequent)?, w) {
                        return Ok(false);
                    }
                }
            }
        }
        Schema::CkKuIntrospection => {
            for e in 0..=full {
                if holds(ops.a(i, e)?, w) {
                    let body = ops.neg(ops.k(i, ops.neg(ops.a(i, e)?))?);
                    if !holds(ops.ck(i, body)?, w) {
                        return Ok(false);
                    }
                }
            }
        }
        Schema::CkAuIntrospection => {
            for e in 0..=full {
                if holds(ops.a(i, e)?, w) {
                    let ae = ops.a(i, e)?;
                    let body = ae | ops.neg(ops.a(i, ops.neg(ae))?);
                    if !holds(ops.ck(i, body)?, w) {
                        return Ok(false);
                    }
                }
            }
        }
        Schema::NPlausibility(n) => {
            for e in 0..=full {
                if !holds(ops.a(i, e)?, w) {
                    let mut chain = e;
                    for _ in 0..*n {
                        chain = ops.neg(ops.k(i, chain)?);
                    }
                    if !holds(chain, w) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Model-wide version: the condition must hold at every state.
pub fn schema_holds_on(m: &Model, schema: &Schema, agents: &[Agent]) -> Result<bool, EvalError> {
    for state in m.space().states() {
        if !schema_holds_at(m, schema, agents, state)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{builtin_dlr3, builtin_ring4};
    use crate::semantics::schema_check_instance;

    fn all_schemas() -> Vec<Schema> {
        let mut v = Schema::registry();
        v.extend([Schema::NPlausibility(2), Schema::NPlausibility(3)]);
        v
    }

    #[test]
    fn agrees_with_formula_route_on_builtins() {
        for m in [Model::from(builtin_dlr3()), Model::from(builtin_ring4())] {
            let agents: Vec<Agent> = m.agents().into_iter().cloned().collect();
            for schema in all_schemas() {
                for i in &agents {
                    let tuple: Vec<Agent> = match schema.agent_arity() {
                        1 => vec![i.clone()],
                        _ => vec![i.clone(), i.clone()],
                    };
                    for state in m.space().states() {
                        let via_conditions = schema_holds_at(&m, &schema, &tuple, state).unwrap();
                        let via_formulas =
                            schema_check_instance(&m, &schema, &tuple, Some(state)).unwrap();
                        assert_eq!(
                            via_conditions, via_formulas,
                            "{schema} at {state:?} of {m:?}"
                        );
                    }
                }
            }
        }
    }
}
