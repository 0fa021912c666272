//! Extending knowledge-only models with an awareness operator so that the
//! DLR axioms (and optionally their common-knowledge strengthenings) hold at
//! a chosen state while leaving the agent unaware of a chosen event.
//!
//! The construction: find an event `F` containing the state whose iterated
//! non-knowledge chain also contains it, then set `a(E) = a(F) = -F` and
//! `a(G) = Ω` everywhere else. Existence of such an `F`, together with the
//! matching chain condition on `E`, is exactly equivalent to extendability.

use thiserror::Error;

use crate::models::{KnowledgeModel, ModelError, OperatorTable, StandardModel};
use crate::semantics::{schema_check_instance, EvalError, Schema};
use crate::statespace::{Event, StateId};

#[derive(Debug, Error)]
pub enum ExtendError {
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("n-Plausibility depth must be at least 1")]
    BadDepth,
    #[error("construction failed its advertised checks: {0}")]
    Postcondition(String),
}

fn chain_holds(km: &KnowledgeModel, alpha: StateId, start: u64, depth: u32) -> bool {
    let full = km.space().full_mask();
    let mut cur = start;
    for _ in 0..depth {
        cur = full & !km.k_mask(cur);
        if cur >> alpha.0 & 1 == 0 {
            return false;
        }
    }
    true
}

fn plausibility_depth(n: Option<u32>) -> Result<u32, ExtendError> {
    match n {
        None => Ok(2), // Plausibility proper: ¬K and ¬K¬K
        Some(0) => Err(ExtendError::BadDepth),
        Some(d) => Ok(d),
    }
}

fn build_extension(
    km: &KnowledgeModel,
    alpha: StateId,
    e: &Event,
    depth: u32,
) -> Result<Option<StandardModel>, ExtendError> {
    let space = km.space().clone();
    if e.space() != &space {
        return Err(ModelError::from(crate::statespace::SpaceError::SpaceMismatch).into());
    }
    // (i) the iterated non-knowledge chain over E passes through alpha
    if !chain_holds(km, alpha, e.mask(), depth) {
        return Ok(None);
    }
    // (ii) search events in canonical order for an F containing alpha whose
    // chain also passes through alpha
    let full = space.full_mask();
    let mut found = None;
    for f in 0..=full {
        if f >> alpha.0 & 1 == 1 && chain_holds(km, alpha, f, depth) {
            found = Some(f);
            break;
        }
    }
    let Some(f) = found else {
        return Ok(None);
    };
    let e_mask = e.mask();
    let a = OperatorTable::from_fn(space, |g| {
        if g == e_mask || g == f {
            full & !f
        } else {
            full
        }
    })?;
    Ok(Some(km.extend_with(a)?))
}

fn verify_at(
    model: &StandardModel,
    alpha: StateId,
    e: &Event,
    schemas: &[Schema],
) -> Result<(), ExtendError> {
    let agent = model
        .agents()
        .next()
        .expect("extensions are single-agent")
        .clone();
    let m = crate::models::Model::Standard(model.clone());
    for schema in schemas {
        if !schema_check_instance(&m, schema, std::slice::from_ref(&agent), Some(alpha))? {
            return Err(ExtendError::Postcondition(format!(
                "{schema} fails at the distinguished state"
            )));
        }
    }
    if m.a_mask(&agent, e.mask())? >> alpha.0 & 1 == 1 {
        return Err(ExtendError::Postcondition(
            "the agent ended up aware of the target event".into(),
        ));
    }
    Ok(())
}

fn dlr_schemas(n: Option<u32>, depth: u32) -> Vec<Schema> {
    let mut schemas = match n {
        None => vec![Schema::Plausibility],
        Some(_) => (1..=depth).map(Schema::NPlausibility).collect(),
    };
    schemas.push(Schema::KuIntrospection);
    schemas.push(Schema::AuIntrospection);
    schemas
}

/// Extends a knowledge model to a standard model in which Plausibility
/// (or, with `n = Some(d)`, the iterated `nPlausibility(1..=d)` family),
/// KU-Introspection and AU-Introspection are valid at `alpha` and the agent
/// is unaware of `e` there. Requires Anti-Necessitation at `alpha`; returns
/// `None` when no extension exists.
pub fn extend_to_dlr(
    km: &KnowledgeModel,
    alpha: StateId,
    e: &Event,
    n: Option<u32>,
) -> Result<Option<StandardModel>, ExtendError> {
    let depth = plausibility_depth(n)?;
    if km.k_mask(0) >> alpha.0 & 1 == 1 {
        return Err(ExtendError::Hypothesis(format!(
            "Anti-Necessitation fails at `{}`",
            km.space().label(alpha)
        )));
    }
    let Some(model) = build_extension(km, alpha, e, depth)? else {
        return Ok(None);
    };
    verify_at(&model, alpha, e, &dlr_schemas(n, depth))?;
    Ok(Some(model))
}

/// As [`extend_to_dlr`], additionally guaranteeing CK-Plausibility,
/// CK-KU-Introspection and CK-AU-Introspection at `alpha`. Requires
/// Necessitation and Anti-Necessitation on the whole knowledge model.
pub fn extend_to_dlr_ck(
    km: &KnowledgeModel,
    alpha: StateId,
    e: &Event,
    n: Option<u32>,
) -> Result<Option<StandardModel>, ExtendError> {
    let depth = plausibility_depth(n)?;
    let full = km.space().full_mask();
    if km.k_mask(full) != full {
        return Err(ExtendError::Hypothesis(
            "Necessitation fails on the knowledge model".into(),
        ));
    }
    if km.k_mask(0) != 0 {
        return Err(ExtendError::Hypothesis(
            "Anti-Necessitation fails on the knowledge model".into(),
        ));
    }
    let Some(model) = build_extension(km, alpha, e, depth)? else {
        return Ok(None);
    };
    let mut schemas = dlr_schemas(n, depth);
    schemas.extend([
        Schema::CkPlausibility,
        Schema::CkKuIntrospection,
        Schema::CkAuIntrospection,
    ]);
    verify_at(&model, alpha, e, &schemas)?;
    Ok(Some(model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Agent;
    use crate::models::{builtin_dlr3, builtin_dlr3_relation, Model, Relation};
    use crate::statespace::StateSpace;

    fn dlr3_knowledge() -> KnowledgeModel {
        KnowledgeModel::from_relation(Agent::new("1"), &builtin_dlr3_relation()).unwrap()
    }

    #[test]
    fn recovers_the_counterexample_awareness_on_e() {
        let km = dlr3_knowledge();
        let space = km.space().clone();
        let alpha = space.resolve("alpha").unwrap();
        let e = space.event_from_labels(["alpha", "w1"]).unwrap();
        let model = extend_to_dlr(&km, alpha, &e, None).unwrap().unwrap();
        // F = E itself satisfies the chain, so a(E) = -E = {w2}
        let agent = Agent::new("1");
        let ops = model.ops(&agent).unwrap();
        assert_eq!(ops.a.apply(&e), space.event_from_labels(["w2"]).unwrap());
        // same a-value as the hand-built counterexample model on E
        let built = builtin_dlr3();
        assert_eq!(ops.a.apply(&e), built.ops(&agent).unwrap().a.apply(&e));
    }

    #[test]
    fn ck_extension_from_the_same_data() {
        let km = dlr3_knowledge();
        let space = km.space().clone();
        let alpha = space.resolve("alpha").unwrap();
        let e = space.event_from_labels(["alpha", "w1"]).unwrap();
        let model = extend_to_dlr_ck(&km, alpha, &e, None).unwrap().unwrap();
        let m: Model = model.into();
        for schema in [
            Schema::Plausibility,
            Schema::KuIntrospection,
            Schema::AuIntrospection,
            Schema::CkPlausibility,
            Schema::CkKuIntrospection,
            Schema::CkAuIntrospection,
        ] {
            assert!(
                schema_check_instance(&m, &schema, &[Agent::new("1")], Some(alpha)).unwrap(),
                "{schema}"
            );
        }
    }

    /// All 2-state S5 knowledge models (equivalence accessibility).
    fn two_state_s5_models() -> Vec<KnowledgeModel> {
        let space = StateSpace::numbered(2).unwrap();
        let fine = Relation::identity(space.clone());
        let coarse = Relation::total(space.clone());
        [fine, coarse]
            .into_iter()
            .map(|r| KnowledgeModel::from_relation(Agent::new("1"), &r).unwrap())
            .collect()
    }

    #[test]
    fn s5_models_never_extend() {
        // negative introspection kills the second chain link
        for km in two_state_s5_models() {
            let space = km.space().clone();
            for alpha in space.states() {
                for mask in 0..=space.full_mask() {
                    let e = space.event(mask);
                    if km.k(&e).contains(alpha) {
                        continue;
                    }
                    assert!(extend_to_dlr(&km, alpha, &e, None).unwrap().is_none());
                    assert!(extend_to_dlr_ck(&km, alpha, &e, None).unwrap().is_none());
                }
            }
        }
    }

    #[test]
    fn singleton_identity_model_cannot_extend() {
        let space = StateSpace::new(["s"]).unwrap();
        let k = OperatorTable::from_fn(space.clone(), |m| m).unwrap();
        let km = KnowledgeModel::new(Agent::new("1"), k);
        let alpha = StateId(0);
        // alpha ∈ k(Ω), so condition (i) fails
        assert!(extend_to_dlr(&km, alpha, &space.full_event(), None)
            .unwrap()
            .is_none());
    }

    #[test]
    fn hypothesis_violations_are_errors_not_none() {
        // knowing the contradiction at alpha breaks Anti-Necessitation
        let space = StateSpace::numbered(2).unwrap();
        let k = OperatorTable::from_fn(space.clone(), |_| 0b01).unwrap();
        let km = KnowledgeModel::new(Agent::new("1"), k);
        let e = space.event(0b10);
        assert!(matches!(
            extend_to_dlr(&km, StateId(0), &e, None),
            Err(ExtendError::Hypothesis(_))
        ));
        // the same table breaks Necessitation model-wide
        assert!(matches!(
            extend_to_dlr_ck(&km, StateId(1), &e, None),
            Err(ExtendError::Hypothesis(_))
        ));
    }

    #[test]
    fn iterated_depths_behave() {
        let km = dlr3_knowledge();
        let space = km.space().clone();
        let alpha = space.resolve("alpha").unwrap();
        let e = space.event_from_labels(["alpha", "w1"]).unwrap();
        for n in 1..=3u32 {
            let model = extend_to_dlr(&km, alpha, &e, Some(n)).unwrap().unwrap();
            let m: Model = model.into();
            for j in 1..=n {
                assert!(schema_check_instance(
                    &m,
                    &Schema::NPlausibility(j),
                    &[Agent::new("1")],
                    Some(alpha)
                )
                .unwrap());
            }
        }
        assert!(matches!(
            extend_to_dlr(&km, alpha, &e, Some(0)),
            Err(ExtendError::BadDepth)
        ));
    }

    #[test]
    fn partitional_source_works_too() {
        // knowledge part of the ring model via from_model
        let ring = crate::models::builtin_ring4();
        let m: Model = ring.into();
        let km = KnowledgeModel::from_model(&m, &Agent::new("1")).unwrap();
        let space = km.space().clone();
        let one = space.resolve("1").unwrap();
        let e = space.event_from_labels(["2"]).unwrap();
        // state 1 does not know {2} and does not know its own ignorance
        let got = extend_to_dlr(&km, one, &e, None).unwrap();
        assert!(got.is_some());
    }
}
