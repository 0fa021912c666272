//! Compositional semantics: formulas evaluate to events, validity at a
//! state or on a model quantifies over valuations of the free letters, and
//! the named axiom schemas are checked as formula validity.
//!
//! [`conditions`] keeps the event-level forms of the same schema conditions
//! (`k(-a(E)) = ∅` and friends) as an independent route; the two are
//! cross-checked rather than assumed equivalent.

pub mod conditions;

use std::fmt;

use thiserror::Error;

use crate::formula::{Agent, Formula};
use crate::models::{Model, ModelError};
use crate::statespace::{Event, SpaceError, StateId, StateSpace, EVENT_ENUM_CAP};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("valuation does not cover letter `{0}`")]
    MissingLetter(String),
    #[error("quantifier enumeration over {0} states exceeds the cap of {1}")]
    QuantifierCap(usize, usize),
    #[error("{needed} valuation assignments exceed the guard of {max}; raise the limit to force")]
    AssignmentGuard { needed: u128, max: u64 },
    #[error("unknown schema `{0}`")]
    UnknownSchema(String),
    #[error("schema `{0}` takes {1} agent indices, got {2}")]
    SchemaArity(String, usize, usize),
}

impl From<SpaceError> for EvalError {
    fn from(e: SpaceError) -> EvalError {
        EvalError::Model(e.into())
    }
}

/// Enumeration guards: how many valuation assignments `valid_at`/`valid_on`
/// may enumerate, and how many states a quantified formula may range over.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    pub max_assignments: u64,
    pub quantifier_cap: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_assignments: 1 << 24,
            quantifier_cap: EVENT_ENUM_CAP,
        }
    }
}

impl Limits {
    /// No assignment guard: exhaustive checks run however long they take.
    pub fn unguarded() -> Limits {
        Limits {
            max_assignments: u64::MAX,
            quantifier_cap: EVENT_ENUM_CAP,
        }
    }
}

/// A map from proposition letters to events of one space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    space: StateSpace,
    entries: Vec<(String, u64)>,
}

impl Valuation {
    pub fn new(space: StateSpace) -> Valuation {
        Valuation {
            space,
            entries: Vec::new(),
        }
    }

    pub fn set(&mut self, letter: impl Into<String>, event: &Event) -> Result<(), EvalError> {
        if event.space() != &self.space {
            return Err(SpaceError::SpaceMismatch.into());
        }
        let letter = letter.into();
        if let Some(slot) = self.entries.iter_mut().find(|(l, _)| *l == letter) {
            slot.1 = event.mask();
        } else {
            self.entries.push((letter, event.mask()));
        }
        Ok(())
    }

    pub fn single(space: StateSpace, letter: impl Into<String>, event: &Event) -> Valuation {
        let mut v = Valuation::new(space);
        v.set(letter, event).expect("event from the same space");
        v
    }

    pub fn get(&self, letter: &str) -> Option<Event> {
        self.entries
            .iter()
            .find(|(l, _)| l == letter)
            .map(|(_, m)| self.space.event(*m))
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, Event)> {
        self.entries
            .iter()
            .map(|(l, m)| (l.as_str(), self.space.event(*m)))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut sorted: Vec<_> = self.entries.iter().collect();
        sorted.sort();
        let mut first = true;
        for (l, m) in sorted {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{l}={}", self.space.event(*m))?;
            first = false;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Evaluation

fn eval_mask(
    m: &Model,
    env: &mut Vec<(String, u64)>,
    f: &Formula,
    limits: &Limits,
) -> Result<u64, EvalError> {
    let full = m.space().full_mask();
    Ok(match f {
        Formula::Prop(p) => {
            env.iter()
                .rev()
                .find(|(l, _)| l == p)
                .ok_or_else(|| EvalError::MissingLetter(p.clone()))?
                .1
        }
        Formula::Top => full,
        Formula::Bottom => 0,
        Formula::Not(g) => full & !eval_mask(m, env, g, limits)?,
        Formula::And(l, r) => eval_mask(m, env, l, limits)? & eval_mask(m, env, r, limits)?,
        Formula::Or(l, r) => eval_mask(m, env, l, limits)? | eval_mask(m, env, r, limits)?,
        Formula::Imp(l, r) => {
            (full & !eval_mask(m, env, l, limits)?) | eval_mask(m, env, r, limits)?
        }
        Formula::Iff(l, r) => {
            full & !(eval_mask(m, env, l, limits)? ^ eval_mask(m, env, r, limits)?)
        }
        Formula::Knows(agent, g) => m.k_mask(agent, eval_mask(m, env, g, limits)?)?,
        Formula::Aware(agent, g) => m.a_mask(agent, eval_mask(m, env, g, limits)?)?,
        Formula::Common(agent, g) => m.ck_mask(agent, eval_mask(m, env, g, limits)?)?,
        Formula::Forall(p, g) => {
            let n = m.space().len();
            if n > limits.quantifier_cap {
                return Err(EvalError::QuantifierCap(n, limits.quantifier_cap));
            }
            let mut acc = full;
            env.push((p.clone(), 0));
            for e in 0..=full {
                env.last_mut().unwrap().1 = e;
                let r = eval_mask(m, env, g, limits);
                match r {
                    Ok(mask) => acc &= mask,
                    Err(err) => {
                        env.pop();
                        return Err(err);
                    }
                }
                if acc == 0 {
                    break;
                }
            }
            env.pop();
            acc
        }
        Formula::Exists(p, g) => {
            let n = m.space().len();
            if n > limits.quantifier_cap {
                return Err(EvalError::QuantifierCap(n, limits.quantifier_cap));
            }
            let mut acc = 0;
            env.push((p.clone(), 0));
            for e in 0..=full {
                env.last_mut().unwrap().1 = e;
                let r = eval_mask(m, env, g, limits);
                match r {
                    Ok(mask) => acc |= mask,
                    Err(err) => {
                        env.pop();
                        return Err(err);
                    }
                }
                if acc == full {
                    break;
                }
            }
            env.pop();
            acc
        }
    })
}

/// Evaluates a formula to the event it expresses, given a valuation covering
/// its free letters.
pub fn evaluate(m: &Model, v: &Valuation, f: &Formula) -> Result<Event, EvalError> {
    evaluate_with(m, v, f, &Limits::default())
}

pub fn evaluate_with(
    m: &Model,
    v: &Valuation,
    f: &Formula,
    limits: &Limits,
) -> Result<Event, EvalError> {
    if v.space() != m.space() {
        return Err(EvalError::from(SpaceError::SpaceMismatch));
    }
    let mut env: Vec<(String, u64)> = v.entries.clone();
    let mask = eval_mask(m, &mut env, f, limits)?;
    Ok(m.space().event(mask))
}

// ---------------------------------------------------------------------------
// Validity

/// Drives an odometer over all assignments of events to the free letters,
/// calling `visit` with the event expressed under each assignment. Stops
/// early when `visit` returns `false`.
fn for_each_assignment(
    m: &Model,
    f: &Formula,
    limits: &Limits,
    mut visit: impl FnMut(&[(String, u64)], u64) -> bool,
) -> Result<(), EvalError> {
    let n = m.space().len();
    let free: Vec<String> = f.letters().free.into_iter().collect();
    let events_per_letter = 1u128 << n;
    let needed = events_per_letter.pow(free.len() as u32);
    if needed > limits.max_assignments as u128 {
        return Err(EvalError::AssignmentGuard {
            needed,
            max: limits.max_assignments,
        });
    }
    let mut env: Vec<(String, u64)> = free.iter().map(|l| (l.clone(), 0)).collect();
    let full = m.space().full_mask();
    loop {
        let mask = eval_mask(m, &mut env, f, limits)?;
        if !visit(&env, mask) {
            return Ok(());
        }
        // increment the odometer, last letter fastest
        let mut pos = env.len();
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            if env[pos].1 == full {
                env[pos].1 = 0;
            } else {
                env[pos].1 += 1;
                break;
            }
        }
    }
}

/// True iff the state lies in the event expressed by `f` under every
/// valuation of its free letters.
pub fn valid_at(m: &Model, state: StateId, f: &Formula) -> Result<bool, EvalError> {
    valid_at_with(m, state, f, &Limits::default())
}

pub fn valid_at_with(
    m: &Model,
    state: StateId,
    f: &Formula,
    limits: &Limits,
) -> Result<bool, EvalError> {
    Ok(find_countervaluation_at_with(m, state, f, limits)?.is_none())
}

/// True iff `f` expresses the whole space under every valuation.
pub fn valid_on(m: &Model, f: &Formula) -> Result<bool, EvalError> {
    valid_on_with(m, f, &Limits::default())
}

pub fn valid_on_with(m: &Model, f: &Formula, limits: &Limits) -> Result<bool, EvalError> {
    Ok(find_countervaluation_with(m, f, limits)?.is_none())
}

fn capture(space: &StateSpace, env: &[(String, u64)]) -> Valuation {
    Valuation {
        space: space.clone(),
        entries: env.to_vec(),
    }
}

/// First assignment (in canonical order) under which the state falls outside
/// the expressed event, if any.
pub fn find_countervaluation_at(
    m: &Model,
    state: StateId,
    f: &Formula,
) -> Result<Option<Valuation>, EvalError> {
    find_countervaluation_at_with(m, state, f, &Limits::default())
}

pub fn find_countervaluation_at_with(
    m: &Model,
    state: StateId,
    f: &Formula,
    limits: &Limits,
) -> Result<Option<Valuation>, EvalError> {
    let mut found = None;
    for_each_assignment(m, f, limits, |env, mask| {
        if mask >> state.0 & 1 == 0 {
            found = Some(capture(m.space(), env));
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

/// First state and assignment witnessing failure of model validity, if any.
pub fn find_countervaluation(
    m: &Model,
    f: &Formula,
) -> Result<Option<(StateId, Valuation)>, EvalError> {
    find_countervaluation_with(m, f, &Limits::default())
}

pub fn find_countervaluation_with(
    m: &Model,
    f: &Formula,
    limits: &Limits,
) -> Result<Option<(StateId, Valuation)>, EvalError> {
    let full = m.space().full_mask();
    let mut found = None;
    for_each_assignment(m, f, limits, |env, mask| {
        if mask != full {
            let state = StateId((mask ^ full).trailing_zeros() as usize);
            found = Some((state, capture(m.space(), env)));
            false
        } else {
            true
        }
    })?;
    Ok(found)
}

// ---------------------------------------------------------------------------
// Axiom schemas

/// The named axiom schemas of the registry. `NPlausibility(n)` is the
/// parametric family `Up → (¬K)^n p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Schema {
    Plausibility,
    KuIntrospection,
    AuIntrospection,
    Necessitation,
    Monotonicity,
    WeakNecessitation,
    Distribution,
    AntiNecessitation,
    Reflexivity,
    PositiveIntrospection,
    As,
    Ac,
    A4ij,
    Ak4,
    CkPlausibility,
    CkKuIntrospection,
    CkAuIntrospection,
    NPlausibility(u32),
}

impl Schema {
    /// The fixed registry; the `nPlausibility(n)` family is represented by
    /// its first member.
    pub fn registry() -> Vec<Schema> {
        vec![
            Schema::Plausibility,
            Schema::KuIntrospection,
            Schema::AuIntrospection,
            Schema::Necessitation,
            Schema::Monotonicity,
            Schema::WeakNecessitation,
            Schema::Distribution,
            Schema::AntiNecessitation,
            Schema::Reflexivity,
            Schema::PositiveIntrospection,
            Schema::As,
            Schema::Ac,
            Schema::A4ij,
            Schema::Ak4,
            Schema::CkPlausibility,
            Schema::CkKuIntrospection,
            Schema::CkAuIntrospection,
            Schema::NPlausibility(1),
        ]
    }

    pub fn name(&self) -> String {
        match self {
            Schema::Plausibility => "Plausibility".into(),
            Schema::KuIntrospection => "KU-Introspection".into(),
            Schema::AuIntrospection => "AU-Introspection".into(),
            Schema::Necessitation => "Necessitation".into(),
            Schema::Monotonicity => "Monotonicity".into(),
            Schema::WeakNecessitation => "WeakNecessitation".into(),
            Schema::Distribution => "Distribution".into(),
            Schema::AntiNecessitation => "AntiNecessitation".into(),
            Schema::Reflexivity => "Reflexivity".into(),
            Schema::PositiveIntrospection => "PositiveIntrospection".into(),
            Schema::As => "AS".into(),
            Schema::Ac => "AC".into(),
            Schema::A4ij => "A-4ij".into(),
            Schema::Ak4 => "AK-4".into(),
            Schema::CkPlausibility => "CK-Plausibility".into(),
            Schema::CkKuIntrospection => "CK-KU-Introspection".into(),
            Schema::CkAuIntrospection => "CK-AU-Introspection".into(),
            Schema::NPlausibility(n) => format!("nPlausibility({n})"),
        }
    }

    /// Looks a schema up by name, case- and hyphen-insensitively;
    /// `nPlausibility` requires the parameter `n ≥ 1`.
    pub fn from_name(name: &str, n: Option<u32>) -> Result<Schema, EvalError> {
        let norm: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        let schema = match norm.as_str() {
            "plausibility" => Schema::Plausibility,
            "kuintrospection" => Schema::KuIntrospection,
            "auintrospection" => Schema::AuIntrospection,
            "necessitation" => Schema::Necessitation,
            "monotonicity" => Schema::Monotonicity,
            "weaknecessitation" => Schema::WeakNecessitation,
            "distribution" => Schema::Distribution,
            "antinecessitation" => Schema::AntiNecessitation,
            "reflexivity" => Schema::Reflexivity,
            "positiveintrospection" => Schema::PositiveIntrospection,
            "as" => Schema::As,
            "ac" => Schema::Ac,
            "a4ij" => Schema::A4ij,
            "ak4" => Schema::Ak4,
            "ckplausibility" => Schema::CkPlausibility,
            "ckkuintrospection" => Schema::CkKuIntrospection,
            "ckauintrospection" => Schema::CkAuIntrospection,
            "nplausibility" => match n {
                Some(n) if n >= 1 => Schema::NPlausibility(n),
                _ => return Err(EvalError::UnknownSchema("nPlausibility needs n ≥ 1".into())),
            },
            _ => return Err(EvalError::UnknownSchema(name.to_string())),
        };
        Ok(schema)
    }

    /// Number of agent indices the schema is parametrized by.
    pub fn agent_arity(&self) -> usize {
        match self {
            Schema::A4ij | Schema::Ak4 => 2,
            _ => 1,
        }
    }

    /// Instantiates the schema template for concrete agents. The letters
    /// `p`, `q` are the schema metavariables, quantified over all events by
    /// the validity check.
    pub fn instantiate(&self, agents: &[Agent]) -> Result<Formula, EvalError> {
        use Formula as F;
        if agents.len() != self.agent_arity() {
            return Err(EvalError::SchemaArity(
                self.name(),
                self.agent_arity(),
                agents.len(),
            ));
        }
        let i = agents[0].clone();
        let p = || F::prop("p");
        let q = || F::prop("q");
        Ok(match self {
            Schema::Plausibility => F::imp(
                F::unaware(i.clone(), p()),
                F::and(
                    F::not(F::knows(i.clone(), p())),
                    F::not(F::knows(i.clone(), F::not(F::knows(i, p())))),
                ),
            ),
            Schema::KuIntrospection => F::not(F::knows(i.clone(), F::unaware(i, p()))),
            Schema::AuIntrospection => F::imp(
                F::unaware(i.clone(), p()),
                F::unaware(i.clone(), F::unaware(i, p())),
            ),
            Schema::Necessitation => F::knows(i, F::Top),
            Schema::Monotonicity => F::imp(
                F::knows(i.clone(), F::and(p(), q())),
                F::and(F::knows(i.clone(), p()), F::knows(i, q())),
            ),
            Schema::WeakNecessitation => F::imp(F::knows(i.clone(), p()), F::knows(i, F::Top)),
            Schema::Distribution => F::imp(
                F::and(F::knows(i.clone(), p()), F::knows(i.clone(), q())),
                F::knows(i, F::and(p(), q())),
            ),
            Schema::AntiNecessitation => F::not(F::knows(i, F::Bottom)),
            Schema::Reflexivity => F::imp(F::knows(i, p()), p()),
            Schema::PositiveIntrospection => F::imp(
                F::knows(i.clone(), p()),
                F::knows(i.clone(), F::knows(i, p())),
            ),
            Schema::As => F::imp(F::aware(i.clone(), F::not(p())), F::aware(i, p())),
            Schema::Ac => F::imp(
                F::aware(i.clone(), F::and(p(), q())),
                F::and(F::aware(i.clone(), p()), F::aware(i, q())),
            ),
            Schema::A4ij => {
                let j = agents[1].clone();
                F::imp(F::aware(i.clone(), p()), F::aware(i, F::aware(j, p())))
            }
            Schema::Ak4 => {
                let j = agents[1].clone();
                F::imp(F::aware(i.clone(), p()), F::aware(i, F::knows(j, p())))
            }
            Schema::CkPlausibility => F::imp(
                F::aware(i.clone(), p()),
                F::common(i.clone(), Schema::Plausibility.instantiate(&[i])?),
            ),
            Schema::CkKuIntrospection => F::imp(
                F::aware(i.clone(), p()),
                F::common(i.clone(), Schema::KuIntrospection.instantiate(&[i])?),
            ),
            Schema::CkAuIntrospection => F::imp(
                F::aware(i.clone(), p()),
                F::common(i.clone(), Schema::AuIntrospection.instantiate(&[i])?),
            ),
            Schema::NPlausibility(n) => {
                let mut chain = p();
                for _ in 0..*n {
                    chain = F::not(F::knows(i.clone(), chain));
                }
                F::imp(F::unaware(i, p()), chain)
            }
        })
    }
}

impl fmt::Display for Schema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Checks one instantiation of a schema at a state (or model-wide when
/// `at` is `None`).
pub fn schema_check_instance(
    m: &Model,
    schema: &Schema,
    agents: &[Agent],
    at: Option<StateId>,
) -> Result<bool, EvalError> {
    schema_check_instance_with(m, schema, agents, at, &Limits::default())
}

pub fn schema_check_instance_with(
    m: &Model,
    schema: &Schema,
    agents: &[Agent],
    at: Option<StateId>,
    limits: &Limits,
) -> Result<bool, EvalError> {
    let f = schema.instantiate(agents)?;
    match at {
        Some(state) => valid_at_with(m, state, &f, limits),
        None => valid_on_with(m, &f, limits),
    }
}

/// Checks a schema across all agents of the model (all ordered agent pairs
/// for the two-index schemas); true iff every instance is valid.
pub fn schema_check(m: &Model, schema: &Schema, at: Option<StateId>) -> Result<bool, EvalError> {
    schema_check_with(m, schema, at, &Limits::default())
}

pub fn schema_check_with(
    m: &Model,
    schema: &Schema,
    at: Option<StateId>,
    limits: &Limits,
) -> Result<bool, EvalError> {
    let agents: Vec<Agent> = m.agents().into_iter().cloned().collect();
    match schema.agent_arity() {
        1 => {
            for i in &agents {
                if !schema_check_instance_with(m, schema, std::slice::from_ref(i), at, limits)? {
                    return Ok(false);
                }
            }
        }
        _ => {
            for i in &agents {
                for j in &agents {
                    if !schema_check_instance_with(m, schema, &[i.clone(), j.clone()], at, limits)?
                    {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

/// Falsifying event assignment for a schema instance at a state, if any.
pub fn schema_witness_at(
    m: &Model,
    schema: &Schema,
    agents: &[Agent],
    state: StateId,
) -> Result<Option<Valuation>, EvalError> {
    let f = schema.instantiate(agents)?;
    find_countervaluation_at(m, state, &f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{builtin_dlr3, builtin_ring4, builtin_trade5};

    fn agent1() -> Agent {
        Agent::new("1")
    }

    fn dlr3() -> Model {
        builtin_dlr3().into()
    }

    fn ring4() -> Model {
        builtin_ring4().into()
    }

    #[test]
    fn evaluate_counterexample_model() {
        let m = dlr3();
        let space = m.space().clone();
        let e = space.event_from_labels(["alpha", "w1"]).unwrap();
        let v = Valuation::single(space.clone(), "p", &e);

        let aware = evaluate(&m, &v, &Formula::parse("A_1 p").unwrap()).unwrap();
        assert_eq!(aware, space.event_from_labels(["w2"]).unwrap());

        let unaware = evaluate(&m, &v, &Formula::parse("U_1 p").unwrap()).unwrap();
        let alpha = space.resolve("alpha").unwrap();
        assert!(unaware.contains(alpha));
    }

    #[test]
    fn excluded_middle_expresses_the_whole_space() {
        let m = dlr3();
        let space = m.space().clone();
        let f = Formula::parse("p | ~p").unwrap();
        for mask in 0..8u64 {
            let v = Valuation::single(space.clone(), "p", &space.event(mask));
            assert!(evaluate(&m, &v, &f).unwrap().is_full());
        }
    }

    #[test]
    fn someone_is_always_unaware_of_something_in_ring4() {
        let m = ring4();
        let space = m.space().clone();
        let f = Formula::parse("exists p. U_1 p").unwrap();
        let got = evaluate(&m, &Valuation::new(space.clone()), &f).unwrap();
        // brute-force oracle: at each state look for an event outside the
        // awareness operator's range
        let mut expect = 0u64;
        for s in space.states() {
            let mut unaware_of_something = false;
            for mask in 0..16u64 {
                let a = m.awareness_event(&agent1(), &space.event(mask)).unwrap();
                if !a.contains(s) {
                    unaware_of_something = true;
                }
            }
            if unaware_of_something {
                expect |= 1 << s.0;
            }
        }
        assert_eq!(got.mask(), expect);
        assert!(got.is_full());
    }

    #[test]
    fn knowing_unawareness_without_a_known_instance() {
        let m = ring4();
        let f = Formula::parse("K_1 exists p. U_1 p & ~exists p. K_1 U_1 p").unwrap();
        let one = m.space().resolve("1").unwrap();
        assert!(valid_at(&m, one, &f).unwrap());
        // fails elsewhere: every other state knows a specific unawareness
        for s in m.space().states().skip(1) {
            assert!(!valid_at(&m, s, &f).unwrap());
        }
    }

    #[test]
    fn trivial_and_counterexample_validities() {
        let m = dlr3();
        let alpha = m.space().resolve("alpha").unwrap();
        assert!(valid_at(&m, alpha, &Formula::Top).unwrap());
        let f = Formula::parse("~K_1 U_1 p").unwrap();
        assert!(valid_at(&m, alpha, &f).unwrap());
        assert!(!valid_on(&m, &f).unwrap());
        let (state, witness) = find_countervaluation(&m, &f).unwrap().unwrap();
        assert_eq!(m.space().label(state), "w1");
        let bad = evaluate(&m, &witness, &f).unwrap();
        assert!(!bad.contains(state));
    }

    #[test]
    fn model_wide_knowledge_axioms_on_dlr3() {
        let m = dlr3();
        for schema in [
            Schema::Necessitation,
            Schema::Monotonicity,
            Schema::Distribution,
            Schema::AntiNecessitation,
            Schema::Reflexivity,
            Schema::PositiveIntrospection,
            Schema::WeakNecessitation,
        ] {
            assert!(schema_check(&m, &schema, None).unwrap(), "{schema}");
        }
    }

    #[test]
    fn dlr_axioms_hold_at_alpha() {
        let m = dlr3();
        let alpha = Some(m.space().resolve("alpha").unwrap());
        for schema in [
            Schema::Plausibility,
            Schema::KuIntrospection,
            Schema::AuIntrospection,
        ] {
            assert!(schema_check(&m, &schema, alpha).unwrap(), "{schema}");
        }
        // Plausibility and KU-Introspection fail elsewhere on the model;
        // AU-Introspection happens to hold at every state here.
        assert!(!schema_check(&m, &Schema::Plausibility, None).unwrap());
        assert!(!schema_check(&m, &Schema::KuIntrospection, None).unwrap());
        assert!(schema_check(&m, &Schema::AuIntrospection, None).unwrap());
        for n in 1..=5 {
            assert!(schema_check(&m, &Schema::NPlausibility(n), alpha).unwrap());
        }
        // the three common-knowledge strengthenings also hold at alpha
        for schema in [
            Schema::CkPlausibility,
            Schema::CkKuIntrospection,
            Schema::CkAuIntrospection,
        ] {
            assert!(schema_check(&m, &schema, alpha).unwrap(), "{schema}");
        }
    }

    #[test]
    fn ac_fails_at_state_one_of_ring4() {
        let m = ring4();
        let space = m.space().clone();
        let one = space.resolve("1").unwrap();
        assert!(!schema_check(&m, &Schema::Ac, Some(one)).unwrap());

        // the empty-intersection route: aware of p∧q = ∅ without being
        // aware of q = {3}
        let mut v = Valuation::new(space.clone());
        v.set("p", &space.event_from_labels(["2"]).unwrap())
            .unwrap();
        v.set("q", &space.event_from_labels(["3"]).unwrap())
            .unwrap();
        let inst = Schema::Ac.instantiate(&[agent1()]).unwrap();
        assert!(!evaluate(&m, &v, &inst).unwrap().contains(one));

        // and the canonical witness genuinely falsifies the instance
        let w = schema_witness_at(&m, &Schema::Ac, &[agent1()], one)
            .unwrap()
            .unwrap();
        assert!(!evaluate(&m, &w, &inst).unwrap().contains(one));
    }

    #[test]
    fn event_sufficiency() {
        let m = ring4();
        let space = m.space().clone();
        let f = Formula::parse("K_1 (p & q) -> A_1 p").unwrap();
        let mut v1 = Valuation::new(space.clone());
        v1.set("p", &space.event(0b0110)).unwrap();
        v1.set("q", &space.event(0b0011)).unwrap();
        let mut v2 = Valuation::new(space.clone());
        v2.set("q", &space.event(0b0011)).unwrap();
        v2.set("p", &space.event(0b0110)).unwrap();
        v2.set("r", &space.event(0b1000)).unwrap();
        assert_eq!(
            evaluate(&m, &v1, &f).unwrap(),
            evaluate(&m, &v2, &f).unwrap()
        );
    }

    #[test]
    fn connectives_are_pointwise() {
        let m = ring4();
        let space = m.space().clone();
        for fm in ["K_1 p", "A_1 (p -> q)", "CK_1 p & q", "exists r. r & p"] {
            let f = Formula::parse(fm).unwrap();
            for pm in [0b0101u64, 0b1110] {
                for qm in [0b0011u64, 0b1000] {
                    let mut v = Valuation::new(space.clone());
                    v.set("p", &space.event(pm)).unwrap();
                    v.set("q", &space.event(qm)).unwrap();
                    let base = evaluate(&m, &v, &f).unwrap();
                    let neg = evaluate(&m, &v, &Formula::not(f.clone())).unwrap();
                    assert_eq!(neg, base.complement());
                    let other = Formula::parse("q").unwrap();
                    let conj = evaluate(&m, &v, &Formula::and(f.clone(), other.clone())).unwrap();
                    assert_eq!(
                        conj,
                        base.intersect(&evaluate(&m, &v, &other).unwrap()).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn exists_is_dual_to_forall() {
        let m = ring4();
        for body in ["U_1 p", "K_1 p -> q", "A_1 (p & q)"] {
            let f = Formula::parse(body).unwrap();
            let ex = Formula::exists("p", f.clone());
            let dual = Formula::not(Formula::forall("p", Formula::not(f)));
            let v = Valuation::single(m.space().clone(), "q", &m.space().event(0b1010));
            assert_eq!(
                evaluate(&m, &v, &ex).unwrap(),
                evaluate(&m, &v, &dual).unwrap()
            );
        }
    }

    #[test]
    fn tautology_instances_are_valid_everywhere() {
        for m in [dlr3(), ring4(), Model::from(builtin_trade5())] {
            for t in [
                "K_1 p | ~K_1 p",
                "A_1 (p & q) -> A_1 (p & q)",
                "((U_1 p -> false) -> U_1 p) -> U_1 p",
            ] {
                let f = Formula::parse(t).unwrap();
                if f.letters().agents.iter().all(|a| m.has_agent(a)) {
                    assert!(valid_on(&m, &f).unwrap(), "{t}");
                }
            }
        }
    }

    #[test]
    fn assignment_guard_trips() {
        let m = ring4();
        let f = Formula::parse("p1 & p2 & p3 & p4 & p5 & p6 & p7").unwrap();
        let limits = Limits {
            max_assignments: 1 << 20,
            ..Limits::default()
        };
        assert!(matches!(
            valid_on_with(&m, &f, &limits),
            Err(EvalError::AssignmentGuard { .. })
        ));
        assert!(valid_on_with(&m, &f, &Limits::unguarded()).is_ok());
    }

    #[test]
    fn quantifiers_shadow_outer_bindings() {
        let m = ring4();
        let space = m.space().clone();
        // the inner quantifier rebinds p, so the body is p ∧ ⋂_E E = ∅
        let f = Formula::parse("exists p. p & forall p. p").unwrap();
        let got = evaluate(&m, &Valuation::new(space.clone()), &f).unwrap();
        assert!(got.is_empty());
        // an outer binding survives around the shadowed region
        let g = Formula::parse("exists p. p & (forall q. q | p)").unwrap();
        let got = evaluate(&m, &Valuation::new(space), &g).unwrap();
        assert!(got.is_full());
    }

    #[test]
    fn missing_letter_is_reported() {
        let m = ring4();
        let v = Valuation::new(m.space().clone());
        let f = Formula::parse("p").unwrap();
        assert!(matches!(
            evaluate(&m, &v, &f),
            Err(EvalError::MissingLetter(_))
        ));
    }

    #[test]
    fn schema_names_round_trip() {
        for schema in Schema::registry() {
            let n = match schema {
                Schema::NPlausibility(n) => Some(n),
                _ => None,
            };
            let name = schema.name();
            let lookup_name = if n.is_some() { "nPlausibility" } else { &name };
            assert_eq!(Schema::from_name(lookup_name, n).unwrap(), schema);
        }
        assert_eq!(Schema::registry().len(), 18);
        assert!(Schema::from_name("ku-introspection", None).is_ok());
        assert!(Schema::from_name("bogus", None).is_err());
        assert!(Schema::from_name("nPlausibility", None).is_err());
    }

    #[test]
    fn theorem_3_consequence_on_random_standard_models() {
        use crate::analysis::generate::random_standard;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let conclusion = Formula::parse("A_1 p -> A_1 q").unwrap();
        let mut hits = 0;
        for _ in 0..400 {
            let m: Model = random_standard(&mut rng, 3, &[agent1()]).into();
            for state in m.space().states() {
                let as_ok = schema_check(&m, &Schema::As, Some(state)).unwrap();
                let ac_ok = schema_check(&m, &Schema::Ac, Some(state)).unwrap();
                if as_ok && ac_ok {
                    hits += 1;
                    assert!(valid_at(&m, state, &conclusion).unwrap());
                }
            }
        }
        assert!(hits > 0, "sampling never hit the AS ∧ AC case");
    }

    #[test]
    fn theorem_1_consequences_on_random_standard_models() {
        use crate::analysis::generate::random_standard;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let ap = Formula::parse("A_1 p").unwrap();
        let kpaq = Formula::parse("K_1 p -> A_1 q").unwrap();
        let mut hits = 0;
        for _ in 0..600 {
            let m: Model = random_standard(&mut rng, 3, &[agent1()]).into();
            let dlr_wide = schema_check(&m, &Schema::Plausibility, None).unwrap()
                && schema_check(&m, &Schema::KuIntrospection, None).unwrap()
                && schema_check(&m, &Schema::AuIntrospection, None).unwrap();
            if !dlr_wide {
                continue;
            }
            hits += 1;
            if schema_check(&m, &Schema::Necessitation, None).unwrap() {
                assert!(valid_on(&m, &ap).unwrap());
            }
            if schema_check(&m, &Schema::Monotonicity, None).unwrap() {
                assert!(valid_on(&m, &kpaq).unwrap());
            }
            if schema_check(&m, &Schema::WeakNecessitation, None).unwrap() {
                assert!(valid_on(&m, &kpaq).unwrap());
                // a state that knows at least one event is aware of every
                // event; an ignorant state's awareness is unconstrained, so
                // `A_1 p <-> A_1 q` need not be valid model-wide
                for state in m.space().states() {
                    let knows_something = (0..=m.space().full_mask())
                        .any(|e| m.k_mask(&agent1(), e).unwrap() >> state.0 & 1 == 1);
                    if knows_something {
                        assert!(valid_at(&m, state, &ap).unwrap());
                    }
                }
            }
        }
        assert!(hits > 0, "sampling never hit the DLR-valid case");
    }
}
