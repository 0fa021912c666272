//! The `verify-paper` checklist: one check per pinned fact about the
//! built-in models, the semantics, the calculi, and the trade scenario.
//! Each check recomputes its fact from scratch so any regression in the
//! library trips exactly the facts it breaks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use awarekit::analysis::generate::{random_dlr_partitional, random_partitional, random_standard};
use awarekit::analysis::{
    automorphisms, countermodel_search, dlr_report, extend_to_dlr, extend_to_dlr_ck, is_coherent,
    unawareness_witness, SearchMode,
};
use awarekit::calculus::{
    axiom_formula, check_proof, parse_proof, AxiomName, NOT_KNOW_UNAWARE_PROOF,
};
use awarekit::decision::{builtin_trade5, conditional_eu, preferred_act, ratio, trade_report};
use awarekit::formula::{Agent, Formula};
use awarekit::models::{
    builtin_dlr3, builtin_dlr3_relation, builtin_ring4, builtin_trade5 as trade5_model,
    derive_standard, DlrPartitionalModel, KnowledgeModel, Model, OperatorTable, StandardModel,
};
use awarekit::semantics::{
    conditions, evaluate, schema_check, schema_check_instance, valid_at, valid_on, Schema,
    Valuation,
};
use awarekit::statespace::{StateId, StateSpace};

pub struct Check {
    pub name: &'static str,
    pub outcome: Result<(), String>,
}

type CheckFn = fn() -> Result<(), String>;

fn ensure(cond: bool, why: &str) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why.to_string())
    }
}

fn agent1() -> Agent {
    Agent::new("1")
}

fn dlr3() -> Model {
    builtin_dlr3().into()
}

fn ring4() -> Model {
    builtin_ring4().into()
}

fn e(m: &Model, labels: &[&str]) -> awarekit::Event {
    m.space().event_from_labels(labels.iter().copied()).unwrap()
}

pub fn run_all() -> Vec<Check> {
    let checks: Vec<(&'static str, CheckFn)> = vec![
        ("parse: plausibility schema shape", || {
            let f = Formula::parse("U_1 p -> ~K_1 p & ~K_1 ~K_1 p").map_err(|e| e.to_string())?;
            let expected = Schema::Plausibility
                .instantiate(&[agent1()])
                .map_err(|e| e.to_string())?;
            ensure(
                f == expected,
                "parsed tree differs from the schema template",
            )
        }),
        ("parse: quantifier scope under a modal", || {
            let f = Formula::parse("K_1 exists p. U_1 p & ~exists p. K_1 U_1 p")
                .map_err(|e| e.to_string())?;
            let first = Formula::knows(
                "1",
                Formula::exists("p", Formula::unaware("1", Formula::prop("p"))),
            );
            let second = Formula::not(Formula::exists(
                "p",
                Formula::knows("1", Formula::unaware("1", Formula::prop("p"))),
            ));
            ensure(
                f == Formula::and(first, second),
                "the conjunction did not split around the quantifiers",
            )
        }),
        ("print: canonical strings round-trip", || {
            for text in ["U_1 p -> ~K_1 p & ~K_1 ~K_1 p", "~K_1 ~K_1 ~K_1 p", "true"] {
                let f = Formula::parse(text).map_err(|e| e.to_string())?;
                ensure(f.render() == text, &format!("`{text}` did not round-trip"))?;
            }
            Ok(())
        }),
        ("counterexample model: shape of the awareness table", || {
            let m = builtin_dlr3();
            ensure(m.space().len() == 3, "expected three states")?;
            let w2 = m.space().event_from_labels(["w2"]).unwrap();
            let full = m.space().full_event();
            for (_, value) in m.ops(&agent1()).unwrap().a.entries() {
                ensure(
                    value == w2 || value == full,
                    "an awareness value was neither {w2} nor the whole space",
                )?;
            }
            Ok(())
        }),
        ("running example: partitions as listed", || {
            let m = builtin_ring4();
            let parts = &m.ops(&agent1()).unwrap().partitions;
            ensure(parts[0].cell_masks() == [0b0001, 0b1110], "partition at 1")?;
            ensure(
                parts[1].cell_masks() == [0b0001, 0b0010, 0b1100],
                "partition at 2",
            )?;
            ensure(
                parts[2].cell_masks() == [0b0001, 0b1010, 0b0100],
                "partition at 3",
            )?;
            ensure(
                parts[3].cell_masks() == [0b0001, 0b0110, 0b1000],
                "partition at 4",
            )
        }),
        ("trade model: partitions and total accessibility", || {
            let m = trade5_model();
            let alice = m.ops(&Agent::new("A")).unwrap();
            ensure(
                alice.partitions[0].cell_masks() == [0b00001, 0b00110, 0b01000, 0b10000],
                "Alice's partition at state 1",
            )?;
            ensure(
                alice.partitions[3].cell_masks() == [0b00001, 0b00010, 0b01100, 0b10000],
                "Alice's partition at state 4",
            )?;
            ensure(
                alice.relation.successors_mask(0) == 0b00111,
                "1 R^A x iff x ≤ 3",
            )?;
            ensure(
                alice.relation.successors_mask(4) == 0b11100,
                "5 R^A x iff x ≥ 3",
            )?;
            let bob = m.ops(&Agent::new("B")).unwrap();
            ensure(bob.relation.is_total(), "Bob's relation is total")
        }),
        ("running example: strongest known events", || {
            let m = ring4();
            let full = m.space().full_event();
            let k_full = m.knowledge_event(&agent1(), &full).unwrap();
            ensure(k_full == full, "k(Ω) = Ω")?;
            let two = e(&m, &["2"]);
            ensure(
                m.knowledge_event(&agent1(), &two).unwrap() == two,
                "k({2}) = {2}",
            )?;
            // the strongest known event is the intersection of everything
            // known: Ω at state 1 and {n} at every other state
            for state in m.space().states() {
                let mut strongest = m.space().full_mask();
                for mask in 0..=m.space().full_mask() {
                    if m.knowledge_event(&agent1(), &m.space().event(mask))
                        .unwrap()
                        .contains(state)
                    {
                        strongest &= mask;
                    }
                }
                let expected = if state.0 == 0 {
                    m.space().full_mask()
                } else {
                    1 << state.0
                };
                ensure(strongest == expected, "strongest known event per state")?;
            }
            Ok(())
        }),
        (
            "counterexample model: unawareness at the distinguished state",
            || {
                let m = dlr3();
                let target = e(&m, &["alpha", "w1"]);
                let aware = m.awareness_event(&agent1(), &target).unwrap();
                ensure(aware == e(&m, &["w2"]), "a({alpha w1}) = {w2}")?;
                let alpha = m.space().resolve("alpha").unwrap();
                ensure(!aware.contains(alpha), "alpha is unaware of the event")?;
                let full = m.space().full_event();
                ensure(
                    m.knowledge_event(&agent1(), &full).unwrap().contains(alpha),
                    "alpha ∈ k(Ω)",
                )?;
                ensure(
                    m.awareness_event(&agent1(), &full).unwrap().contains(alpha),
                    "alpha ∈ a(Ω)",
                )
            },
        ),
        ("counterexample model: common knowledge orbit", || {
            let m = dlr3();
            let target = e(&m, &["alpha", "w1"]);
            let w1 = e(&m, &["w1"]);
            let k1 = m.knowledge_event(&agent1(), &target).unwrap();
            ensure(k1 == w1, "k({alpha w1}) = {w1}")?;
            ensure(
                m.knowledge_event(&agent1(), &k1).unwrap() == w1,
                "k²({alpha w1}) = {w1}",
            )?;
            ensure(
                m.common_knowledge_event(&agent1(), &target).unwrap() == w1,
                "ck({alpha w1}) = {w1}",
            )?;
            let full = m.space().full_event();
            ensure(
                m.common_knowledge_event(&agent1(), &full).unwrap() == full,
                "ck(Ω) = Ω",
            )
        }),
        ("trade model: no common knowledge of proper events", || {
            let m: Model = trade5_model().into();
            let bob = Agent::new("B");
            for mask in 0..31u64 {
                let event = m.space().event(mask);
                ensure(
                    m.common_knowledge_event(&bob, &event).unwrap().is_empty(),
                    "ck_B(E) = ∅ for E ⊊ W",
                )?;
            }
            Ok(())
        }),
        ("derivation of standard models matches the tables", || {
            let km = KnowledgeModel::from_relation(agent1(), &builtin_dlr3_relation())
                .map_err(|e| e.to_string())?;
            let built = builtin_dlr3();
            ensure(
                km.table() == &built.ops(&agent1()).unwrap().k,
                "relational knowledge differs from the table",
            )?;
            let std = derive_standard(&builtin_ring4()).map_err(|e| e.to_string())?;
            let one = std.space().event_from_labels(["1"]).unwrap();
            ensure(
                std.ops(&agent1()).unwrap().a.apply(&one) == std.space().full_event(),
                "a({1}) = Ω on the derived model",
            )
        }),
        ("evaluation: awareness of a half-space", || {
            let m = dlr3();
            let v = Valuation::single(m.space().clone(), "p", &e(&m, &["alpha", "w1"]));
            let aware =
                evaluate(&m, &v, &Formula::parse("A_1 p").unwrap()).map_err(|e| e.to_string())?;
            ensure(aware == e(&m, &["w2"]), "⟦A_1 p⟧ = {w2}")?;
            let unaware =
                evaluate(&m, &v, &Formula::parse("U_1 p").unwrap()).map_err(|e| e.to_string())?;
            ensure(
                unaware.contains(m.space().resolve("alpha").unwrap()),
                "alpha ∈ ⟦U_1 p⟧",
            )
        }),
        ("evaluation: excluded middle is the whole space", || {
            let m = dlr3();
            let f = Formula::parse("p | ~p").unwrap();
            for mask in 0..8u64 {
                let v = Valuation::single(m.space().clone(), "p", &m.space().event(mask));
                let event = evaluate(&m, &v, &f).map_err(|e| e.to_string())?;
                ensure(event.is_full(), "a tautology fell short of Ω")?;
            }
            Ok(())
        }),
        (
            "evaluation: everyone is unaware of something in the running example",
            || {
                let m = ring4();
                let f = Formula::parse("exists p. U_1 p").unwrap();
                let got = evaluate(&m, &Valuation::new(m.space().clone()), &f)
                    .map_err(|e| e.to_string())?;
                ensure(got.is_full(), "⟦∃p U_1 p⟧ = Ω")
            },
        ),
        (
            "validity: knowing unawareness without a known instance",
            || {
                let m = ring4();
                let f = Formula::parse("K_1 exists p. U_1 p & ~exists p. K_1 U_1 p").unwrap();
                let one = m.space().resolve("1").unwrap();
                ensure(
                    valid_at(&m, one, &f).map_err(|e| e.to_string())?,
                    "valid at state 1",
                )?;
                for s in m.space().states().skip(1) {
                    ensure(
                        !valid_at(&m, s, &f).map_err(|e| e.to_string())?,
                        "invalid off state 1",
                    )?;
                }
                Ok(())
            },
        ),
        (
            "counterexample model: knowledge axioms hold model-wide",
            || {
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
                    ensure(
                        schema_check(&m, &schema, None).map_err(|e| e.to_string())?,
                        &format!("{schema} is valid on the model"),
                    )?;
                }
                Ok(())
            },
        ),
        (
            "counterexample model: unawareness axioms hold at the distinguished state",
            || {
                let m = dlr3();
                let alpha = Some(m.space().resolve("alpha").unwrap());
                let mut schemas = vec![
                    Schema::Plausibility,
                    Schema::KuIntrospection,
                    Schema::AuIntrospection,
                    Schema::CkPlausibility,
                    Schema::CkKuIntrospection,
                    Schema::CkAuIntrospection,
                ];
                schemas.extend((1..=5).map(Schema::NPlausibility));
                for schema in schemas {
                    ensure(
                        schema_check(&m, &schema, alpha).map_err(|e| e.to_string())?,
                        &format!("{schema} at alpha"),
                    )?;
                }
                Ok(())
            },
        ),
        (
            "counterexample model: KU-introspection fails off the distinguished state",
            || {
                let m = dlr3();
                let f = Formula::parse("~K_1 U_1 p").unwrap();
                let alpha = m.space().resolve("alpha").unwrap();
                ensure(
                    valid_at(&m, alpha, &f).map_err(|e| e.to_string())?,
                    "valid at alpha",
                )?;
                ensure(
                    !valid_on(&m, &f).map_err(|e| e.to_string())?,
                    "invalid on the model",
                )?;
                let w1 = m.space().resolve("w1").unwrap();
                ensure(
                    !valid_at(&m, w1, &f).map_err(|e| e.to_string())?,
                    "fails at w1",
                )
            },
        ),
        ("running example: AC fails at state 1", || {
            let m = ring4();
            let one = m.space().resolve("1").unwrap();
            ensure(
                !schema_check(&m, &Schema::Ac, Some(one)).map_err(|e| e.to_string())?,
                "AC is invalid at state 1",
            )?;
            // the empty-intersection witness: aware of {2}∩{3}=∅, unaware of {3}
            let mut v = Valuation::new(m.space().clone());
            v.set("p", &e(&m, &["2"])).unwrap();
            v.set("q", &e(&m, &["3"])).unwrap();
            let inst = Schema::Ac.instantiate(&[agent1()]).unwrap();
            let event = evaluate(&m, &v, &inst).map_err(|e| e.to_string())?;
            ensure(!event.contains(one), "p={2}, q={3} falsifies AC at 1")
        }),
        (
            "AS and AC force awareness transfer (exhaustive two-state tables)",
            || {
                let space = StateSpace::numbered(2).unwrap();
                let conclusion = Formula::parse("A_1 p -> A_1 q").unwrap();
                let k = OperatorTable::from_fn(space.clone(), |m| m).unwrap();
                for acode in 0..256u32 {
                    let a =
                        OperatorTable::from_fn(space.clone(), |m| (acode >> (2 * m) & 3) as u64)
                            .unwrap();
                    let m: Model = StandardModel::single_agent(agent1(), k.clone(), a)
                        .unwrap()
                        .into();
                    for state in m.space().states() {
                        let premises = schema_check(&m, &Schema::As, Some(state)).unwrap()
                            && schema_check(&m, &Schema::Ac, Some(state)).unwrap();
                        if premises {
                            ensure(
                                valid_at(&m, state, &conclusion).unwrap(),
                                "AS ∧ AC at a state must force A p -> A q there",
                            )?;
                        }
                    }
                }
                Ok(())
            },
        ),
        (
            "triviality bullets hold on the exhaustive two-state sweep",
            || {
                let space = StateSpace::numbered(2).unwrap();
                let ap = Formula::parse("A_1 p").unwrap();
                let kpaq = Formula::parse("K_1 p -> A_1 q").unwrap();
                let mut dlr_wide = 0u32;
                for kcode in 0..256u32 {
                    for acode in 0..256u32 {
                        let k = OperatorTable::from_fn(space.clone(), |m| {
                            (kcode >> (2 * m) & 3) as u64
                        })
                        .unwrap();
                        let a = OperatorTable::from_fn(space.clone(), |m| {
                            (acode >> (2 * m) & 3) as u64
                        })
                        .unwrap();
                        let m: Model = StandardModel::single_agent(agent1(), k, a).unwrap().into();
                        let dlr = schema_check(&m, &Schema::Plausibility, None).unwrap()
                            && schema_check(&m, &Schema::KuIntrospection, None).unwrap()
                            && schema_check(&m, &Schema::AuIntrospection, None).unwrap();
                        if !dlr {
                            continue;
                        }
                        dlr_wide += 1;
                        if schema_check(&m, &Schema::Necessitation, None).unwrap() {
                            ensure(valid_on(&m, &ap).unwrap(), "Necessitation forces A p")?;
                        }
                        if schema_check(&m, &Schema::Monotonicity, None).unwrap() {
                            ensure(
                                valid_on(&m, &kpaq).unwrap(),
                                "Monotonicity forces K p -> A q",
                            )?;
                        }
                        if schema_check(&m, &Schema::WeakNecessitation, None).unwrap() {
                            ensure(
                                valid_on(&m, &kpaq).unwrap(),
                                "Weak Necessitation forces K p -> A q",
                            )?;
                            // a state that knows anything is aware of everything
                            for state in m.space().states() {
                                let knows_something = (0..4u64).any(|ev| {
                                    m.knowledge_event(&agent1(), &space.event(ev))
                                        .unwrap()
                                        .contains(state)
                                });
                                if knows_something {
                                    ensure(
                                        valid_at(&m, state, &ap).unwrap(),
                                        "a knowing state must be fully aware",
                                    )?;
                                }
                            }
                        }
                    }
                }
                ensure(dlr_wide > 0, "the sweep found no admissible tables")
            },
        ),
        ("unawareness reports", || {
            let m = dlr3();
            let alpha = m.space().resolve("alpha").unwrap();
            ensure(
                dlr_report(&m, alpha, 5)
                    .map_err(|e| e.to_string())?
                    .passed(),
                "all checks pass at alpha",
            )?;
            let w1 = m.space().resolve("w1").unwrap();
            let rep = dlr_report(&m, w1, 1).map_err(|e| e.to_string())?;
            ensure(!rep.passed(), "the report fails at w1")?;
            ensure(
                rep.failures()
                    .any(|(_, v)| v.schema == Schema::KuIntrospection && v.witness.is_some()),
                "KU-Introspection fails at w1 with a witness",
            )?;
            let ring = ring4();
            let one = ring.space().resolve("1").unwrap();
            ensure(
                dlr_report(&ring, one, 3)
                    .map_err(|e| e.to_string())?
                    .passed(),
                "the running example passes at state 1",
            )
        }),
        ("unawareness witnesses", || {
            let m = dlr3();
            let alpha = m.space().resolve("alpha").unwrap();
            let w = unawareness_witness(&m, alpha, &agent1())
                .map_err(|e| e.to_string())?
                .ok_or("no witness at alpha")?;
            let w1 = m.space().resolve("w1").unwrap();
            let w2 = m.space().resolve("w2").unwrap();
            ensure(
                w.contains(w1) && !w.contains(w2),
                "the witness contains w1 and misses w2",
            )?;
            let ring = ring4();
            let one = ring.space().resolve("1").unwrap();
            let w = unawareness_witness(&ring, one, &agent1())
                .map_err(|e| e.to_string())?
                .ok_or("no witness at state 1")?;
            ensure(w == e(&ring, &["2"]), "canonical witness is {2}")?;
            // full awareness leaves no witness
            let space = StateSpace::numbered(2).unwrap();
            let full = space.full_mask();
            let k = OperatorTable::from_fn(space.clone(), |m| m).unwrap();
            let a = OperatorTable::from_fn(space.clone(), |_| full).unwrap();
            let m: Model = StandardModel::single_agent(agent1(), k, a).unwrap().into();
            ensure(
                unawareness_witness(&m, StateId(0), &agent1())
                    .map_err(|e| e.to_string())?
                    .is_none(),
                "an everywhere-aware agent has no witness",
            )
        }),
        (
            "extension construction recovers the counterexample awareness",
            || {
                let km = KnowledgeModel::from_relation(agent1(), &builtin_dlr3_relation())
                    .map_err(|e| e.to_string())?;
                let space = km.space().clone();
                let alpha = space.resolve("alpha").unwrap();
                let target = space.event_from_labels(["alpha", "w1"]).unwrap();
                let ext = extend_to_dlr(&km, alpha, &target, None)
                    .map_err(|e| e.to_string())?
                    .ok_or("no extension found")?;
                let w2 = space.event_from_labels(["w2"]).unwrap();
                ensure(
                    ext.ops(&agent1()).unwrap().a.apply(&target) == w2,
                    "a({alpha w1}) = {w2} as in the hand-built model",
                )
            },
        ),
        (
            "extension with common knowledge passes all six checks",
            || {
                let km = KnowledgeModel::from_relation(agent1(), &builtin_dlr3_relation())
                    .map_err(|e| e.to_string())?;
                let space = km.space().clone();
                let alpha = space.resolve("alpha").unwrap();
                let target = space.event_from_labels(["alpha", "w1"]).unwrap();
                let ext = extend_to_dlr_ck(&km, alpha, &target, None)
                    .map_err(|e| e.to_string())?
                    .ok_or("no extension found")?;
                let m: Model = ext.into();
                for schema in [
                    Schema::Plausibility,
                    Schema::KuIntrospection,
                    Schema::AuIntrospection,
                    Schema::CkPlausibility,
                    Schema::CkKuIntrospection,
                    Schema::CkAuIntrospection,
                ] {
                    ensure(
                        schema_check_instance(&m, &schema, &[agent1()], Some(alpha))
                            .map_err(|e| e.to_string())?,
                        &format!("{schema} at alpha on the extension"),
                    )?;
                }
                Ok(())
            },
        ),
        (
            "no extension for two-state partition-based knowledge",
            || {
                let space = StateSpace::numbered(2).unwrap();
                use awarekit::models::Relation;
                for relation in [
                    Relation::identity(space.clone()),
                    Relation::total(space.clone()),
                ] {
                    let km = KnowledgeModel::from_relation(agent1(), &relation)
                        .map_err(|e| e.to_string())?;
                    for alpha in space.states() {
                        for mask in 0..4u64 {
                            let event = space.event(mask);
                            if km.k(&event).contains(alpha) {
                                continue;
                            }
                            ensure(
                                extend_to_dlr(&km, alpha, &event, None)
                                    .map_err(|e| e.to_string())?
                                    .is_none(),
                                "negative introspection blocks the construction",
                            )?;
                            ensure(
                                extend_to_dlr_ck(&km, alpha, &event, None)
                                    .map_err(|e| e.to_string())?
                                    .is_none(),
                                "the CK variant is blocked as well",
                            )?;
                        }
                    }
                }
                Ok(())
            },
        ),
        (
            "iterated-plausibility extensions verify at depths 1..3",
            || {
                let km = KnowledgeModel::from_relation(agent1(), &builtin_dlr3_relation())
                    .map_err(|e| e.to_string())?;
                let space = km.space().clone();
                let alpha = space.resolve("alpha").unwrap();
                let target = space.event_from_labels(["alpha", "w1"]).unwrap();
                for n in 1..=3u32 {
                    let ext = extend_to_dlr(&km, alpha, &target, Some(n))
                        .map_err(|e| e.to_string())?
                        .ok_or("no extension at this depth")?;
                    let m: Model = ext.into();
                    for j in 1..=n {
                        ensure(
                            schema_check_instance(
                                &m,
                                &Schema::NPlausibility(j),
                                &[agent1()],
                                Some(alpha),
                            )
                            .map_err(|e| e.to_string())?,
                            "iterated plausibility verified directly",
                        )?;
                    }
                }
                Ok(())
            },
        ),
        ("running example: automorphism group of order six", || {
            let autos = automorphisms(&builtin_ring4()).map_err(|e| e.to_string())?;
            ensure(autos.len() == 6, "exactly six automorphisms")?;
            ensure(
                autos.iter().all(|f| f.images()[0] == 0),
                "every automorphism fixes state 1",
            )
        }),
        (
            "running example: every state coheres; closure axioms valid",
            || {
                let pm = builtin_ring4();
                let m: Model = pm.clone().into();
                for state in pm.space().states() {
                    ensure(
                        is_coherent(&pm, state).map_err(|e| e.to_string())?.coherent,
                        "every state is coherent",
                    )?;
                    for schema in [Schema::A4ij, Schema::Ak4] {
                        ensure(
                            schema_check(&m, &schema, Some(state)).map_err(|e| e.to_string())?,
                            &format!("{schema} at every state"),
                        )?;
                    }
                }
                Ok(())
            },
        ),
        (
            "countermodel search refutes awareness-to-knowledge transfer",
            || {
                for text in ["A_1 p -> K_1 p", "A_1 p -> A_1 q"] {
                    let f = Formula::parse(text).unwrap();
                    let cm = countermodel_search(&f, 4, SearchMode::Exhaustive, None)
                        .map_err(|e| e.to_string())?
                        .ok_or_else(|| format!("no countermodel for {text}"))?;
                    let m: Model = cm.model.into();
                    ensure(
                        !valid_at(&m, cm.state, &f).map_err(|e| e.to_string())?,
                        "the countermodel genuinely refutes",
                    )?;
                }
                Ok(())
            },
        ),
        ("sound axiom survives the bounded sweep", || {
            let f = Formula::parse("K_1 p -> p").unwrap();
            ensure(
                countermodel_search(&f, 3, SearchMode::Exhaustive, None)
                    .map_err(|e| e.to_string())?
                    .is_none(),
                "no countermodel below four states",
            )
        }),
        ("proof checker: derivation and one-liner accepted", || {
            let proof = parse_proof(NOT_KNOW_UNAWARE_PROOF).map_err(|e| e.to_string())?;
            ensure(
                check_proof(&proof).is_accepted(),
                "the derivation is accepted",
            )?;
            ensure(
                proof.lines.last().unwrap().formula == Formula::parse("~K_1 U_1 p").unwrap(),
                "the derivation ends in ~K_1 U_1 p",
            )?;
            let one_liner =
                parse_proof("calculus: base\n1. A_1 true ; ax A-N\n").map_err(|e| e.to_string())?;
            ensure(
                check_proof(&one_liner).is_accepted(),
                "A-N one-liner accepted",
            )
        }),
        (
            "calculus axioms sound on sampled partitional models",
            || {
                let agents = [agent1(), Agent::new("2")];
                let mut rng = ChaCha8Rng::seed_from_u64(97);
                for _ in 0..120 {
                    let m: Model = random_partitional(&mut rng, 4, &agents).into();
                    for ax in AxiomName::ALL.iter().filter(|a| a.in_base()) {
                        for agent in &agents {
                            ensure(
                                valid_on(&m, &axiom_formula(*ax, agent)).unwrap(),
                                &format!("{ax} valid on a random partitional model"),
                            )?;
                        }
                    }
                }
                let mut rng = ChaCha8Rng::seed_from_u64(98);
                for _ in 0..40 {
                    let dlr = random_dlr_partitional(&mut rng, 4, &[agent1()]);
                    let m: Model = dlr.model().clone().into();
                    for ax in [AxiomName::P, AxiomName::Au] {
                        ensure(
                            valid_at(&m, dlr.distinguished(), &axiom_formula(ax, &agent1()))
                                .unwrap(),
                            &format!("{ax} valid at the distinguished state"),
                        )?;
                    }
                }
                Ok(())
            },
        ),
        ("trade: exact expected utilities and preferences", || {
            let sc = builtin_trade5();
            let alice = Agent::new("A");
            let bob = Agent::new("B");
            let info1 = sc.info_set(&alice, StateId(0)).unwrap();
            ensure(
                conditional_eu(&sc, "f", &info1).unwrap() == ratio(13, 3),
                "Alice's EU of f at state 1 is 13/3",
            )?;
            for (state, expected) in [(1, ratio(5, 1)), (2, ratio(7, 1)), (3, ratio(5, 1))] {
                let info = sc.info_set(&alice, StateId(state)).unwrap();
                ensure(
                    conditional_eu(&sc, "f", &info).unwrap() == expected,
                    "Alice's interior EU values",
                )?;
            }
            let all = sc.space().full_event();
            ensure(
                conditional_eu(&sc, "f", &all).unwrap() == ratio(19, 5),
                "Bob's EU of f is 19/5",
            )?;
            ensure(
                conditional_eu(&sc, "g", &all).unwrap() == ratio(4, 1),
                "g is worth exactly 4",
            )?;
            for state in sc.space().states() {
                ensure(
                    preferred_act(&sc, &alice, state).unwrap().act == "f",
                    "Alice always picks f",
                )?;
                ensure(
                    preferred_act(&sc, &bob, state).unwrap().act == "g",
                    "Bob always picks g",
                )?;
            }
            Ok(())
        }),
        (
            "trade: possible at every state; structure carries unawareness",
            || {
                let sc = builtin_trade5();
                let report = trade_report(&sc).unwrap();
                ensure(
                    report.possible_at.len() == 5,
                    "trade is possible at all five states",
                )?;
                let pm = sc.partitional_model();
                ensure(
                    DlrPartitionalModel::new(pm.clone(), StateId(0)).is_ok(),
                    "the structure is a partitional DLR model at state 1",
                )?;
                let m: Model = pm.into();
                ensure(
                    unawareness_witness(&m, StateId(0), &Agent::new("A"))
                        .unwrap()
                        .is_some(),
                    "Alice has nontrivial unawareness at state 1",
                )
            },
        ),
        ("schema checks agree with event-condition forms", || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            let mut models: Vec<Model> = vec![dlr3(), ring4()];
            for _ in 0..30 {
                models.push(random_standard(&mut rng, 3, &[agent1()]).into());
                models.push(random_partitional(&mut rng, 3, &[agent1()]).into());
            }
            let mut schemas = Schema::registry();
            schemas.push(Schema::NPlausibility(2));
            for m in &models {
                let agents: Vec<Agent> = m.agents().into_iter().cloned().collect();
                for schema in &schemas {
                    let tuple: Vec<Agent> = match schema.agent_arity() {
                        1 => vec![agents[0].clone()],
                        _ => vec![agents[0].clone(), agents[0].clone()],
                    };
                    for state in m.space().states() {
                        let via_formula =
                            schema_check_instance(m, schema, &tuple, Some(state)).unwrap();
                        let via_conditions =
                            conditions::schema_holds_at(m, schema, &tuple, state).unwrap();
                        ensure(
                            via_formula == via_conditions,
                            &format!("{schema} disagrees at {state:?}"),
                        )?;
                    }
                }
            }
            Ok(())
        }),
    ];

    checks
        .into_iter()
        .map(|(name, f)| Check { name, outcome: f() })
        .collect()
}
