//! Cross-module property tests: random formulas against the semantics,
//! random models against the symmetry machinery, and re-verification of
//! whatever the countermodel search returns.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use awarekit::analysis::generate::random_partitional;
use awarekit::analysis::{automorphisms, countermodel_search, is_coherent, SearchMode};
use awarekit::formula::{Agent, Formula};
use awarekit::models::builtin_ring4;
use awarekit::semantics::{evaluate, schema_check, valid_at, valid_on, Schema, Valuation};
use awarekit::Model;

fn arb_formula() -> impl Strategy<Value = Formula> {
    let letter = prop_oneof![Just("p"), Just("q")];
    let leaf = prop_oneof![
        Just(Formula::Top),
        Just(Formula::Bottom),
        letter.clone().prop_map(Formula::prop),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        let letter = prop_oneof![Just("p"), Just("q")];
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            inner.clone().prop_map(|f| Formula::knows("1", f)),
            inner.clone().prop_map(|f| Formula::aware("1", f)),
            inner.clone().prop_map(|f| Formula::unaware("1", f)),
            inner.clone().prop_map(|f| Formula::common("1", f)),
            (letter.clone(), inner.clone()).prop_map(|(v, f)| Formula::forall(v, f)),
            (letter, inner.clone()).prop_map(|(v, f)| Formula::exists(v, f)),
        ]
    })
}

fn ring4_valuation(p_mask: u64, q_mask: u64) -> (Model, Valuation) {
    let m: Model = builtin_ring4().into();
    let space = m.space().clone();
    let mut v = Valuation::new(space.clone());
    v.set("p", &space.event(p_mask & 0xF)).unwrap();
    v.set("q", &space.event(q_mask & 0xF)).unwrap();
    (m, v)
}

proptest! {
    #[test]
    fn negation_and_conjunction_are_pointwise(
        f in arb_formula(),
        g in arb_formula(),
        p_mask in 0u64..16,
        q_mask in 0u64..16,
    ) {
        let (m, v) = ring4_valuation(p_mask, q_mask);
        let ef = evaluate(&m, &v, &f).unwrap();
        let eg = evaluate(&m, &v, &g).unwrap();
        prop_assert_eq!(
            evaluate(&m, &v, &Formula::not(f.clone())).unwrap(),
            ef.complement()
        );
        prop_assert_eq!(
            evaluate(&m, &v, &Formula::and(f.clone(), g.clone())).unwrap(),
            ef.intersect(&eg).unwrap()
        );
        // the kept connective nodes agree with their abbreviation readings
        prop_assert_eq!(
            evaluate(&m, &v, &Formula::or(f.clone(), g.clone())).unwrap(),
            ef.union(&eg).unwrap()
        );
        prop_assert_eq!(
            evaluate(&m, &v, &Formula::imp(f.clone(), g.clone())).unwrap(),
            ef.complement().union(&eg).unwrap()
        );
        let both = ef.intersect(&eg).unwrap();
        let neither = ef.complement().intersect(&eg.complement()).unwrap();
        prop_assert_eq!(
            evaluate(&m, &v, &Formula::iff(f.clone(), g.clone())).unwrap(),
            both.union(&neither).unwrap()
        );
    }

    #[test]
    fn exists_is_the_dual_of_forall(
        f in arb_formula(),
        p_mask in 0u64..16,
        q_mask in 0u64..16,
    ) {
        let (m, v) = ring4_valuation(p_mask, q_mask);
        let ex = Formula::exists("p", f.clone());
        let dual = Formula::not(Formula::forall("p", Formula::not(f)));
        prop_assert_eq!(
            evaluate(&m, &v, &ex).unwrap(),
            evaluate(&m, &v, &dual).unwrap()
        );
    }

    #[test]
    fn tautology_instances_are_valid(f in arb_formula()) {
        let m: Model = builtin_ring4().into();
        let lem = Formula::or(f.clone(), Formula::not(f.clone()));
        prop_assert!(valid_on(&m, &lem).unwrap());
        let refl = Formula::imp(f.clone(), f);
        prop_assert!(valid_on(&m, &refl).unwrap());
    }

    #[test]
    fn automorphisms_form_a_group_and_coherence_forces_closure(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pm = random_partitional(&mut rng, 4, &[Agent::new("1")]);
        let autos = automorphisms(&pm).unwrap();
        prop_assert!(autos.iter().any(|f| f.is_identity()));
        for f in &autos {
            prop_assert!(autos.contains(&f.inverse()));
            for g in &autos {
                prop_assert!(autos.contains(&f.compose(g)));
            }
        }
        // coherent states validate the awareness-closure axioms
        let m: Model = pm.clone().into();
        for state in pm.space().states() {
            if is_coherent(&pm, state).unwrap().coherent {
                for schema in [Schema::A4ij, Schema::Ak4] {
                    prop_assert!(schema_check(&m, &schema, Some(state)).unwrap());
                }
            }
        }
    }

    #[test]
    fn found_countermodels_genuinely_refute(seed in 0u64..100) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = awarekit::analysis::generate::random_formula(
            &mut rng,
            3,
            &["p"],
            &[Agent::new("1")],
        );
        if let Some(cm) =
            countermodel_search(&f, 3, SearchMode::Random { seed }, Some(40)).unwrap()
        {
            let m: Model = cm.model.into();
            prop_assert!(!valid_at(&m, cm.state, &f).unwrap());
            prop_assert!(!evaluate(&m, &cm.valuation, &f).unwrap().contains(cm.state));
        }
    }
}
