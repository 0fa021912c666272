//! Seeded random generation of models, events, and formulas for the
//! property-test batteries.

use rand::Rng;

use crate::formula::{Agent, Formula};
use crate::models::{
    DlrPartitionalModel, OperatorTable, Partition, PartitionalModel, PartitionalOps, Relation,
    StandardModel, StandardOps,
};
use crate::statespace::{Event, StateId, StateSpace};

pub fn random_event(rng: &mut impl Rng, space: &StateSpace) -> Event {
    space.event(rng.random::<u64>() & space.full_mask())
}

/// Reflexive-transitive closure of a sparse random digraph.
pub fn random_preorder(rng: &mut impl Rng, space: &StateSpace) -> Relation {
    let n = space.len();
    let mut rows = vec![0u64; n];
    for row in rows.iter_mut() {
        for j in 0..n {
            if rng.random_bool(0.25) {
                *row |= 1 << j;
            }
        }
    }
    Relation::closure(space.clone(), rows)
}

pub fn random_partition(rng: &mut impl Rng, space: &StateSpace) -> Partition {
    let n = space.len();
    let mut rgs = vec![0usize; n];
    let mut max_used = 0;
    for slot in rgs.iter_mut().skip(1) {
        *slot = rng.random_range(0..=max_used + 1);
        max_used = max_used.max(*slot);
    }
    Partition::from_rgs(space.clone(), &rgs)
}

/// A partitional model over exactly `n` numbered states.
pub fn random_partitional_exact(
    rng: &mut impl Rng,
    n: usize,
    agents: &[Agent],
) -> PartitionalModel {
    let space = StateSpace::numbered(n).unwrap();
    let agent_ops = agents
        .iter()
        .map(|a| {
            let relation = random_preorder(rng, &space);
            let partitions = (0..n).map(|_| random_partition(rng, &space)).collect();
            (
                a.clone(),
                PartitionalOps {
                    relation,
                    partitions,
                },
            )
        })
        .collect();
    PartitionalModel::new(space, agent_ops).unwrap()
}

/// A partitional model over 1 to `max_states` states.
pub fn random_partitional(
    rng: &mut impl Rng,
    max_states: usize,
    agents: &[Agent],
) -> PartitionalModel {
    let n = rng.random_range(1..=max_states);
    random_partitional_exact(rng, n, agents)
}

/// A standard model with uniformly random operator tables over 1 to
/// `max_states` states.
pub fn random_standard(rng: &mut impl Rng, max_states: usize, agents: &[Agent]) -> StandardModel {
    let n = rng.random_range(1..=max_states);
    let space = StateSpace::numbered(n).unwrap();
    let full = space.full_mask();
    let agent_ops = agents
        .iter()
        .map(|a| {
            let k = OperatorTable::from_fn(space.clone(), |_| rng.random::<u64>() & full).unwrap();
            let a_op =
                OperatorTable::from_fn(space.clone(), |_| rng.random::<u64>() & full).unwrap();
            (a.clone(), StandardOps { k, a: a_op })
        })
        .collect();
    StandardModel::new(space, agent_ops).unwrap()
}

/// A random partitional model with a distinguished state at which all three
/// DLR axioms hold for every agent. When no state of the sample qualifies,
/// the partitions at state 1 are flattened to singletons, which always
/// qualifies under reflexive accessibility.
pub fn random_dlr_partitional(
    rng: &mut impl Rng,
    max_states: usize,
    agents: &[Agent],
) -> DlrPartitionalModel {
    let pm = random_partitional(rng, max_states, agents);
    for state in pm.space().states() {
        if let Ok(dlr) = DlrPartitionalModel::new(pm.clone(), state) {
            return dlr;
        }
    }
    let space = pm.space().clone();
    let repaired = pm
        .agent_pairs()
        .iter()
        .map(|(a, ops)| {
            let mut partitions = ops.partitions.clone();
            partitions[0] = Partition::identity(space.clone());
            (
                a.clone(),
                PartitionalOps {
                    relation: ops.relation.clone(),
                    partitions,
                },
            )
        })
        .collect();
    let repaired = PartitionalModel::new(space, repaired).unwrap();
    DlrPartitionalModel::new(repaired, StateId(0))
        .expect("full local awareness satisfies the DLR axioms")
}

/// A random formula over the given letters and agents; quantifier-free so it
/// stays cheap to evaluate in batteries.
pub fn random_formula(
    rng: &mut impl Rng,
    depth: usize,
    letters: &[&str],
    agents: &[Agent],
) -> Formula {
    if depth == 0 || rng.random_bool(0.3) {
        return match rng.random_range(0..3) {
            0 => Formula::Top,
            1 => Formula::Bottom,
            _ => Formula::prop(letters[rng.random_range(0..letters.len())]),
        };
    }
    let agent = agents[rng.random_range(0..agents.len())].clone();
    match rng.random_range(0..9) {
        0 => Formula::not(random_formula(rng, depth - 1, letters, agents)),
        1 => Formula::and(
            random_formula(rng, depth - 1, letters, agents),
            random_formula(rng, depth - 1, letters, agents),
        ),
        2 => Formula::or(
            random_formula(rng, depth - 1, letters, agents),
            random_formula(rng, depth - 1, letters, agents),
        ),
        3 => Formula::imp(
            random_formula(rng, depth - 1, letters, agents),
            random_formula(rng, depth - 1, letters, agents),
        ),
        4 => Formula::iff(
            random_formula(rng, depth - 1, letters, agents),
            random_formula(rng, depth - 1, letters, agents),
        ),
        5 => Formula::knows(agent, random_formula(rng, depth - 1, letters, agents)),
        6 => Formula::aware(agent, random_formula(rng, depth - 1, letters, agents)),
        7 => Formula::unaware(agent, random_formula(rng, depth - 1, letters, agents)),
        _ => Formula::common(agent, random_formula(rng, depth - 1, letters, agents)),
    }
}
