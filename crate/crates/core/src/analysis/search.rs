//! Bounded countermodel search over partitional models: exhaustive
//! enumeration in a canonical order, or seeded random sampling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::analysis::generate::random_partitional_exact;
use crate::formula::{Agent, Formula};
use crate::models::{Partition, PartitionalModel, PartitionalOps, Relation};
use crate::semantics::{find_countervaluation, valid_at, EvalError, Valuation};
use crate::statespace::{StateId, StateSpace};

/// Exhaustive mode scans `2^(n² − n)` candidate relations per state count,
/// which stops being sensible beyond this bound.
pub const EXHAUSTIVE_STATE_CAP: usize = 5;

/// Default number of samples drawn in random mode when no budget is given.
pub const DEFAULT_RANDOM_BUDGET: u64 = 10_000;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("max_states must be at least 1")]
    ZeroStates,
    #[error("exhaustive search supports at most {EXHAUSTIVE_STATE_CAP} states, got {0}")]
    TooManyStates(usize),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    Random { seed: u64 },
}

/// A partitional model and state refuting a formula, together with the
/// falsifying assignment of events to its free letters.
#[derive(Debug, Clone)]
pub struct Countermodel {
    pub model: PartitionalModel,
    pub state: StateId,
    pub valuation: Valuation,
}

/// All reflexive-transitive relations on the space, in ascending order of
/// their off-diagonal bit pattern.
pub fn preorders(space: &StateSpace) -> Vec<Relation> {
    let n = space.len();
    let off = n * n - n;
    let mut out = Vec::new();
    for code in 0..1u64 << off {
        let mut rows = vec![0u64; n];
        let mut bit = 0;
        for (i, row) in rows.iter_mut().enumerate() {
            *row |= 1 << i;
            for j in 0..n {
                if i != j {
                    if code >> bit & 1 == 1 {
                        *row |= 1 << j;
                    }
                    bit += 1;
                }
            }
        }
        if let Ok(r) = Relation::from_rows(space.clone(), rows) {
            out.push(r);
        }
    }
    out
}

/// All restricted growth strings of length `n`, lexicographically.
pub fn rgs_strings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    grow(&mut cur, 1, 0, &mut out);
    out
}

fn grow(cur: &mut Vec<usize>, pos: usize, max_used: usize, out: &mut Vec<Vec<usize>>) {
    if pos == cur.len() {
        out.push(cur.clone());
        return;
    }
    for v in 0..=max_used + 1 {
        cur[pos] = v;
        grow(cur, pos + 1, max_used.max(v), out);
    }
}

/// All partitions of the space, via restricted growth strings.
pub fn partitions(space: &StateSpace) -> Vec<Partition> {
    rgs_strings(space.len())
        .into_iter()
        .map(|rgs| Partition::from_rgs(space.clone(), &rgs))
        .collect()
}

fn agents_of(f: &Formula) -> Vec<Agent> {
    let agents: Vec<Agent> = f.letters().agents.into_iter().collect();
    if agents.is_empty() {
        vec![Agent::new("1")]
    } else {
        agents
    }
}

/// Searches for a partitional model and state where the formula is not
/// valid. Exhaustive mode enumerates models with 1 to `max_states` states in
/// canonical order (states ascending, then per agent the relation code,
/// then the per-state partition strings); random mode samples seeded models.
/// `budget` caps the number of candidate models examined; exhaustive mode
/// defaults to the full sweep, random mode to [`DEFAULT_RANDOM_BUDGET`].
pub fn countermodel_search(
    f: &Formula,
    max_states: usize,
    mode: SearchMode,
    budget: Option<u64>,
) -> Result<Option<Countermodel>, SearchError> {
    if max_states == 0 {
        return Err(SearchError::ZeroStates);
    }
    let agents = agents_of(f);
    match mode {
        SearchMode::Exhaustive => {
            if max_states > EXHAUSTIVE_STATE_CAP {
                return Err(SearchError::TooManyStates(max_states));
            }
            exhaustive(f, &agents, max_states, budget)
        }
        SearchMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let trials = budget.unwrap_or(DEFAULT_RANDOM_BUDGET);
            let mut examined = 0u64;
            while examined < trials {
                examined += 1;
                use rand::Rng;
                let n = rng.random_range(1..=max_states);
                let model = random_partitional_exact(&mut rng, n, &agents);
                if let Some(cm) = refutes(f, model)? {
                    return Ok(Some(cm));
                }
            }
            Ok(None)
        }
    }
}

fn refutes(f: &Formula, model: PartitionalModel) -> Result<Option<Countermodel>, SearchError> {
    let m = model.clone().into();
    if let Some((state, valuation)) = find_countervaluation(&m, f)? {
        debug_assert!(!valid_at(&m, state, f)?);
        return Ok(Some(Countermodel {
            model,
            state,
            valuation,
        }));
    }
    Ok(None)
}

fn exhaustive(
    f: &Formula,
    agents: &[Agent],
    max_states: usize,
    budget: Option<u64>,
) -> Result<Option<Countermodel>, SearchError> {
    let mut examined = 0u64;
    for n in 1..=max_states {
        let space = StateSpace::numbered(n).unwrap();
        let relations = preorders(&space);
        let parts = partitions(&space);
        // per agent: one relation index plus one partition index per state
        let digits_per_agent = 1 + n;
        let mut digits = vec![0usize; agents.len() * digits_per_agent];
        let radix = |d: usize| {
            if d.is_multiple_of(digits_per_agent) {
                relations.len()
            } else {
                parts.len()
            }
        };
        'models: loop {
            if let Some(b) = budget {
                if examined >= b {
                    return Ok(None);
                }
            }
            examined += 1;
            let mut agent_ops = Vec::with_capacity(agents.len());
            for (ai, agent) in agents.iter().enumerate() {
                let base = ai * digits_per_agent;
                let relation = relations[digits[base]].clone();
                let partitions: Vec<Partition> = (0..n)
                    .map(|s| parts[digits[base + 1 + s]].clone())
                    .collect();
                agent_ops.push((
                    agent.clone(),
                    PartitionalOps {
                        relation,
                        partitions,
                    },
                ));
            }
            let model = PartitionalModel::new(space.clone(), agent_ops)
                .expect("enumerated structures are well-formed");
            if let Some(cm) = refutes(f, model)? {
                return Ok(Some(cm));
            }
            // odometer, last digit fastest
            let mut pos = digits.len();
            loop {
                if pos == 0 {
                    break 'models;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] == radix(pos) {
                    digits[pos] = 0;
                } else {
                    break;
                }
            }
        }
    }
    Ok(None)
}
