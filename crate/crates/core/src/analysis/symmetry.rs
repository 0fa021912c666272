//! Automorphisms of partitional models and the coherence check built on
//! them: a state coheres when every pair of locally indistinguishable states
//! is carried one to the other by an automorphism that respects the local
//! partition.

use std::fmt;

use thiserror::Error;

use crate::formula::Agent;
use crate::models::{ModelError, PartitionalModel};
use crate::statespace::StateId;

/// Backtracking over permutations is capped here.
pub const AUTOMORPHISM_CAP: usize = 10;

#[derive(Debug, Error)]
pub enum SymmetryError {
    #[error("automorphism search supports at most {AUTOMORPHISM_CAP} states, got {0}")]
    TooManyStates(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A permutation of the states preserving, for every agent, both the
/// accessibility relation and the family of local partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    perm: Vec<usize>,
}

impl Automorphism {
    pub fn identity(n: usize) -> Automorphism {
        Automorphism {
            perm: (0..n).collect(),
        }
    }

    pub fn apply(&self, state: StateId) -> StateId {
        StateId(self.perm[state.0])
    }

    pub fn images(&self) -> &[usize] {
        &self.perm
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// `(self ∘ other)(x) = self(other(x))`.
    pub fn compose(&self, other: &Automorphism) -> Automorphism {
        Automorphism {
            perm: other.perm.iter().map(|&x| self.perm[x]).collect(),
        }
    }

    pub fn inverse(&self) -> Automorphism {
        let mut perm = vec![0; self.perm.len()];
        for (i, &j) in self.perm.iter().enumerate() {
            perm[j] = i;
        }
        Automorphism { perm }
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, j) in self.perm.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "]")
    }
}

/// Full check of the two automorphism conditions for a complete permutation.
pub fn is_automorphism(pm: &PartitionalModel, perm: &[usize]) -> bool {
    let n = pm.space().len();
    for (_, ops) in pm.agent_pairs() {
        for x in 0..n {
            for y in 0..n {
                let related = ops.relation.relates(StateId(x), StateId(y));
                let mapped = ops.relation.relates(StateId(perm[x]), StateId(perm[y]));
                if related != mapped {
                    return false;
                }
                for z in 0..n {
                    let same = ops.partitions[x].relates(StateId(y), StateId(z));
                    let mapped =
                        ops.partitions[perm[x]].relates(StateId(perm[y]), StateId(perm[z]));
                    if same != mapped {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// All automorphisms of the model, found by backtracking with pruning on
/// the partially assigned permutation.
pub fn automorphisms(pm: &PartitionalModel) -> Result<Vec<Automorphism>, SymmetryError> {
    let n = pm.space().len();
    if n > AUTOMORPHISM_CAP {
        return Err(SymmetryError::TooManyStates(n));
    }
    let mut out = Vec::new();
    let mut perm = vec![usize::MAX; n];
    let mut used = 0u64;
    extend(pm, &mut perm, &mut used, 0, &mut out);
    Ok(out)
}

fn extend(
    pm: &PartitionalModel,
    perm: &mut Vec<usize>,
    used: &mut u64,
    pos: usize,
    out: &mut Vec<Automorphism>,
) {
    let n = pm.space().len();
    if pos == n {
        if is_automorphism(pm, perm) {
            out.push(Automorphism { perm: perm.clone() });
        }
        return;
    }
    for img in 0..n {
        if *used >> img & 1 == 1 {
            continue;
        }
        perm[pos] = img;
        *used |= 1 << img;
        if partial_ok(pm, perm, pos) {
            extend(pm, perm, used, pos + 1, out);
        }
        *used &= !(1 << img);
        perm[pos] = usize::MAX;
    }
}

/// Checks every relation pair and partition triple whose members are all
/// assigned and which involves the freshly assigned position.
fn partial_ok(pm: &PartitionalModel, perm: &[usize], pos: usize) -> bool {
    for (_, ops) in pm.agent_pairs() {
        for other in 0..=pos {
            for (x, y) in [(pos, other), (other, pos)] {
                let related = ops.relation.relates(StateId(x), StateId(y));
                let mapped = ops.relation.relates(StateId(perm[x]), StateId(perm[y]));
                if related != mapped {
                    return false;
                }
            }
        }
        for x in 0..=pos {
            for y in 0..=pos {
                for z in 0..=pos {
                    if x != pos && y != pos && z != pos {
                        continue;
                    }
                    let same = ops.partitions[x].relates(StateId(y), StateId(z));
                    let mapped =
                        ops.partitions[perm[x]].relates(StateId(perm[y]), StateId(perm[z]));
                    if same != mapped {
                        return false;
                    }
                }
            }
        }
    }
    true
}

/// One locally indistinguishable pair together with an automorphism carrying
/// the first member to the second while respecting the local partition.
#[derive(Debug, Clone)]
pub struct CoherencePair {
    pub agent: Agent,
    pub y: StateId,
    pub z: StateId,
    pub witness: Option<Automorphism>,
}

#[derive(Debug, Clone)]
pub struct CoherenceReport {
    pub state: StateId,
    pub coherent: bool,
    pub pairs: Vec<CoherencePair>,
}

impl CoherenceReport {
    pub fn first_failure(&self) -> Option<&CoherencePair> {
        self.pairs.iter().find(|p| p.witness.is_none())
    }
}

/// A state coheres if for every agent `i` and every pair `y ≈^i_state z`
/// there is an automorphism `f` with `f(y) = z` and `f(ω) ≈^i_state ω` for
/// all `ω`.
pub fn is_coherent(
    pm: &PartitionalModel,
    state: StateId,
) -> Result<CoherenceReport, SymmetryError> {
    let autos = automorphisms(pm)?;
    let n = pm.space().len();
    let mut pairs = Vec::new();
    for (agent, ops) in pm.agent_pairs() {
        let local = &ops.partitions[state.0];
        for y in 0..n {
            for z in 0..n {
                if !local.relates(StateId(y), StateId(z)) {
                    continue;
                }
                let witness = autos
                    .iter()
                    .find(|f| {
                        f.images()[y] == z
                            && (0..n).all(|w| local.relates(StateId(w), StateId(f.images()[w])))
                    })
                    .cloned();
                pairs.push(CoherencePair {
                    agent: agent.clone(),
                    y: StateId(y),
                    z: StateId(z),
                    witness,
                });
            }
        }
    }
    let coherent = pairs.iter().all(|p| p.witness.is_some());
    Ok(CoherenceReport {
        state,
        coherent,
        pairs,
    })
}
