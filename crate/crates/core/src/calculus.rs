//! Hilbert-style proof checking for the calculus of partitional models and
//! its extension with the unawareness axioms.
//!
//! The base calculus has PL (tautology instances), K-K, K-T, K-4, A-Neg,
//! A-M, A-N and the rules MP, K-RN, A-RE. The `dlr` calculus adds the axioms
//! P and AU but closes them under modus ponens only: K-RN and A-RE may cite
//! base-calculus theorems exclusively, which the checker enforces with a
//! per-line base flag. Note this reads the closure condition strictly; in
//! particular A-RE never accepts a premise that depends on P or AU.
//!
//! Proof file format, one step per line after a `calculus: base|dlr`
//! header:
//!
//! ```text
//! n. <formula> ; <justification>
//! ```
//!
//! with justifications `ax <NAME>`, `pl`, `mp <i> <j>` (line `i` the
//! antecedent, line `j` the implication), `krn <i> <agent>`, and
//! `are <i> <agent>`. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::formula::{Agent, Formula, ParseError};

/// A derivation of `~K_1 U_1 p` in the `dlr` calculus, threading the axioms
/// P and AU through K-T by propositional reasoning.
pub const NOT_KNOW_UNAWARE_PROOF: &str = "\
calculus: dlr
1. K_1 U_1 p -> U_1 p ; ax K-T
2. U_1 p -> U_1 U_1 p ; ax AU
3. U_1 U_1 p -> ~K_1 U_1 p & ~K_1 ~K_1 U_1 p ; ax P
4. (K_1 U_1 p -> U_1 p) -> ((U_1 p -> U_1 U_1 p) -> ((U_1 U_1 p -> ~K_1 U_1 p & ~K_1 ~K_1 U_1 p) -> (K_1 U_1 p -> ~K_1 U_1 p))) ; pl
5. (U_1 p -> U_1 U_1 p) -> ((U_1 U_1 p -> ~K_1 U_1 p & ~K_1 ~K_1 U_1 p) -> (K_1 U_1 p -> ~K_1 U_1 p)) ; mp 1 4
6. (U_1 U_1 p -> ~K_1 U_1 p & ~K_1 ~K_1 U_1 p) -> (K_1 U_1 p -> ~K_1 U_1 p) ; mp 2 5
7. K_1 U_1 p -> ~K_1 U_1 p ; mp 3 6
8. (K_1 U_1 p -> ~K_1 U_1 p) -> ~K_1 U_1 p ; pl
9. ~K_1 U_1 p ; mp 7 8
";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalculusId {
    Base,
    Dlr,
}

impl CalculusId {
    pub fn from_name(name: &str) -> Option<CalculusId> {
        match name.trim().to_ascii_lowercase().as_str() {
            "base" => Some(CalculusId::Base),
            "dlr" => Some(CalculusId::Dlr),
            _ => None,
        }
    }
}

impl fmt::Display for CalculusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CalculusId::Base => "base",
            CalculusId::Dlr => "dlr",
        })
    }
}

/// Named axiom schemas of the two calculi.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxiomName {
    KK,
    KT,
    K4,
    ANeg,
    AM,
    AN,
    P,
    Au,
}

impl AxiomName {
    pub const ALL: [AxiomName; 8] = [
        AxiomName::KK,
        AxiomName::KT,
        AxiomName::K4,
        AxiomName::ANeg,
        AxiomName::AM,
        AxiomName::AN,
        AxiomName::P,
        AxiomName::Au,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AxiomName::KK => "K-K",
            AxiomName::KT => "K-T",
            AxiomName::K4 => "K-4",
            AxiomName::ANeg => "A-Neg",
            AxiomName::AM => "A-M",
            AxiomName::AN => "A-N",
            AxiomName::P => "P",
            AxiomName::Au => "AU",
        }
    }

    pub fn from_name(name: &str) -> Option<AxiomName> {
        let norm: String = name
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_lowercase();
        Some(match norm.as_str() {
            "kk" => AxiomName::KK,
            "kt" => AxiomName::KT,
            "k4" => AxiomName::K4,
            "aneg" => AxiomName::ANeg,
            "am" => AxiomName::AM,
            "an" => AxiomName::AN,
            "p" => AxiomName::P,
            "au" => AxiomName::Au,
            _ => return None,
        })
    }

    /// True for the axioms of the base calculus; P and AU belong to the
    /// `dlr` extension only.
    pub fn in_base(&self) -> bool {
        !matches!(self, AxiomName::P | AxiomName::Au)
    }

    /// The schema template over the formula metavariables `phi`, `psi` and
    /// the agent metavariable `i`.
    pub fn template(&self) -> Formula {
        use Formula as F;
        let i = || Agent::new("i");
        let phi = || F::prop("phi");
        let psi = || F::prop("psi");
        match self {
            AxiomName::KK => F::imp(
                F::knows(i(), F::imp(phi(), psi())),
                F::imp(F::knows(i(), phi()), F::knows(i(), psi())),
            ),
            AxiomName::KT => F::imp(F::knows(i(), phi()), phi()),
            AxiomName::K4 => F::imp(F::knows(i(), phi()), F::knows(i(), F::knows(i(), phi()))),
            AxiomName::ANeg => F::imp(F::aware(i(), phi()), F::aware(i(), F::not(phi()))),
            AxiomName::AM => F::imp(
                F::and(F::aware(i(), phi()), F::aware(i(), psi())),
                F::aware(i(), F::and(phi(), psi())),
            ),
            AxiomName::AN => F::aware(i(), F::Top),
            AxiomName::P => F::imp(
                F::unaware(i(), phi()),
                F::and(
                    F::not(F::knows(i(), phi())),
                    F::not(F::knows(i(), F::not(F::knows(i(), phi())))),
                ),
            ),
            AxiomName::Au => F::imp(
                F::unaware(i(), phi()),
                F::unaware(i(), F::unaware(i(), phi())),
            ),
        }
    }
}

impl fmt::Display for AxiomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

const FORMULA_METAVARS: [&str; 2] = ["phi", "psi"];
const AGENT_METAVAR: &str = "i";

/// A metavariable assignment turning a schema template into a formula.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub formulas: BTreeMap<String, Formula>,
    pub agents: BTreeMap<String, Agent>,
}

/// Matches a formula against an axiom schema; agents must match uniformly.
pub fn match_axiom(f: &Formula, axiom: AxiomName) -> Option<Substitution> {
    let mut sub = Substitution::default();
    if unify(&axiom.template(), f, &mut sub) {
        Some(sub)
    } else {
        None
    }
}

fn unify_agent(meta: &Agent, actual: &Agent, sub: &mut Substitution) -> bool {
    if meta.as_str() == AGENT_METAVAR {
        match sub.agents.get(AGENT_METAVAR) {
            Some(bound) => bound == actual,
            None => {
                sub.agents.insert(AGENT_METAVAR.into(), actual.clone());
                true
            }
        }
    } else {
        meta == actual
    }
}

fn unify(t: &Formula, f: &Formula, sub: &mut Substitution) -> bool {
    match (t, f) {
        (Formula::Prop(name), _) if FORMULA_METAVARS.contains(&name.as_str()) => {
            match sub.formulas.get(name) {
                Some(bound) => bound == f,
                None => {
                    sub.formulas.insert(name.clone(), f.clone());
                    true
                }
            }
        }
        (Formula::Prop(a), Formula::Prop(b)) => a == b,
        (Formula::Top, Formula::Top) | (Formula::Bottom, Formula::Bottom) => true,
        (Formula::Not(a), Formula::Not(b)) => unify(a, b, sub),
        (Formula::And(a1, a2), Formula::And(b1, b2))
        | (Formula::Or(a1, a2), Formula::Or(b1, b2))
        | (Formula::Imp(a1, a2), Formula::Imp(b1, b2))
        | (Formula::Iff(a1, a2), Formula::Iff(b1, b2)) => unify(a1, b1, sub) && unify(a2, b2, sub),
        (Formula::Knows(ai, a), Formula::Knows(bi, b))
        | (Formula::Aware(ai, a), Formula::Aware(bi, b))
        | (Formula::Common(ai, a), Formula::Common(bi, b)) => {
            unify_agent(ai, bi, sub) && unify(a, b, sub)
        }
        (Formula::Forall(va, a), Formula::Forall(vb, b))
        | (Formula::Exists(va, a), Formula::Exists(vb, b)) => va == vb && unify(a, b, sub),
        _ => false,
    }
}

/// Applies a substitution to a template; unbound metavariables stay as
/// plain letters.
pub fn apply_substitution(template: &Formula, sub: &Substitution) -> Formula {
    let map_agent = |a: &Agent| -> Agent {
        sub.agents
            .get(a.as_str())
            .cloned()
            .unwrap_or_else(|| a.clone())
    };
    match template {
        Formula::Prop(name) => sub
            .formulas
            .get(name)
            .cloned()
            .unwrap_or_else(|| template.clone()),
        Formula::Top | Formula::Bottom => template.clone(),
        Formula::Not(g) => Formula::not(apply_substitution(g, sub)),
        Formula::And(l, r) => Formula::and(apply_substitution(l, sub), apply_substitution(r, sub)),
        Formula::Or(l, r) => Formula::or(apply_substitution(l, sub), apply_substitution(r, sub)),
        Formula::Imp(l, r) => Formula::imp(apply_substitution(l, sub), apply_substitution(r, sub)),
        Formula::Iff(l, r) => Formula::iff(apply_substitution(l, sub), apply_substitution(r, sub)),
        Formula::Knows(a, g) => Formula::knows(map_agent(a), apply_substitution(g, sub)),
        Formula::Aware(a, g) => Formula::aware(map_agent(a), apply_substitution(g, sub)),
        Formula::Common(a, g) => Formula::common(map_agent(a), apply_substitution(g, sub)),
        Formula::Forall(v, g) => Formula::forall(v.clone(), apply_substitution(g, sub)),
        Formula::Exists(v, g) => Formula::exists(v.clone(), apply_substitution(g, sub)),
    }
}

/// The axiom schema instantiated for a concrete agent, metavariables kept
/// as the letters `phi`, `psi` (so validity checks quantify them over all
/// events).
pub fn axiom_formula(axiom: AxiomName, agent: &Agent) -> Formula {
    let mut sub = Substitution::default();
    sub.agents.insert(AGENT_METAVAR.into(), agent.clone());
    apply_substitution(&axiom.template(), &sub)
}

// ---------------------------------------------------------------------------
// Tautology checking

pub const TAUTOLOGY_ATOM_CAP: usize = 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TautologyError {
    #[error("Boolean skeleton has {0} distinct atoms, the cap is {TAUTOLOGY_ATOM_CAP}")]
    AtomCap(usize),
}

fn skeleton_atoms<'a>(f: &'a Formula, atoms: &mut Vec<&'a Formula>) {
    match f {
        Formula::Top | Formula::Bottom => {}
        Formula::Not(g) => skeleton_atoms(g, atoms),
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) | Formula::Iff(l, r) => {
            skeleton_atoms(l, atoms);
            skeleton_atoms(r, atoms);
        }
        _ => {
            if !atoms.contains(&f) {
                atoms.push(f);
            }
        }
    }
}

fn skeleton_truth(f: &Formula, atoms: &[&Formula], assignment: u32) -> bool {
    match f {
        Formula::Top => true,
        Formula::Bottom => false,
        Formula::Not(g) => !skeleton_truth(g, atoms, assignment),
        Formula::And(l, r) => {
            skeleton_truth(l, atoms, assignment) && skeleton_truth(r, atoms, assignment)
        }
        Formula::Or(l, r) => {
            skeleton_truth(l, atoms, assignment) || skeleton_truth(r, atoms, assignment)
        }
        Formula::Imp(l, r) => {
            !skeleton_truth(l, atoms, assignment) || skeleton_truth(r, atoms, assignment)
        }
        Formula::Iff(l, r) => {
            skeleton_truth(l, atoms, assignment) == skeleton_truth(r, atoms, assignment)
        }
        _ => {
            let idx = atoms.iter().position(|a| *a == f).expect("atom collected");
            assignment >> idx & 1 == 1
        }
    }
}

/// True when the formula is a substitution instance of a propositional
/// tautology: maximal modal and quantified subformulas count as atoms and
/// the Boolean skeleton is truth-tabled.
pub fn is_tautology_instance(f: &Formula) -> Result<bool, TautologyError> {
    let mut atoms = Vec::new();
    skeleton_atoms(f, &mut atoms);
    if atoms.len() > TAUTOLOGY_ATOM_CAP {
        return Err(TautologyError::AtomCap(atoms.len()));
    }
    for assignment in 0..1u32 << atoms.len() {
        if !skeleton_truth(f, &atoms, assignment) {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Proofs

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Axiom(AxiomName),
    Pl,
    /// `Mp(i, j)`: line `i` is the antecedent, line `j` the implication.
    Mp(usize, usize),
    KRn(usize, Agent),
    ARe(usize, Agent),
}

impl fmt::Display for Justification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Axiom(ax) => write!(f, "ax {ax}"),
            Justification::Pl => write!(f, "pl"),
            Justification::Mp(i, j) => write!(f, "mp {i} {j}"),
            Justification::KRn(i, a) => write!(f, "krn {i} {a}"),
            Justification::ARe(i, a) => write!(f, "are {i} {a}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub calculus: CalculusId,
    pub lines: Vec<ProofLine>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Accepted,
    Rejected { line: usize, reason: String },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted => write!(f, "accepted"),
            Verdict::Rejected { line, reason } => write!(f, "rejected at line {line}: {reason}"),
        }
    }
}

/// Checks a proof line by line; reports the first bad line. Each line also
/// carries a base-theorem flag: in the `dlr` calculus the axioms P and AU
/// taint their consequences, and K-RN / A-RE refuse tainted premises.
pub fn check_proof(p: &Proof) -> Verdict {
    let mut base_flags: Vec<bool> = Vec::with_capacity(p.lines.len());
    for idx in 0..p.lines.len() {
        match check_line(p, idx, &base_flags) {
            Ok(is_base) => base_flags.push(is_base),
            Err(reason) => {
                return Verdict::Rejected {
                    line: idx + 1,
                    reason,
                }
            }
        }
    }
    Verdict::Accepted
}

fn check_line(p: &Proof, idx: usize, base_flags: &[bool]) -> Result<bool, String> {
    let line = &p.lines[idx];
    let earlier = |i: usize| -> Result<&ProofLine, String> {
        if i == 0 || i > idx {
            Err(format!(
                "justification references line {i}, which is not an earlier line"
            ))
        } else {
            Ok(&p.lines[i - 1])
        }
    };
    match &line.justification {
        Justification::Axiom(ax) => {
            if p.calculus == CalculusId::Base && !ax.in_base() {
                return Err(format!("axiom {ax} is not part of the base calculus"));
            }
            match_axiom(&line.formula, *ax)
                .ok_or_else(|| format!("not an instance of axiom {ax}"))?;
            Ok(ax.in_base())
        }
        Justification::Pl => {
            let taut = is_tautology_instance(&line.formula).map_err(|e| e.to_string())?;
            if !taut {
                return Err("not a substitution instance of a propositional tautology".into());
            }
            Ok(true)
        }
        Justification::Mp(i, j) => {
            let antecedent = earlier(*i)?;
            let implication = earlier(*j)?;
            match &implication.formula {
                Formula::Imp(l, r) => {
                    if **l != antecedent.formula {
                        return Err(format!(
                            "line {j} is an implication, but its antecedent is not line {i}"
                        ));
                    }
                    if **r != line.formula {
                        return Err(format!(
                            "modus ponens from lines {i} and {j} yields a different formula"
                        ));
                    }
                    Ok(base_flags[i - 1] && base_flags[j - 1])
                }
                _ => Err(format!("line {j} is not an implication")),
            }
        }
        Justification::KRn(i, agent) => {
            let premise = earlier(*i)?;
            if !base_flags[i - 1] {
                return Err(format!(
                    "K-RN needs a base-calculus theorem as premise; line {i} depends on P or AU"
                ));
            }
            let expected = Formula::knows(agent.clone(), premise.formula.clone());
            if line.formula != expected {
                return Err(format!("K-RN from line {i} yields a different formula"));
            }
            Ok(true)
        }
        Justification::ARe(i, agent) => {
            let premise = earlier(*i)?;
            if !base_flags[i - 1] {
                return Err(format!(
                    "A-RE needs a base-calculus theorem as premise; line {i} depends on P or AU"
                ));
            }
            match &premise.formula {
                Formula::Iff(l, r) => {
                    let expected = Formula::iff(
                        Formula::aware(agent.clone(), (**l).clone()),
                        Formula::aware(agent.clone(), (**r).clone()),
                    );
                    if line.formula != expected {
                        return Err(format!("A-RE from line {i} yields a different formula"));
                    }
                    Ok(true)
                }
                _ => Err(format!("line {i} is not a biconditional")),
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Proof files

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("proof file line {line}: {message}")]
pub struct ProofParseError {
    pub line: usize,
    pub message: String,
}

fn proof_err<T>(line: usize, message: impl Into<String>) -> Result<T, ProofParseError> {
    Err(ProofParseError {
        line,
        message: message.into(),
    })
}

pub fn parse_proof(text: &str) -> Result<Proof, ProofParseError> {
    let mut calculus = None;
    let mut lines = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if calculus.is_none() {
            let Some(rest) = content.strip_prefix("calculus:") else {
                return proof_err(lineno, "expected a `calculus: base|dlr` header");
            };
            match CalculusId::from_name(rest) {
                Some(c) => calculus = Some(c),
                None => return proof_err(lineno, format!("unknown calculus `{}`", rest.trim())),
            }
            continue;
        }
        let Some(dot) = content.find('.') else {
            return proof_err(lineno, "expected `n. <formula> ; <justification>`");
        };
        let num: usize = match content[..dot].trim().parse() {
            Ok(n) => n,
            Err(_) => return proof_err(lineno, "expected a line number before `.`"),
        };
        if num != lines.len() + 1 {
            return proof_err(
                lineno,
                format!("expected line number {}, found {num}", lines.len() + 1),
            );
        }
        let rest = &content[dot + 1..];
        let Some(semi) = rest.find(';') else {
            return proof_err(lineno, "missing `;` before the justification");
        };
        let formula =
            Formula::parse(rest[..semi].trim()).map_err(|e: ParseError| ProofParseError {
                line: lineno,
                message: e.to_string(),
            })?;
        let justification =
            parse_justification(rest[semi + 1..].trim()).map_err(|m| ProofParseError {
                line: lineno,
                message: m,
            })?;
        lines.push(ProofLine {
            formula,
            justification,
        });
    }
    match calculus {
        Some(calculus) => Ok(Proof { calculus, lines }),
        None => proof_err(1, "empty proof file"),
    }
}

fn parse_justification(text: &str) -> Result<Justification, String> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    match parts.as_slice() {
        ["ax", name] => AxiomName::from_name(name)
            .map(Justification::Axiom)
            .ok_or_else(|| format!("unknown axiom `{name}`")),
        ["pl"] => Ok(Justification::Pl),
        ["mp", i, j] => {
            let i = i
                .parse()
                .map_err(|_| "mp needs two line numbers".to_string())?;
            let j = j
                .parse()
                .map_err(|_| "mp needs two line numbers".to_string())?;
            Ok(Justification::Mp(i, j))
        }
        ["krn", i, agent] => {
            let i = i
                .parse()
                .map_err(|_| "krn needs a line number".to_string())?;
            Ok(Justification::KRn(i, Agent::new(*agent)))
        }
        ["are", i, agent] => {
            let i = i
                .parse()
                .map_err(|_| "are needs a line number".to_string())?;
            Ok(Justification::ARe(i, Agent::new(*agent)))
        }
        _ => Err(format!("malformed justification `{text}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::generate::{random_dlr_partitional, random_partitional};
    use crate::models::Model;
    use crate::semantics::{valid_at, valid_on};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn the_derivation_is_accepted() {
        let proof = parse_proof(NOT_KNOW_UNAWARE_PROOF).unwrap();
        assert_eq!(proof.calculus, CalculusId::Dlr);
        assert_eq!(proof.lines.len(), 9);
        assert_eq!(
            proof.lines.last().unwrap().formula,
            Formula::parse("~K_1 U_1 p").unwrap()
        );
        assert!(check_proof(&proof).is_accepted());
    }

    #[test]
    fn prefixes_of_accepted_proofs_are_accepted() {
        let proof = parse_proof(NOT_KNOW_UNAWARE_PROOF).unwrap();
        for len in 0..=proof.lines.len() {
            let prefix = Proof {
                calculus: proof.calculus,
                lines: proof.lines[..len].to_vec(),
            };
            assert!(check_proof(&prefix).is_accepted(), "prefix of length {len}");
        }
    }

    #[test]
    fn any_index_perturbation_is_rejected() {
        let proof = parse_proof(NOT_KNOW_UNAWARE_PROOF).unwrap();
        let n = proof.lines.len();
        for target in 0..n {
            let indices: Vec<usize> = match proof.lines[target].justification {
                Justification::Mp(i, j) => vec![i, j],
                Justification::KRn(i, _) | Justification::ARe(i, _) => vec![i],
                _ => continue,
            };
            for (slot, &original) in indices.iter().enumerate() {
                for replacement in 1..=n {
                    if replacement == original {
                        continue;
                    }
                    let mut mutated = proof.clone();
                    mutated.lines[target].justification = match &proof.lines[target].justification {
                        Justification::Mp(i, j) => {
                            if slot == 0 {
                                Justification::Mp(replacement, *j)
                            } else {
                                Justification::Mp(*i, replacement)
                            }
                        }
                        Justification::KRn(_, a) => Justification::KRn(replacement, a.clone()),
                        Justification::ARe(_, a) => Justification::ARe(replacement, a.clone()),
                        other => other.clone(),
                    };
                    assert!(
                        !check_proof(&mutated).is_accepted(),
                        "perturbing line {} slot {} to {} was accepted",
                        target + 1,
                        slot,
                        replacement
                    );
                }
            }
        }
    }

    #[test]
    fn one_line_awareness_of_top() {
        let proof = parse_proof("calculus: base\n1. A_1 true ; ax A-N\n").unwrap();
        assert!(check_proof(&proof).is_accepted());
    }

    #[test]
    fn mp_on_a_non_implication_is_rejected() {
        let text = "calculus: base\n1. A_1 true ; ax A-N\n2. A_1 true ; mp 1 1\n";
        let proof = parse_proof(text).unwrap();
        match check_proof(&proof) {
            Verdict::Rejected { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("not an implication"));
            }
            Verdict::Accepted => panic!("accepted a bad MP"),
        }
    }

    #[test]
    fn dlr_axioms_are_rejected_in_the_base_calculus() {
        let text = "calculus: base\n1. U_1 p -> U_1 U_1 p ; ax AU\n";
        let proof = parse_proof(text).unwrap();
        assert!(!check_proof(&proof).is_accepted());
    }

    #[test]
    fn krn_refuses_tainted_premises_in_dlr() {
        let text = "\
calculus: dlr
1. U_1 p -> U_1 U_1 p ; ax AU
2. K_1 (U_1 p -> U_1 U_1 p) ; krn 1 1
";
        let proof = parse_proof(text).unwrap();
        match check_proof(&proof) {
            Verdict::Rejected { line, reason } => {
                assert_eq!(line, 2);
                assert!(reason.contains("base-calculus theorem"));
            }
            Verdict::Accepted => panic!("K-RN accepted a dlr-tainted premise"),
        }
        // the same step from a base theorem is fine
        let ok = "\
calculus: dlr
1. K_1 p -> p ; ax K-T
2. K_1 (K_1 p -> p) ; krn 1 1
3. p <-> ~~p ; pl
4. A_2 p <-> A_2 ~~p ; are 3 2
";
        assert!(check_proof(&parse_proof(ok).unwrap()).is_accepted());
    }

    #[test]
    fn tautology_instance_examples() {
        let t = |s: &str| is_tautology_instance(&Formula::parse(s).unwrap()).unwrap();
        assert!(t("K_1 p | ~K_1 p"));
        assert!(!t("A_1 p -> A_1 q"));
        assert!(t("(U_1 p -> false) <-> A_1 p"));
        assert!(!t("K_1 (p | ~p)"));
    }

    #[test]
    fn match_axiom_examples() {
        let f = Formula::parse("K_2 (p -> q&r) -> (K_2 p -> K_2 (q&r))").unwrap();
        let sub = match_axiom(&f, AxiomName::KK).unwrap();
        assert_eq!(sub.formulas["phi"], Formula::parse("p").unwrap());
        assert_eq!(sub.formulas["psi"], Formula::parse("q & r").unwrap());
        assert_eq!(sub.agents["i"], Agent::new("2"));

        assert!(match_axiom(
            &Formula::parse("K_1 p -> K_2 K_1 p").unwrap(),
            AxiomName::K4
        )
        .is_none());

        let f = Formula::parse("A_3 (p&q) -> A_3 ~(p&q)").unwrap();
        let sub = match_axiom(&f, AxiomName::ANeg).unwrap();
        assert_eq!(sub.formulas["phi"], Formula::parse("p & q").unwrap());
        assert_eq!(sub.agents["i"], Agent::new("3"));
    }

    #[test]
    fn substitutions_reproduce_the_matched_formula() {
        let cases = [
            ("K_2 (p -> q&r) -> (K_2 p -> K_2 (q&r))", AxiomName::KK),
            ("K_1 A_1 p -> A_1 p", AxiomName::KT),
            ("U_9 (p|q) -> U_9 U_9 (p|q)", AxiomName::Au),
            ("A_x true", AxiomName::AN),
        ];
        for (text, ax) in cases {
            let f = Formula::parse(text).unwrap();
            let sub = match_axiom(&f, ax).unwrap();
            assert_eq!(apply_substitution(&ax.template(), &sub), f);
        }
    }

    #[test]
    fn base_axioms_sound_on_random_partitional_models() {
        let agents = [Agent::new("1"), Agent::new("2")];
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..150 {
            let m: Model = random_partitional(&mut rng, 4, &agents).into();
            for ax in AxiomName::ALL.iter().filter(|a| a.in_base()) {
                for agent in &agents {
                    let f = axiom_formula(*ax, agent);
                    assert!(valid_on(&m, &f).unwrap(), "{ax} for {agent}");
                }
            }
        }
    }

    #[test]
    fn dlr_proof_lines_sound_at_distinguished_states() {
        let proof = parse_proof(NOT_KNOW_UNAWARE_PROOF).unwrap();
        let agents = [Agent::new("1")];
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..60 {
            let dlr = random_dlr_partitional(&mut rng, 4, &agents);
            let m: Model = dlr.model().clone().into();
            for line in &proof.lines {
                assert!(
                    valid_at(&m, dlr.distinguished(), &line.formula).unwrap(),
                    "{}",
                    line.formula
                );
            }
        }
    }

    #[test]
    fn base_proof_lines_sound_on_random_partitional_models() {
        let text = "\
calculus: base
1. K_1 p -> p ; ax K-T
2. K_2 (K_1 p -> p) ; krn 1 2
3. (K_1 p -> p) -> (p | ~p) ; pl
4. p | ~p ; mp 1 3
5. p <-> ~~p ; pl
6. A_1 p <-> A_1 ~~p ; are 5 1
7. K_2 (K_1 p -> p) -> (A_1 true | ~A_1 true) ; pl
8. A_1 true | ~A_1 true ; mp 2 7
";
        let proof = parse_proof(text).unwrap();
        assert!(check_proof(&proof).is_accepted());
        let agents = [Agent::new("1"), Agent::new("2")];
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for _ in 0..60 {
            let m: Model = random_partitional(&mut rng, 4, &agents).into();
            for line in &proof.lines {
                assert!(valid_on(&m, &line.formula).unwrap(), "{}", line.formula);
            }
        }
    }

    #[test]
    fn rules_preserve_validity_on_sampled_premises() {
        use crate::analysis::generate::random_formula;
        let agents = [Agent::new("1"), Agent::new("2")];
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..40 {
            let m: Model = random_partitional(&mut rng, 4, &agents).into();
            let g = random_formula(&mut rng, 3, &["p", "q"], &agents);
            // K-RN on a valid premise
            let premise = Formula::or(g.clone(), Formula::not(g.clone()));
            assert!(valid_on(&m, &premise).unwrap());
            for agent in &agents {
                let lifted = Formula::knows(agent.clone(), premise.clone());
                assert!(valid_on(&m, &lifted).unwrap());
            }
            // A-RE on a valid biconditional premise
            let equiv = Formula::iff(g.clone(), Formula::not(Formula::not(g.clone())));
            assert!(valid_on(&m, &equiv).unwrap());
            for agent in &agents {
                let lifted = Formula::iff(
                    Formula::aware(agent.clone(), g.clone()),
                    Formula::aware(agent.clone(), Formula::not(Formula::not(g.clone()))),
                );
                assert!(valid_on(&m, &lifted).unwrap());
            }
            // MP out of two valid premises
            let taut = Formula::imp(g.clone(), g.clone());
            assert!(valid_on(&m, &taut).unwrap());
        }
    }

    #[test]
    fn proof_parse_errors_carry_line_numbers() {
        assert_eq!(parse_proof("1. p ; pl\n").unwrap_err().line, 1);
        let bad = "calculus: dlr\n2. p ; pl\n";
        let err = parse_proof(bad).unwrap_err();
        assert_eq!(err.line, 2);
        assert!(err.message.contains("expected line number 1"));
        let bad = "calculus: dlr\n1. p | ~p pl\n";
        assert!(parse_proof(bad)
            .unwrap_err()
            .message
            .contains("missing `;`"));
        let bad = "calculus: dlr\n1. p | ~p ; zap\n";
        assert!(parse_proof(bad)
            .unwrap_err()
            .message
            .contains("malformed justification"));
    }
}
