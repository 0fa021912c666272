//! Finite state-space models of knowledge and (un)awareness.
//!
//! The crate provides:
//!
//! - [`formula`]: the epistemic language with knowledge, awareness,
//!   unawareness, common knowledge, and propositional quantifiers;
//! - [`statespace`]: finite state spaces and their event algebra;
//! - [`models`]: standard models (event-to-event operator tables) and
//!   partitional models (accessibility plus per-state partitions), with the
//!   built-in example models;
//! - [`semantics`]: evaluation of formulas to events, validity, and the
//!   axiom-schema registry, backed by an independent event-condition oracle;
//! - [`analysis`]: DLR reports, unawareness witnesses, awareness-extension
//!   constructions, automorphisms and coherence, and bounded countermodel
//!   search;
//! - [`calculus`]: Hilbert-style proof checking for the base and `dlr`
//!   calculi;
//! - [`decision`]: exact-rational choice scenarios, restricted beliefs, and
//!   the speculative-trade analysis.

pub mod analysis;
pub mod calculus;
pub mod decision;
pub mod formula;
pub mod models;
pub mod semantics;
pub mod statespace;

pub use formula::{Agent, Formula};
pub use models::Model;
pub use statespace::{Event, StateId, StateSpace};
