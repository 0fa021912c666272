//! Finite state spaces and their event algebra.
//!
//! An event is a subset of a state space. Events are canonicalized as
//! bitmasks ordered by state index, which makes the Boolean operations O(1)
//! and lets operator tables be indexed directly by mask.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Default cap on |Ω| for exhaustive event enumeration (2^|Ω| events).
pub const EVENT_ENUM_CAP: usize = 16;

/// Events are stored as 64-bit masks, so a space holds at most 64 states.
pub const MAX_STATES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpaceError {
    #[error("a state space must contain at least one state")]
    Empty,
    #[error("a state space holds at most {MAX_STATES} states, got {0}")]
    TooLarge(usize),
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown state label `{0}`")]
    UnknownLabel(String),
    #[error("events belong to different state spaces")]
    SpaceMismatch,
    #[error("event enumeration over {0} states exceeds the cap of {1}")]
    EnumerationCap(usize, usize),
    #[error("malformed event literal `{0}`")]
    BadEventLiteral(String),
}

#[derive(Debug)]
struct SpaceInner {
    labels: Vec<String>,
}

/// An ordered finite set of named states.
#[derive(Clone)]
pub struct StateSpace {
    inner: Arc<SpaceInner>,
}

/// Index of a state within its space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

impl StateSpace {
    pub fn new<I, S>(labels: I) -> Result<Self, SpaceError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(SpaceError::Empty);
        }
        if labels.len() > MAX_STATES {
            return Err(SpaceError::TooLarge(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(SpaceError::DuplicateLabel(l.clone()));
            }
        }
        Ok(StateSpace {
            inner: Arc::new(SpaceInner { labels }),
        })
    }

    /// A space with states labelled `1`, `2`, ..., `n`.
    pub fn numbered(n: usize) -> Result<Self, SpaceError> {
        StateSpace::new((1..=n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.inner.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction rejects empty spaces
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.inner.labels.iter().map(String::as_str)
    }

    pub fn label(&self, state: StateId) -> &str {
        &self.inner.labels[state.0]
    }

    pub fn state(&self, label: &str) -> Option<StateId> {
        self.inner
            .labels
            .iter()
            .position(|l| l == label)
            .map(StateId)
    }

    pub fn resolve(&self, label: &str) -> Result<StateId, SpaceError> {
        self.state(label)
            .ok_or_else(|| SpaceError::UnknownLabel(label.to_string()))
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> {
        (0..self.len()).map(StateId)
    }

    pub fn full_mask(&self) -> u64 {
        if self.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.len()) - 1
        }
    }

    /// Builds the event with the given membership mask.
    ///
    /// Panics if the mask has bits outside the space; masks are an internal
    /// canonical form, so stray bits are a programming error.
    pub fn event(&self, mask: u64) -> Event {
        assert_eq!(
            mask & !self.full_mask(),
            0,
            "event mask has bits outside the state space"
        );
        Event {
            space: self.clone(),
            mask,
        }
    }

    pub fn empty_event(&self) -> Event {
        self.event(0)
    }

    pub fn full_event(&self) -> Event {
        self.event(self.full_mask())
    }

    pub fn singleton(&self, state: StateId) -> Event {
        self.event(1u64 << state.0)
    }

    pub fn event_from_labels<'a, I>(&self, labels: I) -> Result<Event, SpaceError>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut mask = 0u64;
        for l in labels {
            mask |= 1u64 << self.resolve(l)?.0;
        }
        Ok(self.event(mask))
    }

    /// Parses an event literal of the form `{a b c}` (possibly empty: `{}`).
    pub fn parse_event(&self, text: &str) -> Result<Event, SpaceError> {
        let t = text.trim();
        let inner = t
            .strip_prefix('{')
            .and_then(|s| s.strip_suffix('}'))
            .ok_or_else(|| SpaceError::BadEventLiteral(text.to_string()))?;
        self.event_from_labels(inner.split_whitespace())
    }
}

impl PartialEq for StateSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.labels == other.inner.labels
    }
}

impl Eq for StateSpace {}

impl fmt::Debug for StateSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "StateSpace({:?})", self.inner.labels)
    }
}

/// A subset of a state space. Equality is extensional.
#[derive(Clone, PartialEq, Eq)]
pub struct Event {
    space: StateSpace,
    mask: u64,
}

impl Event {
    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn complement(&self) -> Event {
        self.space.event(!self.mask & self.space.full_mask())
    }

    pub fn intersect(&self, other: &Event) -> Result<Event, SpaceError> {
        self.check_space(other)?;
        Ok(self.space.event(self.mask & other.mask))
    }

    pub fn union(&self, other: &Event) -> Result<Event, SpaceError> {
        self.check_space(other)?;
        Ok(self.space.event(self.mask | other.mask))
    }

    pub fn is_subset_of(&self, other: &Event) -> Result<bool, SpaceError> {
        self.check_space(other)?;
        Ok(self.mask & !other.mask == 0)
    }

    pub fn contains(&self, state: StateId) -> bool {
        self.mask >> state.0 & 1 == 1
    }

    pub fn card(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn is_full(&self) -> bool {
        self.mask == self.space.full_mask()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.space.states().filter(|s| self.contains(*s))
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.states().map(|s| self.space.label(s))
    }

    fn check_space(&self, other: &Event) -> Result<(), SpaceError> {
        if self.space == other.space {
            Ok(())
        } else {
            Err(SpaceError::SpaceMismatch)
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for l in self.labels() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Event({self})")
    }
}

/// Binary set operation selector for [`combine`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SetOp {
    Intersect,
    Union,
}

pub fn combine(op: SetOp, e1: &Event, e2: &Event) -> Result<Event, SpaceError> {
    match op {
        SetOp::Intersect => e1.intersect(e2),
        SetOp::Union => e1.union(e2),
    }
}

/// All `2^|Ω|` events of the space in canonical (mask-ascending) order.
pub fn enumerate_events(space: &StateSpace) -> Result<Vec<Event>, SpaceError> {
    enumerate_events_with_cap(space, EVENT_ENUM_CAP)
}

pub fn enumerate_events_with_cap(space: &StateSpace, cap: usize) -> Result<Vec<Event>, SpaceError> {
    if space.len() > cap {
        return Err(SpaceError::EnumerationCap(space.len(), cap));
    }
    Ok((0..1u64 << space.len()).map(|m| space.event(m)).collect())
}
