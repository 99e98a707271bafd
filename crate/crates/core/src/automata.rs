//! Core automaton types: composite states, namespaced events, projectors and
//! the ε₀-NFA itself.
//!
//! An [`Epsilon0Nfa`] is an almost-deterministic automaton whose only
//! nondeterminism is the ε fan-out from a virtual initial state to every
//! state. That fan-out is never stored: [`delta`] simply picks one of the
//! states as the concrete initial state and yields a [`Dfa`].
//!
//! Every event owns a *footprint*: the tuple slot named by its namespace when
//! such a slot exists, otherwise all slots. All transitions labelled by one
//! event share a single source/target pair on that footprint and leave the
//! other slots untouched. For single-slot automata this is exactly "one
//! source and one target per event"; concatenation replicates an agent's
//! event across the other agents' states without breaking it.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Atomic state label, e.g. `"A"` or `"R1"`.
pub type Label = Arc<str>;

/// Separator used when a composite state is rendered as a single string.
pub const STATE_SEPARATOR: char = '|';

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AutomatonError {
    #[error("invalid state label {0:?}: labels must be non-empty and may not contain '|'")]
    InvalidLabel(String),
    #[error("invalid slot list: {0}")]
    InvalidSlots(String),
    #[error("invalid event {0}: {1}")]
    InvalidEvent(EventId, &'static str),
    #[error("transition ({source_state}, {event}) -> {target} references unknown state {missing}")]
    DanglingEndpoint {
        source_state: CompositeState,
        event: EventId,
        target: CompositeState,
        missing: CompositeState,
    },
    #[error("event {0} has no cost")]
    MissingCost(EventId),
    #[error("event {event} has cost {cost}; costs must be finite and strictly positive")]
    NonPositiveCost { event: EventId, cost: f64 },
    #[error("event {0} is not part of the automaton's event set")]
    UnknownEvent(EventId),
    #[error("event {event} is used with more than one endpoint pair ({first} vs {second})")]
    DuplicateEventEndpoints {
        event: EventId,
        first: String,
        second: String,
    },
    #[error("event {event} changes slots outside its footprint in ({source_state}) -> ({target})")]
    NonLocalTransition {
        event: EventId,
        source_state: CompositeState,
        target: CompositeState,
    },
    #[error("unknown state {0}")]
    UnknownState(CompositeState),
    #[error("no transition labelled {event} ends in {state}")]
    NoSuchTransition { state: CompositeState, event: EventId },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("arity mismatch: {left} vs {right}")]
    ArityMismatch { left: usize, right: usize },
    #[error("slot mismatch: {left:?} vs {right:?}")]
    SlotMismatch { left: Vec<String>, right: Vec<String> },
    #[error("automata are not compatible: {0}")]
    Incompatible(CompatibilityReport),
    #[error("shared event {event} carries different costs ({left} vs {right})")]
    CostConflict { event: EventId, left: f64, right: f64 },
    #[error("event {0} appears in both concatenation operands")]
    EventCollision(EventId),
    #[error("slot {0} appears in both concatenation operands")]
    SlotCollision(String),
    #[error("event {0} is not local to one slot of its operand and cannot be concatenated")]
    NonLocalEvent(EventId),
}

pub type Result<T, E = AutomatonError> = std::result::Result<T, E>;

pub fn validate_label(label: &str) -> Result<()> {
    if label.is_empty() || label.contains(STATE_SEPARATOR) {
        return Err(AutomatonError::InvalidLabel(label.to_string()));
    }
    Ok(())
}

/// Ordered tuple of atomic labels, one per agent slot.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompositeState(Arc<[Label]>);

impl CompositeState {
    pub fn new<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        CompositeState(labels.into_iter().map(|s| Label::from(s.as_ref())).collect())
    }

    pub fn from_labels(labels: Vec<Label>) -> Self {
        CompositeState(labels.into())
    }

    /// Single-slot state.
    pub fn atomic(label: &str) -> Self {
        CompositeState::new([label])
    }

    /// Parses the `a|b|c` display form.
    pub fn parse(text: &str) -> Self {
        CompositeState::new(text.split(STATE_SEPARATOR))
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Label] {
        &self.0
    }

    pub fn component(&self, slot: usize) -> &str {
        &self.0[slot]
    }

    /// The concatenated state `uv`.
    pub fn concat(&self, other: &CompositeState) -> CompositeState {
        CompositeState(self.0.iter().chain(other.0.iter()).cloned().collect())
    }

    pub fn with_component(&self, slot: usize, label: Label) -> CompositeState {
        let mut labels = self.0.to_vec();
        labels[slot] = label;
        CompositeState(labels.into())
    }

    pub fn validate(&self) -> Result<()> {
        self.0.iter().try_for_each(|l| validate_label(l))
    }
}

impl fmt::Display for CompositeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, label) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "{STATE_SEPARATOR}")?;
            }
            f.write_str(label)?;
        }
        Ok(())
    }
}

impl fmt::Debug for CompositeState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl Serialize for CompositeState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter().map(|l| &**l))
    }
}

impl<'de> Deserialize<'de> for CompositeState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let labels = Vec::<String>::deserialize(deserializer)?;
        Ok(CompositeState::new(labels))
    }
}

/// Event identifier, namespaced by agent id, `inter` or `virtual`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId {
    namespace: Arc<str>,
    name: Arc<str>,
}

impl EventId {
    pub const INTER: &'static str = "inter";
    pub const VIRTUAL: &'static str = "virtual";

    pub fn new(namespace: &str, name: &str) -> Self {
        EventId {
            namespace: namespace.into(),
            name: name.into(),
        }
    }

    pub fn inter(name: &str) -> Self {
        EventId::new(Self::INTER, name)
    }

    /// The task-module event e₀. Never part of an automaton.
    pub fn task_event() -> Self {
        EventId::new(Self::VIRTUAL, "e0")
    }

    pub fn namespace(&self) -> &str {
        &self.namespace
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_virtual(&self) -> bool {
        &*self.namespace == Self::VIRTUAL
    }

    /// Parses `namespace.name`; the name may itself contain dots.
    pub fn parse(text: &str) -> Option<Self> {
        let (ns, name) = text.split_once('.')?;
        if ns.is_empty() || name.is_empty() {
            return None;
        }
        Some(EventId::new(ns, name))
    }
}

impl fmt::Display for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.namespace, self.name)
    }
}

impl fmt::Debug for EventId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for EventId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EventId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        EventId::parse(&text).ok_or_else(|| serde::de::Error::custom(format!("malformed event id {text:?}")))
    }
}

/// Bit mask selecting tuple slots.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Projector {
    bits: Vec<bool>,
}

impl Projector {
    pub fn new(bits: Vec<bool>) -> Self {
        Projector { bits }
    }

    pub fn ones(len: usize) -> Self {
        Projector { bits: vec![true; len] }
    }

    pub fn single(len: usize, slot: usize) -> Self {
        let mut bits = vec![false; len];
        bits[slot] = true;
        Projector { bits }
    }

    /// Parses a `0`/`1` string such as `"0001"`.
    pub fn parse(text: &str) -> Option<Self> {
        text.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .filter(|bits| !bits.is_empty())
            .map(Projector::new)
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn is_set(&self, slot: usize) -> bool {
        self.bits[slot]
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|b| **b).count()
    }

    /// Bitwise negation b̄.
    pub fn complement(&self) -> Self {
        Projector {
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    pub fn set_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter().enumerate().filter_map(|(i, b)| b.then_some(i))
    }
}

impl fmt::Display for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            f.write_str(if *b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Projector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Projector({self})")
    }
}

/// `proj(x, b)`: the components of `x` at set bits, in slot order.
pub fn proj(x: &CompositeState, b: &Projector) -> Result<Vec<Label>> {
    if x.arity() != b.len() {
        return Err(AutomatonError::LengthMismatch {
            expected: b.len(),
            found: x.arity(),
        });
    }
    Ok(b.set_slots().map(|i| x.0[i].clone()).collect())
}

/// Endpoints of one event restricted to its footprint slots.
#[derive(Debug, Clone, PartialEq)]
pub struct Endpoints {
    pub slots: Vec<usize>,
    pub source: Vec<Label>,
    pub target: Vec<Label>,
}

impl Endpoints {
    fn of(slots: Vec<usize>, x: &CompositeState, y: &CompositeState) -> Self {
        let source = slots.iter().map(|&i| x.0[i].clone()).collect();
        let target = slots.iter().map(|&i| y.0[i].clone()).collect();
        Endpoints { slots, source, target }
    }

    fn matches(&self, x: &CompositeState, y: &CompositeState) -> bool {
        self.slots
            .iter()
            .enumerate()
            .all(|(k, &i)| x.0[i] == self.source[k] && y.0[i] == self.target[k])
    }

    fn describe(&self) -> String {
        format!("{} -> {}", self.source.join("|"), self.target.join("|"))
    }
}

/// Endpoint pair of one event, keyed by slot names so automata with
/// different slot layouts can be compared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointView {
    pub slots: Vec<String>,
    pub source: Vec<String>,
    pub target: Vec<String>,
}

impl fmt::Display for EndpointView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {} -> {}",
            self.slots.join(","),
            self.source.join("|"),
            self.target.join("|")
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventConflict {
    pub event: EventId,
    pub left: EndpointView,
    pub right: EndpointView,
}

/// Result of [`check_compatible`]; empty means compatible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CompatibilityReport {
    pub conflicts: Vec<EventConflict>,
}

impl CompatibilityReport {
    pub fn is_compatible(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn events(&self) -> impl Iterator<Item = &EventId> {
        self.conflicts.iter().map(|c| &c.event)
    }
}

impl fmt::Display for CompatibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.conflicts.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{}: {} vs {}", c.event, c.left, c.right)?;
        }
        Ok(())
    }
}

pub(crate) type TransitionMap = BTreeMap<CompositeState, BTreeMap<EventId, CompositeState>>;

/// Raw inputs of [`make_nfa`].
#[derive(Debug, Clone, Default)]
pub struct NfaParts {
    pub slots: Vec<String>,
    pub states: BTreeSet<CompositeState>,
    pub events: BTreeSet<EventId>,
    pub transitions: Vec<(CompositeState, EventId, CompositeState)>,
    pub marked: BTreeSet<CompositeState>,
    pub costs: BTreeMap<EventId, f64>,
}

/// ε₀-NFA with an implicit virtual initial state.
#[derive(Clone)]
pub struct Epsilon0Nfa {
    slots: Vec<String>,
    states: BTreeSet<CompositeState>,
    costs: BTreeMap<EventId, f64>,
    transitions: TransitionMap,
    marked: BTreeSet<CompositeState>,
    endpoints: BTreeMap<EventId, Endpoints>,
    transition_count: usize,
}

impl PartialEq for Epsilon0Nfa {
    fn eq(&self, other: &Self) -> bool {
        self.slots == other.slots
            && self.states == other.states
            && self.costs == other.costs
            && self.transitions == other.transitions
            && self.marked == other.marked
    }
}

impl fmt::Debug for Epsilon0Nfa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Epsilon0Nfa")
            .field("slots", &self.slots)
            .field("states", &self.states.len())
            .field("events", &self.costs.len())
            .field("transitions", &self.transition_count)
            .field("marked", &self.marked.len())
            .finish()
    }
}

/// Validates raw parts into an ε₀-NFA.
pub fn make_nfa(parts: NfaParts) -> Result<Epsilon0Nfa> {
    let NfaParts {
        slots,
        states,
        events,
        transitions,
        marked,
        costs,
    } = parts;

    for e in &events {
        if !costs.contains_key(e) {
            return Err(AutomatonError::MissingCost(e.clone()));
        }
    }
    if let Some(e) = costs.keys().find(|e| !events.contains(*e)) {
        return Err(AutomatonError::UnknownEvent(e.clone()));
    }

    let mut map = TransitionMap::new();
    for (x, e, y) in transitions {
        let row = map.entry(x.clone()).or_default();
        if let Some(prev) = row.get(&e) {
            if *prev != y {
                return Err(AutomatonError::DuplicateEventEndpoints {
                    event: e,
                    first: format!("{x} -> {prev}"),
                    second: format!("{x} -> {y}"),
                });
            }
            continue;
        }
        row.insert(e, y);
    }

    Epsilon0Nfa::assemble(slots, states, costs, map, marked)
}

impl Epsilon0Nfa {
    /// The automaton with no states and no events.
    pub fn empty(slots: Vec<String>) -> Self {
        Epsilon0Nfa {
            slots,
            states: BTreeSet::new(),
            costs: BTreeMap::new(),
            transitions: TransitionMap::new(),
            marked: BTreeSet::new(),
            endpoints: BTreeMap::new(),
            transition_count: 0,
        }
    }

    /// Checks every structural invariant and derives the per-event endpoints.
    pub(crate) fn assemble(
        slots: Vec<String>,
        states: BTreeSet<CompositeState>,
        costs: BTreeMap<EventId, f64>,
        mut transitions: TransitionMap,
        marked: BTreeSet<CompositeState>,
    ) -> Result<Self> {
        if slots.is_empty() {
            return Err(AutomatonError::InvalidSlots("at least one slot is required".into()));
        }
        let mut seen = BTreeSet::new();
        for s in &slots {
            if s.is_empty() || !seen.insert(s.as_str()) {
                return Err(AutomatonError::InvalidSlots(format!(
                    "slot names must be non-empty and unique, got {slots:?}"
                )));
            }
        }
        let arity = slots.len();
        for x in &states {
            if x.arity() != arity {
                return Err(AutomatonError::LengthMismatch {
                    expected: arity,
                    found: x.arity(),
                });
            }
            x.validate()?;
        }
        for (e, &c) in &costs {
            if e.is_virtual() {
                return Err(AutomatonError::InvalidEvent(
                    e.clone(),
                    "virtual events cannot belong to an automaton",
                ));
            }
            if !(c.is_finite() && c > 0.0) {
                return Err(AutomatonError::NonPositiveCost {
                    event: e.clone(),
                    cost: c,
                });
            }
        }
        if let Some(x) = marked.iter().find(|x| !states.contains(*x)) {
            return Err(AutomatonError::UnknownState(x.clone()));
        }

        transitions.retain(|_, row| !row.is_empty());
        let mut endpoints: BTreeMap<EventId, Endpoints> = BTreeMap::new();
        let mut transition_count = 0;
        for (x, row) in &transitions {
            for (e, y) in row {
                transition_count += 1;
                for end in [x, y] {
                    if !states.contains(end) {
                        return Err(AutomatonError::DanglingEndpoint {
                            source_state: x.clone(),
                            event: e.clone(),
                            target: y.clone(),
                            missing: end.clone(),
                        });
                    }
                }
                if !costs.contains_key(e) {
                    return Err(AutomatonError::UnknownEvent(e.clone()));
                }
                let footprint = footprint(&slots, e);
                if footprint.len() < arity && (0..arity).any(|i| !footprint.contains(&i) && x.0[i] != y.0[i]) {
                    return Err(AutomatonError::NonLocalTransition {
                        event: e.clone(),
                        source_state: x.clone(),
                        target: y.clone(),
                    });
                }
                match endpoints.get(e) {
                    Some(ep) if !ep.matches(x, y) => {
                        let other = Endpoints::of(footprint, x, y);
                        return Err(AutomatonError::DuplicateEventEndpoints {
                            event: e.clone(),
                            first: ep.describe(),
                            second: other.describe(),
                        });
                    }
                    Some(_) => {}
                    None => {
                        endpoints.insert(e.clone(), Endpoints::of(footprint, x, y));
                    }
                }
            }
        }

        Ok(Epsilon0Nfa {
            slots,
            states,
            costs,
            transitions,
            marked,
            endpoints,
            transition_count,
        })
    }

    pub fn slots(&self) -> &[String] {
        &self.slots
    }

    pub fn arity(&self) -> usize {
        self.slots.len()
    }

    pub fn slot_index(&self, name: &str) -> Option<usize> {
        self.slots.iter().position(|s| s == name)
    }

    pub fn states(&self) -> &BTreeSet<CompositeState> {
        &self.states
    }

    pub fn contains_state(&self, x: &CompositeState) -> bool {
        self.states.contains(x)
    }

    pub fn events(&self) -> impl Iterator<Item = &EventId> + '_ {
        self.costs.keys()
    }

    pub fn event_set(&self) -> BTreeSet<EventId> {
        self.costs.keys().cloned().collect()
    }

    pub fn has_event(&self, e: &EventId) -> bool {
        self.costs.contains_key(e)
    }

    pub fn costs(&self) -> &BTreeMap<EventId, f64> {
        &self.costs
    }

    pub fn cost(&self, e: &EventId) -> Option<f64> {
        self.costs.get(e).copied()
    }

    pub fn marked(&self) -> &BTreeSet<CompositeState> {
        &self.marked
    }

    pub fn is_marked(&self, x: &CompositeState) -> bool {
        self.marked.contains(x)
    }

    pub fn transition_count(&self) -> usize {
        self.transition_count
    }

    /// All transitions `(x, e, y)` in state, then event order.
    pub fn transitions(&self) -> impl Iterator<Item = (&CompositeState, &EventId, &CompositeState)> {
        self.transitions
            .iter()
            .flat_map(|(x, row)| row.iter().map(move |(e, y)| (x, e, y)))
    }

    /// Outgoing transitions of `x` (empty if `x` has none or is unknown).
    pub fn outgoing(&self, x: &CompositeState) -> impl Iterator<Item = (&EventId, &CompositeState)> {
        self.transitions.get(x).into_iter().flat_map(|row| row.iter())
    }

    pub fn target(&self, x: &CompositeState, e: &EventId) -> Option<&CompositeState> {
        self.transitions.get(x).and_then(|row| row.get(e))
    }

    /// Footprint endpoints of `e`, if it labels at least one transition.
    pub fn endpoints(&self, e: &EventId) -> Option<&Endpoints> {
        self.endpoints.get(e)
    }

    pub fn endpoint_view(&self, e: &EventId) -> Option<EndpointView> {
        self.endpoints.get(e).map(|ep| EndpointView {
            slots: ep.slots.iter().map(|&i| self.slots[i].clone()).collect(),
            source: ep.source.iter().map(|l| l.to_string()).collect(),
            target: ep.target.iter().map(|l| l.to_string()).collect(),
        })
    }

    /// Γ(x): events enabled at `x`.
    pub fn active_events(&self, x: &CompositeState) -> Result<BTreeSet<EventId>> {
        if !self.states.contains(x) {
            return Err(AutomatonError::UnknownState(x.clone()));
        }
        Ok(self
            .transitions
            .get(x)
            .map(|row| row.keys().cloned().collect())
            .unwrap_or_default())
    }

    /// f⁻¹(y, e): the unique source of the `e`-transition ending in `y`.
    pub fn inverse_transition(&self, y: &CompositeState, e: &EventId) -> Result<CompositeState> {
        let missing = || AutomatonError::NoSuchTransition {
            state: y.clone(),
            event: e.clone(),
        };
        let ep = self.endpoints.get(e).ok_or_else(missing)?;
        if y.arity() != self.arity() {
            return Err(missing());
        }
        if ep.slots.iter().enumerate().any(|(k, &i)| y.0[i] != ep.target[k]) {
            return Err(missing());
        }
        let mut labels = y.0.to_vec();
        for (k, &i) in ep.slots.iter().enumerate() {
            labels[i] = ep.source[k].clone();
        }
        let x = CompositeState::from_labels(labels);
        match self.target(&x, e) {
            Some(t) if t == y => Ok(x),
            _ => Err(missing()),
        }
    }

    /// Copy of this automaton without the transitions matching `drop`.
    /// States, events, costs and markings are kept. Returns the number of
    /// transitions removed.
    pub fn without_transitions<F>(&self, mut drop: F) -> (Epsilon0Nfa, usize)
    where
        F: FnMut(&CompositeState, &EventId, &CompositeState) -> bool,
    {
        let mut removed = 0;
        let mut transitions = self.transitions.clone();
        for (x, row) in transitions.iter_mut() {
            row.retain(|e, y| {
                let hit = drop(x, e, y);
                removed += usize::from(hit);
                !hit
            });
        }
        transitions.retain(|_, row| !row.is_empty());
        let mut endpoints = self.endpoints.clone();
        endpoints.retain(|e, _| transitions.values().any(|row| row.contains_key(e)));
        let nfa = Epsilon0Nfa {
            slots: self.slots.clone(),
            states: self.states.clone(),
            costs: self.costs.clone(),
            transitions,
            marked: self.marked.clone(),
            endpoints,
            transition_count: self.transition_count - removed,
        };
        (nfa, removed)
    }

    pub(crate) fn raw_transitions(&self) -> &TransitionMap {
        &self.transitions
    }
}

fn footprint(slots: &[String], e: &EventId) -> Vec<usize> {
    match slots.iter().position(|s| s == e.namespace()) {
        Some(i) => vec![i],
        None => (0..slots.len()).collect(),
    }
}

/// Deterministic automaton: an ε₀-NFA with a concrete initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Dfa {
    nfa: Epsilon0Nfa,
    initial: CompositeState,
}

impl Dfa {
    pub fn initial(&self) -> &CompositeState {
        &self.initial
    }

    pub fn into_nfa(self) -> Epsilon0Nfa {
        self.nfa
    }
}

impl Deref for Dfa {
    type Target = Epsilon0Nfa;

    fn deref(&self) -> &Epsilon0Nfa {
        &self.nfa
    }
}

/// Δ: drops the virtual initial state and designates `x0` instead.
pub fn delta(nfa: &Epsilon0Nfa, x0: &CompositeState) -> Result<Dfa> {
    if !nfa.contains_state(x0) {
        return Err(AutomatonError::UnknownState(x0.clone()));
    }
    Ok(Dfa {
        nfa: nfa.clone(),
        initial: x0.clone(),
    })
}

/// Lists every shared event whose endpoints differ between `a` and `b`.
pub fn check_compatible(a: &Epsilon0Nfa, b: &Epsilon0Nfa) -> CompatibilityReport {
    let mut conflicts = Vec::new();
    for e in a.events().filter(|e| b.has_event(e)) {
        if let (Some(left), Some(right)) = (a.endpoint_view(e), b.endpoint_view(e)) {
            if left != right {
                conflicts.push(EventConflict {
                    event: e.clone(),
                    left,
                    right,
                });
            }
        }
    }
    CompatibilityReport { conflicts }
}

/// Convenience builder for single-slot and small automata.
#[derive(Debug, Clone)]
pub struct NfaBuilder {
    parts: NfaParts,
    marked_explicit: bool,
}

impl NfaBuilder {
    pub fn new<S: Into<String>>(slots: impl IntoIterator<Item = S>) -> Self {
        NfaBuilder {
            parts: NfaParts {
                slots: slots.into_iter().map(Into::into).collect(),
                ..NfaParts::default()
            },
            marked_explicit: false,
        }
    }

    pub fn state(mut self, x: CompositeState) -> Self {
        self.parts.states.insert(x);
        self
    }

    pub fn states(mut self, xs: impl IntoIterator<Item = CompositeState>) -> Self {
        self.parts.states.extend(xs);
        self
    }

    /// Adds a transition, its endpoints and its event with the given cost.
    pub fn transition(mut self, x: CompositeState, e: EventId, y: CompositeState, cost: f64) -> Self {
        self.parts.states.insert(x.clone());
        self.parts.states.insert(y.clone());
        self.parts.events.insert(e.clone());
        self.parts.costs.insert(e.clone(), cost);
        self.parts.transitions.push((x, e, y));
        self
    }

    /// Marks `x`; once called, only explicitly marked states are marked.
    pub fn mark(mut self, x: CompositeState) -> Self {
        self.marked_explicit = true;
        self.parts.marked.insert(x);
        self
    }

    pub fn unmarked(mut self) -> Self {
        self.marked_explicit = true;
        self.parts.marked.clear();
        self
    }

    pub fn build(mut self) -> Result<Epsilon0Nfa> {
        if !self.marked_explicit {
            self.parts.marked = self.parts.states.clone();
        }
        make_nfa(self.parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(label: &str) -> CompositeState {
        CompositeState::atomic(label)
    }

    fn two_state_parts() -> NfaParts {
        let e1 = EventId::new("R1", "e1");
        NfaParts {
            slots: vec!["R1".into()],
            states: [s("A"), s("B")].into(),
            events: [e1.clone()].into(),
            transitions: vec![(s("A"), e1.clone(), s("B"))],
            marked: [s("A"), s("B")].into(),
            costs: [(e1, 10.0)].into(),
        }
    }

    #[test]
    fn make_nfa_accepts_minimal_machine() {
        let nfa = make_nfa(two_state_parts()).unwrap();
        assert_eq!(nfa.states().len(), 2);
        assert_eq!(nfa.transition_count(), 1);
    }

    #[test]
    fn make_nfa_rejects_zero_cost() {
        let mut parts = two_state_parts();
        parts.costs.insert(EventId::new("R1", "e1"), 0.0);
        assert!(matches!(make_nfa(parts), Err(AutomatonError::NonPositiveCost { .. })));
    }

    #[test]
    fn make_nfa_rejects_reused_event() {
        let mut parts = two_state_parts();
        parts.transitions.push((s("B"), EventId::new("R1", "e1"), s("A")));
        assert!(matches!(
            make_nfa(parts),
            Err(AutomatonError::DuplicateEventEndpoints { .. })
        ));
    }

    #[test]
    fn make_nfa_rejects_missing_cost_and_dangling() {
        let mut parts = two_state_parts();
        parts.costs.clear();
        assert!(matches!(make_nfa(parts), Err(AutomatonError::MissingCost(_))));

        let mut parts = two_state_parts();
        parts.states.remove(&s("B"));
        parts.marked.remove(&s("B"));
        assert!(matches!(make_nfa(parts), Err(AutomatonError::DanglingEndpoint { .. })));
    }

    #[test]
    fn labels_may_not_contain_separator() {
        let mut parts = two_state_parts();
        parts.states.insert(s("A|B"));
        assert!(matches!(make_nfa(parts), Err(AutomatonError::InvalidLabel(_))));
    }

    #[test]
    fn delta_assigns_initial() {
        let nfa = make_nfa(two_state_parts()).unwrap();
        let dfa = delta(&nfa, &s("A")).unwrap();
        assert_eq!(dfa.initial(), &s("A"));
        assert_eq!(*dfa, nfa);
        assert_eq!(delta(&nfa, &s("B")).unwrap().initial(), &s("B"));
        assert!(matches!(delta(&nfa, &s("Z")), Err(AutomatonError::UnknownState(_))));
    }

    #[test]
    fn projection_examples() {
        let x = CompositeState::new(["E", "Ψ", "Γ", "A"]);
        let b = Projector::parse("0001").unwrap();
        assert_eq!(proj(&x, &b).unwrap(), vec![Label::from("A")]);
        assert_eq!(proj(&x, &Projector::ones(4)).unwrap(), x.components().to_vec());

        let xd = CompositeState::new(["S1", "S2", "S3", "J", "C", "W", "D1", "D2", "H"]);
        let b = Projector::parse("000111000").unwrap();
        let got: Vec<String> = proj(&xd, &b).unwrap().iter().map(|l| l.to_string()).collect();
        assert_eq!(got, ["J", "C", "W"]);

        assert!(matches!(
            proj(&x, &Projector::parse("01").unwrap()),
            Err(AutomatonError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn inverse_and_active_events() {
        let nfa = make_nfa(two_state_parts()).unwrap();
        let e1 = EventId::new("R1", "e1");
        assert_eq!(nfa.inverse_transition(&s("B"), &e1).unwrap(), s("A"));
        assert!(matches!(
            nfa.inverse_transition(&s("A"), &e1),
            Err(AutomatonError::NoSuchTransition { .. })
        ));
        assert_eq!(nfa.active_events(&s("A")).unwrap(), [e1].into());
        assert!(nfa.active_events(&s("B")).unwrap().is_empty());
        assert!(nfa.active_events(&s("Q")).is_err());
    }

    #[test]
    fn compatibility_reports_conflicting_endpoints() {
        let e = EventId::new("R1", "e");
        let a = NfaBuilder::new(["R1"])
            .transition(s("A"), e.clone(), s("B"), 1.0)
            .build()
            .unwrap();
        let b = NfaBuilder::new(["R1"])
            .transition(s("A"), e.clone(), s("B"), 1.0)
            .build()
            .unwrap();
        let c = NfaBuilder::new(["R1"])
            .transition(s("A"), e.clone(), s("C"), 1.0)
            .build()
            .unwrap();
        let d = NfaBuilder::new(["R1"])
            .transition(s("A"), EventId::new("R1", "f"), s("C"), 1.0)
            .build()
            .unwrap();
        assert!(check_compatible(&a, &b).is_compatible());
        assert!(check_compatible(&a, &d).is_compatible());
        let report = check_compatible(&a, &c);
        assert_eq!(report.events().collect::<Vec<_>>(), vec![&e]);
        assert!(!check_compatible(&c, &a).is_compatible());
    }

    #[test]
    fn event_id_parse_keeps_dotted_names() {
        let e = EventId::parse("R1.navigate.E.A").unwrap();
        assert_eq!(e.namespace(), "R1");
        assert_eq!(e.name(), "navigate.E.A");
        assert_eq!(e.to_string(), "R1.navigate.E.A");
        assert!(EventId::parse("nodot").is_none());
    }

    #[test]
    fn projector_parse_and_complement() {
        let b = Projector::parse("0101").unwrap();
        assert_eq!(b.complement().to_string(), "1010");
        assert_eq!(b.count_ones(), 2);
        assert!(Projector::parse("01x").is_none());
        assert!(Projector::parse("").is_none());
    }
}
