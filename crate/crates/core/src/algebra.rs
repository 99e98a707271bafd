//! Union, subtraction and concatenation of compatible ε₀-NFAs.
//!
//! Unlike the textbook product constructions, union merges state sets,
//! subtraction removes events but keeps every state, and concatenation
//! interleaves its operands: exactly one operand moves per transition.

use std::collections::{BTreeMap, BTreeSet};

use crate::automata::{check_compatible, AutomatonError, CompositeState, Epsilon0Nfa, Result, TransitionMap};

fn require_same_slots(a: &Epsilon0Nfa, b: &Epsilon0Nfa) -> Result<()> {
    if a.arity() != b.arity() {
        return Err(AutomatonError::ArityMismatch {
            left: a.arity(),
            right: b.arity(),
        });
    }
    if a.slots() != b.slots() {
        return Err(AutomatonError::SlotMismatch {
            left: a.slots().to_vec(),
            right: b.slots().to_vec(),
        });
    }
    Ok(())
}

fn require_compatible(a: &Epsilon0Nfa, b: &Epsilon0Nfa) -> Result<()> {
    let report = check_compatible(a, b);
    if report.is_compatible() {
        Ok(())
    } else {
        Err(AutomatonError::Incompatible(report))
    }
}

/// Compatible union: states, events, transitions and markings are merged.
pub fn union_compat(a: &Epsilon0Nfa, b: &Epsilon0Nfa) -> Result<Epsilon0Nfa> {
    require_same_slots(a, b)?;
    require_compatible(a, b)?;

    let mut costs = a.costs().clone();
    for (e, &c) in b.costs() {
        match costs.get(e) {
            Some(&prev) if prev != c => {
                return Err(AutomatonError::CostConflict {
                    event: e.clone(),
                    left: prev,
                    right: c,
                });
            }
            Some(_) => {}
            None => {
                costs.insert(e.clone(), c);
            }
        }
    }

    let states = a.states().union(b.states()).cloned().collect();
    let marked = a.marked().union(b.marked()).cloned().collect();
    let mut transitions = a.raw_transitions().clone();
    for (x, row) in b.raw_transitions() {
        let merged = transitions.entry(x.clone()).or_default();
        for (e, y) in row {
            merged.entry(e.clone()).or_insert_with(|| y.clone());
        }
    }
    Epsilon0Nfa::assemble(a.slots().to_vec(), states, costs, transitions, marked)
}

/// Compatible subtraction `a \ b`: keeps every state of `a`, drops the
/// events of `b` and unmarks the marked states of `b`.
pub fn subtract_compat(a: &Epsilon0Nfa, b: &Epsilon0Nfa) -> Result<Epsilon0Nfa> {
    require_same_slots(a, b)?;
    require_compatible(a, b)?;

    let costs: BTreeMap<_, _> = a
        .costs()
        .iter()
        .filter(|(e, _)| !b.has_event(e))
        .map(|(e, c)| (e.clone(), *c))
        .collect();
    let transitions: TransitionMap = a
        .raw_transitions()
        .iter()
        .map(|(x, row)| {
            let kept = row
                .iter()
                .filter(|(e, _)| costs.contains_key(*e))
                .map(|(e, y)| (e.clone(), y.clone()))
                .collect::<BTreeMap<_, _>>();
            (x.clone(), kept)
        })
        .collect();
    let marked = a.marked().difference(b.marked()).cloned().collect();
    Epsilon0Nfa::assemble(a.slots().to_vec(), a.states().clone(), costs, transitions, marked)
}

/// Compatible concatenation `a ⊥⊥ b` with interleaving semantics.
///
/// Operands must have disjoint slots and disjoint events, and each event must
/// be local to one slot of its operand.
pub fn concat_compat(a: &Epsilon0Nfa, b: &Epsilon0Nfa) -> Result<Epsilon0Nfa> {
    if let Some(s) = a.slots().iter().find(|s| b.slots().contains(s)) {
        return Err(AutomatonError::SlotCollision(s.clone()));
    }
    if let Some(e) = a.events().find(|e| b.has_event(e)) {
        return Err(AutomatonError::EventCollision(e.clone()));
    }
    for (operand, e) in a.events().map(|e| (a, e)).chain(b.events().map(|e| (b, e))) {
        if operand.arity() > 1 && operand.slot_index(e.namespace()).is_none() {
            return Err(AutomatonError::NonLocalEvent(e.clone()));
        }
    }

    let left: Vec<&CompositeState> = a.states().iter().collect();
    let right: Vec<&CompositeState> = b.states().iter().collect();
    // Row-major product; lexicographic order of the tuples matches (u, v) order.
    let grid: Vec<CompositeState> = left
        .iter()
        .flat_map(|u| right.iter().map(move |v| u.concat(v)))
        .collect();
    let width = right.len();
    let cell = |i: usize, j: usize| &grid[i * width + j];
    let index =
        |set: &[&CompositeState], x: &CompositeState| set.binary_search(&x).expect("transition endpoint is a state");

    let mut transitions = TransitionMap::new();
    for (u, e, u2) in a.transitions() {
        let (i, i2) = (index(&left, u), index(&left, u2));
        for j in 0..width {
            transitions
                .entry(cell(i, j).clone())
                .or_default()
                .insert(e.clone(), cell(i2, j).clone());
        }
    }
    for (v, e, v2) in b.transitions() {
        let (j, j2) = (index(&right, v), index(&right, v2));
        for i in 0..left.len() {
            transitions
                .entry(cell(i, j).clone())
                .or_default()
                .insert(e.clone(), cell(i, j2).clone());
        }
    }

    let mut marked = BTreeSet::new();
    for (i, u) in left.iter().enumerate() {
        if !a.is_marked(u) {
            continue;
        }
        for (j, v) in right.iter().enumerate() {
            if b.is_marked(v) {
                marked.insert(cell(i, j).clone());
            }
        }
    }

    let mut costs = a.costs().clone();
    costs.extend(b.costs().iter().map(|(e, c)| (e.clone(), *c)));
    let slots = a.slots().iter().chain(b.slots()).cloned().collect();
    let states = grid.iter().cloned().collect();
    Epsilon0Nfa::assemble(slots, states, costs, transitions, marked)
}

/// Left fold of [`concat_compat`] in the given slot order.
pub fn concat_all<'a, I>(operands: I) -> Result<Option<Epsilon0Nfa>>
where
    I: IntoIterator<Item = &'a Epsilon0Nfa>,
{
    let mut acc: Option<Epsilon0Nfa> = None;
    for nfa in operands {
        acc = Some(match acc {
            None => nfa.clone(),
            Some(prev) => concat_compat(&prev, nfa)?,
        });
    }
    Ok(acc)
}
