//! Slow, independent reference implementations for testing the planner.
//!
//! Nothing here shares code with [`crate::planner`]: shortest paths are found
//! by label-correcting relaxation to a fixpoint directly over the model's
//! transitions.

pub mod random;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::automata::CompositeState;
use crate::model::EnvironmentModel;
use crate::planner::TaskSpecification;

/// Default state-count bound of [`brute_force_shortest`].
pub const DEFAULT_BOUND: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("model has {states} states, above the oracle bound {bound}")]
    BoundExceeded { states: usize, bound: usize },
    #[error("no goal state is reachable")]
    NoPath,
    #[error("unknown initial state {0}")]
    UnknownState(CompositeState),
}

/// Minimum-cost path from `x0` to any state satisfying `goal`, computed with
/// Bellman–Ford-style relaxation. Returns the path and its cost.
pub fn brute_force_shortest<F>(
    env: &EnvironmentModel,
    x0: &CompositeState,
    goal: F,
    bound: Option<usize>,
) -> Result<(Vec<CompositeState>, f64), OracleError>
where
    F: Fn(&CompositeState) -> bool,
{
    let nfa = env.automaton();
    let bound = bound.unwrap_or(DEFAULT_BOUND);
    if nfa.states().len() > bound {
        return Err(OracleError::BoundExceeded {
            states: nfa.states().len(),
            bound,
        });
    }
    if !nfa.contains_state(x0) {
        return Err(OracleError::UnknownState(x0.clone()));
    }

    let mut dist: BTreeMap<&CompositeState, f64> = BTreeMap::new();
    let mut pred: BTreeMap<&CompositeState, &CompositeState> = BTreeMap::new();
    dist.insert(x0, 0.0);
    loop {
        let mut changed = false;
        for (x, e, y) in nfa.transitions() {
            let Some(&dx) = dist.get(x) else { continue };
            let candidate = dx + nfa.cost(e).expect("event has a cost");
            if dist.get(y).is_none_or(|&dy| candidate < dy) {
                dist.insert(y, candidate);
                pred.insert(y, x);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let (&best, &cost) = dist
        .iter()
        .filter(|(x, _)| goal(x))
        .min_by(|a, b| a.1.total_cmp(b.1))
        .ok_or(OracleError::NoPath)?;
    let mut path = vec![best.clone()];
    let mut cur = best;
    while cur != x0 {
        cur = pred[cur];
        path.push(cur.clone());
    }
    path.reverse();
    Ok((path, cost))
}

/// Every marked state `x` with `proj(x, b) = γ`.
pub fn enumerate_goal_states(env: &EnvironmentModel, task: &TaskSpecification) -> BTreeSet<CompositeState> {
    let nfa = env.automaton();
    nfa.marked()
        .iter()
        .filter(|x| task.is_satisfied_by(x))
        .cloned()
        .collect()
}

/// Goal count when every state is marked: the product of the alphabet sizes
/// of the agents the projector leaves free.
pub fn goal_count_law(alphabet_sizes: &[usize], projector_bits: &[bool]) -> usize {
    alphabet_sizes
        .iter()
        .zip(projector_bits)
        .filter(|(_, set)| !**set)
        .map(|(n, _)| *n)
        .product()
}
