//! Seeded random scenarios for property tests and benchmarks.

use std::collections::BTreeSet;

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automata::{CompositeState, Epsilon0Nfa, EventId, Label, NfaBuilder, Projector};
use crate::model::{build_environment, AgentSpec, EnvironmentModel, InterAgentSpec, ModelError};
use crate::planner::TaskSpecification;

/// Generator parameters; defaults follow the property-test envelope.
#[derive(Debug, Clone)]
pub struct RandomParams {
    pub agents: (usize, usize),
    pub alphabet: (usize, usize),
    /// Probability that a given ordered pair of distinct states gets an event.
    pub edge_density: f64,
    pub cost: (u32, u32),
    pub failure_probability: f64,
    pub constraint_probability: f64,
    pub inter_events: (usize, usize),
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams {
            agents: (2, 4),
            alphabet: (2, 5),
            edge_density: 0.5,
            cost: (1, 100),
            failure_probability: 0.3,
            constraint_probability: 0.3,
            inter_events: (0, 3),
        }
    }
}

impl RandomParams {
    /// Fixed agent count and alphabet size, as used by benchmarks.
    pub fn fixed(agents: usize, states: usize) -> Self {
        RandomParams {
            agents: (agents, agents),
            alphabet: (states, states),
            ..RandomParams::default()
        }
    }
}

/// A generated scenario in library form.
#[derive(Debug, Clone)]
pub struct RandomScenario {
    pub seed: u64,
    pub agents: Vec<AgentSpec>,
    pub inter: InterAgentSpec,
    pub initial: CompositeState,
    pub task: TaskSpecification,
}

impl RandomScenario {
    pub fn build(&self) -> Result<EnvironmentModel, ModelError> {
        build_environment(&self.agents, &self.inter)
    }

    pub fn agent_ids(&self) -> Vec<String> {
        self.agents.iter().map(|a| a.id.clone()).collect()
    }
}

fn label(i: usize) -> Label {
    Label::from(format!("s{i}"))
}

fn atomic(i: usize) -> CompositeState {
    CompositeState::from_labels(vec![label(i)])
}

fn cost(rng: &mut ChaCha8Rng, range: (u32, u32)) -> f64 {
    f64::from(rng.random_range(range.0..=range.1))
}

fn single_transition(id: &str, x: &CompositeState, e: &EventId, y: &CompositeState, c: f64) -> Epsilon0Nfa {
    NfaBuilder::new([id])
        .transition(x.clone(), e.clone(), y.clone(), c)
        .unmarked()
        .build()
        .expect("single transition is valid")
}

fn random_agent(rng: &mut ChaCha8Rng, id: &str, size: usize, p: &RandomParams) -> AgentSpec {
    let mut transitions = Vec::new();
    let mut counter = 0;
    for i in 0..size {
        for j in 0..size {
            if i != j && rng.random_bool(p.edge_density) {
                let e = EventId::new(id, &format!("e{counter}"));
                counter += 1;
                transitions.push((atomic(i), e, atomic(j), cost(rng, p.cost)));
            }
        }
    }
    // Split across one or two capability automata; the first owns every state.
    let split = if transitions.len() > 1 && rng.random_bool(0.5) {
        rng.random_range(1..transitions.len())
    } else {
        transitions.len()
    };
    let mut first = NfaBuilder::new([id]).states((0..size).map(atomic));
    for (x, e, y, c) in &transitions[..split] {
        first = first.transition(x.clone(), e.clone(), y.clone(), *c);
    }
    let mut spec = AgentSpec::new(id).with_capability(first.build().expect("generated automaton is valid"));
    if split < transitions.len() {
        let mut second = NfaBuilder::new([id]);
        for (x, e, y, c) in &transitions[split..] {
            second = second.transition(x.clone(), e.clone(), y.clone(), *c);
        }
        spec = spec.with_capability(second.build().expect("generated automaton is valid"));
    }

    if !transitions.is_empty() && rng.random_bool(p.failure_probability) {
        let (x, e, y, c) = transitions.choose(rng).expect("non-empty");
        spec = spec.with_failure(single_transition(id, x, e, y, *c));
    }
    if !transitions.is_empty() && rng.random_bool(p.constraint_probability) {
        let (x, e, y, c) = transitions.choose(rng).expect("non-empty");
        spec = spec.with_constraint(single_transition(id, x, e, y, *c));
    }
    spec
}

/// Deterministically generates a scenario from `seed`.
pub fn random_scenario(seed: u64, p: &RandomParams) -> RandomScenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(p.agents.0..=p.agents.1);
    let sizes: Vec<usize> = (0..n).map(|_| rng.random_range(p.alphabet.0..=p.alphabet.1)).collect();
    let ids: Vec<String> = (1..=n).map(|i| format!("A{i}")).collect();
    let agents: Vec<AgentSpec> = ids
        .iter()
        .zip(&sizes)
        .map(|(id, &size)| random_agent(&mut rng, id, size, p))
        .collect();

    let random_state = |rng: &mut ChaCha8Rng| {
        CompositeState::from_labels(sizes.iter().map(|&k| label(rng.random_range(0..k))).collect())
    };

    let inter_count = rng.random_range(p.inter_events.0..=p.inter_events.1);
    let mut caps = NfaBuilder::new(ids.clone()).unmarked();
    let mut constraints = NfaBuilder::new(ids.clone()).unmarked();
    let mut seen = BTreeSet::new();
    for k in 0..inter_count {
        let x = random_state(&mut rng);
        let y = random_state(&mut rng);
        if x == y || !seen.insert(x.clone()) {
            continue;
        }
        let e = EventId::inter(&format!("i{k}"));
        let c = cost(&mut rng, p.cost);
        caps = caps.transition(x.clone(), e.clone(), y.clone(), c);
        if rng.random_bool(p.constraint_probability / 2.0) {
            constraints = constraints.transition(x, e, y, c);
        }
    }
    let inter = InterAgentSpec {
        member_ids: ids.clone(),
        capabilities: caps.build().expect("inter capabilities are valid"),
        constraints: constraints.build().expect("inter constraints are valid"),
    };

    let initial = random_state(&mut rng);
    let mut bits: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    if !bits.iter().any(|b| *b) {
        let slot = rng.random_range(0..n);
        bits[slot] = true;
    }
    let target = bits
        .iter()
        .zip(&sizes)
        .filter(|(b, _)| **b)
        .map(|(_, &k)| label(rng.random_range(0..k)))
        .collect();
    let task = TaskSpecification::new(Projector::new(bits), target).expect("generated task is valid");

    RandomScenario {
        seed,
        agents,
        inter,
        initial,
        task,
    }
}
