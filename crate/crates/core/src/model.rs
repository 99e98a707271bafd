//! Agent and environment models built from capability, failure and
//! constraint automata, plus on-the-fly failure injection.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::algebra::{concat_all, subtract_compat, union_compat};
use crate::automata::{AutomatonError, CompositeState, Epsilon0Nfa, EventId, Label};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
    #[error("at least one agent is required")]
    NoAgents,
    #[error("agent {0} is declared twice")]
    DuplicateAgent(String),
    #[error("unknown agent {0}")]
    UnknownAgent(String),
    #[error("agent {agent} has no state {label}")]
    UnknownState { agent: String, label: String },
    #[error("agent {agent}: {reason}")]
    InvalidAgent { agent: String, reason: String },
    #[error("invalid failure mode for agent {agent}: {reason}")]
    InvalidFailure { agent: String, reason: String },
    #[error("inter-agent automaton cannot be lifted: {0}")]
    LiftError(String),
    #[error("event {0} collides with an agent namespace")]
    EventCollision(EventId),
    #[error("malformed state {0:?}")]
    MalformedState(String),
}

/// Capabilities M, failure modes F and constraints N of one agent.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentSpec {
    pub id: String,
    pub capabilities: Vec<Epsilon0Nfa>,
    pub failures: Vec<Epsilon0Nfa>,
    pub constraints: Vec<Epsilon0Nfa>,
}

impl AgentSpec {
    pub fn new(id: impl Into<String>) -> Self {
        AgentSpec {
            id: id.into(),
            capabilities: Vec::new(),
            failures: Vec::new(),
            constraints: Vec::new(),
        }
    }

    pub fn with_capability(mut self, nfa: Epsilon0Nfa) -> Self {
        self.capabilities.push(nfa);
        self
    }

    pub fn with_failure(mut self, nfa: Epsilon0Nfa) -> Self {
        self.failures.push(nfa);
        self
    }

    pub fn with_constraint(mut self, nfa: Epsilon0Nfa) -> Self {
        self.constraints.push(nfa);
        self
    }

    fn empty(&self) -> Epsilon0Nfa {
        Epsilon0Nfa::empty(vec![self.id.clone()])
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let invalid = |reason: String| ModelError::InvalidAgent {
            agent: self.id.clone(),
            reason,
        };
        let all = self.capabilities.iter().chain(&self.failures).chain(&self.constraints);
        for nfa in all {
            if nfa.slots() != [self.id.clone()] {
                return Err(invalid(format!("member automaton has slots {:?}", nfa.slots())));
            }
            if let Some(e) = nfa.events().find(|e| e.namespace() != self.id) {
                return Err(invalid(format!("event {e} is not namespaced by the agent")));
            }
        }
        for f in &self.failures {
            let fail = |reason: &str| ModelError::InvalidFailure {
                agent: self.id.clone(),
                reason: reason.to_string(),
            };
            if f.costs().len() != 1 || f.transition_count() != 1 {
                return Err(fail("a failure mode has exactly one event and one transition"));
            }
            let (q, _, q2) = f.transitions().next().expect("one transition");
            let endpoints: BTreeSet<_> = [q.clone(), q2.clone()].into();
            if *f.states() != endpoints {
                return Err(fail("a failure mode has exactly the states of its transition"));
            }
        }
        Ok(())
    }
}

/// K_i = (⋃ M) \ F.
pub fn build_agent_capabilities(spec: &AgentSpec) -> Result<Epsilon0Nfa, ModelError> {
    spec.validate()?;
    let mut caps = spec.empty();
    for m in &spec.capabilities {
        caps = union_compat(&caps, m)?;
    }
    let mut failures = spec.empty();
    for f in &spec.failures {
        failures = union_compat(&failures, f)?;
    }
    Ok(subtract_compat(&caps, &failures)?)
}

/// D_i = ⋃ N; the empty automaton when the agent has no constraints.
pub fn build_agent_constraints(spec: &AgentSpec) -> Result<Epsilon0Nfa, ModelError> {
    spec.validate()?;
    let mut constraints = spec.empty();
    for n in &spec.constraints {
        constraints = union_compat(&constraints, n)?;
    }
    Ok(constraints)
}

/// A_i = K_i \ D_i.
pub fn build_agent(spec: &AgentSpec) -> Result<Epsilon0Nfa, ModelError> {
    let caps = build_agent_capabilities(spec)?;
    let constraints = build_agent_constraints(spec)?;
    Ok(subtract_compat(&caps, &constraints)?)
}

/// Inter-agent capabilities 𝒦_A and constraints 𝒟_A, authored at full arity.
#[derive(Debug, Clone, PartialEq)]
pub struct InterAgentSpec {
    pub member_ids: Vec<String>,
    pub capabilities: Epsilon0Nfa,
    pub constraints: Epsilon0Nfa,
}

impl InterAgentSpec {
    pub fn empty(agent_ids: &[String]) -> Self {
        InterAgentSpec {
            member_ids: agent_ids.to_vec(),
            capabilities: Epsilon0Nfa::empty(agent_ids.to_vec()),
            constraints: Epsilon0Nfa::empty(agent_ids.to_vec()),
        }
    }
}

/// The composed environment automaton 𝒮 together with its agent layout.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentModel {
    automaton: Epsilon0Nfa,
    agent_ids: Vec<String>,
    alphabets: Vec<Vec<Label>>,
}

impl EnvironmentModel {
    /// Reassembles a model, e.g. after loading it from disk. The automaton's
    /// slots must be the agent ids and every state must lie in the product
    /// of the alphabets.
    pub fn from_parts(
        automaton: Epsilon0Nfa,
        agent_ids: Vec<String>,
        mut alphabets: Vec<Vec<Label>>,
    ) -> Result<Self, ModelError> {
        if automaton.slots() != agent_ids.as_slice() || alphabets.len() != agent_ids.len() {
            return Err(ModelError::LiftError(
                "automaton slots do not match the agent list".into(),
            ));
        }
        for a in &mut alphabets {
            a.sort();
            a.dedup();
        }
        for x in automaton.states() {
            check_in_product(x, &agent_ids, &alphabets)?;
        }
        Ok(EnvironmentModel {
            automaton,
            agent_ids,
            alphabets,
        })
    }

    pub fn automaton(&self) -> &Epsilon0Nfa {
        &self.automaton
    }

    pub fn agent_ids(&self) -> &[String] {
        &self.agent_ids
    }

    /// Sorted atomic alphabet X_{A_i} of every agent, in slot order.
    pub fn alphabets(&self) -> &[Vec<Label>] {
        &self.alphabets
    }

    pub fn slot_of(&self, agent: &str) -> Option<usize> {
        self.agent_ids.iter().position(|a| a == agent)
    }

    pub fn arity(&self) -> usize {
        self.agent_ids.len()
    }

    pub fn state_count(&self) -> usize {
        self.automaton.states().len()
    }

    /// θ = ∏ |X_{A_i}|.
    pub fn theta(&self) -> usize {
        self.alphabets.iter().map(Vec::len).product()
    }

    /// θ′ = ∏_{i≠slot} |X_{A_i}|.
    pub fn theta_excluding(&self, slot: usize) -> usize {
        self.alphabets
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != slot)
            .map(|(_, a)| a.len())
            .product()
    }

    pub fn has_label(&self, slot: usize, label: &str) -> bool {
        self.alphabets[slot].binary_search_by(|l| (**l).cmp(label)).is_ok()
    }

    /// Builds a composite state from per-agent labels, checking each one.
    pub fn state_from_labels<S: AsRef<str>>(&self, labels: &[S]) -> Result<CompositeState, ModelError> {
        if labels.len() != self.arity() {
            return Err(AutomatonError::LengthMismatch {
                expected: self.arity(),
                found: labels.len(),
            }
            .into());
        }
        for (slot, label) in labels.iter().enumerate() {
            if !self.has_label(slot, label.as_ref()) {
                return Err(ModelError::UnknownState {
                    agent: self.agent_ids[slot].clone(),
                    label: label.as_ref().to_string(),
                });
            }
        }
        Ok(CompositeState::new(labels.iter().map(AsRef::as_ref)))
    }

    /// Parses either the `a|b|c` display form or `AGENT=state,...` pairs.
    /// With pairs, agents not named keep their component of `fallback`.
    pub fn parse_state(&self, text: &str, fallback: Option<&CompositeState>) -> Result<CompositeState, ModelError> {
        if !text.contains('=') {
            let x = CompositeState::parse(text);
            return self.state_from_labels(x.components());
        }
        let mut labels: Vec<Option<Label>> = match fallback {
            Some(x) if x.arity() == self.arity() => x.components().iter().cloned().map(Some).collect(),
            _ => vec![None; self.arity()],
        };
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (agent, label) = part
                .split_once('=')
                .ok_or_else(|| ModelError::MalformedState(format!("expected AGENT=state, got {part:?}")))?;
            let slot = self
                .slot_of(agent.trim())
                .ok_or_else(|| ModelError::UnknownAgent(agent.trim().to_string()))?;
            labels[slot] = Some(label.trim().into());
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(slot, l)| {
                l.ok_or_else(|| {
                    ModelError::MalformedState(format!("no state given for agent {}", self.agent_ids[slot]))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.state_from_labels(&labels)
    }
}

fn check_in_product(x: &CompositeState, agent_ids: &[String], alphabets: &[Vec<Label>]) -> Result<(), ModelError> {
    for (slot, label) in x.components().iter().enumerate() {
        if alphabets[slot].binary_search(label).is_err() {
            return Err(ModelError::LiftError(format!(
                "state {x} uses label {label} unknown to agent {}",
                agent_ids[slot]
            )));
        }
    }
    Ok(())
}

/// Composes 𝒮 = (⊥⊥K_i ∪ 𝒦_A) \ (⊥⊥D_i ∪ 𝒟_A).
pub fn build_environment(agents: &[AgentSpec], inter: &InterAgentSpec) -> Result<EnvironmentModel, ModelError> {
    if agents.is_empty() {
        return Err(ModelError::NoAgents);
    }
    let mut seen = BTreeSet::new();
    for a in agents {
        if !seen.insert(a.id.as_str()) {
            return Err(ModelError::DuplicateAgent(a.id.clone()));
        }
    }
    let agent_ids: Vec<String> = agents.iter().map(|a| a.id.clone()).collect();

    let mut caps = Vec::with_capacity(agents.len());
    let mut constraints = Vec::with_capacity(agents.len());
    for a in agents {
        caps.push(build_agent_capabilities(a)?);
        constraints.push(build_agent_constraints(a)?);
    }
    let alphabets: Vec<Vec<Label>> = caps
        .iter()
        .map(|k| k.states().iter().map(|x| x.components()[0].clone()).collect())
        .collect();

    validate_inter(inter, &agent_ids, &alphabets)?;

    let env_caps = concat_all(&caps)?.expect("at least one agent");
    let env_constraints = concat_all(&constraints)?.expect("at least one agent");
    let global_caps = union_compat(&env_caps, &inter.capabilities)?;
    let global_constraints = union_compat(&env_constraints, &inter.constraints)?;
    let automaton = subtract_compat(&global_caps, &global_constraints)?;

    Ok(EnvironmentModel {
        automaton,
        agent_ids,
        alphabets,
    })
}

fn validate_inter(inter: &InterAgentSpec, agent_ids: &[String], alphabets: &[Vec<Label>]) -> Result<(), ModelError> {
    if let Some(m) = inter.member_ids.iter().find(|m| !agent_ids.contains(m)) {
        return Err(ModelError::UnknownAgent(m.clone()));
    }
    for nfa in [&inter.capabilities, &inter.constraints] {
        if nfa.slots() != agent_ids {
            return Err(ModelError::LiftError(format!(
                "inter-agent automaton has slots {:?}, expected {:?}",
                nfa.slots(),
                agent_ids
            )));
        }
        if let Some(e) = nfa.events().find(|e| agent_ids.iter().any(|a| a == e.namespace())) {
            return Err(ModelError::EventCollision(e.clone()));
        }
        for x in nfa.states() {
            check_in_product(x, agent_ids, alphabets)?;
        }
    }
    Ok(())
}

/// A detected failure of one agent's transition `from -> to`.
///
/// For the `inter` namespace the event is mandatory and `from`/`to` are the
/// full composite endpoints in `a|b|c` form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailureEvent {
    pub agent_id: String,
    pub from: String,
    pub to: String,
    /// Event name within the agent's namespace.
    pub event: Option<String>,
}

/// Outcome of [`inject_failure`].
#[derive(Debug, Clone)]
pub struct Injection {
    pub model: EnvironmentModel,
    pub removed: usize,
}

/// Removes every transition of the failing agent that moves its slot from
/// `from` to `to`, leaving states, events and markings untouched.
pub fn inject_failure(env: &EnvironmentModel, f: &FailureEvent) -> Result<Injection, ModelError> {
    let (automaton, removed) = if f.agent_id == EventId::INTER {
        let name = f.event.as_deref().ok_or_else(|| ModelError::InvalidFailure {
            agent: f.agent_id.clone(),
            reason: "inter-agent failures must name the event".into(),
        })?;
        let event = EventId::inter(name);
        let from = CompositeState::parse(&f.from);
        let to = CompositeState::parse(&f.to);
        for x in [&from, &to] {
            if !env.automaton.contains_state(x) {
                return Err(AutomatonError::UnknownState(x.clone()).into());
            }
        }
        env.automaton
            .without_transitions(|x, e, y| *e == event && *x == from && *y == to)
    } else {
        let slot = env
            .slot_of(&f.agent_id)
            .ok_or_else(|| ModelError::UnknownAgent(f.agent_id.clone()))?;
        for label in [&f.from, &f.to] {
            if !env.has_label(slot, label) {
                return Err(ModelError::UnknownState {
                    agent: f.agent_id.clone(),
                    label: label.clone(),
                });
            }
        }
        let filter = f.event.as_deref().map(|name| EventId::new(&f.agent_id, name));
        env.automaton.without_transitions(|x, e, y| {
            e.namespace() == f.agent_id
                && filter.as_ref().is_none_or(|want| want == e)
                && x.component(slot) == f.from
                && y.component(slot) == f.to
        })
    };
    Ok(Injection {
        model: EnvironmentModel {
            automaton,
            agent_ids: env.agent_ids.clone(),
            alphabets: env.alphabets.clone(),
        },
        removed,
    })
}
