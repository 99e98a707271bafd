//! Task specifications and the complete / heuristic planners.
//!
//! Both planners run Dijkstra over [`WeightedGraph`]. The complete planner
//! considers every marked state matching the task and returns the cheapest;
//! the heuristic planner aims at the single goal that keeps every
//! unconstrained agent where it started and stops at the first state along
//! that path that already satisfies the task.

pub mod chain;
pub mod graph;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{proj, CompositeState, Label, Projector};
use crate::model::EnvironmentModel;

pub use chain::{build_chain, check_chain, invert_module, ModuleChain, PortModule};
pub use graph::{dijkstra, dijkstra_from, Edge, ShortestPaths, WeightedGraph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error("invalid task: {0}")]
    InvalidTask(String),
    #[error("unknown state {0}")]
    UnknownState(CompositeState),
    #[error("no state satisfies the task")]
    NoGoalStates,
    #[error("task infeasible: no goal state is reachable from {0}")]
    TaskInfeasible(CompositeState),
    #[error("heuristic goal {0} is not a marked state of the model")]
    NoSuchGoal(CompositeState),
    #[error("no path to {0}")]
    NoPath(CompositeState),
    #[error("path step {from} -> {to} is not an edge of the graph")]
    BrokenPath { from: CompositeState, to: CompositeState },
}

impl PlanError {
    /// True for the two errors that signal a heuristic failure rather than
    /// an infeasible task.
    pub fn is_heuristic_failure(&self) -> bool {
        matches!(self, PlanError::NoSuchGoal(_) | PlanError::NoPath(_))
    }
}

/// Task `proj(x_d, b) = γ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaskSpecification {
    pub projector: Projector,
    pub target: Vec<Label>,
}

impl TaskSpecification {
    pub fn new(projector: Projector, target: Vec<Label>) -> Result<Self, PlanError> {
        if projector.count_ones() == 0 {
            return Err(PlanError::InvalidTask("the projector selects no agent".into()));
        }
        if target.len() != projector.count_ones() {
            return Err(PlanError::InvalidTask(format!(
                "projector {projector} selects {} agents but {} target labels were given",
                projector.count_ones(),
                target.len()
            )));
        }
        Ok(TaskSpecification { projector, target })
    }

    /// Parses `"I1=B"` or `"R1=A,W1=B"` against the model's agent slots.
    pub fn parse_assignments(env: &EnvironmentModel, text: &str) -> Result<Self, PlanError> {
        let mut labels: Vec<Option<Label>> = vec![None; env.arity()];
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (agent, label) = part
                .split_once('=')
                .ok_or_else(|| PlanError::InvalidTask(format!("expected agent=state, got {part:?}")))?;
            let slot = env
                .slot_of(agent.trim())
                .ok_or_else(|| PlanError::InvalidTask(format!("unknown agent {:?}", agent.trim())))?;
            if labels[slot].is_some() {
                return Err(PlanError::InvalidTask(format!("agent {} assigned twice", agent.trim())));
            }
            labels[slot] = Some(Label::from(label.trim()));
        }
        let projector = Projector::new(labels.iter().map(Option::is_some).collect());
        let target = labels.into_iter().flatten().collect();
        let task = TaskSpecification::new(projector, target)?;
        task.validate_for(env)?;
        Ok(task)
    }

    /// Checks the projector length and that each target label belongs to the
    /// corresponding agent's alphabet.
    pub fn validate_for(&self, env: &EnvironmentModel) -> Result<(), PlanError> {
        if self.projector.len() != env.arity() {
            return Err(PlanError::InvalidTask(format!(
                "projector {} has {} bits but the model has {} agents",
                self.projector,
                self.projector.len(),
                env.arity()
            )));
        }
        for (slot, label) in self.projector.set_slots().zip(&self.target) {
            if !env.has_label(slot, label) {
                return Err(PlanError::InvalidTask(format!(
                    "agent {} has no state {label}",
                    env.agent_ids()[slot]
                )));
            }
        }
        Ok(())
    }

    /// `proj(x, b) = γ`.
    pub fn is_satisfied_by(&self, x: &CompositeState) -> bool {
        proj(x, &self.projector).is_ok_and(|p| p == self.target)
    }

    /// The state agreeing with `γ` on the projector and with `x0` elsewhere.
    pub fn heuristic_goal(&self, x0: &CompositeState) -> CompositeState {
        let mut labels = x0.components().to_vec();
        for (slot, label) in self.projector.set_slots().zip(&self.target) {
            labels[slot] = label.clone();
        }
        CompositeState::from_labels(labels)
    }
}

impl fmt::Display for TaskSpecification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let target: Vec<&str> = self.target.iter().map(|l| &**l).collect();
        write!(f, "b={} γ={}", self.projector, target.join("|"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    #[default]
    Complete,
    Heuristic,
}

impl Solver {
    pub fn as_str(self) -> &'static str {
        match self {
            Solver::Complete => "complete",
            Solver::Heuristic => "heuristic",
        }
    }
}

impl fmt::Display for Solver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Solver {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "complete" => Ok(Solver::Complete),
            "heuristic" => Ok(Solver::Heuristic),
            other => Err(format!("unknown solver {other:?}; expected complete or heuristic")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub chain: ModuleChain,
    pub cost: f64,
    pub goal_state: CompositeState,
    pub solver: Solver,
}

/// A planner bound to one prebuilt environment model and its graph.
#[derive(Debug, Clone)]
pub struct Planner<'a> {
    env: &'a EnvironmentModel,
    graph: WeightedGraph,
}

impl<'a> Planner<'a> {
    pub fn new(env: &'a EnvironmentModel) -> Self {
        Planner {
            env,
            graph: WeightedGraph::from_model(env),
        }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn env(&self) -> &EnvironmentModel {
        self.env
    }

    pub fn plan(&self, x0: &CompositeState, task: &TaskSpecification, solver: Solver) -> Result<PlanResult, PlanError> {
        match solver {
            Solver::Complete => self.complete(x0, task),
            Solver::Heuristic => self.heuristic(x0, task),
        }
    }

    fn prepare(&self, x0: &CompositeState, task: &TaskSpecification) -> Result<usize, PlanError> {
        task.validate_for(self.env)?;
        self.graph
            .index_of(x0)
            .ok_or_else(|| PlanError::UnknownState(x0.clone()))
    }

    fn empty_plan(x0: &CompositeState, solver: Solver) -> PlanResult {
        PlanResult {
            chain: ModuleChain::from_modules(x0.clone(), x0.clone(), Vec::new()),
            cost: 0.0,
            goal_state: x0.clone(),
            solver,
        }
    }

    fn is_goal(&self, i: usize, task: &TaskSpecification) -> bool {
        let x = self.graph.node(i);
        self.env.automaton().is_marked(x) && task.is_satisfied_by(x)
    }

    /// Marked goal states in ascending node order.
    pub fn goal_indices(&self, task: &TaskSpecification) -> Vec<usize> {
        graph::map_indexed(self.graph.node_count(), |i| self.is_goal(i, task))
            .into_iter()
            .enumerate()
            .filter_map(|(i, hit)| hit.then_some(i))
            .collect()
    }

    /// Cheapest plan over every marked goal state; ties go to the goal with
    /// the smallest node index. Unreachable goals are skipped.
    pub fn complete(&self, x0: &CompositeState, task: &TaskSpecification) -> Result<PlanResult, PlanError> {
        let source = self.prepare(x0, task)?;
        if self.is_goal(source, task) {
            return Ok(Self::empty_plan(x0, Solver::Complete));
        }
        let goals = self.goal_indices(task);
        if goals.is_empty() {
            return Err(PlanError::NoGoalStates);
        }
        let mut is_goal = vec![false; self.graph.node_count()];
        for &g in &goals {
            is_goal[g] = true;
        }
        // One sweep settles every goal exactly as a per-goal run would.
        let mut remaining = goals.len();
        let tree = dijkstra_from(&self.graph, source, |v| {
            if is_goal[v] {
                remaining -= 1;
            }
            remaining == 0
        });
        let best = goals
            .iter()
            .filter_map(|&g| tree.distance(g).map(|d| (d, g)))
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let (_, goal) = best.ok_or_else(|| PlanError::TaskInfeasible(x0.clone()))?;
        let path = tree.path_to(goal).expect("settled goal has a path");
        let goal_state = self.graph.node(goal).clone();
        let chain = build_chain(&path, &self.graph, x0, &goal_state)?;
        Ok(PlanResult {
            cost: chain.total_cost,
            chain,
            goal_state,
            solver: Solver::Complete,
        })
    }

    /// Single-goal search towards the state that moves only the task's
    /// agents, truncated at the first state that satisfies the task.
    pub fn heuristic(&self, x0: &CompositeState, task: &TaskSpecification) -> Result<PlanResult, PlanError> {
        let source = self.prepare(x0, task)?;
        if self.is_goal(source, task) {
            return Ok(Self::empty_plan(x0, Solver::Heuristic));
        }
        let x_d = task.heuristic_goal(x0);
        let target = self
            .graph
            .index_of(&x_d)
            .filter(|_| self.env.automaton().is_marked(&x_d))
            .ok_or_else(|| PlanError::NoSuchGoal(x_d.clone()))?;
        let (mut path, _) = dijkstra(&self.graph, source, target).ok_or_else(|| PlanError::NoPath(x_d.clone()))?;
        if let Some(k) = (1..path.len()).find(|&k| task.is_satisfied_by(self.graph.node(path[k]))) {
            path.truncate(k + 1);
        }
        let goal_state = self.graph.node(*path.last().expect("non-empty path")).clone();
        let chain = build_chain(&path, &self.graph, x0, &goal_state)?;
        Ok(PlanResult {
            cost: chain.total_cost,
            chain,
            goal_state,
            solver: Solver::Heuristic,
        })
    }
}

pub fn plan_complete(
    env: &EnvironmentModel,
    x0: &CompositeState,
    task: &TaskSpecification,
) -> Result<PlanResult, PlanError> {
    Planner::new(env).complete(x0, task)
}

pub fn plan_heuristic(
    env: &EnvironmentModel,
    x0: &CompositeState,
    task: &TaskSpecification,
) -> Result<PlanResult, PlanError> {
    Planner::new(env).heuristic(x0, task)
}

/// Replays the chain's events through the model's transition function from
/// its initial state and returns the state reached.
pub fn replay(env: &EnvironmentModel, chain: &ModuleChain) -> Result<CompositeState, PlanError> {
    let nfa = env.automaton();
    let mut x = chain.initial().clone();
    for m in &chain.modules {
        let next = nfa.target(&x, &m.e).ok_or_else(|| PlanError::BrokenPath {
            from: x.clone(),
            to: m.q.clone(),
        })?;
        x = next.clone();
    }
    Ok(x)
}
