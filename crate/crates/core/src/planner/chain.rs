//! Single-port modules and closed module chains.

use serde::{Deserialize, Serialize};

use crate::automata::{CompositeState, EventId};

use super::graph::WeightedGraph;
use super::PlanError;

/// Single input/output port module `{p, e, q}` with cost `g(e)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortModule {
    pub p: CompositeState,
    #[serde(rename = "event")]
    pub e: EventId,
    pub q: CompositeState,
    pub cost: f64,
}

impl PortModule {
    /// The inverted task module `{x_d, e₀, x0}` with zero cost.
    pub fn task_inverted(goal: CompositeState, x0: CompositeState) -> Self {
        PortModule {
            p: goal,
            e: EventId::task_event(),
            q: x0,
            cost: 0.0,
        }
    }

    /// Directional compatibility `self ⇀ next`.
    pub fn feeds(&self, next: &PortModule) -> bool {
        self.q == next.p
    }
}

/// Swaps the ports of a module; event and cost are preserved.
pub fn invert_module(m: &PortModule) -> PortModule {
    PortModule {
        p: m.q.clone(),
        e: m.e.clone(),
        q: m.p.clone(),
        cost: m.cost,
    }
}

/// Closed chain `{T₀⁻¹, T₁, …, T_z}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleChain {
    pub task_module_inverted: PortModule,
    pub modules: Vec<PortModule>,
    pub total_cost: f64,
}

impl ModuleChain {
    pub fn initial(&self) -> &CompositeState {
        &self.task_module_inverted.q
    }

    pub fn goal(&self) -> &CompositeState {
        &self.task_module_inverted.p
    }

    pub fn is_empty(&self) -> bool {
        self.modules.is_empty()
    }

    pub fn len(&self) -> usize {
        self.modules.len()
    }

    pub fn events(&self) -> impl Iterator<Item = &EventId> {
        self.modules.iter().map(|m| &m.e)
    }

    /// Builds a chain from raw modules, summing costs in order.
    pub fn from_modules(x0: CompositeState, goal: CompositeState, modules: Vec<PortModule>) -> Self {
        let total_cost = sum_costs(&modules);
        ModuleChain {
            task_module_inverted: PortModule::task_inverted(goal, x0),
            modules,
            total_cost,
        }
    }
}

/// Left-to-right sum of module costs; matches Dijkstra's accumulation order.
pub fn sum_costs(modules: &[PortModule]) -> f64 {
    modules.iter().fold(0.0, |acc, m| acc + m.cost)
}

/// Turns a node path into modules, closing the chain with `{x_d, e₀, x0}`.
pub fn build_chain(
    path: &[usize],
    g: &WeightedGraph,
    x0: &CompositeState,
    x_d: &CompositeState,
) -> Result<ModuleChain, PlanError> {
    let mut modules = Vec::with_capacity(path.len().saturating_sub(1));
    for pair in path.windows(2) {
        let edge = g.edge(pair[0], pair[1]).ok_or_else(|| PlanError::BrokenPath {
            from: g.node(pair[0]).clone(),
            to: g.node(pair[1]).clone(),
        })?;
        modules.push(PortModule {
            p: g.node(pair[0]).clone(),
            e: edge.event.clone(),
            q: g.node(pair[1]).clone(),
            cost: edge.weight,
        });
    }
    Ok(ModuleChain::from_modules(x0.clone(), x_d.clone(), modules))
}

/// True iff consecutive modules are directionally compatible, the chain
/// closes through `T₀⁻¹`, and the recorded total matches the module costs.
pub fn check_chain(chain: &ModuleChain) -> bool {
    let t0 = &chain.task_module_inverted;
    if t0.e != EventId::task_event() || t0.cost != 0.0 {
        return false;
    }
    if chain.total_cost != sum_costs(&chain.modules) {
        return false;
    }
    match (chain.modules.first(), chain.modules.last()) {
        (None, None) => t0.p == t0.q,
        (Some(first), Some(last)) => {
            t0.feeds(first) && last.feeds(t0) && chain.modules.windows(2).all(|w| w[0].feeds(&w[1]))
        }
        _ => unreachable!(),
    }
}
