//! Multi-agent task planning over compositions of ε₀-NFAs.
//!
//! Agents are described by capability, failure-mode and constraint automata.
//! [`model::build_environment`] composes them into one environment automaton
//! whose states are tuples of per-agent states; [`planner`] reduces a task
//! ("these agents must end in these states") to a shortest directed path and
//! returns a closed chain of single-port modules.
//!
//! ```
//! use specter::automata::{CompositeState, EventId, NfaBuilder, Projector};
//! use specter::model::{build_environment, AgentSpec, InterAgentSpec};
//! use specter::planner::{plan_complete, TaskSpecification};
//!
//! let s = CompositeState::atomic;
//! let robot = NfaBuilder::new(["R1"])
//!     .transition(s("A"), EventId::new("R1", "go"), s("B"), 4.0)
//!     .build()
//!     .unwrap();
//! let agents = [AgentSpec::new("R1").with_capability(robot)];
//! let env = build_environment(&agents, &InterAgentSpec::empty(&["R1".into()])).unwrap();
//! let task = TaskSpecification::new(Projector::parse("1").unwrap(), vec!["B".into()]).unwrap();
//! let plan = plan_complete(&env, &s("A"), &task).unwrap();
//! assert_eq!(plan.cost, 4.0);
//! assert_eq!(plan.chain.modules.len(), 1);
//! ```

pub mod algebra;
pub mod automata;
pub mod cli;
pub mod model;
pub mod oracle;
pub mod planner;
pub mod scenario;

pub use automata::{CompositeState, Epsilon0Nfa, EventId, Label, Projector};
pub use model::{AgentSpec, EnvironmentModel, FailureEvent, InterAgentSpec};
pub use planner::{ModuleChain, PlanResult, PortModule, Solver, TaskSpecification};
