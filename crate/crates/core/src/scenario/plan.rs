//! Plan documents: the serialized form of a planner result.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::automata::CompositeState;
use crate::planner::{ModuleChain, PlanResult, PortModule, Solver};

use super::{Diagnostic, DiagnosticCode, JsonPath};

pub const PLAN_FORMAT: &str = "specter-plan";
pub const PLAN_VERSION: u32 = 1;

/// Wall-clock split between model loading / graph construction and search.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Timing {
    pub preprocess_s: f64,
    pub solve_s: f64,
}

impl Timing {
    /// Rounds both fields to the six decimals the document carries.
    pub fn rounded(self) -> Self {
        let r = |v: f64| (v * 1e6).round() / 1e6;
        Timing {
            preprocess_s: r(self.preprocess_s),
            solve_s: r(self.solve_s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanDocument {
    pub solver: Solver,
    pub agents: Vec<String>,
    pub initial_state: CompositeState,
    pub goal_state: CompositeState,
    pub modules: Vec<PortModule>,
    pub total_cost: f64,
    pub timing: Timing,
}

impl PlanDocument {
    pub fn new(result: &PlanResult, agents: &[String], timing: Timing) -> Self {
        PlanDocument {
            solver: result.solver,
            agents: agents.to_vec(),
            initial_state: result.chain.initial().clone(),
            goal_state: result.goal_state.clone(),
            modules: result.chain.modules.clone(),
            total_cost: result.cost,
            timing: timing.rounded(),
        }
    }

    pub fn to_chain(&self) -> ModuleChain {
        ModuleChain {
            task_module_inverted: PortModule::task_inverted(self.goal_state.clone(), self.initial_state.clone()),
            modules: self.modules.clone(),
            total_cost: self.total_cost,
        }
    }
}

#[derive(Serialize)]
struct TimingOut {
    preprocess_s: Box<RawValue>,
    solve_s: Box<RawValue>,
}

#[derive(Serialize)]
struct PlanOut<'a> {
    format: &'static str,
    version: u32,
    solver: Solver,
    agents: &'a [String],
    initial_state: &'a CompositeState,
    goal_state: &'a CompositeState,
    modules: &'a [PortModule],
    total_cost: f64,
    timing: TimingOut,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TimingIn {
    preprocess_s: f64,
    solve_s: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlanIn {
    format: String,
    version: u32,
    solver: Solver,
    agents: Vec<String>,
    initial_state: CompositeState,
    goal_state: CompositeState,
    modules: Vec<PortModule>,
    total_cost: f64,
    timing: TimingIn,
}

fn fixed6(v: f64) -> Box<RawValue> {
    RawValue::from_string(format!("{v:.6}")).expect("a finite decimal is valid JSON")
}

/// Deterministic rendering: fixed key order, costs in shortest round-trip
/// form, timings with six decimals.
pub fn serialize_plan(doc: &PlanDocument) -> String {
    let out = PlanOut {
        format: PLAN_FORMAT,
        version: PLAN_VERSION,
        solver: doc.solver,
        agents: &doc.agents,
        initial_state: &doc.initial_state,
        goal_state: &doc.goal_state,
        modules: &doc.modules,
        total_cost: doc.total_cost,
        timing: TimingOut {
            preprocess_s: fixed6(doc.timing.preprocess_s),
            solve_s: fixed6(doc.timing.solve_s),
        },
    };
    let mut text = serde_json::to_string_pretty(&out).expect("plan serializes");
    text.push('\n');
    text
}

pub fn parse_plan(text: &str) -> Result<PlanDocument, Diagnostic> {
    let doc: PlanIn = serde_json::from_str(text).map_err(|e| Diagnostic::from_serde(&e))?;
    if doc.format != PLAN_FORMAT {
        return Err(Diagnostic::new(
            DiagnosticCode::SchemaError,
            &JsonPath::root().key("format"),
            format!("not a {PLAN_FORMAT} document"),
        ));
    }
    if doc.version != PLAN_VERSION {
        return Err(Diagnostic::new(
            DiagnosticCode::VersionMismatch,
            &JsonPath::root().key("version"),
            format!("unsupported plan version {}; expected {PLAN_VERSION}", doc.version),
        ));
    }
    Ok(PlanDocument {
        solver: doc.solver,
        agents: doc.agents,
        initial_state: doc.initial_state,
        goal_state: doc.goal_state,
        modules: doc.modules,
        total_cost: doc.total_cost,
        timing: Timing {
            preprocess_s: doc.timing.preprocess_s,
            solve_s: doc.timing.solve_s,
        },
    })
}
