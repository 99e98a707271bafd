//! Versioned JSON artifact holding a composed environment model.
//!
//! States are listed once in sorted order; marked states and transitions
//! refer to them by index, and transitions refer to events by index. The
//! rendering is compact and byte-stable for a given model.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::automata::{make_nfa, CompositeState, EventId, Label, NfaParts, Projector};
use crate::model::EnvironmentModel;
use crate::planner::{Solver, TaskSpecification};

use super::{Diagnostic, DiagnosticCode, JsonPath, TaskDecl};

pub const MODEL_FORMAT: &str = "specter-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentEntry {
    pub id: String,
    pub alphabet: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EventEntry {
    pub id: EventId,
    pub cost: f64,
}

/// Initial state, task and solver recorded from the scenario, used by
/// `plan` when no overrides are given.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDefaults {
    pub initial: CompositeState,
    pub task: TaskDecl,
    pub solver: Solver,
}

impl ModelDefaults {
    pub fn new(initial: CompositeState, task: &TaskSpecification, solver: Solver) -> Self {
        ModelDefaults {
            initial,
            task: TaskDecl {
                projector: task.projector.to_string(),
                target: task.target.iter().map(|l| l.to_string()).collect(),
            },
            solver,
        }
    }

    /// Decodes the recorded task.
    pub fn task_spec(&self) -> Result<TaskSpecification, String> {
        let projector = Projector::parse(&self.task.projector)
            .ok_or_else(|| format!("malformed projector {:?}", self.task.projector))?;
        let target = self.task.target.iter().map(|l| Label::from(l.as_str())).collect();
        TaskSpecification::new(projector, target).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelDocument {
    format: String,
    version: u32,
    agents: Vec<AgentEntry>,
    states: Vec<CompositeState>,
    marked: Vec<usize>,
    events: Vec<EventEntry>,
    transitions: Vec<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    defaults: Option<ModelDefaults>,
}

/// A model plus its optional defaults, as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelArtifact {
    pub model: EnvironmentModel,
    pub defaults: Option<ModelDefaults>,
}

pub fn serialize_model(model: &EnvironmentModel, defaults: Option<&ModelDefaults>) -> String {
    let nfa = model.automaton();
    let states: Vec<CompositeState> = nfa.states().iter().cloned().collect();
    let state_index = |x: &CompositeState| states.binary_search(x).expect("state is listed");
    let events: Vec<EventEntry> = nfa
        .costs()
        .iter()
        .map(|(e, &c)| EventEntry { id: e.clone(), cost: c })
        .collect();
    let event_index: BTreeMap<&EventId, usize> = nfa.costs().keys().enumerate().map(|(i, e)| (e, i)).collect();
    let doc = ModelDocument {
        format: MODEL_FORMAT.into(),
        version: MODEL_VERSION,
        agents: model
            .agent_ids()
            .iter()
            .zip(model.alphabets())
            .map(|(id, alphabet)| AgentEntry {
                id: id.clone(),
                alphabet: alphabet.iter().map(|l| l.to_string()).collect(),
            })
            .collect(),
        marked: nfa.marked().iter().map(state_index).collect(),
        transitions: nfa
            .transitions()
            .map(|(x, e, y)| [state_index(x), event_index[e], state_index(y)])
            .collect(),
        states,
        events,
        defaults: defaults.cloned(),
    };
    let mut text = serde_json::to_string(&doc).expect("model serializes");
    text.push('\n');
    text
}

fn model_error(message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(DiagnosticCode::SchemaError, &JsonPath::root(), message)
}

pub fn parse_model(text: &str) -> Result<ModelArtifact, Diagnostic> {
    let header: serde_json::Value = serde_json::from_str(text).map_err(|e| Diagnostic::from_serde(&e))?;
    if header.get("format").and_then(|f| f.as_str()) != Some(MODEL_FORMAT) {
        return Err(model_error(format!("not a {MODEL_FORMAT} document")));
    }
    if header.get("version").and_then(|v| v.as_u64()) != Some(u64::from(MODEL_VERSION)) {
        return Err(Diagnostic::new(
            DiagnosticCode::VersionMismatch,
            &JsonPath::root().key("version"),
            format!("unsupported model version; expected {MODEL_VERSION}"),
        ));
    }
    let doc: ModelDocument = serde_json::from_value(header).map_err(|e| model_error(e.to_string()))?;

    let slots: Vec<String> = doc.agents.iter().map(|a| a.id.clone()).collect();
    let alphabets: Vec<Vec<Label>> = doc
        .agents
        .iter()
        .map(|a| a.alphabet.iter().map(|l| Label::from(l.as_str())).collect())
        .collect();
    let state = |i: usize| {
        doc.states
            .get(i)
            .cloned()
            .ok_or_else(|| model_error(format!("state index {i} out of range")))
    };
    let event = |i: usize| {
        doc.events
            .get(i)
            .map(|e| e.id.clone())
            .ok_or_else(|| model_error(format!("event index {i} out of range")))
    };
    let mut parts = NfaParts {
        slots: slots.clone(),
        states: doc.states.iter().cloned().collect(),
        events: doc.events.iter().map(|e| e.id.clone()).collect(),
        costs: doc.events.iter().map(|e| (e.id.clone(), e.cost)).collect(),
        marked: doc
            .marked
            .iter()
            .map(|&i| state(i))
            .collect::<Result<BTreeSet<_>, _>>()?,
        transitions: Vec::with_capacity(doc.transitions.len()),
    };
    for &[x, e, y] in &doc.transitions {
        parts.transitions.push((state(x)?, event(e)?, state(y)?));
    }
    let nfa = make_nfa(parts).map_err(|e| model_error(e.to_string()))?;
    let model = EnvironmentModel::from_parts(nfa, slots, alphabets).map_err(|e| model_error(e.to_string()))?;
    Ok(ModelArtifact {
        model,
        defaults: doc.defaults,
    })
}
