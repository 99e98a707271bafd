//! Scenario files, model artifacts, plan documents and DOT export.
//!
//! A scenario is a JSON document (schema in `docs/scenario.schema.json`)
//! with the sections `agents`, `inter`, `initial`, `task` and `options`.
//! Agent event names are local to the agent; they are namespaced by the
//! agent id when compiled. Inter-agent transitions name every agent's state.

mod compile;
pub mod dot;
pub mod locate;
pub mod model_file;
pub mod plan;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{build_environment, inject_failure, EnvironmentModel};
use crate::planner::Solver;

pub use compile::{compile, expand_inter_templates, validate, Compiled, DEFAULT_EXPANSION_CAP};
pub use locate::{locate, JsonPath};

/// Stable diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DiagnosticCode {
    SchemaError,
    UnknownReference,
    DuplicateEvent,
    DuplicateAgent,
    NonPositiveCost,
    MissingCost,
    InvalidLabel,
    InvalidTask,
    ExpansionBlowup,
    InvalidAutomaton,
    VersionMismatch,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::SchemaError => "schema-error",
            DiagnosticCode::UnknownReference => "unknown-reference",
            DiagnosticCode::DuplicateEvent => "duplicate-event",
            DiagnosticCode::DuplicateAgent => "duplicate-agent",
            DiagnosticCode::NonPositiveCost => "non-positive-cost",
            DiagnosticCode::MissingCost => "missing-cost",
            DiagnosticCode::InvalidLabel => "invalid-label",
            DiagnosticCode::InvalidTask => "invalid-task",
            DiagnosticCode::ExpansionBlowup => "expansion-blowup",
            DiagnosticCode::InvalidAutomaton => "invalid-automaton",
            DiagnosticCode::VersionMismatch => "version-mismatch",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One problem found in an input document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: DiagnosticCode,
    pub path: String,
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: DiagnosticCode, path: &JsonPath, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            path: path.to_string(),
            line: None,
            column: None,
            message: message.into(),
        }
    }

    fn from_serde(err: &serde_json::Error) -> Self {
        let line = (err.line() > 0).then_some(err.line());
        let column = (err.line() > 0).then_some(err.column());
        let message = err.to_string();
        // serde appends " at line L column C"; the position is kept separately.
        let message = match message.rfind(" at line ") {
            Some(i) => message[..i].to_string(),
            None => message,
        };
        Diagnostic {
            code: DiagnosticCode::SchemaError,
            path: "$".into(),
            line,
            column,
            message,
        }
    }

    fn positioned(mut self, text: &str, path: &JsonPath) -> Self {
        if let Some((line, column)) = locate(text, path) {
            self.line = Some(line);
            self.column = Some(column);
        }
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.path)?;
        if let (Some(line), Some(column)) = (self.line, self.column) {
            write!(f, " (line {line}, column {column})")?;
        }
        write!(f, ": {}", self.message)
    }
}

/// Renders diagnostics one per line.
pub fn render_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{d}\n")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDecl {
    pub from: String,
    pub event: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
}

/// A single-agent automaton. `states` defaults to the transition endpoints;
/// `marked` defaults to all states for capabilities and to none for failure
/// modes and constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDecl {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<Vec<String>>,
    #[serde(default)]
    pub transitions: Vec<TransitionDecl>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDecl {
    pub id: String,
    #[serde(default)]
    pub capabilities: Vec<AutomatonDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<AutomatonDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<AutomatonDecl>,
}

/// Full-arity inter-agent transition: `from`/`to` name every agent's state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterTransitionDecl {
    pub from: BTreeMap<String, String>,
    pub event: String,
    pub to: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateKind {
    Capability,
    Constraint,
}

/// Inter-agent transition over a subset of agents; expanded into one event
/// per state combination of the remaining agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateDecl {
    pub kind: TemplateKind,
    pub event: String,
    pub members: Vec<String>,
    pub from: BTreeMap<String, String>,
    pub to: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct InterDecl {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub capabilities: Vec<InterTransitionDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<InterTransitionDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub templates: Vec<TemplateDecl>,
}

impl InterDecl {
    pub fn is_empty(&self) -> bool {
        self.capabilities.is_empty() && self.constraints.is_empty() && self.templates.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskDecl {
    pub projector: String,
    pub target: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureDecl {
    pub agent: String,
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub event: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct OptionsDecl {
    #[serde(default)]
    pub solver: Solver,
    /// Failures injected into the composed model after it is built.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<FailureDecl>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expansion_cap: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub agents: Vec<AgentDecl>,
    #[serde(default, skip_serializing_if = "InterDecl::is_empty")]
    pub inter: InterDecl,
    pub initial: BTreeMap<String, String>,
    pub task: TaskDecl,
    #[serde(default)]
    pub options: OptionsDecl,
}

/// Parses and validates a scenario. Never panics; any failure comes back as
/// a list of positioned diagnostics.
pub fn parse_scenario(text: &str) -> Result<ScenarioFile, Vec<Diagnostic>> {
    let file: ScenarioFile = serde_json::from_str(text).map_err(|e| vec![Diagnostic::from_serde(&e)])?;
    let diags = validate(&file);
    if diags.is_empty() {
        Ok(file)
    } else {
        Err(diags.into_iter().map(|(d, path)| d.positioned(text, &path)).collect())
    }
}

/// [`parse_scenario`] over raw bytes, rejecting invalid UTF-8.
pub fn parse_scenario_bytes(bytes: &[u8]) -> Result<ScenarioFile, Vec<Diagnostic>> {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_scenario(text),
        Err(e) => Err(vec![Diagnostic::new(
            DiagnosticCode::SchemaError,
            &JsonPath::root(),
            format!("input is not valid UTF-8: {e}"),
        )]),
    }
}

/// Pretty, deterministic rendering of a scenario.
pub fn serialize_scenario(file: &ScenarioFile) -> String {
    let mut text = serde_json::to_string_pretty(file).expect("scenario serializes");
    text.push('\n');
    text
}

/// Why a scenario could not be turned into a model.
#[derive(Debug, Clone, PartialEq)]
pub enum BuildError {
    /// The document is malformed or fails validation.
    Invalid(Vec<Diagnostic>),
    /// Template expansion, automaton construction or composition failed.
    Composition(String),
}

impl fmt::Display for BuildError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BuildError::Invalid(diags) => f.write_str(render_diagnostics(diags).trim_end()),
            BuildError::Composition(message) => write!(f, "composition failed: {message}"),
        }
    }
}

impl std::error::Error for BuildError {}

/// Parses, compiles and composes a scenario, then applies its option
/// failures. Returns the model and the defaults to store alongside it.
pub fn build_model(bytes: &[u8]) -> Result<(EnvironmentModel, model_file::ModelDefaults), BuildError> {
    let file = parse_scenario_bytes(bytes).map_err(BuildError::Invalid)?;
    let compiled =
        compile(&file).map_err(|diags| BuildError::Composition(render_diagnostics(&diags).trim_end().to_string()))?;
    let mut model =
        build_environment(&compiled.agents, &compiled.inter).map_err(|e| BuildError::Composition(e.to_string()))?;
    for failure in &compiled.failures {
        model = inject_failure(&model, failure)
            .map_err(|e| BuildError::Composition(format!("failure injection: {e}")))?
            .model;
    }
    let defaults = model_file::ModelDefaults::new(compiled.initial, &compiled.task, compiled.solver);
    Ok((model, defaults))
}
