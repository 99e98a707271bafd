//! Semantic validation, template expansion and compilation of scenarios.

use std::collections::{BTreeMap, BTreeSet};

use crate::automata::{make_nfa, validate_label, CompositeState, Epsilon0Nfa, EventId, Label, NfaParts, Projector};
use crate::model::{AgentSpec, FailureEvent, InterAgentSpec};
use crate::planner::{Solver, TaskSpecification};

use super::{
    AgentDecl, AutomatonDecl, Diagnostic, DiagnosticCode as Code, InterTransitionDecl, JsonPath, ScenarioFile,
    TemplateKind,
};

/// Default cap on the number of events generated by template expansion.
pub const DEFAULT_EXPANSION_CAP: usize = 100_000;

/// Output of [`compile`]: everything needed to build and plan.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub agents: Vec<AgentSpec>,
    pub inter: InterAgentSpec,
    pub initial: CompositeState,
    pub task: TaskSpecification,
    pub solver: Solver,
    /// Failures to inject after the model is composed.
    pub failures: Vec<FailureEvent>,
}

#[derive(Default)]
struct Ctx {
    diags: Vec<(Diagnostic, JsonPath)>,
}

impl Ctx {
    fn push(&mut self, code: Code, path: JsonPath, message: impl Into<String>) {
        self.diags.push((Diagnostic::new(code, &path, message), path));
    }

    fn label(&mut self, label: &str, path: JsonPath) -> bool {
        if validate_label(label).is_err() {
            self.push(
                Code::InvalidLabel,
                path,
                format!("invalid state label {label:?}: labels must be non-empty and may not contain '|'"),
            );
            return false;
        }
        true
    }

    fn cost(&mut self, cost: Option<f64>, path: JsonPath) {
        if let Some(c) = cost {
            if !(c.is_finite() && c > 0.0) {
                self.push(
                    Code::NonPositiveCost,
                    path,
                    format!("cost {c} must be finite and strictly positive"),
                );
            }
        }
    }
}

fn valid_agent_id(id: &str) -> bool {
    !id.is_empty() && !id.contains(['.', '|', '=', ',']) && id != EventId::INTER && id != EventId::VIRTUAL
}

/// States of an automaton declaration: explicit states or the endpoints.
fn decl_states(decl: &AutomatonDecl) -> BTreeSet<String> {
    match &decl.states {
        Some(states) => states.iter().cloned().collect(),
        None => decl
            .transitions
            .iter()
            .flat_map(|t| [t.from.clone(), t.to.clone()])
            .collect(),
    }
}

/// Sorted atomic alphabet of each agent: the union of its capability states.
pub(crate) fn alphabets(file: &ScenarioFile) -> Vec<BTreeSet<String>> {
    file.agents
        .iter()
        .map(|a| a.capabilities.iter().flat_map(decl_states).collect())
        .collect()
}

fn check_decl(ctx: &mut Ctx, decl: &AutomatonDecl, path: &JsonPath, alphabet: Option<&BTreeSet<String>>) {
    let declared = decl_states(decl);
    if let Some(states) = &decl.states {
        for (i, s) in states.iter().enumerate() {
            let p = path.key("states").index(i);
            if ctx.label(s, p.clone()) && alphabet.is_some_and(|a| !a.contains(s)) {
                ctx.push(
                    Code::UnknownReference,
                    p,
                    format!("state {s:?} is not in the agent's alphabet"),
                );
            }
        }
    }
    if let Some(marked) = &decl.marked {
        for (i, s) in marked.iter().enumerate() {
            if !declared.contains(s) {
                ctx.push(
                    Code::UnknownReference,
                    path.key("marked").index(i),
                    format!("marked state {s:?} is not a state of this automaton"),
                );
            }
        }
    }
    let mut endpoints: BTreeMap<&str, (&str, &str)> = BTreeMap::new();
    for (k, t) in decl.transitions.iter().enumerate() {
        let tp = path.key("transitions").index(k);
        for (field, s) in [("from", &t.from), ("to", &t.to)] {
            if !ctx.label(s, tp.key(field)) {
                continue;
            }
            if decl.states.is_some() && !declared.contains(s) {
                ctx.push(
                    Code::UnknownReference,
                    tp.key(field),
                    format!("state {s:?} is not declared"),
                );
            } else if alphabet.is_some_and(|a| !a.contains(s)) {
                ctx.push(
                    Code::UnknownReference,
                    tp.key(field),
                    format!("state {s:?} is not in the agent's alphabet"),
                );
            }
        }
        if t.event.is_empty() {
            ctx.push(Code::InvalidLabel, tp.key("event"), "event names must be non-empty");
        }
        ctx.cost(t.cost, tp.key("cost"));
        match endpoints.get(t.event.as_str()) {
            Some(&(f, to)) if (f, to) != (t.from.as_str(), t.to.as_str()) => ctx.push(
                Code::DuplicateEvent,
                tp.key("event"),
                format!("event {:?} is already used for {f} -> {to}", t.event),
            ),
            Some(_) => {}
            None => {
                endpoints.insert(&t.event, (&t.from, &t.to));
            }
        }
    }
}

struct EventInfo<'a> {
    decl: usize,
    from: &'a str,
    to: &'a str,
    cost: Option<f64>,
}

fn check_agent(ctx: &mut Ctx, agent: &AgentDecl, path: &JsonPath, alphabet: &BTreeSet<String>) {
    let mut caps: BTreeMap<&str, EventInfo> = BTreeMap::new();
    for (m, decl) in agent.capabilities.iter().enumerate() {
        let dp = path.key("capabilities").index(m);
        check_decl(ctx, decl, &dp, None);
        for (k, t) in decl.transitions.iter().enumerate() {
            let tp = dp.key("transitions").index(k);
            match caps.get_mut(t.event.as_str()) {
                None => {
                    caps.insert(
                        &t.event,
                        EventInfo {
                            decl: m,
                            from: &t.from,
                            to: &t.to,
                            cost: t.cost,
                        },
                    );
                }
                Some(info) => {
                    if (info.from, info.to) != (t.from.as_str(), t.to.as_str()) && info.decl != m {
                        ctx.push(
                            Code::DuplicateEvent,
                            tp.key("event"),
                            format!("event {:?} is already used for {} -> {}", t.event, info.from, info.to),
                        );
                    }
                    match (info.cost, t.cost) {
                        (Some(a), Some(b)) if a != b => ctx.push(
                            Code::DuplicateEvent,
                            tp.key("cost"),
                            format!("event {:?} already has cost {a}", t.event),
                        ),
                        (None, Some(b)) => info.cost = Some(b),
                        _ => {}
                    }
                }
            }
        }
    }
    for (m, decl) in agent.capabilities.iter().enumerate() {
        for (k, t) in decl.transitions.iter().enumerate() {
            if caps[t.event.as_str()].cost.is_none() && t.cost.is_none() {
                ctx.push(
                    Code::MissingCost,
                    path.key("capabilities").index(m).key("transitions").index(k),
                    format!("event {:?} has no cost", t.event),
                );
            }
        }
    }
    for section in ["failures", "constraints"] {
        let decls = if section == "failures" {
            &agent.failures
        } else {
            &agent.constraints
        };
        for (m, decl) in decls.iter().enumerate() {
            let dp = path.key(section).index(m);
            check_decl(ctx, decl, &dp, Some(alphabet));
            if section == "failures" && decl.transitions.len() != 1 {
                ctx.push(
                    Code::InvalidAutomaton,
                    dp.key("transitions"),
                    "a failure mode names exactly one transition",
                );
            }
            for (k, t) in decl.transitions.iter().enumerate() {
                let inherited = caps.get(t.event.as_str()).and_then(|i| i.cost);
                if t.cost.is_none() && inherited.is_none() {
                    ctx.push(
                        Code::MissingCost,
                        dp.key("transitions").index(k),
                        format!("event {:?} has no cost and no capability declares one", t.event),
                    );
                }
            }
        }
    }
}

fn check_assignment(
    ctx: &mut Ctx,
    map: &BTreeMap<String, String>,
    expected: &[&str],
    ids: &[String],
    alphabets: &[BTreeSet<String>],
    path: JsonPath,
) {
    for (agent, label) in map {
        match ids.iter().position(|id| id == agent) {
            Some(slot) if expected.contains(&agent.as_str()) => {
                if !alphabets[slot].contains(label) {
                    ctx.push(
                        Code::UnknownReference,
                        path.key(agent),
                        format!("agent {agent} has no state {label:?}"),
                    );
                }
            }
            _ => ctx.push(
                Code::UnknownReference,
                path.key(agent),
                format!("unexpected agent {agent:?}"),
            ),
        }
    }
    for agent in expected {
        if !map.contains_key(*agent) {
            ctx.push(
                Code::SchemaError,
                path.clone(),
                format!("missing state for agent {agent}"),
            );
        }
    }
}

/// Semantic checks on a schema-valid scenario. Each diagnostic is paired
/// with the JSON path it refers to.
pub fn validate(file: &ScenarioFile) -> Vec<(Diagnostic, JsonPath)> {
    let mut ctx = Ctx::default();
    let root = JsonPath::root();
    if file.agents.is_empty() {
        ctx.push(Code::SchemaError, root.key("agents"), "at least one agent is required");
        return ctx.diags;
    }
    let ids: Vec<String> = file.agents.iter().map(|a| a.id.clone()).collect();
    let id_refs: Vec<&str> = ids.iter().map(String::as_str).collect();
    let mut seen = BTreeSet::new();
    for (i, id) in ids.iter().enumerate() {
        let p = root.key("agents").index(i).key("id");
        if !valid_agent_id(id) {
            ctx.push(
                Code::InvalidLabel,
                p,
                format!("invalid agent id {id:?}: ids must be non-empty, avoid '.', '|', '=', ',' and the reserved names inter/virtual"),
            );
        } else if !seen.insert(id.as_str()) {
            ctx.push(Code::DuplicateAgent, p, format!("agent {id} is declared twice"));
        }
    }
    let alphabets = alphabets(file);
    for (i, agent) in file.agents.iter().enumerate() {
        let p = root.key("agents").index(i);
        if alphabets[i].is_empty() {
            ctx.push(
                Code::SchemaError,
                p.key("capabilities"),
                format!("agent {} has no states", agent.id),
            );
        }
        check_agent(&mut ctx, agent, &p, &alphabets[i]);
    }

    // Inter-agent transitions.
    let mut inter_events: BTreeMap<&str, (&InterTransitionDecl, Option<f64>)> = BTreeMap::new();
    for section in ["capabilities", "constraints"] {
        let list = if section == "capabilities" {
            &file.inter.capabilities
        } else {
            &file.inter.constraints
        };
        for (k, t) in list.iter().enumerate() {
            let p = root.key("inter").key(section).index(k);
            check_assignment(&mut ctx, &t.from, &id_refs, &ids, &alphabets, p.key("from"));
            check_assignment(&mut ctx, &t.to, &id_refs, &ids, &alphabets, p.key("to"));
            if t.event.is_empty() {
                ctx.push(Code::InvalidLabel, p.key("event"), "event names must be non-empty");
            }
            ctx.cost(t.cost, p.key("cost"));
            match inter_events.get_mut(t.event.as_str()) {
                Some((first, cost)) => {
                    if (&first.from, &first.to) != (&t.from, &t.to) {
                        ctx.push(
                            Code::DuplicateEvent,
                            p.key("event"),
                            format!("event {:?} is already used with other endpoints", t.event),
                        );
                    }
                    match (*cost, t.cost) {
                        (Some(a), Some(b)) if a != b => ctx.push(
                            Code::DuplicateEvent,
                            p.key("cost"),
                            format!("event {:?} already has cost {a}", t.event),
                        ),
                        (None, Some(b)) => *cost = Some(b),
                        _ => {}
                    }
                }
                None => {
                    inter_events.insert(&t.event, (t, t.cost));
                }
            }
        }
    }
    for (k, t) in file
        .inter
        .capabilities
        .iter()
        .chain(&file.inter.constraints)
        .enumerate()
    {
        if t.cost.is_none() && inter_events.get(t.event.as_str()).is_none_or(|(_, c)| c.is_none()) {
            let (section, idx) = if k < file.inter.capabilities.len() {
                ("capabilities", k)
            } else {
                ("constraints", k - file.inter.capabilities.len())
            };
            ctx.push(
                Code::MissingCost,
                root.key("inter").key(section).index(idx),
                format!("inter-agent event {:?} has no cost", t.event),
            );
        }
    }

    let mut template_costs: BTreeMap<&str, f64> = BTreeMap::new();
    for t in &file.inter.templates {
        if let (TemplateKind::Capability, Some(c)) = (t.kind, t.cost) {
            template_costs.entry(&t.event).or_insert(c);
        }
    }
    for (k, t) in file.inter.templates.iter().enumerate() {
        let p = root.key("inter").key("templates").index(k);
        let members: Vec<&str> = t.members.iter().map(String::as_str).collect();
        let mut unique = BTreeSet::new();
        if members.is_empty() {
            ctx.push(
                Code::SchemaError,
                p.key("members"),
                "a template needs at least one member",
            );
        }
        for (m, member) in members.iter().enumerate() {
            if !ids.iter().any(|id| id == member) {
                ctx.push(
                    Code::UnknownReference,
                    p.key("members").index(m),
                    format!("unknown agent {member:?}"),
                );
            } else if !unique.insert(*member) {
                ctx.push(
                    Code::SchemaError,
                    p.key("members").index(m),
                    format!("agent {member} listed twice"),
                );
            }
        }
        check_assignment(&mut ctx, &t.from, &members, &ids, &alphabets, p.key("from"));
        check_assignment(&mut ctx, &t.to, &members, &ids, &alphabets, p.key("to"));
        if t.event.is_empty() {
            ctx.push(Code::InvalidLabel, p.key("event"), "event names must be non-empty");
        }
        ctx.cost(t.cost, p.key("cost"));
        if t.cost.is_none() && !template_costs.contains_key(t.event.as_str()) {
            ctx.push(
                Code::MissingCost,
                p.clone(),
                format!("template event {:?} has no cost", t.event),
            );
        }
    }

    check_assignment(&mut ctx, &file.initial, &id_refs, &ids, &alphabets, root.key("initial"));

    let tp = root.key("task");
    match Projector::parse(&file.task.projector) {
        None => ctx.push(
            Code::InvalidTask,
            tp.key("projector"),
            "projector must be a non-empty string of 0 and 1",
        ),
        Some(b) if b.len() != ids.len() => ctx.push(
            Code::InvalidTask,
            tp.key("projector"),
            format!("projector has {} bits but there are {} agents", b.len(), ids.len()),
        ),
        Some(b) if b.count_ones() == 0 => {
            ctx.push(Code::InvalidTask, tp.key("projector"), "projector selects no agent")
        }
        Some(b) if b.count_ones() != file.task.target.len() => ctx.push(
            Code::InvalidTask,
            tp.key("target"),
            format!(
                "projector selects {} agents but {} targets are given",
                b.count_ones(),
                file.task.target.len()
            ),
        ),
        Some(b) => {
            for (k, (slot, label)) in b.set_slots().zip(&file.task.target).enumerate() {
                if !alphabets[slot].contains(label) {
                    ctx.push(
                        Code::UnknownReference,
                        tp.key("target").index(k),
                        format!("agent {} has no state {label:?}", ids[slot]),
                    );
                }
            }
        }
    }

    for (k, f) in file.options.failures.iter().enumerate() {
        let p = root.key("options").key("failures").index(k);
        if f.agent == EventId::INTER {
            if f.event.is_none() {
                ctx.push(Code::SchemaError, p.clone(), "inter-agent failures must name the event");
            }
            for (field, text) in [("from", &f.from), ("to", &f.to)] {
                let x = CompositeState::parse(text);
                let ok = x.arity() == ids.len() && x.components().iter().zip(&alphabets).all(|(l, a)| a.contains(&**l));
                if !ok {
                    ctx.push(
                        Code::UnknownReference,
                        p.key(field),
                        format!("{text:?} is not a composite state of the model"),
                    );
                }
            }
        } else {
            match ids.iter().position(|id| *id == f.agent) {
                None => ctx.push(
                    Code::UnknownReference,
                    p.key("agent"),
                    format!("unknown agent {:?}", f.agent),
                ),
                Some(slot) => {
                    for (field, label) in [("from", &f.from), ("to", &f.to)] {
                        if !alphabets[slot].contains(label) {
                            ctx.push(
                                Code::UnknownReference,
                                p.key(field),
                                format!("agent {} has no state {label:?}", f.agent),
                            );
                        }
                    }
                }
            }
        }
    }
    ctx.diags
}

/// Expands every inter-agent template into concrete full-arity transitions,
/// one uniquely named event per state combination of the non-member agents
/// (e.g. `load.A[R2=Ψ]`). Templates over all agents expand to themselves.
pub fn expand_inter_templates(file: &ScenarioFile) -> Result<ScenarioFile, Diagnostic> {
    let cap = file.options.expansion_cap.unwrap_or(DEFAULT_EXPANSION_CAP);
    let ids: Vec<&str> = file.agents.iter().map(|a| a.id.as_str()).collect();
    let alphabets = alphabets(file);
    let templates_path = JsonPath::root().key("inter").key("templates");

    let mut needed: usize = 0;
    for t in &file.inter.templates {
        let count = ids
            .iter()
            .zip(&alphabets)
            .filter(|(id, _)| !t.members.iter().any(|m| m == *id))
            .try_fold(1usize, |acc, (_, a)| acc.checked_mul(a.len()))
            .unwrap_or(usize::MAX);
        needed = needed.saturating_add(count);
    }
    if needed > cap {
        return Err(Diagnostic::new(
            Code::ExpansionBlowup,
            &templates_path,
            format!("template expansion needs {needed} events, above the cap of {cap}"),
        ));
    }

    let mut template_costs: BTreeMap<&str, f64> = BTreeMap::new();
    for t in &file.inter.templates {
        if let (TemplateKind::Capability, Some(c)) = (t.kind, t.cost) {
            template_costs.entry(&t.event).or_insert(c);
        }
    }

    let mut out = file.clone();
    out.inter.templates.clear();
    for (k, t) in file.inter.templates.iter().enumerate() {
        for m in &t.members {
            if !ids.contains(&m.as_str()) {
                return Err(Diagnostic::new(
                    Code::UnknownReference,
                    &templates_path.index(k).key("members"),
                    format!("unknown agent {m:?}"),
                ));
            }
        }
        let context: Vec<(&str, Vec<&String>)> = ids
            .iter()
            .zip(&alphabets)
            .filter(|(id, _)| !t.members.iter().any(|m| m == *id))
            .map(|(id, a)| (*id, a.iter().collect()))
            .collect();
        let cost = t.cost.or_else(|| template_costs.get(t.event.as_str()).copied());
        // Odometer over the context agents' alphabets, last agent fastest.
        let mut digits = vec![0usize; context.len()];
        if context.iter().any(|(_, a)| a.is_empty()) {
            continue;
        }
        loop {
            let mut from = t.from.clone();
            let mut to = t.to.clone();
            let mut tags = Vec::with_capacity(context.len());
            for ((agent, alphabet), &d) in context.iter().zip(&digits) {
                from.insert(agent.to_string(), alphabet[d].clone());
                to.insert(agent.to_string(), alphabet[d].clone());
                tags.push(format!("{agent}={}", alphabet[d]));
            }
            let event = if tags.is_empty() {
                t.event.clone()
            } else {
                format!("{}[{}]", t.event, tags.join(","))
            };
            let decl = InterTransitionDecl { from, event, to, cost };
            match t.kind {
                TemplateKind::Capability => out.inter.capabilities.push(decl),
                TemplateKind::Constraint => out.inter.constraints.push(decl),
            }
            let mut done = true;
            for pos in (0..digits.len()).rev() {
                digits[pos] += 1;
                if digits[pos] < context[pos].1.len() {
                    done = false;
                    break;
                }
                digits[pos] = 0;
            }
            if done {
                break;
            }
        }
    }
    Ok(out)
}

fn invalid(path: &JsonPath, err: impl std::fmt::Display) -> Diagnostic {
    Diagnostic::new(Code::InvalidAutomaton, path, err.to_string())
}

fn build_agent_decl(
    id: &str,
    decl: &AutomatonDecl,
    costs: &BTreeMap<&str, f64>,
    marked_by_default: bool,
    path: &JsonPath,
) -> Result<Epsilon0Nfa, Diagnostic> {
    let states: BTreeSet<CompositeState> = decl_states(decl).iter().map(|s| CompositeState::atomic(s)).collect();
    let marked = match &decl.marked {
        Some(m) => m.iter().map(|s| CompositeState::atomic(s)).collect(),
        None if marked_by_default => states.clone(),
        None => BTreeSet::new(),
    };
    let mut parts = NfaParts {
        slots: vec![id.to_string()],
        states,
        marked,
        ..NfaParts::default()
    };
    for t in &decl.transitions {
        let e = EventId::new(id, &t.event);
        let cost = t
            .cost
            .or_else(|| costs.get(t.event.as_str()).copied())
            .ok_or_else(|| invalid(path, format!("event {e} has no cost")))?;
        parts.events.insert(e.clone());
        parts.costs.entry(e.clone()).or_insert(cost);
        parts
            .transitions
            .push((CompositeState::atomic(&t.from), e, CompositeState::atomic(&t.to)));
    }
    make_nfa(parts).map_err(|e| invalid(path, e))
}

fn build_inter(
    ids: &[String],
    list: &[InterTransitionDecl],
    costs: &BTreeMap<&str, f64>,
    path: &JsonPath,
) -> Result<Epsilon0Nfa, Diagnostic> {
    let tuple = |m: &BTreeMap<String, String>| CompositeState::new(ids.iter().map(|id| m[id].as_str()));
    let mut parts = NfaParts {
        slots: ids.to_vec(),
        ..NfaParts::default()
    };
    for t in list {
        let (x, y) = (tuple(&t.from), tuple(&t.to));
        let e = EventId::inter(&t.event);
        let cost = t
            .cost
            .or_else(|| costs.get(t.event.as_str()).copied())
            .ok_or_else(|| invalid(path, format!("event {e} has no cost")))?;
        parts.states.insert(x.clone());
        parts.states.insert(y.clone());
        parts.events.insert(e.clone());
        parts.costs.entry(e.clone()).or_insert(cost);
        parts.transitions.push((x, e, y));
    }
    make_nfa(parts).map_err(|e| invalid(path, e))
}

/// Validates, expands templates and converts a scenario into model inputs.
pub fn compile(file: &ScenarioFile) -> Result<Compiled, Vec<Diagnostic>> {
    let diags = validate(file);
    if !diags.is_empty() {
        return Err(diags.into_iter().map(|(d, _)| d).collect());
    }
    let file = expand_inter_templates(file).map_err(|d| vec![d])?;
    let ids: Vec<String> = file.agents.iter().map(|a| a.id.clone()).collect();
    let root = JsonPath::root();

    let mut agents = Vec::with_capacity(file.agents.len());
    for (i, decl) in file.agents.iter().enumerate() {
        let p = root.key("agents").index(i);
        let mut costs: BTreeMap<&str, f64> = BTreeMap::new();
        for t in decl.capabilities.iter().flat_map(|c| &c.transitions) {
            if let Some(c) = t.cost {
                costs.entry(&t.event).or_insert(c);
            }
        }
        let mut spec = AgentSpec::new(&decl.id);
        for (m, c) in decl.capabilities.iter().enumerate() {
            spec.capabilities.push(
                build_agent_decl(&decl.id, c, &costs, true, &p.key("capabilities").index(m)).map_err(|d| vec![d])?,
            );
        }
        for (m, c) in decl.failures.iter().enumerate() {
            spec.failures
                .push(build_agent_decl(&decl.id, c, &costs, false, &p.key("failures").index(m)).map_err(|d| vec![d])?);
        }
        for (m, c) in decl.constraints.iter().enumerate() {
            spec.constraints.push(
                build_agent_decl(&decl.id, c, &costs, false, &p.key("constraints").index(m)).map_err(|d| vec![d])?,
            );
        }
        agents.push(spec);
    }

    let mut inter_costs: BTreeMap<&str, f64> = BTreeMap::new();
    for t in file.inter.capabilities.iter().chain(&file.inter.constraints) {
        if let Some(c) = t.cost {
            inter_costs.entry(&t.event).or_insert(c);
        }
    }
    let inter = InterAgentSpec {
        member_ids: ids.clone(),
        capabilities: build_inter(
            &ids,
            &file.inter.capabilities,
            &inter_costs,
            &root.key("inter").key("capabilities"),
        )
        .map_err(|d| vec![d])?,
        constraints: build_inter(
            &ids,
            &file.inter.constraints,
            &inter_costs,
            &root.key("inter").key("constraints"),
        )
        .map_err(|d| vec![d])?,
    };

    let initial = CompositeState::new(ids.iter().map(|id| file.initial[id].as_str()));
    let projector = Projector::parse(&file.task.projector).expect("validated projector");
    let target = file.task.target.iter().map(|t| Label::from(t.as_str())).collect();
    let task = TaskSpecification::new(projector, target)
        .map_err(|e| vec![Diagnostic::new(Code::InvalidTask, &root.key("task"), e.to_string())])?;
    let failures = file
        .options
        .failures
        .iter()
        .map(|f| FailureEvent {
            agent_id: f.agent.clone(),
            from: f.from.clone(),
            to: f.to.clone(),
            event: f.event.clone(),
        })
        .collect();

    Ok(Compiled {
        agents,
        inter,
        initial,
        task,
        solver: file.options.solver,
        failures,
    })
}
