//! Acceptance run: prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use specter::automata::{CompositeState, EventId, NfaBuilder};
use specter::model::{build_environment, inject_failure, AgentSpec, EnvironmentModel, FailureEvent};
use specter::oracle::random::{random_scenario, RandomParams, RandomScenario};
use specter::oracle::{brute_force_shortest, enumerate_goal_states, goal_count_law, OracleError};
use specter::planner::{check_chain, replay, PlanError, PlanResult, Planner, TaskSpecification};
use specter::scenario::build_model;
use specter::Epsilon0Nfa;

const OPTIMALITY_RUNS: u64 = 500;
const COMPLETENESS_RUNS: u64 = 500;
const INJECTION_RUNS: u64 = 200;
const TIMING_RUNS: usize = 20;

type Outcome = Result<String, String>;

/// Counts every chain checked for well-formedness along the way.
#[derive(Default)]
struct ChainAudit {
    checked: usize,
    failures: Vec<String>,
}

impl ChainAudit {
    fn check(
        &mut self,
        label: &str,
        env: &EnvironmentModel,
        x0: &CompositeState,
        task: &TaskSpecification,
        r: &PlanResult,
    ) {
        self.checked += 1;
        let chain = &r.chain;
        let mut problems = Vec::new();
        if !check_chain(chain) {
            problems.push("check_chain rejects it".to_string());
        }
        let t0 = &chain.task_module_inverted;
        if t0.e != EventId::task_event() || t0.p != r.goal_state || t0.q != *x0 || chain.initial() != x0 {
            problems.push("does not close through the inverted task module".to_string());
        }
        match replay(env, chain) {
            Ok(end) if task.is_satisfied_by(&end) => {}
            Ok(end) => problems.push(format!("replay ends in {end}, which misses the task")),
            Err(e) => problems.push(format!("replay fails: {e}")),
        }
        let sum: f64 = chain.modules.iter().map(|m| m.cost).fold(0.0, |a, c| a + c);
        if sum != r.cost {
            problems.push(format!("cost {} differs from module sum {sum}", r.cost));
        }
        if !problems.is_empty() {
            self.failures.push(format!("{label}: {}", problems.join("; ")));
        }
    }
}

fn case_study_path() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/case_study_1.json")
}

fn case_study() -> Result<(EnvironmentModel, CompositeState, TaskSpecification), String> {
    let bytes = std::fs::read(case_study_path()).map_err(|e| format!("cannot read the bundled scenario: {e}"))?;
    let (model, defaults) = build_model(&bytes).map_err(|e| e.to_string())?;
    let task = defaults.task_spec()?;
    Ok((model, defaults.initial, task))
}

fn r2_failure() -> FailureEvent {
    FailureEvent {
        agent_id: "R2".into(),
        from: "Ψ".into(),
        to: "A".into(),
        event: None,
    }
}

fn criterion_1() -> Outcome {
    let started = Instant::now();
    let (env, _, _) = case_study()?;
    let elapsed = started.elapsed();
    if env.state_count() != 560 || env.theta() != 560 {
        return Err(format!(
            "{} states (θ = {}), expected 560",
            env.state_count(),
            env.theta()
        ));
    }
    if elapsed >= Duration::from_secs(5) {
        return Err(format!("build took {elapsed:?}"));
    }
    Ok(format!("560 composite states in {:.3} s", elapsed.as_secs_f64()))
}

fn criterion_2(audit: &mut ChainAudit) -> Outcome {
    let (env, x0, task) = case_study()?;
    let env = inject_failure(&env, &r2_failure()).map_err(|e| e.to_string())?.model;
    let planner = Planner::new(&env);
    let complete = planner.complete(&x0, &task).map_err(|e| format!("complete: {e}"))?;
    let heuristic = planner.heuristic(&x0, &task).map_err(|e| format!("heuristic: {e}"))?;
    audit.check("case study complete", &env, &x0, &task, &complete);
    audit.check("case study heuristic", &env, &x0, &task, &heuristic);

    if complete.chain.modules != heuristic.chain.modules {
        return Err("complete and heuristic chains differ".into());
    }
    let events: Vec<&EventId> = complete.chain.events().collect();
    if events.len() != 6 {
        return Err(format!("{} modules, expected 6", events.len()));
    }
    let pattern = [
        ("R1", "navigate."),
        ("W1", "move."),
        ("inter", "load."),
        ("R1", "navigate."),
        ("W1", "move."),
        ("inter", "unload."),
    ];
    for (i, (e, (ns, prefix))) in events.iter().zip(pattern).enumerate() {
        if e.namespace() != ns || !e.name().starts_with(prefix) {
            return Err(format!("module {} is {e}, expected {ns}.{prefix}*", i + 1));
        }
    }
    if let Some(e) = events
        .iter()
        .find(|e| e.namespace() == "R2" || e.name().contains(".R2."))
    {
        return Err(format!("plan uses the failed robot R2 ({e})"));
    }
    let analytic: f64 = events
        .iter()
        .map(|e| env.automaton().cost(e).expect("declared cost"))
        .sum();
    if complete.cost != analytic || heuristic.cost != analytic {
        return Err(format!("cost {} vs declared sum {analytic}", complete.cost));
    }
    if analytic != 55.0 {
        return Err(format!(
            "declared costs sum to {analytic}, the bundled calibration expects 55"
        ));
    }
    Ok(format!(
        "6 modules [{}], identical for both solvers, cost 55",
        events.iter().map(|e| e.to_string()).collect::<Vec<_>>().join(", ")
    ))
}

fn criterion_3() -> Outcome {
    let (env, _, task) = case_study()?;
    let goals = enumerate_goal_states(&env, &task);
    let sizes: Vec<usize> = env.alphabets().iter().map(Vec::len).collect();
    let law = goal_count_law(&sizes, task.projector.bits());
    if goals.len() != 80 || law != 80 {
        return Err(format!("{} goal states (law {law}), expected 80", goals.len()));
    }
    Ok("80 goal states".into())
}

fn oracle_goal<'a>(env: &'a EnvironmentModel, task: &'a TaskSpecification) -> impl Fn(&CompositeState) -> bool + 'a {
    move |x| env.automaton().is_marked(x) && task.is_satisfied_by(x)
}

/// Criteria 4 and 7 share the same random runs.
fn criteria_4_and_7(audit: &mut ChainAudit) -> (Outcome, Outcome) {
    let started = Instant::now();
    let params = RandomParams::default();
    let mut solved = 0;
    let mut heuristic_solved = 0;
    let mut heuristic_strictly_worse = 0;
    let mut optimality = Vec::new();
    let mut dominance = Vec::new();
    for seed in 0..OPTIMALITY_RUNS {
        let s = random_scenario(seed, &params);
        let env = match s.build() {
            Ok(env) => env,
            Err(e) => {
                optimality.push(format!("seed {seed}: build failed: {e}"));
                continue;
            }
        };
        if env.automaton().marked().len() != env.state_count() {
            optimality.push(format!("seed {seed}: not fully marked"));
        }
        let planner = Planner::new(&env);
        let complete = planner.complete(&s.initial, &s.task);
        let oracle = brute_force_shortest(&env, &s.initial, oracle_goal(&env, &s.task), None);
        match (&complete, &oracle) {
            (Ok(r), Ok((_, cost))) => {
                solved += 1;
                audit.check(&format!("seed {seed} complete"), &env, &s.initial, &s.task, r);
                if r.cost != *cost {
                    optimality.push(format!("seed {seed}: planner {} vs oracle {cost}", r.cost));
                }
            }
            (Err(PlanError::TaskInfeasible(_) | PlanError::NoGoalStates), Err(OracleError::NoPath)) => {}
            (c, o) => optimality.push(format!("seed {seed}: planner {c:?} vs oracle {o:?}")),
        }
        if let Ok(h) = planner.heuristic(&s.initial, &s.task) {
            heuristic_solved += 1;
            audit.check(&format!("seed {seed} heuristic"), &env, &s.initial, &s.task, &h);
            match &complete {
                Ok(c) if h.cost >= c.cost => {
                    if h.cost > c.cost {
                        heuristic_strictly_worse += 1;
                    }
                }
                Ok(c) => dominance.push(format!("seed {seed}: heuristic {} < complete {}", h.cost, c.cost)),
                Err(e) => dominance.push(format!("seed {seed}: heuristic succeeded but complete failed: {e}")),
            }
        }
    }
    let elapsed = started.elapsed();
    if elapsed >= Duration::from_secs(60) {
        optimality.push(format!("suite took {elapsed:?}"));
    }

    let cs = (|| -> Result<(), String> {
        let (env, x0, task) = case_study()?;
        let env = inject_failure(&env, &r2_failure()).map_err(|e| e.to_string())?.model;
        let planner = Planner::new(&env);
        let c = planner.complete(&x0, &task).map_err(|e| e.to_string())?;
        let h = planner.heuristic(&x0, &task).map_err(|e| e.to_string())?;
        if c.cost != h.cost {
            return Err(format!("case study: heuristic {} vs complete {}", h.cost, c.cost));
        }
        Ok(())
    })();
    if let Err(e) = cs {
        dominance.push(e);
    }

    let c4 = if optimality.is_empty() {
        Ok(format!(
            "{OPTIMALITY_RUNS} scenarios, {solved} solvable, all costs equal the oracle ({:.1} s)",
            elapsed.as_secs_f64()
        ))
    } else {
        Err(summarize(&optimality))
    };
    let c7 = if dominance.is_empty() {
        Ok(format!(
            "{heuristic_solved} heuristic successes, none cheaper than complete ({heuristic_strictly_worse} strictly costlier); case study equal"
        ))
    } else {
        Err(summarize(&dominance))
    };
    (c4, c7)
}

fn event_set(nfa: &Epsilon0Nfa) -> BTreeSet<EventId> {
    nfa.events().cloned().collect()
}

/// (⋃ M ∪ 𝒦_A) \ ((⋃ F \ 𝒦_A) ∪ ⋃ N ∪ 𝒟_A).
fn closed_form_events(s: &RandomScenario) -> BTreeSet<EventId> {
    let union = |sets: Vec<BTreeSet<EventId>>| sets.into_iter().flatten().collect::<BTreeSet<_>>();
    let capabilities = union(
        s.agents
            .iter()
            .flat_map(|a| a.capabilities.iter().map(event_set))
            .collect(),
    );
    let failures = union(s.agents.iter().flat_map(|a| a.failures.iter().map(event_set)).collect());
    let constraints = union(
        s.agents
            .iter()
            .flat_map(|a| a.constraints.iter().map(event_set))
            .collect(),
    );
    let inter_capabilities = event_set(&s.inter.capabilities);
    let inter_constraints = event_set(&s.inter.constraints);

    let removed: BTreeSet<EventId> = failures
        .difference(&inter_capabilities)
        .cloned()
        .chain(constraints)
        .chain(inter_constraints)
        .collect();
    capabilities
        .union(&inter_capabilities)
        .filter(|e| !removed.contains(*e))
        .cloned()
        .collect()
}

fn criterion_5() -> Outcome {
    let params = RandomParams::default();
    let mut problems = Vec::new();
    let mut events = 0;
    for seed in 0..COMPLETENESS_RUNS {
        let s = random_scenario(1_000_000 + seed, &params);
        match s.build() {
            Ok(env) => {
                let actual = event_set(env.automaton());
                let expected = closed_form_events(&s);
                events += actual.len();
                if actual != expected {
                    problems.push(format!(
                        "seed {seed}: extra {:?}, missing {:?}",
                        actual.difference(&expected).collect::<Vec<_>>(),
                        expected.difference(&actual).collect::<Vec<_>>()
                    ));
                }
                if env.state_count() != env.theta() {
                    problems.push(format!(
                        "seed {seed}: {} states, θ = {}",
                        env.state_count(),
                        env.theta()
                    ));
                }
            }
            Err(e) => problems.push(format!("seed {seed}: build failed: {e}")),
        }
    }
    if problems.is_empty() {
        Ok(format!(
            "{COMPLETENESS_RUNS} compositions, {events} events, all equal to the closed form"
        ))
    } else {
        Err(summarize(&problems))
    }
}

fn transition_set(env: &EnvironmentModel) -> BTreeSet<(CompositeState, EventId, CompositeState)> {
    env.automaton()
        .transitions()
        .map(|(x, e, y)| (x.clone(), e.clone(), y.clone()))
        .collect()
}

fn criterion_6() -> Outcome {
    let params = RandomParams::default();
    let mut problems = Vec::new();
    let mut removed_total = 0;
    for seed in 0..INJECTION_RUNS {
        let s = random_scenario(2_000_000 + seed, &params);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let candidates: Vec<(usize, CompositeState, EventId, CompositeState, f64)> = s
            .agents
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                a.capabilities.iter().flat_map(move |m| {
                    m.transitions()
                        .map(move |(x, e, y)| (i, x.clone(), e.clone(), y.clone(), m.cost(e).expect("declared")))
                })
            })
            .collect();
        let Some((agent, x, e, y, cost)) = candidates.choose(&mut rng).cloned() else {
            continue;
        };
        let id = s.agents[agent].id.clone();
        let use_event_filter = rng.random_bool(0.5);

        let prebuilt = match s.build() {
            Ok(env) => env,
            Err(err) => {
                problems.push(format!("seed {seed}: build failed: {err}"));
                continue;
            }
        };
        let failure = FailureEvent {
            agent_id: id.clone(),
            from: x.component(0).to_string(),
            to: y.component(0).to_string(),
            event: use_event_filter.then(|| e.name().to_string()),
        };
        let injected = match inject_failure(&prebuilt, &failure) {
            Ok(i) => i,
            Err(err) => {
                problems.push(format!("seed {seed}: inject failed: {err}"));
                continue;
            }
        };
        removed_total += injected.removed;
        let slot = prebuilt.slot_of(&id).expect("agent slot");
        if injected.removed > prebuilt.theta_excluding(slot) {
            problems.push(format!("seed {seed}: removed {} > θ′", injected.removed));
        }

        let mut agents: Vec<AgentSpec> = s.agents.clone();
        let failure_automaton = NfaBuilder::new([id.as_str()])
            .transition(x.clone(), e.clone(), y.clone(), cost)
            .unmarked()
            .build()
            .expect("single transition is valid");
        agents[agent].failures.push(failure_automaton);
        let rebuilt = match build_environment(&agents, &s.inter) {
            Ok(env) => env,
            Err(err) => {
                problems.push(format!("seed {seed}: rebuild failed: {err}"));
                continue;
            }
        };
        if transition_set(&injected.model) != transition_set(&rebuilt) {
            problems.push(format!("seed {seed}: transition sets differ after failing {e}"));
        }
        if injected.model.automaton().states() != rebuilt.automaton().states()
            || injected.model.automaton().marked() != rebuilt.automaton().marked()
        {
            problems.push(format!("seed {seed}: state or marked sets differ"));
        }
    }
    if problems.is_empty() {
        Ok(format!(
            "{INJECTION_RUNS} scenarios, injection equals rebuild ({removed_total} transitions removed in total)"
        ))
    } else {
        Err(summarize(&problems))
    }
}

fn median(mut v: Vec<Duration>) -> Duration {
    v.sort();
    v[v.len() / 2]
}

fn criterion_8(audit: &mut ChainAudit) -> Outcome {
    let (env, x0, task) = case_study()?;
    let env = inject_failure(&env, &r2_failure()).map_err(|e| e.to_string())?.model;
    let planner = Planner::new(&env);
    let mut complete = Vec::with_capacity(TIMING_RUNS);
    let mut heuristic = Vec::with_capacity(TIMING_RUNS);
    for _ in 0..TIMING_RUNS {
        let t = Instant::now();
        let c = planner.complete(&x0, &task).map_err(|e| e.to_string())?;
        complete.push(t.elapsed());
        let t = Instant::now();
        let h = planner.heuristic(&x0, &task).map_err(|e| e.to_string())?;
        heuristic.push(t.elapsed());
        std::hint::black_box((c, h));
    }
    let (mc, mh) = (median(complete), median(heuristic));
    if mh >= mc {
        return Err(format!("median heuristic {mh:?} ≥ median complete {mc:?}"));
    }

    // Scaled stress run: termination and invariants only.
    let started = Instant::now();
    let s = random_scenario(7, &RandomParams::fixed(4, 12));
    let stress = s.build().map_err(|e| format!("stress build: {e}"))?;
    if stress.state_count() != stress.theta() || stress.state_count() > 100_000 {
        return Err(format!(
            "stress model has {} states (θ = {})",
            stress.state_count(),
            stress.theta()
        ));
    }
    let stress_planner = Planner::new(&stress);
    let result = stress_planner.complete(&s.initial, &s.task);
    let stress_elapsed = started.elapsed();
    match &result {
        Ok(r) => audit.check("stress complete", &stress, &s.initial, &s.task, r),
        Err(PlanError::TaskInfeasible(_) | PlanError::NoGoalStates) => {}
        Err(e) => return Err(format!("stress plan: {e}")),
    }
    if let (Ok(h), Ok(c)) = (stress_planner.heuristic(&s.initial, &s.task), &result) {
        audit.check("stress heuristic", &stress, &s.initial, &s.task, &h);
        if h.cost < c.cost {
            return Err("stress: heuristic cheaper than complete".into());
        }
    }
    if stress_elapsed >= Duration::from_secs(600) {
        return Err(format!("stress build+plan took {stress_elapsed:?}"));
    }
    Ok(format!(
        "median solve heuristic {:.3} ms < complete {:.3} ms over {TIMING_RUNS} runs; stress {} states built and planned in {:.1} s",
        mh.as_secs_f64() * 1e3,
        mc.as_secs_f64() * 1e3,
        stress.state_count(),
        stress_elapsed.as_secs_f64()
    ))
}

fn criterion_9(audit: &ChainAudit) -> Outcome {
    if audit.checked == 0 {
        return Err("no chains were checked".into());
    }
    if audit.failures.is_empty() {
        Ok(format!(
            "{} emitted chains are well formed, closed and replay to the task",
            audit.checked
        ))
    } else {
        Err(summarize(&audit.failures))
    }
}

fn summarize(problems: &[String]) -> String {
    let shown: Vec<&str> = problems.iter().take(3).map(String::as_str).collect();
    format!("{} problem(s): {}", problems.len(), shown.join(" | "))
}

fn main() -> ExitCode {
    let mut audit = ChainAudit::default();
    let c1 = criterion_1();
    let c2 = criterion_2(&mut audit);
    let c3 = criterion_3();
    let (c4, c7) = criteria_4_and_7(&mut audit);
    let c5 = criterion_5();
    let c6 = criterion_6();
    let c8 = criterion_8(&mut audit);
    let c9 = criterion_9(&audit);
    let results = [
        (1, "case study state count", c1),
        (2, "case study plan after R2 failure", c2),
        (3, "case study goal-state count", c3),
        (4, "optimality against the oracle", c4),
        (5, "environment event set", c5),
        (6, "injection equals rebuild", c6),
        (7, "heuristic dominance", c7),
        (8, "solver timing direction and stress run", c8),
        (9, "chain well-formedness", c9),
    ];
    let mut failed = 0;
    for (n, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {n} ({name}): {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
