//! `specter` command-line front end.
//!
//! Exit codes:
//!
//! | command  | 0  | 1                      | 2                               | 3                 | 4                 |
//! |----------|----|------------------------|---------------------------------|-------------------|-------------------|
//! | build    | ok | unreadable / invalid   | composition failed              |                   |                   |
//! | plan     | ok | unreadable model       | bad `--initial` / `--task`      | task infeasible   | heuristic failed  |
//! | inject   | ok | unreadable model       | unknown agent / state           |                   |                   |
//! | export   | ok | unreadable artifact    |                                 |                   |                   |
//! | bench    | ok | parameter out of range |                                 |                   |                   |

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::model::{inject_failure, FailureEvent};
use crate::oracle::random::{random_scenario, RandomParams};
use crate::planner::{PlanError, Planner, Solver, TaskSpecification};
use crate::scenario::dot::{automaton_to_dot, chain_to_dot};
use crate::scenario::model_file::{parse_model, serialize_model, ModelArtifact};
use crate::scenario::plan::{parse_plan, serialize_plan, PlanDocument, Timing};
use crate::scenario::{build_model, render_diagnostics, BuildError};

/// Largest agent count accepted by `bench`.
pub const BENCH_MAX_AGENTS: usize = 8;
/// Largest per-agent alphabet accepted by `bench`.
pub const BENCH_MAX_STATES: usize = 64;
/// Largest composed state count accepted by `bench`.
pub const BENCH_MAX_PRODUCT: usize = 200_000;
/// Largest trial count accepted by `bench`.
pub const BENCH_MAX_TRIALS: usize = 10_000;

pub const BENCH_HEADER: &str = "trial,states,preprocess_s,complete_s,heuristic_s,complete_cost,heuristic_cost";

#[derive(Debug, Parser)]
#[command(
    name = "specter",
    version,
    about = "Multi-agent task planning over composed automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Complete,
    Heuristic,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Complete => Solver::Complete,
            SolverArg::Heuristic => Solver::Heuristic,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ExportFormat {
    Dot,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compose a scenario into an environment model artifact.
    Build { scenario: PathBuf, model_out: PathBuf },
    /// Plan on a prebuilt model.
    Plan {
        model: PathBuf,
        /// Initial state as `a|b|c` or `AGENT=state,...`.
        #[arg(long)]
        initial: Option<String>,
        /// Task as `AGENT=state[,AGENT=state...]`.
        #[arg(long)]
        task: Option<String>,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
    },
    /// Remove a failed transition from a prebuilt model.
    Inject {
        model: PathBuf,
        #[arg(long)]
        agent: String,
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        /// Restrict removal to this event (name within the agent namespace).
        #[arg(long)]
        event: Option<String>,
        model_out: PathBuf,
    },
    /// Render a model or plan artifact.
    Export {
        path: PathBuf,
        #[arg(long, value_enum, default_value = "dot")]
        format: ExportFormat,
    },
    /// Time both solvers on seeded random models; prints CSV.
    Bench {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: usize,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn fail(&mut self, code: i32, message: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {message}");
        code
    }
}

/// Runs the CLI with explicit arguments and streams; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = err.write_all(rendered.as_bytes());
            } else {
                let _ = out.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match cli.command {
        Command::Build { scenario, model_out } => cmd_build(&mut io, &scenario, &model_out),
        Command::Plan {
            model,
            initial,
            task,
            solver,
        } => cmd_plan(
            &mut io,
            &model,
            initial.as_deref(),
            task.as_deref(),
            solver.map(Solver::from),
        ),
        Command::Inject {
            model,
            agent,
            from,
            to,
            event,
            model_out,
        } => cmd_inject(
            &mut io,
            &model,
            &FailureEvent {
                agent_id: agent,
                from,
                to,
                event,
            },
            &model_out,
        ),
        Command::Export { path, format } => match format {
            ExportFormat::Dot => cmd_export_dot(&mut io, &path),
        },
        Command::Bench {
            agents,
            states,
            seed,
            trials,
        } => cmd_bench(&mut io, agents, states, seed, trials),
    }
}

fn cmd_build(io: &mut Io, scenario: &Path, model_out: &Path) -> i32 {
    let bytes = match std::fs::read(scenario) {
        Ok(b) => b,
        Err(e) => return io.fail(1, format!("cannot read {}: {e}", scenario.display())),
    };
    let started = Instant::now();
    let (model, defaults) = match build_model(&bytes) {
        Ok(built) => built,
        Err(BuildError::Invalid(diags)) => {
            let _ = io.err.write_all(render_diagnostics(&diags).as_bytes());
            return 1;
        }
        Err(e @ BuildError::Composition(_)) => return io.fail(2, e),
    };
    let elapsed = started.elapsed().as_secs_f64();
    if let Err(e) = std::fs::write(model_out, serialize_model(&model, Some(&defaults))) {
        return io.fail(1, format!("cannot write {}: {e}", model_out.display()));
    }
    let _ = writeln!(
        io.out,
        "built {} states, {} events, {} transitions",
        model.state_count(),
        model.automaton().costs().len(),
        model.automaton().transition_count()
    );
    let _ = writeln!(io.out, "preprocess_s {elapsed:.6}");
    0
}

fn load_model(io: &mut Io, path: &Path) -> Result<ModelArtifact, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| io.fail(1, format!("cannot read {}: {e}", path.display())))?;
    parse_model(&text).map_err(|d| io.fail(1, format!("{}: {d}", path.display())))
}

fn cmd_plan(io: &mut Io, model_path: &Path, initial: Option<&str>, task: Option<&str>, solver: Option<Solver>) -> i32 {
    let started = Instant::now();
    let artifact = match load_model(io, model_path) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let env = &artifact.model;
    let defaults = artifact.defaults.as_ref();

    let x0 = match (initial, defaults) {
        (Some(text), d) => match env.parse_state(text, d.map(|d| &d.initial)) {
            Ok(x) => x,
            Err(e) => return io.fail(2, format!("invalid --initial: {e}")),
        },
        (None, Some(d)) => d.initial.clone(),
        (None, None) => return io.fail(2, "the model has no default initial state; pass --initial"),
    };
    let task = match (task, defaults) {
        (Some(text), _) => match TaskSpecification::parse_assignments(env, text) {
            Ok(t) => t,
            Err(e) => return io.fail(2, format!("invalid --task: {e}")),
        },
        (None, Some(d)) => match d.task_spec() {
            Ok(t) => t,
            Err(e) => return io.fail(2, format!("invalid default task: {e}")),
        },
        (None, None) => return io.fail(2, "the model has no default task; pass --task"),
    };
    let solver = solver.or(defaults.map(|d| d.solver)).unwrap_or_default();

    let planner = Planner::new(env);
    let preprocess_s = started.elapsed().as_secs_f64();
    let solve_started = Instant::now();
    let result = planner.plan(&x0, &task, solver);
    let solve_s = solve_started.elapsed().as_secs_f64();
    let _ = writeln!(io.err, "load_s {preprocess_s:.6} solve_s {solve_s:.6}");
    match result {
        Ok(plan) => {
            let doc = PlanDocument::new(&plan, env.agent_ids(), Timing { preprocess_s, solve_s });
            let _ = io.out.write_all(serialize_plan(&doc).as_bytes());
            0
        }
        Err(e @ (PlanError::InvalidTask(_) | PlanError::UnknownState(_))) => io.fail(2, e),
        Err(e @ (PlanError::TaskInfeasible(_) | PlanError::NoGoalStates)) => io.fail(3, e),
        Err(e) if e.is_heuristic_failure() => io.fail(4, format!("heuristic failure: {e}")),
        Err(e) => io.fail(1, e),
    }
}

fn cmd_inject(io: &mut Io, model_path: &Path, failure: &FailureEvent, model_out: &Path) -> i32 {
    let artifact = match load_model(io, model_path) {
        Ok(a) => a,
        Err(code) => return code,
    };
    let started = Instant::now();
    let injected = match inject_failure(&artifact.model, failure) {
        Ok(i) => i,
        Err(e) => return io.fail(2, e),
    };
    let elapsed = started.elapsed().as_secs_f64();
    let text = serialize_model(&injected.model, artifact.defaults.as_ref());
    if let Err(e) = std::fs::write(model_out, text) {
        return io.fail(1, format!("cannot write {}: {e}", model_out.display()));
    }
    let _ = writeln!(io.out, "removed {} transitions", injected.removed);
    let _ = writeln!(io.out, "inject_s {elapsed:.6}");
    0
}

fn cmd_export_dot(io: &mut Io, path: &Path) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return io.fail(1, format!("cannot read {}: {e}", path.display())),
    };
    let format = serde_json::from_str::<serde_json::Value>(&text)
        .ok()
        .and_then(|v| v.get("format").and_then(|f| f.as_str()).map(str::to_string));
    let dot = match format.as_deref() {
        Some(crate::scenario::model_file::MODEL_FORMAT) => match parse_model(&text) {
            Ok(a) => automaton_to_dot(a.model.automaton()),
            Err(d) => return io.fail(1, d),
        },
        Some(crate::scenario::plan::PLAN_FORMAT) => match parse_plan(&text) {
            Ok(p) => chain_to_dot(&p.to_chain()),
            Err(d) => return io.fail(1, d),
        },
        _ => return io.fail(1, format!("{} is neither a model nor a plan artifact", path.display())),
    };
    let _ = io.out.write_all(dot.as_bytes());
    0
}

fn fmt_cost(r: &Result<crate::planner::PlanResult, PlanError>) -> String {
    r.as_ref().map(|p| format!("{}", p.cost)).unwrap_or_default()
}

fn cmd_bench(io: &mut Io, agents: usize, states: usize, seed: u64, trials: usize) -> i32 {
    if !(1..=BENCH_MAX_AGENTS).contains(&agents) {
        return io.fail(1, format!("--agents must be in 1..={BENCH_MAX_AGENTS}"));
    }
    if !(2..=BENCH_MAX_STATES).contains(&states) {
        return io.fail(1, format!("--states must be in 2..={BENCH_MAX_STATES}"));
    }
    let product = states.checked_pow(agents as u32).unwrap_or(usize::MAX);
    if product > BENCH_MAX_PRODUCT {
        return io.fail(
            1,
            format!("states^agents = {product} exceeds the cap of {BENCH_MAX_PRODUCT}"),
        );
    }
    if trials > BENCH_MAX_TRIALS {
        return io.fail(1, format!("--trials must be at most {BENCH_MAX_TRIALS}"));
    }
    let _ = writeln!(io.out, "{BENCH_HEADER}");
    let params = RandomParams::fixed(agents, states);
    for trial in 0..trials {
        let scenario = random_scenario(seed.wrapping_add(trial as u64), &params);
        let started = Instant::now();
        let env = match scenario.build() {
            Ok(env) => env,
            Err(e) => return io.fail(1, format!("trial {trial}: composition failed: {e}")),
        };
        let planner = Planner::new(&env);
        let preprocess_s = started.elapsed().as_secs_f64();
        let t = Instant::now();
        let complete = planner.complete(&scenario.initial, &scenario.task);
        let complete_s = t.elapsed().as_secs_f64();
        let t = Instant::now();
        let heuristic = planner.heuristic(&scenario.initial, &scenario.task);
        let heuristic_s = t.elapsed().as_secs_f64();
        let _ = writeln!(
            io.out,
            "{trial},{},{preprocess_s:.6},{complete_s:.6},{heuristic_s:.6},{},{}",
            env.state_count(),
            fmt_cost(&complete),
            fmt_cost(&heuristic)
        );
    }
    0
}
