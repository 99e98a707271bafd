//! Graphviz DOT rendering of automata and module chains.

use std::fmt::Write;

use crate::automata::Epsilon0Nfa;
use crate::planner::ModuleChain;

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn cost_text(c: f64) -> String {
    format!("{c}")
}

/// States become nodes (marked states double-circled) and each transition
/// an edge labelled `event (cost)`.
pub fn automaton_to_dot(nfa: &Epsilon0Nfa) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
    for x in nfa.states() {
        let shape = if nfa.is_marked(x) { "doublecircle" } else { "circle" };
        writeln!(out, "  {} [shape={shape}];", quote(&x.to_string())).expect("write to string");
    }
    for (x, e, y) in nfa.transitions() {
        let label = format!("{e} ({})", cost_text(nfa.cost(e).expect("event has a cost")));
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(&x.to_string()),
            quote(&y.to_string()),
            quote(&label)
        )
        .expect("write to string");
    }
    out.push_str("}\n");
    out
}

/// A chain of `z` modules becomes `z + 1` positional nodes joined by solid
/// module edges, closed by a dashed edge for the inverted task module.
pub fn chain_to_dot(chain: &ModuleChain) -> String {
    let mut out = String::from("digraph chain {\n  rankdir=LR;\n  node [shape=box];\n");
    let mut states = vec![chain.initial()];
    states.extend(chain.modules.iter().map(|m| &m.q));
    for (i, x) in states.iter().enumerate() {
        writeln!(out, "  n{i} [label={}];", quote(&x.to_string())).expect("write to string");
    }
    for (i, m) in chain.modules.iter().enumerate() {
        let label = format!("T{} {} ({})", i + 1, m.e, cost_text(m.cost));
        writeln!(out, "  n{i} -> n{} [label={}];", i + 1, quote(&label)).expect("write to string");
    }
    let t0 = &chain.task_module_inverted;
    writeln!(
        out,
        "  n{} -> n0 [style=dashed, label={}];",
        states.len() - 1,
        quote(&format!("T0^-1 {}", t0.e))
    )
    .expect("write to string");
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{CompositeState, EventId, NfaBuilder};

    #[test]
    fn two_state_automaton() {
        let s = CompositeState::atomic;
        let nfa = NfaBuilder::new(["R1"])
            .transition(s("A"), EventId::new("R1", "e1"), s("B"), 10.0)
            .mark(s("B"))
            .build()
            .unwrap();
        let dot = automaton_to_dot(&nfa);
        assert_eq!(dot.matches("shape=doublecircle").count(), 1);
        assert_eq!(dot.matches(" -> ").count(), 1);
        assert!(dot.contains("\"R1.e1 (10)\""));
    }

    #[test]
    fn quoting_escapes() {
        assert_eq!(quote("a\"b\\c"), "\"a\\\"b\\\\c\"");
    }
}
