use std::collections::BTreeSet;

use proptest::prelude::*;

use specter::algebra::{concat_compat, subtract_compat, union_compat};
use specter::automata::{check_compatible, delta, proj, CompositeState, EventId, NfaBuilder, Projector};
use specter::model::{inject_failure, FailureEvent};
use specter::oracle::brute_force_shortest;
use specter::oracle::random::{random_scenario, RandomParams};
use specter::planner::{check_chain, dijkstra, Planner, Solver, TaskSpecification};
use specter::scenario::model_file::{parse_model, serialize_model};
use specter::scenario::plan::{parse_plan, serialize_plan, PlanDocument, Timing};
use specter::scenario::{parse_scenario, parse_scenario_bytes, serialize_scenario};
use specter::Epsilon0Nfa;

/// Event universe over one slot: event `k` goes `from → to` with a cost.
#[derive(Debug, Clone)]
struct Universe {
    states: usize,
    edges: Vec<(usize, usize, u32)>,
}

fn universe() -> impl Strategy<Value = Universe> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n, 1u32..50), 0..10).prop_map(move |edges| Universe { states: n, edges })
    })
}

fn state(i: usize) -> CompositeState {
    CompositeState::atomic(&format!("s{i}"))
}

/// Builds the automaton holding the selected events of `u` (and all states
/// when `all_states` is set).
fn automaton(slot: &str, u: &Universe, select: &[bool], all_states: bool) -> Epsilon0Nfa {
    let mut b = NfaBuilder::new([slot]);
    if all_states {
        b = b.states((0..u.states).map(state));
    }
    for (k, &(x, y, c)) in u.edges.iter().enumerate() {
        if select.get(k).copied().unwrap_or(true) {
            b = b.transition(state(x), EventId::new(slot, &format!("e{k}")), state(y), f64::from(c));
        }
    }
    b.build().expect("universe edges have unique endpoints")
}

fn universe_with_masks() -> impl Strategy<Value = (Universe, Vec<bool>, Vec<bool>, Vec<bool>)> {
    universe().prop_flat_map(|u| {
        let m = u.edges.len();
        (
            Just(u),
            prop::collection::vec(any::<bool>(), m),
            prop::collection::vec(any::<bool>(), m),
            prop::collection::vec(any::<bool>(), m),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn delta_keeps_everything_but_the_initial_state(u in universe()) {
        let n = automaton("R", &u, &[], true);
        for x0 in n.states() {
            let d = delta(&n, x0).unwrap();
            prop_assert_eq!(d.initial(), x0);
            prop_assert_eq!(&*d, &n);
        }
        prop_assert!(delta(&n, &state(99)).is_err());
    }

    #[test]
    fn projection_identity_and_partition(labels in prop::collection::vec("[a-z]{1,3}", 1..6), bits in prop::collection::vec(any::<bool>(), 6)) {
        let x = CompositeState::new(&labels);
        let ones = Projector::ones(labels.len());
        prop_assert_eq!(proj(&x, &ones).unwrap(), x.components().to_vec());
        let b = Projector::new(bits[..labels.len()].to_vec());
        let kept = proj(&x, &b).unwrap();
        let rest = proj(&x, &b.complement()).unwrap();
        prop_assert_eq!(kept.len() + rest.len(), labels.len());
        // A sub-mask over the kept slots equals projecting once with the composed mask.
        if !kept.is_empty() {
            let sub = CompositeState::from_labels(kept.clone());
            let inner: Vec<bool> = (0..kept.len()).map(|i| bits[(i * 7 + 3) % 6]).collect();
            let mut set = b.set_slots();
            let mut composed = vec![false; labels.len()];
            for &keep in &inner {
                composed[set.next().unwrap()] = keep;
            }
            prop_assert_eq!(
                proj(&sub, &Projector::new(inner)).unwrap(),
                proj(&x, &Projector::new(composed)).unwrap()
            );
        }
    }

    #[test]
    fn inverse_transition_and_active_events_agree(u in universe()) {
        let n = automaton("R", &u, &[], true);
        for (x, e, y) in n.transitions() {
            prop_assert_eq!(&n.inverse_transition(y, e).unwrap(), x);
            prop_assert!(n.active_events(x).unwrap().contains(e));
            prop_assert_eq!(n.target(x, e), Some(y));
        }
    }

    #[test]
    fn compatibility_is_symmetric(a in universe(), b in universe()) {
        let na = automaton("R", &a, &[], false);
        let nb = automaton("R", &b, &[], false);
        prop_assert_eq!(check_compatible(&na, &nb).is_compatible(), check_compatible(&nb, &na).is_compatible());
    }

    #[test]
    fn union_laws((u, ma, mb, mc) in universe_with_masks()) {
        let a = automaton("R", &u, &ma, false);
        let b = automaton("R", &u, &mb, false);
        let c = automaton("R", &u, &mc, false);
        let ab = union_compat(&a, &b).unwrap();
        prop_assert_eq!(&ab, &union_compat(&b, &a).unwrap());
        prop_assert_eq!(
            union_compat(&ab, &c).unwrap(),
            union_compat(&a, &union_compat(&b, &c).unwrap()).unwrap()
        );
        let events: BTreeSet<EventId> = a.event_set().union(&b.event_set()).cloned().collect();
        prop_assert_eq!(ab.event_set(), events);
        prop_assert!(ab.states().iter().all(|x| a.contains_state(x) || b.contains_state(x)));
    }

    #[test]
    fn subtraction_laws((u, ma, mb, _) in universe_with_masks()) {
        let a = automaton("R", &u, &ma, true);
        let b = automaton("R", &u, &mb, false);
        let d = subtract_compat(&a, &b).unwrap();
        prop_assert_eq!(d.states(), a.states());
        prop_assert!(d.event_set().is_disjoint(&b.event_set()));
        prop_assert!(d.event_set().is_subset(&a.event_set()));
        prop_assert_eq!(&subtract_compat(&d, &b).unwrap(), &d);
    }

    #[test]
    fn concatenation_counts(a in universe(), b in universe()) {
        let na = automaton("P", &a, &[], true);
        let nb = automaton("Q", &b, &[], true);
        let c = concat_compat(&na, &nb).unwrap();
        prop_assert_eq!(c.states().len(), na.states().len() * nb.states().len());
        prop_assert_eq!(
            c.transition_count(),
            na.transition_count() * nb.states().len() + nb.transition_count() * na.states().len()
        );
        for (x, _, y) in c.transitions() {
            let changed = x.components().iter().zip(y.components()).filter(|(p, q)| p != q).count();
            prop_assert!(changed <= 1);
        }
    }

    #[test]
    fn planner_agrees_with_oracle_on_every_target(seed in any::<u64>()) {
        let s = random_scenario(seed, &RandomParams::default());
        let env = s.build().unwrap();
        let planner = Planner::new(&env);
        let g = planner.graph();
        let source = g.index_of(&s.initial).unwrap();
        for t in 0..g.node_count() {
            let target = g.node(t).clone();
            let oracle = brute_force_shortest(&env, &s.initial, |x| *x == target, None);
            match (dijkstra(g, source, t), oracle) {
                (Some((path, cost)), Ok((_, expected))) => {
                    prop_assert_eq!(cost, expected);
                    prop_assert_eq!(path.first(), Some(&source));
                    prop_assert_eq!(path.last(), Some(&t));
                }
                (None, Err(_)) => {}
                (d, o) => prop_assert!(false, "dijkstra {:?} vs oracle {:?}", d, o),
            }
        }
    }

    #[test]
    fn plans_are_valid_single_step_chains(seed in any::<u64>(), heuristic in any::<bool>()) {
        let s = random_scenario(seed, &RandomParams::default());
        let env = s.build().unwrap();
        let solver = if heuristic { Solver::Heuristic } else { Solver::Complete };
        if let Ok(r) = Planner::new(&env).plan(&s.initial, &s.task, solver) {
            prop_assert!(check_chain(&r.chain));
            let mut sum = 0.0;
            for m in &r.chain.modules {
                sum += m.cost;
                prop_assert_eq!(env.automaton().target(&m.p, &m.e), Some(&m.q));
                prop_assert_eq!(env.automaton().cost(&m.e), Some(m.cost));
                if m.e.namespace() != EventId::INTER {
                    let slot = env.slot_of(m.e.namespace()).unwrap();
                    for i in 0..env.arity() {
                        prop_assert!(i == slot || m.p.component(i) == m.q.component(i));
                    }
                }
            }
            prop_assert_eq!(sum, r.cost);
            prop_assert!(s.task.is_satisfied_by(&r.goal_state));
        }
    }

    #[test]
    fn satisfied_marked_initial_state_gives_the_empty_chain(seed in any::<u64>(), heuristic in any::<bool>()) {
        let s = random_scenario(seed, &RandomParams::default());
        let env = s.build().unwrap();
        let task = TaskSpecification::new(
            s.task.projector.clone(),
            proj(&s.initial, &s.task.projector).unwrap(),
        ).unwrap();
        let solver = if heuristic { Solver::Heuristic } else { Solver::Complete };
        let r = Planner::new(&env).plan(&s.initial, &task, solver).unwrap();
        prop_assert!(r.chain.is_empty());
        prop_assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn composition_is_deterministic_and_round_trips(seed in any::<u64>()) {
        let s = random_scenario(seed, &RandomParams::default());
        let a = s.build().unwrap();
        let b = s.build().unwrap();
        let text = serialize_model(&a, None);
        prop_assert_eq!(&text, &serialize_model(&b, None));
        prop_assert_eq!(parse_model(&text).unwrap().model, a.clone());
        prop_assert_eq!(a.state_count(), a.theta());
    }

    #[test]
    fn injection_respects_theta_prime(seed in any::<u64>(), pick in any::<prop::sample::Index>()) {
        let s = random_scenario(seed, &RandomParams::default());
        let env = s.build().unwrap();
        let slot = pick.index(env.arity());
        let alphabet = &env.alphabets()[slot];
        let from = alphabet[pick.index(alphabet.len())].to_string();
        let to = alphabet[(pick.index(alphabet.len()) + 1) % alphabet.len()].to_string();
        let f = FailureEvent { agent_id: env.agent_ids()[slot].clone(), from, to, event: None };
        let out = inject_failure(&env, &f).unwrap();
        prop_assert!(out.removed <= env.theta_excluding(slot));
        prop_assert_eq!(out.model.automaton().transition_count() + out.removed, env.automaton().transition_count());
    }

    #[test]
    fn plan_documents_round_trip(seed in any::<u64>()) {
        let s = random_scenario(seed, &RandomParams::default());
        let env = s.build().unwrap();
        if let Ok(r) = Planner::new(&env).complete(&s.initial, &s.task) {
            let doc = PlanDocument::new(&r, env.agent_ids(), Timing { preprocess_s: 0.5, solve_s: 0.25 });
            let text = serialize_plan(&doc);
            let back = parse_plan(&text).unwrap();
            prop_assert_eq!(&back, &doc);
            prop_assert_eq!(serialize_plan(&back), text);
        }
    }

    #[test]
    fn scenario_parsing_is_total(bytes in prop::collection::vec(any::<u8>(), 0..512)) {
        let _ = parse_scenario_bytes(&bytes);
    }

    #[test]
    fn scenario_parsing_is_total_on_json_like_text(text in r#"[\{\}\[\]",:a-z0-9 ]{0,200}"#) {
        let _ = parse_scenario(&text);
    }

    #[test]
    fn truncated_scenarios_give_diagnostics(cut in 0usize..4000) {
        let text = include_str!("../../../scenarios/case_study_1.json");
        let cut = (0..=cut.min(text.len())).rev().find(|&i| text.is_char_boundary(i)).unwrap_or(0);
        if cut < text.trim_end().len() {
            let diags = parse_scenario(&text[..cut]).unwrap_err();
            prop_assert!(!diags.is_empty());
        }
    }
}

#[test]
fn scenario_round_trip_is_identity() {
    let text = include_str!("../../../scenarios/case_study_1.json");
    let file = parse_scenario(text).unwrap();
    let rendered = serialize_scenario(&file);
    assert_eq!(parse_scenario(&rendered).unwrap(), file);
    assert_eq!(serialize_scenario(&parse_scenario(&rendered).unwrap()), rendered);
}
