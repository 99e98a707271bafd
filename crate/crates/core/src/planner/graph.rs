//! Weighted digraph view of an environment model and Dijkstra's algorithm.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashMap};

use rayon::prelude::*;

use crate::automata::{CompositeState, EventId};
use crate::model::EnvironmentModel;

/// Environment variable capping the worker threads used while building
/// graphs and enumerating goals. `0` or `1` means sequential.
pub const THREADS_ENV: &str = "SPECTER_THREADS";

/// Worker count requested through [`THREADS_ENV`]; defaults to the number
/// of available cores.
pub fn configured_threads() -> usize {
    match std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
    {
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, usize::from),
    }
}

/// Computes `f(i)` for `i in 0..n`, in parallel when more than one thread is
/// configured. Output order is always index order.
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let threads = configured_threads();
    if threads <= 1 || n < 1024 {
        return (0..n).map(f).collect();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(_) => (0..n).map(f).collect(),
    }
}

/// One directed edge: the cheapest event between an ordered state pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub target: usize,
    pub weight: f64,
    pub event: EventId,
}

/// Sparse adjacency representation. Node indices follow the sorted state
/// order of the model, so they are stable across runs.
#[derive(Debug, Clone)]
pub struct WeightedGraph {
    nodes: Vec<CompositeState>,
    index: HashMap<CompositeState, usize>,
    offsets: Vec<usize>,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    /// Builds the graph, keeping for every ordered pair only the minimum-cost
    /// event (ties go to the lexicographically smallest event id).
    pub fn from_model(env: &EnvironmentModel) -> Self {
        let nfa = env.automaton();
        let nodes: Vec<CompositeState> = nfa.states().iter().cloned().collect();
        let index: HashMap<CompositeState, usize> = nodes.iter().enumerate().map(|(i, x)| (x.clone(), i)).collect();

        let rows: Vec<Vec<Edge>> = map_indexed(nodes.len(), |i| {
            let mut best: BTreeMap<usize, (f64, &EventId)> = BTreeMap::new();
            for (e, y) in nfa.outgoing(&nodes[i]) {
                let j = index[y];
                let w = nfa.cost(e).expect("every event has a cost");
                match best.get(&j) {
                    Some(&(bw, be)) if (bw, be) <= (w, e) => {}
                    _ => {
                        best.insert(j, (w, e));
                    }
                }
            }
            best.into_iter()
                .map(|(target, (weight, event))| Edge {
                    target,
                    weight,
                    event: event.clone(),
                })
                .collect()
        });

        let mut offsets = Vec::with_capacity(nodes.len() + 1);
        offsets.push(0);
        let mut edges = Vec::with_capacity(rows.iter().map(Vec::len).sum());
        for row in rows {
            edges.extend(row);
            offsets.push(edges.len());
        }
        WeightedGraph {
            nodes,
            index,
            offsets,
            edges,
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node(&self, i: usize) -> &CompositeState {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[CompositeState] {
        &self.nodes
    }

    pub fn index_of(&self, x: &CompositeState) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn edges_from(&self, i: usize) -> &[Edge] {
        &self.edges[self.offsets[i]..self.offsets[i + 1]]
    }

    /// The edge `i -> j`, if any.
    pub fn edge(&self, i: usize, j: usize) -> Option<&Edge> {
        let row = self.edges_from(i);
        row.binary_search_by(|e| e.target.cmp(&j)).ok().map(|k| &row[k])
    }

    /// Weight of `i -> j`, `0.0` when there is no edge.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.edge(i, j).map_or(0.0, |e| e.weight)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    // Reversed so that BinaryHeap pops the smallest (cost, node) first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest-path tree, possibly partial.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    source: usize,
    dist: Vec<f64>,
    pred: Vec<usize>,
    settled: Vec<bool>,
}

const NONE: usize = usize::MAX;

impl ShortestPaths {
    pub fn source(&self) -> usize {
        self.source
    }

    pub fn is_settled(&self, node: usize) -> bool {
        self.settled[node]
    }

    /// Final distance of a settled node.
    pub fn distance(&self, node: usize) -> Option<f64> {
        self.settled[node].then(|| self.dist[node])
    }

    /// Node path from the source to a settled node.
    pub fn path_to(&self, node: usize) -> Option<Vec<usize>> {
        if !self.settled[node] {
            return None;
        }
        let mut path = vec![node];
        let mut cur = node;
        while cur != self.source {
            cur = self.pred[cur];
            path.push(cur);
        }
        path.reverse();
        Some(path)
    }
}

/// Dijkstra from `source`, stopping once `done(settled_node)` returns true or
/// the frontier is exhausted. Pops are ordered by (distance, node index) and
/// relaxation is strict, so paths are reproducible.
pub fn dijkstra_from<F>(g: &WeightedGraph, source: usize, mut done: F) -> ShortestPaths
where
    F: FnMut(usize) -> bool,
{
    let n = g.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NONE; n];
    let mut settled = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(Entry {
        cost: 0.0,
        node: source,
    });
    while let Some(Entry { cost, node }) = heap.pop() {
        if settled[node] {
            continue;
        }
        settled[node] = true;
        if done(node) {
            break;
        }
        for edge in g.edges_from(node) {
            let next = cost + edge.weight;
            if !settled[edge.target] && next < dist[edge.target] {
                dist[edge.target] = next;
                pred[edge.target] = node;
                heap.push(Entry {
                    cost: next,
                    node: edge.target,
                });
            }
        }
    }
    ShortestPaths {
        source,
        dist,
        pred,
        settled,
    }
}

/// Minimum-cost path `s -> t` as node indices plus its cost, or `None`.
pub fn dijkstra(g: &WeightedGraph, s: usize, t: usize) -> Option<(Vec<usize>, f64)> {
    let tree = dijkstra_from(g, s, |v| v == t);
    Some((tree.path_to(t)?, tree.distance(t)?))
}
