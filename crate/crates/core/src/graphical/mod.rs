//! Graphical secretary: edges of a multigraph arrive online and the picked
//! set must stay a forest.

mod algorithms;
mod dsu;

pub use algorithms::{RandomThreshold, VertexPermutation};
pub use dsu::DisjointSets;

use rand::Rng;

use crate::arrival::{rng_for, Stream};
use crate::error::{Error, Result};
use crate::numeric::Ranked;
use crate::online::{Constraint, Counters, OfflineOptimum, Oracle, Problem, Sense};
use crate::secretary::Pick;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: f64,
}

/// Undirected multigraph with non-negative edge weights. Parallel edges are
/// allowed, self-loops are not.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    vertex_count: usize,
    edges: Vec<Edge>,
}

impl WeightedGraph {
    pub fn new(vertex_count: usize, edges: Vec<Edge>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            if e.u >= vertex_count || e.v >= vertex_count {
                return Err(Error::instance(format!(
                    "edge {i} ({}, {}) has an endpoint outside 0..{vertex_count}",
                    e.u, e.v
                )));
            }
            if e.u == e.v {
                return Err(Error::instance(format!(
                    "edge {i} is a self-loop at {}",
                    e.u
                )));
            }
            if !(e.weight >= 0.0 && e.weight.is_finite()) {
                return Err(Error::instance(format!("edge {i} has weight {}", e.weight)));
            }
        }
        Ok(Self {
            vertex_count,
            edges,
        })
    }

    /// `edges` uniform random vertex pairs with U[0,1) weights.
    pub fn random(vertex_count: usize, edges: usize, seed: u64) -> Result<Self> {
        if vertex_count < 2 {
            return Err(Error::param("a random graph needs at least 2 vertices"));
        }
        let mut rng = rng_for(seed, Stream::Instance);
        let list = (0..edges)
            .map(|_| {
                let u = rng.random_range(0..vertex_count);
                let mut v = rng.random_range(0..vertex_count - 1);
                if v >= u {
                    v += 1;
                }
                Edge {
                    u,
                    v,
                    weight: rng.random::<f64>(),
                }
            })
            .collect();
        Self::new(vertex_count, list)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn key(&self, index: usize) -> Ranked {
        Ranked::new(self.edges[index].weight, index)
    }

    pub fn weight_of(&self, edge_indices: &[usize]) -> f64 {
        edge_indices.iter().map(|&i| self.edges[i].weight).sum()
    }
}

/// Whether the given edges form a forest.
pub fn is_forest(graph: &WeightedGraph, edge_indices: &[usize]) -> bool {
    let mut d = DisjointSets::new(graph.vertex_count());
    edge_indices.iter().all(|&i| {
        let e = graph.edges()[i];
        d.union(e.u, e.v)
    })
}

/// Maximum-weight spanning forest by Kruskal's rule.
pub fn kruskal_max_forest(graph: &WeightedGraph) -> OfflineOptimum<Vec<usize>> {
    let mut order: Vec<usize> = (0..graph.edges().len()).collect();
    order.sort_unstable_by_key(|&i| std::cmp::Reverse(graph.key(i)));
    let mut d = DisjointSets::new(graph.vertex_count());
    let mut forest = Vec::new();
    for i in order {
        let e = graph.edges()[i];
        if d.union(e.u, e.v) {
            forest.push(i);
        }
    }
    OfflineOptimum {
        value: graph.weight_of(&forest),
        witness: forest,
        exact: true,
    }
}

/// Picked edges plus the union-find over them.
#[derive(Debug, Clone)]
pub struct Forest {
    sets: DisjointSets,
    picked: Vec<usize>,
}

impl Forest {
    pub fn picked(&self) -> &[usize] {
        &self.picked
    }
}

impl Constraint<Edge> for Forest {
    type Action = Pick;

    fn admits(&self, _index: usize, e: &Edge, _action: &Pick) -> bool {
        !self.sets.connected(e.u, e.v)
    }

    fn apply(&mut self, index: usize, e: &Edge, _action: Pick) -> Result<()> {
        if !self.sets.union(e.u, e.v) {
            return Err(Error::contract(format!(
                "forest constraint: edge {index} ({}, {}) would close a cycle",
                e.u, e.v
            )));
        }
        self.picked.push(index);
        Ok(())
    }
}

/// Max-weight forest with the vertex set known upfront.
#[derive(Debug, Clone)]
pub struct ForestProblem {
    graph: WeightedGraph,
}

impl ForestProblem {
    pub fn new(graph: WeightedGraph) -> Self {
        Self { graph }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }
}

impl Problem for ForestProblem {
    type Request = Edge;
    /// The vertex count.
    type Public = usize;
    type State = Forest;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn requests(&self) -> &[Edge] {
        self.graph.edges()
    }

    fn public(&self) -> &usize {
        &self.graph.vertex_count
    }

    fn initial_state(&self) -> Forest {
        Forest {
            sets: DisjointSets::new(self.graph.vertex_count()),
            picked: Vec::new(),
        }
    }

    fn objective(&self, state: &Forest) -> f64 {
        self.graph.weight_of(&state.picked)
    }

    fn counters(&self, state: &Forest, _oracle_objective: f64) -> Counters {
        let mut c = Counters::new();
        c.insert("edges_picked".into(), state.picked.len() as i64);
        c
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Kruskal;

impl Oracle<ForestProblem> for Kruskal {
    fn optimum(&self, problem: &ForestProblem) -> Result<f64> {
        Ok(kruskal_max_forest(problem.graph()).value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(u: usize, v: usize, weight: f64) -> Edge {
        Edge { u, v, weight }
    }

    #[test]
    fn triangle_drops_lightest_edge() {
        let g =
            WeightedGraph::new(3, vec![edge(0, 1, 3.0), edge(1, 2, 2.0), edge(0, 2, 1.0)]).unwrap();
        let opt = kruskal_max_forest(&g);
        assert_eq!(opt.value, 5.0);
        assert!(is_forest(&g, &opt.witness));
    }

    #[test]
    fn parallel_edges_keep_heavier() {
        let g = WeightedGraph::new(2, vec![edge(0, 1, 4.0), edge(1, 0, 9.0)]).unwrap();
        assert_eq!(kruskal_max_forest(&g).value, 9.0);
        assert!(!is_forest(&g, &[0, 1]));
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(WeightedGraph::new(2, vec![edge(0, 2, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, vec![edge(1, 1, 1.0)]).is_err());
        assert!(WeightedGraph::new(2, vec![edge(0, 1, -1.0)]).is_err());
    }

    #[test]
    fn random_graph_has_no_self_loops() {
        let g = WeightedGraph::random(5, 200, 1).unwrap();
        assert!(g.edges().iter().all(|e| e.u != e.v));
    }
}
