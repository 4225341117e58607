use std::collections::VecDeque;

use rand::seq::SliceRandom;

use crate::arrival::{rng_for, Stream, TrialRng};
use crate::error::{Error, Result};
use crate::online::{Constraint, Counters, OnlineAlgorithm, Oracle, Problem, Sense, Session};

/// Unweighted bipartite graph; adjacency lists of left vertices, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    right: usize,
    adj: Vec<Vec<usize>>,
}

impl BipartiteGraph {
    /// `edges` are `(left, right)` pairs; duplicates collapse.
    pub fn new(left: usize, right: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); left];
        for &(u, v) in edges {
            if u >= left || v >= right {
                return Err(Error::instance(format!(
                    "edge ({u}, {v}) is outside the {left} x {right} bipartition"
                )));
            }
            adj[u].push(v);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        Ok(Self { right, adj })
    }

    pub fn left(&self) -> usize {
        self.adj.len()
    }

    pub fn right(&self) -> usize {
        self.right
    }

    pub fn neighbors(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, l)| l.iter().map(move |&v| (u, v)))
    }
}

/// The cycle on `2 n_pairs` vertices: left `i` meets right `pi(i)` and
/// right `pi(i+1 mod n_pairs)`, for a fixed permutation `pi` drawn from
/// `n_pairs` alone.
///
/// With the identity labelling, lowest-index tie-breaking would orient every
/// cheap choice the same way around the cycle and no conflict could arise
/// except at the wrap-around, so the labels are scrambled.
pub fn gen_cycle_instance(n_pairs: usize) -> Result<BipartiteGraph> {
    if n_pairs < 2 {
        return Err(Error::param(format!(
            "cycle needs n_pairs >= 2, got {n_pairs}"
        )));
    }
    let mut pi: Vec<usize> = (0..n_pairs).collect();
    pi.shuffle(&mut rng_for(n_pairs as u64, Stream::Instance));
    let edges: Vec<(usize, usize)> = (0..n_pairs)
        .flat_map(|i| [(i, pi[i]), (i, pi[(i + 1) % n_pairs])])
        .collect();
    BipartiteGraph::new(n_pairs, n_pairs, &edges)
}

/// Size of a maximum matching (Hopcroft–Karp).
pub fn hopcroft_karp(g: &BipartiteGraph) -> usize {
    const FREE: usize = usize::MAX;
    let (nl, nr) = (g.left(), g.right());
    let mut mate_l = vec![FREE; nl];
    let mut mate_r = vec![FREE; nr];
    let mut dist = vec![0usize; nl];
    let mut size = 0;
    loop {
        // Layer the left vertices by alternating distance from free ones.
        let mut queue = VecDeque::new();
        for u in 0..nl {
            if mate_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in g.neighbors(u) {
                let w = mate_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return size;
        }
        fn augment(
            u: usize,
            g: &BipartiteGraph,
            mate_l: &mut [usize],
            mate_r: &mut [usize],
            dist: &mut [usize],
        ) -> bool {
            for &v in g.neighbors(u) {
                let w = mate_r[v];
                if w == usize::MAX
                    || (dist[w] == dist[u] + 1 && augment(w, g, mate_l, mate_r, dist))
                {
                    mate_l[u] = v;
                    mate_r[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }
        for u in 0..nl {
            if mate_l[u] == FREE && augment(u, g, &mut mate_l, &mut mate_r, &mut dist) {
                size += 1;
            }
        }
    }
}

/// Augment along the path that starts at the current left vertex and visits
/// these right vertices in order. Each right vertex but the last is matched,
/// and its mate supplies the next edge; the last one is free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Augment(pub Vec<usize>);

/// A matching maintained under arrivals of left vertices, with the cost of
/// each augmentation.
#[derive(Debug, Clone)]
pub struct MaintainedMatching {
    adj: Vec<Vec<usize>>,
    mate_left: Vec<Option<usize>>,
    mate_right: Vec<Option<usize>>,
    costs: Vec<usize>,
}

impl MaintainedMatching {
    pub fn new(graph: &BipartiteGraph) -> Self {
        Self {
            adj: graph.adj.clone(),
            mate_left: vec![None; graph.left()],
            mate_right: vec![None; graph.right()],
            costs: Vec::new(),
        }
    }

    pub fn size(&self) -> usize {
        self.mate_left.iter().flatten().count()
    }

    pub fn mate_of_right(&self, v: usize) -> Option<usize> {
        self.mate_right[v]
    }

    /// Edge count of each augmenting path, in arrival order.
    pub fn step_costs(&self) -> &[usize] {
        &self.costs
    }

    /// Whether the matched pairs are a matching of graph edges.
    pub fn is_valid(&self) -> bool {
        self.mate_left.iter().enumerate().all(|(u, m)| match m {
            None => true,
            Some(v) => self.mate_right[*v] == Some(u) && self.adj[u].binary_search(v).is_ok(),
        })
    }

    fn check(&self, u0: usize, path: &[usize]) -> std::result::Result<(), String> {
        if self.mate_left[u0].is_some() {
            return Err(format!("left vertex {u0} is already matched"));
        }
        let Some((&last, inner)) = path.split_last() else {
            return Err("empty augmenting path".into());
        };
        let mut u = u0;
        let mut used = std::collections::HashSet::new();
        for &v in inner.iter().chain(std::iter::once(&last)) {
            if v >= self.mate_right.len() || self.adj[u].binary_search(&v).is_err() {
                return Err(format!("({u}, {v}) is not an edge"));
            }
            if !used.insert(v) {
                return Err(format!("right vertex {v} repeats"));
            }
            if v != last {
                u = self.mate_right[v]
                    .ok_or_else(|| format!("right vertex {v} is free mid-path"))?;
            }
        }
        if self.mate_right[last].is_some() {
            return Err(format!("path ends at matched right vertex {last}"));
        }
        Ok(())
    }
}

impl Constraint<Vec<usize>> for MaintainedMatching {
    type Action = Augment;

    fn admits(&self, index: usize, _adj: &Vec<usize>, action: &Augment) -> bool {
        self.check(index, &action.0).is_ok()
    }

    fn apply(&mut self, index: usize, _adj: &Vec<usize>, Augment(path): Augment) -> Result<()> {
        self.check(index, &path)
            .map_err(|why| Error::contract(format!("augmenting path for {index}: {why}")))?;
        let mut u = index;
        for &v in &path {
            let next = self.mate_right[v];
            self.mate_right[v] = Some(u);
            self.mate_left[u] = Some(v);
            match next {
                Some(w) => u = w,
                None => break,
            }
        }
        self.costs.push(2 * path.len() - 1);
        Ok(())
    }

    fn must_serve(&self) -> bool {
        true
    }
}

/// Left vertices arrive with their edges; each must be matched on arrival,
/// paying the length of the augmenting path.
#[derive(Debug, Clone)]
pub struct SapProblem {
    graph: BipartiteGraph,
}

impl SapProblem {
    pub fn new(graph: BipartiteGraph) -> Self {
        Self { graph }
    }

    pub fn graph(&self) -> &BipartiteGraph {
        &self.graph
    }
}

impl Problem for SapProblem {
    type Request = Vec<usize>;
    /// Number of right vertices.
    type Public = usize;
    type State = MaintainedMatching;

    fn sense(&self) -> Sense {
        Sense::Minimize
    }

    fn requests(&self) -> &[Vec<usize>] {
        &self.graph.adj
    }

    fn public(&self) -> &usize {
        &self.graph.right
    }

    fn initial_state(&self) -> MaintainedMatching {
        MaintainedMatching::new(&self.graph)
    }

    fn objective(&self, state: &MaintainedMatching) -> f64 {
        state.costs.iter().sum::<usize>() as f64
    }

    fn counters(&self, state: &MaintainedMatching, _oracle_objective: f64) -> Counters {
        let mut c = Counters::new();
        c.insert("matching_size".into(), state.size() as i64);
        c.insert(
            "max_step_cost".into(),
            state.costs.iter().copied().max().unwrap_or(0) as i64,
        );
        c
    }
}

/// Every step costs at least one edge, so `n` lower-bounds the total. Also
/// confirms that every left vertex can be matched.
#[derive(Debug, Clone, Copy, Default)]
pub struct UnitStepBound;

impl Oracle<SapProblem> for UnitStepBound {
    fn optimum(&self, problem: &SapProblem) -> Result<f64> {
        let g = problem.graph();
        let m = hopcroft_karp(g);
        if m < g.left() {
            return Err(Error::instance(format!(
                "graph has a maximum matching of size {m}, fewer than its {} left vertices",
                g.left()
            )));
        }
        Ok(g.left() as f64)
    }
}

/// Breadth-first search for a shortest augmenting path from the arriving
/// vertex. Neighbors are scanned in index order; among free right vertices
/// at the minimum depth the lowest index wins.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ShortestAugmentingPath;

impl ShortestAugmentingPath {
    pub fn find_path(state: &MaintainedMatching, u0: usize) -> Option<Vec<usize>> {
        let nr = state.mate_right.len();
        let mut parent: Vec<Option<usize>> = vec![None; nr];
        let mut seen = vec![false; nr];
        let mut level: Vec<usize> = Vec::new();
        for &v in &state.adj[u0] {
            if !seen[v] {
                seen[v] = true;
                level.push(v);
            }
        }
        while !level.is_empty() {
            if let Some(&end) = level
                .iter()
                .filter(|&&v| state.mate_right[v].is_none())
                .min()
            {
                let mut path = vec![end];
                let mut v = end;
                while let Some(p) = parent[v] {
                    path.push(p);
                    v = p;
                }
                path.reverse();
                return Some(path);
            }
            let mut next = Vec::new();
            for &v in &level {
                let u = state.mate_right[v].expect("non-free vertex in level");
                for &w in &state.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        parent[w] = Some(v);
                        next.push(w);
                    }
                }
            }
            level = next;
        }
        None
    }
}

impl OnlineAlgorithm<SapProblem> for ShortestAugmentingPath {
    fn id(&self) -> String {
        "match-sap".into()
    }

    fn run(
        &self,
        _right: &usize,
        session: &mut Session<'_, Vec<usize>, MaintainedMatching>,
        _rng: &mut TrialRng,
    ) -> Result<()> {
        while let Some(a) = session.next_arrival()? {
            let path = Self::find_path(session.state(), a.index).ok_or_else(|| {
                Error::instance(format!(
                    "no augmenting path for left vertex {} at position {}",
                    a.index, a.position
                ))
            })?;
            session.act(Augment(path))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arrival::{rng_for, Stream};
    use crate::online::execute;

    fn run(g: BipartiteGraph, order: &[usize]) -> Result<MaintainedMatching> {
        let p = SapProblem::new(g);
        let mut rng = rng_for(0, Stream::Algorithm);
        execute(&ShortestAugmentingPath, &p, order, &mut rng)
    }

    #[test]
    fn single_edge_costs_one() {
        let s = run(BipartiteGraph::new(1, 1, &[(0, 0)]).unwrap(), &[0]).unwrap();
        assert_eq!(s.step_costs(), &[1]);
    }

    #[test]
    fn complete_graph_steps_cost_one() {
        let edges: Vec<(usize, usize)> = (0..5).flat_map(|u| (0..5).map(move |v| (u, v))).collect();
        let s = run(BipartiteGraph::new(5, 5, &edges).unwrap(), &[3, 1, 4, 0, 2]).unwrap();
        assert_eq!(s.step_costs(), &[1; 5]);
    }

    #[test]
    fn blocked_vertex_forces_long_path() {
        // Left 0 takes right 0 first; left 1 only knows right 0.
        let g = BipartiteGraph::new(2, 2, &[(0, 0), (0, 1), (1, 0)]).unwrap();
        let s = run(g, &[0, 1]).unwrap();
        assert_eq!(s.step_costs(), &[1, 3]);
        assert!(s.is_valid());
    }

    #[test]
    fn missing_perfect_matching_names_the_arrival() {
        let g = BipartiteGraph::new(2, 2, &[(0, 0), (1, 0)]).unwrap();
        let err = run(g, &[0, 1]).unwrap_err();
        assert!(err.to_string().contains("left vertex 1"));
    }

    #[test]
    fn cycle_is_two_regular() {
        let g = gen_cycle_instance(2).unwrap();
        assert_eq!(g.edges().count(), 4);
        assert_eq!(hopcroft_karp(&g), 2);
    }

    #[test]
    fn constraint_rejects_bogus_path() {
        let g = BipartiteGraph::new(2, 2, &[(0, 0), (1, 1)]).unwrap();
        let mut s = MaintainedMatching::new(&g);
        assert!(s.apply(0, &vec![0], Augment(vec![1])).is_err());
        s.apply(0, &vec![0], Augment(vec![0])).unwrap();
        assert!(s.apply(1, &vec![1], Augment(vec![0])).is_err());
    }
}
