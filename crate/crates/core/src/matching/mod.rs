//! Online bipartite matching: value maximization with agents arriving in
//! random order, and minimum-augmentation maintenance of a maximum matching.

mod hungarian;
mod sap;
mod value;

pub use hungarian::min_cost_assignment;
pub use sap::{
    gen_cycle_instance, hopcroft_karp, Augment, BipartiteGraph, MaintainedMatching, SapProblem,
    ShortestAugmentingPath, UnitStepBound,
};
pub use value::OnlineValueMatching;

use crate::error::{Error, Result};
use crate::online::{Constraint, Counters, Oracle, Problem, Sense};

/// Agents (rows) by items (columns), non-negative values.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteValueMatrix {
    rows: Vec<Vec<f64>>,
    items: usize,
}

impl BipartiteValueMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let items = rows.first().map_or(0, Vec::len);
        if rows.is_empty() || items == 0 {
            return Err(Error::instance(
                "value matrix needs at least one agent and one item",
            ));
        }
        for (i, r) in rows.iter().enumerate() {
            if r.len() != items {
                return Err(Error::instance(format!(
                    "agent {i} has {} values, expected {items}",
                    r.len()
                )));
            }
            if r.iter().any(|&v| !(v >= 0.0 && v.is_finite())) {
                return Err(Error::instance(format!(
                    "agent {i} has a negative or non-finite value"
                )));
            }
        }
        Ok(Self { rows, items })
    }

    pub fn agents(&self) -> usize {
        self.rows.len()
    }

    pub fn items(&self) -> usize {
        self.items
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn value(&self, agent: usize, item: usize) -> f64 {
        self.rows[agent][item]
    }
}

/// A matching as `(agent, item)` pairs, sorted by agent.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxMatching {
    pub value: f64,
    pub pairs: Vec<(usize, usize)>,
}

impl MaxMatching {
    pub fn partner(&self, agent: usize) -> Option<usize> {
        self.pairs
            .binary_search_by_key(&agent, |p| p.0)
            .ok()
            .map(|k| self.pairs[k].1)
    }
}

/// Maximum-value matching of the agents `subset` (given as `(id, row)`) to
/// `items` items. Agents are processed in id order, so the result depends
/// only on the set of agents. Zero-value pairs are dropped: the agent counts
/// as unmatched.
pub fn max_value_matching(subset: &[(usize, &[f64])], items: usize) -> MaxMatching {
    let mut agents: Vec<(usize, &[f64])> = subset.to_vec();
    agents.sort_unstable_by_key(|a| a.0);
    // Dummy zero-value items let every agent be assigned.
    let cols = items.max(agents.len());
    let cost: Vec<Vec<f64>> = agents
        .iter()
        .map(|(_, row)| {
            (0..cols)
                .map(|j| -row.get(j).copied().unwrap_or(0.0))
                .collect()
        })
        .collect();
    let assignment = min_cost_assignment(&cost, cols);
    let mut pairs = Vec::new();
    let mut value = 0.0;
    for ((id, row), &j) in agents.iter().zip(&assignment) {
        if j < items && row[j] > 0.0 {
            pairs.push((*id, j));
            value += row[j];
        }
    }
    MaxMatching { value, pairs }
}

/// [`max_value_matching`] for agent indices of a matrix.
pub fn hungarian_max_value(matrix: &BipartiteValueMatrix, agents: &[usize]) -> Result<MaxMatching> {
    if agents.is_empty() {
        return Err(Error::param("agent subset must be non-empty"));
    }
    if let Some(&a) = agents.iter().find(|&&a| a >= matrix.agents()) {
        return Err(Error::instance(format!("agent {a} is outside the matrix")));
    }
    let subset: Vec<(usize, &[f64])> = agents
        .iter()
        .map(|&a| (a, matrix.rows[a].as_slice()))
        .collect();
    Ok(max_value_matching(&subset, matrix.items()))
}

/// Assign the current agent an item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assign(pub usize);

/// Partial matching item <-> agent.
#[derive(Debug, Clone)]
pub struct Allocation {
    owner: Vec<Option<usize>>,
    pairs: Vec<(usize, usize)>,
}

impl Allocation {
    pub fn new(items: usize) -> Self {
        Self {
            owner: vec![None; items],
            pairs: Vec::new(),
        }
    }

    pub fn is_free(&self, item: usize) -> bool {
        self.owner.get(item).is_some_and(Option::is_none)
    }

    /// `(agent, item)` in allocation order.
    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

impl Constraint<Vec<f64>> for Allocation {
    type Action = Assign;

    fn admits(&self, _agent: usize, _row: &Vec<f64>, &Assign(item): &Assign) -> bool {
        self.is_free(item)
    }

    fn apply(&mut self, agent: usize, _row: &Vec<f64>, Assign(item): Assign) -> Result<()> {
        match self.owner.get(item) {
            None => Err(Error::contract(format!(
                "matching: item {item} does not exist"
            ))),
            Some(Some(other)) => Err(Error::contract(format!(
                "matching: item {item} already allocated to agent {other}"
            ))),
            Some(None) => {
                self.owner[item] = Some(agent);
                self.pairs.push((agent, item));
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MatchingProblem {
    matrix: BipartiteValueMatrix,
}

impl MatchingProblem {
    pub fn new(matrix: BipartiteValueMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &BipartiteValueMatrix {
        &self.matrix
    }
}

impl Problem for MatchingProblem {
    type Request = Vec<f64>;
    /// Number of items.
    type Public = usize;
    type State = Allocation;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn requests(&self) -> &[Vec<f64>] {
        self.matrix.rows()
    }

    fn public(&self) -> &usize {
        &self.matrix.items
    }

    fn initial_state(&self) -> Allocation {
        Allocation::new(self.matrix.items())
    }

    fn objective(&self, state: &Allocation) -> f64 {
        state
            .pairs
            .iter()
            .map(|&(a, j)| self.matrix.value(a, j))
            .sum()
    }

    fn counters(&self, state: &Allocation, _oracle_objective: f64) -> Counters {
        let mut c = Counters::new();
        c.insert("agents_matched".into(), state.pairs.len() as i64);
        c
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HungarianOracle;

impl Oracle<MatchingProblem> for HungarianOracle {
    fn optimum(&self, problem: &MatchingProblem) -> Result<f64> {
        let all: Vec<usize> = (0..problem.matrix().agents()).collect();
        Ok(hungarian_max_value(problem.matrix(), &all)?.value)
    }
}
