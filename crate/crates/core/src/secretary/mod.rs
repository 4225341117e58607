//! Single-item and multiple-item secretary algorithms.
//!
//! All algorithms here run against [`SelectionProblem`]: values arrive one at
//! a time and the algorithm may pick at most `k` of them.

mod multiple;
mod oblivious;
mod single;

pub use multiple::{
    gen_lb_instance, KAdaptive, KHalves, KOblivious, KSecretaryParams, KSegmented, PickEvent,
    PickLog, Window, SMALL_K,
};
pub use oblivious::{run_two_phase, FiftyPercentOblivious, OrderOblivious, PhaseTwoRule};
pub use single::{best_wait_threshold, success_probability_formula, PrefixRule, WaitAndPick};

use crate::error::{Error, Result};
use crate::numeric::{Ranked, TOL};
use crate::online::{Constraint, Counters, OfflineOptimum, Oracle, Problem, Sense};
use crate::values::ValueInstance;

/// The only action in a selection problem: take the current item.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pick;

/// At most `k` picked items.
#[derive(Debug, Clone, PartialEq)]
pub struct Cardinality {
    k: usize,
    picked: Vec<usize>,
}

impl Cardinality {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            picked: Vec::new(),
        }
    }

    pub fn picked(&self) -> &[usize] {
        &self.picked
    }

    pub fn remaining(&self) -> usize {
        self.k - self.picked.len()
    }
}

impl<R> Constraint<R> for Cardinality {
    type Action = Pick;

    fn admits(&self, _index: usize, _request: &R, _action: &Pick) -> bool {
        self.picked.len() < self.k
    }

    fn apply(&mut self, index: usize, _request: &R, _action: Pick) -> Result<()> {
        if self.picked.len() >= self.k {
            return Err(Error::contract(format!(
                "budget of {} items exhausted; cannot pick item {index}",
                self.k
            )));
        }
        self.picked.push(index);
        Ok(())
    }
}

/// Pick at most `k` of the values, maximizing their sum.
#[derive(Debug, Clone)]
pub struct SelectionProblem {
    values: ValueInstance,
    k: usize,
}

impl SelectionProblem {
    pub fn new(values: ValueInstance, k: usize) -> Result<Self> {
        if k == 0 || k > values.len() {
            return Err(Error::param(format!(
                "budget k={k} must lie in 1..={}",
                values.len()
            )));
        }
        Ok(Self { values, k })
    }

    pub fn single(values: ValueInstance) -> Self {
        Self { values, k: 1 }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &ValueInstance {
        &self.values
    }
}

impl Problem for SelectionProblem {
    type Request = f64;
    /// The budget `k` is known upfront.
    type Public = usize;
    type State = Cardinality;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn requests(&self) -> &[f64] {
        self.values.values()
    }

    fn public(&self) -> &usize {
        &self.k
    }

    fn initial_state(&self) -> Cardinality {
        Cardinality::new(self.k)
    }

    fn objective(&self, state: &Cardinality) -> f64 {
        state.picked.iter().map(|&i| self.values.values()[i]).sum()
    }

    fn counters(&self, state: &Cardinality, oracle_objective: f64) -> Counters {
        let mut c = Counters::new();
        c.insert("items_picked".into(), state.picked.len() as i64);
        if self.k == 1 {
            let hit = !state.picked.is_empty() && self.objective(state) >= oracle_objective - TOL;
            c.insert("success".into(), hit as i64);
        }
        c
    }
}

/// Sum of the `k` largest values, with their indices.
pub fn top_k(values: &ValueInstance, k: usize) -> OfflineOptimum<Vec<usize>> {
    let mut keys: Vec<Ranked> = (0..values.len()).map(|i| values.key(i)).collect();
    keys.sort_unstable_by(|a, b| b.cmp(a));
    keys.truncate(k);
    OfflineOptimum {
        value: keys.iter().map(|r| r.value).sum(),
        witness: keys.iter().map(|r| r.index).collect(),
        exact: true,
    }
}

/// Offline oracle for [`SelectionProblem`].
#[derive(Debug, Clone, Copy, Default)]
pub struct TopK;

impl Oracle<SelectionProblem> for TopK {
    fn optimum(&self, problem: &SelectionProblem) -> Result<f64> {
        Ok(top_k(problem.values(), problem.k()).value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cardinality_rejects_extra_pick() {
        let mut c = Cardinality::new(1);
        Constraint::<f64>::apply(&mut c, 0, &1.0, Pick).unwrap();
        let err = Constraint::<f64>::apply(&mut c, 1, &2.0, Pick).unwrap_err();
        assert!(matches!(err, Error::ContractViolation(_)));
        assert_eq!(c.picked(), &[0]);
    }

    #[test]
    fn top_k_picks_largest() {
        let v = ValueInstance::new(vec![3.0, 9.0, 1.0, 7.0]).unwrap();
        let opt = top_k(&v, 2);
        assert_eq!(opt.value, 16.0);
        assert_eq!(opt.witness, vec![1, 3]);
    }

    #[test]
    fn budget_must_be_in_range() {
        let v = ValueInstance::new(vec![1.0, 2.0]).unwrap();
        assert!(SelectionProblem::new(v.clone(), 0).is_err());
        assert!(SelectionProblem::new(v.clone(), 3).is_err());
        assert!(SelectionProblem::new(v, 2).is_ok());
    }
}
