//! Online packing LPs: columns `(v_i, a_i)` with `a_i` in `[0,1]^d` arrive
//! online; picked columns must fit within budget `k` in every row.

mod online;
mod simplex;

pub use online::{offline_fractional_opt, round_fractional, FractionalOpt, OnlinePacking};
pub use simplex::{solve_boxed_packing, LpSolution};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::arrival::{rng_for, Stream};
use crate::error::{Error, Result};
use crate::online::{Constraint, Counters, Oracle, Problem, Sense};
use crate::secretary::Pick;

/// Usage may exceed a row budget by this much before it counts as a breach.
pub const ROW_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub v: f64,
    pub a: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInstance")]
pub struct PackingInstance {
    d: usize,
    k: usize,
    columns: Vec<Column>,
}

#[derive(Deserialize)]
struct RawInstance {
    d: usize,
    k: usize,
    columns: Vec<Column>,
}

impl TryFrom<RawInstance> for PackingInstance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        Self::new(raw.d, raw.k, raw.columns)
    }
}

impl PackingInstance {
    pub fn new(d: usize, k: usize, columns: Vec<Column>) -> Result<Self> {
        if d == 0 || k == 0 {
            return Err(Error::instance("packing instance needs d >= 1 and k >= 1"));
        }
        if columns.is_empty() {
            return Err(Error::instance(
                "packing instance needs at least one column",
            ));
        }
        for (i, col) in columns.iter().enumerate() {
            if col.a.len() != d {
                return Err(Error::instance(format!(
                    "column {i} has {} coordinates, expected {d}",
                    col.a.len()
                )));
            }
            if !(col.v >= 0.0 && col.v.is_finite()) {
                return Err(Error::instance(format!("column {i} has value {}", col.v)));
            }
            if col.a.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
                return Err(Error::instance(format!(
                    "column {i} has a coordinate outside [0,1]"
                )));
            }
        }
        Ok(Self { d, k, columns })
    }

    /// Values U[0,1), coordinates U[0,1)^d.
    pub fn random(n: usize, d: usize, k: usize, seed: u64) -> Result<Self> {
        let mut rng = rng_for(seed, Stream::Instance);
        let columns = (0..n)
            .map(|_| Column {
                v: rng.random(),
                a: (0..d).map(|_| rng.random()).collect(),
            })
            .collect();
        Self::new(d, k, columns)
    }

    /// The multiple-secretary special case: one row, unit coordinates.
    pub fn from_values(values: &[f64], k: usize) -> Result<Self> {
        Self::new(
            1,
            k,
            values.iter().map(|&v| Column { v, a: vec![1.0] }).collect(),
        )
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Solves the boxed LP over the columns `subset` with every row budget set
    /// to `budget`. The solution's `x` is parallel to `subset`.
    pub fn lp_solve(&self, subset: &[usize], budget: f64) -> Result<LpSolution> {
        if subset.is_empty() {
            return Err(Error::param("LP prefix must be non-empty"));
        }
        if budget.is_nan() || budget <= 0.0 {
            return Err(Error::param(format!("LP budget {budget} must be positive")));
        }
        let c: Vec<f64> = subset.iter().map(|&i| self.columns[i].v).collect();
        let cols: Vec<&[f64]> = subset
            .iter()
            .map(|&i| self.columns[i].a.as_slice())
            .collect();
        solve_boxed_packing(&c, &cols, &vec![budget; self.d])
    }

    /// Whether `picked` fits within `k` in every row.
    pub fn is_feasible(&self, picked: &[usize]) -> bool {
        let mut usage = vec![0.0; self.d];
        for &i in picked {
            for (u, a) in usage.iter_mut().zip(&self.columns[i].a) {
                *u += a;
            }
        }
        usage.iter().all(|&u| u <= self.k as f64 + ROW_TOL)
    }
}

/// Cumulative row usage of the picked columns.
#[derive(Debug, Clone)]
pub struct RowUsage {
    budget: f64,
    usage: Vec<f64>,
    picked: Vec<usize>,
}

impl RowUsage {
    pub fn new(d: usize, budget: f64) -> Self {
        Self {
            budget,
            usage: vec![0.0; d],
            picked: Vec::new(),
        }
    }

    pub fn usage(&self) -> &[f64] {
        &self.usage
    }

    pub fn picked(&self) -> &[usize] {
        &self.picked
    }

    pub fn fits(&self, a: &[f64]) -> bool {
        self.usage
            .iter()
            .zip(a)
            .all(|(u, x)| u + x <= self.budget + ROW_TOL)
    }
}

impl Constraint<Column> for RowUsage {
    type Action = Pick;

    fn admits(&self, _index: usize, col: &Column, _action: &Pick) -> bool {
        self.fits(&col.a)
    }

    fn apply(&mut self, index: usize, col: &Column, _action: Pick) -> Result<()> {
        if let Some(r) =
            (0..self.usage.len()).find(|&r| self.usage[r] + col.a[r] > self.budget + ROW_TOL)
        {
            return Err(Error::contract(format!(
                "row budget: column {index} would raise row {r} to {} > {}",
                self.usage[r] + col.a[r],
                self.budget
            )));
        }
        for (u, x) in self.usage.iter_mut().zip(&col.a) {
            *u += x;
        }
        self.picked.push(index);
        Ok(())
    }
}

/// What the algorithm knows upfront: dimensions and budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PackingShape {
    pub n: usize,
    pub d: usize,
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct PackingProblem {
    instance: PackingInstance,
    shape: PackingShape,
}

impl PackingProblem {
    pub fn new(instance: PackingInstance) -> Self {
        let shape = PackingShape {
            n: instance.len(),
            d: instance.d(),
            k: instance.k(),
        };
        Self { instance, shape }
    }

    pub fn instance(&self) -> &PackingInstance {
        &self.instance
    }
}

impl Problem for PackingProblem {
    type Request = Column;
    type Public = PackingShape;
    type State = RowUsage;

    fn sense(&self) -> Sense {
        Sense::Maximize
    }

    fn requests(&self) -> &[Column] {
        self.instance.columns()
    }

    fn public(&self) -> &PackingShape {
        &self.shape
    }

    fn initial_state(&self) -> RowUsage {
        RowUsage::new(self.instance.d(), self.instance.k() as f64)
    }

    fn objective(&self, state: &RowUsage) -> f64 {
        state
            .picked
            .iter()
            .map(|&i| self.instance.columns()[i].v)
            .sum()
    }

    fn counters(&self, state: &RowUsage, _oracle_objective: f64) -> Counters {
        let mut c = Counters::new();
        c.insert("items_picked".into(), state.picked.len() as i64);
        c
    }
}

/// The fractional optimum `V*`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FractionalOracle;

impl Oracle<PackingProblem> for FractionalOracle {
    fn optimum(&self, problem: &PackingProblem) -> Result<f64> {
        Ok(offline_fractional_opt(problem.instance())?.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coordinates_outside_unit_interval() {
        let cols = vec![Column {
            v: 1.0,
            a: vec![1.5],
        }];
        assert!(PackingInstance::new(1, 1, cols).is_err());
    }

    #[test]
    fn lp_on_prefix_with_custom_budget() {
        let inst = PackingInstance::from_values(&[5.0, 4.0, 3.0], 3).unwrap();
        let s = inst.lp_solve(&[0, 1, 2], 2.0).unwrap();
        assert!((s.objective - 9.0).abs() < 1e-12);
        assert!(inst.lp_solve(&[], 2.0).is_err());
        assert!(inst.lp_solve(&[0], 0.0).is_err());
    }

    #[test]
    fn row_usage_rejects_breach() {
        let mut s = RowUsage::new(2, 1.0);
        let col = Column {
            v: 1.0,
            a: vec![0.6, 0.2],
        };
        s.apply(0, &col, Pick).unwrap();
        assert!(!s.admits(1, &col, &Pick));
        assert!(matches!(
            s.apply(1, &col, Pick),
            Err(Error::ContractViolation(_))
        ));
    }
}
