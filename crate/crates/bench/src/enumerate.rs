//! Exact expectations over every arrival order of a small instance.

use std::fmt::Write as _;

use ro_arena::arrival::trial_seed;
use ro_arena::covering::{BinOracle, BinPackingProblem, Fit};
use ro_arena::graphical::{ForestProblem, Kruskal};
use ro_arena::matching::{
    HungarianOracle, MatchingProblem, OnlineValueMatching, SapProblem, ShortestAugmentingPath,
    UnitStepBound,
};
use ro_arena::packing::{FractionalOracle, PackingProblem};
use ro_arena::secretary::{SelectionProblem, TopK, WaitAndPick};
use ro_arena::trial::Expectation;
use ro_arena::{enumerate_expectation, Error as CoreError, Problem};

use crate::error::{BenchError, Result};
use crate::instance::{Instance, Source};
use crate::registry::{self, Algorithm};

#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationReport {
    pub algorithm: String,
    pub instance: String,
    pub n: usize,
    pub expectation: Expectation,
    /// For a sweep: `(m, expectation)` for every prefix length, and the best
    /// `m` (highest success probability, smallest `m` on ties).
    pub sweep: Option<(Vec<(usize, Expectation)>, usize)>,
}

impl EnumerationReport {
    pub fn text(&self) -> String {
        let mut t = String::new();
        let e = &self.expectation;
        let _ = writeln!(t, "algorithm            {}", self.algorithm);
        let _ = writeln!(t, "instance             {} (n={})", self.instance, self.n);
        let _ = writeln!(t, "orders               {}", e.orders);
        let _ = writeln!(t, "mean objective       {:.15e}", e.mean_objective);
        let _ = writeln!(
            t,
            "success probability  {:.15e} ({}/{})",
            e.success_probability, e.successes, e.orders
        );
        if let Some((rows, best)) = &self.sweep {
            let _ = writeln!(t, "{:>4}  {:>22}  {:>22}", "m", "success", "mean");
            for (m, e) in rows {
                let _ = writeln!(
                    t,
                    "{m:>4}  {:>22.15e}  {:>22.15e}",
                    e.success_probability, e.mean_objective
                );
            }
            let _ = writeln!(t, "best m = {best}");
        }
        t
    }
}

/// Enumerates `alg` on the instance from `source` (generated with instance
/// seed 0 under `seed`). With `sweep`, a single-item selection algorithm is
/// replaced by every wait-and-pick prefix length.
pub fn enumerate(alg: &str, source: &str, seed: u64, sweep: bool) -> Result<EnumerationReport> {
    let reg = registry::parse(alg)?;
    let src = Source::parse(source)?;
    let inst = src.instance(reg.algorithm.kind(), trial_seed(seed, 0))?;
    let (n, expectation, sweep_rows) = match (&reg.algorithm, inst) {
        (Algorithm::Selection { alg, k }, Instance::Values(v)) => {
            let p = SelectionProblem::new(v, *k)?;
            let e = enumerate_expectation(alg.as_ref(), &p, &TopK)?;
            let rows = if sweep {
                if *k != 1 {
                    return Err(BenchError::usage(
                        "a prefix sweep needs a single-item algorithm",
                    ));
                }
                if p.len() < 2 {
                    return Err(BenchError::usage("a prefix sweep needs at least two items"));
                }
                let rows = (1..p.len())
                    .map(|m| {
                        Ok((
                            m,
                            enumerate_expectation(&WaitAndPick::with_prefix(m), &p, &TopK)?,
                        ))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let best = rows
                    .iter()
                    .fold(&rows[0], |b, r| {
                        if r.1.success_probability > b.1.success_probability + 1e-12 {
                            r
                        } else {
                            b
                        }
                    })
                    .0;
                Some((rows, best))
            } else {
                None
            };
            (p.len(), e, rows)
        }
        (_, _) if sweep => {
            return Err(BenchError::usage(
                "--sweep applies to selection algorithms only",
            ))
        }
        (Algorithm::Forest(alg), Instance::Graph(g)) => {
            let p = ForestProblem::new(g);
            (
                p.len(),
                enumerate_expectation(alg.as_ref(), &p, &Kruskal)?,
                None,
            )
        }
        (Algorithm::Packing(alg), Instance::Packing(pi)) => {
            let p = PackingProblem::new(pi);
            (
                p.len(),
                enumerate_expectation(alg, &p, &FractionalOracle)?,
                None,
            )
        }
        (Algorithm::Matching, Instance::Matrix(m)) => {
            let p = MatchingProblem::new(m);
            (
                p.len(),
                enumerate_expectation(&OnlineValueMatching, &p, &HungarianOracle)?,
                None,
            )
        }
        (Algorithm::Sap, Instance::Bipartite(g)) => {
            let p = SapProblem::new(g);
            (
                p.len(),
                enumerate_expectation(&ShortestAugmentingPath, &p, &UnitStepBound)?,
                None,
            )
        }
        (Algorithm::Bins(rule), Instance::Sizes(s)) => {
            let p = BinPackingProblem::new(s);
            (
                p.len(),
                enumerate_expectation(&Fit(*rule), &p, &BinOracle)?,
                None,
            )
        }
        _ => {
            return Err(CoreError::Unsupported(format!(
                "{} is randomized; exact enumeration needs a deterministic algorithm",
                reg.spec
            ))
            .into())
        }
    };
    Ok(EnumerationReport {
        algorithm: reg.spec.to_string(),
        instance: src.label(),
        n,
        expectation,
        sweep: sweep_rows,
    })
}
